"""Domain types shared by every stage of the pipeline.

All types validate their invariants at construction and are immutable
afterwards, so they can be shared freely across worker processes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "ValidationError",
    "InternalError",
    "Position",
    "Trajectory",
    "BoundingBox",
    "KinematicTrack",
    "RasterConfig",
    "TracletImage",
    "DEFAULT_PALETTE",
    "WHITE",
]

# 11-entry cold-to-hot ramp, bucket 1 (slowest) first.  Values are fixed
# bit-exactly; only distinctness and a stable order matter downstream.
DEFAULT_PALETTE: tuple[tuple[int, int, int], ...] = (
    (0x00, 0x00, 0xFF),
    (0x00, 0x66, 0xFF),
    (0x00, 0xCC, 0xFF),
    (0x00, 0xFF, 0x99),
    (0x00, 0xFF, 0x00),
    (0x99, 0xFF, 0x00),
    (0xCC, 0xFF, 0x00),
    (0xFF, 0xFF, 0x00),
    (0xFF, 0x99, 0x00),
    (0xFF, 0x66, 0x00),
    (0xFF, 0x00, 0x00),
)

WHITE: tuple[int, int, int] = (255, 255, 255)

BUCKET_COUNT = 11


class ValidationError(ValueError):
    """An input value violates a domain invariant.

    ``reason`` is a stable machine-readable code; ``detail`` is for humans.
    """

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        self.detail = detail
        super().__init__(f"{reason}: {detail}" if detail else reason)


class InternalError(RuntimeError):
    """An internal invariant failed; indicates a bug, not bad input."""


def _finite(x) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x)


@dataclass(frozen=True, slots=True)
class Position:
    """One timestamped geographic sample.

    ``t`` is UTC epoch seconds (fractional allowed); ``alt`` optional meters.
    """

    lon: float
    lat: float
    t: float
    alt: float | None = None

    def __post_init__(self):
        if not _finite(self.lon) or not -180.0 <= self.lon <= 180.0:
            raise ValidationError("lon_out_of_range", f"lon={self.lon!r}")
        if not _finite(self.lat) or not -90.0 <= self.lat <= 90.0:
            raise ValidationError("lat_out_of_range", f"lat={self.lat!r}")
        if not _finite(self.t):
            raise ValidationError("t_not_finite", f"t={self.t!r}")
        if self.alt is not None and not _finite(self.alt):
            raise ValidationError("alt_not_finite", f"alt={self.alt!r}")


@dataclass(frozen=True, slots=True)
class Trajectory:
    """Time-ordered positions of one moving object, with a class label.

    Timestamps must be non-decreasing.  Strictly increasing timestamps are
    established by the ingestion adapters and by the dedup pass; kinematics
    derivation enforces them as a hard precondition.
    """

    id: str
    label: str
    points: tuple[Position, ...]

    def __post_init__(self):
        if not self.id:
            raise ValidationError("empty_trajectory_id")
        if not isinstance(self.points, tuple):
            object.__setattr__(self, "points", tuple(self.points))
        if len(self.points) == 0:
            raise ValidationError("empty_trajectory", self.id)
        prev = None
        for p in self.points:
            if prev is not None and p.t < prev.t:
                raise ValidationError(
                    "timestamps_not_sorted", f"{self.id}: {prev.t} -> {p.t}"
                )
            prev = p

    def __len__(self) -> int:
        return len(self.points)

    def duration_s(self) -> float:
        return self.points[-1].t - self.points[0].t

    def with_points(self, points, suffix: str = "") -> "Trajectory":
        """New trajectory with the same identity but different points."""
        return Trajectory(self.id + suffix, self.label, tuple(points))


@dataclass(frozen=True, slots=True)
class BoundingBox:
    lon_min: float
    lon_max: float
    lat_min: float
    lat_max: float

    def __post_init__(self):
        if self.lon_min > self.lon_max or self.lat_min > self.lat_max:
            raise ValidationError(
                "bbox_inverted",
                f"lon [{self.lon_min}, {self.lon_max}] lat [{self.lat_min}, {self.lat_max}]",
            )

    @classmethod
    def of_points(cls, points) -> "BoundingBox":
        lons = [p.lon for p in points]
        lats = [p.lat for p in points]
        return cls(min(lons), max(lons), min(lats), max(lats))

    @property
    def d_x(self) -> float:
        return self.lon_max - self.lon_min

    @property
    def d_y(self) -> float:
        return self.lat_max - self.lat_min


@dataclass(frozen=True, slots=True)
class KinematicTrack:
    """Trajectory plus per-point speed (m/s) and per-segment acceleration (m/s^2)."""

    trajectory: Trajectory
    speeds: tuple[float, ...]
    accels: tuple[float, ...]

    def __post_init__(self):
        n = len(self.trajectory.points)
        if len(self.speeds) != n:
            raise ValidationError(
                "speeds_length_mismatch", f"{len(self.speeds)} speeds for {n} points"
            )
        if len(self.accels) != n - 1:
            raise ValidationError(
                "accels_length_mismatch", f"{len(self.accels)} accels for {n} points"
            )
        for s in self.speeds:
            if not _finite(s) or s < 0:
                raise ValidationError("bad_speed", repr(s))
        for a in self.accels:
            if not _finite(a):
                raise ValidationError("bad_accel", repr(a))


@dataclass(frozen=True, slots=True)
class RasterConfig:
    """Everything the rasterizer needs to turn a track into pixels.

    ``max_speed`` / ``max_accel`` are the reference ceilings for the 11-bucket
    color schemes (acceleration is bucketed by absolute value).  A ceiling of
    exactly 0 is the documented degenerate fallback for all-stationary data:
    every value then lands in bucket 1.
    """

    max_speed: float
    max_accel: float
    n: int = 224
    buckets: int = BUCKET_COUNT
    palette: tuple[tuple[int, int, int], ...] = DEFAULT_PALETTE
    background: tuple[int, int, int] = WHITE
    rounding: str = "floor"
    orientation: str = "lat_min_top"

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("raster_n_too_small", str(self.n))
        if self.buckets != BUCKET_COUNT:
            raise ValidationError("bucket_count_fixed", str(self.buckets))
        if not _finite(self.max_speed) or self.max_speed < 0:
            raise ValidationError("bad_max_speed", repr(self.max_speed))
        if not _finite(self.max_accel) or self.max_accel < 0:
            raise ValidationError("bad_max_accel", repr(self.max_accel))
        if self.rounding != "floor":
            raise ValidationError("unknown_rounding", self.rounding)
        if self.orientation != "lat_min_top":
            raise ValidationError("unknown_orientation", self.orientation)
        pal = tuple(tuple(int(c) for c in rgb) for rgb in self.palette)
        object.__setattr__(self, "palette", pal)
        if len(pal) != BUCKET_COUNT or len(set(pal)) != BUCKET_COUNT:
            raise ValidationError("palette_must_have_11_distinct_colors")
        for rgb in pal + (tuple(self.background),):
            if len(rgb) != 3 or any(not 0 <= c <= 255 for c in rgb):
                raise ValidationError("bad_color", repr(rgb))


class TracletImage:
    """An n-by-n RGB pixel grid; row 1 is the top image row."""

    __slots__ = ("n", "pixels")

    def __init__(self, n: int, pixels):
        import numpy as np

        arr = np.asarray(pixels, dtype=np.uint8)
        if arr.shape != (n, n, 3):
            raise ValidationError(
                "image_shape_mismatch", f"expected {(n, n, 3)}, got {arr.shape}"
            )
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "pixels", arr)

    def __setattr__(self, name, value):
        raise AttributeError("TracletImage is immutable")

    def __eq__(self, other):
        import numpy as np

        if not isinstance(other, TracletImage):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.pixels, other.pixels)

    def __repr__(self):
        return f"TracletImage(n={self.n})"

    def tobytes(self) -> bytes:
        return self.pixels.tobytes()
