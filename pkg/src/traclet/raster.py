"""Rasterize a kinematic track into an n-by-n RGB traclet image.

The picture encodes three things: trajectory shape (which pixels are hit),
speed (color of each position pixel, 11 buckets) and acceleration (color of
the line joining consecutive position pixels, 11 buckets over |a|).

Pixel coordinates are 1-based, x = column, y = row, with row 1 at the top;
the minimum-latitude edge of the bounding box maps to row 1.  That renders
geographically upside-down, which is irrelevant for classification as long
as it is consistent.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .model import (
    BUCKET_COUNT,
    BoundingBox,
    KinematicTrack,
    Position,
    RasterConfig,
    TracletImage,
    ValidationError,
)

__all__ = [
    "PixelCoord",
    "UnitCoord",
    "BinScheme",
    "normalize_position",
    "to_pixel",
    "bucket",
    "bresenham_line",
    "rasterize",
    "encode_png",
    "decode_png",
]


class PixelCoord(NamedTuple):
    x: int  # column, 1..n
    y: int  # row, 1..n, row 1 = top


class UnitCoord(NamedTuple):
    u: float  # fraction of bbox width, 0..1
    v: float  # fraction of bbox height, 0..1


@dataclass(frozen=True)
class BinScheme:
    """11 equal increments of [0, ceiling].

    ``boundaries[i-1]`` is the lower edge of bucket i; bucket i covers
    [boundary_i, boundary_{i+1}) and bucket 11 is closed at the top so the
    ceiling itself is representable.  A zero ceiling degenerates to a single
    effective bucket (everything maps to bucket 1).
    """

    ceiling: float
    increment: float
    boundaries: tuple[float, ...]

    @classmethod
    def from_ceiling(cls, ceiling: float) -> "BinScheme":
        if not math.isfinite(ceiling) or ceiling < 0:
            raise ValidationError("bad_bin_ceiling", repr(ceiling))
        increment = ceiling / BUCKET_COUNT
        boundaries = tuple(i * increment for i in range(BUCKET_COUNT))
        return cls(ceiling, increment, boundaries)


def bucket(value: float, scheme: BinScheme) -> int:
    """Bucket index in [1, 11] for a non-negative value.

    Values at or above the top boundary (including value == ceiling, and any
    out-of-reference values) map to bucket 11.
    """
    if value < 0:
        raise ValidationError("bucket_value_negative", repr(value))
    if scheme.increment <= 0.0:
        return 1
    return min(bisect_right(scheme.boundaries, value), BUCKET_COUNT)


def normalize_position(m: Position, bbox: BoundingBox) -> UnitCoord:
    """Fraction of the bbox extent travelled from the minimum corner.

    A degenerate axis (zero extent) maps to the middle of that axis, which
    lands in the center column/row after pixel mapping.
    """
    u = (m.lon - bbox.lon_min) / bbox.d_x if bbox.d_x > 0 else 0.5
    v = (m.lat - bbox.lat_min) / bbox.d_y if bbox.d_y > 0 else 0.5
    return UnitCoord(u, v)


def to_pixel(c: UnitCoord, n: int) -> PixelCoord:
    """Map a unit coordinate onto the raster: floor(c*n), clamped to [1, n]."""
    x = min(max(int(math.floor(c.u * n)), 1), n)
    y = min(max(int(math.floor(c.v * n)), 1), n)
    return PixelCoord(x, y)


def bresenham_line(a: PixelCoord, b: PixelCoord) -> list[PixelCoord]:
    """8-connected pixel path from a to b inclusive.

    Integer error accumulation; every emitted pixel is within max-norm 1/2 of
    the ideal segment.  Exact half-steps resolve toward the direction of
    travel, so the path for a directed pair is fully deterministic.
    """
    x, y = a
    dx = b.x - a.x
    dy = b.y - a.y
    sx = (dx > 0) - (dx < 0)
    sy = (dy > 0) - (dy < 0)
    adx = abs(dx)
    ady = abs(dy)
    pts = [PixelCoord(x, y)]
    if adx >= ady:
        e = 0
        for _ in range(adx):
            x += sx
            e += ady
            if 2 * e >= adx:
                y += sy
                e -= adx
            pts.append(PixelCoord(x, y))
    else:
        e = 0
        for _ in range(ady):
            y += sy
            e += adx
            if 2 * e >= ady:
                x += sx
                e -= ady
            pts.append(PixelCoord(x, y))
    return pts


def track_pixels(track: KinematicTrack, n: int) -> list[PixelCoord]:
    """Pixel position of every point, normalized to the track's own bbox."""
    pts = track.trajectory.points
    bbox = BoundingBox.of_points(pts)
    return [to_pixel(normalize_position(p, bbox), n) for p in pts]


def rasterize(track: KinematicTrack, cfg: RasterConfig) -> TracletImage:
    """Paint a track onto a fresh background grid.

    All acceleration lines are drawn first (Bresenham, colored by the
    |acceleration| bucket of their segment), then every position pixel is
    painted with its speed bucket color, so speed information wins wherever
    the two overlap.
    """
    pts = track.trajectory.points
    if len(pts) < 2:
        raise ValidationError("track_too_short", track.trajectory.id)
    n = cfg.n
    pix = track_pixels(track, n)
    speed_scheme = BinScheme.from_ceiling(cfg.max_speed)
    accel_scheme = BinScheme.from_ceiling(cfg.max_accel)
    palette = [bytes(rgb) for rgb in cfg.palette]

    buf = bytearray(bytes(cfg.background) * (n * n))
    for i in range(len(pix) - 1):
        color = palette[bucket(abs(track.accels[i]), accel_scheme) - 1]
        for (x, y) in bresenham_line(pix[i], pix[i + 1]):
            o = ((y - 1) * n + (x - 1)) * 3
            buf[o : o + 3] = color
    for i, (x, y) in enumerate(pix):
        color = palette[bucket(track.speeds[i], speed_scheme) - 1]
        o = ((y - 1) * n + (x - 1)) * 3
        buf[o : o + 3] = color

    return TracletImage(n, np.frombuffer(bytes(buf), dtype=np.uint8).reshape(n, n, 3))


def encode_png(img: TracletImage, path) -> None:
    """Write a lossless 8-bit RGB PNG; grid row 1 becomes the top image row."""
    from PIL import Image

    path = Path(path)
    try:
        Image.fromarray(img.pixels, mode="RGB").save(path, format="PNG")
    except OSError as e:
        raise OSError(f"writing {path}: {e}") from e


def decode_png(path) -> TracletImage:
    """Read a PNG written by encode_png back into a TracletImage."""
    from PIL import Image

    path = Path(path)
    try:
        with Image.open(path) as im:
            arr = np.asarray(im.convert("RGB"), dtype=np.uint8)
    except OSError as e:
        raise OSError(f"reading {path}: {e}") from e
    if arr.shape[0] != arr.shape[1]:
        raise ValidationError("image_not_square", f"{path}: {arr.shape}")
    return TracletImage(arr.shape[0], arr)
