"""Speed and acceleration derivation, plus dataset-level reference maxima.

Speeds are per-point: speed[i] is the great-circle distance to the next
point over the elapsed time, and the last point copies its predecessor so
speeds align one-to-one with positions.  Accelerations are per-segment:
accel[i] = (speed[i+1] - speed[i]) / dt[i], signed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .model import KinematicTrack, Position, Trajectory, ValidationError

EARTH_RADIUS_M = 6_371_000.0


def haversine_m(p1: Position, p2: Position) -> float:
    """Great-circle distance in meters between two positions."""
    lat1 = math.radians(p1.lat)
    lat2 = math.radians(p2.lat)
    dlat = lat2 - lat1
    dlon = math.radians(p2.lon) - math.radians(p1.lon)
    a = math.sin(dlat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(a)))


def derive_kinematics(traj: Trajectory) -> KinematicTrack:
    """Compute per-point speeds and per-segment accelerations for a trajectory.

    Requires at least 2 points and strictly increasing timestamps; a zero
    time step is a hard error (upstream dedup/ingestion must have removed it).
    """
    pts = traj.points
    if len(pts) < 2:
        raise ValidationError("trajectory_too_short", f"{traj.id}: {len(pts)} points")
    speeds = []
    dts = []
    for i in range(len(pts) - 1):
        dt = pts[i + 1].t - pts[i].t
        if dt <= 0:
            raise ValidationError(
                "zero_time_step", f"{traj.id}: dt={dt} at index {i}"
            )
        dts.append(dt)
        speeds.append(haversine_m(pts[i], pts[i + 1]) / dt)
    speeds.append(speeds[-1])
    accels = [(speeds[i + 1] - speeds[i]) / dts[i] for i in range(len(pts) - 1)]
    return KinematicTrack(traj, tuple(speeds), tuple(accels))


@dataclass(frozen=True)
class Histogram:
    """Counts over 11 equal bins spanning [0, ceiling]; overflow joins the last bin."""

    ceiling: float
    counts: tuple[int, ...]

    @classmethod
    def of(cls, values, ceiling: float, bins: int = 11) -> "Histogram":
        counts = [0] * bins
        if ceiling > 0:
            width = ceiling / bins
            for v in values:
                counts[min(int(v // width), bins - 1)] += 1
        else:
            counts[0] = sum(1 for _ in values)
        return cls(ceiling, tuple(counts))

    def to_dict(self) -> dict:
        return {"ceiling": self.ceiling, "counts": list(self.counts)}


@dataclass(frozen=True)
class KinematicStats:
    """Reference maxima and value histograms over a collection of tracks.

    ``max_speed`` / ``max_abs_accel`` are the ceilings the raster bucket
    schemes are built from.  With ``percentile`` below 100 the ceilings are
    that percentile of the observed values instead of the true maximum,
    guarding against GPS-spike outliers; the histograms then clip into the
    top bin so the ceilings remain their suprema.
    """

    max_speed: float
    max_abs_accel: float
    speed_hist: Histogram
    accel_hist: Histogram
    per_class_speed: dict = field(default_factory=dict)
    per_class_accel: dict = field(default_factory=dict)
    percentile: float = 100.0

    def to_dict(self) -> dict:
        return {
            "max_speed": self.max_speed,
            "max_abs_accel": self.max_abs_accel,
            "percentile": self.percentile,
            "speed_hist": self.speed_hist.to_dict(),
            "accel_hist": self.accel_hist.to_dict(),
            "per_class_speed": {k: h.to_dict() for k, h in sorted(self.per_class_speed.items())},
            "per_class_accel": {k: h.to_dict() for k, h in sorted(self.per_class_accel.items())},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KinematicStats":
        mk = lambda h: Histogram(h["ceiling"], tuple(h["counts"]))
        return cls(
            max_speed=d["max_speed"],
            max_abs_accel=d["max_abs_accel"],
            speed_hist=mk(d["speed_hist"]),
            accel_hist=mk(d["accel_hist"]),
            per_class_speed={k: mk(h) for k, h in d["per_class_speed"].items()},
            per_class_accel={k: mk(h) for k, h in d["per_class_accel"].items()},
            percentile=d.get("percentile", 100.0),
        )


def _ceiling(values: list[float], percentile: float) -> float:
    if not values:
        return 0.0
    if percentile >= 100.0:
        return max(values)
    values = sorted(values)
    # nearest-rank percentile; rank 1-based
    rank = max(1, math.ceil(percentile / 100.0 * len(values)))
    return values[rank - 1]


def compute_stats(tracks, percentile: float = 100.0) -> KinematicStats:
    """Reference maxima and histograms over one or more KinematicTracks."""
    tracks = list(tracks)
    if not tracks:
        raise ValidationError("no_tracks_for_stats")
    by_class_speed: dict[str, list[float]] = {}
    by_class_accel: dict[str, list[float]] = {}
    all_speeds: list[float] = []
    all_accels: list[float] = []
    for tr in tracks:
        label = tr.trajectory.label
        sp = list(tr.speeds)
        ac = [abs(a) for a in tr.accels]
        by_class_speed.setdefault(label, []).extend(sp)
        by_class_accel.setdefault(label, []).extend(ac)
        all_speeds.extend(sp)
        all_accels.extend(ac)
    max_speed = _ceiling(all_speeds, percentile)
    max_accel = _ceiling(all_accels, percentile)
    return KinematicStats(
        max_speed=max_speed,
        max_abs_accel=max_accel,
        speed_hist=Histogram.of(all_speeds, max_speed),
        accel_hist=Histogram.of(all_accels, max_accel),
        per_class_speed={k: Histogram.of(v, max_speed) for k, v in by_class_speed.items()},
        per_class_accel={k: Histogram.of(v, max_accel) for k, v in by_class_accel.items()},
        percentile=percentile,
    )
