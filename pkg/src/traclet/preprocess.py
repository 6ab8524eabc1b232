"""Trajectory cleaning passes and their composition.

Six passes run in a fixed order: consecutive-duplicate removal, gap
splitting, minimum-length filtering, class exclusion, unreal-mean-speed
filtering, and stratified subsampling.  Each pass only drops or splits
trajectories; coordinates and timestamps are never modified.  All passes
are idempotent except subsampling, which is deterministic per seed.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .kinematics import haversine_m
from .model import Trajectory, ValidationError

PASS_ORDER = (
    "dedup",
    "split_on_gaps",
    "filter_min_points",
    "filter_classes",
    "filter_unreal_velocity",
    "subsample_stratified",
)

# Mean-speed ceilings (m/s) for the dense-GPS transportation modes.  Only
# walk's value is a published constraint; the rest are overridable defaults
# and are recorded verbatim in the build audit.
DEFAULT_VELOCITY_CAPS = {
    "walk": 10.0,
    "bike": 15.0,
    "bus": 30.0,
    "car": 50.0,
    "train": 70.0,
}

# Modes with too few examples in the dense-GPS corpus; both spellings of
# running occur in the wild.
DEFAULT_EXCLUDED_CLASSES = frozenset(
    {"airplane", "boat", "run", "running", "motorcycle"}
)


@dataclass(frozen=True)
class PreprocessConfig:
    """Knobs for the cleaning pipeline.

    ``gap_split_s`` of None disables gap splitting entirely (sparse datasets
    are one track per object by construction).
    """

    gap_split_s: float | None = 300.0
    min_points: int = 100
    excluded_classes: frozenset[str] = frozenset()
    velocity_caps: dict[str, float] = field(default_factory=dict)
    subsample_fraction: float = 0.2
    rng_seed: int = 0

    def __post_init__(self):
        if self.gap_split_s is not None and not self.gap_split_s > 0:
            raise ValidationError("bad_gap_split", repr(self.gap_split_s))
        if self.min_points < 2:
            raise ValidationError("bad_min_points", repr(self.min_points))
        if not 0 < self.subsample_fraction <= 1:
            raise ValidationError(
                "bad_subsample_fraction", repr(self.subsample_fraction)
            )
        for label, cap in self.velocity_caps.items():
            if not math.isfinite(cap) or cap <= 0:
                raise ValidationError("bad_velocity_cap", f"{label}: {cap!r}")
        object.__setattr__(self, "excluded_classes", frozenset(self.excluded_classes))

    @classmethod
    def for_dataset(cls, kind: str, rng_seed: int = 0) -> "PreprocessConfig":
        """Preset per dataset family.

        The dense-GPS preset applies the full cleaning recipe; sparse
        datasets (hurricane tracks, animal telemetry) keep everything and
        only need duplicate removal.
        """
        if kind == "geolife":
            return cls(
                gap_split_s=300.0,
                min_points=100,
                excluded_classes=DEFAULT_EXCLUDED_CLASSES,
                velocity_caps=dict(DEFAULT_VELOCITY_CAPS),
                subsample_fraction=0.2,
                rng_seed=rng_seed,
            )
        if kind in ("hurdat", "starkey", "csv"):
            return cls(
                gap_split_s=None,
                min_points=2,
                excluded_classes=frozenset(),
                velocity_caps={},
                subsample_fraction=1.0,
                rng_seed=rng_seed,
            )
        raise ValidationError("unknown_dataset_kind", kind)

    def to_dict(self) -> dict:
        return {
            "gap_split_s": self.gap_split_s,
            "min_points": self.min_points,
            "excluded_classes": sorted(self.excluded_classes),
            "velocity_caps": dict(sorted(self.velocity_caps.items())),
            "subsample_fraction": self.subsample_fraction,
            "rng_seed": self.rng_seed,
        }


def dedup(traj: Trajectory) -> Trajectory:
    """Drop consecutive points identical in (lon, lat, t); order preserved."""
    pts = traj.points
    kept = [pts[0]]
    for p in pts[1:]:
        q = kept[-1]
        if (p.lon, p.lat, p.t) != (q.lon, q.lat, q.t):
            kept.append(p)
    if len(kept) == len(pts):
        return traj
    return traj.with_points(kept)


def split_on_gaps(traj: Trajectory, gap_split_s: float) -> list[Trajectory]:
    """Cut wherever consecutive points are more than gap_split_s apart.

    The comparison is strict: a gap of exactly gap_split_s does not split.
    Segments partition the input points; ids get a #k suffix only when a
    split actually happened, so the pass is idempotent.
    """
    pts = traj.points
    segments = []
    start = 0
    for i in range(len(pts) - 1):
        if pts[i + 1].t - pts[i].t > gap_split_s:
            segments.append(pts[start : i + 1])
            start = i + 1
    segments.append(pts[start:])
    if len(segments) == 1:
        return [traj]
    return [traj.with_points(seg, suffix=f"#{k}") for k, seg in enumerate(segments)]


def filter_min_points(trajs: list[Trajectory], min_points: int) -> list[Trajectory]:
    """Keep trajectories with at least min_points points (boundary inclusive)."""
    return [t for t in trajs if len(t) >= min_points]


def filter_classes(trajs: list[Trajectory], excluded) -> list[Trajectory]:
    """Drop trajectories whose label is in the excluded set."""
    excluded = frozenset(excluded)
    return [t for t in trajs if t.label not in excluded]


def mean_speed_mps(traj: Trajectory) -> float:
    """Total great-circle path length over total duration, m/s."""
    pts = traj.points
    duration = pts[-1].t - pts[0].t
    if duration <= 0:
        raise ValidationError("zero_duration", traj.id)
    dist = 0.0
    for i in range(len(pts) - 1):
        dist += haversine_m(pts[i], pts[i + 1])
    return dist / duration


def filter_unreal_velocity(
    trajs: list[Trajectory], velocity_caps: dict[str, float]
) -> tuple[list[Trajectory], int]:
    """Drop trajectories whose mean speed exceeds their label's cap.

    Labels without a cap pass through untouched.  Returns (kept, dropped
    count); capped trajectories with zero total duration count as dropped.
    """
    kept = []
    dropped = 0
    for t in trajs:
        cap = velocity_caps.get(t.label)
        if cap is None:
            kept.append(t)
            continue
        try:
            v = mean_speed_mps(t)
        except ValidationError:
            dropped += 1
            continue
        if v > cap:
            dropped += 1
        else:
            kept.append(t)
    return kept, dropped


def subsample_stratified(
    trajs: list[Trajectory], fraction: float, rng_seed: int
) -> list[Trajectory]:
    """Keep round(fraction * count) trajectories per label, seeded.

    Rounding is half-up.  Selection is by a single RNG walked over labels in
    sorted order, so the result is independent of input label interleaving;
    kept trajectories stay in input order.
    """
    if fraction >= 1.0:
        return list(trajs)
    by_label: dict[str, list[int]] = {}
    for i, t in enumerate(trajs):
        by_label.setdefault(t.label, []).append(i)
    rng = random.Random(f"{rng_seed}:subsample")
    keep: set[int] = set()
    for label in sorted(by_label):
        idx = by_label[label]
        k = math.floor(fraction * len(idx) + 0.5)
        for j in rng.sample(range(len(idx)), k):
            keep.add(idx[j])
    return [t for i, t in enumerate(trajs) if i in keep]


@dataclass(frozen=True)
class PassRecord:
    name: str
    trajs_in: int
    trajs_out: int
    detail: dict

    def to_dict(self) -> dict:
        return {
            "pass": self.name,
            "trajs_in": self.trajs_in,
            "trajs_out": self.trajs_out,
            **self.detail,
        }


@dataclass
class AuditReport:
    """Ordered record of what every pass did; serialized next to the manifest."""

    passes: list[PassRecord] = field(default_factory=list)

    def add(self, name: str, trajs_in: int, trajs_out: int, **detail) -> None:
        self.passes.append(PassRecord(name, trajs_in, trajs_out, dict(detail)))

    def pass_names(self) -> list[str]:
        return [p.name for p in self.passes]

    def to_dict(self) -> dict:
        return {"passes": [p.to_dict() for p in self.passes]}


def run_pipeline(
    trajs: list[Trajectory], cfg: PreprocessConfig
) -> tuple[list[Trajectory], AuditReport]:
    """Apply all passes in their fixed order and log each one."""
    audit = AuditReport()
    n_in = len(trajs)

    points_before = sum(len(t) for t in trajs)
    trajs = [dedup(t) for t in trajs]
    audit.add(
        "dedup", n_in, len(trajs), points_dropped=points_before - sum(len(t) for t in trajs)
    )

    n = len(trajs)
    if cfg.gap_split_s is not None:
        out: list[Trajectory] = []
        for t in trajs:
            out.extend(split_on_gaps(t, cfg.gap_split_s))
        trajs = out
        audit.add("split_on_gaps", n, len(trajs), gap_split_s=cfg.gap_split_s)
    else:
        audit.add("split_on_gaps", n, n, gap_split_s=None)

    n = len(trajs)
    trajs = filter_min_points(trajs, cfg.min_points)
    audit.add("filter_min_points", n, len(trajs), min_points=cfg.min_points)

    n = len(trajs)
    trajs = filter_classes(trajs, cfg.excluded_classes)
    audit.add(
        "filter_classes", n, len(trajs), excluded=sorted(cfg.excluded_classes)
    )

    n = len(trajs)
    trajs, dropped = filter_unreal_velocity(trajs, cfg.velocity_caps)
    audit.add("filter_unreal_velocity", n, len(trajs), dropped=dropped)

    n = len(trajs)
    trajs = subsample_stratified(trajs, cfg.subsample_fraction, cfg.rng_seed)
    audit.add(
        "subsample_stratified",
        n,
        len(trajs),
        fraction=cfg.subsample_fraction,
        rng_seed=cfg.rng_seed,
    )
    return trajs, audit
