"""Dataset build orchestration, evaluation, and inspection.

build_dataset runs ingest -> preprocess -> kinematics -> raster, computes a
seeded stratified 70/30 trajectory split, renders one PNG per trajectory
under out/<class>/, and writes three artifacts next to the images: the
manifest (authoritative), the preprocess/ingest audit report, and the final
trajectories in canonical CSV form so any build can be inspected or rebuilt
without the original inputs.

Bucket ceilings are computed from the training split only and recorded in
the manifest, so the test split never leaks into the color scale.
"""
from __future__ import annotations

import json
import math
import multiprocessing
import random
from pathlib import Path

from . import __version__
from .ingest import (
    IngestReport,
    SchemaSpec,
    parse_csv,
    parse_geolife,
    parse_hurdat,
    parse_starkey,
    read_canonical_csv,
    write_canonical_csv,
)
from .kinematics import KinematicStats, compute_stats, derive_kinematics
from .manifest import (
    DatasetManifest,
    ManifestEntry,
    canonical_json,
    hash_config,
    read_manifest,
    write_manifest,
)
from .metrics import MetricsReport, compute_metrics, read_predictions
from .model import (
    BoundingBox,
    InternalError,
    RasterConfig,
    ValidationError,
)
from .preprocess import PreprocessConfig, run_pipeline
from .raster import BinScheme, bucket, encode_png, rasterize, track_pixels

DATASET_KINDS = ("geolife", "hurdat", "starkey", "csv", "canonical-csv")

MANIFEST_NAME = "manifest.txt"
AUDIT_NAME = "audit.json"
TRAJECTORIES_NAME = "trajectories.csv"

_CONVENTIONS = {
    "orientation": "minimum latitude maps to the top image row",
    "rounding": "pixel = floor(fraction * n), clamped to [1, n]",
    "draw_order": "acceleration lines first, then position pixels",
    "last_point_speed": "copied from its predecessor",
    "ceilings": "computed over the training split only",
    "split": "stratified per class, seeded, 70/30 by trajectory",
    "hurricane_labels": "lifetime-maximum wind on a 7-class strength scale",
}


def _hex_to_rgb(text: str) -> tuple[int, int, int]:
    text = text.strip()
    if not (len(text) == 7 and text.startswith("#")):
        raise ValidationError("bad_color", text)
    try:
        return tuple(int(text[i : i + 2], 16) for i in (1, 3, 5))
    except ValueError:
        raise ValidationError("bad_color", text) from None


def _rgb_to_hex(rgb) -> str:
    return "#%02X%02X%02X" % tuple(rgb)


def load_raster_spec(path=None) -> dict:
    """Load the raster config file (versioned JSON); None gives defaults.

    Keys: version, n, rounding, orientation, palette (11 hex colors),
    background (hex), max_speed and max_accel (number or "auto").
    """
    defaults = {
        "version": 1,
        "n": 224,
        "rounding": "floor",
        "orientation": "lat_min_top",
        "palette": None,
        "background": "#FFFFFF",
        "max_speed": "auto",
        "max_accel": "auto",
    }
    if path is None:
        return defaults
    with open(path, encoding="utf-8") as f:
        try:
            loaded = json.load(f)
        except json.JSONDecodeError as e:
            raise ValidationError("bad_raster_config", f"{path}: {e}") from None
    unknown = set(loaded) - set(defaults)
    if unknown:
        raise ValidationError("bad_raster_config", f"unknown keys: {sorted(unknown)}")
    spec = {**defaults, **loaded}
    if spec["version"] != 1:
        raise ValidationError("bad_raster_config", f"version {spec['version']!r}")
    for key in ("max_speed", "max_accel"):
        v = spec[key]
        if v != "auto" and not (isinstance(v, (int, float)) and v >= 0):
            raise ValidationError("bad_raster_config", f"{key}: {v!r}")
    return spec


def resolve_raster_config(spec: dict, stats: KinematicStats | None) -> RasterConfig:
    """Turn a raster spec into a concrete RasterConfig, filling "auto"
    ceilings from the training-split stats."""
    kwargs = {}
    if spec.get("palette"):
        kwargs["palette"] = tuple(_hex_to_rgb(c) for c in spec["palette"])
    if spec.get("background"):
        kwargs["background"] = _hex_to_rgb(spec["background"])
    for key, attr in (("max_speed", "max_speed"), ("max_accel", "max_abs_accel")):
        v = spec[key]
        if v == "auto":
            if stats is None:
                raise ValidationError("bad_raster_config", f"{key} is auto, no stats")
            v = getattr(stats, attr)
        kwargs[key] = float(v)
    return RasterConfig(
        n=int(spec["n"]),
        rounding=spec["rounding"],
        orientation=spec["orientation"],
        **kwargs,
    )


def raster_spec_resolved(spec: dict, cfg: RasterConfig) -> dict:
    """The raster settings with ceilings and palette made concrete, for the manifest."""
    return {
        "version": 1,
        "n": cfg.n,
        "rounding": cfg.rounding,
        "orientation": cfg.orientation,
        "palette": [_rgb_to_hex(c) for c in cfg.palette],
        "background": _rgb_to_hex(cfg.background),
        "max_speed": cfg.max_speed,
        "max_accel": cfg.max_accel,
    }


def sanitize_name(name: str) -> str:
    """Filesystem-safe directory/file stem."""
    out = "".join(c if c.isalnum() or c in "-_." else "_" for c in name)
    return out.strip(".") or "x"


def ingest_dataset(
    kind: str,
    input_path,
    report: IngestReport | None = None,
    schema: SchemaSpec | None = None,
    year_min: int | None = None,
    year_max: int | None = None,
):
    if kind == "geolife":
        return parse_geolife(input_path, report)
    if kind == "hurdat":
        return parse_hurdat(input_path, year_min=year_min, year_max=year_max, report=report)
    if kind == "starkey":
        return parse_starkey(input_path, report)
    if kind == "csv":
        if schema is None:
            raise ValidationError("missing_schema", "csv ingestion needs a schema")
        return parse_csv(input_path, schema, report)
    if kind == "canonical-csv":
        return read_canonical_csv(input_path, report)
    raise ValidationError("unknown_dataset_kind", kind)


# Work set for render workers, installed before fork so child processes
# inherit it copy-on-write instead of pickling every track.
_WORK: tuple | None = None


def _render_one(i: int) -> int:
    tracks, cfg, paths = _WORK
    encode_png(rasterize(tracks[i], cfg), paths[i])
    return i


def render_images(tracks, cfg: RasterConfig, paths, workers: int = 1) -> None:
    """Rasterize every track to its PNG path, optionally in parallel.

    Output bytes are identical regardless of worker count; parallelism uses
    fork-based workers (POSIX) and falls back to sequential elsewhere.
    """
    global _WORK
    if len(tracks) != len(paths):
        raise InternalError("tracks/paths length mismatch")
    _WORK = (list(tracks), cfg, list(paths))
    try:
        if workers <= 1 or len(tracks) < 2:
            for i in range(len(tracks)):
                _render_one(i)
            return
        try:
            ctx = multiprocessing.get_context("fork")
        except ValueError:
            for i in range(len(tracks)):
                _render_one(i)
            return
        chunk = max(1, len(tracks) // (workers * 4))
        with ctx.Pool(workers) as pool:
            for _ in pool.imap_unordered(_render_one, range(len(tracks)), chunk):
                pass
    finally:
        _WORK = None


def assign_paths(trajs) -> list[str]:
    """Deterministic relative PNG path per trajectory, collision-free."""
    used: set[str] = set()
    paths = []
    for t in trajs:
        base = f"{sanitize_name(t.label)}/{sanitize_name(t.id)}"
        rel = f"{base}.png"
        k = 2
        while rel in used:
            rel = f"{base}-{k}.png"
            k += 1
        used.add(rel)
        paths.append(rel)
    return paths


def split_dataset(trajs, seed: int) -> list[str]:
    """Per-class seeded 70/30 assignment; returns a split per trajectory."""
    by_label: dict[str, list[int]] = {}
    for i, t in enumerate(trajs):
        by_label.setdefault(t.label, []).append(i)
    split = ["test"] * len(trajs)
    rng = random.Random(f"{seed}:split")
    for label in sorted(by_label):
        idx = list(by_label[label])
        rng.shuffle(idx)
        n_train = math.floor(0.7 * len(idx) + 0.5)
        for i in idx[:n_train]:
            split[i] = "train"
    return split


def build_dataset(
    kind: str,
    input_path,
    out_dir,
    seed: int = 0,
    pre_cfg: PreprocessConfig | None = None,
    raster_spec: dict | None = None,
    workers: int = 1,
    schema: SchemaSpec | None = None,
    year_min: int | None = None,
    year_max: int | None = None,
) -> DatasetManifest:
    """Run the full build and write images + manifest + audit under out_dir."""
    out_dir = Path(out_dir)
    ingest_report = IngestReport()
    trajs = ingest_dataset(
        kind, input_path, ingest_report, schema=schema, year_min=year_min, year_max=year_max
    )
    if not trajs:
        raise ValidationError("no_trajectories", f"nothing ingested from {input_path}")

    if pre_cfg is None:
        preset = "csv" if kind in ("csv", "canonical-csv") else kind
        pre_cfg = PreprocessConfig.for_dataset(preset, rng_seed=seed)
    classes_in = {t.label for t in trajs}
    trajs, audit = run_pipeline(trajs, pre_cfg)
    classes_out = {t.label for t in trajs}
    eliminated = sorted(classes_in - classes_out)
    if eliminated:
        raise ValidationError(
            "class_eliminated",
            f"preprocessing removed every trajectory of: {', '.join(eliminated)}",
        )
    if not trajs:
        raise ValidationError("no_trajectories", "preprocessing removed everything")

    split = split_dataset(trajs, seed)
    tracks = [derive_kinematics(t) for t in trajs]
    train_tracks = [tr for tr, s in zip(tracks, split) if s == "train"]
    stats = compute_stats(train_tracks)

    if raster_spec is None:
        raster_spec = load_raster_spec(None)
    cfg = resolve_raster_config(raster_spec, stats)
    resolved = raster_spec_resolved(raster_spec, cfg)

    rel_paths = assign_paths(trajs)
    out_dir.mkdir(parents=True, exist_ok=True)
    for d in sorted({Path(p).parent for p in rel_paths}):
        (out_dir / d).mkdir(parents=True, exist_ok=True)
    render_images(tracks, cfg, [out_dir / p for p in rel_paths], workers)

    config_hash = hash_config(
        {"kind": kind, "seed": seed, "preprocess": pre_cfg.to_dict(), "raster": resolved}
    )
    entries = tuple(
        ManifestEntry(path=p, traj_id=t.id, label=t.label, split=s)
        for p, t, s in zip(rel_paths, trajs, split)
    )
    meta = {
        "tool_version": __version__,
        "kind": kind,
        "counts": {
            "trajectories": len(trajs),
            "points": sum(len(t) for t in trajs),
        },
        "stats": stats.to_dict(),
        "raster": resolved,
        "preprocess": pre_cfg.to_dict(),
        "conventions": _CONVENTIONS,
        "audit_file": AUDIT_NAME,
        "trajectories_file": TRAJECTORIES_NAME,
    }
    man = DatasetManifest(seed=seed, config_hash=config_hash, entries=entries, meta=meta)

    write_canonical_csv(trajs, out_dir / TRAJECTORIES_NAME)
    with open(out_dir / AUDIT_NAME, "w", encoding="utf-8", newline="\n") as f:
        f.write(
            canonical_json(
                {
                    "ingest": ingest_report.to_dict(),
                    "preprocess": audit.to_dict(),
                    "conventions": _CONVENTIONS,
                }
            )
        )
        f.write("\n")
    write_manifest(man, out_dir / MANIFEST_NAME)
    return man


def evaluate(pred_path, manifest_path) -> MetricsReport:
    """Score a prediction file against a manifest's test split."""
    man = read_manifest(manifest_path)
    rows = read_predictions(pred_path)
    test_by_path = {e.path: e for e in man.split_entries("test")}
    labels = set(man.labels())
    seen = set()
    for row in rows:
        path, true, pred = row
        entry = test_by_path.get(path)
        if entry is None:
            raise ValidationError("unknown_path", f"{row!r} is not in the test split")
        if path in seen:
            raise ValidationError("duplicate_prediction", repr(row))
        seen.add(path)
        if true not in labels or pred not in labels:
            raise ValidationError("unknown_label", repr(row))
        if true != entry.label:
            raise ValidationError(
                "true_label_mismatch", f"{row!r}: manifest says {entry.label!r}"
            )
    return compute_metrics([r[1] for r in rows], [r[2] for r in rows])


def inspect(traj_id: str, manifest_path) -> str:
    """Human-readable dump of one trajectory in a built dataset."""
    manifest_path = Path(manifest_path)
    man = read_manifest(manifest_path)
    entry = next((e for e in man.entries if e.traj_id == traj_id), None)
    if entry is None:
        raise ValidationError("unknown_trajectory", traj_id)
    base = manifest_path.parent
    trajs = read_canonical_csv(base / man.meta.get("trajectories_file", TRAJECTORIES_NAME))
    traj = next((t for t in trajs if t.id == traj_id), None)
    if traj is None:
        raise InternalError(f"{traj_id} in manifest but not in trajectory dump")

    raster = man.meta["raster"]
    cfg = resolve_raster_config(raster, None)
    track = derive_kinematics(traj)
    bbox = BoundingBox.of_points(traj.points)
    pix = track_pixels(track, cfg.n)
    speed_scheme = BinScheme.from_ceiling(cfg.max_speed)
    accel_scheme = BinScheme.from_ceiling(cfg.max_accel)
    speed_hist = [0] * 11
    for s in track.speeds:
        speed_hist[bucket(s, speed_scheme) - 1] += 1
    accel_hist = [0] * 11
    for a in track.accels:
        accel_hist[bucket(abs(a), accel_scheme) - 1] += 1

    def hist_text(counts):
        return " ".join(f"{i + 1}:{c}" for i, c in enumerate(counts) if c)

    lines = [
        f"id: {traj.id}",
        f"label: {traj.label}",
        f"split: {entry.split}",
        f"image: {entry.path}",
        f"points: {len(traj)}",
        f"duration_s: {traj.duration_s()}",
        f"bbox: lon [{bbox.lon_min}, {bbox.lon_max}] lat [{bbox.lat_min}, {bbox.lat_max}]",
        f"n={cfg.n}",
        f"max_speed_reference: {cfg.max_speed}",
        f"max_accel_reference: {cfg.max_accel}",
        f"speed_buckets: {hist_text(speed_hist)}",
        f"accel_buckets: {hist_text(accel_hist)}",
        "position_pixels: " + " ".join(f"({x}, {y})" for x, y in pix),
    ]
    return "\n".join(lines)


def dataset_stats(
    kind: str,
    input_path,
    pre_cfg: PreprocessConfig | None = None,
    schema: SchemaSpec | None = None,
    year_min: int | None = None,
    year_max: int | None = None,
    seed: int = 0,
) -> dict:
    """Ingest + preprocess + kinematics only; returns a JSON-ready summary."""
    report = IngestReport()
    trajs = ingest_dataset(
        kind, input_path, report, schema=schema, year_min=year_min, year_max=year_max
    )
    if not trajs:
        raise ValidationError("no_trajectories", f"nothing ingested from {input_path}")
    if pre_cfg is None:
        preset = "csv" if kind in ("csv", "canonical-csv") else kind
        pre_cfg = PreprocessConfig.for_dataset(preset, rng_seed=seed)
    trajs, audit = run_pipeline(trajs, pre_cfg)
    classes: dict[str, int] = {}
    for t in trajs:
        classes[t.label] = classes.get(t.label, 0) + 1
    out = {
        "trajectories": len(trajs),
        "points": sum(len(t) for t in trajs),
        "classes": dict(sorted(classes.items())),
        "ingest": report.to_dict(),
        "preprocess": audit.to_dict(),
    }
    if trajs:
        out["stats"] = compute_stats(derive_kinematics(t) for t in trajs).to_dict()
    return out
