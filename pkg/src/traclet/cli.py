"""Command-line entry point.

Verbs:
    build     ingest a dataset, preprocess, rasterize, split, write manifest
    evaluate  score a prediction file against a manifest's test split
    inspect   dump one trajectory of a built dataset
    stats     ingest + preprocess only, print a JSON summary

Exit codes: 0 success, 2 input or validation error, 3 internal failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import traceback

from .ingest import SchemaSpec
from .manifest import canonical_json
from .model import InternalError, ValidationError
from .pipeline import (
    DATASET_KINDS,
    build_dataset,
    dataset_stats,
    evaluate,
    inspect,
    load_raster_spec,
)
from .preprocess import PreprocessConfig


def _load_json(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def _preprocess_config(args) -> PreprocessConfig | None:
    if not args.preprocess_config:
        return None
    preset = "csv" if args.dataset in ("csv", "canonical-csv") else args.dataset
    base = PreprocessConfig.for_dataset(preset, rng_seed=args.seed).to_dict()
    overrides = _load_json(args.preprocess_config)
    unknown = set(overrides) - set(base)
    if unknown:
        raise ValidationError("bad_preprocess_config", f"unknown keys: {sorted(unknown)}")
    base.update(overrides)
    base["excluded_classes"] = frozenset(base["excluded_classes"])
    return PreprocessConfig(**base)


def _schema(args) -> SchemaSpec | None:
    if not getattr(args, "schema", None):
        return None
    return SchemaSpec.from_dict(_load_json(args.schema))


def _add_ingest_args(p) -> None:
    p.add_argument("--dataset", required=True, choices=DATASET_KINDS)
    p.add_argument("--input", required=True, help="dataset root directory or file")
    p.add_argument("--schema", help="schema JSON (csv datasets only)")
    p.add_argument("--preprocess-config", help="JSON overriding the dataset preset")
    p.add_argument("--year-min", type=int, help="earliest storm year (hurdat only)")
    p.add_argument("--year-max", type=int, help="latest storm year (hurdat only)")
    p.add_argument("--seed", type=int, default=0)


def _cmd_build(args) -> int:
    man = build_dataset(
        args.dataset,
        args.input,
        args.out,
        seed=args.seed,
        pre_cfg=_preprocess_config(args),
        raster_spec=load_raster_spec(args.raster_config),
        workers=args.workers,
        schema=_schema(args),
        year_min=args.year_min,
        year_max=args.year_max,
    )
    counts = man.meta["counts"]
    print(
        f"built {counts['trajectories']} trajectories "
        f"({counts['points']} points, {len(man.labels())} classes) -> {args.out}"
    )
    return 0


def _cmd_evaluate(args) -> int:
    report = evaluate(args.predictions, args.manifest)
    print(report.render())
    if args.json:
        with open(args.json, "w", encoding="utf-8", newline="\n") as f:
            f.write(canonical_json(report.to_dict()) + "\n")
    return 0


def _cmd_inspect(args) -> int:
    print(inspect(args.id, args.manifest))
    return 0


def _cmd_stats(args) -> int:
    summary = dataset_stats(
        args.dataset,
        args.input,
        pre_cfg=_preprocess_config(args),
        schema=_schema(args),
        year_min=args.year_min,
        year_max=args.year_max,
        seed=args.seed,
    )
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="traclet", description="trajectory-to-image dataset pipeline"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build an image dataset from raw trajectories")
    _add_ingest_args(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--raster-config", help="raster config JSON")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_build)

    p = sub.add_parser("evaluate", help="score predictions against a manifest")
    p.add_argument("--predictions", required=True, help="CSV of path,true,pred")
    p.add_argument("--manifest", required=True)
    p.add_argument("--json", help="also write the report as JSON here")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("inspect", help="dump one trajectory of a built dataset")
    p.add_argument("--id", required=True, help="trajectory id")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=_cmd_inspect)

    p = sub.add_parser("stats", help="summarize a dataset without rasterizing")
    _add_ingest_args(p)
    p.set_defaults(func=_cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except InternalError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return 3
    except Exception:
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
