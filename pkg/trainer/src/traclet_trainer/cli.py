"""Command-line entry points: train a classifier, score a saved one."""
from __future__ import annotations

import argparse
import json
import sys
import traceback
from pathlib import Path

from .config import TrainConfig
from .manifest_io import TrainerError
from .predict import predict_to_file
from .train import CLASSES_NAME, MODEL_NAME, fine_tune


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="traclet-train",
        description="Train and score an image classifier on a built trajectory-image dataset.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    train = sub.add_parser("train", help="fit a classifier and score the test split")
    train.add_argument("--manifest", required=True, help="path to a built dataset's manifest.txt")
    train.add_argument("--out", required=True, help="directory for model, history, predictions")
    train.add_argument("--weights", default="imagenet",
                       help='"imagenet", "none", or a path to a weights file')
    train.add_argument("--epochs", type=int, default=TrainConfig.epochs)
    train.add_argument("--learning-rate", type=float, default=TrainConfig.learning_rate)
    train.add_argument("--batch-size", type=int, default=TrainConfig.batch_size)
    train.add_argument("--dropout", type=float, default=TrainConfig.dropout)
    train.add_argument("--input-size", type=int, default=TrainConfig.input_size)
    train.add_argument("--seed", type=int, default=TrainConfig.seed)
    train.add_argument("--no-augment", action="store_true",
                       help="disable train-time augmentation")

    predict = sub.add_parser("predict", help="score a saved model over a manifest's test split")
    predict.add_argument("--model", required=True,
                         help=f"training output directory (or {MODEL_NAME} with {CLASSES_NAME} alongside)")
    predict.add_argument("--manifest", required=True)
    predict.add_argument("--out", required=True, help="prediction CSV path")
    predict.add_argument("--batch-size", type=int, default=TrainConfig.batch_size)
    return parser


def _cmd_train(args) -> int:
    cfg = TrainConfig(
        epochs=args.epochs,
        learning_rate=args.learning_rate,
        batch_size=args.batch_size,
        dropout=args.dropout,
        input_size=args.input_size,
        seed=args.seed,
        augment=not args.no_augment,
    )
    out_dir = Path(args.out)
    model, classes, history = fine_tune(args.manifest, cfg, weights=args.weights, out_dir=out_dir)
    rows = predict_to_file(model, args.manifest, classes, out_dir / "predictions.csv",
                           cfg.input_size, cfg.batch_size)
    last = {k: v[-1] for k, v in history.items()}
    print(f"trained {cfg.epochs} epoch(s) on {len(classes)} classes; "
          f"final {json.dumps(last, sort_keys=True)}")
    print(f"wrote {out_dir / 'predictions.csv'} ({len(rows)} rows)")
    return 0


def _cmd_predict(args) -> int:
    model_path = Path(args.model)
    if model_path.is_dir():
        classes_path = model_path / CLASSES_NAME
        model_path = model_path / MODEL_NAME
    else:
        classes_path = model_path.parent / CLASSES_NAME
    with open(classes_path, encoding="utf-8") as f:
        classes = tuple(json.load(f))
    import keras

    model = keras.models.load_model(model_path)
    input_size = int(model.input_shape[1])
    rows = predict_to_file(model, args.manifest, classes, args.out, input_size,
                           args.batch_size)
    print(f"wrote {args.out} ({len(rows)} rows)")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.verb == "train":
            return _cmd_train(args)
        return _cmd_predict(args)
    except (TrainerError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
