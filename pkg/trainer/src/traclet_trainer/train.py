"""Fine-tuning loop: fit the softmax head on a built dataset."""
from __future__ import annotations

import json
import random
from pathlib import Path

import numpy as np

from .augment import augment_batch
from .config import TrainConfig
from .data import load_split, one_hot, preprocess
from .manifest_io import TrainerError, read_manifest
from .model import build_model

HISTORY_NAME = "history.json"
MODEL_NAME = "model.keras"
CLASSES_NAME = "classes.json"


def _training_dataset(x: np.ndarray, y: np.ndarray, cfg: TrainConfig):
    """A per-epoch reshuffled, freshly augmented view of the train split."""
    import keras

    class AugmentedSequence(keras.utils.PyDataset):
        def __init__(self):
            super().__init__(workers=1, use_multiprocessing=False)
            self.epoch = 0
            self._reshuffle()

        def _reshuffle(self):
            order_rng = random.Random(cfg.seed * 7_919 + self.epoch)
            self.order = list(range(len(x)))
            order_rng.shuffle(self.order)

        def __len__(self):
            return (len(x) + cfg.batch_size - 1) // cfg.batch_size

        def __getitem__(self, i):
            sel = self.order[i * cfg.batch_size : (i + 1) * cfg.batch_size]
            batch = x[sel]
            # Integer-arithmetic seeds keep draws reproducible across processes.
            rng = random.Random(cfg.seed * 1_000_003 + self.epoch * 1_009 + i)
            return preprocess(augment_batch(batch, rng, cfg)), y[sel]

        def on_epoch_end(self):
            self.epoch += 1
            self._reshuffle()

    return AugmentedSequence()


def fine_tune(manifest_path, cfg: TrainConfig, weights: str = "imagenet", out_dir=None):
    """Train on the manifest's train split, validating on its test split.

    Returns (model, classes, history) where history maps metric names to
    per-epoch float lists. When out_dir is given, saves the model, the class
    order, and the history there.
    """
    manifest = read_manifest(manifest_path)
    classes = manifest.labels()
    if len(classes) < 2:
        raise TrainerError("need_two_classes", f"manifest has classes {classes}")
    x_train, lab_train = load_split(manifest, "train", cfg.input_size)
    x_test, lab_test = load_split(manifest, "test", cfg.input_size)
    y_train = one_hot(lab_train, classes)
    y_test = one_hot(lab_test, classes)

    import keras

    keras.utils.set_random_seed(cfg.seed)
    model = build_model(len(classes), cfg, weights=weights)
    validation = (preprocess(x_test), y_test)
    if cfg.augment:
        fit = model.fit(
            _training_dataset(x_train, y_train, cfg),
            epochs=cfg.epochs,
            validation_data=validation,
            verbose=0,
        )
    else:
        fit = model.fit(
            preprocess(x_train),
            y_train,
            batch_size=cfg.batch_size,
            shuffle=True,
            epochs=cfg.epochs,
            validation_data=validation,
            verbose=0,
        )
    history = {k: [float(v) for v in vals] for k, vals in fit.history.items()}

    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        model.save(out_dir / MODEL_NAME)
        with open(out_dir / CLASSES_NAME, "w", encoding="utf-8") as f:
            json.dump(list(classes), f)
        with open(out_dir / HISTORY_NAME, "w", encoding="utf-8") as f:
            json.dump(
                {
                    "config": cfg.to_dict(),
                    "weights": weights,
                    "classes": list(classes),
                    "history": history,
                },
                f,
                indent=2,
            )
    return model, classes, history
