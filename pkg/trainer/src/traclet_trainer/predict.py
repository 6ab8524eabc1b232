"""Scoring a trained model over a manifest's test split."""
from __future__ import annotations

import numpy as np

from .data import load_image, preprocess
from .manifest_io import TrainerError, read_manifest, write_prediction_file


def predict_to_file(model, manifest_path, classes, out_path, input_size: int,
                    batch_size: int = 16):
    """Predict every test-split image once, in manifest order, to a CSV file.

    Returns the written rows as (path, true label, predicted label) tuples.
    """
    manifest = read_manifest(manifest_path)
    entries = manifest.split("test")
    if not entries:
        raise TrainerError("empty_split", f"{manifest_path}: no test entries")
    x = np.stack([load_image(manifest.image_path(e), input_size) for e in entries])
    probs = model.predict(preprocess(x), batch_size=batch_size, verbose=0)
    if probs.shape != (len(entries), len(classes)):
        raise TrainerError(
            "bad_probability_distribution",
            f"expected shape {(len(entries), len(classes))}, got {probs.shape}",
        )
    sums = probs.sum(axis=1)
    if np.max(np.abs(sums - 1.0)) > 1e-5:
        raise TrainerError(
            "bad_probability_distribution", f"row sums deviate from 1 by {np.max(np.abs(sums - 1.0))}"
        )
    picks = probs.argmax(axis=1)
    rows = [(e.path, e.label, classes[k]) for e, k in zip(entries, picks)]
    write_prediction_file(rows, out_path)
    return rows
