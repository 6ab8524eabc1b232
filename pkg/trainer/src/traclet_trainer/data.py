"""Loading dataset images into arrays ready for the network."""
from __future__ import annotations

import numpy as np
from PIL import Image

from .manifest_io import Manifest, TrainerError


def load_image(path, input_size: int) -> np.ndarray:
    """Read one image as uint8 (input_size, input_size, 3), resizing if needed."""
    try:
        with Image.open(path) as img:
            img.load()
            img = img.convert("RGB")
    except OSError as e:
        raise TrainerError("unreadable_image", f"{path}: {e}") from None
    if img.size != (input_size, input_size):
        img = img.resize((input_size, input_size), Image.BILINEAR)
    return np.asarray(img, dtype=np.uint8)


def load_split(manifest: Manifest, split: str, input_size: int):
    """Return (images array (B, s, s, 3) uint8, labels list) for one split."""
    entries = manifest.split(split)
    if not entries:
        raise TrainerError("empty_split", f"manifest has no {split!r} entries")
    x = np.stack([load_image(manifest.image_path(e), input_size) for e in entries])
    return x, [e.label for e in entries]


def one_hot(labels, classes) -> np.ndarray:
    index = {c: i for i, c in enumerate(classes)}
    try:
        rows = [index[lab] for lab in labels]
    except KeyError as e:
        raise TrainerError("unknown_label", str(e)) from None
    y = np.zeros((len(labels), len(classes)), dtype=np.float32)
    y[np.arange(len(labels)), rows] = 1.0
    return y


def preprocess(x: np.ndarray) -> np.ndarray:
    """Network input scaling (BGR mean subtraction) on a float32 copy."""
    from keras.applications.vgg16 import preprocess_input

    return preprocess_input(np.array(x, dtype=np.float32))
