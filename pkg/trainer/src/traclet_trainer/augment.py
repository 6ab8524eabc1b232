"""Train-time image augmentation.

Each transform perturbs geometry mildly (the images encode trajectory
shape, so distortions stay small) or adds low-amplitude pixel noise.
Transforms fill exposed borders with white, matching the image background.
"""
from __future__ import annotations

import random

import numpy as np
from PIL import Image

from .config import TrainConfig

NOISE_FRACTION = 0.02  # additive noise amplitude as a share of dynamic range
_FILL = (255, 255, 255)


def augment_image(arr: np.ndarray, rng: random.Random, cfg: TrainConfig) -> np.ndarray:
    """Apply one random draw of the configured transforms to a HxWx3 uint8 array."""
    img = Image.fromarray(arr, mode="RGB")
    n = img.size[0]
    if cfg.rotation_degrees > 0:
        degrees = rng.uniform(-cfg.rotation_degrees, cfg.rotation_degrees)
        img = img.rotate(degrees, resample=Image.BILINEAR, fillcolor=_FILL)
    if cfg.shear:
        s = rng.uniform(-0.15, 0.15)
        img = img.transform(
            img.size, Image.AFFINE, (1, s, -s * n / 2, 0, 1, 0),
            resample=Image.BILINEAR, fillcolor=_FILL,
        )
    if cfg.zoom:
        z = rng.uniform(0.9, 1.1)
        off = n / 2 * (1 - 1 / z)
        img = img.transform(
            img.size, Image.AFFINE, (1 / z, 0, off, 0, 1 / z, off),
            resample=Image.BILINEAR, fillcolor=_FILL,
        )
    if cfg.crop:
        side = max(1, round(0.9 * n))
        x0 = rng.randint(0, n - side)
        y0 = rng.randint(0, n - side)
        img = img.crop((x0, y0, x0 + side, y0 + side)).resize((n, n), Image.BILINEAR)
    if cfg.horizontal_flip and rng.random() < 0.5:
        img = img.transpose(Image.FLIP_LEFT_RIGHT)
    out = np.asarray(img, dtype=np.float32)
    if cfg.noise:
        amp = NOISE_FRACTION * 255.0
        noise_rng = np.random.default_rng(rng.getrandbits(63))
        out = out + noise_rng.uniform(-amp, amp, size=out.shape).astype(np.float32)
        out = np.clip(out, 0.0, 255.0)
    return out


def augment_batch(x: np.ndarray, rng: random.Random, cfg: TrainConfig) -> np.ndarray:
    """Augment a batch (B, H, W, 3) of uint8 images; identity when disabled."""
    if not cfg.augment:
        return x.astype(np.float32)
    return np.stack([augment_image(img, rng, cfg) for img in x])
