"""Classifier construction: frozen VGG16 feature extractor + new softmax head."""
from __future__ import annotations

from pathlib import Path

from .config import TrainConfig
from .manifest_io import TrainerError

WEIGHTS_HELP = (
    "Pretrained weights could not be loaded. This host has no network access, "
    "so provision them offline: download "
    "'vgg16_weights_tf_dim_ordering_tf_kernels_notop.h5' from the Keras release "
    "mirror on a connected machine, then place it under ~/.keras/models/ or pass "
    "its path directly (CLI: --weights PATH)."
)


def resolve_weights(weights: str):
    """Map a weights argument to what the backbone constructor expects.

    "imagenet" requests the published pretrained weights, "none" random
    initialization, anything else is a path to a local weights file.
    """
    if weights == "none":
        return None
    if weights == "imagenet":
        return "imagenet"
    p = Path(weights)
    if not p.exists():
        raise TrainerError(
            "pretrained_weights_unavailable", f"no such weights file: {p}. {WEIGHTS_HELP}"
        )
    return str(p)


def build_model(n_classes: int, cfg: TrainConfig, weights: str = "imagenet"):
    """Build and compile the classifier.

    The convolutional body is frozen; only the dropout + dense softmax head
    trains. Features are reduced by global average pooling before the head.
    """
    if n_classes < 2:
        raise TrainerError("need_two_classes", f"got {n_classes} class(es)")
    w = resolve_weights(weights)
    import keras
    from keras.applications import VGG16

    shape = (cfg.input_size, cfg.input_size, 3)
    if w is None:
        body = VGG16(include_top=False, weights=None, input_shape=shape, pooling="avg")
    else:
        try:
            body = VGG16(include_top=False, weights=w, input_shape=shape, pooling="avg")
        except Exception as e:
            raise TrainerError(
                "pretrained_weights_unavailable", f"{e}. {WEIGHTS_HELP}"
            ) from None
    body.trainable = False
    model = keras.Sequential(
        [
            keras.Input(shape=shape),
            body,
            keras.layers.Dropout(cfg.dropout),
            keras.layers.Dense(n_classes, activation="softmax"),
        ]
    )
    model.compile(
        optimizer=keras.optimizers.Adam(learning_rate=cfg.learning_rate),
        loss="categorical_crossentropy",
        metrics=["accuracy"],
    )
    return model
