"""Training hyperparameters with validated defaults."""
from __future__ import annotations

from dataclasses import asdict, dataclass

from .manifest_io import TrainerError


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    learning_rate: float = 1e-3
    batch_size: int = 16
    dropout: float = 0.2
    input_size: int = 224
    seed: int = 0
    # Master switch for train-time augmentation, plus per-transform toggles.
    # Validation/test images are never augmented regardless of these.
    augment: bool = True
    rotation_degrees: float = 30.0
    horizontal_flip: bool = True
    shear: bool = True
    zoom: bool = True
    crop: bool = True
    noise: bool = True

    def __post_init__(self):
        if self.epochs < 1:
            raise TrainerError("bad_config", f"epochs must be >= 1, got {self.epochs}")
        if not self.learning_rate > 0:
            raise TrainerError("bad_config", f"learning_rate must be > 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise TrainerError("bad_config", f"batch_size must be >= 1, got {self.batch_size}")
        if not 0.0 <= self.dropout < 1.0:
            raise TrainerError("bad_config", f"dropout must be in [0, 1), got {self.dropout}")
        if self.input_size < 32:
            # Five 2x poolings in the conv body need at least 32 px on a side.
            raise TrainerError("bad_config", f"input_size must be >= 32, got {self.input_size}")
        if not 0.0 <= self.rotation_degrees <= 180.0:
            raise TrainerError(
                "bad_config", f"rotation_degrees must be in [0, 180], got {self.rotation_degrees}"
            )

    def to_dict(self) -> dict:
        return asdict(self)
