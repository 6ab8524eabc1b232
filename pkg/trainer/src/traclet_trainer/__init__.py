"""Image-classification trainer for traclet datasets.

Consumes a built dataset (manifest + PNG tree) through its file formats,
fine-tunes a frozen-body VGG16 with a fresh softmax head, and emits a
prediction file the dataset tool's ``evaluate`` verb accepts.
"""
from .config import TrainConfig
from .manifest_io import Manifest, ManifestEntry, TrainerError, read_manifest
from .model import build_model
from .predict import predict_to_file
from .train import fine_tune

__version__ = "0.1.0"

__all__ = [
    "Manifest",
    "ManifestEntry",
    "TrainConfig",
    "TrainerError",
    "build_model",
    "fine_tune",
    "predict_to_file",
    "read_manifest",
    "__version__",
]
