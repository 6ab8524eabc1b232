"""traclet: trajectory-to-image rasterization and dataset pipeline.

Converts labeled GPS/track datasets into square RGB images that encode
trajectory shape, speed (position-pixel color) and acceleration
(connecting-line color), and manages the split/manifest/metrics toolchain
around them.
"""
__version__ = "0.1.0"

from .model import (  # noqa: F401
    BoundingBox,
    InternalError,
    KinematicTrack,
    Position,
    RasterConfig,
    TracletImage,
    Trajectory,
    ValidationError,
)
