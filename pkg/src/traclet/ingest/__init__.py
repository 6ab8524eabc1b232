"""Dataset adapters: turn raw files into validated Trajectory lists.

Every parser is deterministic (same bytes in, same trajectories out), streams
with bounded memory, and accepts an optional IngestReport sink that counts
skipped records and collects warnings instead of failing the whole parse.
"""
from __future__ import annotations

from .csvfmt import SchemaSpec, parse_csv, read_canonical_csv, write_canonical_csv
from .geolife import parse_geolife
from .hurdat import parse_hurdat
from .report import IngestReport
from .starkey import parse_starkey

__all__ = [
    "IngestReport",
    "SchemaSpec",
    "parse_csv",
    "read_canonical_csv",
    "write_canonical_csv",
    "parse_geolife",
    "parse_hurdat",
    "parse_starkey",
]
