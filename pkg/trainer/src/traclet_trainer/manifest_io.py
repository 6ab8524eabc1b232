"""File contracts shared with the dataset builder.

The trainer talks to the builder only through on-disk artifacts: it reads
the dataset manifest (versioned header, one canonical-JSON meta line, CSV
entries mapping image paths to labels and splits) and writes prediction
files (CSV with header ``path,true,pred``).
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

MANIFEST_MAGIC = "#% traclet-manifest v1"
META_PREFIX = "#% meta "
ENTRY_HEADER = ("path", "traj_id", "label", "split")
PREDICTION_HEADER = ("path", "true", "pred")
SPLITS = ("train", "test")


class TrainerError(Exception):
    """Validation or environment failure with a machine-readable reason."""

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        self.detail = detail
        super().__init__(f"{reason}: {detail}" if detail else reason)


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    traj_id: str
    label: str
    split: str


@dataclass(frozen=True)
class Manifest:
    """A parsed dataset manifest; image paths resolve against ``root``."""

    root: Path
    meta: dict
    entries: tuple[ManifestEntry, ...]

    def labels(self) -> tuple[str, ...]:
        return tuple(sorted({e.label for e in self.entries}))

    def split(self, name: str) -> list[ManifestEntry]:
        return [e for e in self.entries if e.split == name]

    def image_path(self, entry: ManifestEntry) -> Path:
        return self.root / entry.path


def read_manifest(path) -> Manifest:
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        magic = f.readline().rstrip("\n")
        if magic != MANIFEST_MAGIC:
            raise TrainerError("bad_manifest", f"{path}: unrecognized header {magic!r}")
        meta_line = f.readline().rstrip("\n")
        if not meta_line.startswith(META_PREFIX):
            raise TrainerError("bad_manifest", f"{path}: missing meta line")
        try:
            meta = json.loads(meta_line[len(META_PREFIX):])
        except json.JSONDecodeError as e:
            raise TrainerError("bad_manifest", f"{path}: meta is not JSON ({e})") from None
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or tuple(header) != ENTRY_HEADER:
            raise TrainerError("bad_manifest", f"{path}: entry header {header!r}")
        entries = []
        for lineno, row in enumerate(reader, start=4):
            if not row:
                continue
            if len(row) != 4 or not all(row[:3]) or row[3] not in SPLITS:
                raise TrainerError("bad_manifest", f"{path}:{lineno}: {row!r}")
            entries.append(ManifestEntry(*row))
    if not entries:
        raise TrainerError("bad_manifest", f"{path}: no entries")
    return Manifest(root=path.parent, meta=meta, entries=tuple(entries))


def write_prediction_file(rows, path) -> None:
    """rows: iterable of (image path, true label, predicted label)."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(PREDICTION_HEADER)
        for r in rows:
            w.writerow(list(r))
