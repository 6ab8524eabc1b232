"""The authoritative record of a dataset build.

A manifest is a line-oriented text file: a versioned header, one meta line
holding the build's seed, config hash and reproduction metadata as canonical
JSON, then CSV entries mapping each image path to its trajectory, label and
split.  Paths are stored relative to the manifest's directory so a build
tree can be moved wholesale.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

from .model import ValidationError

MANIFEST_VERSION = 1
_MAGIC = f"#% traclet-manifest v{MANIFEST_VERSION}"
_ENTRY_HEADER = ("path", "traj_id", "label", "split")
SPLITS = ("train", "test")


def canonical_json(obj) -> str:
    """Stable serialization: sorted keys, no whitespace."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def hash_config(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    traj_id: str
    label: str
    split: str

    def __post_init__(self):
        if not self.path or not self.traj_id or not self.label:
            raise ValidationError("bad_manifest_entry", repr(self))
        if self.split not in SPLITS:
            raise ValidationError("bad_split", f"{self.path}: {self.split!r}")


@dataclass(frozen=True)
class DatasetManifest:
    """Image path -> (trajectory, label, split), plus everything needed to
    reproduce the build (seed, config hash, kinematic stats in meta)."""

    seed: int
    config_hash: str
    entries: tuple[ManifestEntry, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.entries:
            raise ValidationError("empty_manifest")
        seen = set()
        for e in self.entries:
            if e.path in seen:
                raise ValidationError("duplicate_manifest_path", e.path)
            seen.add(e.path)
        # stratification contract: per class, train size within one
        # trajectory of the 70% target
        for label, (n_train, n_total) in self._split_counts().items():
            if abs(n_train - 0.7 * n_total) > 1.0 + 1e-9:
                raise ValidationError(
                    "split_not_stratified",
                    f"{label}: {n_train} train of {n_total}",
                )

    def _split_counts(self) -> dict:
        counts: dict[str, list[int]] = {}
        for e in self.entries:
            c = counts.setdefault(e.label, [0, 0])
            c[1] += 1
            if e.split == "train":
                c[0] += 1
        return {k: (v[0], v[1]) for k, v in counts.items()}

    def labels(self) -> tuple[str, ...]:
        return tuple(sorted({e.label for e in self.entries}))

    def split_entries(self, split: str) -> list[ManifestEntry]:
        return [e for e in self.entries if e.split == split]

    def by_path(self) -> dict:
        return {e.path: e for e in self.entries}


def write_manifest(manifest: DatasetManifest, path) -> None:
    path = Path(path)
    meta = {
        "seed": manifest.seed,
        "config_hash": manifest.config_hash,
        **manifest.meta,
    }
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_ENTRY_HEADER)
    for e in manifest.entries:
        w.writerow([e.path, e.traj_id, e.label, e.split])
    text = f"{_MAGIC}\n#% meta {canonical_json(meta)}\n{buf.getvalue()}"
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def read_manifest(path) -> DatasetManifest:
    path = Path(path)
    with open(path, encoding="utf-8") as f:
        magic = f.readline().rstrip("\n")
        if magic != _MAGIC:
            raise ValidationError("bad_manifest_header", f"{path}: {magic!r}")
        meta_line = f.readline().rstrip("\n")
        if not meta_line.startswith("#% meta "):
            raise ValidationError("bad_manifest_header", f"{path}: missing meta line")
        try:
            meta = json.loads(meta_line[len("#% meta ") :])
        except json.JSONDecodeError as e:
            raise ValidationError("bad_manifest_meta", f"{path}: {e}") from None
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or tuple(header) != _ENTRY_HEADER:
            raise ValidationError("bad_manifest_header", f"{path}: {header!r}")
        entries = []
        for lineno, row in enumerate(reader, start=4):
            if not row:
                continue
            if len(row) != 4:
                raise ValidationError("bad_manifest_entry", f"{path}:{lineno}: {row!r}")
            entries.append(ManifestEntry(*row))
    seed = meta.pop("seed", None)
    config_hash = meta.pop("config_hash", None)
    if not isinstance(seed, int) or not isinstance(config_hash, str):
        raise ValidationError("bad_manifest_meta", f"{path}: seed/config_hash missing")
    return DatasetManifest(
        seed=seed, config_hash=config_hash, entries=tuple(entries), meta=meta
    )
