"""Generic delimited-text adapter plus the canonical interchange format.

The canonical format is the pipeline's internal lingua franca: UTF-8, LF
line endings, header ``traj_id,label,t_epoch_s,lon,lat``, floats written in
shortest round-trip form.  Parsing a file, writing it canonically and
re-parsing yields equal Trajectory values.
"""
from __future__ import annotations

import calendar
import csv
import time
from dataclasses import dataclass
from pathlib import Path

from ..model import Position, Trajectory, ValidationError
from .report import IngestReport

CANONICAL_HEADER = ("traj_id", "label", "t_epoch_s", "lon", "lat")

_LABEL_SOURCES = ("column", "directory", "sidecar", "constant")


@dataclass(frozen=True)
class SchemaSpec:
    """Column roles and parsing rules for one delimited-text layout.

    Role values are column names when ``header`` is true, otherwise 0-based
    column indices given as strings.  ``ts_format`` is either "epoch"
    (numeric seconds) or a strptime pattern interpreted as UTC.

    The label comes from a column, from the parent directory name, from a
    sidecar CSV mapping ``traj_id,label``, or is a constant.
    """

    lon: str
    lat: str
    timestamp: str
    traj_id: str | None = None
    label: str | None = None
    delimiter: str = ","
    header: bool = True
    ts_format: str = "epoch"
    label_source: str = "column"
    sidecar: str | None = None
    constant_label: str | None = None

    def __post_init__(self):
        roles = (self.lon, self.lat, self.timestamp)
        if any(not r for r in roles) or len(set(roles)) != 3:
            raise ValidationError(
                "bad_schema_roles",
                "lon, lat and timestamp must each be assigned exactly once",
            )
        if self.label_source not in _LABEL_SOURCES:
            raise ValidationError("bad_label_source", self.label_source)
        if self.label_source == "column" and not self.label:
            raise ValidationError("bad_schema_roles", "label column not assigned")
        if self.label_source == "sidecar" and not self.sidecar:
            raise ValidationError("bad_schema_roles", "sidecar path not assigned")
        if self.label_source == "constant" and not self.constant_label:
            raise ValidationError("bad_schema_roles", "constant label not assigned")

    @classmethod
    def from_dict(cls, d: dict) -> "SchemaSpec":
        allowed = {
            "lon", "lat", "timestamp", "traj_id", "label", "delimiter",
            "header", "ts_format", "label_source", "sidecar", "constant_label",
        }
        unknown = set(d) - allowed
        if unknown:
            raise ValidationError("unknown_schema_keys", ", ".join(sorted(unknown)))
        return cls(**d)


CANONICAL_SCHEMA = SchemaSpec(
    lon="lon", lat="lat", timestamp="t_epoch_s", traj_id="traj_id", label="label"
)


def _parse_ts(value: str, ts_format: str) -> float:
    if ts_format == "epoch":
        return float(value)
    return float(calendar.timegm(time.strptime(value.strip(), ts_format)))


def _resolve(schema: SchemaSpec, header_row: list[str] | None) -> dict[str, int]:
    """Map each assigned role to its column index."""
    roles = {"lon": schema.lon, "lat": schema.lat, "timestamp": schema.timestamp}
    if schema.traj_id:
        roles["traj_id"] = schema.traj_id
    if schema.label_source == "column":
        roles["label"] = schema.label
    out = {}
    for role, col in roles.items():
        if header_row is not None:
            try:
                out[role] = header_row.index(col)
            except ValueError:
                raise ValidationError("missing_column", f"{role}: {col!r}") from None
        else:
            try:
                out[role] = int(col)
            except ValueError:
                raise ValidationError(
                    "missing_column", f"{role}: {col!r} is not an index"
                ) from None
    return out


def _load_sidecar(path: str) -> dict[str, str]:
    labels = {}
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.reader(f):
            if len(row) >= 2 and row[0] != "traj_id":
                labels.setdefault(row[0], row[1])
    return labels


def group_into_trajectories(
    rows, report: IngestReport | None = None
) -> list[Trajectory]:
    """Assemble (traj_id, label, Position) rows into validated trajectories.

    Groups keep first-appearance order; within a group points are stably
    time-sorted, later duplicates of an already-seen timestamp are dropped,
    and groups left with fewer than 2 points are discarded.  Shared by all
    adapters so the exact same invariants hold everywhere.
    """
    groups: dict[str, list[Position]] = {}
    labels: dict[str, str] = {}
    for traj_id, label, pos in rows:
        if traj_id in labels and labels[traj_id] != label:
            if report:
                report.inc("label_conflicts")
            label = labels[traj_id]
        groups.setdefault(traj_id, []).append(pos)
        labels.setdefault(traj_id, label)

    out = []
    for traj_id, pts in groups.items():
        pts.sort(key=lambda p: p.t)
        kept = []
        for p in pts:
            if kept and p.t == kept[-1].t:
                if report:
                    report.inc("duplicates_dropped")
                continue
            kept.append(p)
        if len(kept) < 2:
            if report:
                report.inc("short_trajectories_dropped")
            continue
        out.append(Trajectory(traj_id, labels[traj_id], tuple(kept)))
    return out


def parse_csv(
    path, schema: SchemaSpec, report: IngestReport | None = None
) -> list[Trajectory]:
    """Parse one delimited file into trajectories per the schema.

    Unresolvable column roles are a hard error; individual bad rows are
    skipped and counted in the report.
    """
    path = Path(path)
    sidecar = _load_sidecar(schema.sidecar) if schema.label_source == "sidecar" else None
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f, delimiter=schema.delimiter)
        header_row = next(reader, None) if schema.header else None
        if schema.header and header_row is None:
            raise ValidationError("missing_column", f"{path}: empty file")
        cols = _resolve(schema, [c.strip() for c in header_row] if header_row else None)
        for row in reader:
            if not row:
                continue
            if report:
                report.inc("rows_total")
            try:
                pos = Position(
                    lon=float(row[cols["lon"]]),
                    lat=float(row[cols["lat"]]),
                    t=_parse_ts(row[cols["timestamp"]], schema.ts_format),
                )
                traj_id = row[cols["traj_id"]].strip() if "traj_id" in cols else path.stem
                if not traj_id:
                    raise ValidationError("empty_trajectory_id")
                if schema.label_source == "column":
                    label = row[cols["label"]].strip()
                elif schema.label_source == "directory":
                    label = path.resolve().parent.name
                elif schema.label_source == "sidecar":
                    label = sidecar.get(traj_id, "")
                else:
                    label = schema.constant_label
                if not label:
                    raise ValidationError("missing_label", traj_id)
            except (ValueError, IndexError):
                if report:
                    report.inc("rows_skipped")
                continue
            rows.append((traj_id, label, pos))
    return group_into_trajectories(rows, report)


def _fmt(x: float) -> str:
    """Shortest text that parses back to exactly the same float."""
    return repr(float(x))


def write_canonical_csv(trajs, path) -> None:
    """Write trajectories in the canonical interchange format."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(CANONICAL_HEADER)
        for t in trajs:
            for p in t.points:
                w.writerow([t.id, t.label, _fmt(p.t), _fmt(p.lon), _fmt(p.lat)])


def read_canonical_csv(path, report: IngestReport | None = None) -> list[Trajectory]:
    return parse_csv(path, CANONICAL_SCHEMA, report)
