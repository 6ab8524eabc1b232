"""GeoLife GPS corpus adapter.

Expected layout (the public distribution):

    <root>/Data/<user>/Trajectory/*.plt
    <root>/Data/<user>/labels.txt

PLT files have a 6-line preamble, then rows
``lat,lon,0,alt_feet,days_since_1899,YYYY-MM-DD,HH:MM:SS``.  labels.txt is a
tab-separated table of ``start`` / ``end`` / ``mode`` with one header line;
timestamps in both files are naive and treated as the same clock (UTC).

Only points inside a label interval yield trajectories: per PLT file, each
maximal run of consecutive points covered by one interval becomes one
Trajectory labeled with that interval's mode.  Users without a labels file
contribute nothing and are counted.  Altitude is validated but not retained
(the interchange format carries lon/lat/t only).
"""
from __future__ import annotations

import calendar
import time
from bisect import bisect_right
from pathlib import Path

from ..model import Position, Trajectory, ValidationError
from .csvfmt import group_into_trajectories
from .report import IngestReport

_PLT_PREAMBLE_LINES = 6
_TS_FMT = "%Y-%m-%d %H:%M:%S"
_LABEL_TS_FMT = "%Y/%m/%d %H:%M:%S"


def _epoch(text: str, fmt: str) -> float:
    return float(calendar.timegm(time.strptime(text.strip(), fmt)))


def _read_labels(path: Path, report: IngestReport | None):
    """Parse labels.txt into ([start...], [(start, end, mode)...]) sorted by start."""
    intervals = []
    with open(path, encoding="utf-8") as f:
        for i, line in enumerate(f):
            if i == 0 or not line.strip():
                continue
            parts = line.rstrip("\n").split("\t")
            try:
                if len(parts) != 3:
                    raise ValueError(f"{len(parts)} fields")
                start = _epoch(parts[0], _LABEL_TS_FMT)
                end = _epoch(parts[1], _LABEL_TS_FMT)
                mode = parts[2].strip().lower()
                if not mode or end < start:
                    raise ValueError("bad interval")
            except ValueError:
                if report:
                    report.inc("label_lines_skipped")
                continue
            intervals.append((start, end, mode))
    intervals.sort(key=lambda iv: (iv[0], iv[1]))
    return [iv[0] for iv in intervals], intervals


def _interval_index(starts, intervals, t: float) -> int:
    """Index of the interval covering t, or -1; bounds inclusive.

    Intervals are sorted by start and treated as non-overlapping (the
    published label files are); if they do overlap, the latest-starting
    candidate wins.
    """
    i = bisect_right(starts, t) - 1
    if i >= 0 and intervals[i][0] <= t <= intervals[i][1]:
        return i
    return -1


def _parse_plt_rows(path: Path, report: IngestReport | None):
    """Yield (t, Position) for each well-formed PLT row."""
    with open(path, encoding="utf-8") as f:
        for i, line in enumerate(f):
            if i < _PLT_PREAMBLE_LINES:
                continue
            if report:
                report.inc("rows_total")
            parts = line.strip().split(",")
            try:
                if len(parts) != 7:
                    raise ValueError(f"{len(parts)} fields")
                lat = float(parts[0])
                lon = float(parts[1])
                float(parts[3])  # altitude in feet; validated, not retained
                t = _epoch(parts[5] + " " + parts[6], _TS_FMT)
                pos = Position(lon=lon, lat=lat, t=t)
            except (ValueError, ValidationError):
                if report:
                    report.inc("rows_skipped")
                continue
            yield t, pos


def parse_geolife(root, report: IngestReport | None = None) -> list[Trajectory]:
    """Parse the GeoLife tree into labeled trajectories.

    Accepts either the distribution root (containing Data/) or the Data
    directory itself.
    """
    root = Path(root)
    data_dir = root / "Data" if (root / "Data").is_dir() else root
    if not data_dir.is_dir():
        raise ValidationError("missing_input", str(root))

    out: list[Trajectory] = []
    for user_dir in sorted(p for p in data_dir.iterdir() if p.is_dir()):
        labels_path = user_dir / "labels.txt"
        if not labels_path.is_file():
            if report:
                report.inc("users_without_labels")
                report.warn(f"user {user_dir.name} has no labels.txt; skipped")
            continue
        starts, intervals = _read_labels(labels_path, report)
        if not intervals:
            if report:
                report.inc("users_without_labels")
                report.warn(f"user {user_dir.name} has an empty labels.txt; skipped")
            continue
        traj_dir = user_dir / "Trajectory"
        if not traj_dir.is_dir():
            continue
        for plt in sorted(traj_dir.glob("*.plt")):
            rows = []
            run = -2  # current interval index; -2 forces a fresh run
            seg = 0
            for t, pos in _parse_plt_rows(plt, report):
                idx = _interval_index(starts, intervals, t)
                if idx < 0:
                    if report:
                        report.inc("unlabeled_points")
                    run = -2
                    continue
                if idx != run:
                    run = idx
                    seg += 1
                traj_id = f"{user_dir.name}_{plt.stem}_{seg}"
                rows.append((traj_id, intervals[idx][2], pos))
            out.extend(group_into_trajectories(rows, report))
    return out
