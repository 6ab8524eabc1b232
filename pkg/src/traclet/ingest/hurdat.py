"""Atlantic hurricane database (HURDAT2) adapter.

The file interleaves storm headers with fixed-field data rows:

    AL011950,            ABLE,     22,
    19500812, 0000,  , TS, 17.0N,  55.0W,  40, -99, ...

A header carries the storm id (basin + number + year), name, and the number
of data rows that follow.  Data rows carry date (YYYYMMDD), time (HHMM, UTC),
a record identifier, system status, hemisphere-suffixed coordinates, and the
maximum sustained wind in knots (-99 when missing).

One storm becomes one Trajectory.  The label is the storm's lifetime-maximum
strength on a Saffir-Simpson-style 7-class scale derived from wind speed:
TD < 34 kt, TS 34-63, C1 64-82, C2 83-95, C3 96-112, C4 113-136, C5 >= 137.
Storms whose physical data-row count disagrees with the header count are
skipped with a warning; parsing resumes at the next header either way.
"""
from __future__ import annotations

import calendar
import re
import time
from pathlib import Path

from ..model import Position, Trajectory, ValidationError
from .csvfmt import group_into_trajectories
from .report import IngestReport

_HEADER_ID = re.compile(r"^[A-Z]{2}\d{6}$")

# (exclusive upper wind bound in knots, class label)
_STRENGTH_SCALE = (
    (34, "TD"),
    (64, "TS"),
    (83, "C1"),
    (96, "C2"),
    (113, "C3"),
    (137, "C4"),
)


def strength_label(max_wind_kt: int) -> str:
    for bound, label in _STRENGTH_SCALE:
        if max_wind_kt < bound:
            return label
    return "C5"


def _signed(coord: str) -> float:
    coord = coord.strip()
    value = float(coord[:-1])
    hemi = coord[-1].upper()
    if hemi in ("N", "E"):
        return value
    if hemi in ("S", "W"):
        return -value
    raise ValueError(f"bad hemisphere {coord!r}")


def _classify(line: str):
    """("header", fields) for a storm header, ("badheader", id) for a
    header-shaped line with garbage metadata, else ("data", line)."""
    parts = [p.strip() for p in line.split(",")]
    if not _HEADER_ID.match(parts[0]):
        return "data", line
    if len(parts) >= 3:
        try:
            count = int(parts[2])
            if count >= 0:
                return "header", (parts[0], parts[1], count)
        except ValueError:
            pass
    return "badheader", parts[0]


def _parse_row(line: str):
    """(t_epoch, Position, wind_kt or None) for one data row."""
    parts = [p.strip() for p in line.split(",")]
    if len(parts) < 7:
        raise ValueError(f"{len(parts)} fields")
    t = float(calendar.timegm(time.strptime(parts[0] + parts[1], "%Y%m%d%H%M")))
    lat = _signed(parts[4])
    lon = _signed(parts[5])
    if lon < -180.0:
        lon += 360.0
    elif lon > 180.0:
        lon -= 360.0
    wind = int(parts[6])
    return t, Position(lon=lon, lat=lat, t=t), (wind if wind >= 0 else None)


def parse_hurdat(
    path,
    year_min: int | None = None,
    year_max: int | None = None,
    report: IngestReport | None = None,
) -> list[Trajectory]:
    """Parse a HURDAT2 file into one labeled Trajectory per storm.

    ``year_min`` / ``year_max`` (inclusive) filter storms by the year encoded
    in their id, so historical subsets are reproducible.
    """
    path = Path(path)
    out: list[Trajectory] = []

    def finalize(storm_id: str, count: int, lines: list[str]) -> None:
        if len(lines) != count:
            if report:
                report.inc("storms_skipped_count_mismatch")
                report.warn(
                    f"{storm_id}: header advertises {count} rows, found {len(lines)}"
                )
            return
        year = int(storm_id[4:8])
        if (year_min is not None and year < year_min) or (
            year_max is not None and year > year_max
        ):
            if report:
                report.inc("storms_outside_years")
            return
        rows = []
        for line in lines:
            if report:
                report.inc("rows_total")
            try:
                rows.append(_parse_row(line))
            except (ValueError, ValidationError):
                if report:
                    report.inc("rows_skipped")
        winds = [w for _, _, w in rows if w is not None]
        if not winds:
            if report:
                report.inc("storms_without_wind")
            return
        label = strength_label(max(winds))
        out.extend(
            group_into_trajectories(
                [(storm_id, label, pos) for _, pos, _ in rows], report
            )
        )

    current: tuple[str, int, list[str]] | None = None
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            kind, payload = _classify(line)
            if kind == "header":
                if current is not None:
                    finalize(*current)
                current = (payload[0], payload[2], [])
            elif kind == "badheader":
                if current is not None:
                    finalize(*current)
                current = None
                if report:
                    report.inc("storms_skipped_bad_header")
                    report.warn(f"{payload}: unparseable storm header")
            else:
                if current is None:
                    if report:
                        report.inc("orphan_lines")
                else:
                    current[2].append(line)
        if current is not None:
            finalize(*current)
    return out
