"""Starkey wildlife-telemetry adapter.

The telemetry exports are delimited text with a header; column names vary
between releases, so roles are resolved through an alias table (names are
matched after lowercasing and stripping non-alphanumerics).  Recognized
roles: species, animal id, timestamp (one combined column or separate
date/time), and either geographic lon/lat or UTM easting/northing, which is
inverse-projected from the project's zone (11N, WGS84 ellipsoid).

Species codes map to labels: E -> elk, D -> mule deer, C -> cattle; records
with unknown species are skipped and counted, as are records stamped before
the project start epoch.  One Trajectory per animal per calendar year.
"""
from __future__ import annotations

import calendar
import csv
import math
import time
from pathlib import Path

from ..model import Position, Trajectory, ValidationError
from .csvfmt import group_into_trajectories
from .report import IngestReport

PROJECT_START_EPOCH = float(calendar.timegm((1988, 1, 1, 0, 0, 0, 0, 0, 0)))

_SPECIES = {
    "e": "elk",
    "elk": "elk",
    "d": "mule deer",
    "deer": "mule deer",
    "muledeer": "mule deer",
    "md": "mule deer",
    "c": "cattle",
    "cattle": "cattle",
    "cow": "cattle",
    "cows": "cattle",
}

_ALIASES = {
    "species": ("species", "speciescode"),
    "animal": ("id", "animalid", "animal", "animalnumber"),
    "datetime": ("datetime", "gmtdatetime", "datetimegmt", "timestamp"),
    "date": ("date", "gmtdate"),
    "time": ("time", "gmttime"),
    "lon": ("lon", "long", "longitude"),
    "lat": ("lat", "latitude"),
    "east": ("utme", "utmeast", "utmgrideast", "easting", "utmx"),
    "north": ("utmn", "utmnorth", "utmgridnorth", "northing", "utmy"),
}

_DT_FORMATS = ("%Y-%m-%d %H:%M:%S", "%Y/%m/%d %H:%M:%S", "%Y%m%d%H%M%S")
_DATE_FORMATS = ("%Y-%m-%d", "%Y/%m/%d", "%Y%m%d")
_TIME_FORMATS = ("%H:%M:%S", "%H%M%S")

# WGS84 / transverse Mercator constants shared by the UTM inverse
_A = 6378137.0
_F = 1.0 / 298.257223563
_K0 = 0.9996
_E2 = _F * (2.0 - _F)
_EP2 = _E2 / (1.0 - _E2)
_E1 = (1.0 - math.sqrt(1.0 - _E2)) / (1.0 + math.sqrt(1.0 - _E2))


def utm_to_lonlat(
    easting: float, northing: float, zone: int = 11, northern: bool = True
) -> tuple[float, float]:
    """Invert a UTM grid coordinate to (lon, lat) degrees on WGS84.

    Standard series expansion; error is far below telemetry precision
    (well under a meter over a UTM zone).
    """
    if not 1 <= zone <= 60:
        raise ValidationError("bad_utm_zone", str(zone))
    x = easting - 500000.0
    y = northing if northern else northing - 10000000.0
    lon0 = math.radians(-183.0 + 6.0 * zone)

    m = y / _K0
    mu = m / (_A * (1 - _E2 / 4 - 3 * _E2**2 / 64 - 5 * _E2**3 / 256))
    phi1 = (
        mu
        + (3 * _E1 / 2 - 27 * _E1**3 / 32) * math.sin(2 * mu)
        + (21 * _E1**2 / 16 - 55 * _E1**4 / 32) * math.sin(4 * mu)
        + (151 * _E1**3 / 96) * math.sin(6 * mu)
        + (1097 * _E1**4 / 512) * math.sin(8 * mu)
    )
    sin1 = math.sin(phi1)
    cos1 = math.cos(phi1)
    tan1 = sin1 / cos1
    c1 = _EP2 * cos1 * cos1
    t1 = tan1 * tan1
    n1 = _A / math.sqrt(1 - _E2 * sin1 * sin1)
    r1 = _A * (1 - _E2) / (1 - _E2 * sin1 * sin1) ** 1.5
    d = x / (n1 * _K0)

    lat = phi1 - (n1 * tan1 / r1) * (
        d * d / 2
        - (5 + 3 * t1 + 10 * c1 - 4 * c1 * c1 - 9 * _EP2) * d**4 / 24
        + (61 + 90 * t1 + 298 * c1 + 45 * t1 * t1 - 252 * _EP2 - 3 * c1 * c1)
        * d**6
        / 720
    )
    lon = lon0 + (
        d
        - (1 + 2 * t1 + c1) * d**3 / 6
        + (5 - 2 * c1 + 28 * t1 - 3 * c1 * c1 + 8 * _EP2 + 24 * t1 * t1) * d**5 / 120
    ) / cos1
    return math.degrees(lon), math.degrees(lat)


def _normalize(name: str) -> str:
    return "".join(c for c in name.lower() if c.isalnum())


def _resolve_columns(header: list[str]) -> dict[str, int]:
    norm = [_normalize(h) for h in header]
    cols: dict[str, int] = {}
    for role, aliases in _ALIASES.items():
        for alias in aliases:
            if alias in norm:
                cols[role] = norm.index(alias)
                break
    for role in ("species", "animal"):
        if role not in cols:
            raise ValidationError("missing_column", role)
    if "datetime" not in cols and not ("date" in cols and "time" in cols):
        raise ValidationError("missing_column", "timestamp")
    if not ("lon" in cols and "lat" in cols) and not (
        "east" in cols and "north" in cols
    ):
        raise ValidationError("missing_column", "coordinates")
    return cols


def _try_formats(text: str, formats) -> time.struct_time:
    for fmt in formats:
        try:
            return time.strptime(text, fmt)
        except ValueError:
            continue
    raise ValueError(f"unrecognized timestamp {text!r}")


def _parse_t(row: list[str], cols: dict[str, int]) -> float:
    if "datetime" in cols:
        text = row[cols["datetime"]].strip()
        try:
            return float(text)
        except ValueError:
            return float(calendar.timegm(_try_formats(text, _DT_FORMATS)))
    date = _try_formats(row[cols["date"]].strip(), _DATE_FORMATS)
    clock = _try_formats(row[cols["time"]].strip(), _TIME_FORMATS)
    return float(
        calendar.timegm(date[:3] + clock[3:6] + (0, 0, 0))
    )


def _detect_delimiter(header_line: str) -> str:
    if "\t" in header_line:
        return "\t"
    if ";" in header_line:
        return ";"
    return ","


def parse_starkey(
    path,
    report: IngestReport | None = None,
    project_start_epoch: float = PROJECT_START_EPOCH,
    zone: int = 11,
) -> list[Trajectory]:
    """Parse a Starkey telemetry export into per-animal-year trajectories."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as f:
        first = f.readline()
        if not first.strip():
            raise ValidationError("missing_column", f"{path}: empty file")
        delim = _detect_delimiter(first)
        cols = _resolve_columns(next(csv.reader([first], delimiter=delim)))
        rows = []
        for row in csv.reader(f, delimiter=delim):
            if not row:
                continue
            if report:
                report.inc("rows_total")
            try:
                species = _SPECIES.get(_normalize(row[cols["species"]]))
                if species is None:
                    if report:
                        report.inc("unknown_species")
                    continue
                t = _parse_t(row, cols)
                if t < project_start_epoch:
                    if report:
                        report.inc("records_before_epoch")
                    continue
                if "lon" in cols and "lat" in cols:
                    lon = float(row[cols["lon"]])
                    lat = float(row[cols["lat"]])
                else:
                    lon, lat = utm_to_lonlat(
                        float(row[cols["east"]]), float(row[cols["north"]]), zone
                    )
                pos = Position(lon=lon, lat=lat, t=t)
                animal = row[cols["animal"]].strip()
                if not animal:
                    raise ValueError("empty animal id")
            except (ValueError, IndexError, ValidationError):
                if report:
                    report.inc("rows_skipped")
                continue
            year = time.gmtime(t).tm_year
            rows.append((f"{animal}_{year}", species, pos))
    return group_into_trajectories(rows, report)
