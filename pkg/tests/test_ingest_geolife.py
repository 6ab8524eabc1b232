"""Dense-GPS corpus adapter: PLT trees with per-user mode label intervals."""

import pytest

from traclet.ingest import IngestReport, parse_geolife
from traclet.model import ValidationError

PREAMBLE = "Geolife trajectory\nWGS 84\nAltitude is in Feet\nReserved 3\n0,2,255,My Track,0,0,2182,234\n0\n"


def plt_row(lat, lon, date, clock, alt="300"):
    return f"{lat},{lon},0,{alt},39000.0,{date},{clock}\n"


def make_user(root, user, labels, plt_files):
    """labels: list of (start, end, mode) strings; plt_files: {name: [rows]}"""
    udir = root / "Data" / user
    tdir = udir / "Trajectory"
    tdir.mkdir(parents=True)
    if labels is not None:
        lines = ["Start Time\tEnd Time\tTransportation Mode"]
        lines += [f"{s}\t{e}\t{m}" for s, e, m in labels]
        (udir / "labels.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    for name, rows in plt_files.items():
        (tdir / name).write_text(PREAMBLE + "".join(rows), encoding="utf-8")


class TestParseGeolife:
    def test_file_inside_one_interval(self, tmp_path):
        make_user(
            tmp_path,
            "000",
            [("2008/01/01 08:00:00", "2008/01/01 09:00:00", "bus")],
            {
                "20080101080000.plt": [
                    plt_row(39.9, 116.3, "2008-01-01", "08:00:00"),
                    plt_row(39.91, 116.31, "2008-01-01", "08:00:05"),
                    plt_row(39.92, 116.32, "2008-01-01", "08:00:10"),
                ]
            },
        )
        out = parse_geolife(tmp_path)
        assert len(out) == 1
        tr = out[0]
        assert tr.label == "bus"
        assert len(tr) == 3
        assert tr.id == "000_20080101080000_1"
        # PLT order is lat,lon -> Position must swap
        assert tr.points[0].lon == 116.3 and tr.points[0].lat == 39.9

    def test_out_of_range_latitude_rejected_and_counted(self, tmp_path):
        make_user(
            tmp_path,
            "000",
            [("2008/01/01 08:00:00", "2008/01/01 09:00:00", "walk")],
            {
                "a.plt": [
                    plt_row(39.9, 116.3, "2008-01-01", "08:00:00"),
                    plt_row(91.2, 116.3, "2008-01-01", "08:00:05"),
                    plt_row(39.92, 116.3, "2008-01-01", "08:00:10"),
                ]
            },
        )
        rep = IngestReport()
        out = parse_geolife(tmp_path, rep)
        assert len(out) == 1 and len(out[0]) == 2
        assert rep.counters["rows_skipped"] == 1
        assert rep.counters["rows_total"] == 3

    def test_unlabeled_points_discarded(self, tmp_path):
        make_user(
            tmp_path,
            "000",
            [("2008/01/01 08:00:00", "2008/01/01 08:00:07", "walk")],
            {
                "a.plt": [
                    plt_row(39.90, 116.3, "2008-01-01", "08:00:00"),
                    plt_row(39.91, 116.3, "2008-01-01", "08:00:05"),
                    plt_row(39.92, 116.3, "2008-01-01", "08:30:00"),  # outside interval
                    plt_row(39.93, 116.3, "2008-01-01", "08:31:00"),  # outside interval
                ]
            },
        )
        rep = IngestReport()
        out = parse_geolife(tmp_path, rep)
        assert len(out) == 1
        assert len(out[0]) == 2
        assert rep.counters["unlabeled_points"] == 2

    def test_interval_clips_trajectory(self, tmp_path):
        # points straddle the interval boundary; only covered ones survive
        make_user(
            tmp_path,
            "000",
            [("2008/01/01 08:00:03", "2008/01/01 08:00:20", "bike")],
            {
                "a.plt": [
                    plt_row(39.90, 116.3, "2008-01-01", "08:00:00"),
                    plt_row(39.91, 116.3, "2008-01-01", "08:00:05"),
                    plt_row(39.92, 116.3, "2008-01-01", "08:00:10"),
                ]
            },
        )
        out = parse_geolife(tmp_path)
        assert len(out) == 1
        assert [p.lat for p in out[0].points] == [39.91, 39.92]

    def test_interval_change_splits_runs(self, tmp_path):
        make_user(
            tmp_path,
            "000",
            [
                ("2008/01/01 08:00:00", "2008/01/01 08:00:07", "walk"),
                ("2008/01/01 08:00:08", "2008/01/01 09:00:00", "bus"),
            ],
            {
                "a.plt": [
                    plt_row(39.90, 116.3, "2008-01-01", "08:00:00"),
                    plt_row(39.91, 116.3, "2008-01-01", "08:00:05"),
                    plt_row(39.92, 116.3, "2008-01-01", "08:00:10"),
                    plt_row(39.93, 116.3, "2008-01-01", "08:00:15"),
                ]
            },
        )
        out = parse_geolife(tmp_path)
        assert [(t.label, len(t)) for t in out] == [("walk", 2), ("bus", 2)]
        assert out[0].id.endswith("_1") and out[1].id.endswith("_2")

    def test_labeled_run_interrupted_by_gap_starts_new_segment(self, tmp_path):
        # label -> unlabeled -> same label again: two separate trajectories
        make_user(
            tmp_path,
            "000",
            [
                ("2008/01/01 08:00:00", "2008/01/01 08:00:06", "walk"),
                ("2008/01/01 08:00:14", "2008/01/01 08:00:30", "walk"),
            ],
            {
                "a.plt": [
                    plt_row(39.90, 116.3, "2008-01-01", "08:00:00"),
                    plt_row(39.91, 116.3, "2008-01-01", "08:00:05"),
                    plt_row(39.92, 116.3, "2008-01-01", "08:00:10"),  # uncovered
                    plt_row(39.93, 116.3, "2008-01-01", "08:00:15"),
                    plt_row(39.94, 116.3, "2008-01-01", "08:00:20"),
                ]
            },
        )
        out = parse_geolife(tmp_path)
        assert len(out) == 2
        assert all(t.label == "walk" for t in out)
        assert [len(t) for t in out] == [2, 2]
        assert out[0].id != out[1].id

    def test_user_without_labels_skipped_with_warning(self, tmp_path):
        make_user(tmp_path, "000", None, {"a.plt": [plt_row(39.9, 116.3, "2008-01-01", "08:00:00")]})
        make_user(
            tmp_path,
            "001",
            [("2008/01/01 08:00:00", "2008/01/01 09:00:00", "walk")],
            {
                "b.plt": [
                    plt_row(39.9, 116.3, "2008-01-01", "08:00:00"),
                    plt_row(39.91, 116.3, "2008-01-01", "08:00:05"),
                ]
            },
        )
        rep = IngestReport()
        out = parse_geolife(tmp_path, rep)
        assert len(out) == 1 and out[0].id.startswith("001_")
        assert rep.counters["users_without_labels"] == 1
        assert any("000" in w for w in rep.warnings)

    def test_empty_labels_file_counts_as_missing(self, tmp_path):
        make_user(tmp_path, "000", [], {"a.plt": []})
        rep = IngestReport()
        assert parse_geolife(tmp_path, rep) == []
        assert rep.counters["users_without_labels"] == 1

    def test_malformed_label_lines_skipped(self, tmp_path):
        udir = tmp_path / "Data" / "000"
        (udir / "Trajectory").mkdir(parents=True)
        (udir / "labels.txt").write_text(
            "Start Time\tEnd Time\tTransportation Mode\n"
            "2008/01/01 08:00:00\t2008/01/01 09:00:00\tbus\n"
            "not a date\t2008/01/01 09:00:00\twalk\n"
            "2008/01/01 10:00:00\tmissing-field\n",
            encoding="utf-8",
        )
        (udir / "Trajectory" / "a.plt").write_text(
            PREAMBLE
            + plt_row(39.9, 116.3, "2008-01-01", "08:00:00")
            + plt_row(39.91, 116.3, "2008-01-01", "08:00:05"),
            encoding="utf-8",
        )
        rep = IngestReport()
        out = parse_geolife(tmp_path, rep)
        assert len(out) == 1 and out[0].label == "bus"
        assert rep.counters["label_lines_skipped"] == 2

    def test_mode_lowercased(self, tmp_path):
        make_user(
            tmp_path,
            "000",
            [("2008/01/01 08:00:00", "2008/01/01 09:00:00", "Bus")],
            {
                "a.plt": [
                    plt_row(39.9, 116.3, "2008-01-01", "08:00:00"),
                    plt_row(39.91, 116.3, "2008-01-01", "08:00:05"),
                ]
            },
        )
        out = parse_geolife(tmp_path)
        assert out[0].label == "bus"

    def test_accepts_data_dir_directly(self, tmp_path):
        make_user(
            tmp_path,
            "000",
            [("2008/01/01 08:00:00", "2008/01/01 09:00:00", "walk")],
            {
                "a.plt": [
                    plt_row(39.9, 116.3, "2008-01-01", "08:00:00"),
                    plt_row(39.91, 116.3, "2008-01-01", "08:00:05"),
                ]
            },
        )
        assert parse_geolife(tmp_path / "Data") == parse_geolife(tmp_path)

    def test_missing_root_is_hard_error(self, tmp_path):
        with pytest.raises(ValidationError) as ei:
            parse_geolife(tmp_path / "nope")
        assert ei.value.reason == "missing_input"

    def test_deterministic(self, tmp_path):
        for user in ("005", "003"):
            make_user(
                tmp_path,
                user,
                [("2008/01/01 08:00:00", "2008/01/01 09:00:00", "walk")],
                {
                    "a.plt": [
                        plt_row(39.9, 116.3, "2008-01-01", "08:00:00"),
                        plt_row(39.91, 116.3, "2008-01-01", "08:00:05"),
                    ]
                },
            )
        a = parse_geolife(tmp_path)
        b = parse_geolife(tmp_path)
        assert a == b
        assert [t.id.split("_")[0] for t in a] == ["003", "005"]  # sorted users
