import json

import pytest

from cascadelab.errors import ParameterError
from cascadelab.model import bayesian_threshold
from cascadelab.sweep import (
    CSV_HEADER,
    SweepRow,
    SweepSpec,
    build_grid,
    detect_drops,
    read_table,
    sweep_eps,
    write_table,
)


def spec(**overrides):
    base = dict(p=0.7, beta=0.0, v="B", method="exact",
                eps_start=0.0, eps_stop=0.02, eps_step=0.01)
    base.update(overrides)
    return SweepSpec(**base)


def test_spec_validation():
    with pytest.raises(ParameterError):
        spec(method="nope")
    with pytest.raises(ParameterError):
        spec(v="Q")
    with pytest.raises(ParameterError):
        spec(eps_step=0.0)
    with pytest.raises(ParameterError):
        spec(eps_start=0.5, eps_stop=0.1)
    with pytest.raises(ParameterError):
        spec(beta=0.2, eps_stop=0.85)


def test_default_stop_leaves_headroom():
    assert spec(eps_stop=None).resolved_stop() == pytest.approx(0.9)
    assert spec(beta=0.2, eps_stop=None).resolved_stop() == pytest.approx(0.72)


def test_grid_is_nudged_off_thresholds():
    # eps = 0 is itself a threshold (one Y cascades an L agent there)
    grid = build_grid(spec())
    assert grid[0] == pytest.approx(1e-6, abs=1e-12)
    t2 = bayesian_threshold(0.7, 0.0, 2)
    near = spec(eps_start=t2, eps_stop=t2 + 0.001, eps_step=0.01)
    grid = build_grid(near)
    assert grid
    for x in grid:
        # clearance is relative to the solver's roots, which sit within
        # 1e-12 of the closed form
        assert abs(x - t2) >= 1e-6 - 1e-9


def test_exact_sweep_rows_carry_brackets():
    rows = sweep_eps(spec())
    assert len(rows) == 3
    for row in rows:
        assert row.method == "exact"
        assert row.lower is not None and row.upper is not None
        assert row.lower - 1e-12 <= row.value <= row.upper + 1e-12
        assert row.std_err is None and row.trials is None


def test_mc_sweep_rows_carry_errors():
    rows = sweep_eps(spec(method="mc", trials=2000, seed=3))
    for row in rows:
        assert row.std_err is not None
        assert row.trials == 2000 and row.seed == 3
        assert row.lower is None


def test_unsupported_points_become_marker_rows():
    # the sequence bound never runs without N-fakes
    rows = sweep_eps(spec(method="sequence"))
    assert len(rows) == 3
    for row in rows:
        assert row.value is None and row.lower is None
        assert row.eps >= 0.0  # grid position still recorded


def test_detect_drops_finds_the_cliff():
    def row(eps, value):
        return SweepRow(eps=eps, beta=0.0, p=0.7, v="B", method="exact", value=value)

    rows = [row(0.0, 0.5), row(0.1, 0.52),
            SweepRow(eps=0.15, beta=0.0, p=0.7, v="B", method="exact"),
            row(0.2, 0.3), row(0.3, 0.29)]
    drops = detect_drops(rows, min_jump=0.1)
    assert len(drops) == 1
    mid, size = drops[0]
    assert mid == pytest.approx(0.15)  # marker row skipped, neighbours used
    assert size == pytest.approx(0.22)
    with pytest.raises(ParameterError):
        detect_drops(rows, min_jump=0.0)


def test_csv_round_trip(tmp_path):
    rows = sweep_eps(spec())
    path = tmp_path / "table.csv"
    write_table(rows, "csv", path)
    text = path.read_text().splitlines()
    assert text[0] == ",".join(CSV_HEADER)
    assert text[1].split(",")[4] == "exact"
    assert read_table(path) == rows


def test_json_round_trip(tmp_path):
    rows = sweep_eps(spec(method="mc", trials=500, seed=1))
    path = tmp_path / "table.json"
    write_table(rows, "json", path)
    payload = json.loads(path.read_text())
    assert [entry["method"] for entry in payload] == ["mc"] * len(rows)
    assert read_table(path) == rows


def test_csv_cells_keep_full_precision(tmp_path):
    rows = sweep_eps(spec())
    path = tmp_path / "table.csv"
    write_table(rows, "csv", path)
    back = read_table(path)
    for before, after in zip(rows, back):
        assert after.value == before.value  # 17 significant digits round-trip


def test_read_table_rejects_foreign_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ParameterError):
        read_table(path)


def test_write_table_rejects_unknown_format(tmp_path):
    with pytest.raises(ParameterError):
        write_table([], "xml", tmp_path / "t.xml")
