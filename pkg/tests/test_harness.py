import json
import os

import numpy as np
import pytest

from gssbo import harness
from gssbo.loop import RunConfig, run


@pytest.fixture(scope="module")
def tracked_record():
    return run(RunConfig(objective="hartmann6", budget=32, n0=10, strategy="gssbo",
                         fixed_buffer_size=14, seed=0,
                         track_models=True, track_subsets=True))


def test_trace_roundtrip(tracked_record, tmp_path):
    path = tmp_path / "trace.csv"
    harness.write_trace(tracked_record, str(path))
    rows = harness.read_trace(str(path))
    assert len(rows) == 32
    assert rows[0]["t"] == 1 and rows[-1]["t"] == 32
    for row, orig in zip(rows, tracked_record.rows):
        assert row["strategy"] == "gssbo" and row["seed"] == 0
        assert row["cum_regret"] == orig.cum_regret   # 17 digits: exact roundtrip
        assert row["y"] == orig.y
        assert row["phase"] == orig.phase
        assert row["subset_size"] == orig.subset_size
        for j in range(6):
            assert row[f"x_{j}"] == orig.x[j]


def test_trace_header_layout():
    assert harness.trace_header(2) == [
        "t", "strategy", "seed", "best_so_far", "simple_regret", "regret",
        "cum_regret", "iter_time_ms", "subset_size", "phase", "y", "x_0", "x_1",
    ]


def test_rmse_study_series(tracked_record):
    series = harness.rmse_study(tracked_record, test_grid_size=64)
    assert len(series) == 22  # one per optimization iteration
    assert all(v >= 0 for _, v in series)
    assert [t for t, _ in series] == list(range(11, 33))


def test_rmse_study_start_iteration(tracked_record):
    series = harness.rmse_study(tracked_record, test_grid_size=32, start_iteration=20)
    assert all(t >= 20 for t, _ in series)


def test_rmse_study_grid_is_seeded(tracked_record):
    a = harness.rmse_study(tracked_record, test_grid_size=32, grid_seed=7)
    b = harness.rmse_study(tracked_record, test_grid_size=32, grid_seed=7)
    assert a == b


def test_rmse_study_requires_snapshots():
    rec = run(RunConfig(objective="hartmann6", budget=25, n0=10, seed=0,
                        fixed_buffer_size=12))
    with pytest.raises(ValueError, match="snapshots"):
        harness.rmse_study(rec)


def test_subset_dump(tracked_record, tmp_path):
    path = tmp_path / "subsets.csv"
    rows = harness.subset_dump(tracked_record, str(path))
    assert all(len(idx) == 14 for _, idx in rows)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "t,indices"
    assert len(lines) == len(rows) + 1


def test_subset_dump_requires_traces():
    rec = run(RunConfig(objective="hartmann6", budget=25, n0=10, seed=0,
                        fixed_buffer_size=12))
    with pytest.raises(ValueError, match="traces"):
        harness.subset_dump(rec)


def test_summarize_ratios():
    recs = [
        run(RunConfig(objective="hartmann6", budget=28, n0=10, strategy=s,
                      fixed_buffer_size=13, seed=seed))
        for s in ("gssbo", "full") for seed in (0, 1)
    ]
    rows = harness.summarize(recs)
    by_strategy = {r.strategy: r for r in rows}
    assert by_strategy["full"].runtime_ratio_vs_full == pytest.approx(1.0)
    assert by_strategy["gssbo"].n_seeds == 2
    assert by_strategy["gssbo"].runtime_ratio_vs_full is not None
    assert by_strategy["gssbo"].information_gain_mean > 0


def test_run_grid_success(tmp_path):
    out = tmp_path / "grid"
    code = harness.run_grid(
        {"objectives": ["hartmann6"], "strategies": ["gssbo", "full"],
         "seeds": [0], "budget": 26, "n0": 10, "fixed_buffer_size": 12},
        str(out))
    assert code == 0
    assert (out / "trace_hartmann6_gssbo_s0.csv").exists()
    assert (out / "trace_hartmann6_full_s0.csv").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["failures"] == []
    assert {r["strategy"] for r in summary["summary"]} == {"gssbo", "full"}


def test_run_grid_captures_cell_failures(tmp_path):
    out = tmp_path / "grid_fail"
    code = harness.run_grid(
        {"objectives": ["hartmann6", "powell_6"], "strategies": ["full"],
         "seeds": [0], "budget": 24, "n0": 10},
        str(out))
    assert code == 2  # powell_6 is invalid; the grid still finishes
    summary = json.loads((out / "summary.json").read_text())
    assert len(summary["failures"]) == 1
    assert summary["failures"][0]["cell"]["objective"] == "powell_6"
    assert (out / "trace_hartmann6_full_s0.csv").exists()


def test_run_grid_rejects_bad_config(tmp_path):
    with pytest.raises(harness.GridConfigError):
        harness.run_grid({"strategies": ["full"], "seeds": [0]}, str(tmp_path / "x"))
    with pytest.raises(harness.GridConfigError):
        harness.run_grid({"objectives": [], "strategies": ["full"], "seeds": [0]},
                         str(tmp_path / "y"))
