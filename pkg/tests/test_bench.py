import json

import pytest

from shuttlesat.bench import (FRA, PRESETS, QFT, BenchError, BenchSpec, load_specs, reference_t_hat,
                              resolve_presets, rows_csv, rows_table, run_bench, runs_csv, with_overrides)
from shuttlesat.verify import oracle_minimal


def test_table_has_thirty_rows_with_references():
    rows = PRESETS["table"]
    assert len(rows) == 30
    assert all(reference_t_hat(s) is not None for s in rows)
    assert len({(s.suite, s.m, s.n, s.h, s.chains, s.family) for s in rows}) == 30


@pytest.mark.parametrize("name,edges", [("racetrack-h5", 12), ("racetrack-h29", 60),
                                        ("lattice-3x3", 12), ("lattice-6x6", 60)])
def test_preset_sizes(name, edges):
    assert {s.memory_edges for s in PRESETS[name]} == {edges}


def test_spec_validation():
    with pytest.raises(BenchError):
        BenchSpec("ring", 2, 2, 1, 5, 6)
    with pytest.raises(BenchError):
        BenchSpec("racetrack", 2, 2, 1, 5, 13)
    with pytest.raises(BenchError):
        BenchSpec("racetrack", 2, 2, 1, 5, 5, QFT, 4)
    with pytest.raises(BenchError):
        BenchSpec("racetrack", 2, 2, 1, 5, 5, budget=0)
    with pytest.raises(BenchError):
        resolve_presets(["nope"])
    with pytest.raises(BenchError):
        BenchSpec.from_dict({"suite": "lattice", "m": 3, "n": 3, "v": 1, "h": 1, "chains": 2, "x": 1})


def test_seeds_follow_runs():
    s = BenchSpec("lattice", 3, 3, 1, 1, 6, seed_base=40)
    assert [s.problem(r).seed for r in range(3)] == [40, 41, 42]
    assert s.problem(1).placement != s.problem(2).placement
    q = BenchSpec("lattice", 3, 3, 1, 1, 5, QFT, 5)
    assert len(q.problem(0).sequence) == 15


def test_load_specs(tmp_path):
    path = tmp_path / "b.json"
    path.write_text(json.dumps({"suite": "lattice", "m": 3, "n": 3, "v": 1, "h": 1, "chains": 2}))
    assert load_specs(path) == [BenchSpec("lattice", 3, 3, 1, 1, 2)]
    path.write_text("3")
    with pytest.raises(BenchError):
        load_specs(path)


def test_small_bench_matches_oracle():
    spec = BenchSpec("racetrack", 2, 2, 1, 2, 2, runs=3, budget=60)
    [row] = run_bench([spec])
    want = [oracle_minimal(spec.problem(r), 30).minimal_T for r in range(3)]
    assert [r.t_hat for r in row.records] == want
    assert row.mean_t_hat == pytest.approx(sum(want) / 3)
    assert row.timeouts == 0
    text = rows_table([row])
    assert "2/6 (33%)" in text
    assert rows_csv([row]).splitlines()[0].startswith("suite,algorithm")
    assert len(runs_csv([row]).splitlines()) == 4


def test_timeout_row_reports_bound():
    [spec] = with_overrides([BenchSpec("lattice", 4, 4, 1, 1, 12, runs=1)], budget=1.0)
    [row] = run_bench([spec])
    assert row.mean_t_hat is None and row.timeouts == 1
    assert f">{row.best_lower_bound}" in rows_table([row])
    assert row.best_lower_bound >= 11
