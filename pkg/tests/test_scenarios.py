import time
from dataclasses import replace

import pytest

import mediagossip.scenarios as sc
from mediagossip.engine import aggregate
from mediagossip.scenarios import (
    CellFailure,
    SweepGrid,
    run_sweep,
    scenario1_grid,
    scenario2_grid,
    scenario3_grid,
    scenario4_grid,
)


def shrink(grid, turns=5, reps=2):
    return SweepGrid(grid.name, tuple(replace(c, turns=turns, replications=reps) for c in grid.cells))


def test_scenario1_grid():
    g = scenario1_grid(1)
    assert len(g.cells) == 9
    assert [c.tolerance for c in g.cells] == [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
    assert all(c.tv_fraction == 0 and c.wise_fraction == 0 for c in g.cells)
    assert all(c.n_agents == 100 and c.turns == 100 and c.replications == 10 for c in g.cells)


def test_scenario2_grid():
    g = scenario2_grid(1)
    assert len(g.cells) == 99
    assert {c.tv_fraction for c in g.cells} == {i / 10 for i in range(11)}
    assert all(c.wise_fraction == 0 for c in g.cells)
    assert all((c.media_message.welfare, c.media_message.security) == (0.3, 0.8) for c in g.cells)


def test_scenario3_grid():
    g = scenario3_grid(1)
    assert len(g.cells) == 33
    assert {c.tolerance for c in g.cells} == {0.2, 0.5, 0.8}
    assert all(abs(c.tv_fraction + c.wise_fraction - 1) < 1e-12 for c in g.cells)
    assert all((c.expert_message.welfare, c.expert_message.security) == (0.8, 0.3) for c in g.cells)
    assert all(c.role_counts()[2] == 0 for c in g.cells)


def test_scenario4_grid():
    g = scenario4_grid(1)
    assert len(g.cells) == 24
    assert all(c.role_counts()[2] == 30 for c in g.cells)
    assert all(abs(c.white_fraction - 0.3) < 1e-12 for c in g.cells)
    for tol in (0.2, 0.5, 0.8):
        assert sum(c.tolerance == tol for c in g.cells) == 8
    last = [c for c in g.cells if c.tv_fraction == 0.7]
    assert all(c.wise_fraction == 0 for c in last)


@pytest.mark.parametrize("make", [scenario1_grid, scenario2_grid, scenario3_grid, scenario4_grid])
def test_grid_construction_pure(make):
    assert make(42) == make(42)
    assert make(42) != make(43)


def test_cross_battery_cells_coincide():
    s1, s2, s3 = scenario1_grid(9), scenario2_grid(9), scenario3_grid(9)
    for tol in (0.2, 0.5, 0.8):
        a = next(c for c in s2.cells if c.tv_fraction == 1.0 and c.tolerance == tol)
        b = next(c for c in s3.cells if c.tv_fraction == 1.0 and c.tolerance == tol)
        assert a == b
    no_media = [c for c in s2.cells if c.tv_fraction == 0.0]
    assert sorted(no_media, key=lambda c: c.tolerance) == list(s1.cells)


def test_sweep_parallel_matches_serial():
    grid = shrink(scenario4_grid(3))
    serial, parallel = run_sweep(grid, 1), run_sweep(grid, 3)
    assert len(serial) == len(parallel) == 24
    for a, b in zip(serial.cells, parallel.cells):
        assert a.config == b.config
        assert a.aggregated.identical(b.aggregated)
        assert all(x.identical(y) for x, y in zip(a.replications, b.replications))


def test_sweep_aggregate_consistency():
    result = run_sweep(shrink(scenario1_grid(5)))
    for cell in result.cells:
        assert len(cell.replications) == 2
        assert cell.aggregated.identical(aggregate(cell.replications))


def test_empty_grid():
    assert len(run_sweep(SweepGrid("empty", ()))) == 0


def test_cell_failure_names_cell(monkeypatch):
    grid = shrink(scenario1_grid(5))
    real = sc.run_replication

    def flaky(config, index):
        if config.tolerance == 0.3:
            raise RuntimeError("boom")
        return real(config, index)

    monkeypatch.setattr(sc, "run_replication", flaky)
    with pytest.raises(CellFailure) as err:
        run_sweep(grid)
    assert err.value.index == 2


def test_find():
    result = run_sweep(shrink(scenario3_grid(1), turns=1, reps=1))
    cell = result.find(tv_fraction=0.3, tolerance=0.5)
    assert cell.config.wise_fraction == pytest.approx(0.7)
    with pytest.raises(KeyError):
        result.find(tolerance=0.33)


def test_mixed_grid_rejected():
    a, b = scenario1_grid(0).cells[:2]
    with pytest.raises(ValueError):
        SweepGrid("bad", (a, replace(b, turns=3)))


@pytest.mark.slow
def test_scenario1_performance_budget():
    start = time.perf_counter()
    result = run_sweep(scenario1_grid(0))
    assert len(result) == 9
    assert time.perf_counter() - start < 60
