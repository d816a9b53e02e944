"""The four experiment batteries as sweep grids, and a deterministic sweep runner."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

from mediagossip.dynamics import Message
from mediagossip.engine import ScenarioConfig, TimeSeries, aggregate, derive_seed, round_half_up, run_replication

log = logging.getLogger(__name__)

MEDIA_MESSAGE = Message(welfare=0.3, security=0.8)
EXPERT_MESSAGE = Message(welfare=0.8, security=0.3)
N_AGENTS = 100
TURNS = 100
REPLICATIONS = 10
TOLERANCE_STEPS = tuple(i / 10 for i in range(1, 10))
TABLE_TOLERANCES = (0.2, 0.5, 0.8)


@dataclass(frozen=True)
class SweepGrid:
    name: str
    cells: tuple[ScenarioConfig, ...]

    def __post_init__(self) -> None:
        if self.cells:
            shared = {(c.n_agents, c.turns, c.replications) for c in self.cells}
            if len(shared) != 1:
                raise ValueError("all cells must share n_agents, turns and replications")


@dataclass(frozen=True)
class CellResult:
    config: ScenarioConfig
    aggregated: TimeSeries
    replications: tuple[TimeSeries, ...]


@dataclass(frozen=True)
class ResultSet:
    name: str
    cells: tuple[CellResult, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.cells)

    def find(self, **params: float) -> CellResult:
        """First cell whose config matches every given field (floats compared to 1e-9)."""
        for cell in self.cells:
            if all(abs(getattr(cell.config, k) - v) < 1e-9 for k, v in params.items()):
                return cell
        raise KeyError(params)


class CellFailure(RuntimeError):
    def __init__(self, grid: str, index: int, cause: BaseException):
        super().__init__(f"{grid} cell {index} failed: {cause!r}")
        self.index = index


def cell_seed(base_seed: int, tv_fraction: float, wise_fraction: float, tolerance: float) -> int:
    """Seed for one cell, keyed by its swept parameters in whole percent.

    Cells with equal population split and tolerance get equal seeds across
    batteries, so e.g. the no-media column of battery 2 replays battery 1.
    """
    key = (
        round_half_up(tv_fraction * 100) * 1_000_000
        + round_half_up(wise_fraction * 100) * 1_000
        + round_half_up(tolerance * 100)
    )
    return derive_seed(base_seed, key)


def _cell(base_seed: int, tv: float, wise: float, tolerance: float) -> ScenarioConfig:
    return ScenarioConfig(
        n_agents=N_AGENTS,
        tv_fraction=tv,
        wise_fraction=wise,
        tolerance=tolerance,
        media_message=MEDIA_MESSAGE,
        expert_message=EXPERT_MESSAGE,
        turns=TURNS,
        replications=REPLICATIONS,
        base_seed=cell_seed(base_seed, tv, wise, tolerance),
    )


def scenario1_grid(base_seed: int) -> SweepGrid:
    """Gossip only: no media, no experts, tolerance 0.1..0.9."""
    return SweepGrid("scenario1", tuple(_cell(base_seed, 0.0, 0.0, t) for t in TOLERANCE_STEPS))


def scenario2_grid(base_seed: int) -> SweepGrid:
    """Media reach 0%..100% crossed with tolerance 0.1..0.9."""
    cells = tuple(
        _cell(base_seed, tv / 10, 0.0, t) for t in TOLERANCE_STEPS for tv in range(11)
    )
    return SweepGrid("scenario2", cells)


def scenario3_grid(base_seed: int) -> SweepGrid:
    """Media and experts split the whole population."""
    cells = tuple(
        _cell(base_seed, tv / 10, (10 - tv) / 10, t) for t in TABLE_TOLERANCES for tv in range(11)
    )
    return SweepGrid("scenario3", cells)


def scenario4_grid(base_seed: int) -> SweepGrid:
    """Media and experts split 70%; the remaining 30% hears neither."""
    cells = tuple(
        _cell(base_seed, tv / 10, (7 - tv) / 10, t) for t in TABLE_TOLERANCES for tv in range(8)
    )
    return SweepGrid("scenario4", cells)


GRIDS: dict[int, Callable[[int], SweepGrid]] = {
    1: scenario1_grid,
    2: scenario2_grid,
    3: scenario3_grid,
    4: scenario4_grid,
}


def _run_task(task: tuple[int, ScenarioConfig, int]) -> tuple[int, int, TimeSeries]:
    index, config, rep = task
    return index, rep, run_replication(config, rep)


def run_sweep(grid: SweepGrid, max_parallel: int = 1) -> ResultSet:
    """Run every replication of every cell.

    Work is fanned out over up to ``max_parallel`` processes; results are
    reassembled by (cell, replication) index so the output never depends on it.
    """
    if max_parallel < 1:
        raise ValueError("max_parallel must be positive")
    tasks = [(i, cfg, r) for i, cfg in enumerate(grid.cells) for r in range(cfg.replications)]
    slots: list[list[TimeSeries | None]] = [[None] * cfg.replications for cfg in grid.cells]

    def collect(results) -> None:
        current = None
        try:
            for current in tasks:
                i, r, ts = next(results)
                slots[i][r] = ts
        except StopIteration:  # pragma: no cover
            raise RuntimeError("worker pool returned too few results")
        except Exception as exc:
            index = current[0] if current else -1
            raise CellFailure(grid.name, index, exc) from exc

    if max_parallel == 1 or len(tasks) <= 1:
        collect(map(_run_task, tasks))
    else:
        with ProcessPoolExecutor(max_workers=max_parallel) as pool:
            collect(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * max_parallel))))

    cells = []
    for cfg, reps in zip(grid.cells, slots):
        series = tuple(reps)  # type: ignore[arg-type]
        cells.append(CellResult(cfg, aggregate(series), series))
    log.debug("sweep %s finished: %d cells", grid.name, len(cells))
    return ResultSet(grid.name, tuple(cells))


def run_config(config: ScenarioConfig, name: str = "run", max_parallel: int = 1) -> ResultSet:
    return run_sweep(SweepGrid(name, (config,)), max_parallel)

