"""Command-line interface.

    mediagossip run --config PATH [--out DIR] [--seed N] [--jobs K]
    mediagossip scenario --id {1,2,3,4} [--out DIR] [--seed N] [--jobs K]
    mediagossip sweep --config PATH --param NAME --values V1,V2,... [--out DIR] [--seed N] [--jobs K]
    mediagossip net-stats --n N --m M [--seed N] [--kmin K] [--edges PATH]
    mediagossip plot --csv PATH --out PATH

Exit status: 0 on success, 2 on usage or configuration errors, 1 on I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections import defaultdict
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from mediagossip import __version__
from mediagossip.engine import ConfigError, ScenarioConfig, derive_seed
from mediagossip.graph import GraphError, GraphParams, InsufficientTailError, degree_exponent_estimate, generate_scale_free, write_edge_list
from mediagossip.reporting import (
    ConfigParseError,
    emit_plot,
    parse_config,
    provenance_line,
    read_timeseries_csv,
    summarize,
    timeseries_lines,
    write_summary_json,
    write_timeseries_csv,
)
from mediagossip.scenarios import GRIDS, ResultSet, SweepGrid, run_sweep

log = logging.getLogger("mediagossip")

SWEEPABLE = ("tolerance", "tv_fraction", "wise_fraction", "convergence")
DEFAULT_SEED = 0


class UsageError(Exception):
    pass


def _load_config(path: str, seed: int | None) -> ScenarioConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    try:
        config = parse_config(text)
        if seed is not None:
            config = replace(config, base_seed=seed)
    except (ConfigParseError, ConfigError) as exc:
        raise UsageError(f"{path}: {exc}") from exc
    return config


def _write_outputs(result: ResultSet, out: Path, seed: int, per_cell: bool) -> None:
    out.mkdir(parents=True, exist_ok=True)
    prov = provenance_line(seed, (c.config for c in result.cells))
    (out / "provenance.txt").write_text(prov + "\n", encoding="utf-8")
    write_timeseries_csv(result, out / "timeseries.csv", prov)
    write_summary_json(summarize(result), out / "summary.json")
    if per_cell:
        cells_dir = out / "cells"
        cells_dir.mkdir(exist_ok=True)
        for i, cell in enumerate(result.cells):
            write_timeseries_csv(ResultSet(result.name, (cell,)), cells_dir / f"cell_{i:03d}.csv", prov)


def _final_means_by_tolerance(result: ResultSet) -> dict[float, list]:
    groups: dict[float, list] = defaultdict(list)
    for cell in result.cells:
        groups[cell.config.tolerance].append(cell)
    return groups


def _plot_scenario(result: ResultSet, scenario_id: int, out: Path, prov: str) -> list[Path]:
    written = []
    for tol, cells in sorted(_final_means_by_tolerance(result).items()):
        path = out / f"tolerance_{tol:.1f}.svg"
        if scenario_id == 1:
            series = timeseries_lines("population", cells[0].aggregated)
            emit_plot(series, path, f"{result.name}, tolerance {tol:.1f}", "turn", prov)
        else:
            xs = [c.config.tv_fraction for c in cells]
            series = [
                ("welfare", list(zip(xs, (c.aggregated.final("mean_welfare") for c in cells)))),
                ("security", list(zip(xs, (c.aggregated.final("mean_security") for c in cells)))),
            ]
            emit_plot(series, path, f"{result.name}, tolerance {tol:.1f}", "televiewer fraction", prov)
        written.append(path)
    return written


def cmd_run(args: argparse.Namespace) -> int:
    config = _load_config(args.config, args.seed)
    out = Path(args.out) if args.out else Path("results") / f"{Path(args.config).stem}-{config.base_seed}"
    result = run_sweep(SweepGrid("run", (config,)), args.jobs)
    _write_outputs(result, out, config.base_seed, per_cell=False)
    prov = provenance_line(config.base_seed, [config])
    emit_plot(timeseries_lines("population", result.cells[0].aggregated), out / "means.svg", "population means", "turn", prov)
    row = summarize(result)[0]
    print(f"welfare: {row.final_mean_welfare:.6f}")
    print(f"security: {row.final_mean_security:.6f}")
    print(f"output: {out}")
    return 0


def cmd_scenario(args: argparse.Namespace) -> int:
    seed = DEFAULT_SEED if args.seed is None else args.seed
    grid = GRIDS[args.id](seed)
    out = Path(args.out) if args.out else Path("results") / f"scenario{args.id}-{seed}"
    result = run_sweep(grid, args.jobs)
    _write_outputs(result, out, seed, per_cell=True)
    _plot_scenario(result, args.id, out, provenance_line(seed, grid.cells))
    print(f"cells: {len(result)}")
    print(f"output: {out}")
    return 0


def _parse_values(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"--values: {exc}") from exc
    if not values:
        raise UsageError("--values: need at least one value")
    return values


def cmd_sweep(args: argparse.Namespace) -> int:
    base = _load_config(args.config, args.seed)
    values = _parse_values(args.values)
    try:
        cells = tuple(
            replace(base, **{args.param: v}, base_seed=derive_seed(base.base_seed, i)) for i, v in enumerate(values)
        )
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc
    out = Path(args.out) if args.out else Path("results") / f"sweep-{args.param}-{base.base_seed}"
    result = run_sweep(SweepGrid(f"sweep_{args.param}", cells), args.jobs)
    _write_outputs(result, out, base.base_seed, per_cell=True)
    series = [
        ("welfare", [(v, c.aggregated.final("mean_welfare")) for v, c in zip(values, result.cells)]),
        ("security", [(v, c.aggregated.final("mean_security")) for v, c in zip(values, result.cells)]),
    ]
    emit_plot(series, out / "final_means.svg", result.name, args.param, provenance_line(base.base_seed, cells))
    print(f"cells: {len(result)}")
    print(f"output: {out}")
    return 0


def cmd_net_stats(args: argparse.Namespace) -> int:
    seed = DEFAULT_SEED if args.seed is None else args.seed
    try:
        g = generate_scale_free(GraphParams(args.n, args.m, seed))
    except GraphError as exc:
        raise UsageError(str(exc)) from exc
    deg = g.degrees()
    print(f"nodes: {g.node_count}")
    print(f"edges: {g.edge_count}")
    print(f"min degree: {int(deg.min())}")
    print(f"max degree: {int(deg.max())}")
    print(f"mean degree: {float(deg.mean()):.4f}")
    try:
        print(f"tail exponent (k_min={args.kmin}): {degree_exponent_estimate(g, args.kmin):.4f}")
    except InsufficientTailError:
        print(f"tail exponent (k_min={args.kmin}): n/a")
    if args.edges:
        write_edge_list(g, args.edges)
    return 0


def cmd_plot(args: argparse.Namespace) -> int:
    try:
        rows = read_timeseries_csv(args.csv)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    by_cell: dict[str, list[dict[str, str]]] = defaultdict(list)
    for row in rows:
        by_cell[row["cell"]].append(row)
    series = []
    for cell, cell_rows in by_cell.items():
        tag = f"cell {cell} t={float(cell_rows[0]['tolerance']):.1f} tv={float(cell_rows[0]['tv_fraction']):.1f}"
        series.append((f"{tag} W", [(int(r["turn"]), float(r["mean_welfare"])) for r in cell_rows]))
        series.append((f"{tag} S", [(int(r["turn"]), float(r["mean_security"])) for r in cell_rows]))
    if not series:
        raise UsageError(f"{args.csv}: no data rows")
    emit_plot(series, args.out, Path(args.csv).name, "turn")
    return 0


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mediagossip", description="Opinion dynamics under media, experts and gossip.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=_positive, default=1)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("scenario", help="run one of the four experiment batteries")
    p.add_argument("--id", type=int, choices=sorted(GRIDS), required=True)
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=_positive, default=1)
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("sweep", help="sweep one parameter of a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--param", choices=SWEEPABLE, required=True)
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=_positive, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("net-stats", help="generate a network and print degree statistics")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--kmin", type=_positive, default=5)
    p.add_argument("--edges")
    p.set_defaults(func=cmd_net_stats)

    p = sub.add_parser("plot", help="chart a timeseries CSV as SVG")
    p.add_argument("--csv", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
