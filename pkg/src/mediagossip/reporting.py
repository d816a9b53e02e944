"""Config files, CSV/JSON result output, sweep summaries and SVG line charts.

Config format: UTF-8, one ``key=value`` per line, ``#`` starts a comment.
Every key is optional; missing keys take the defaults in ``CONFIG_DEFAULTS``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

from mediagossip import __version__
from mediagossip.dynamics import Message
from mediagossip.engine import STAT_COLUMNS, ConfigError, ScenarioConfig, TimeSeries
from mediagossip.scenarios import ResultSet

INT_KEYS = ("n_agents", "turns", "replications", "base_seed", "m_attach", "exchanges_per_turn")
FLOAT_KEYS = (
    "tv_fraction",
    "wise_fraction",
    "tolerance",
    "convergence",
    "media_welfare",
    "media_security",
    "expert_welfare",
    "expert_security",
)
CONFIG_KEYS = (
    "n_agents",
    "tv_fraction",
    "wise_fraction",
    "tolerance",
    "convergence",
    "media_welfare",
    "media_security",
    "expert_welfare",
    "expert_security",
    "turns",
    "replications",
    "base_seed",
    "m_attach",
)
OPTIONAL_KEYS = ("exchanges_per_turn",)
CONFIG_DEFAULTS: dict[str, int | float] = {
    "n_agents": 100,
    "tv_fraction": 0.0,
    "wise_fraction": 0.0,
    "tolerance": 0.5,
    "convergence": 0.5,
    "media_welfare": 0.3,
    "media_security": 0.8,
    "expert_welfare": 0.8,
    "expert_security": 0.3,
    "turns": 100,
    "replications": 10,
    "base_seed": 0,
    "m_attach": 2,
    "exchanges_per_turn": 1,
}

CSV_HEADER = ("scenario", "cell", "tolerance", "tv_fraction", "wise_fraction", "turn") + STAT_COLUMNS


class ConfigParseError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


def parse_config(text: str) -> ScenarioConfig:
    values: dict[str, int | float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(lineno, f"expected key=value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_DEFAULTS:
            raise ConfigParseError(lineno, f"unknown key {key!r}")
        if key in values:
            raise ConfigParseError(lineno, f"duplicate key {key!r}")
        try:
            values[key] = int(value) if key in INT_KEYS else float(value)
        except ValueError:
            raise ConfigParseError(lineno, f"bad value for {key}: {value!r}") from None
        if isinstance(values[key], float) and not math.isfinite(values[key]):
            raise ConfigParseError(lineno, f"non-finite value for {key}")
    v = {**CONFIG_DEFAULTS, **values}
    for prefix in ("media", "expert"):
        for dim in ("welfare", "security"):
            key = f"{prefix}_{dim}"
            if not 0.0 <= v[key] <= 1.0:
                raise ConfigError(key, f"must lie in [0, 1], got {v[key]!r}")
    return ScenarioConfig(
        n_agents=int(v["n_agents"]),
        tv_fraction=float(v["tv_fraction"]),
        wise_fraction=float(v["wise_fraction"]),
        tolerance=float(v["tolerance"]),
        convergence=float(v["convergence"]),
        media_message=Message(float(v["media_welfare"]), float(v["media_security"])),
        expert_message=Message(float(v["expert_welfare"]), float(v["expert_security"])),
        turns=int(v["turns"]),
        replications=int(v["replications"]),
        base_seed=int(v["base_seed"]),
        m_attach=int(v["m_attach"]),
        exchanges_per_turn=int(v["exchanges_per_turn"]),
    )


def serialize_config(config: ScenarioConfig) -> str:
    flat = {
        "n_agents": config.n_agents,
        "tv_fraction": config.tv_fraction,
        "wise_fraction": config.wise_fraction,
        "tolerance": config.tolerance,
        "convergence": config.convergence,
        "media_welfare": config.media_message.welfare,
        "media_security": config.media_message.security,
        "expert_welfare": config.expert_message.welfare,
        "expert_security": config.expert_message.security,
        "turns": config.turns,
        "replications": config.replications,
        "base_seed": config.base_seed,
        "m_attach": config.m_attach,
    }
    if config.exchanges_per_turn != 1:
        flat["exchanges_per_turn"] = config.exchanges_per_turn
    return "".join(f"{k}={v!r}\n" for k, v in flat.items())


def config_hash(configs: Iterable[ScenarioConfig]) -> str:
    h = hashlib.sha256()
    for cfg in configs:
        h.update(serialize_config(cfg).encode())
        h.update(b"\x00")
    return h.hexdigest()[:16]


def provenance_line(seed: int, configs: Iterable[ScenarioConfig]) -> str:
    return f"mediagossip {__version__} seed={seed} config_sha256={config_hash(configs)}"


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def format_timeseries_csv(result: ResultSet, provenance: str | None = None) -> str:
    buf = io.StringIO()
    if provenance:
        buf.write(f"# {provenance}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for index, cell in enumerate(result.cells):
        cfg, cols = cell.config, cell.aggregated.columns
        for turn in range(len(cell.aggregated)):
            stats = [_fmt(cols[k][turn]) if k in cols else "" for k in STAT_COLUMNS]
            writer.writerow(
                [result.name, index, _fmt(cfg.tolerance), _fmt(cfg.tv_fraction), _fmt(cfg.wise_fraction), turn, *stats]
            )
    return buf.getvalue()


def write_timeseries_csv(result: ResultSet, path: str | Path, provenance: str | None = None) -> None:
    """Write aggregated per-turn means of every cell; an optional ``# provenance`` line goes first."""
    Path(path).write_text(format_timeseries_csv(result, provenance), encoding="utf-8")


def read_timeseries_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, encoding="utf-8", newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(lines)
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"{path}: unexpected CSV header {reader.fieldnames}")
    return list(reader)


@dataclass(frozen=True)
class SummaryRow:
    scenario: str
    tolerance: float
    tv_fraction: float
    wise_fraction: float
    white_fraction: float
    final_mean_welfare: float
    final_mean_security: float
    inversion: bool


def summarize(result: ResultSet) -> list[SummaryRow]:
    rows = []
    for cell in result.cells:
        cfg = cell.config
        welfare = cell.aggregated.final("mean_welfare")
        security = cell.aggregated.final("mean_security")
        rows.append(
            SummaryRow(
                scenario=result.name,
                tolerance=cfg.tolerance,
                tv_fraction=cfg.tv_fraction,
                wise_fraction=cfg.wise_fraction,
                white_fraction=round(cfg.white_fraction, 12),
                final_mean_welfare=welfare,
                final_mean_security=security,
                inversion=welfare > security,
            )
        )
    return rows


def smallest_inverting_fraction(rows: Sequence[SummaryRow], tolerance: float) -> float | None:
    """Lowest wise_fraction at ``tolerance`` whose final welfare mean beats security."""
    hits = [r.wise_fraction for r in rows if abs(r.tolerance - tolerance) < 1e-9 and r.inversion]
    return min(hits) if hits else None


def format_summary_json(rows: Sequence[SummaryRow]) -> str:
    return json.dumps([asdict(r) for r in rows], indent=2) + "\n"


def write_summary_json(rows: Sequence[SummaryRow], path: str | Path) -> None:
    Path(path).write_text(format_summary_json(rows), encoding="utf-8")


# --- SVG charts -------------------------------------------------------------

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#17becf")
WIDTH, HEIGHT = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 60, 170, 40, 50

Series = tuple[str, Sequence[float] | Sequence[tuple[float, float]]]


def _points(values: Sequence) -> list[tuple[float, float]]:
    if values and isinstance(values[0], (tuple, list)):
        return [(float(x), float(y)) for x, y in values]
    return [(float(i), float(y)) for i, y in enumerate(values)]


def timeseries_lines(label: str, ts: TimeSeries) -> list[Series]:
    return [(f"{label} welfare", ts.welfare.tolist()), (f"{label} security", ts.security.tolist())]


def render_svg(
    series: Sequence[Series],
    title: str = "",
    x_label: str = "turn",
    y_label: str = "opinion mean",
    provenance: str | None = None,
) -> str:
    if not series:
        raise ValueError("nothing to plot")
    pts = [_points(values) for _, values in series]
    if any(not p for p in pts):
        raise ValueError("every series needs at least one point")
    xs = [x for p in pts for x, _ in p]
    x0, x1 = min(xs), max(xs)
    if x1 == x0:
        x1 = x0 + 1.0
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def sx(x: float) -> float:
        return LEFT + (x - x0) / (x1 - x0) * pw

    def sy(y: float) -> float:
        return TOP + (1.0 - min(1.0, max(0.0, y))) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if provenance:
        out.insert(1, f"<!-- {escape(provenance).replace('--', '- -')} -->")
    if title:
        out.append(f'<text x="{WIDTH / 2:.2f}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append(
        f'<g stroke="black" stroke-width="1"><line x1="{LEFT}" y1="{TOP + ph}" x2="{LEFT + pw}" y2="{TOP + ph}"/>'
        f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + ph}"/></g>'
    )
    for i in range(5):
        y = i / 4
        out.append(
            f'<line x1="{LEFT - 4}" y1="{sy(y):.2f}" x2="{LEFT}" y2="{sy(y):.2f}" stroke="black"/>'
            f'<text x="{LEFT - 8}" y="{sy(y) + 4:.2f}" text-anchor="end" font-size="11">{y:.2f}</text>'
        )
        x = x0 + (x1 - x0) * i / 4
        out.append(
            f'<line x1="{sx(x):.2f}" y1="{TOP + ph}" x2="{sx(x):.2f}" y2="{TOP + ph + 4}" stroke="black"/>'
            f'<text x="{sx(x):.2f}" y="{TOP + ph + 18}" text-anchor="middle" font-size="11">{x:g}</text>'
        )
    out.append(f'<text x="{LEFT + pw / 2:.2f}" y="{HEIGHT - 10}" text-anchor="middle" font-size="12">{escape(x_label)}</text>')
    out.append(
        f'<text x="16" y="{TOP + ph / 2:.2f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {TOP + ph / 2:.2f})">{escape(y_label)}</text>'
    )
    for i, ((label, _), p) in enumerate(zip(series, pts)):
        color = PALETTE[i % len(PALETTE)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in p)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        ly = TOP + 14 * i
        out.append(
            f'<g class="legend"><line x1="{WIDTH - RIGHT + 10}" y1="{ly:.2f}" x2="{WIDTH - RIGHT + 30}" y2="{ly:.2f}" '
            f'stroke="{color}" stroke-width="2"/><text x="{WIDTH - RIGHT + 35}" y="{ly + 4:.2f}" font-size="11">'
            f"{escape(label)}</text></g>"
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(
    series: Sequence[Series],
    path: str | Path,
    title: str = "",
    x_label: str = "turn",
    provenance: str | None = None,
) -> None:
    """Write a line chart; each series is ``(label, ys)`` or ``(label, [(x, y), ...])``."""
    Path(path).write_text(render_svg(series, title, x_label, provenance=provenance), encoding="utf-8")
