"""Simulation driver: population setup, turn execution, replications, aggregation.

A turn has two phases. In the broadcast phase every TeleViewer applies the
gated media update and every WiseAgent the ungated expert update. In the
gossip phase agents are visited in a fresh random order; each one pulls a
single random neighbour's current opinions through the gated peer update.
Only the receiver changes.

Seeding: every replication draws from generators seeded by
:func:`derive_seed`, a SplitMix64-based mix of ``(base_seed, replication)``.
The result depends only on the config, never on scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from mediagossip.dynamics import Agent, Message, OpinionPair, Role, bcm_update_scalar
from mediagossip.graph import Graph, GraphParams, generate_scale_free

MASK64 = (1 << 64) - 1

# sub-stream tags mixed into a replication seed
_GRAPH_STREAM = 0
_INIT_STREAM = 1
_STEP_STREAM = 2

ROLE_PREFIX = {Role.TELEVIEWER: "tv", Role.WISE_AGENT: "wa", Role.WHITE_ZONE: "wz"}
STAT_COLUMNS = (
    "mean_welfare",
    "mean_security",
    "tv_welfare",
    "tv_security",
    "wa_welfare",
    "wa_security",
    "wz_welfare",
    "wz_security",
)


class ConfigError(ValueError):
    """Invalid scenario configuration; ``key`` names the offending field."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(seed: int, index: int) -> int:
    """``splitmix64(splitmix64(seed) XOR index)`` on 64-bit words."""
    return splitmix64(splitmix64(seed & MASK64) ^ (index & MASK64))


def round_half_up(x: float) -> int:
    # guard against 100 * 0.7 == 70.00000000000001 style noise
    return math.floor(round(x, 9) + 0.5)


@dataclass(frozen=True)
class ScenarioConfig:
    n_agents: int = 100
    tv_fraction: float = 0.0
    wise_fraction: float = 0.0
    tolerance: float = 0.5
    convergence: float = 0.5
    media_message: Message = Message(0.3, 0.8)
    expert_message: Message = Message(0.8, 0.3)
    turns: int = 100
    replications: int = 10
    base_seed: int = 0
    m_attach: int = 2
    exchanges_per_turn: int = 1

    def __post_init__(self) -> None:
        for key in ("n_agents", "turns", "replications", "base_seed", "m_attach", "exchanges_per_turn"):
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise ConfigError(key, f"must be an integer, got {value!r}")
        if self.n_agents < 1:
            raise ConfigError("n_agents", "must be positive")
        for key in ("tv_fraction", "wise_fraction", "tolerance"):
            if not 0.0 <= getattr(self, key) <= 1.0:
                raise ConfigError(key, f"must lie in [0, 1], got {getattr(self, key)!r}")
        if self.tv_fraction + self.wise_fraction > 1.0 + 1e-9:
            raise ConfigError("wise_fraction", "tv_fraction + wise_fraction must not exceed 1")
        if not 0.0 < self.convergence <= 0.5:
            raise ConfigError("convergence", f"must lie in (0, 0.5], got {self.convergence!r}")
        if self.turns < 0:
            raise ConfigError("turns", "must be non-negative")
        if self.replications < 1:
            raise ConfigError("replications", "must be at least 1")
        if not 0 <= self.base_seed <= MASK64:
            raise ConfigError("base_seed", "must be an unsigned 64-bit integer")
        if self.m_attach < 1:
            raise ConfigError("m_attach", "must be positive")
        if self.m_attach >= self.n_agents:
            raise ConfigError("m_attach", f"must be smaller than n_agents ({self.n_agents})")
        if self.exchanges_per_turn < 1:
            raise ConfigError("exchanges_per_turn", "must be at least 1")

    @property
    def white_fraction(self) -> float:
        return max(0.0, 1.0 - self.tv_fraction - self.wise_fraction)

    @property
    def graph(self) -> GraphParams:
        return GraphParams(self.n_agents, self.m_attach, self.base_seed)

    def role_counts(self) -> tuple[int, int, int]:
        n_tv = min(round_half_up(self.n_agents * self.tv_fraction), self.n_agents)
        n_wa = min(round_half_up(self.n_agents * self.wise_fraction), self.n_agents - n_tv)
        return n_tv, n_wa, self.n_agents - n_tv - n_wa


@dataclass
class SimulationState:
    """Population on a graph. Opinions are stored column-wise, indexed by node id."""

    graph: Graph
    roles: list[Role]
    welfare: list[float]
    security: list[float]
    turn: int = 0

    def __post_init__(self) -> None:
        n = self.graph.node_count
        if not (len(self.roles) == len(self.welfare) == len(self.security) == n):
            raise ValueError("roles and opinions must cover every node exactly once")

    @classmethod
    def from_agents(cls, graph: Graph, agents: Sequence[Agent], turn: int = 0) -> "SimulationState":
        ordered = sorted(agents, key=lambda a: a.id)
        if [a.id for a in ordered] != list(range(graph.node_count)):
            raise ValueError("agent ids must be exactly 0..n-1")
        return cls(
            graph,
            [a.role for a in ordered],
            [a.opinions.welfare for a in ordered],
            [a.opinions.security for a in ordered],
            turn,
        )

    @property
    def agents(self) -> list[Agent]:
        return [
            Agent(i, r, OpinionPair(w, s))
            for i, (r, w, s) in enumerate(zip(self.roles, self.welfare, self.security))
        ]

    def copy(self) -> "SimulationState":
        return SimulationState(self.graph, list(self.roles), list(self.welfare), list(self.security), self.turn)


@dataclass(frozen=True)
class PopulationMeans:
    welfare: float
    security: float
    by_role: dict[Role, tuple[float, float]] = field(default_factory=dict)
    counts: dict[Role, int] = field(default_factory=dict)


@dataclass(frozen=True)
class TimeSeries:
    """Per-turn means; ``columns`` maps a CSV stat name to an array of length turns + 1.

    Role columns are absent when that role has no members.
    """

    columns: dict[str, np.ndarray]

    def __len__(self) -> int:
        return len(self.columns["mean_welfare"])

    @property
    def welfare(self) -> np.ndarray:
        return self.columns["mean_welfare"]

    @property
    def security(self) -> np.ndarray:
        return self.columns["mean_security"]

    def final(self, column: str = "mean_welfare") -> float:
        return float(self.columns[column][-1])

    def identical(self, other: "TimeSeries") -> bool:
        return self.columns.keys() == other.columns.keys() and all(
            np.array_equal(v, other.columns[k]) for k, v in self.columns.items()
        )


def init_state(config: ScenarioConfig, seed: int) -> SimulationState:
    graph = generate_scale_free(replace(config.graph, seed=derive_seed(seed, _GRAPH_STREAM)))
    rng = np.random.default_rng(derive_seed(seed, _INIT_STREAM))
    n = config.n_agents
    opinions = rng.random((n, 2))
    order = rng.permutation(n)
    n_tv, n_wa, _ = config.role_counts()
    roles = [Role.WHITE_ZONE] * n
    for rank, node in enumerate(order.tolist()):
        if rank < n_tv:
            roles[node] = Role.TELEVIEWER
        elif rank < n_tv + n_wa:
            roles[node] = Role.WISE_AGENT
    return SimulationState(graph, roles, opinions[:, 0].tolist(), opinions[:, 1].tolist())


def step(state: SimulationState, config: ScenarioConfig, rng: np.random.Generator) -> SimulationState:
    """Advance one turn; returns a new state and leaves ``state`` untouched."""
    nxt = state.copy()
    w, s = nxt.welfare, nxt.security
    t, m = config.tolerance, config.convergence
    media, expert = config.media_message, config.expert_message

    for i, role in enumerate(nxt.roles):
        if role is Role.TELEVIEWER:
            w[i] = bcm_update_scalar(w[i], media.welfare, t, m)
            s[i] = bcm_update_scalar(s[i], media.security, t, m)
        elif role is Role.WISE_AGENT:
            w[i] = w[i] + m * (expert.welfare - w[i])
            s[i] = s[i] + m * (expert.security - s[i])

    adjacency = nxt.graph.adjacency
    n = nxt.graph.node_count
    for _ in range(config.exchanges_per_turn):
        order = rng.permutation(n).tolist()
        picks = rng.random(n).tolist()
        for receiver, u in zip(order, picks):
            nbrs = adjacency[receiver]
            if not nbrs:
                continue
            sender = nbrs[int(u * len(nbrs))]
            w[receiver] = bcm_update_scalar(w[receiver], w[sender], t, m)
            s[receiver] = bcm_update_scalar(s[receiver], s[sender], t, m)

    nxt.turn += 1
    return nxt


def population_means(state: SimulationState) -> PopulationMeans:
    n = len(state.roles)
    if n == 0:
        raise ValueError("empty population")
    groups: dict[Role, tuple[list[float], list[float]]] = {}
    for role, w, s in zip(state.roles, state.welfare, state.security):
        gw, gs = groups.setdefault(role, ([], []))
        gw.append(w)
        gs.append(s)
    by_role = {
        role: (math.fsum(gw) / len(gw), math.fsum(gs) / len(gs)) for role, (gw, gs) in groups.items()
    }
    counts = {role: len(gw) for role, (gw, _) in groups.items()}
    return PopulationMeans(math.fsum(state.welfare) / n, math.fsum(state.security) / n, by_role, counts)


def _record(means: PopulationMeans, rows: dict[str, list[float]]) -> None:
    rows["mean_welfare"].append(means.welfare)
    rows["mean_security"].append(means.security)
    for role, (w, s) in means.by_role.items():
        prefix = ROLE_PREFIX[role]
        rows[f"{prefix}_welfare"].append(w)
        rows[f"{prefix}_security"].append(s)


def replication_seed(config: ScenarioConfig, replication_index: int) -> int:
    return derive_seed(config.base_seed, replication_index)


def run_replication(config: ScenarioConfig, replication_index: int) -> TimeSeries:
    if not 0 <= replication_index < config.replications:
        raise ValueError(f"replication index {replication_index} outside 0..{config.replications - 1}")
    seed = replication_seed(config, replication_index)
    state = init_state(config, seed)
    rng = np.random.default_rng(derive_seed(seed, _STEP_STREAM))
    rows: dict[str, list[float]] = {k: [] for k in STAT_COLUMNS}
    _record(population_means(state), rows)
    for _ in range(config.turns):
        state = step(state, config, rng)
        _record(population_means(state), rows)
    return TimeSeries({k: np.asarray(v, dtype=np.float64) for k, v in rows.items() if v})


def aggregate(series: Sequence[TimeSeries]) -> TimeSeries:
    """Pointwise mean. Uses exactly rounded sums, so the result ignores input order."""
    if not series:
        raise ValueError("nothing to aggregate")
    length = len(series[0])
    keys = series[0].columns.keys()
    for ts in series[1:]:
        if len(ts) != length:
            raise ValueError(f"length mismatch: {len(ts)} != {length}")
        if ts.columns.keys() != keys:
            raise ValueError("series disagree on which roles are populated")
    k = len(series)
    out = {}
    for key in keys:
        stacked = np.stack([ts.columns[key] for ts in series])
        out[key] = np.array([math.fsum(col) / k for col in stacked.T.tolist()], dtype=np.float64)
    return TimeSeries(out)
