import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mediagossip.graph import (
    Graph,
    GraphError,
    GraphParams,
    InsufficientTailError,
    degree_exponent_estimate,
    format_edge_list,
    generate_scale_free,
    neighbors,
)


def construction_edge_count(n, m):
    core = m + 1
    return core * (core - 1) // 2 + (n - core) * m


def count_edges(g):
    # independent of Graph.edge_count: distinct unordered pairs
    return len({frozenset((u, v)) for u in range(g.node_count) for v in g.adjacency[u]})


def test_minimal_tree_case():
    g = generate_scale_free(GraphParams(4, 1, seed=3))
    assert count_edges(g) == 3
    assert g.is_connected()


def test_edge_count_n1000():
    # 3-node core (3 edges) plus 997 attached nodes with 2 edges each
    g = generate_scale_free(GraphParams(1000, 2, seed=11))
    assert construction_edge_count(1000, 2) == 1997
    assert count_edges(g) == 1997 == g.edge_count


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 120), st.integers(1, 6), st.integers(0, 2**64 - 1))
def test_structure_invariants(n, m, seed):
    m = min(m, n - 1)
    g = generate_scale_free(GraphParams(n, m, seed))
    assert count_edges(g) == construction_edge_count(n, m)
    for u in range(n):
        assert u not in g.adjacency[u]
        assert len(set(g.adjacency[u])) == len(g.adjacency[u])
        for v in g.adjacency[u]:
            assert u in g.adjacency[v]
    assert g.is_connected()


def test_deterministic():
    a = generate_scale_free(GraphParams(500, 2, seed=99))
    b = generate_scale_free(GraphParams(500, 2, seed=99))
    c = generate_scale_free(GraphParams(500, 2, seed=100))
    assert a == b
    assert a != c


@pytest.mark.parametrize("n,m", [(0, 1), (3, 3), (5, 7), (5, 0)])
def test_invalid_params(n, m):
    with pytest.raises(GraphError):
        generate_scale_free(GraphParams(n, m, 0))


def test_neighbors_path(path3):
    assert set(neighbors(path3, 1)) == {0, 2}
    assert set(neighbors(path3, 0)) == {1}
    with pytest.raises(GraphError):
        neighbors(path3, 3)


def test_neighbors_never_self():
    g = generate_scale_free(GraphParams(300, 3, seed=1))
    assert all(v not in neighbors(g, v) for v in range(g.node_count))


def test_exponent_constant_degrees():
    expected = 1 + 1 / math.log(2 / 1.5)
    assert expected == pytest.approx(4.476, abs=1e-3)
    assert degree_exponent_estimate([2] * 50, 2) == pytest.approx(expected, rel=1e-12)


def test_exponent_recovers_synthetic_power_law():
    # discrete power law: continuous Pareto above k_min - 0.5, rounded to nearest integer
    rng = np.random.default_rng(2024)
    k_min = 5
    x = (k_min - 0.5) * (1 - rng.random(100_000)) ** (-1 / (3.0 - 1))
    ks = np.floor(x + 0.5)
    assert 2.9 <= degree_exponent_estimate(ks, k_min) <= 3.1


def test_exponent_insufficient_tail():
    with pytest.raises(InsufficientTailError):
        degree_exponent_estimate([1] * 100 + [6] * 9, 5)
    g = generate_scale_free(GraphParams(4, 1, 0))
    with pytest.raises(InsufficientTailError):
        degree_exponent_estimate(g, 1)


def test_exponent_ba_large():
    hits = sum(
        2.5 <= degree_exponent_estimate(generate_scale_free(GraphParams(10_000, 2, seed)), 5) <= 3.5
        for seed in range(10)
    )
    assert hits >= 9


def test_edge_list_format(path3):
    assert format_edge_list(path3) == "0 1\n1 2\n"
    g = generate_scale_free(GraphParams(50, 2, seed=4))
    lines = format_edge_list(g).splitlines()
    pairs = [tuple(map(int, line.split())) for line in lines]
    assert pairs == sorted(pairs)
    assert all(u < v for u, v in pairs)
    assert len(pairs) == g.edge_count


def test_from_edges_rejects_self_loop():
    with pytest.raises(GraphError):
        Graph.from_edges(2, [(1, 1)])
