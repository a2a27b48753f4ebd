import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ftconsensus.graph import (
    Graph,
    GraphError,
    build_graph,
    is_connected,
    min_positive_weight,
    neighbors,
    six_agent_graph,
)

from conftest import SIX_AGENT_MATRIX


def test_single_edge():
    g = build_graph(2, [(0, 1, 1.0)])
    assert g.weights.tolist() == [[0.0, 1.0], [1.0, 0.0]]


def test_six_agent_edges_reproduce_matrix():
    pairs = [(1, 2), (1, 5), (1, 6), (2, 3), (2, 5), (3, 4)]
    g = build_graph(6, [(i - 1, j - 1, 1.0) for i, j in pairs])
    assert g.weights.tolist() == SIX_AGENT_MATRIX
    assert six_agent_graph() == g


@pytest.mark.parametrize(
    "n, entries, fragment",
    [
        (3, [(0, 0, 1.0)], "self-loop"),
        (3, [(0, 1, 1.0), (1, 0, 2.0)], "duplicate"),
        (3, [(0, 1, 0.0)], "positive"),
        (3, [(0, 1, -1.0)], "positive"),
        (3, [(0, 3, 1.0)], "out of range"),
        (0, [], "positive integer"),
    ],
)
def test_build_graph_rejects(n, entries, fragment):
    with pytest.raises(GraphError, match=fragment):
        build_graph(n, entries)


def test_matrix_input_validated():
    with pytest.raises(GraphError, match=r"\(0, 1\)"):
        Graph([[0, 1], [2, 0]])
    with pytest.raises(GraphError, match="self-loop"):
        Graph([[1, 0], [0, 0]])
    with pytest.raises(GraphError, match="negative"):
        Graph([[0, -1], [-1, 0]])


def test_graph_is_immutable(six_graph):
    with pytest.raises(ValueError):
        six_graph.weights[0, 1] = 5.0


def test_connectivity(six_graph):
    assert is_connected(six_graph)
    assert not is_connected(build_graph(2, []))
    assert is_connected(build_graph(1, []))
    assert not is_connected(build_graph(4, [(0, 1, 1.0), (2, 3, 1.0)]))


def test_min_positive_weight(six_graph):
    assert min_positive_weight(six_graph) == 1.0
    assert min_positive_weight(build_graph(3, [(0, 1, 0.5), (1, 2, 2.0)])) == 0.5
    with pytest.raises(GraphError):
        min_positive_weight(build_graph(3, []))


def test_neighbors(six_graph):
    # node 4 and node 1 in the 1-indexed numbering
    assert neighbors(six_graph, 3) == [(2, 1.0)]
    assert neighbors(six_graph, 0) == [(1, 1.0), (4, 1.0), (5, 1.0)]
    assert neighbors(build_graph(3, []), 1) == []
    with pytest.raises(GraphError):
        neighbors(six_graph, 6)


weighted_edges = st.integers(1, 8).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(
            st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.floats(0.01, 10.0)),
            max_size=20,
        ),
    )
)


def _dedupe(n, raw):
    seen, edges = set(), []
    for i, j, w in raw:
        key = (min(i, j), max(i, j))
        if i != j and key not in seen:
            seen.add(key)
            edges.append((i, j, w))
    return edges


def _reachable_all(n, edges):
    # transitive closure by repeated relaxation
    reach = np.eye(n, dtype=bool)
    for i, j, _ in edges:
        reach[i, j] = reach[j, i] = True
    for k, i, j in itertools.product(range(n), repeat=3):
        reach[i, j] |= reach[i, k] and reach[k, j]
    return bool(reach[0].all())


@settings(max_examples=200, deadline=None)
@given(weighted_edges, st.randoms(use_true_random=False))
def test_graph_properties(case, rnd):
    n, raw = case
    edges = _dedupe(n, raw)
    g = build_graph(n, edges)
    w = g.weights
    assert np.array_equal(w, w.T)
    assert not np.any(np.diag(w))
    for i in range(n):
        for j, a in neighbors(g, i):
            assert (i, a) in neighbors(g, j)

    expected = _reachable_all(n, edges)
    assert is_connected(g) == expected
    perm = list(range(n))
    rnd.shuffle(perm)
    relabeled = build_graph(n, [(perm[i], perm[j], a) for i, j, a in edges])
    assert is_connected(relabeled) == expected
