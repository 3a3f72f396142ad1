from __future__ import annotations

import json

import pytest
from hypothesis import given, strategies as st

from fusionwha.graph import (
    DimensionGraph,
    FusionData,
    GeneratorError,
    all_small_digraphs,
    dimension_graph_from_fusion,
    enumerate_paths,
    fusion_power_multiplicities,
    graph_from_pairs,
    path_multiplicities,
    sl2_dimension_graph,
    sl2_fusion_data,
)

FIBONACCI = FusionData([[[1, 0], [0, 1]], [[0, 1], [1, 1]]])


def _edges(g):
    return sorted((e.source, e.target) for e in g.edges)


def test_level_three_graph():
    g = sl2_dimension_graph(3)
    assert list(g.vertices) == [0, 1]
    assert _edges(g) == [(0, 1), (1, 0)]
    assert [p.vertices for p in g.paths(2)] == [(0, 1, 0), (1, 0, 1)]


@pytest.mark.parametrize("r", range(3, 9))
def test_sl2_graph_shape(r):
    g = sl2_dimension_graph(r)
    assert g.num_vertices == r - 1
    assert len(g.edges) == 2 * (r - 2)
    assert set(_edges(g)) == {(j, j + 1) for j in range(r - 2)} | {(j + 1, j) for j in range(r - 2)}


def test_level_five_graph_counts():
    g = sl2_dimension_graph(5)
    assert (g.num_vertices, len(g.edges)) == (4, 6)


def test_level_two_rejected():
    with pytest.raises(ValueError):
        sl2_dimension_graph(2)


@pytest.mark.parametrize("r", range(3, 8))
def test_fusion_constructor_agrees(r):
    assert _edges(dimension_graph_from_fusion(sl2_fusion_data(r), 1)) == _edges(sl2_dimension_graph(r))


def test_unit_generator_rejected():
    with pytest.raises(GeneratorError) as err:
        dimension_graph_from_fusion(sl2_fusion_data(5), 0)
    assert err.value.clause == "no unit summand"


def test_non_generating_object_rejected():
    # V_2 only reaches even labels
    with pytest.raises(GeneratorError) as err:
        dimension_graph_from_fusion(sl2_fusion_data(6), 2)
    assert err.value.clause == "generates"


def test_multiplicity_rejected():
    N = [[[1, 0], [0, 1]], [[0, 1], [1, 2]]]
    with pytest.raises(GeneratorError) as err:
        dimension_graph_from_fusion(FusionData(N), 1)
    assert err.value.clause == "multiplicity free"


def test_fibonacci_graph():
    g = dimension_graph_from_fusion(FIBONACCI, 1)
    assert list(g.vertices) == [0, 1]
    assert _edges(g) == [(0, 1), (1, 0), (1, 1)]


def test_fusion_data_unit_validation():
    with pytest.raises(ValueError):
        FusionData([[[0, 1], [1, 0]], [[1, 0], [0, 1]]])


def test_paths_level_four_degree_two():
    g = sl2_dimension_graph(4)
    got = [p.vertices for p in enumerate_paths(g, 2)]
    assert got == [(0, 1, 0), (0, 1, 2), (1, 0, 1), (1, 2, 1), (2, 1, 0), (2, 1, 2)]


def test_level_three_long_paths():
    assert len(enumerate_paths(sl2_dimension_graph(3), 7)) == 2


def test_degree_zero_paths():
    g = graph_from_pairs(3, [(0, 1), (1, 1)])
    assert [p.vertices for p in g.paths(0)] == [(0,), (1,), (2,)]


@pytest.mark.parametrize("r", [5, 6, 9])
def test_tensor_power_multiplicities(r):
    g = sl2_dimension_graph(r)
    three = path_multiplicities(g, 3)
    assert {j: c for j, c in enumerate(three) if c} == {1: 2, 3: 1}
    four = path_multiplicities(g, 4)
    expect = {0: 2, 2: 3, 4: 1} if r >= 6 else {0: 2, 2: 3}
    assert {j: c for j, c in enumerate(four) if c} == expect


def test_degree_zero_multiplicities():
    assert path_multiplicities(sl2_dimension_graph(4), 0, start=1) == [0, 1, 0]


@pytest.mark.parametrize("r", range(3, 8))
def test_path_counts_match_fusion_powers(r):
    g = sl2_dimension_graph(r)
    f = sl2_fusion_data(r)
    for m in range(7):
        assert path_multiplicities(g, m) == fusion_power_multiplicities(f, 1, m)


@pytest.mark.parametrize("r", range(3, 8))
def test_adjacency_equals_fusion_matrix(r):
    g = sl2_dimension_graph(r)
    f = sl2_fusion_data(r)
    n = g.num_vertices
    adj = [[0] * n for _ in range(n)]
    for e in g.edges:
        adj[e.source][e.target] += 1
    assert adj == [[f.N[a][1][b] for b in range(n)] for a in range(n)]


def test_small_digraph_census():
    # loops allowed, up to isomorphism: 2, 10 and 104 graphs on 1, 2 and 3 vertices
    counts = {}
    for g in all_small_digraphs(3):
        counts[g.num_vertices] = counts.get(g.num_vertices, 0) + 1
    assert counts == {1: 2, 2: 10, 3: 104}


digraphs = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=8).map(
        lambda pairs: graph_from_pairs(n, pairs)
    )
)


@given(digraphs, st.integers(0, 4))
def test_path_enumeration_properties(g, m):
    ps = g.paths(m)
    assert ps == sorted(set(ps))
    for p in ps:
        assert p.length == m
        for i, e in enumerate(p.edges):
            edge = next(x for x in g.edges if x.id == e)
            assert (edge.target, edge.source) == (p.vertices[i], p.vertices[i + 1])
    # adjacency recursion on the per-target counts
    total = sum(path_multiplicities(g, m, start=v)[w] for v in g.vertices for w in g.vertices)
    assert total == len(ps)


@given(digraphs)
def test_graph_json_round_trip(g):
    data = json.loads(json.dumps(g.to_json()))
    assert DimensionGraph.from_json(data).to_json() == g.to_json()


def test_fusion_json_round_trip():
    f = sl2_fusion_data(5)
    assert FusionData.from_json(json.loads(json.dumps(f.to_json()))) == f
