import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from friendbias import (analyze_components, build_graph, drop_isolated,
                        induced_subgraph, largest_component, load_edge_list,
                        save_edge_list, validate_for_exploration)
from friendbias.graph_core import GraphConstructionError


def test_path3_degrees(path3):
    assert path3.degrees.tolist() == [1, 2, 1]


def test_self_loop_adds_two_to_degree():
    g = build_graph(1, [(0, 0)])
    assert g.degrees.tolist() == [2]
    assert g.num_half_edges == 2


def test_fig_a_degrees(fig_a):
    assert fig_a.degrees.tolist() == [2, 4, 2, 2, 2]


def test_out_of_range_edge_rejected():
    with pytest.raises(GraphConstructionError):
        build_graph(3, [(0, 3)])
    with pytest.raises(GraphConstructionError):
        build_graph(0, [])


def test_half_edge_layout():
    g = build_graph(3, [(2, 1), (1, 0)])
    # edge t gives half-edges 2t (u->v) and 2t+1 (v->u)
    assert g.tails.tolist() == [2, 1, 1, 0]
    assert g.heads.tolist() == [1, 2, 0, 1]


def test_adjacency_multiplicities():
    g = build_graph(3, [(0, 1), (0, 1), (1, 2), (2, 2)])
    assert g.adjacency[0] == [(1, 2)]
    assert g.adjacency[1] == [(0, 2), (2, 1)]
    assert g.adjacency[2] == [(1, 1), (2, 1)]
    assert g.degrees.tolist() == [2, 3, 3]


edge_lists = st.integers(min_value=1, max_value=9).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)),
                 max_size=20)))


@given(edge_lists)
def test_handshake_and_twin_involution(data):
    n, edges = data
    g = build_graph(n, edges)
    assert int(g.degrees.sum()) == g.num_half_edges == 2 * g.num_edges
    for e in range(g.num_half_edges):
        assert g.twin(g.twin(e)) == e
        assert g.heads[e] == g.tails[g.twin(e)]
    # degrees[i] = sum of multiplicities + 2 * self-loops
    for i, row in enumerate(g.adjacency):
        expect = sum(m for j, m in row if j != i) \
            + 2 * sum(m for j, m in row if j == i)
        assert g.degrees[i] == expect


@given(edge_lists, st.randoms(use_true_random=False))
@settings(max_examples=60)
def test_component_flags_invariant_under_relabeling(data, rnd):
    n, edges = data
    perm = list(range(n))
    rnd.shuffle(perm)
    info1 = analyze_components(build_graph(n, edges))
    info2 = analyze_components(
        build_graph(n, [(perm[u], perm[v]) for u, v in edges]))
    def flags(info):
        return sorted(zip(info.sizes, info.is_bipartite, info.is_regular,
                          info.is_biregular_bipartite, info.degree_sums))
    assert flags(info1) == flags(info2)


def test_components_cycle4(cycle4):
    info = analyze_components(cycle4)
    assert info.n_components == 1
    assert info.is_bipartite == [True]
    assert info.is_regular == [True]


def test_components_star(star3):
    info = analyze_components(star3)
    assert info.is_bipartite == [True]
    assert info.is_regular == [False]
    assert info.is_biregular_bipartite == [True]


def test_components_fig_a(fig_a):
    info = analyze_components(fig_a)
    assert info.n_components == 1
    assert info.is_bipartite == [False]   # contains a triangle
    assert info.is_regular == [False]


def test_self_loop_breaks_bipartiteness():
    info = analyze_components(build_graph(2, [(0, 1), (1, 1)]))
    assert info.is_bipartite == [False]


def test_analyze_components_idempotent(fig_a):
    a = analyze_components(fig_a)
    b = analyze_components(fig_a)
    assert a.component_id.tolist() == b.component_id.tolist()
    assert a.is_bipartite == b.is_bipartite


def test_validate_nb(path3, complete4):
    rep = validate_for_exploration(path3, "nb")
    assert not rep.ok and sorted(rep.violations) == [0, 2]
    rep = validate_for_exploration(complete4, "nb")
    assert rep.ok and rep.min_degree_at_least_3


def test_validate_bt_self_loop():
    g = build_graph(2, [(0, 1), (0, 0)])
    rep = validate_for_exploration(g, "bt")
    assert not rep.ok and 0 in rep.violations
    rep = validate_for_exploration(g, "lazy")
    assert not rep.ok


def test_validate_bt_isolated():
    g = build_graph(3, [(0, 1)])
    rep = validate_for_exploration(g, "bt")
    assert not rep.ok and rep.violations == [2]


def test_validate_unknown_kind(path3):
    with pytest.raises(ValueError):
        validate_for_exploration(path3, "teleporting")


def test_edge_list_round_trip(tmp_path, fig_a):
    path = tmp_path / "g.edges"
    save_edge_list(fig_a, path)
    g2 = load_edge_list(path)
    assert g2.n == fig_a.n
    assert g2.edge_endpoints == fig_a.edge_endpoints
    save_edge_list(g2, tmp_path / "g2.edges")
    assert (tmp_path / "g.edges").read_bytes() == (tmp_path / "g2.edges").read_bytes()


def test_largest_component_and_drop_isolated():
    g = build_graph(7, [(0, 1), (1, 2), (2, 0), (3, 4)])  # vertices 5, 6 isolated
    giant, old = largest_component(g)
    assert giant.n == 3 and old.tolist() == [0, 1, 2]
    kept, old = drop_isolated(g)
    assert kept.n == 5 and old.tolist() == [0, 1, 2, 3, 4]
    sub, old = induced_subgraph(g, [3, 4, 5])
    assert sub.n == 3 and sub.edge_endpoints == [(0, 1)]
    with pytest.raises(ValueError):
        induced_subgraph(g, [])


def test_edgeless_graph_round_trip(tmp_path):
    g = build_graph(3, [])
    path = tmp_path / "empty.edges"
    save_edge_list(g, path)
    g2 = load_edge_list(path)
    assert g2.n == 3 and g2.num_edges == 0
