import numpy as np
import pytest

from friendbias import (DistVector, bias_all, build_graph, mixing_profile,
                        pi_component, pi_vertex, stationarity_residual,
                        stationary_bias, tv_distance, validate_for_exploration)
from friendbias.kernels import KernelError
from friendbias.measures import EmpiricalMeasure, levy_distance
from friendbias.oracle import small_graph_corpus
from friendbias.stationary import _pick_starts

from conftest import dense_transition


def test_pi_vertex_examples(path3, triangle, star3):
    assert np.allclose(pi_vertex(path3).weights, [0.25, 0.5, 0.25])
    assert np.allclose(pi_vertex(triangle).weights, [1 / 3] * 3)
    assert np.allclose(pi_vertex(star3).weights, [0.5, 1 / 6, 1 / 6, 1 / 6])


def test_pi_vertex_isolated_error():
    with pytest.raises(KernelError):
        pi_vertex(build_graph(3, [(0, 1)]))


def test_pi_component(path3):
    assert np.allclose(pi_component(path3), pi_vertex(path3).weights)
    two_triangles = build_graph(6, [(0, 1), (1, 2), (2, 0),
                                    (3, 4), (4, 5), (5, 3)])
    assert np.allclose(pi_component(two_triangles), [1 / 3] * 6)
    p3_k2 = build_graph(5, [(0, 1), (1, 2), (3, 4)])
    assert np.allclose(pi_component(p3_k2), [0.25, 0.5, 0.25, 0.5, 0.5])


def test_stationary_bias_regular(triangle):
    m = stationary_bias(triangle)
    assert m.values.tolist() == [0.0]


def test_stationary_bias_path3(path3):
    m = stationary_bias(path3)
    # moment ratio 6/4 gives biases (1/2, -1/2, 1/2)
    assert m.values.tolist() == [-0.5, 0.5]
    assert np.allclose(m.weights, [1 / 3, 2 / 3])


def test_stationary_bias_star(star3):
    m = stationary_bias(star3)
    assert m.values.tolist() == [-1.0, 1.0]
    assert np.allclose(m.weights, [0.25, 0.75])


def test_stationary_bias_component_scope():
    g = build_graph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    m_global = stationary_bias(g, scope="global")
    m_comp = stationary_bias(g, scope="component")
    assert m_comp.values.tolist() == [0.0]      # each triangle is regular
    assert m_global.values.tolist() == [0.0]    # identical degrees globally
    mixed = build_graph(5, [(0, 1), (1, 2), (3, 4)])
    m = stationary_bias(mixed, scope="component")
    # path component ratio 3/2, edge component ratio 1
    assert np.allclose(sorted(set(np.round(m.values, 12))), [-0.5, 0.0, 0.5])


def test_tv_distance_examples():
    a = DistVector("vertices", np.array([0.75, 0.25]))
    b = DistVector("vertices", np.array([0.25, 0.75]))
    assert tv_distance(a, a) == 0.0
    assert tv_distance(a, b) == pytest.approx(0.5)
    d0 = DistVector.point_mass("vertices", 2, 0)
    d1 = DistVector.point_mass("vertices", 2, 1)
    assert tv_distance(d0, d1) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        tv_distance(d0, DistVector.point_mass("vertices", 3, 0))


def test_stationarity_residuals():
    for name, g in small_graph_corpus().items():
        for kind in ("bt", "lazy", "nb"):
            if not validate_for_exploration(g, "bt" if kind == "lazy" else kind).ok:
                continue
            assert stationarity_residual(g, kind) <= 1e-12, (name, kind)


def test_stationary_weighted_mean_bias_vanishes():
    for name, g in small_graph_corpus().items():
        if int(g.degrees.min()) == 0:
            continue
        pi = g.degrees_float / g.degrees_float.sum()
        ratio = float(np.dot(g.degrees_float, g.degrees_float) / g.degrees_float.sum())
        assert abs(float(np.dot(pi, ratio - g.degrees_float))) <= 1e-10, name


def test_mixing_k4_level1(complete4):
    prof = mixing_profile(complete4, "bt", 5)
    assert prof.D_values[0] == pytest.approx(0.25)


def test_mixing_bipartite_path_never_crosses(path3):
    prof = mixing_profile(path3, "bt", 50, eps_list=(0.1,))
    assert prof.first_crossing(0.1) is None
    assert not prof.flagged_nonergodic       # TV plateaus at 1/2, not near 1
    assert min(prof.D_values) > 0.4


def test_mixing_lazy_path_crosses(path3):
    prof = mixing_profile(path3, "lazy", 400, eps_list=(0.01,), delta=0.5)
    k_star = prof.first_crossing(0.01)
    assert k_star is not None
    # oracle: explicit 3x3 lazy matrix powers
    P = dense_transition(path3)
    L = 0.5 * np.eye(3) + 0.5 * P
    pi = np.array([0.25, 0.5, 0.25])
    M = np.linalg.matrix_power(L, k_star)
    worst = 0.5 * np.abs(M - pi).sum(axis=1).max()
    assert worst <= 0.01
    M = np.linalg.matrix_power(L, k_star - 1)
    assert 0.5 * np.abs(M - pi).sum(axis=1).max() > 0.01


def test_mixing_lazy_monotone(fig_a):
    prof = mixing_profile(fig_a, "lazy", 200)
    diffs = np.diff(prof.D_values)
    assert diffs.max() <= 1e-12
    assert all(0.0 <= d <= 1.0 + 1e-12 for d in prof.D_values)


def test_mixing_nb_reports_both_levels():
    # triangles joined by a bridge: closed nb walks of lengths 3 and 8
    # coexist, so the edge chain is aperiodic and mixes
    g = build_graph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)])
    prof = mixing_profile(g, "nb", 300, eps_list=(0.01,))
    assert prof.D_vertex_values is not None
    assert prof.states == g.num_half_edges
    assert prof.first_crossing(0.01) is not None
    assert prof.D_vertex_values[-1] < 0.01


def test_mixing_nb_periodic_chain_flagged(fig_a):
    # two triangles sharing a vertex: every closed nb walk is a chain of
    # 3-step triangle loops, so the edge chain has period 3 and never mixes
    prof = mixing_profile(fig_a, "nb", 150, eps_list=(0.01,))
    assert prof.first_crossing(0.01) is None
    assert min(prof.D_values) > 0.3


def test_mixing_csv_round():
    g = build_graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    prof = mixing_profile(g, "bt", 3)
    text = prof.to_csv(n=4, seed=7)
    lines = text.strip().split("\n")
    assert lines[0] == "k,D,kind,n,seed"
    assert len(lines) == 4
    assert lines[1].split(",")[2] == "bt"


def test_mixing_profile_matches_dense_matrix_powers(fig_a):
    # the batched push machinery against explicit matrix powers
    P = dense_transition(fig_a)
    pi = fig_a.degrees_float / fig_a.degrees_float.sum()
    prof = mixing_profile(fig_a, "bt", 8)
    M = np.eye(fig_a.n)
    for k in range(1, 9):
        M = M @ P
        want = 0.5 * np.abs(M - pi).sum(axis=1).max()
        assert abs(prof.D_values[k - 1] - want) < 1e-12

    g = build_graph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)])
    from friendbias import EdgeChain
    chain = EdgeChain(g)
    m2 = g.num_half_edges
    E = np.zeros((m2, m2))
    for e in range(m2):
        row = np.zeros(m2)
        row[e] = 1.0
        E[e] = chain.push(row)
    prof = mixing_profile(g, "nb", 8)
    M = np.eye(m2)
    for k in range(1, 9):
        M = M @ E
        want = 0.5 * np.abs(M - 1.0 / m2).sum(axis=1).max()
        assert abs(prof.D_values[k - 1] - want) < 1e-12


def test_pick_starts_guard():
    assert _pick_starts(10, None).tolist() == list(range(10))
    sub = _pick_starts(1000, 16)
    assert len(sub) == 16 and sub[0] == 0 and sub[-1] == 999
    with pytest.raises(ValueError):
        _pick_starts(100000, None)


def test_levy_dominated_by_tv_past_crossing():
    """Past the 0.01 mixing crossing the Levy distance to the stationary
    bias law stays below twice the worst-case TV distance."""
    from friendbias import GenSpec, realize
    from friendbias.kernels import bias_profile
    g = realize(GenSpec(model="configuration", n=40,
                        degree_pmf={3: 0.5, 4: 0.5}, seed=31), erase=True)
    prof = mixing_profile(g, "bt", 300, eps_list=(0.01,))
    cross = prof.first_crossing(0.01)
    assert cross is not None
    limit = stationary_bias(g)
    for k, deltas in bias_profile(g, cross + 20, "bt"):
        if k < cross:
            continue
        mu_k = EmpiricalMeasure.from_values(deltas)
        assert levy_distance(mu_k, limit) <= 2 * prof.D_values[k - 1]


def test_long_level_convergence_past_crossing():
    """Once the chain is mixed to 1e-8, the level-k bias distribution sits
    within 1e-6 of the stationary one in Levy distance."""
    g = build_graph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)])
    limit = stationary_bias(g)
    for kind in ("bt", "nb", "lazy"):
        prof = mixing_profile(g, kind, 900, eps_list=(1e-8,))
        k_star = prof.first_crossing(1e-8)
        assert k_star is not None, kind
        mu = bias_all(g, k_star, kind)
        assert levy_distance(mu, limit) <= 1e-6, kind
