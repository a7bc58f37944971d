"""Stationary distributions, stationary biases and mixing diagnostics.

The simple walk on a graph without self-loops or isolated vertices has the
degree-proportional stationary law pi(i) = d_i / sum_j d_j; the lazy walk
shares it, and on each connected component the lazy walk converges to the
per-component analogue. The non-backtracking edge chain is doubly
stochastic, so uniform-on-half-edges is stationary there.

Mixing is quantified by the worst-case total variation distance to the
stationary law over start states, tracked level by level. For graphs with
many states the worst case may be taken over a deterministic subsample of
starts (`starts_cap`), which is recorded in the profile.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .graph_core import Graph, analyze_components
from .kernels import DistVector, EdgeChain, KernelError, _require, bt_push, lazy_push
from .measures import EmpiricalMeasure

DEFAULT_EPS = (0.25, 0.01, 1e-4)

# beyond this many exact start states a subsample must be requested
MAX_EXACT_STATES = 4096


def pi_vertex(g: Graph) -> DistVector:
    """Degree-proportional stationary law of the simple / lazy walk."""
    if g.n == 0 or int(g.degrees.min()) == 0:
        raise KernelError("stationary law undefined: isolated vertex present")
    return DistVector("vertices", g.degrees_float / g.degrees_float.sum())


def pi_component(g: Graph) -> np.ndarray:
    """Per-vertex weights, degree-proportional within each component.

    The weights sum to 1 on every component (to the component count
    globally); this is the k -> infinity law of the lazy walk started in
    that component.
    """
    if int(g.degrees.min()) == 0:
        raise KernelError("stationary law undefined: isolated vertex present")
    info = analyze_components(g)
    comp_sums = np.asarray(info.degree_sums, dtype=np.float64)
    return g.degrees_float / comp_sums[info.component_id]


def stationary_bias(g: Graph, scope: str = "global") -> EmpiricalMeasure:
    """Empirical distribution of stationary friendship biases.

    Global scope: bias_i = sum_j pi(j) d_j - d_i, i.e. the ratio of the
    second to the first degree moment minus d_i. Component scope replaces
    the moment ratio by that of the component containing i, which is the
    long-level limit of the lazy walk on disconnected graphs.
    """
    degf = g.degrees_float
    if scope == "global":
        pi_vertex(g)  # surfaces the isolated-vertex error
        ratio = float(np.dot(degf, degf) / degf.sum())
        deltas = ratio - degf
    elif scope == "component":
        if int(g.degrees.min()) == 0:
            raise KernelError("stationary law undefined: isolated vertex present")
        info = analyze_components(g)
        comp = info.component_id
        d2 = np.bincount(comp, weights=degf * degf)
        d1 = np.asarray(info.degree_sums, dtype=np.float64)
        deltas = (d2 / d1)[comp] - degf
    else:
        raise ValueError(f"unknown scope {scope!r}")
    m = EmpiricalMeasure.from_values(deltas, meta={"n": g.n, "scope": scope,
                                                   "kind": "stationary"})
    m.meta["mean_bias"] = m.mean()
    return m


def tv_distance(a: DistVector, b: DistVector) -> float:
    """Total variation distance between two laws on the same support."""
    if a.kind != b.kind or a.weights.size != b.weights.size:
        raise ValueError("total variation needs matching supports")
    return 0.5 * float(np.abs(a.weights - b.weights).sum())


def stationarity_residual(g: Graph, kind: str, delta: float = 0.5) -> float:
    """TV distance between the stationary law and its one-step push."""
    if kind == "nb":
        chain = EdgeChain(g)
        u = np.full(g.num_half_edges, 1.0 / g.num_half_edges)
        return 0.5 * float(np.abs(chain.push(u) - u).sum())
    pi = pi_vertex(g)
    pushed = bt_push(g, pi) if kind == "bt" else lazy_push(g, pi, delta)
    return tv_distance(pushed, pi)


@dataclass
class MixingProfile:
    """Worst-case TV distance to stationarity per level, with threshold
    crossings. For the nb kind `D_values` lives on the edge chain and
    `D_vertex_values` carries the projected vertex-level curve."""

    kind: str
    k_values: list[int]
    D_values: list[float]
    eps_list: tuple
    crossings: dict
    flagged_nonergodic: bool
    states: int
    starts_used: int
    delta: float | None = None
    D_vertex_values: list[float] | None = None
    meta: dict = field(default_factory=dict)

    def first_crossing(self, eps: float):
        return self.crossings.get(eps)

    def to_csv(self, n=None, seed=None) -> str:
        buf = io.StringIO()
        buf.write("k,D,kind,n,seed\n")
        n_txt = "" if n is None else str(n)
        s_txt = "" if seed is None else str(seed)
        for k, dv in zip(self.k_values, self.D_values):
            buf.write(f"{k},{dv!r},{self.kind},{n_txt},{s_txt}\n")
        return buf.getvalue()


def _pick_starts(n_states: int, starts_cap) -> np.ndarray:
    if starts_cap is None or starts_cap >= n_states:
        if starts_cap is None and n_states > MAX_EXACT_STATES:
            raise ValueError(
                f"{n_states} start states exceeds the exact limit "
                f"{MAX_EXACT_STATES}; pass starts_cap for a subsampled profile")
        return np.arange(n_states, dtype=np.int64)
    return np.unique(np.round(np.linspace(0, n_states - 1,
                                          int(starts_cap))).astype(np.int64))


def _batch_bt_push(g: Graph, W: np.ndarray, degf: np.ndarray) -> np.ndarray:
    Z = W / degf[None, :]
    return np.add.reduceat(Z[:, g.tails[g.in_edges]], g.in_start[:-1], axis=1)


def _batch_edge_push(g: Graph, W: np.ndarray, fanout: np.ndarray,
                     twin: np.ndarray) -> np.ndarray:
    Z = W / fanout[None, :]
    S = np.add.reduceat(Z[:, g.in_edges], g.in_start[:-1], axis=1)
    return S[:, g.tails] - Z[:, twin]


def _batch_project(g: Graph, W: np.ndarray) -> np.ndarray:
    return np.add.reduceat(W[:, g.in_edges], g.in_start[:-1], axis=1)


def mixing_profile(g: Graph, kind: str, k_max: int,
                   eps_list=DEFAULT_EPS, delta: float = 0.5,
                   starts_cap=None) -> MixingProfile:
    """Worst-case TV distance to stationarity for k = 1..k_max.

    bt expects a connected non-bipartite graph and lazy a connected one for
    the distances to vanish; a chain that never gets below 0.99 by k_max is
    flagged in the profile rather than raised. For nb, distances are
    measured on the directed-edge chain (start = each half-edge) against
    uniform, and additionally projected to vertices against the
    degree-proportional law.
    """
    if kind not in ("bt", "nb", "lazy"):
        raise ValueError(f"unknown exploration kind {kind!r}")
    _require(g, kind)
    eps_list = tuple(eps_list)
    degf = g.degrees_float
    ks: list[int] = []
    Ds: list[float] = []
    D_vertex: list[float] | None = None

    if kind == "nb":
        n_states = g.num_half_edges
        chain = EdgeChain(g)
        starts = _pick_starts(n_states, starts_cap)
        W = np.zeros((starts.size, n_states))
        W[np.arange(starts.size), starts] = 1.0
        uniform = 1.0 / n_states
        v_starts = _pick_starts(g.n, starts_cap)
        V = np.zeros((v_starts.size, n_states))
        for row, s in enumerate(v_starts):
            V[row] = chain.lift(int(s))
        pi = degf / degf.sum()
        D_vertex = []
        for k in range(1, k_max + 1):
            W = _batch_edge_push(g, W, chain._fanout, chain._twin)
            Ds.append(0.5 * float(np.abs(W - uniform).sum(axis=1).max()))
            # k-step vertex law projects the lift after k-1 edge pushes
            D_vertex.append(0.5 * float(
                np.abs(_batch_project(g, V) - pi).sum(axis=1).max()))
            if k < k_max:
                V = _batch_edge_push(g, V, chain._fanout, chain._twin)
            ks.append(k)
        starts_used = int(starts.size)
        n_states_out = n_states
    else:
        n_states = g.n
        starts = _pick_starts(n_states, starts_cap)
        W = np.zeros((starts.size, n_states))
        W[np.arange(starts.size), starts] = 1.0
        pi = degf / degf.sum()
        for k in range(1, k_max + 1):
            stepped = _batch_bt_push(g, W, degf)
            W = stepped if kind == "bt" else delta * W + (1.0 - delta) * stepped
            Ds.append(0.5 * float(np.abs(W - pi).sum(axis=1).max()))
            ks.append(k)
        starts_used = int(starts.size)
        n_states_out = n_states

    crossings = {}
    for eps in eps_list:
        hit = next((k for k, dv in zip(ks, Ds) if dv <= eps), None)
        crossings[eps] = hit
    flagged = bool(min(Ds) >= 0.99) if Ds else True
    return MixingProfile(kind=kind, k_values=ks, D_values=Ds,
                         eps_list=eps_list, crossings=crossings,
                         flagged_nonergodic=flagged, states=n_states_out,
                         starts_used=starts_used,
                         delta=delta if kind == "lazy" else None,
                         D_vertex_values=D_vertex)
