"""Exact k-level exploration kernels and the friendship biases they induce.

Three explorations are supported on a fixed graph:

* ``bt``   -- simple random walk: each step uniform over the half-edges
  leaving the current vertex (graph must have no self-loops and no isolated
  vertices).
* ``nb``   -- non-backtracking walk, realised as a Markov chain on directed
  half-edges: from half-edge e the next half-edge is uniform over those
  leaving head(e), excluding twin(e). On a simple graph this is the usual
  "never revisit the vertex you just left" rule; on a multigraph only the
  crossed half-edge itself is forbidden. Requires minimum degree 2.
* ``lazy`` -- stays put with probability delta, otherwise steps as ``bt``.

The k-level friendship bias of vertex i is the expected degree of the vertex
occupied after k steps started at i, minus the degree of i. All kernel
arithmetic is 64-bit floating point; push operations never renormalise
(normalisation drift is an invariant under test) -- only explicit DistVector
constructors may rescale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import generators, measures
from .graph_core import (ExplorationPreconditionError, Graph,
                         validate_for_exploration)

WEIGHT_TOL = 1e-12


class KernelError(ExplorationPreconditionError):
    """A kernel was applied to a graph that cannot support it."""


@dataclass
class DistVector:
    """Probability vector over vertices or directed half-edges."""

    kind: str                 # "vertices" | "edges"
    weights: np.ndarray

    def __post_init__(self):
        if self.kind not in ("vertices", "edges"):
            raise ValueError(f"unknown support kind {self.kind!r}")
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if np.any(self.weights < 0):
            raise ValueError("negative probability weight")
        total = float(self.weights.sum())
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1")

    @classmethod
    def point_mass(cls, kind: str, size: int, index: int) -> "DistVector":
        w = np.zeros(size)
        w[index] = 1.0
        return cls(kind, w)

    @classmethod
    def uniform(cls, kind: str, size: int) -> "DistVector":
        return cls(kind, np.full(size, 1.0 / size))

    @classmethod
    def normalized(cls, kind: str, weights) -> "DistVector":
        w = np.asarray(weights, dtype=np.float64)
        return cls(kind, w / w.sum())


def _require(g: Graph, kind: str) -> None:
    report = validate_for_exploration(g, "bt" if kind == "lazy" else kind)
    if not report.ok:
        raise KernelError(
            f"graph not valid for {kind!r} exploration: {report.message}")


def _segment_sums(g: Graph, per_edge: np.ndarray) -> np.ndarray:
    """Sum per-half-edge values over the out-edges of each vertex.

    Requires minimum degree >= 1 (reduceat misreads empty segments); all
    kernel preconditions guarantee this.
    """
    return np.add.reduceat(per_edge[g.out_edges], g.out_start[:-1])


class EdgeChain:
    """Transition rule on directed half-edges: from e, uniform over the
    half-edges leaving head(e) except twin(e). Rows sum to 1, and columns
    sum to 1 too (the chain is doubly stochastic) whenever every degree
    is >= 2, so uniform-on-half-edges is stationary."""

    def __init__(self, g: Graph):
        _require(g, "nb")
        self.g = g
        self._fanout = g.degrees_float[g.heads] - 1.0   # choices leaving head(e)
        self._twin = np.arange(g.num_half_edges, dtype=np.int64) ^ 1

    def lift(self, start: int) -> np.ndarray:
        """Uniform distribution over the half-edges leaving `start`."""
        g = self.g
        w = np.zeros(g.num_half_edges)
        w[g.out_slice(start)] = 1.0 / g.degrees_float[start]
        return w

    def push(self, w: np.ndarray) -> np.ndarray:
        """One step of the distribution: w'[f] = sum_e w[e] P(e, f)."""
        g = self.g
        z = w / self._fanout
        s = np.bincount(g.heads, weights=z, minlength=g.n)
        return s[g.tails] - z[self._twin]

    def push_expectation(self, y: np.ndarray) -> np.ndarray:
        """One step of a per-edge observable: y'[e] = E[y(next edge) | e]."""
        g = self.g
        t = np.bincount(g.tails, weights=y, minlength=g.n)
        return (t[g.heads] - y[self._twin]) / self._fanout

    def project_vertices(self, w: np.ndarray) -> np.ndarray:
        """Push edge mass to head vertices."""
        return np.bincount(self.g.heads, weights=w, minlength=self.g.n)


def bt_push(g: Graph, d: DistVector) -> DistVector:
    """One simple-random-walk step of a vertex distribution.

    Mass at vertex i spreads as multiplicity/degree over the neighbours of
    i. Errors if the support touches an isolated vertex or the graph has
    self-loops.
    """
    if d.kind != "vertices" or d.weights.size != g.n:
        raise KernelError("distribution is not over the vertices of this graph")
    if g.has_self_loops():
        raise KernelError("graph not valid for 'bt' exploration: self-loops present")
    w = d.weights
    if np.any(w[g.degrees == 0] > 0):
        raise KernelError("support includes an isolated vertex")
    z = np.divide(w, g.degrees_float, out=np.zeros_like(w),
                  where=g.degrees > 0)
    nxt = np.bincount(g.heads, weights=z[g.tails], minlength=g.n)
    return DistVector("vertices", nxt)


def lazy_push(g: Graph, d: DistVector, delta: float) -> DistVector:
    """Lazy step: stay with probability delta, else take a `bt` step."""
    if not (0.0 < delta < 1.0):
        raise ValueError(f"laziness must lie in (0, 1), got {delta}")
    stepped = bt_push(g, d)
    return DistVector("vertices", delta * d.weights + (1.0 - delta) * stepped.weights)


def nb_k_step(g: Graph, start: int, k: int) -> DistVector:
    """Vertex distribution of the non-backtracking walk after k steps.

    k = 0 is the point mass at `start`; for k >= 1 the point mass is lifted
    uniformly onto the half-edges leaving `start`, the edge chain is applied
    k - 1 times, and the result is projected to head vertices.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if not (0 <= start < g.n):
        raise KernelError(f"start vertex {start} out of range")
    if k == 0:
        return DistVector.point_mass("vertices", g.n, start)
    chain = EdgeChain(g)
    w = chain.lift(start)
    for _ in range(k - 1):
        w = chain.push(w)
    return DistVector("vertices", chain.project_vertices(w))


def _k_step_dist(g: Graph, start: int, k: int, kind: str,
                 delta: float) -> DistVector:
    if kind == "nb":
        return nb_k_step(g, start, k)
    d = DistVector.point_mass("vertices", g.n, start)
    for _ in range(k):
        d = bt_push(g, d) if kind == "bt" else lazy_push(g, d, delta)
    return d


def bias_k(g: Graph, i: int, k: int, kind: str, delta: float = 0.5) -> float:
    """k-level friendship bias of one vertex: E[deg after k steps] - deg(i)."""
    if kind not in ("bt", "nb", "lazy"):
        raise ValueError(f"unknown exploration kind {kind!r}")
    _require(g, kind)
    dist = _k_step_dist(g, i, k, kind, delta)
    return float(np.dot(dist.weights, g.degrees_float) - g.degrees_float[i])


def _bt_expect(g: Graph, v: np.ndarray, degf: np.ndarray) -> np.ndarray:
    """(P v)_i for the simple walk: mean of v over the out-neighbours of i."""
    return _segment_sums(g, v[g.heads]) / degf


def _bias_vector(g: Graph, k: int, kind: str, delta: float) -> np.ndarray:
    """All n biases at level k, via expectation vectors in O(k |E|).

    For bt/lazy this iterates the observable d under the vertex chain; for
    nb it iterates deg(head) under the edge chain and averages over the
    half-edges leaving each start vertex. At k = 1 the bt and nb paths
    perform bit-identical float operations, so the two biases agree exactly.
    """
    degf = g.degrees_float
    if k == 0:
        return np.zeros(g.n)
    if kind == "nb":
        chain = EdgeChain(g)
        y = degf[g.heads]
        for _ in range(k - 1):
            y = chain.push_expectation(y)
        return _segment_sums(g, y) / degf - degf
    v = degf
    for _ in range(k):
        stepped = _bt_expect(g, v, degf)
        v = stepped if kind == "bt" else delta * v + (1.0 - delta) * stepped
    return v - degf


def bias_all(g: Graph, k: int, kind: str, delta: float = 0.5,
             meta: dict | None = None) -> measures.EmpiricalMeasure:
    """Empirical distribution of the k-level biases over all vertices.

    The returned measure places mass 1/n on each vertex's bias; its mean is
    the average k-level bias and is stored in meta["mean_bias"].
    """
    if kind not in ("bt", "nb", "lazy"):
        raise ValueError(f"unknown exploration kind {kind!r}")
    _require(g, kind)
    deltas = _bias_vector(g, k, kind, delta)
    info = {"n": g.n, "k": k, "kind": kind}
    if kind == "lazy":
        info["delta"] = delta
    info.update(meta or {})
    m = measures.EmpiricalMeasure.from_values(deltas, meta=info)
    m.meta["mean_bias"] = m.mean()
    return m


def bias_profile(g: Graph, k_max: int, kind: str, delta: float = 0.5):
    """Yield (k, bias vector) for k = 1..k_max in one sweep (O(k_max |E|))."""
    if kind not in ("bt", "nb", "lazy"):
        raise ValueError(f"unknown exploration kind {kind!r}")
    _require(g, kind)
    degf = g.degrees_float
    if kind == "nb":
        chain = EdgeChain(g)
        y = degf[g.heads]
        for k in range(1, k_max + 1):
            yield k, _segment_sums(g, y) / degf - degf
            if k < k_max:
                y = chain.push_expectation(y)
        return
    v = degf
    for k in range(1, k_max + 1):
        stepped = _bt_expect(g, v, degf)
        v = stepped if kind == "bt" else delta * v + (1.0 - delta) * stepped
        yield k, v - degf


@dataclass
class AnnealedResult:
    """Average of per-replica bias distributions plus sampling error."""

    measure: measures.EmpiricalMeasure
    replica_means: list[float] = field(default_factory=list)

    @property
    def replicas(self) -> int:
        return len(self.replica_means)

    @property
    def mean_bias(self) -> float:
        return float(np.mean(self.replica_means))

    @property
    def sem_mean_bias(self) -> float:
        if len(self.replica_means) < 2:
            return 0.0
        return float(np.std(self.replica_means, ddof=1)
                     / np.sqrt(len(self.replica_means)))


def annealed_bias(spec: generators.GenSpec, k: int, kind: str,
                  replicas: int, delta: float = 0.5, erase: bool = False,
                  restrict_giant: bool = False) -> AnnealedResult:
    """Monte Carlo estimate of the expected bias distribution: the uniform
    mixture of quenched distributions over independent graph replicas.

    Replica r uses seed mix_seed(spec.seed, r). Failures carry the replica
    index in their message.
    """
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    values, weights, rep_means = [], [], []
    for r in range(replicas):
        try:
            g = generators.realize(spec, seed_override=generators.mix_seed(spec.seed, r),
                                   erase=erase, restrict_giant=restrict_giant)
            mu = bias_all(g, k, kind, delta=delta)
        except Exception as exc:
            raise type(exc)(f"replica {r}: {exc}") from exc
        values.append(mu.values)
        weights.append(mu.weights / replicas)
        rep_means.append(mu.mean())
    meta = {"k": k, "kind": kind, "replicas": replicas,
            "master_seed": spec.seed, "annealed": True}
    pooled = measures.EmpiricalMeasure.from_values(
        np.concatenate(values), np.concatenate(weights), meta=meta)
    result = AnnealedResult(measure=pooled, replica_means=rep_means)
    pooled.meta["mean_bias"] = result.mean_bias
    pooled.meta["sem_mean_bias"] = result.sem_mean_bias
    return result
