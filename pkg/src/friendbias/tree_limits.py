"""Galton-Watson machinery behind the limiting bias laws.

Locally tree-like graph families converge, seen from a uniform vertex, to a
branching-process tree in which the root's offspring count follows the
degree law p while every other vertex has offspring distributed as the
size-biased shift p*, where p*_k = (k+1) p_{k+1} / E[D]. Two limit laws for
the root bias arise:

* mu      -- the law of E[D^2]/E[D] - d_root, reached by non-backtracking
  exploration (and by either exploration after mixing);
* mu_star -- for subcritical p* the tree is almost surely finite, and the
  backtracking exploration equilibrates on it to the degree-moment ratio of
  the whole tree minus d_root.

A finite tree with at least one edge is bipartite, so the plain walk on it
is periodic; the equilibrium value is realised here through the lazy kernel
(delta = 1/2), which shares the degree-proportional stationary law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels, measures
from .graph_core import build_graph


@dataclass
class OffspringLaw:
    """Finite-support offspring pmf with derived moments."""

    ks: np.ndarray
    ps: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.ks = np.asarray(self.ks, dtype=np.int64)
        self.ps = np.asarray(self.ps, dtype=np.float64)
        if self.ks.size == 0 or self.ks.size != self.ps.size:
            raise ValueError("pmf needs matching nonempty support and weights")
        if np.any(self.ks < 0):
            raise ValueError("offspring counts must be nonnegative")
        if np.any(np.diff(self.ks) <= 0):
            raise ValueError("support must be strictly increasing")
        if np.any(self.ps < 0):
            raise ValueError("negative pmf entry")
        if abs(float(self.ps.sum()) - 1.0) > 1e-9:
            raise ValueError(f"pmf sums to {self.ps.sum()!r}, not 1")

    @classmethod
    def from_dict(cls, pmf: dict, meta=None) -> "OffspringLaw":
        items = sorted((int(k), float(v)) for k, v in pmf.items())
        ks = np.array([k for k, v in items if v > 0], dtype=np.int64)
        ps = np.array([v for _, v in items if v > 0])
        return cls(ks=ks, ps=ps, meta=dict(meta or {}))

    def to_dict(self) -> dict:
        return {str(int(k)): float(p) for k, p in zip(self.ks, self.ps)}

    @property
    def m1(self) -> float:
        return float(np.dot(self.ps, self.ks))

    @property
    def m2(self) -> float:
        return float(np.dot(self.ps, self.ks.astype(np.float64) ** 2))

    @property
    def variance(self) -> float:
        return self.m2 - self.m1 ** 2

    @property
    def min_k(self) -> int:
        return int(self.ks[0])

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.choice(self.ks, size=size, p=self.ps)


def size_bias(p: OffspringLaw) -> OffspringLaw:
    """Size-biased shift: p*_k = (k+1) p_{k+1} / E[D].

    This is the offspring law of every non-root vertex of the limit tree;
    its mean is E[D^2]/E[D] - 1.
    """
    m1 = p.m1
    if m1 <= 0:
        raise ValueError("size bias undefined: offspring mean is zero")
    keep = p.ks >= 1
    ks = p.ks[keep] - 1
    ps = p.ks[keep] * p.ps[keep] / m1
    return OffspringLaw(ks=ks, ps=ps, meta={"size_biased_from": p.to_dict()})


def truncated_poisson(lam: float, tail_mass: float = 1e-12) -> OffspringLaw:
    """Poisson(lam) truncated where the remaining tail drops below
    `tail_mass`, then renormalised; the cut point is kept in meta."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    probs = [math.exp(-lam)]
    cum = probs[0]
    k = 0
    while 1.0 - cum > tail_mass:
        k += 1
        probs.append(probs[-1] * lam / k)
        cum += probs[-1]
    ps = np.array(probs)
    ps /= ps.sum()
    return OffspringLaw(ks=np.arange(k + 1), ps=ps,
                        meta={"poisson_lam": lam, "truncated_at": k,
                              "tail_mass": tail_mass})


@dataclass
class TruncatedTree:
    """Offspring counts of every vertex down to a fixed depth.

    levels[l][i] is the offspring count of the i-th vertex (breadth-first)
    at depth l; level l has sum(levels[l-1]) vertices.
    """

    levels: list

    def __post_init__(self):
        self.levels = [np.asarray(lv, dtype=np.int64) for lv in self.levels]
        if not self.levels or self.levels[0].size != 1:
            raise ValueError("a truncated tree has exactly one root")
        for l in range(1, len(self.levels)):
            if self.levels[l].size != int(self.levels[l - 1].sum()):
                raise ValueError(f"level {l} has {self.levels[l].size} vertices, "
                                 f"expected {int(self.levels[l - 1].sum())}")

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def root_offspring(self) -> int:
        return int(self.levels[0][0])


def sample_truncated_gw(p: OffspringLaw, depth: int, seed: int,
                        mode: str = "unimodular") -> TruncatedTree:
    """Sample offspring counts level by level down to `depth`.

    unimodular: root ~ p, everyone else i.i.d. ~ p*. iid-root: every vertex
    (root included) i.i.d. ~ p.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if mode not in ("unimodular", "iid-root"):
        raise ValueError(f"unknown mode {mode!r}")
    rest = size_bias(p) if mode == "unimodular" else p
    rng = np.random.Generator(np.random.PCG64(seed))
    levels = [p.sample(rng, 1)]
    for _ in range(depth):
        count = int(levels[-1].sum())
        levels.append(rest.sample(rng, count) if count
                      else np.zeros(0, dtype=np.int64))
    return TruncatedTree(levels=levels)


def nb_bias_on_tree(t: TruncatedTree, k: int) -> float:
    """Exact k-level non-backtracking bias of the root.

    On a tree the walk only descends: the probability of reaching a given
    generation-k vertex is 1/(d_root * product of offspring counts along the
    interior of its path), and that vertex's degree is offspring + 1. Every
    vertex above generation k must have at least one offspring.
    """
    if not (1 <= k <= t.depth):
        raise ValueError(f"need 1 <= k <= depth={t.depth}, got {k}")
    for l in range(k):
        if t.levels[l].size == 0 or int(t.levels[l].min()) < 1:
            raise ValueError(f"walk undefined: vertex with no offspring at depth {l}")
    prob = np.array([1.0])
    for l in range(k):
        counts = t.levels[l]
        prob = np.repeat(prob / counts, counts)
    return float(np.dot(prob, t.levels[k] + 1.0) - t.root_offspring)


@dataclass
class FiniteTree:
    """A whole tree, stored as breadth-first offspring counts."""

    offspring: np.ndarray

    def __post_init__(self):
        self.offspring = np.asarray(self.offspring, dtype=np.int64)
        if self.offspring.size == 0:
            raise ValueError("empty tree")

    @property
    def num_vertices(self) -> int:
        return int(self.offspring.size)

    def degrees(self) -> np.ndarray:
        d = self.offspring + 1
        d[0] = self.offspring[0]
        return d

    def to_graph(self):
        """Parent-child edges with breadth-first vertex ids."""
        edges = []
        child = 1
        for parent, c in enumerate(self.offspring):
            for _ in range(int(c)):
                edges.append((parent, child))
                child += 1
        return build_graph(self.num_vertices, edges)


def sample_finite_gw(p: OffspringLaw, rng: np.random.Generator,
                     size_cap: int = 10 ** 6) -> FiniteTree | None:
    """One tree grown to extinction: root ~ p, other vertices ~ p*.

    Returns None when the vertex count would exceed `size_cap` (the caller
    counts that as a rejection).
    """
    pstar = size_bias(p)
    root = int(p.sample(rng, 1)[0])
    chunks = [np.array([root], dtype=np.int64)]
    total = 1
    frontier = root
    while frontier:
        total += frontier
        if total > size_cap:
            return None
        draws = pstar.sample(rng, frontier)
        chunks.append(draws)
        frontier = int(draws.sum())
    return FiniteTree(offspring=np.concatenate(chunks))


def stationary_tree_bias(t: FiniteTree) -> float:
    """Closed-form equilibrium bias of the root on a finite tree:
    sum(deg^2)/sum(deg) - d_root, with the one-vertex tree mapped to 0
    (empty ratio resolved as 0)."""
    d = t.degrees().astype(np.float64)
    total = float(d.sum())
    ratio = float(np.dot(d, d) / total) if total > 0 else 0.0
    return ratio - float(d[0])


def bt_bias_on_finite_tree(t: FiniteTree, k: int, delta: float = 0.5) -> float:
    """Root bias after k lazy steps on the finite tree.

    Trees with an edge are bipartite, so the plain walk oscillates and has
    no pointwise k -> infinity limit; the lazy walk shares the same
    stationary law and converges, realising the closed-form equilibrium.
    """
    if not (0.0 < delta < 1.0):
        raise ValueError(f"laziness must lie in (0, 1), got {delta}")
    if t.num_vertices == 1:
        return 0.0
    g = t.to_graph()
    degf = g.degrees_float
    v = degf
    for _ in range(k):
        v = delta * v + (1.0 - delta) * kernels._bt_expect(g, v, degf)
    return float(v[0] - degf[0])


def exact_mu(p: OffspringLaw, meta=None) -> measures.EmpiricalMeasure:
    """The limit law mu exactly: atoms E[D^2]/E[D] - k with weight p_k."""
    ratio = p.m2 / p.m1
    info = {"law": "mu", "pmf": p.to_dict(), "exact": True}
    info.update(meta or {})
    return measures.EmpiricalMeasure.from_values(
        ratio - p.ks.astype(np.float64), p.ps / p.ps.sum(), meta=info)


def sample_mu(p: OffspringLaw, n_samples: int, seed: int) -> measures.EmpiricalMeasure:
    """Monte Carlo draw of mu: emit E[D^2]/E[D] - D with D ~ p.

    The moment ratio is exact (from the pmf); only D is sampled. The mean
    tends to Var(D)/E[D], the limit value of the average bias.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = p.sample(rng, n_samples)
    vals = p.m2 / p.m1 - draws.astype(np.float64)
    return measures.EmpiricalMeasure.from_values(
        vals, meta={"law": "mu", "pmf": p.to_dict(), "n_samples": n_samples,
                    "seed": seed})


def sample_mu_star(p: OffspringLaw, n_samples: int, seed: int,
                   size_cap: int = 10 ** 6) -> measures.EmpiricalMeasure:
    """Monte Carlo draw of mu_star: grow trees to extinction and emit the
    equilibrium bias of each root.

    Requires E[p*] < 1 (otherwise trees survive forever with positive
    probability). Trees hitting `size_cap` are rejected, redrawn, and
    counted in meta["rejections"].
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    mean_star = size_bias(p).m1
    if not mean_star < 1.0:
        raise ValueError(f"mu_star needs a subcritical size-biased law; "
                         f"E[p*] = {mean_star!r} >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    vals = np.empty(n_samples)
    rejections = 0
    for i in range(n_samples):
        tree = sample_finite_gw(p, rng, size_cap=size_cap)
        while tree is None:
            rejections += 1
            if rejections > 1000 + n_samples:
                raise RuntimeError("mu_star sampling rejected too many trees; "
                                   "size cap too small for this law")
            tree = sample_finite_gw(p, rng, size_cap=size_cap)
        vals[i] = stationary_tree_bias(tree)
    return measures.EmpiricalMeasure.from_values(
        vals, meta={"law": "mu_star", "pmf": p.to_dict(),
                    "n_samples": n_samples, "seed": seed,
                    "size_cap": size_cap, "rejections": rejections})
