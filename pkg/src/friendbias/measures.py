"""Finite empirical measures on the real line and distances between them.

Atoms are kept sorted ascending with values closer than 1e-12 merged (the
merge absorbs kernel arithmetic noise; the representative is the smallest
value of the merged run). Total weight must be 1 up to 1e-12.

The Levy metric is used wherever weak convergence is quantified: on the real
line it metrises the same topology as the Prohorov metric and is exactly
computable on an atom grid. Kolmogorov-Smirnov and 1-Wasserstein distances
are provided as diagnostics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

MERGE_TOL = 1e-12
WEIGHT_TOL = 1e-12
LEVY_RESOLUTION = 1e-12


@dataclass
class EmpiricalMeasure:
    """Weighted finite multiset of real values, normalised to mass 1."""

    values: np.ndarray
    weights: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.values.shape != self.weights.shape or self.values.ndim != 1:
            raise ValueError("values and weights must be 1-d arrays of equal length")
        if self.values.size == 0:
            raise ValueError("empty measure")
        if np.any(self.weights < 0):
            raise ValueError("negative weight")
        total = float(self.weights.sum())
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1")

    @classmethod
    def from_values(cls, values, weights=None, meta=None) -> "EmpiricalMeasure":
        """Sort, merge near-equal values, and normalise bookkeeping.

        With weights omitted, each value carries mass 1/len(values).
        """
        v = np.asarray(values, dtype=np.float64).ravel()
        if v.size == 0:
            raise ValueError("empty measure")
        if weights is None:
            w = np.full(v.size, 1.0 / v.size)
        else:
            w = np.asarray(weights, dtype=np.float64).ravel()
        order = np.argsort(v, kind="stable")
        v, w = v[order], w[order]
        if v.size > 1:
            new_group = np.empty(v.size, dtype=bool)
            new_group[0] = True
            np.greater(np.diff(v), MERGE_TOL, out=new_group[1:])
            starts = np.flatnonzero(new_group)
            v = v[starts]
            w = np.add.reduceat(w, starts)
        return cls(values=v, weights=w, meta=dict(meta or {}))

    def mean(self) -> float:
        return float(np.dot(self.weights, self.values))

    def moment(self, r: int) -> float:
        if r < 1:
            raise ValueError("moment order must be >= 1")
        return float(np.dot(self.weights, self.values ** r))

    def cdf(self, xs) -> np.ndarray:
        """Right-continuous CDF evaluated at the points `xs`."""
        cw = np.cumsum(self.weights)
        idx = np.searchsorted(self.values, np.asarray(xs, dtype=np.float64),
                              side="right")
        out = np.zeros(np.shape(xs), dtype=np.float64)
        nz = idx > 0
        out[nz] = cw[idx[nz] - 1]
        return out

    def mass_at_least(self, x: float) -> float:
        """Mass of [x, inf); `mass_at_least(0.0)` is the nonnegative fraction."""
        idx = np.searchsorted(self.values, x, side="left")
        return float(self.weights[idx:].sum())

    def to_dict(self) -> dict:
        return {"atoms": [[float(v), float(w)]
                          for v, w in zip(self.values, self.weights)],
                "meta": self.meta}

    @classmethod
    def from_dict(cls, d: dict) -> "EmpiricalMeasure":
        atoms = d["atoms"]
        return cls(values=np.array([a[0] for a in atoms]),
                   weights=np.array([a[1] for a in atoms]),
                   meta=dict(d.get("meta", {})))

    def save_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, sort_keys=True, indent=1)
            fh.write("\n")

    @classmethod
    def load_json(cls, path) -> "EmpiricalMeasure":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def histogram(self, bins) -> list[tuple[float, float, float]]:
        """(bin_left, bin_right, mass) rows for integer `bins` or explicit
        edge array; the final bin is closed on the right."""
        if np.isscalar(bins):
            lo, hi = float(self.values[0]), float(self.values[-1])
            if hi <= lo:
                hi = lo + 1.0
            edges = np.linspace(lo, hi, int(bins) + 1)
        else:
            edges = np.asarray(bins, dtype=np.float64)
        masses, _ = np.histogram(self.values, bins=edges, weights=self.weights)
        return [(float(edges[i]), float(edges[i + 1]), float(masses[i]))
                for i in range(len(edges) - 1)]


def mean(m: EmpiricalMeasure) -> float:
    return m.mean()


def moment(m: EmpiricalMeasure, r: int) -> float:
    return m.moment(r)


def _check_pair(a: EmpiricalMeasure, b: EmpiricalMeasure) -> None:
    for m in (a, b):
        if abs(float(m.weights.sum()) - 1.0) > WEIGHT_TOL:
            raise ValueError("unnormalized measure")


def levy_distance(a: EmpiricalMeasure, b: EmpiricalMeasure) -> float:
    """Levy metric: inf{eps : F_a(x-eps)-eps <= F_b(x) <= F_a(x+eps)+eps}.

    For step CDFs both one-sided conditions reduce to checks at the atoms:
    F_a(u) <= F_b(u+eps)+eps at every atom u of a, and symmetrically. The
    infimum is found by bisection to 1e-12 resolution.
    """
    _check_pair(a, b)

    def feasible(eps: float) -> bool:
        fa_at = a.cdf(a.values)
        fb_shift = b.cdf(a.values + eps)
        if np.any(fa_at > fb_shift + eps + 1e-15):
            return False
        fb_at = b.cdf(b.values)
        fa_shift = a.cdf(b.values + eps)
        return not np.any(fb_at > fa_shift + eps + 1e-15)

    if feasible(0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > LEVY_RESOLUTION:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def ks_distance(a: EmpiricalMeasure, b: EmpiricalMeasure) -> float:
    """Kolmogorov-Smirnov distance: sup of the CDF gap (attained at atoms)."""
    _check_pair(a, b)
    grid = np.union1d(a.values, b.values)
    return float(np.max(np.abs(a.cdf(grid) - b.cdf(grid))))


def w1_distance(a: EmpiricalMeasure, b: EmpiricalMeasure) -> float:
    """1-Wasserstein distance: integral of |F_a - F_b|."""
    _check_pair(a, b)
    grid = np.union1d(a.values, b.values)
    if grid.size < 2:
        return 0.0
    gap = np.abs(a.cdf(grid[:-1]) - b.cdf(grid[:-1]))
    return float(np.dot(gap, np.diff(grid)))


DISTANCES = {"levy": levy_distance, "ks": ks_distance, "w1": w1_distance}


def psi_window(spec, kinds, N: int, K_max: int, n_grid,
               delta: float = 0.5, erase: bool = False,
               restrict_giant: bool = False) -> float:
    """Finite-window uniformity proxy: the max, over grid points with
    n >= N and levels k >= N, of the Levy distance between the k-level bias
    distribution and the stationary one.

    This is a proxy over the supplied finite window only, never an estimate
    of a supremum over all (n, k). Raises on an empty window.
    """
    from . import generators, kernels, stationary  # deferred to avoid cycle

    ns = [n for n in n_grid if n >= N]
    ks = [k for k in range(1, K_max + 1) if k >= N]
    if not ns or not ks:
        raise ValueError(f"empty window: no grid points with n,k >= {N}")
    worst = 0.0
    for idx, n in enumerate(ns):
        g = generators.realize(spec, n_override=n,
                               seed_override=generators.mix_seed(spec.seed, idx),
                               erase=erase, restrict_giant=restrict_giant)
        limit = stationary.stationary_bias(g)
        for kind in kinds:
            for k, deltas in kernels.bias_profile(g, max(ks), kind, delta=delta):
                if k < N:
                    continue
                mu_k = EmpiricalMeasure.from_values(deltas)
                worst = max(worst, levy_distance(mu_k, limit))
    return worst
