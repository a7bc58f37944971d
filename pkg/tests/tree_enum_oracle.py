"""Independent enumeration oracle for the tree limit laws.

Enumerates, with exact rational arithmetic, every tree shape the
root-p / rest-p-star branching process can produce with at most
`max_vertices` vertices, and aggregates the equilibrium root bias
sum(deg^2)/sum(deg) - d_root over them. Written from scratch against the
process definition; shares no code with the library's samplers.
"""

from fractions import Fraction
from functools import lru_cache


def _as_fraction_pmf(pmf):
    return {int(k): Fraction(v) for k, v in pmf.items() if v}


def _size_biased(p):
    m1 = sum(k * w for k, w in p.items())
    return {k - 1: k * w / m1 for k, w in p.items() if k >= 1}


def enumerate_mu_star(pmf, max_vertices=12):
    """Exact law of the equilibrium root bias over trees with at most
    `max_vertices` vertices.

    Returns (atoms, enumerated_mass): atoms maps Fraction bias values to the
    Fraction probability of a tree shape realising them; the masses sum to
    the probability that the tree is that small, so 1 - enumerated_mass
    bounds the truncation error of any expectation over the atoms.
    """
    p = _as_fraction_pmf(pmf)
    pstar = _size_biased(p)

    # subtree(s) = {(sum_deg, sum_deg_sq): mass} over subtrees with exactly
    # s vertices, counting the root-to-parent edge in the subtree root's
    # degree (degree = offspring + 1).
    @lru_cache(maxsize=None)
    def subtree(s):
        out = {}
        for j, wj in pstar.items():
            if j == 0:
                if s == 1:
                    out[(1, 1)] = out.get((1, 1), Fraction(0)) + wj
                continue
            if s - 1 < j:      # each child subtree needs >= 1 vertex
                continue
            for (sd, sq), mass in forest(j, s - 1).items():
                key = (sd + j + 1, sq + (j + 1) ** 2)
                out[key] = out.get(key, Fraction(0)) + wj * mass
        return out

    # forest(j, s) = ordered j-tuples of subtrees with s vertices in total
    @lru_cache(maxsize=None)
    def forest(j, s):
        if j == 0:
            return {(0, 0): Fraction(1)} if s == 0 else {}
        out = {}
        for s1 in range(1, s - (j - 1) + 1):
            for (sd1, sq1), m1 in subtree(s1).items():
                for (sd2, sq2), m2 in forest(j - 1, s - s1).items():
                    key = (sd1 + sd2, sq1 + sq2)
                    out[key] = out.get(key, Fraction(0)) + m1 * m2
        return out

    atoms = {}
    mass = Fraction(0)
    for c, wc in p.items():
        if c == 0:
            atoms[Fraction(0)] = atoms.get(Fraction(0), Fraction(0)) + wc
            mass += wc
            continue
        for s in range(c, max_vertices):
            for (sd, sq), m in forest(c, s).items():
                bias = Fraction(sq + c * c, sd + c) - c
                atoms[bias] = atoms.get(bias, Fraction(0)) + wc * m
                mass += wc * m
    return atoms, mass


def mu_star_mean_enumerated(pmf, max_vertices=12):
    """(conditional mean over the enumerated trees, enumerated mass)."""
    atoms, mass = enumerate_mu_star(pmf, max_vertices)
    mean = sum(v * m for v, m in atoms.items()) / mass
    return float(mean), float(mass)


def mu_mean_enumerated(pmf):
    """Mean of the non-backtracking limit law, by direct enumeration of the
    root degree: sum_k p_k (m2/m1 - k) = m2/m1 - m1."""
    p = _as_fraction_pmf(pmf)
    m1 = sum(k * w for k, w in p.items())
    m2 = sum(k * k * w for k, w in p.items())
    return float(sum(w * (Fraction(m2, 1) / m1 - k) for k, w in p.items()))
