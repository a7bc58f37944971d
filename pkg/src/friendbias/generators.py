"""Seeded random-graph generators: homogeneous Erdos-Renyi and the
configuration model, plus degree-sequence synthesis from a pmf.

All randomness flows through numpy's PCG64 bit generator seeded with an
explicit 64-bit value, so a GenSpec determines its graph bit-for-bit.
Replica seeds are derived with the SplitMix64 avalanche (`mix_seed`), which
makes replicas independent of execution order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph_core import Graph, build_graph, largest_component

RNG_ALGORITHM = "numpy-pcg64"
SEED_MIX_ALGORITHM = "splitmix64-v1"

_MASK64 = (1 << 64) - 1


def mix_seed(master: int, index: int) -> int:
    """SplitMix64 avalanche of master + (index+1)*golden-gamma.

    Used to derive the seed of replica `index` from a master seed; any two
    distinct indices give statistically unrelated streams.
    """
    z = (master + (index + 1) * 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _validate_pmf(pmf: dict) -> tuple[np.ndarray, np.ndarray]:
    if not pmf:
        raise ValueError("empty pmf")
    ks = np.array(sorted(int(k) for k in pmf), dtype=np.int64)
    if ks[0] < 0:
        raise ValueError("pmf support must be nonnegative integers")
    ps = np.array([float(pmf[k] if k in pmf else pmf[str(k)]) for k in ks])
    if np.any(ps < 0):
        raise ValueError("negative pmf entry")
    if abs(ps.sum() - 1.0) > 1e-9:
        raise ValueError(f"pmf sums to {ps.sum()!r}, not 1")
    keep = ps > 0
    return ks[keep], ps[keep]


@dataclass
class GenSpec:
    """Serializable description of one random-graph model instance."""

    model: str                      # "erdos_renyi" | "configuration"
    n: int
    lam: float | None = None        # mean degree (Erdos-Renyi)
    degree_pmf: dict | None = None  # configuration model, i.i.d. degrees
    degree_seq: list | None = None  # configuration model, explicit degrees
    seed: int = 0

    def __post_init__(self):
        if self.model not in ("erdos_renyi", "configuration"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.model == "erdos_renyi":
            if self.lam is None or self.lam <= 0:
                raise ValueError("erdos_renyi requires lam > 0")
        else:
            if self.degree_pmf is None and self.degree_seq is None:
                raise ValueError("configuration model needs degree_pmf or degree_seq")
            if self.degree_pmf is not None:
                _validate_pmf(self.degree_pmf)
            if self.degree_seq is not None:
                if sum(self.degree_seq) % 2:
                    raise ValueError("explicit degree sequence must have even sum")
                if len(self.degree_seq) != self.n:
                    raise ValueError(
                        f"degree sequence has {len(self.degree_seq)} entries "
                        f"but n={self.n}")

    def to_dict(self) -> dict:
        d = {"model": self.model, "n": self.n, "seed": self.seed}
        if self.lam is not None:
            d["lam"] = self.lam
        if self.degree_pmf is not None:
            d["degree_pmf"] = {str(k): v for k, v in self.degree_pmf.items()}
        if self.degree_seq is not None:
            d["degree_seq"] = list(int(x) for x in self.degree_seq)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GenSpec":
        pmf = d.get("degree_pmf")
        if pmf is not None:
            pmf = {int(k): float(v) for k, v in pmf.items()}
        return cls(model=d["model"], n=int(d["n"]), lam=d.get("lam"),
                   degree_pmf=pmf, degree_seq=d.get("degree_seq"),
                   seed=int(d.get("seed", 0)))


def gen_metadata(spec: GenSpec) -> dict:
    return {"rng": RNG_ALGORITHM, "seed_mix": SEED_MIX_ALGORITHM,
            "spec": spec.to_dict()}


def gen_erdos_renyi(n: int, lam: float, seed: int) -> Graph:
    """Simple graph: each of the n(n-1)/2 pairs kept independently with
    probability lam/n. Deterministic given the seed; never contains
    self-loops or parallel edges."""
    if n < 2:
        raise ValueError(f"erdos_renyi needs n >= 2, got {n}")
    if not (0 < lam < n):
        raise ValueError(f"erdos_renyi needs 0 < lam < n, got lam={lam}, n={n}")
    p = lam / n
    n_pairs = n * (n - 1) // 2
    rng = _rng(seed)
    if n_pairs <= 2_000_000:
        codes = np.flatnonzero(rng.random(n_pairs) < p)
    else:
        m = int(rng.binomial(n_pairs, p))
        # rejection sampling of distinct pair codes; uniform and deterministic
        chosen: set[int] = set()
        picks: list[int] = []
        while len(picks) < m:
            batch = rng.integers(0, n_pairs, size=max(m - len(picks), 1024))
            for c in batch.tolist():
                if c not in chosen:
                    chosen.add(c)
                    picks.append(c)
                    if len(picks) == m:
                        break
        codes = np.sort(np.array(picks, dtype=np.int64))
    # decode triangular codes: row i holds pairs (i, i+1..n-1)
    row_starts = np.concatenate(
        [[0], np.cumsum(n - 1 - np.arange(n, dtype=np.int64))])
    i = np.searchsorted(row_starts, codes, side="right") - 1
    j = i + 1 + (codes - row_starts[i])
    return build_graph(n, list(zip(i.tolist(), j.tolist())))


def gen_configuration_model(degree_seq, seed: int) -> Graph:
    """Uniform stub pairing: half-edge stubs are permuted and matched in
    consecutive pairs, giving a uniform perfect matching. The output is a
    multigraph (self-loops and parallel edges possible)."""
    seq = np.asarray(degree_seq, dtype=np.int64)
    if np.any(seq < 0):
        raise ValueError("degrees must be nonnegative")
    total = int(seq.sum())
    if total % 2:
        raise ValueError(f"degree sum {total} is odd")
    stubs = np.repeat(np.arange(seq.size, dtype=np.int64), seq)
    rng = _rng(seed)
    s = stubs[rng.permutation(stubs.size)]
    edges = list(zip(s[0::2].tolist(), s[1::2].tolist()))
    return build_graph(seq.size, edges)


def sample_degree_sequence(pmf: dict, n: int, seed: int) -> np.ndarray:
    """n i.i.d. draws from the pmf; if the sum is odd, one uniformly chosen
    vertex is bumped by +1 to restore parity."""
    ks, ps = _validate_pmf(pmf)
    rng = _rng(seed)
    draws = rng.choice(ks, size=n, p=ps)
    if int(draws.sum()) % 2:
        draws[int(rng.integers(n))] += 1
    return draws.astype(np.int64)


def erase_to_simple(g: Graph) -> tuple[Graph, dict]:
    """Collapse parallel edges and drop self-loops.

    Returns the simple graph plus metadata recording how much was erased;
    callers that need exact stub conservation must keep the multigraph.
    """
    seen: set[tuple[int, int]] = set()
    edges: list[tuple[int, int]] = []
    loops = 0
    collapsed = 0
    for u, v in g.edge_endpoints:
        if u == v:
            loops += 1
            continue
        key = (u, v) if u < v else (v, u)
        if key in seen:
            collapsed += 1
            continue
        seen.add(key)
        edges.append(key)
    simple = build_graph(g.n, sorted(edges))
    meta = {"erased": True, "self_loops_removed": loops,
            "parallel_edges_collapsed": collapsed}
    return simple, meta


def generate(spec: GenSpec) -> Graph:
    """Dispatch a GenSpec to its generator. Deterministic per spec."""
    if spec.model == "erdos_renyi":
        return gen_erdos_renyi(spec.n, float(spec.lam), spec.seed)
    if spec.degree_seq is not None:
        return gen_configuration_model(spec.degree_seq, spec.seed)
    seq = sample_degree_sequence(spec.degree_pmf, spec.n, mix_seed(spec.seed, 0))
    return gen_configuration_model(seq, mix_seed(spec.seed, 1))


def realize(spec: GenSpec, n_override: int | None = None,
            seed_override: int | None = None, erase: bool = False,
            restrict_giant: bool = False) -> Graph:
    """Generate with optional n/seed overrides and post-passes (erasure to a
    simple graph, restriction to the largest component)."""
    if (n_override is not None and spec.degree_seq is not None
            and int(n_override) != len(spec.degree_seq)):
        raise ValueError("cannot override n for an explicit degree sequence; "
                         "use a degree_pmf for size grids")
    s = GenSpec(model=spec.model,
                n=spec.n if n_override is None else int(n_override),
                lam=spec.lam, degree_pmf=spec.degree_pmf,
                degree_seq=spec.degree_seq,
                seed=spec.seed if seed_override is None else int(seed_override))
    g = generate(s)
    if erase:
        g, _ = erase_to_simple(g)
    if restrict_giant:
        g, _ = largest_component(g)
    return g
