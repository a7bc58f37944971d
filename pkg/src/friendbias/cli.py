"""Experiment runner: reproducible batch experiments with JSON/CSV outputs.

Every output file embeds the fully resolved config and master seed, and a
rerun with the same config reproduces every file byte for byte. Replica r of
a generated family uses seed mix_seed(master, r), so results do not depend
on any execution order.

Exit codes: 0 success, 2 config error, 3 precondition violation (the message
names the violated condition), 4 numeric guard tripped.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import generators, kernels, measures, oracle, stationary, tree_limits
from .graph_core import (ExplorationPreconditionError, Graph, load_edge_list,
                         save_edge_list, validate_for_exploration)
from .kernels import KernelError
from .oracle import SizeGuardError

EXPERIMENTS = ("generate", "bias", "stationary", "mixing", "limit-mu",
               "limit-mu-star", "sweep", "joint", "noncommute", "oracle-check")


class ConfigError(ValueError):
    """The experiment configuration itself is invalid."""


class PreconditionError(ValueError):
    """A stated experiment precondition does not hold."""


@dataclass
class ExperimentConfig:
    experiment: str
    gen: dict | None = None          # GenSpec as a dict
    graph_file: str | None = None
    kind: str = "bt"
    delta: float = 0.5
    k: object = 1                    # int, list of ints, "log_n(c)" or "mix10(eps)"
    replicas: int = 1
    seed: int = 0
    out: str = "out"
    distance: str = "levy"
    restrict_giant: bool = False
    erase: bool = False
    scope: str = "global"
    n_grid: list | None = None
    pmf: dict | None = None
    n_samples: int = 100_000
    k_max: int = 200
    eps_list: list = field(default_factory=lambda: [0.25, 0.01, 1e-4])
    bins: int = 40
    window_N: int = 1
    starts_cap: int | None = None
    size_cap: int = 10 ** 6

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.kind not in ("bt", "nb", "lazy"):
            raise ConfigError(f"unknown exploration kind {self.kind!r}")
        if self.kind == "lazy" and not (0.0 < self.delta < 1.0):
            raise ConfigError(f"laziness delta must lie in (0, 1), got {self.delta}")
        if self.replicas < 1:
            raise ConfigError("replicas must be >= 1")
        if self.distance not in measures.DISTANCES:
            raise ConfigError(f"unknown distance {self.distance!r}")
        if isinstance(self.k, str):
            parse_schedule(self.k)  # fail fast on malformed schedules

    def to_dict(self) -> dict:
        d = asdict(self)
        if self.pmf is not None:
            d["pmf"] = {str(k): v for k, v in self.pmf.items()}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        if d.get("pmf") is not None:
            d["pmf"] = {int(k): float(v) for k, v in d["pmf"].items()}
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc


def parse_schedule(text: str):
    """Parse a level schedule: "log_n(c)" gives ceil(c * ln n); "mix10(eps)"
    gives 10x the first level where the worst-case TV drops to eps."""
    text = text.strip()
    for name in ("log_n", "mix10"):
        if text.startswith(name + "(") and text.endswith(")"):
            try:
                value = float(text[len(name) + 1:-1])
            except ValueError as exc:
                raise ConfigError(f"malformed schedule {text!r}") from exc
            if value <= 0:
                raise ConfigError(f"schedule parameter must be positive: {text!r}")
            return name, value
    raise ConfigError(f"unknown schedule {text!r}")


def schedule_k(cfg: ExperimentConfig, n: int, n_index: int, graph=None) -> int:
    """Resolve the level for grid point n (list schedules index by position)."""
    k = cfg.k
    if isinstance(k, int):
        return k
    if isinstance(k, list):
        return int(k[n_index])
    name, value = parse_schedule(k)
    if name == "log_n":
        return max(1, math.ceil(value * math.log(n)))
    profile = stationary.mixing_profile(
        graph, cfg.kind, cfg.k_max, eps_list=(value,), delta=cfg.delta,
        starts_cap=cfg.starts_cap if graph.n > 2000 else None)
    crossing = profile.first_crossing(value)
    if crossing is None:
        raise PreconditionError(
            f"mixing schedule unresolved: TV never reached {value} within "
            f"k_max={cfg.k_max}")
    return 10 * crossing


def _json_bytes(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(text)


def _header(cfg: ExperimentConfig) -> str:
    return "# config: " + json.dumps(cfg.to_dict(), sort_keys=True) + "\n"


def _write_measure(path: Path, m: measures.EmpiricalMeasure,
                   cfg: ExperimentConfig) -> None:
    d = m.to_dict()
    d["meta"] = dict(d["meta"])
    d["meta"]["config"] = cfg.to_dict()
    d["meta"]["master_seed"] = cfg.seed
    _write(path, _json_bytes(d))


def _write_histogram(path: Path, m: measures.EmpiricalMeasure,
                     cfg: ExperimentConfig) -> None:
    rows = m.histogram(cfg.bins)
    lines = [_header(cfg).rstrip("\n"), "bin_left,bin_right,mass"]
    lines += [f"{a!r},{b!r},{c!r}" for a, b, c in rows]
    _write(path, "\n".join(lines) + "\n")


def _summary_csv(cfg: ExperimentConfig, rows: list[dict]) -> str:
    cols = ("experiment", "n", "k", "kind", "seed", "mean",
            "nonneg_fraction", "levy_to_limit")
    lines = [_header(cfg).rstrip("\n"), ",".join(cols)]
    for row in rows:
        lines.append(",".join("" if row.get(c) is None else
                              (repr(row[c]) if isinstance(row[c], float)
                               else str(row[c])) for c in cols))
    return "\n".join(lines) + "\n"


def _genspec(cfg: ExperimentConfig) -> generators.GenSpec:
    if cfg.gen is None:
        raise ConfigError("this experiment needs a 'gen' model spec")
    try:
        return generators.GenSpec.from_dict(cfg.gen)
    except ValueError as exc:
        raise ConfigError(f"bad gen spec: {exc}") from exc


def _replica_graph(cfg: ExperimentConfig, r: int) -> Graph:
    spec = _genspec(cfg)
    return generators.realize(spec,
                              seed_override=generators.mix_seed(cfg.seed, r),
                              erase=cfg.erase, restrict_giant=cfg.restrict_giant)


def _resolve_graph(cfg: ExperimentConfig, r: int = 0) -> Graph:
    if cfg.graph_file is not None:
        return load_edge_list(cfg.graph_file)
    return _replica_graph(cfg, r)


def _check_kind(cfg: ExperimentConfig, g: Graph) -> None:
    report = validate_for_exploration(g, cfg.kind)
    if not report.ok:
        raise PreconditionError(
            f"graph invalid for {cfg.kind!r} exploration: {report.message} "
            f"(vertices {report.violations[:10]})")


def _fixed_k(cfg: ExperimentConfig) -> int:
    if not isinstance(cfg.k, int):
        raise ConfigError(f"experiment {cfg.experiment!r} needs an integer k")
    if cfg.k < 0:
        raise ConfigError("k must be >= 0")
    return cfg.k


def run_generate(cfg: ExperimentConfig) -> int:
    g = _resolve_graph(cfg)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    save_edge_list(g, out / "graph.edges")
    meta = generators.gen_metadata(_genspec(cfg))
    meta["config"] = cfg.to_dict()
    meta["n"] = g.n
    meta["num_edges"] = g.num_edges
    _write(out / "graph.meta.json", _json_bytes(meta))
    return 0


def run_bias(cfg: ExperimentConfig) -> int:
    k = _fixed_k(cfg)
    if cfg.graph_file is not None and cfg.replicas != 1:
        raise ConfigError("replicas > 1 requires a generated family, not a graph file")
    mus = []
    for r in range(cfg.replicas):
        g = _resolve_graph(cfg, r)
        _check_kind(cfg, g)
        mus.append(kernels.bias_all(g, k, cfg.kind, delta=cfg.delta,
                                    meta={"replica": r, "seed": cfg.seed}))
    out = Path(cfg.out)
    _write_measure(out / "bias_measure.json", mus[0], cfg)
    primary = mus[0]
    if cfg.replicas > 1:
        pooled = measures.EmpiricalMeasure.from_values(
            np.concatenate([m.values for m in mus]),
            np.concatenate([m.weights / cfg.replicas for m in mus]),
            meta={"k": k, "kind": cfg.kind, "replicas": cfg.replicas,
                  "annealed": True})
        rep_means = [m.mean() for m in mus]
        pooled.meta["mean_bias"] = float(np.mean(rep_means))
        pooled.meta["sem_mean_bias"] = float(
            np.std(rep_means, ddof=1) / np.sqrt(cfg.replicas))
        _write_measure(out / "bias_measure_annealed.json", pooled, cfg)
        primary = pooled
    _write_histogram(out / "bias_histogram.csv", primary, cfg)
    # distance of the quenched measure to its stationary limit, in the
    # configured metric (levy by default), when the limit is defined
    levy_to_limit = None
    try:
        limit = stationary.stationary_bias(_resolve_graph(cfg, 0), scope=cfg.scope)
        levy_to_limit = measures.DISTANCES[cfg.distance](mus[0], limit)
    except (KernelError, ExplorationPreconditionError, ValueError):
        pass
    row = {"experiment": "bias", "n": mus[0].meta.get("n"), "k": k,
           "kind": cfg.kind, "seed": cfg.seed, "mean": primary.mean(),
           "nonneg_fraction": primary.mass_at_least(0.0),
           "levy_to_limit": levy_to_limit}
    _write(out / "summary.csv", _summary_csv(cfg, [row]))
    return 0


def run_stationary(cfg: ExperimentConfig) -> int:
    g = _resolve_graph(cfg)
    mu_inf = stationary.stationary_bias(g, scope=cfg.scope)
    out = Path(cfg.out)
    _write_measure(out / "stationary_measure.json", mu_inf, cfg)
    diag = {"scope": cfg.scope, "n": g.n, "num_edges": g.num_edges}
    pi = stationary.pi_vertex(g)
    degf = g.degrees_float
    ratio = float(np.dot(degf, degf) / degf.sum())
    diag["stationary_weighted_mean_bias"] = float(
        np.dot(pi.weights, ratio - degf))
    for kind in ("bt", "lazy", "nb"):
        try:
            diag[f"residual_{kind}"] = stationary.stationarity_residual(
                g, kind, delta=cfg.delta)
        except (KernelError, ExplorationPreconditionError):
            diag[f"residual_{kind}"] = None
    diag["config"] = cfg.to_dict()
    _write(out / "diagnostics.json", _json_bytes(diag))
    row = {"experiment": "stationary", "n": g.n, "k": None, "kind": cfg.kind,
           "seed": cfg.seed, "mean": mu_inf.mean(),
           "nonneg_fraction": mu_inf.mass_at_least(0.0),
           "levy_to_limit": None}
    _write(out / "summary.csv", _summary_csv(cfg, [row]))
    return 0


def run_mixing(cfg: ExperimentConfig) -> int:
    g = _resolve_graph(cfg)
    _check_kind(cfg, g)
    cap = cfg.starts_cap
    profile = stationary.mixing_profile(g, cfg.kind, cfg.k_max,
                                        eps_list=cfg.eps_list,
                                        delta=cfg.delta, starts_cap=cap)
    out = Path(cfg.out)
    _write(out / "mixing.csv", _header(cfg)
           + profile.to_csv(n=g.n, seed=cfg.seed))
    meta = {"crossings": {repr(e): profile.crossings[e] for e in profile.eps_list},
            "flagged_nonergodic": profile.flagged_nonergodic,
            "states": profile.states, "starts_used": profile.starts_used,
            "config": cfg.to_dict()}
    if profile.D_vertex_values is not None:
        meta["D_vertex_values"] = profile.D_vertex_values
    _write(out / "mixing_meta.json", _json_bytes(meta))
    return 0


def _pmf_law(cfg: ExperimentConfig) -> tree_limits.OffspringLaw:
    if cfg.pmf is None:
        raise ConfigError("this experiment needs a 'pmf'")
    return tree_limits.OffspringLaw.from_dict(cfg.pmf)


def run_limit_mu(cfg: ExperimentConfig) -> int:
    p = _pmf_law(cfg)
    m = tree_limits.sample_mu(p, cfg.n_samples, cfg.seed)
    out = Path(cfg.out)
    _write_measure(out / "mu_measure.json", m, cfg)
    _write_measure(out / "mu_exact.json", tree_limits.exact_mu(p), cfg)
    row = {"experiment": "limit-mu", "n": cfg.n_samples, "k": None,
           "kind": cfg.kind, "seed": cfg.seed, "mean": m.mean(),
           "nonneg_fraction": m.mass_at_least(0.0),
           "levy_to_limit": measures.levy_distance(m, tree_limits.exact_mu(p))}
    _write(out / "summary.csv", _summary_csv(cfg, [row]))
    return 0


def run_limit_mu_star(cfg: ExperimentConfig) -> int:
    p = _pmf_law(cfg)
    if not tree_limits.size_bias(p).m1 < 1.0:
        raise PreconditionError("mu_star needs a subcritical size-biased law")
    m = tree_limits.sample_mu_star(p, cfg.n_samples, cfg.seed,
                                   size_cap=cfg.size_cap)
    out = Path(cfg.out)
    _write_measure(out / "mu_star_measure.json", m, cfg)
    row = {"experiment": "limit-mu-star", "n": cfg.n_samples, "k": None,
           "kind": cfg.kind, "seed": cfg.seed, "mean": m.mean(),
           "nonneg_fraction": m.mass_at_least(0.0), "levy_to_limit": None}
    _write(out / "summary.csv", _summary_csv(cfg, [row]))
    return 0


def run_sweep(cfg: ExperimentConfig) -> int:
    if not cfg.n_grid:
        raise ConfigError("sweep needs n_grid")
    spec = _genspec(cfg)
    lines = [_header(cfg).rstrip("\n"), "n,k,kind,levy,ks,w1"]
    worst = 0.0
    for idx, n in enumerate(cfg.n_grid):
        g = generators.realize(spec, n_override=n,
                               seed_override=generators.mix_seed(cfg.seed, idx),
                               erase=cfg.erase, restrict_giant=cfg.restrict_giant)
        _check_kind(cfg, g)
        limit = stationary.stationary_bias(g, scope=cfg.scope)
        for k, deltas in kernels.bias_profile(g, cfg.k_max, cfg.kind,
                                              delta=cfg.delta):
            mu_k = measures.EmpiricalMeasure.from_values(deltas)
            lv = measures.levy_distance(mu_k, limit)
            lines.append(f"{g.n},{k},{cfg.kind},{lv!r},"
                         f"{measures.ks_distance(mu_k, limit)!r},"
                         f"{measures.w1_distance(mu_k, limit)!r}")
            if n >= cfg.window_N and k >= cfg.window_N:
                worst = max(worst, lv)
    out = Path(cfg.out)
    _write(out / "sweep.csv", "\n".join(lines) + "\n")
    _write(out / "psi.json", _json_bytes({"window_N": cfg.window_N,
                                          "psi_window": worst,
                                          "config": cfg.to_dict()}))
    return 0


def run_joint(cfg: ExperimentConfig) -> int:
    if not cfg.n_grid:
        raise ConfigError("joint needs n_grid")
    if sorted(cfg.n_grid) != list(cfg.n_grid) or len(set(cfg.n_grid)) != len(cfg.n_grid):
        raise ConfigError("joint n_grid must be strictly increasing")
    if isinstance(cfg.k, list):
        if len(cfg.k) != len(cfg.n_grid):
            raise ConfigError("list schedule must match n_grid length")
        if any(a > b for a, b in zip(cfg.k, cfg.k[1:])):
            raise ConfigError("level schedule must be non-decreasing in n")
    spec = _genspec(cfg)
    if spec.model == "configuration":
        if spec.degree_pmf is None:
            raise ConfigError("joint configuration runs need a degree_pmf")
        p = tree_limits.OffspringLaw.from_dict(spec.degree_pmf)
    else:
        p = tree_limits.truncated_poisson(float(spec.lam))
    limit = tree_limits.exact_mu(p)
    out = Path(cfg.out)
    lines = [_header(cfg).rstrip("\n"), "n,k_n,levy,w1,mean_gap"]
    for idx, n in enumerate(cfg.n_grid):
        vals, weights, means = [], [], []
        k_n = None
        for r in range(cfg.replicas):
            seed = generators.mix_seed(generators.mix_seed(cfg.seed, idx), r)
            g = generators.realize(spec, n_override=n, seed_override=seed,
                                   erase=cfg.erase,
                                   restrict_giant=cfg.restrict_giant)
            _check_kind(cfg, g)
            if k_n is None:
                k_n = schedule_k(cfg, n, idx, graph=g)
            mu = kernels.bias_all(g, k_n, cfg.kind, delta=cfg.delta)
            vals.append(mu.values)
            weights.append(mu.weights / cfg.replicas)
            means.append(mu.mean())
        pooled = measures.EmpiricalMeasure.from_values(
            np.concatenate(vals), np.concatenate(weights),
            meta={"n": n, "k": k_n, "kind": cfg.kind,
                  "replicas": cfg.replicas})
        _write_measure(out / f"joint_measure_n{n}.json", pooled, cfg)
        lines.append(f"{n},{k_n},{measures.levy_distance(pooled, limit)!r},"
                     f"{measures.w1_distance(pooled, limit)!r},"
                     f"{abs(float(np.mean(means)) - limit.mean())!r}")
    _write(out / "joint.csv", "\n".join(lines) + "\n")
    return 0


def run_noncommute(cfg: ExperimentConfig) -> int:
    p = _pmf_law(cfg)
    if not tree_limits.size_bias(p).m1 < 1.0:
        raise PreconditionError("noncommute needs a subcritical size-biased law")
    mu = tree_limits.sample_mu(p, cfg.n_samples, generators.mix_seed(cfg.seed, 0))
    mu_star = tree_limits.sample_mu_star(p, cfg.n_samples,
                                         generators.mix_seed(cfg.seed, 1),
                                         size_cap=cfg.size_cap)

    def _se(m: measures.EmpiricalMeasure) -> float:
        var = max(m.moment(2) - m.mean() ** 2, 0.0)
        return math.sqrt(var / cfg.n_samples)

    report = {"mu": mu.to_dict(), "mu_star": mu_star.to_dict(),
              "mean_mu": mu.mean(), "se_mu": _se(mu),
              "mean_mu_star": mu_star.mean(), "se_mu_star": _se(mu_star),
              "levy_mu_vs_mu_star": measures.levy_distance(mu, mu_star),
              "config": cfg.to_dict(), "master_seed": cfg.seed}
    _write(Path(cfg.out) / "noncommute_report.json", _json_bytes(report))
    return 0


def run_oracle_check(cfg: ExperimentConfig) -> int:
    worst = 0.0
    checks = 0
    for name, g in oracle.small_graph_corpus().items():
        for kind in ("bt", "nb"):
            if not validate_for_exploration(g, kind).ok:
                continue
            for k in range(0, 6):
                for i in range(g.n):
                    got = kernels._k_step_dist(g, i, k, kind, cfg.delta).weights
                    want = oracle.oracle_k_step(g, i, k, kind).weights
                    worst = max(worst, float(np.abs(got - want).max()))
                    checks += 1
                avg = oracle.oracle_avg_bias(g, k, kind)  # raises on mismatch
                mean = kernels.bias_all(g, k, kind).meta["mean_bias"]
                worst = max(worst, abs(avg - mean))
    print(f"oracle-check: {checks} k-step laws compared, max abs error {worst:.3e}")
    if worst > 1e-12:
        print("oracle-check: FAIL (tolerance 1e-12)")
        return 4
    print("oracle-check: PASS")
    return 0


RUNNERS = {"generate": run_generate, "bias": run_bias,
           "stationary": run_stationary, "mixing": run_mixing,
           "limit-mu": run_limit_mu, "limit-mu-star": run_limit_mu_star,
           "sweep": run_sweep, "joint": run_joint,
           "noncommute": run_noncommute, "oracle-check": run_oracle_check}


def _parse_k_flag(text: str):
    try:
        return int(text)
    except ValueError:
        return text


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="friendbias",
        description="multi-level friendship-bias experiments on random graphs")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", type=str, default=None,
                        help="JSON experiment config")
        sp.add_argument("--n", type=int, default=None)
        sp.add_argument("--k", type=_parse_k_flag, default=None)
        sp.add_argument("--kind", choices=("bt", "nb", "lazy"), default=None)
        sp.add_argument("--delta", type=float, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--replicas", type=int, default=None)
        sp.add_argument("--out", type=str, default=None)
        sp.add_argument("--restrict-giant", action="store_true", default=None,
                        help="analyse only the largest connected component")
    return parser


def _load_config(args) -> ExperimentConfig:
    data: dict = {}
    if args.config is not None:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    data["experiment"] = args.experiment
    for flag in ("k", "kind", "delta", "seed", "replicas", "out",
                 "restrict_giant"):
        value = getattr(args, flag)
        if value is not None:
            data[flag] = value
    if args.n is not None:
        if "gen" not in data or data["gen"] is None:
            raise ConfigError("--n override needs a gen spec in the config")
        data["gen"] = dict(data["gen"], n=args.n)
    return ExperimentConfig.from_dict(data)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        return RUNNERS[cfg.experiment](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (PreconditionError, KernelError, ExplorationPreconditionError) as exc:
        print(f"precondition violation: {exc}", file=sys.stderr)
        return 3
    except (SizeGuardError, RuntimeError) as exc:
        print(f"numeric guard: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
