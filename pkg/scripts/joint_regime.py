#!/usr/bin/env python3
"""Joint-regime experiment: how fast the level-k_n bias law reaches its
limit when the level grows with the graph.

Runs the configuration-model family with degrees {3, 4} under
non-backtracking exploration at k_n = ceil(log n) (the pre-mixing window)
and, optionally, under the lazy walk at 10x the measured mixing level.
Writes joint.csv with one row per graph size.
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from friendbias.cli import main as cli_main


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/joint_regime")
    ap.add_argument("--seed", type=int, default=505)
    ap.add_argument("--replicas", type=int, default=20)
    ap.add_argument("--sizes", type=int, nargs="+",
                    default=[2000, 8000, 32000])
    ap.add_argument("--kind", choices=("nb", "bt", "lazy"), default="nb")
    ap.add_argument("--schedule", default="log_n(1)",
                    help='"log_n(c)" or "mix10(eps)"')
    args = ap.parse_args()

    cfg = {
        "experiment": "joint",
        "gen": {"model": "configuration", "n": args.sizes[0],
                "degree_pmf": {"3": 0.5, "4": 0.5}},
        "kind": args.kind,
        "k": args.schedule,
        "replicas": args.replicas,
        "seed": args.seed,
        "n_grid": args.sizes,
        "erase": args.kind != "nb",   # bt/lazy need simple graphs
        "starts_cap": 48,
        "k_max": 300,
        "out": args.out,
    }
    cfg_path = Path(args.out) / "config.json"
    cfg_path.parent.mkdir(parents=True, exist_ok=True)
    cfg_path.write_text(json.dumps(cfg, indent=1))
    rc = cli_main(["joint", "--config", str(cfg_path)])
    if rc == 0:
        print(Path(args.out, "joint.csv").read_text())
    return rc


if __name__ == "__main__":
    sys.exit(main())
