#!/usr/bin/env python3
"""Order-of-limits demonstration: for a subcritical offspring law the
non-backtracking and backtracking limit laws of the root bias differ.

Samples both laws, prints their means with standard errors and the Levy
distance between them, and writes the full report JSON.
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from friendbias.cli import main as cli_main


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out/noncommute")
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=707)
    args = ap.parse_args()

    cfg = {"experiment": "noncommute", "pmf": {"1": 0.75, "2": 0.25},
           "n_samples": args.samples, "seed": args.seed, "out": args.out}
    cfg_path = Path(args.out) / "config.json"
    cfg_path.parent.mkdir(parents=True, exist_ok=True)
    cfg_path.write_text(json.dumps(cfg, indent=1))
    rc = cli_main(["noncommute", "--config", str(cfg_path)])
    if rc == 0:
        report = json.loads(Path(args.out, "noncommute_report.json").read_text())
        print(f"mean(mu)      = {report['mean_mu']:.5f} "
              f"+- {report['se_mu']:.5f}")
        print(f"mean(mu_star) = {report['mean_mu_star']:.5f} "
              f"+- {report['se_mu_star']:.5f}")
        print(f"levy distance = {report['levy_mu_vs_mu_star']:.5f}")
    return rc


if __name__ == "__main__":
    sys.exit(main())
