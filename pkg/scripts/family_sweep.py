#!/usr/bin/env python3
"""Run the standard family sweeps and write CSV reports.

Reproduces the desk-scale evidence for the random constructions: LRC greedy
floors, DRGP tensor certificates, and tensor-gap level-1 ranks.

Usage: python3 scripts/family_sweep.py [--out-dir results] [--trials 20]
"""

import argparse
import os

from vrank.cli import ExperimentSpec, run_experiment
from vrank.families import Family


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    os.makedirs(args.out_dir, exist_ok=True)

    sweeps = {
        "lrc.csv": ExperimentSpec(Family.LRC, [16, 32, 64], [2, 4],
                                  trials=args.trials, seed=args.seed),
        "drgp.csv": ExperimentSpec(Family.DRGP, [16, 32, 64], [2],
                                   trials=args.trials, seed=args.seed,
                                   budget_ms=60_000),
        "tensor_gap.csv": ExperimentSpec(Family.TENSOR_GAP, [16, 32], [3],
                                         trials=args.trials, seed=args.seed),
    }
    for name, spec in sweeps.items():
        spec.csv_path = os.path.join(args.out_dir, name)
        rows = run_experiment(spec)
        exact = sum(1 for r in rows if r["exact"] == "true")
        print(f"{name}: {len(rows)} rows, {exact} exact")


if __name__ == "__main__":
    main()
