"""Local Difference convergence sweep over original graphs of 480 to 24000 edges.

Usage: python3 scripts/run_convergence.py [--trials 30] [--seed 0] [--out DIR]
"""

import argparse
from pathlib import Path

from incse.bounds import convergence_experiment

REFERENCE_DECREASE = {1: 0.9627, 2: 0.9598}


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--trials", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    args = p.parse_args()
    res = convergence_experiment(trials_per_size=args.trials, seed=args.seed)
    print(f"{'m':>7} {'mean|dL1|':>10} {'UB1':>8} {'mean|dL2|':>10} {'UB2':>8}")
    for r in res.rows:
        print(f"{r.m:>7} {r.mean_abs_dL1:>10.4f} {r.mean_ub1:>8.4f} {r.mean_abs_dL2:>10.4f} {r.mean_ub2:>8.4f}")
    for k in (1, 2):
        print(f"dL{k} decrease: measured {res.decrease(k):.2%}, reference {REFERENCE_DECREASE[k]:.2%}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        res.write_trials_csv(out / "trials.csv")
        res.write_table_csv(out / "table.csv")


if __name__ == "__main__":
    main()
