"""Regenerate the three full-size datasets and compare incremental vs. recomputed entropy.

Usage: python3 scripts/run_full_experiments.py [--dims 1 2] [--processes hawkes triad pbp]
Datasets are cached under $INCSE_CACHE (default ~/.cache/incse).
"""

import argparse

from incse.experiments import compare_process, format_comparison
from incse.generators import PROCESSES


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--dims", type=int, nargs="+", default=[1, 2])
    p.add_argument("--processes", nargs="+", default=list(PROCESSES))
    p.add_argument("--repetitions", type=int, default=5)
    p.add_argument("--cache")
    args = p.parse_args()
    for process in args.processes:
        for dim in args.dims:
            pc = compare_process(process, dim, args.cache, repetitions=args.repetitions)
            print(format_comparison(pc), flush=True)


if __name__ == "__main__":
    main()
