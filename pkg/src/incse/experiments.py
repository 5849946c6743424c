"""Full-size dataset cache and the timing/error comparison over all three processes."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cli import Dataset, TimingRecord, load_dataset, run_compare
from .generators import PROCESSES, GeneratorConfig, generate_dataset

# Reference values, reported next to measured ones (not gated).
REFERENCE_SPEEDUP_FULL = {1: {"hawkes": 3.3, "triad": 3.4, "pbp": 2.9}, 2: {"hawkes": 17, "triad": 10, "pbp": 6}}
REFERENCE_SPEEDUP_SMALL_2D = 32  # lower bound below 10% increment
REFERENCE_MAX_ERROR_PCT = {"hawkes": 1.0, "triad": 2.0, "pbp": 1e-10}


def default_cache_dir() -> Path:
    return Path(os.environ.get("INCSE_CACHE", Path.home() / ".cache" / "incse"))


def full_config(process: str, seed: int = 0) -> GeneratorConfig:
    """2000-node planted graph, N equal to its edge count, T = 20."""
    return GeneratorConfig(process=process, seed=seed, steps=20)


def full_dataset(process: str, cache_dir: str | Path | None = None, seed: int = 0) -> Dataset:
    """Load the full-size dataset for `process`, generating it on first use."""
    if process not in PROCESSES:
        raise ValueError(f"unknown process {process!r}")
    root = Path(cache_dir or default_cache_dir()) / f"{process}_seed{seed}"
    if not (root / "manifest.json").is_file():
        generate_dataset(full_config(process, seed), root)
    return load_dataset(root)


@dataclass
class ProcessComparison:
    process: str
    dim: int
    records: list[TimingRecord]
    init_seconds: float

    def max_abs_rel_err(self) -> float:
        return max(abs(r.rel_err) for r in self.records)

    def linear_fit_r2(self) -> float:
        """R^2 of C_M against n under a least-squares line."""
        n = np.array([r.n for r in self.records], dtype=float)
        c = np.array([r.C_M for r in self.records])
        slope, icept = np.polyfit(n, c, 1)
        resid = c - (slope * n + icept)
        return 1.0 - float(resid @ resid) / float(((c - c.mean()) ** 2).sum())


def compare_process(
    process: str, dim: int, cache_dir=None, seed: int = 0, repetitions: int = 5
) -> ProcessComparison:
    ds = full_dataset(process, cache_dir, seed)
    records, init_s = run_compare(ds, dim, seed=0, repetitions=repetitions)
    return ProcessComparison(process, dim, records, init_s)


def format_comparison(pc: ProcessComparison) -> str:
    lines = [f"[{pc.process} dim={pc.dim}] init {pc.init_seconds:.4g}s"]
    lines.append(f"{'t':>3} {'n':>7} {'H_incre':>12} {'H_rfs':>12} {'err%':>11} {'C_M':>10} {'C_R':>10} {'SP':>8}")
    for r in pc.records:
        lines.append(
            f"{r.t:>3} {r.n:>7} {r.H_incre:>12.6f} {r.H_rfs:>12.6f} {100 * r.rel_err:>11.3e} "
            f"{r.C_M:>10.3e} {r.C_R:>10.3e} {r.SP:>8.2f}"
        )
    ref = REFERENCE_SPEEDUP_FULL[pc.dim][pc.process]
    lines.append(
        f"SP at 100%: measured {pc.records[-1].SP:.2f}, reference {ref}; "
        f"max |err| {100 * pc.max_abs_rel_err():.3e}% (reference within {REFERENCE_MAX_ERROR_PCT[pc.process]}%"
        f"{'' if pc.dim == 2 else ', 1d reference 0'}); C_M linear fit R^2 {pc.linear_fit_r2():.3f}"
    )
    return "\n".join(lines)
