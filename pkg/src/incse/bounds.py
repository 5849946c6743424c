"""Closed-form bounds on the Local Difference and the convergence experiment."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field
from os import PathLike
from typing import Sequence

import numpy as np

from .baselines import louvain
from .generators import pbp_sequence, random_partition_graph, sizes_for_edge_count
from .graph import Graph
from .measure import (
    IncrementalData,
    extract_incremental_data,
    init_1d,
    init_2d,
    local_difference_1d,
    local_difference_2d,
)
from .tree import build_two_dim_tree

log2 = math.log2


def _s_n(d: float, x: float) -> float:
    """(d+x)log(d+x) - d log d."""
    out = (d + x) * log2(d + x) if d + x > 0 else 0.0
    return out - (d * log2(d) if d > 0 else 0.0)


def bounds_1d(m: int, d_m: int, n: int) -> tuple[float, float]:
    """Lower and upper bound of the one-dimensional Local Difference."""
    lb = -_s_n(d_m, n) / (m + n) + n * log2(2 * m + 2 * n) / (m + n)
    ub = (n * log2(m + n) + 1.5 * n) / (m + n)
    return lb, ub


def bounds_2d(m: int, d_m: int, v_min: int, n: int) -> tuple[float, float]:
    """Lower and upper bound of the two-dimensional Local Difference."""
    lb = -_s_n(d_m, n) / (m + n) + n * log2(v_min + 2) / (m + n)
    ub = (n * log2(m + n) + 2.5 * n) / (m + n)
    return lb, ub


@dataclass
class BoundsRecord:
    m: int
    n: int
    d_m: int
    v_min: int
    v_m: int
    lb: float
    ub: float
    observed: float

    @property
    def contained(self) -> bool:
        return self.lb - 1e-12 <= self.observed <= self.ub


@dataclass
class ConvergenceTrial:
    m: int
    trial: int
    n: int
    p_pin: float
    p_pac: float
    dL1: float
    lb1: float
    ub1: float
    dL2: float
    lb2: float
    ub2: float


@dataclass
class ConvergenceRow:
    m: int
    mean_abs_dL1: float
    mean_abs_dL2: float
    mean_ub1: float
    mean_ub2: float
    mean_dL1: float
    mean_dL2: float


@dataclass
class ConvergenceResult:
    rows: list[ConvergenceRow]
    trials: list[ConvergenceTrial] = field(repr=False)

    def decrease(self, dim: int) -> float:
        """Fractional drop of mean |dL| from the smallest to the largest graph."""
        key = "mean_abs_dL1" if dim == 1 else "mean_abs_dL2"
        first, last = getattr(self.rows[0], key), getattr(self.rows[-1], key)
        return 1.0 - last / first

    def write_trials_csv(self, path: str | PathLike) -> None:
        cols = ["m", "trial", "n", "p_pin", "p_pac", "dL1", "lb1", "ub1", "dL2", "lb2", "ub2"]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for tr in self.trials:
                w.writerow([_fmt(getattr(tr, c)) for c in cols])

    def write_table_csv(self, path: str | PathLike) -> None:
        cols = list(ConvergenceRow.__dataclass_fields__)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(cols)
            for row in self.rows:
                d = asdict(row)
                w.writerow([_fmt(d[c]) for c in cols])


def _fmt(x) -> str:
    return f"{x:.12g}" if isinstance(x, float) else str(x)


def default_edge_counts(points: int = 8, lo: int = 480, hi: int = 24000) -> list[int]:
    return [int(round(x)) for x in np.geomspace(lo, hi, points)]


def original_graph_for(m_target: int, seed: int, p_in: float = 0.3, p_ac: float = 0.01):
    """Planted-partition graph with about `m_target` edges and its Louvain tree."""
    sizes = sizes_for_edge_count(m_target, p_in=p_in, p_ac=p_ac)
    g, _ = random_partition_graph(sizes, p_in, p_ac, seed=seed)
    part = louvain(g)
    return g, build_two_dim_tree(g, part)


def measure_local_differences(g: Graph, tree, xi, s1=None, s2=None) -> tuple[float, float, IncrementalData]:
    s1 = s1 if s1 is not None else init_1d(g)
    s2 = s2 if s2 is not None else init_2d(g, tree)
    inc = extract_incremental_data(g, tree, xi)
    return local_difference_1d(s1, inc), local_difference_2d(s2, inc), inc


def convergence_experiment(
    edge_counts: Sequence[int] | None = None,
    trials_per_size: int = 30,
    n_mean: float = 100.0,
    n_std: float = 10.0,
    seed: int = 0,
    p_pin_max: float = 0.8,
    p_pac_max: float = 0.1,
) -> ConvergenceResult:
    """Local Difference statistics over growing original graphs.

    Per edge count one planted-partition graph is built; each trial draws
    n ~ Normal(n_mean, n_std) (rounded, at least 1) and PBP parameters
    uniformly, seeded from (seed, m, trial).
    """
    if trials_per_size < 1:
        raise ValueError("trials_per_size must be at least 1")
    edge_counts = list(edge_counts) if edge_counts is not None else default_edge_counts()
    rows, trials = [], []
    for m_target in edge_counts:
        g, tree = original_graph_for(m_target, seed=int(np.random.SeedSequence([seed, m_target]).generate_state(1)[0]))
        s1, s2 = init_1d(g), init_2d(g, tree)
        d_m = g.max_degree()
        v_min = min(tree.volume.values())
        batch = []
        for k in range(trials_per_size):
            rng = np.random.default_rng([seed, m_target, k])
            n = max(1, int(round(rng.normal(n_mean, n_std))))
            p_pin = float(rng.uniform(0.0, p_pin_max))
            p_pac = float(rng.uniform(0.0, p_pac_max))
            xi = pbp_sequence(g, tree.assignment, n, p_pin, p_pac, seed=int(rng.integers(2**63)))
            dl1, dl2, _ = measure_local_differences(g, tree, xi, s1, s2)
            lb1, ub1 = bounds_1d(g.m, d_m, n)
            lb2, ub2 = bounds_2d(g.m, d_m, v_min, n)
            batch.append(ConvergenceTrial(g.m, k, n, p_pin, p_pac, dl1, lb1, ub1, dl2, lb2, ub2))
        trials.extend(batch)
        rows.append(
            ConvergenceRow(
                m=g.m,
                mean_abs_dL1=float(np.mean([abs(t.dL1) for t in batch])),
                mean_abs_dL2=float(np.mean([abs(t.dL2) for t in batch])),
                mean_ub1=float(np.mean([t.ub1 for t in batch])),
                mean_ub2=float(np.mean([t.ub2 for t in batch])),
                mean_dL1=float(np.mean([t.dL1 for t in batch])),
                mean_dL2=float(np.mean([t.dL2 for t in batch])),
            )
        )
    return ConvergenceResult(rows, trials)
