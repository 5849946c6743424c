"""Incremental structural entropy: Global Invariant plus Local Difference.

Initialization records the original graph's structural data once; each
measurement then touches only the incremental sequence.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from itertools import chain

from .graph import Graph, IncrementalSequence, check_sequence
from .tree import EncodingTree, TreeMismatchError, community_deltas, volumes_and_cuts

log2 = math.log2


def xlog2x(x: float) -> float:
    """x*log2(x) with the 0*log 0 = 0 convention."""
    return x * log2(x) if x > 0 else 0.0


@dataclass(frozen=True)
class StructuralState1D:
    m: int
    s_n: float
    s_g: float
    degree: dict[int, int] = field(repr=False)


@dataclass(frozen=True)
class StructuralState2D:
    m: int
    s_n: float
    s_c: float
    s_g: float
    degree: dict[int, int] = field(repr=False)
    assignment: dict[int, int] = field(repr=False)
    volume: dict[int, int] = field(repr=False)
    cut: dict[int, int] = field(repr=False)


@dataclass
class IncrementalData:
    n: int
    delta_d: dict[int, int]
    delta_V: dict[int, int] | None = None
    delta_g: dict[int, int] | None = None
    new_assignment: dict[int, int] | None = None

    @property
    def phi_lambda(self) -> set[int]:
        return {v for v, dv in self.delta_d.items() if dv}

    @property
    def changed_communities(self) -> set[int]:
        if self.delta_V is None:
            return set()
        return {a for a, dv in self.delta_V.items() if dv} | {a for a, dg in self.delta_g.items() if dg}


def init_1d(g: Graph) -> StructuralState1D:
    if g.m == 0:
        raise ValueError("cannot initialize from an empty graph")
    degree = g.degrees()
    s_n = math.fsum(xlog2x(d) for d in degree.values())
    return StructuralState1D(m=g.m, s_n=s_n, s_g=-2.0 * g.m, degree=degree)


def init_2d(g: Graph, t: EncodingTree) -> StructuralState2D:
    if g.m == 0:
        raise ValueError("cannot initialize from an empty graph")
    if t.height != 2:
        raise ValueError("expected a two-dimensional tree")
    if t.leaves != g.nodes:
        raise TreeMismatchError("tree leaves differ from graph nodes")
    degree = g.degrees()
    volume, cut = volumes_and_cuts(g, t.assignment)
    s_n = math.fsum(xlog2x(d) for d in degree.values())
    s_c = math.fsum((cut[a] - volume[a]) * log2(volume[a]) for a in volume)
    s_g = -float(sum(cut.values()))
    return StructuralState2D(g.m, s_n, s_c, s_g, degree, dict(t.assignment), volume, cut)


def _delta_degrees(xi: IncrementalSequence) -> dict[int, int]:
    return Counter(chain.from_iterable(xi.edges))


def extract_incremental_data(
    g: Graph, t: EncodingTree | None, xi: IncrementalSequence, check: bool = True
) -> IncrementalData:
    """Incremental data of `xi` against `g`; community deltas when `t` has height 2."""
    if check:
        check_sequence(g, xi)
    delta_d = _delta_degrees(xi)
    if t is None or t.height == 1:
        return IncrementalData(xi.n, delta_d)
    new, d_vol, d_cut = community_deltas(t.assignment, xi)
    return IncrementalData(xi.n, delta_d, d_vol, d_cut, new)


def _extract_2d(s: StructuralState2D, xi: IncrementalSequence) -> IncrementalData:
    new, d_vol, d_cut = community_deltas(s.assignment, xi)
    return IncrementalData(xi.n, _delta_degrees(xi), d_vol, d_cut, new)


def global_invariant_1d(s: StructuralState1D, n: int) -> float:
    total = 2 * s.m + 2 * n
    return -(s.s_n + s.s_g * log2(total)) / total


def global_invariant_2d(s: StructuralState2D, n: int) -> float:
    total = 2 * s.m + 2 * n
    return -(s.s_n + s.s_c + s.s_g * log2(total)) / total


def _node_level_change(degree: dict[int, int], delta_d: dict[int, int]) -> float:
    acc = 0.0
    for v, dv in delta_d.items():
        d0 = degree.get(v, 0)
        d1 = d0 + dv
        acc += d1 * log2(d1)
        if d0:
            acc -= d0 * log2(d0)
    return acc


def local_difference_1d(s: StructuralState1D, inc: IncrementalData) -> float:
    if inc.n == 0:
        return 0.0
    total = 2 * s.m + 2 * inc.n
    ds_n = _node_level_change(s.degree, inc.delta_d)
    ds_g = -2 * inc.n * log2(total)
    return -(ds_n + ds_g) / total


def local_difference_2d(s: StructuralState2D, inc: IncrementalData) -> float:
    if inc.n == 0:
        return 0.0
    total = 2 * s.m + 2 * inc.n
    ds_n = _node_level_change(s.degree, inc.delta_d)
    volume, cut = s.volume, s.cut
    d_vol, d_cut = inc.delta_V, inc.delta_g
    ds_c = 0.0
    for a in d_vol.keys() | d_cut.keys():
        v0, g0 = volume[a], cut[a]
        v1 = v0 + d_vol.get(a, 0)
        g1 = g0 + d_cut.get(a, 0)
        ds_c += (g1 - v1) * log2(v1) - (g0 - v0) * log2(v0)
    ds_g = -sum(d_cut.values()) * log2(total)
    return -(ds_n + ds_c + ds_g) / total


def measure_1d(s: StructuralState1D, xi: IncrementalSequence) -> float:
    """Measurement stage only: extraction, Global Invariant and Local Difference.

    The sequence is assumed legal; use `incre_1dse` for a checked call.
    """
    inc = IncrementalData(xi.n, _delta_degrees(xi))
    return global_invariant_1d(s, inc.n) + local_difference_1d(s, inc)


def measure_2d(s: StructuralState2D, xi: IncrementalSequence) -> float:
    inc = _extract_2d(s, xi)
    return global_invariant_2d(s, inc.n) + local_difference_2d(s, inc)


def incre_1dse(g0: Graph, xi: IncrementalSequence, state: StructuralState1D | None = None) -> float:
    """Updated one-dimensional structural entropy of CMB(g0, xi)."""
    check_sequence(g0, xi)
    return measure_1d(state if state is not None else init_1d(g0), xi)


def incre_2dse(
    g0: Graph, t0: EncodingTree, xi: IncrementalSequence, state: StructuralState2D | None = None
) -> float:
    """Updated two-dimensional structural entropy under the adjusted tree."""
    check_sequence(g0, xi)
    return measure_2d(state if state is not None else init_2d(g0, t0), xi)
