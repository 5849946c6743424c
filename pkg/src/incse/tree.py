"""One- and two-dimensional encoding trees and their dynamic adjustment."""

from __future__ import annotations

import math
from dataclasses import dataclass
from os import PathLike
from typing import Mapping

from .graph import Graph, GraphFormatError, IncrementalSequence


class TreeMismatchError(ValueError):
    """The encoding tree does not label exactly the graph's node set."""


class UnassignedEdgeError(ValueError):
    """Both endpoints of an incremental edge lack a community."""


@dataclass(frozen=True)
class EncodingTree:
    """Encoding tree of height 1 or 2.

    Height 1 is fully described by its leaf set. Height 2 stores the
    community assignment of every leaf together with the volume and cut edge
    number of each community.
    """

    height: int
    leaves: frozenset[int]
    assignment: dict[int, int] | None = None
    volume: dict[int, int] | None = None
    cut: dict[int, int] | None = None

    @property
    def communities(self) -> list[int]:
        return sorted(self.volume) if self.volume is not None else []

    def members(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for v in sorted(self.assignment or {}):
            out.setdefault(self.assignment[v], []).append(v)
        return out


def _assignment_of(partition) -> Mapping[int, int]:
    return getattr(partition, "assignment", partition)


def volumes_and_cuts(g: Graph, assignment: Mapping[int, int]) -> tuple[dict[int, int], dict[int, int]]:
    """Volume and cut edge number of every community, one pass over the edges."""
    volume: dict[int, int] = {}
    cut: dict[int, int] = {}
    adj = g._adj
    for v, nb in adj.items():
        a = assignment[v]
        volume[a] = volume.get(a, 0) + len(nb)
        c = cut.get(a, 0)
        for w in nb:
            if assignment[w] != a:
                c += 1
        cut[a] = c
    return volume, cut


def build_one_dim_tree(g: Graph) -> EncodingTree:
    if g.num_nodes == 0:
        raise ValueError("cannot build an encoding tree for an empty graph")
    return EncodingTree(height=1, leaves=frozenset(g.nodes))


def build_two_dim_tree(g: Graph, partition) -> EncodingTree:
    """Height-2 tree whose 1-height nodes are the communities of `partition`.

    `partition` is a node -> community mapping or an object exposing one as
    `.assignment`.
    """
    if g.num_nodes == 0:
        raise ValueError("cannot build an encoding tree for an empty graph")
    assignment = dict(_assignment_of(partition))
    nodes = set(g.nodes)
    if set(assignment) != nodes:
        missing = nodes - set(assignment)
        extra = set(assignment) - nodes
        raise TreeMismatchError(
            f"partition does not cover the graph: {len(missing)} unassigned, {len(extra)} unknown nodes"
        )
    volume, cut = volumes_and_cuts(g, assignment)
    return EncodingTree(2, frozenset(assignment), assignment, volume, cut)


def structural_entropy(g: Graph, t: EncodingTree) -> float:
    """Structural entropy of `g` under `t` by the definition formula, in bits.

    For height 2 the community volumes and cuts are recounted from `g` rather
    than taken from the tree, so this also serves as an independent check of
    incrementally maintained trees.
    """
    if t.leaves != g.nodes:
        raise TreeMismatchError("tree leaves differ from graph nodes")
    if g.m == 0:
        raise ValueError("structural entropy is undefined for a graph without edges")
    two_m = 2 * g.m
    adj = g._adj
    log2 = math.log2
    h = 0.0
    if t.height == 1:
        for v in sorted(adj):
            d = len(adj[v])
            h -= d / two_m * log2(d / two_m)
        return h
    if t.height != 2:
        raise ValueError(f"unsupported tree height {t.height}")
    volume, cut = volumes_and_cuts(g, t.assignment)
    return two_dim_entropy(g, t.assignment, volume, cut)


def two_dim_entropy(
    g: Graph, assignment: Mapping[int, int], volume: Mapping[int, int], cut: Mapping[int, int]
) -> float:
    """Two-dimensional entropy from already-counted community volumes and cuts."""
    two_m = 2 * g.m
    adj = g._adj
    log2 = math.log2
    h = 0.0
    for a in sorted(volume):
        h -= cut[a] / two_m * log2(volume[a] / two_m)
    for v in sorted(adj):
        d = len(adj[v])
        h -= d / two_m * log2(d / volume[assignment[v]])
    return h


def adjust_one_dim_tree(t: EncodingTree, xi: IncrementalSequence) -> EncodingTree:
    if t.height != 1:
        raise ValueError("expected a one-dimensional tree")
    new = {x for e in xi.edges for x in e} - t.leaves
    if not new:
        return t
    return EncodingTree(1, t.leaves | new)


def community_deltas(
    assignment: Mapping[int, int], xi: IncrementalSequence
) -> tuple[dict[int, int], dict[int, int], dict[int, int]]:
    """Walk `xi` in order applying the edge and node strategies.

    Existing nodes keep their community; a node seen for the first time joins
    the community of the endpoint it arrives with. Returns the new-node
    assignments and the per-community volume and cut increments.
    """
    new: dict[int, int] = {}
    d_vol: dict[int, int] = {}
    d_cut: dict[int, int] = {}
    for u, v in xi.edges:
        au = assignment.get(u)
        if au is None:
            au = new.get(u)
        av = assignment.get(v)
        if av is None:
            av = new.get(v)
        if au is None:
            if av is None:
                raise UnassignedEdgeError(f"edge ({u}, {v}) has no assigned endpoint")
            au = new[u] = av
        elif av is None:
            av = new[v] = au
        if au == av:
            d_vol[au] = d_vol.get(au, 0) + 2
        else:
            d_vol[au] = d_vol.get(au, 0) + 1
            d_vol[av] = d_vol.get(av, 0) + 1
            d_cut[au] = d_cut.get(au, 0) + 1
            d_cut[av] = d_cut.get(av, 0) + 1
    return new, d_vol, d_cut


def adjust_two_dim_tree(t: EncodingTree, g: Graph, xi: IncrementalSequence) -> EncodingTree:
    if t.height != 2:
        raise ValueError("expected a two-dimensional tree")
    new, d_vol, d_cut = community_deltas(t.assignment, xi)
    assignment = dict(t.assignment)
    assignment.update(new)
    volume = dict(t.volume)
    for a, dv in d_vol.items():
        volume[a] += dv
    cut = dict(t.cut)
    for a, dc in d_cut.items():
        cut[a] += dc
    return EncodingTree(2, t.leaves | frozenset(new), assignment, volume, cut)


def node_strategy_condition(m: int, v_alpha: int) -> bool:
    """Sufficient condition under which joining the neighbour's community is optimal."""
    return (2 * m + 2) / (v_alpha + 2) >= math.e


def load_tree(path: str | PathLike) -> dict[int, int]:
    """Read a `node_id community_id` file into an assignment mapping."""
    assignment: dict[int, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise GraphFormatError(f"expected 'node community', got {text!r}", lineno)
            try:
                v, a = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError(f"non-integer field in {text!r}", lineno) from None
            if v in assignment:
                raise GraphFormatError(f"node {v} assigned twice", lineno)
            assignment[v] = a
    return assignment


def save_tree(partition, path: str | PathLike) -> None:
    assignment = partition.assignment if isinstance(partition, EncodingTree) else _assignment_of(partition)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(f"{v} {assignment[v]}\n" for v in sorted(assignment))
