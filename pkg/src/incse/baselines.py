"""Recalculate-from-scratch baselines and the Louvain partitioner they use."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .graph import Graph, IncrementalSequence, combine
from .tree import build_one_dim_tree, structural_entropy, two_dim_entropy, volumes_and_cuts

_EPS = 1e-10


@dataclass(frozen=True)
class Partition:
    """Node -> community assignment with dense community ids 0..r-1."""

    assignment: dict[int, int]

    @property
    def r(self) -> int:
        return len(set(self.assignment.values()))

    @classmethod
    def from_assignment(cls, assignment: Mapping[int, int]) -> Partition:
        """Relabel communities densely in order of their smallest node id."""
        relabel: dict[int, int] = {}
        out = {}
        for v in sorted(assignment):
            a = assignment[v]
            if a not in relabel:
                relabel[a] = len(relabel)
            out[v] = relabel[a]
        return cls(out)

    def communities(self) -> list[list[int]]:
        groups: list[list[int]] = [[] for _ in range(self.r)]
        for v in sorted(self.assignment):
            groups[self.assignment[v]].append(v)
        return groups


def modularity(g: Graph, partition, resolution: float = 1.0) -> float:
    assignment = getattr(partition, "assignment", partition)
    m = g.m
    if m == 0:
        return 0.0
    volume, cut = volumes_and_cuts(g, assignment)
    q = 0.0
    for a in sorted(volume):
        internal = (volume[a] - cut[a]) / 2
        q += internal / m - resolution * (volume[a] / (2 * m)) ** 2
    return q


def _adjacency_lists(src: np.ndarray, dst: np.ndarray, w: np.ndarray | None, n: int):
    order = np.argsort(src, kind="stable")
    bounds = np.searchsorted(src[order], np.arange(n + 1))
    d = dst[order].tolist()
    nbrs = [d[bounds[i]:bounds[i + 1]] for i in range(n)]
    if w is None:
        return nbrs, None
    ww = w[order].tolist()
    return nbrs, [ww[bounds[i]:bounds[i + 1]] for i in range(n)]


def _local_moves(nbrs, wts, k, m2, rng, resolution):
    """Sequential local-move phase; returns (community list, whether any node moved).

    `rng` None visits nodes in ascending index order every sweep.
    """
    n = len(nbrs)
    comm = list(range(n))
    tot = list(k)
    any_move = False
    while True:
        moves = 0
        order = range(n) if rng is None else rng.permutation(n).tolist()
        for i in order:
            ci = comm[i]
            ki = k[i]
            if wts is None:
                links = Counter(map(comm.__getitem__, nbrs[i]))
            else:
                links = {}
                for j, w in zip(nbrs[i], wts[i]):
                    if j != i:
                        c = comm[j]
                        links[c] = links.get(c, 0) + w
            tot[ci] -= ki
            scale = resolution * ki / m2
            best_c = ci
            best = links.get(ci, 0) - tot[ci] * scale
            for c, w in links.items():
                if c == ci:
                    continue
                gain = w - tot[c] * scale
                if gain > best + _EPS:
                    best, best_c = gain, c
                elif best_c != ci and gain > best - _EPS and c < best_c:
                    best_c = c
            tot[best_c] += ki
            if best_c != ci:
                comm[i] = best_c
                moves += 1
        if moves == 0:
            return comm, any_move
        any_move = True


LOUVAIN_ORDERS = ("ascending", "shuffled")


def louvain(g: Graph, seed: int = 0, resolution: float = 1.0, order: str = "ascending") -> Partition:
    """Louvain community detection (local moves + aggregation until no gain).

    Nodes are visited in ascending node-id order, or with ``order="shuffled"``
    in a seeded permutation of it redrawn every sweep. A node moves only for a
    strictly positive gain; equal gains go to the lowest community id.
    """
    if order not in LOUVAIN_ORDERS:
        raise ValueError(f"unknown visit order {order!r}")
    if g.m == 0:
        raise ValueError("louvain needs a graph with at least one edge")
    nodes = sorted(g.nodes)
    index = {v: i for i, v in enumerate(nodes)}
    adj = g._adj
    src = np.fromiter((index[v] for v in nodes for _ in adj[v]), dtype=np.int64, count=2 * g.m)
    dst = np.fromiter((index[w] for v in nodes for w in adj[v]), dtype=np.int64, count=2 * g.m)
    w = np.ones(len(src), dtype=np.float64)
    n = len(nodes)
    m2 = float(2 * g.m)
    rng = np.random.default_rng(seed) if order == "shuffled" else None
    membership = np.arange(n)
    first = True
    while True:
        k = np.bincount(src, weights=w, minlength=n).tolist()
        nbrs, wts = _adjacency_lists(src, dst, None if first else w, n)
        comm, moved = _local_moves(nbrs, wts, k, m2, rng, resolution)
        if not moved:
            break
        _, dense = np.unique(np.asarray(comm), return_inverse=True)
        membership = dense[membership]
        n = int(dense.max()) + 1
        key = dense[src] * n + dense[dst]
        uniq, inv = np.unique(key, return_inverse=True)
        w = np.bincount(inv, weights=w)
        src, dst = uniq // n, uniq % n
        first = False
        if n == 1:
            break
    return Partition.from_assignment({v: int(membership[i]) for i, v in enumerate(nodes)})


def rfs_1d(g0: Graph, xi: IncrementalSequence, check: bool = True) -> float:
    """Rebuild the updated graph and evaluate one-dimensional entropy from scratch."""
    gt = combine(g0, xi, check=check)
    return structural_entropy(gt, build_one_dim_tree(gt))


def rfs_2d(
    g0: Graph,
    xi: IncrementalSequence,
    seed: int = 0,
    partition=None,
    check: bool = True,
    resolution: float = 1.0,
    order: str = "ascending",
) -> tuple[float, Partition]:
    """Rebuild the updated graph, partition it with Louvain, evaluate 2d entropy.

    Passing `partition` (covering the updated graph) bypasses Louvain.
    """
    gt = combine(g0, xi, check=check)
    if partition is None:
        part = louvain(gt, seed=seed, resolution=resolution, order=order)
    else:
        part = partition if isinstance(partition, Partition) else Partition(dict(partition))
        if part.assignment.keys() != gt.nodes:
            raise ValueError("injected partition does not cover the updated graph")
    volume, cut = volumes_and_cuts(gt, part.assignment)
    return two_dim_entropy(gt, part.assignment, volume, cut), part
