"""Simple undirected graphs, incremental edge sequences and their combination."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import chain
from os import PathLike
from typing import Iterable, Iterator

Edge = tuple[int, int]


class GraphFormatError(ValueError):
    """Raised for malformed edge-list input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IllegalSequenceError(ValueError):
    """Raised when an incremental sequence violates the legality rule."""

    def __init__(self, violation: Violation):
        self.violation = violation
        super().__init__(str(violation))


def _canon(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Undirected simple graph with cached degrees.

    Instances are treated as immutable: every accessor returns views or copies
    and `combine` builds a new graph.
    """

    __slots__ = ("_adj", "_m")

    def __init__(self, edges: Iterable[Edge] = ()):
        adj: dict[int, set[int]] = {}
        m = 0
        for u, v in edges:
            u, v = int(u), int(v)
            if u < 0 or v < 0:
                raise GraphFormatError(f"negative node id in edge ({u}, {v})")
            if u == v:
                raise GraphFormatError(f"self-loop on node {u}")
            nu = adj.setdefault(u, set())
            if v in nu:
                raise GraphFormatError(f"duplicate edge ({u}, {v})")
            nu.add(v)
            adj.setdefault(v, set()).add(u)
            m += 1
        self._adj = adj
        self._m = m

    @classmethod
    def _from_adjacency(cls, adj: dict[int, set[int]], m: int) -> Graph:
        g = cls.__new__(cls)
        g._adj = adj
        g._m = m
        return g

    @property
    def m(self) -> int:
        return self._m

    @property
    def num_nodes(self) -> int:
        return len(self._adj)

    @property
    def nodes(self):
        return self._adj.keys()

    def __contains__(self, v: int) -> bool:
        return v in self._adj

    def __len__(self) -> int:
        return len(self._adj)

    def neighbors(self, v: int) -> frozenset[int]:
        return frozenset(self._adj[v])

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def degrees(self) -> dict[int, int]:
        return {v: len(nb) for v, nb in self._adj.items()}

    def has_edge(self, u: int, v: int) -> bool:
        nu = self._adj.get(u)
        return nu is not None and v in nu

    def edges(self) -> list[Edge]:
        """Edges in canonical sorted order, each as (smaller, larger)."""
        return sorted((u, v) for u, nb in self._adj.items() for v in nb if u < v)

    def max_degree(self) -> int:
        return max((len(nb) for nb in self._adj.values()), default=0)

    def is_connected(self) -> bool:
        if not self._adj:
            return False
        start = next(iter(self._adj))
        seen = {start}
        queue = deque([start])
        while queue:
            for w in self._adj[queue.popleft()]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == len(self._adj)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._m == other._m and self._adj == other._adj

    def __repr__(self) -> str:
        return f"Graph(nodes={len(self._adj)}, m={self._m})"


class IncrementalSequence:
    """Ordered list of edge insertions.

    Orientation of each pair is preserved as given. Self-loops are rejected
    here; duplicates are a legality matter checked by `validate_sequence`.
    """

    __slots__ = ("_edges",)

    def __init__(self, edges: Iterable[Edge] = ()):
        es = tuple((int(u), int(v)) for u, v in edges)
        for u, v in es:
            if u == v:
                raise GraphFormatError(f"self-loop on node {u}")
            if u < 0 or v < 0:
                raise GraphFormatError(f"negative node id in edge ({u}, {v})")
        self._edges = es

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    @property
    def n(self) -> int:
        return len(self._edges)

    def __len__(self) -> int:
        return len(self._edges)

    def __iter__(self) -> Iterator[Edge]:
        return iter(self._edges)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return IncrementalSequence._wrap(self._edges[item])
        return self._edges[item]

    def __eq__(self, other) -> bool:
        if not isinstance(other, IncrementalSequence):
            return NotImplemented
        return self._edges == other._edges

    def __hash__(self) -> int:
        return hash(self._edges)

    def __repr__(self) -> str:
        if len(self._edges) <= 6:
            return f"IncrementalSequence({list(self._edges)})"
        return f"IncrementalSequence(n={len(self._edges)})"

    @classmethod
    def _wrap(cls, edges: tuple[Edge, ...]) -> IncrementalSequence:
        s = cls.__new__(cls)
        s._edges = edges
        return s

    def __rshift__(self, other: IncrementalSequence) -> IncrementalSequence:
        return concat(self, other)


@dataclass(frozen=True)
class Violation:
    index: int
    rule: str  # "connectivity" or "duplicate"
    edge: Edge

    def __str__(self) -> str:
        if self.rule == "connectivity":
            why = "neither endpoint is in the graph or earlier in the sequence"
        else:
            why = "edge already present"
        return f"illegal edge {self.edge} at index {self.index}: {why} ({self.rule} rule)"


def concat(xi1: IncrementalSequence, xi2: IncrementalSequence) -> IncrementalSequence:
    return IncrementalSequence._wrap(xi1.edges + xi2.edges)


def appeared_nodes(xi: IncrementalSequence) -> set[int]:
    return set(chain.from_iterable(xi.edges))


def validate_sequence(g: Graph, xi: IncrementalSequence) -> Violation | None:
    """Return None if `xi` is legal with respect to `g`, else the first violation."""
    adj = g._adj
    seen_nodes: set[int] = set()
    seen_edges: set[Edge] = set()
    for i, (u, v) in enumerate(xi.edges):
        if u not in adj and v not in adj and u not in seen_nodes and v not in seen_nodes:
            return Violation(i, "connectivity", (u, v))
        e = _canon(u, v)
        if e in seen_edges or (u in adj and v in adj[u]):
            return Violation(i, "duplicate", (u, v))
        seen_edges.add(e)
        seen_nodes.add(u)
        seen_nodes.add(v)
    return None


def check_sequence(g: Graph, xi: IncrementalSequence) -> None:
    violation = validate_sequence(g, xi)
    if violation is not None:
        raise IllegalSequenceError(violation)


def combine(g: Graph, xi: IncrementalSequence, check: bool = True) -> Graph:
    """CMB(g, xi): a new graph with the sequence's edges (and nodes) added."""
    if check:
        check_sequence(g, xi)
    adj = {v: set(nb) for v, nb in g._adj.items()}
    for u, v in xi.edges:
        nu = adj.get(u)
        if nu is None:
            nu = adj[u] = set()
        nu.add(v)
        nv = adj.get(v)
        if nv is None:
            nv = adj[v] = set()
        nv.add(u)
    return Graph._from_adjacency(adj, g.m + xi.n)


# -- edge-list files ---------------------------------------------------------


def _parse_pairs(path: str | PathLike) -> Iterator[tuple[int, Edge]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) == 1 and parts[0].isdigit():
                raise GraphFormatError(f"isolated node {parts[0]}", lineno)
            if len(parts) != 2:
                raise GraphFormatError(f"expected two node ids, got {text!r}", lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError(f"non-integer node id in {text!r}", lineno) from None
            if u < 0 or v < 0:
                raise GraphFormatError(f"negative node id in {text!r}", lineno)
            if u == v:
                raise GraphFormatError(f"self-loop on node {u}", lineno)
            yield lineno, (u, v)


def load_edge_list(path: str | PathLike) -> Graph:
    adj: dict[int, set[int]] = {}
    m = 0
    for lineno, (u, v) in _parse_pairs(path):
        nu = adj.setdefault(u, set())
        if v in nu:
            raise GraphFormatError(f"duplicate edge ({u}, {v})", lineno)
        nu.add(v)
        adj.setdefault(v, set()).add(u)
        m += 1
    return Graph._from_adjacency(adj, m)


def save_edge_list(g: Graph, path: str | PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(f"{u} {v}\n" for u, v in g.edges())


def load_sequence(path: str | PathLike) -> IncrementalSequence:
    edges = []
    seen: set[Edge] = set()
    for lineno, (u, v) in _parse_pairs(path):
        e = _canon(u, v)
        if e in seen:
            raise GraphFormatError(f"duplicate edge ({u}, {v})", lineno)
        seen.add(e)
        edges.append((u, v))
    return IncrementalSequence._wrap(tuple(edges))


def save_sequence(xi: IncrementalSequence, path: str | PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(f"{u} {v}\n" for u, v in xi.edges)
