"""Original-graph generation and incremental-sequence processes.

Three processes grow a graph edge by edge: a Hawkes-style process driven by
embedding similarity, triad closure, and a partition-based process that
mostly adds edges inside existing communities.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .baselines import Partition, louvain
from .graph import Graph, IncrementalSequence, save_edge_list, save_sequence, validate_sequence
from .tree import save_tree


class GenerationError(RuntimeError):
    pass


@dataclass
class GeneratorConfig:
    sizes: list[int] = field(default_factory=lambda: [200, 300, 400, 500, 600])
    p_in: float = 0.3
    p_ac: float = 0.01
    p_hn: float = 0.05
    p_tn: float = 0.05
    p_pin: float = 0.90
    p_pac: float = 0.05
    embed_dim: int = 16
    seed: int = 0
    total_size: int | None = None  # N; defaults to the original graph's edge count
    steps: int = 20  # T
    process: str = "hawkes"
    louvain_seed: int = 0

    @property
    def p_pn(self) -> float:
        return 1.0 - self.p_pin - self.p_pac

    def __post_init__(self):
        for name in ("p_in", "p_ac", "p_hn", "p_tn", "p_pin", "p_pac"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}={p} is not a probability")
        if self.p_pin + self.p_pac > 1.0 + 1e-12:
            raise ValueError("p_pin + p_pac must not exceed 1")
        if not self.sizes or min(self.sizes) < 1:
            raise ValueError("community sizes must be positive")
        if self.process not in PROCESSES:
            raise ValueError(f"unknown process {self.process!r}; expected one of {sorted(PROCESSES)}")

    @classmethod
    def from_dict(cls, d: dict) -> GeneratorConfig:
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)


def random_partition_graph(
    sizes: Sequence[int], p_in: float, p_ac: float, seed: int = 0, max_retries: int = 10
) -> tuple[Graph, Partition]:
    """Planted-partition random graph; retried with seed+1, seed+2, ... until connected."""
    bounds = np.concatenate([[0], np.cumsum(sizes)])
    total = int(bounds[-1])
    for attempt in range(max_retries + 1):
        rng = np.random.default_rng(seed + attempt)
        us, vs = [], []
        for a in range(len(sizes)):
            lo_a, hi_a = bounds[a], bounds[a + 1]
            block = np.triu(rng.random((hi_a - lo_a, hi_a - lo_a)) < p_in, k=1)
            i, j = np.nonzero(block)
            us.append(i + lo_a)
            vs.append(j + lo_a)
            for b in range(a + 1, len(sizes)):
                lo_b, hi_b = bounds[b], bounds[b + 1]
                i, j = np.nonzero(rng.random((hi_a - lo_a, hi_b - lo_b)) < p_ac)
                us.append(i + lo_a)
                vs.append(j + lo_b)
        u = np.concatenate(us).tolist()
        v = np.concatenate(vs).tolist()
        g = Graph(zip(u, v))
        if g.num_nodes == total and g.is_connected():
            community = np.repeat(np.arange(len(sizes)), sizes).tolist()
            return g, Partition({i: community[i] for i in range(total)})
    raise GenerationError(f"no connected graph after {max_retries} retries (sizes={list(sizes)})")


def sizes_for_edge_count(m: float, proportions: Sequence[float] = (2, 3, 4, 5, 6), p_in=0.3, p_ac=0.01) -> list[int]:
    """Community sizes, in the given proportions, whose expected edge count is about `m`."""
    frac = np.asarray(proportions, dtype=float)
    frac = frac / frac.sum()
    within = float((frac ** 2).sum())
    # expected edges ~ N^2/2 * (p_in * within + p_ac * (1 - within))
    total = math.sqrt(2 * m / (p_in * within + p_ac * (1 - within)))
    return [max(1, int(round(f * total))) for f in frac]


@dataclass
class NodeEmbedding:
    index: dict[int, int]
    vectors: np.ndarray

    def __getitem__(self, v: int) -> np.ndarray:
        return self.vectors[self.index[v]]


def embed_nodes(g: Graph, dim: int = 16, seed: int = 0, rounds: int = 3) -> NodeEmbedding:
    """Smoothed random embedding standing in for node2vec.

    Each node starts from a unit vector seeded by (seed, node id); three rounds
    of averaging over the closed neighbourhood make nearby nodes similar.
    """
    nodes = sorted(g.nodes)
    index = {v: i for i, v in enumerate(nodes)}
    x = np.empty((len(nodes), dim))
    for i, v in enumerate(nodes):
        x[i] = np.random.default_rng([seed, v]).standard_normal(dim)
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    edges = np.asarray(g.edges(), dtype=np.int64).reshape(-1, 2)
    src = np.fromiter((index[u] for u in edges[:, 0].tolist()), dtype=np.int64, count=len(edges))
    dst = np.fromiter((index[u] for u in edges[:, 1].tolist()), dtype=np.int64, count=len(edges))
    deg = np.bincount(src, minlength=len(nodes)) + np.bincount(dst, minlength=len(nodes))
    for _ in range(rounds):
        agg = x.copy()
        np.add.at(agg, src, x[dst])
        np.add.at(agg, dst, x[src])
        x = agg / (deg + 1)[:, None]
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return NodeEmbedding(index, x)


class _BufferedRng:
    """Uniform draws served from blocks of a seeded numpy generator.

    Per-call numpy overhead dominates the generators' inner loops; integers
    are taken as floor(u * n).
    """

    def __init__(self, seed, block: int = 8192):
        gen = np.random.default_rng(seed)

        def stream():
            while True:
                yield from gen.random(block).tolist()

        self.random = stream().__next__

    def integers(self, n: int) -> int:
        return int(self.random() * n)


class _Workspace:
    """Mutable copy of a graph that grows while a sequence is generated."""

    def __init__(self, g: Graph, capacity: int, embedding: NodeEmbedding | None = None):
        self.adj = {v: set(nb) for v, nb in g._adj.items()}
        self.nodes = sorted(self.adj)
        self.pos = {v: i for i, v in enumerate(self.nodes)}
        self.nbr_list = {v: sorted(nb) for v, nb in self.adj.items()}
        self.next_id = self.nodes[-1] + 1 if self.nodes else 0
        self.out: list[tuple[int, int]] = []
        self.emb = None
        if embedding is not None:
            self.emb = np.empty((len(self.nodes) + capacity, embedding.vectors.shape[1]))
            for v in self.nodes:
                self.emb[self.pos[v]] = embedding[v]

    def add_edge(self, u: int, v: int) -> None:
        self.adj[u].add(v)
        self.adj[v].add(u)
        self.nbr_list[u].append(v)
        self.nbr_list[v].append(u)
        self.out.append((u, v))

    def add_new_node(self, anchor: int) -> int:
        v = self.next_id
        self.next_id += 1
        self.pos[v] = len(self.nodes)
        self.nodes.append(v)
        self.adj[v] = set()
        self.nbr_list[v] = []
        if self.emb is not None:
            self.emb[self.pos[v]] = self.emb[self.pos[anchor]]
        self.add_edge(anchor, v)
        return v

    def random_node(self, rng) -> int:
        return self.nodes[int(rng.integers(len(self.nodes)))]

    def random_legal_edge(self, rng) -> tuple[int, int] | None:
        n = len(self.nodes)
        for _ in range(10_000):
            u = self.nodes[int(rng.integers(n))]
            v = self.nodes[int(rng.integers(n))]
            if u != v and v not in self.adj[u]:
                return u, v
        return None

    def sequence(self) -> IncrementalSequence:
        return IncrementalSequence(self.out)


def hawkes_sequence(
    g: Graph, count: int, p_hn: float = 0.05, dim: int = 16, seed: int = 0,
    embedding: NodeEmbedding | None = None,
) -> IncrementalSequence:
    """Embedding-driven Hawkes-style growth.

    Intensity between target x and candidate y is exp(-|e_x - e_y|^2), a base
    intensity without the temporal excitation kernel.
    """
    rng = _BufferedRng(seed)
    if embedding is None:
        embedding = embed_nodes(g, dim, seed)
    ws = _Workspace(g, count, embedding)
    rand = rng.random
    while len(ws.out) < count:
        x = ws.random_node(rng)
        if rand() < p_hn:
            ws.add_new_node(x)
            continue
        n = len(ws.nodes)
        xi = ws.pos[x]
        # unit vectors: |e_x - e_y|^2 = 2 - 2 e_x.e_y
        cdf = np.cumsum(np.exp(2.0 * (ws.emb[:n] @ ws.emb[xi]) - 2.0))
        adj_x = ws.adj[x]
        # draw from all nodes and reject x and its neighbours: same law as
        # drawing from the non-neighbours; explicit masking after 64 misses
        for _ in range(64):
            y = ws.nodes[min(int(np.searchsorted(cdf, rand() * cdf[-1], side="right")), n - 1)]
            if y != x and y not in adj_x:
                break
        else:
            lam = np.diff(cdf, prepend=0.0)
            lam[[ws.pos[z] for z in adj_x]] = 0.0
            lam[xi] = 0.0
            cdf = np.cumsum(lam)
            if cdf[-1] <= 0.0:
                continue  # x is adjacent to everything; draw another target
            y = ws.nodes[min(int(np.searchsorted(cdf, rand() * cdf[-1], side="right")), n - 1)]
        ws.add_edge(x, y)
    return ws.sequence()


def _sigmoid(z: float) -> float:
    return 1.0 / (1.0 + math.exp(-z))


def closure_probability(emb: np.ndarray, v: int, u: int, common: Sequence[int]) -> float:
    """Connection probability of v and u given their common neighbours (row indices into emb)."""
    rows = emb[[v, u, *common]]
    proj = rows[2:] @ rows[:2].T
    affinity = float(proj[:, 0] @ proj[:, 1]) / len(common)
    return _sigmoid(affinity) * min(1.0, len(common) / 5)


def triad_sequence(
    g: Graph, count: int, p_tn: float = 0.05, dim: int = 16, seed: int = 0,
    embedding: NodeEmbedding | None = None, max_rejections: int = 100,
) -> IncrementalSequence:
    """Triad-closure growth: close open wedges with an embedding-based probability."""
    rng = _BufferedRng(seed)
    if embedding is None:
        embedding = embed_nodes(g, dim, seed)
    ws = _Workspace(g, count, embedding)
    rand = rng.random
    nodes, adj, nbr_list, pos = ws.nodes, ws.adj, ws.nbr_list, ws.pos
    while len(ws.out) < count:
        if rand() < p_tn:
            ws.add_new_node(ws.random_node(rng))
            continue
        for _ in range(max_rejections):
            nb = nbr_list[nodes[int(rand() * len(nodes))]]
            k = len(nb)
            if k < 2:
                continue
            a = int(rand() * k)
            b = int(rand() * (k - 1))
            if b >= a:
                b += 1
            v, u = nb[a], nb[b]
            adj_v = adj[v]
            if u in adj_v:
                continue
            common = adj_v & adj[u]
            r = rand()
            # p_c never exceeds min(1, |N|/5); skip the embedding work when r is above it
            if r < min(1.0, len(common) / 5) and r < closure_probability(
                ws.emb, pos[v], pos[u], [pos[c] for c in common]
            ):
                ws.add_edge(v, u)
                break
        else:
            edge = ws.random_legal_edge(rng)
            if edge is None:
                raise GenerationError("graph is saturated; no legal edge left")
            ws.add_edge(*edge)
    return ws.sequence()


class _BlockSampler:
    """Uniform draws of absent node pairs inside one community or between two.

    Sparse blocks use rejection; once at least half the pairs exist the
    remaining ones are listed and drawn without replacement.
    """

    def __init__(self, adj: dict[int, set[int]]):
        self.adj = adj
        self.count: dict[tuple[int, int], int] = {}
        self._missing: dict[tuple[int, int], tuple[int, int, list[tuple[int, int]]]] = {}

    def draw(self, key: tuple[int, int], a_mem: list[int], b_mem: list[int], rng) -> tuple[int, int] | None:
        same = key[0] == key[1]
        sa, sb = len(a_mem), len(b_mem)
        total = sa * (sa - 1) // 2 if same else sa * sb
        have = self.count.get(key, 0)
        if have >= total:
            return None
        adj = self.adj
        if 2 * have >= total:
            entry = self._missing.get(key)
            if entry is None or entry[:2] != (sa, sb):
                if same:
                    pairs = [(a_mem[i], a_mem[j]) for i in range(sa) for j in range(i + 1, sa)]
                else:
                    pairs = [(u, v) for u in a_mem for v in b_mem]
                entry = self._missing[key] = (sa, sb, [(u, v) for u, v in pairs if v not in adj[u]])
            pairs = entry[2]
            j = int(rng.integers(len(pairs)))
            pairs[j], pairs[-1] = pairs[-1], pairs[j]
            return pairs.pop()
        while True:
            if same:
                i = int(rng.integers(sa))
                j = int(rng.integers(sa - 1))
                if j >= i:
                    j += 1
                u, v = a_mem[i], a_mem[j]
            else:
                u, v = a_mem[int(rng.integers(sa))], b_mem[int(rng.integers(sb))]
            if v not in adj[u]:
                return u, v


def pbp_sequence(
    g: Graph, partition, count: int, p_pin: float = 0.9, p_pac: float = 0.05, seed: int = 0,
    grow_communities: bool = False, max_attempts: int = 100_000,
) -> IncrementalSequence:
    """Partition-based growth: in-community edges, cross-community edges, new nodes.

    By default communities are the fixed node sets of `partition`: new nodes
    hang off a random original node and are never drawn as endpoints later.
    With ``grow_communities=True`` a new node may attach to any node and joins
    its anchor's community for all later draws. A draw landing on a saturated
    community (or community pair) is discarded and the category resampled.
    """
    rng = _BufferedRng(seed)
    assignment = dict(getattr(partition, "assignment", partition))
    ws = _Workspace(g, count)
    n_original = g.num_nodes
    comm_ids = sorted(set(assignment.values()))
    members: dict[int, list[int]] = {c: [] for c in comm_ids}
    for v in sorted(assignment):
        members[assignment[v]].append(v)
    blocks = _BlockSampler(ws.adj)
    for u, v in g.edges():
        a, b = sorted((assignment[u], assignment[v]))
        blocks.count[a, b] = blocks.count.get((a, b), 0) + 1
    k = len(comm_ids)

    attempts = 0
    while len(ws.out) < count:
        attempts += 1
        if attempts > max_attempts:
            raise GenerationError("partition-based process cannot place further edges")
        r = rng.random()
        key = None
        if r < p_pin:
            c = comm_ids[int(rng.integers(k))]
            key, a_mem, b_mem = (c, c), members[c], members[c]
        elif r < p_pin + p_pac:
            if k < 2:
                continue
            i = int(rng.integers(k))
            j = int(rng.integers(k - 1))
            if j >= i:
                j += 1
            ca, cb = sorted((comm_ids[i], comm_ids[j]))
            key, a_mem, b_mem = (ca, cb), members[ca], members[cb]
        elif grow_communities:
            x = ws.random_node(rng)
            v = ws.add_new_node(x)
            c = assignment[v] = assignment[x]
            members[c].append(v)
            blocks.count[c, c] = blocks.count.get((c, c), 0) + 1
        else:
            ws.add_new_node(ws.nodes[int(rng.integers(n_original))])
        if key is not None:
            edge = blocks.draw(key, a_mem, b_mem, rng)
            if edge is None:
                continue
            ws.add_edge(*edge)
            blocks.count[key] = blocks.count.get(key, 0) + 1
        attempts = 0
    return ws.sequence()


PROCESSES = ("hawkes", "triad", "pbp")


def make_process(
    name: str, g0: Graph, config: GeneratorConfig, partition=None
) -> Callable[[int, int], IncrementalSequence]:
    """A `(count, seed) -> sequence` callable for the named process."""
    if name == "hawkes":
        emb = embed_nodes(g0, config.embed_dim, config.seed)
        return lambda count, seed: hawkes_sequence(g0, count, config.p_hn, config.embed_dim, seed, emb)
    if name == "triad":
        emb = embed_nodes(g0, config.embed_dim, config.seed)
        return lambda count, seed: triad_sequence(g0, count, config.p_tn, config.embed_dim, seed, emb)
    if name == "pbp":
        if partition is None:
            partition = louvain(g0, seed=config.louvain_seed)
        return lambda count, seed: pbp_sequence(g0, partition, count, config.p_pin, config.p_pac, seed)
    raise ValueError(f"unknown process {name!r}")


def prefix_sizes(total: int, steps: int) -> list[int]:
    chunk = total // steps
    return [chunk * t for t in range(1, steps)] + [total]


def build_dataset(
    g0: Graph, process: Callable[[int, int], IncrementalSequence], N: int, T: int, seed: int = 0
) -> list[IncrementalSequence]:
    """Generate one length-N sequence and return its T cumulative prefixes."""
    if N < T:
        raise ValueError("need at least one edge per time step")
    full = process(N, seed)
    if full.n != N:
        raise GenerationError(f"process produced {full.n} edges, expected {N}")
    violation = validate_sequence(g0, full)
    if violation is not None:
        raise GenerationError(f"generated sequence is illegal: {violation}")
    return [full[:k] for k in prefix_sizes(N, T)]


def generate_dataset(config: GeneratorConfig, out_dir: str | Path) -> dict:
    """Build the original graph, its Louvain tree and T cumulative sequences on disk."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    g0, _truth = random_partition_graph(config.sizes, config.p_in, config.p_ac, config.seed)
    tree = louvain(g0, seed=config.louvain_seed)
    N = config.total_size if config.total_size is not None else g0.m
    process = make_process(config.process, g0, config, tree)
    prefixes = build_dataset(g0, process, N, config.steps, config.seed)

    save_edge_list(g0, out / "original.edges")
    save_tree(tree, out / "original.tree")
    width = max(2, len(str(config.steps)))
    counts = [{"t": 0, "nodes": g0.num_nodes, "edges": g0.m}]
    seen = set(g0.nodes)
    done = 0
    full = prefixes[-1]
    for t, xi in enumerate(prefixes, 1):
        save_sequence(xi, out / f"seq_t{t:0{width}d}.edges")
        for u, v in full.edges[done:xi.n]:
            seen.add(u)
            seen.add(v)
        done = xi.n
        counts.append({"t": t, "nodes": len(seen), "edges": g0.m + xi.n})
    manifest = {
        "process": config.process,
        "config": asdict(config),
        "p_pn": config.p_pn,
        "N": N,
        "T": config.steps,
        "louvain_communities": tree.r,
        "snapshots": counts,
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
