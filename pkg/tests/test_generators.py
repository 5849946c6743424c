import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from incse.baselines import Partition
from incse.generators import (
    GenerationError,
    GeneratorConfig,
    build_dataset,
    closure_probability,
    embed_nodes,
    generate_dataset,
    hawkes_sequence,
    make_process,
    pbp_sequence,
    prefix_sizes,
    random_partition_graph,
    sizes_for_edge_count,
    triad_sequence,
)
from incse.graph import Graph, validate_sequence
from incse.tree import adjust_two_dim_tree, build_two_dim_tree

from .test_baselines import two_cliques


def test_random_partition_graph_forced_cases():
    g, part = random_partition_graph([3], 1.0, 0.0)
    assert sorted(g.edges()) == [(0, 1), (0, 2), (1, 2)] and part.r == 1
    g, part = random_partition_graph([2, 2], 1.0, 1.0)
    assert g.m == 6 and part.assignment == {0: 0, 1: 0, 2: 1, 3: 1}
    with pytest.raises(GenerationError):
        random_partition_graph([5, 5], 1.0, 0.0, max_retries=2)


def test_full_sized_original_graph_edge_count():
    sizes = [200, 300, 400, 500, 600]
    g, _ = random_partition_graph(sizes, 0.3, 0.01, seed=0)
    pairs_in = sum(s * (s - 1) // 2 for s in sizes)
    pairs_cross = (sum(sizes) ** 2 - sum(s * s for s in sizes)) // 2
    expected = 0.3 * pairs_in + 0.01 * pairs_cross
    assert abs(expected - 150187) / 150187 < 0.02
    assert abs(g.m - 150187) / 150187 < 0.02
    assert g.num_nodes == 2000 and g.is_connected()


def test_sizes_for_edge_count_hits_target():
    for m in (480, 5000, 24000):
        sizes = sizes_for_edge_count(m)
        g, _ = random_partition_graph(sizes, 0.3, 0.01, seed=1)
        assert abs(g.m - m) / m < 0.15


def test_embedding_deterministic_and_smooth():
    g = two_cliques()
    a, b = embed_nodes(g, 16, seed=3), embed_nodes(g, 16, seed=3)
    assert np.array_equal(a.vectors, b.vectors)
    assert a.vectors.shape == (10, 16) and np.isfinite(a.vectors).all()
    assert np.allclose(np.linalg.norm(a.vectors, axis=1), 1.0)
    cos = a.vectors @ a.vectors.T
    adjacent = np.mean([cos[a.index[u], a.index[v]] for u, v in g.edges()])
    pairs = [(u, v) for u in range(10) for v in range(u + 1, 10)]
    assert adjacent > np.mean([cos[u, v] for u, v in pairs])


def test_closure_probability_monotone_in_common_neighbours():
    emb = np.tile(np.eye(1, 4), (8, 1))
    few = closure_probability(emb, 0, 1, [2])
    many = closure_probability(emb, 0, 1, [2, 3, 4, 5, 6])
    assert 0 < few < many <= 1


def _small_world():
    g, part = random_partition_graph([15, 20, 25], 0.4, 0.05, seed=11)
    return g, part


@pytest.mark.parametrize("process", ["hawkes", "triad", "pbp"])
def test_sequences_are_legal_and_deterministic(process):
    g, part = _small_world()
    cfg = GeneratorConfig(sizes=[15, 20, 25])
    run = make_process(process, g, cfg, part)
    xi = run(400, 5)
    assert xi.n == 400 and validate_sequence(g, xi) is None
    assert run(400, 5) == xi


def test_hawkes_all_new_nodes():
    g, _ = _small_world()
    xi = hawkes_sequence(g, 50, p_hn=1.0, seed=1)
    new = {v for e in xi for v in e} - set(g.nodes)
    assert len(new) == 50


def test_triad_edges_close_wedges_or_add_nodes():
    g, _ = _small_world()
    xi = triad_sequence(g, 300, p_tn=0.1, seed=2)
    adj = {v: set(g.neighbors(v)) for v in g.nodes}
    closures = 0
    for u, v in xi:
        fresh = u not in adj or v not in adj
        adj.setdefault(u, set())
        adj.setdefault(v, set())
        if not fresh and adj[u] & adj[v]:
            closures += 1
        adj[u].add(v)
        adj[v].add(u)
    assert closures > 0.8 * sum(1 for u, v in xi if u in g.nodes and v in g.nodes)


def test_pbp_in_community_only():
    part = Partition({v: v // 5 for v in range(10)})
    path = Graph([(i, i + 1) for i in range(9)])
    xi = pbp_sequence(path, part, 10, p_pin=1.0, p_pac=0.0, seed=4)
    assert all(part.assignment[u] == part.assignment[v] for u, v in xi)
    before = build_two_dim_tree(path, part)
    assert adjust_two_dim_tree(before, path, xi).cut == before.cut


def test_pbp_saturated_communities_resample_category():
    g = two_cliques()
    part = Partition({v: v // 5 for v in range(10)})
    xi = pbp_sequence(g, part, 30, p_pin=0.9, p_pac=0.05, seed=0)
    assert validate_sequence(g, xi) is None
    a = part.assignment
    assert not any(u in a and v in a and a[u] == a[v] for u, v in xi)


def test_pbp_probabilities():
    assert GeneratorConfig(p_pin=0.9, p_pac=0.05).p_pn == pytest.approx(0.05)
    with pytest.raises(ValueError):
        GeneratorConfig(p_pin=0.9, p_pac=0.2)
    with pytest.raises(ValueError):
        GeneratorConfig(process="nope")
    with pytest.raises(ValueError):
        GeneratorConfig.from_dict({"colour": 1})


@given(st.integers(0, 2**20))
def test_new_node_fraction_binomial(seed):
    g, _ = _small_world()
    count, p = 2000, 0.2
    xi = hawkes_sequence(g, count, p_hn=p, seed=seed)
    new = len({v for e in xi for v in e} - set(g.nodes))
    # binomial count; 5 sigma keeps chance failures negligible across many seeds
    assert abs(new - count * p) <= 5 * (count * p * (1 - p)) ** 0.5


def test_grow_communities_mode_is_legal():
    g, part = _small_world()
    xi = pbp_sequence(g, part, 500, 0.5, 0.1, seed=9, grow_communities=True)
    assert validate_sequence(g, xi) is None


def test_prefix_sizes():
    assert prefix_sizes(10, 5) == [2, 4, 6, 8, 10]
    sizes = prefix_sizes(150187, 20)
    assert sizes[:3] == [7509, 15018, 22527] and sizes[-1] == 150187


def test_build_dataset_prefixes():
    g, part = _small_world()
    run = make_process("pbp", g, GeneratorConfig(), part)
    prefixes = build_dataset(g, run, 103, 5, seed=1)
    assert [p.n for p in prefixes] == [20, 40, 60, 80, 103]
    for a, b in zip(prefixes, prefixes[1:]):
        assert b.edges[: a.n] == a.edges
    with pytest.raises(ValueError):
        build_dataset(g, run, 3, 5)


def test_generate_dataset_layout_and_determinism(tmp_path):
    cfg = GeneratorConfig(sizes=[10, 12, 14], total_size=10, steps=5, process="triad", seed=2)
    m1 = generate_dataset(cfg, tmp_path / "a")
    generate_dataset(cfg, tmp_path / "b")
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert names == ["manifest.json", "original.edges", "original.tree"] + [f"seq_t0{i}.edges" for i in range(1, 6)]
    for name in names:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest == m1 and manifest["N"] == 10 and len(manifest["snapshots"]) == 6
    assert manifest["snapshots"][-1]["edges"] == manifest["snapshots"][0]["edges"] + 10
