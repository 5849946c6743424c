import math

import pytest
from hypothesis import given

from incse.graph import Graph, IllegalSequenceError, IncrementalSequence, combine
from incse.measure import (
    extract_incremental_data,
    global_invariant_1d,
    global_invariant_2d,
    incre_1dse,
    incre_2dse,
    init_1d,
    init_2d,
    local_difference_1d,
    local_difference_2d,
    measure_1d,
    measure_2d,
    xlog2x,
)
from incse.tree import adjust_two_dim_tree, build_one_dim_tree, build_two_dim_tree, structural_entropy

from . import oracles
from .test_tree import TRIANGLE_SPLIT, TWO_TRIANGLES, partitioned

EDGE = Graph([(0, 1)])
CYCLE4 = Graph([(0, 1), (1, 2), (2, 3), (3, 0)])


def test_xlog2x_convention():
    assert xlog2x(0) == 0.0 and xlog2x(1) == 0.0 and xlog2x(4) == 8.0


def test_init_1d_examples():
    s = init_1d(EDGE)
    assert (s.m, s.s_n, s.s_g) == (1, 0.0, -2.0)
    s = init_1d(CYCLE4)
    assert (s.m, s.s_n, s.s_g) == (4, 8.0, -8.0)
    with pytest.raises(ValueError):
        init_1d(Graph())


def test_init_2d_examples():
    s = init_2d(TWO_TRIANGLES, build_two_dim_tree(TWO_TRIANGLES, TRIANGLE_SPLIT))
    assert s.s_c == pytest.approx(2 * (1 - 7) * math.log2(7), rel=1e-15)
    assert s.s_g == -2
    m = TWO_TRIANGLES.m
    s = init_2d(TWO_TRIANGLES, build_two_dim_tree(TWO_TRIANGLES, {v: 0 for v in range(6)}))
    assert s.s_c == pytest.approx(-2 * m * math.log2(2 * m), rel=1e-15) and s.s_g == 0
    s = init_2d(TWO_TRIANGLES, build_two_dim_tree(TWO_TRIANGLES, {v: v for v in range(6)}))
    assert s.s_c == 0 and s.s_g == -2 * m


def test_extract_examples():
    inc = extract_incremental_data(EDGE, build_one_dim_tree(EDGE), IncrementalSequence([(1, 2)]))
    assert inc.n == 1 and dict(inc.delta_d) == {1: 1, 2: 1} and inc.phi_lambda == {1, 2}
    t = build_two_dim_tree(TWO_TRIANGLES, TRIANGLE_SPLIT)
    inc = extract_incremental_data(TWO_TRIANGLES, t, IncrementalSequence([(0, 6), (1, 6)]))
    assert inc.delta_V == {0: 4} and inc.delta_g == {} and inc.changed_communities == {0}
    inc = extract_incremental_data(TWO_TRIANGLES, t, IncrementalSequence([(0, 4)]))
    assert inc.delta_V == {0: 1, 1: 1} and inc.delta_g == {0: 1, 1: 1}
    assert inc.changed_communities == {0, 1}
    with pytest.raises(IllegalSequenceError):
        extract_incremental_data(EDGE, None, IncrementalSequence([(0, 1)]))


def test_global_invariant_examples():
    assert global_invariant_1d(init_1d(EDGE), 1) == 1.0
    assert global_invariant_1d(init_1d(CYCLE4), 2) == pytest.approx(-(8 - 8 * math.log2(12)) / 12, rel=1e-15)
    for g in (EDGE, CYCLE4, TWO_TRIANGLES):
        assert global_invariant_1d(init_1d(g), 0) == pytest.approx(
            structural_entropy(g, build_one_dim_tree(g)), rel=1e-12
        )
    t = build_two_dim_tree(TWO_TRIANGLES, TRIANGLE_SPLIT)
    s2 = init_2d(TWO_TRIANGLES, t)
    assert global_invariant_2d(s2, 0) == pytest.approx(structural_entropy(TWO_TRIANGLES, t), rel=1e-12)
    single = init_2d(TWO_TRIANGLES, build_two_dim_tree(TWO_TRIANGLES, {v: v for v in range(6)}))
    for n in (0, 1, 5, 40):
        assert global_invariant_2d(single, n) == pytest.approx(global_invariant_1d(init_1d(TWO_TRIANGLES), n), rel=1e-12)


def test_global_invariant_2d_definition_form():
    # old degrees, volumes and cuts with the grown denominator 2m + 2n
    n, total = 3, 2 * TWO_TRIANGLES.m + 6
    deg = TWO_TRIANGLES.degrees()
    expected = 2 * -(1 / total) * math.log2(7 / total)
    expected += sum(-(d / total) * math.log2(d / 7) for d in deg.values())
    s2 = init_2d(TWO_TRIANGLES, build_two_dim_tree(TWO_TRIANGLES, TRIANGLE_SPLIT))
    assert global_invariant_2d(s2, n) == pytest.approx(expected, rel=1e-14)


def test_local_difference_examples():
    s1 = init_1d(EDGE)
    empty = IncrementalSequence()
    assert local_difference_1d(s1, extract_incremental_data(EDGE, None, empty)) == 0.0
    inc = extract_incremental_data(EDGE, None, IncrementalSequence([(1, 2)]))
    assert local_difference_1d(s1, inc) == 0.5
    assert global_invariant_1d(s1, 1) + 0.5 == oracles.entropy_1d([(0, 1), (1, 2)]) == 1.5

    t = build_two_dim_tree(TWO_TRIANGLES, TRIANGLE_SPLIT)
    s2 = init_2d(TWO_TRIANGLES, t)
    assert local_difference_2d(s2, extract_incremental_data(TWO_TRIANGLES, t, empty)) == 0.0
    # one in-community edge: only the community term and node terms move
    g = Graph([(0, 1), (1, 2), (2, 3), (3, 0), (3, 4)])
    part = {0: 0, 1: 0, 2: 0, 3: 0, 4: 1}
    tt = build_two_dim_tree(g, part)
    s = init_2d(g, tt)
    inc = extract_incremental_data(g, tt, IncrementalSequence([(0, 2)]))
    v, c = tt.volume[0], tt.cut[0]
    ds_c = (c - v - 2) * math.log2(v + 2) - (c - v) * math.log2(v)
    ds_n = 2 * (xlog2x(3) - xlog2x(2))
    expected = -(ds_n + ds_c) / (2 * g.m + 2)
    assert local_difference_2d(s, inc) == pytest.approx(expected, rel=1e-14)


def test_checked_entry_points_reject_illegal_sequences():
    with pytest.raises(IllegalSequenceError):
        incre_1dse(EDGE, IncrementalSequence([(4, 5)]))
    t = build_two_dim_tree(TWO_TRIANGLES, TRIANGLE_SPLIT)
    with pytest.raises(IllegalSequenceError):
        incre_2dse(TWO_TRIANGLES, t, IncrementalSequence([(0, 1)]))


# ---- properties -----------------------------------------------------------------


@given(partitioned())
def test_incremental_data_invariants(data):
    g, xi, assignment = data
    t = build_two_dim_tree(g, assignment)
    inc = extract_incremental_data(g, t, xi)
    assert sum(inc.delta_d.values()) == 2 * xi.n
    assert sum(inc.delta_V.values()) == 2 * xi.n
    assert all(inc.delta_d[v] >= 1 for v in inc.phi_lambda)
    assert all(x >= 0 for x in inc.delta_g.values())


@given(partitioned())
def test_decomposition_matches_high_precision_oracle(data):
    g, xi, assignment = data
    gt_edges = combine(g, xi).edges()
    h1 = incre_1dse(g, xi)
    assert h1 == pytest.approx(oracles.entropy_1d(gt_edges), rel=1e-10)
    t = build_two_dim_tree(g, assignment)
    adjusted = adjust_two_dim_tree(t, g, xi)
    h2 = incre_2dse(g, t, xi)
    assert h2 == pytest.approx(oracles.entropy_2d(gt_edges, adjusted.assignment), rel=1e-10)


@given(partitioned())
def test_measure_stage_equals_checked_call(data):
    g, xi, assignment = data
    t = build_two_dim_tree(g, assignment)
    assert measure_1d(init_1d(g), xi) == incre_1dse(g, xi)
    assert measure_2d(init_2d(g, t), xi) == incre_2dse(g, t, xi)
