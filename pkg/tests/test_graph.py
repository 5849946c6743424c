import pytest
from hypothesis import given
from hypothesis import strategies as st

from incse.graph import (
    Graph,
    GraphFormatError,
    IllegalSequenceError,
    IncrementalSequence,
    appeared_nodes,
    combine,
    concat,
    load_edge_list,
    load_sequence,
    save_edge_list,
    save_sequence,
    validate_sequence,
)

EDGE = Graph([(0, 1)])


@pytest.mark.parametrize(
    "xi, expected",
    [
        ([(1, 2)], None),
        ([(2, 3)], (0, "connectivity")),
        ([(1, 2), (2, 3)], None),
        ([(0, 1)], (0, "duplicate")),
        ([(1, 2), (2, 1)], (1, "duplicate")),
        ([(1, 2), (4, 5)], (1, "connectivity")),
    ],
)
def test_validate_sequence(xi, expected):
    v = validate_sequence(EDGE, IncrementalSequence(xi))
    if expected is None:
        assert v is None
    else:
        assert (v.index, v.rule) == expected


def test_combine_examples():
    path = combine(EDGE, IncrementalSequence([(1, 2)]))
    assert path.m == 2 and path.degrees() == {0: 1, 1: 2, 2: 1}
    tri = Graph([(0, 1), (1, 2), (0, 2)])
    assert combine(tri, IncrementalSequence()) == tri
    cycle = combine(EDGE, IncrementalSequence([(1, 2), (2, 3), (0, 3)]))
    assert cycle.m == 4 and set(cycle.degrees().values()) == {2}


def test_combine_rejects_illegal_and_leaves_input():
    with pytest.raises(IllegalSequenceError) as exc:
        combine(EDGE, IncrementalSequence([(5, 6)]))
    assert exc.value.violation.rule == "connectivity"
    assert EDGE.m == 1 and set(EDGE.nodes) == {0, 1}


def test_concat_and_appeared_nodes():
    a, b = IncrementalSequence([(0, 1)]), IncrementalSequence([(1, 2)])
    assert concat(a, b).edges == ((0, 1), (1, 2))
    assert (a >> b) == concat(a, b)
    empty = IncrementalSequence()
    assert concat(empty, a) == a and concat(a, empty) == a
    assert appeared_nodes(concat(a, b)) == {0, 1, 2}
    assert appeared_nodes(empty) == set()


def test_graph_rejects_bad_edges():
    for edges in ([(5, 5)], [(0, 1), (1, 0)], [(-1, 2)]):
        with pytest.raises(GraphFormatError):
            Graph(edges)
    with pytest.raises(GraphFormatError):
        IncrementalSequence([(5, 5)])


def test_sequence_file_roundtrip(tmp_path):
    p = tmp_path / "s.edges"
    p.write_text("# header\n0 1\n1 2\n")
    xi = load_sequence(p)
    assert xi.edges == ((0, 1), (1, 2))
    save_sequence(IncrementalSequence([(3, 1), (1, 0)]), p)
    assert load_sequence(p).edges == ((3, 1), (1, 0))


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("0 0\n", 1, "self-loop"),
        ("0 1\n1 0\n", 2, "duplicate"),
        ("0 1\n7\n", 2, "isolated"),
        ("0 1\n1 x\n", 2, "non-integer"),
        ("0 1 2\n", 1, "two node ids"),
    ],
)
def test_malformed_files_report_line(tmp_path, text, line, fragment):
    p = tmp_path / "g.edges"
    p.write_text(text)
    with pytest.raises(GraphFormatError) as exc:
        load_edge_list(p)
    assert exc.value.line == line and fragment in str(exc.value)


# ---- properties -----------------------------------------------------------------

edge_lists = st.lists(
    st.tuples(st.integers(0, 30), st.integers(0, 30)).filter(lambda e: e[0] != e[1]),
    min_size=1,
    max_size=80,
    unique_by=lambda e: frozenset(e),
)


@st.composite
def graph_and_sequence(draw):
    g = Graph(draw(edge_lists))
    nodes = sorted(g.nodes)
    seen = set(nodes)
    present = {frozenset(e) for e in g.edges()}
    xi = []
    next_new = max(nodes) + 1
    for _ in range(draw(st.integers(0, 40))):
        u = draw(st.sampled_from(sorted(seen)))
        if draw(st.booleans()):
            v = next_new
            next_new += 1
        else:
            v = draw(st.sampled_from(sorted(seen)))
        if u == v or frozenset((u, v)) in present:
            continue
        present.add(frozenset((u, v)))
        seen.update((u, v))
        xi.append((u, v))
    return g, IncrementalSequence(xi)


@given(graph_and_sequence())
def test_combine_edge_count_and_degree_sum(data):
    g, xi = data
    assert validate_sequence(g, xi) is None
    gt = combine(g, xi)
    assert gt.m == g.m + xi.n
    assert sum(gt.degrees().values()) == 2 * gt.m
    assert set(gt.nodes) == set(g.nodes) | appeared_nodes(xi)
    for v in gt.nodes:
        assert all(v in gt.neighbors(w) for w in gt.neighbors(v))


@given(graph_and_sequence(), st.integers(0, 40))
def test_combine_splits_over_concat(data, cut):
    g, xi = data
    a, b = xi[:cut], xi[cut:]
    assert combine(g, a >> b) == combine(combine(g, a), b)


@given(graph_and_sequence())
def test_validate_is_pure(data):
    g, xi = data
    before = (g.m, sorted(g.edges()))
    validate_sequence(g, xi)
    validate_sequence(g, IncrementalSequence([(10_000, 10_001)]))
    assert (g.m, sorted(g.edges())) == before


@given(edge_lists)
def test_edge_list_roundtrip(tmp_path_factory, edges):
    p = tmp_path_factory.mktemp("rt") / "g.edges"
    g = Graph(edges)
    save_edge_list(g, p)
    assert load_edge_list(p) == g
