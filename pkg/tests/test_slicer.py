import pytest
from hypothesis import given, settings, strategies as st

from hlsdiff.corpus import neutral_programs, planted_programs
from hlsdiff.minic import parse_file, parse_program
from hlsdiff.slicer import DepGraph, UnknownTarget, backward_slice, build_dep_graph, slice_program

FIG5 = """
fn mul(a: int): int {
    int temp.o1 = a * 3;
    return temp.o1;
}

fn top(a: int, c: int): int {
    int temp.o1 = mul(a);
    int x = temp.o1 * c;
    return x;
}
"""


def reachable_backwards(V, E, x):
    """Independent oracle: DFS over reversed edges."""
    rev = {v: [] for v in V}
    for u, v in E:
        rev[v].append(u)
    seen, stack = {x}, [x]
    while stack:
        for u in rev[stack.pop()]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


@st.composite
def graphs(draw):
    n = draw(st.integers(1, 12))
    V = [f"v{i}" for i in range(n)]
    E = draw(st.sets(st.tuples(st.sampled_from(V), st.sampled_from(V)), max_size=n * 3))
    x = draw(st.sampled_from(V))
    return V, E, x


@settings(max_examples=300)
@given(graphs())
def test_slice_equals_reverse_reachability(g):
    V, E, x = g
    kv = backward_slice(DepGraph(frozenset(V), frozenset(E)), x)
    assert kv.members == reachable_backwards(V, E, x)
    assert x in kv.members
    assert kv.iterations <= len(V)


@settings(max_examples=100)
@given(graphs())
def test_frontier_has_no_predecessors(g):
    V, E, x = g
    kv = backward_slice(DepGraph(frozenset(V), frozenset(E)), x)
    preds = {v for (u, v) in E}
    assert kv.frontier == {v for v in kv.members if v not in preds}


def test_fig5_key_variables():
    p = parse_program(FIG5)
    kv = slice_program(p, "x")
    assert {"temp.o1", "c", "a"} <= kv.short_names()
    assert kv.members == {"top::x", "top::temp.o1", "top::c", "top::a", "mul::return", "mul::temp.o1", "mul::a"}
    assert kv.frontier == {"top::a", "top::c"}


def test_fig5_edges():
    g = build_dep_graph(parse_program(FIG5))
    assert ("top::temp.o1", "top::x") in g.E
    assert ("top::c", "top::x") in g.E
    assert ("top::a", "mul::a") in g.E
    assert ("mul::return", "top::temp.o1") in g.E
    # call arguments reach the result only through the callee
    assert ("top::a", "top::temp.o1") not in g.E


def test_default_target_is_entry_return():
    p = parse_program(FIG5)
    assert slice_program(p).target == "top::return"


def test_unknown_target():
    with pytest.raises(UnknownTarget):
        slice_program(parse_program(FIG5), "nope")


def test_ambiguous_short_name():
    g = build_dep_graph(parse_program(FIG5))
    with pytest.raises(UnknownTarget):
        g.resolve("temp.o1")


def test_edge_outside_vertex_set_rejected():
    with pytest.raises(ValueError):
        DepGraph(frozenset({"a"}), frozenset({("a", "b")}))


@pytest.mark.parametrize("path", planted_programs() + neutral_programs(), ids=lambda p: p.name)
def test_corpus_slices_reach_the_inputs(path):
    p = parse_file(path)
    kv = slice_program(p)
    entry = p.function(p.entry)
    assert any(f"{entry.name}::{prm.name}" in kv.members for prm in entry.params)
