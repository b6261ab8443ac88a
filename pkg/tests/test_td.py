import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elptd.generators import generate_scholarship
from elptd.graphs import Graph, epistemic_primal_graph
from elptd.program import parse_program
from elptd.td import (
    INTR,
    JOIN,
    LEAF,
    REM,
    TreeDecomposition,
    decompose,
    dump_td,
    load_td,
    make_nice,
    nice_violation,
    validate,
)


def random_graph(n, p, seed):
    rng = random.Random(seed)
    return Graph(range(n), [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p])


def random_tree(n, seed):
    rng = random.Random(seed)
    return Graph(range(n), [(v, rng.randrange(v)) for v in range(1, n)])


def test_empty_graph():
    td = decompose(Graph())
    assert len(td) == 1 and td.width == -1
    nice = make_nice(td)
    assert nice.kinds == [LEAF] and nice_violation(nice) is None


def test_scholarship_epistemic_width(sch2):
    g = epistemic_primal_graph(sch2)
    td = decompose(g)
    assert td.width == 1
    nice = make_nice(td)
    assert validate(nice, g) and nice.width == 1 and nice_violation(nice) is None


def test_single_bag_chain():
    td = TreeDecomposition([frozenset({0, 1})], [[]], 0)
    nice = make_nice(td)
    assert nice.kinds == [LEAF, INTR, INTR, REM, REM]
    assert nice.bags[0] == frozenset() and nice.bags[nice.root] == frozenset()
    assert nice_violation(nice) is None


def test_make_nice_idempotent_width():
    g = random_graph(12, 0.3, 3)
    nice = make_nice(decompose(g))
    again = make_nice(nice)
    assert again.width == nice.width and validate(again, g)
    assert sorted(again.kinds) == sorted(nice.kinds)


def test_join_nodes_are_binary():
    g = Graph(range(4), [(0, 1), (0, 2), (0, 3)])
    nice = make_nice(TreeDecomposition([frozenset({0}), frozenset({0, 1}), frozenset({0, 2}), frozenset({0, 3})], [[1, 2, 3], [], [], []], 0))
    assert validate(nice, g)
    assert all(len(nice.children[t]) == 2 for t in nice.nodes_of_kind(JOIN))
    assert len(nice.nodes_of_kind(JOIN)) == 2


def test_validate_diagnostics():
    g = Graph(range(3), [(0, 1), (1, 2)])
    ok = validate(TreeDecomposition([frozenset({0, 1}), frozenset({1, 2})], [[1], []], 0), g)
    assert ok and ok.width == 1
    missing_vertex = validate(TreeDecomposition([frozenset({0, 1})], [[]], 0), g)
    assert missing_vertex.condition == "(i)" and missing_vertex.witness == 2
    missing_edge = validate(TreeDecomposition([frozenset({0, 1}), frozenset({2})], [[1], []], 0), g)
    assert missing_edge.condition == "(ii)" and missing_edge.witness == (1, 2)
    path = TreeDecomposition([frozenset({0, 1}), frozenset({1, 2}), frozenset({0})], [[1], [2], []], 0)
    broken = validate(path, Graph(range(3), [(0, 1), (1, 2)]))
    assert broken.condition == "(iii)" and broken.witness[0] == 0
    cyclic = TreeDecomposition([frozenset({0, 1, 2})] * 2, [[1], [0]], 0)
    assert validate(cyclic, g).condition == "tree"


def test_min_degree_and_seeds():
    g = random_graph(20, 0.2, 1)
    for heuristic in ("min-fill", "min-degree"):
        for seed in (None, 0, 1):
            td = decompose(g, heuristic, seed)
            assert validate(td, g)
            assert decompose(g, heuristic, seed).bags == td.bags
    with pytest.raises(ValueError):
        decompose(g, "exact")


def test_clique_width():
    n = 7
    g = Graph(range(n), [(u, v) for u in range(n) for v in range(u + 1, n)])
    assert decompose(g).width == n - 1


def test_td_format_round_trip():
    g = random_graph(15, 0.2, 5)
    td = decompose(g)
    text = dump_td(td, g)
    assert text.splitlines()[0] == f"s td {len(td)} {td.width + 1} {len(g)}"
    back = load_td(text, g)
    assert validate(back, g) and back.width == td.width
    assert sorted(back.bags, key=sorted) == sorted(td.bags, key=sorted)


def test_scholarship_widths_scale():
    for n in (1, 3, 6):
        p = parse_program(generate_scholarship(n))
        assert decompose(epistemic_primal_graph(p)).width == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 30), st.floats(0.0, 0.5), st.integers(0, 10**6))
def test_random_graphs_valid(n, p, seed):
    g = random_graph(n, p, seed)
    td = decompose(g)
    assert validate(td, g)
    assert td.width <= n - 1
    nice = make_nice(td)
    assert validate(nice, g) and nice.width == td.width
    assert nice_violation(nice) is None
    assert all(c < t for t in range(len(nice)) for c in nice.children[t])


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 40), st.integers(0, 10**6))
def test_trees_have_width_one(n, seed):
    g = random_tree(n, seed)
    assert decompose(g).width == 1
    assert decompose(g, "min-degree").width == 1
