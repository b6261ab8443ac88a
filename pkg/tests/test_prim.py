import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elptd.generators import generate_random
from elptd.oracle import BudgetExceeded, wv_exists
from elptd.prim import (
    AnswerSetTuple,
    PrimalRow,
    _choice_images,
    _Context,
    bag_programs,
    format_table,
    intr_cand,
    is_proving,
    prim_node,
    solve_prim,
    survival_sets,
    updt_cand,
)
from elptd.program import CWI, PlainProgram, PlainRule, epistemic_reduct, from_mask, parse_program, satisfies, to_mask
from elptd.td import INTR, JOIN, TreeDecomposition

import micro_oracle as mo
from conftest import P_CHOICE, P_EMPTY, P_LOOP
from test_program import programs

FACT_A = PlainProgram(frozenset({0}), (PlainRule(frozenset({0})),))
NOTHING = PlainProgram(frozenset({0}), ())

# The strict one-survivor-per-obligation rule rejects this program, which has a world view.
SHARED_SURVIVOR = "a3 | a2 :- not a2, not ~a2.\na3 | a2 :- ~not a3, not a1.\na1 | a2.\n"


def T(witness, *counters):
    return AnswerSetTuple(to_mask(witness), frozenset(to_mask(c) for c in counters))


def as_sets(tuples):
    return {(from_mask(t.witness), frozenset(from_mask(c) for c in t.counters)) for t in tuples}


def check_micro_oracle(max_atoms=2, max_rules=2):
    """Compare both tuple updates against the enumeration oracle; returns the number of cases."""
    cases = 0
    for n in range(1, max_atoms + 1):
        universe = range(n)
        for q in mo.all_programs(universe, max_rules):
            for m, c in mo.configurations(universe):
                got = updt_cand(to_mask(m), [to_mask(x) for x in c], q)
                assert as_sets(got) == mo.expected_updt(m, c, q), (q, m, c)
                cases += 1
            for a in universe:
                for m, c in mo.configurations(set(universe) - {a}):
                    got = intr_cand(a, to_mask(m), [to_mask(x) for x in c], q)
                    assert as_sets(got) == mo.expected_intr(a, m, c, q), (q, a, m, c)
                    cases += 1
    return cases


def check_chain(max_atoms=2, max_rules=2):
    """Introducing all atoms from the leaf tuple yields the answer sets as proving witnesses."""
    cases = 0
    # with no atoms there is no introduce node; solve_prim decides that case up front
    for n in range(1, max_atoms + 1):
        for q in mo.all_programs(range(n), max_rules):
            tuples = {AnswerSetTuple(0)}
            for a in range(n):
                covered = PlainProgram(q.universe, tuple(r for r in q.rules if max(r.atoms, default=-1) <= a))
                tuples = set().union(*(intr_cand(a, t.witness, t.counters, covered) for t in tuples))
            proving = {from_mask(t.witness) for t in tuples if t.proving}
            assert proving == mo.brute_answer_sets(q), q
            cases += 1
    return cases


def test_micro_oracle_exhaustive():
    assert check_micro_oracle() > 50_000


def test_chain_matches_answer_sets():
    assert check_chain() > 2000


def test_updt_cand_examples():
    assert updt_cand(1, [0], FACT_A) == {T({0})}
    assert updt_cand(0, [], NOTHING) == {T(set())}
    assert updt_cand(0, [], FACT_A) == set()


def test_intr_cand_examples():
    assert intr_cand(0, 0, [], NOTHING) == {T({0}, set()), T(set())}
    assert intr_cand(0, 0, [], FACT_A) == {T({0})}
    assert intr_cand(0, 0, [0], NOTHING) == {T({0}, set(), {0}), T(set(), set())}
    with pytest.raises(ValueError):
        intr_cand(0, 1, [], NOTHING)


def test_survival_sets_examples():
    assert survival_sets(0, [], [], NOTHING) == {frozenset()}
    s = T(set())
    u, v = sorted(intr_cand(0, 0, [], NOTHING))
    assert survival_sets(0, [u, v], [s], NOTHING) == {frozenset([u]), frozenset([v])}
    assert survival_sets(0, [], [s], NOTHING) == set()
    # obligations sharing their only successor (as after a join) keep it once
    assert _choice_images([[u], [u, v]]) == {frozenset([u]), frozenset([u, v])}


def test_is_proving_examples():
    e = T(set())
    assert is_proving(PrimalRow(CWI(), frozenset([e])))
    assert not is_proving(PrimalRow(CWI(), frozenset([e]), frozenset([e])))
    assert not is_proving(PrimalRow(CWI(), frozenset([e]), frozenset(), frozenset([frozenset([T(set(), set())])])))
    with pytest.raises(ValueError):
        is_proving(PrimalRow(CWI.make(P=[0]), frozenset([e])))


def single_node_ctx(p, kinds, bags, children, vertex):
    td = TreeDecomposition(bags, children, len(bags) - 1, kinds, vertex)
    return _Context(p, td, bag_programs(p, td))


def test_leaf_and_join_nodes():
    p = parse_program("a.")
    ctx = single_node_ctx(p, ["leaf", INTR, INTR, JOIN], [frozenset(), {0}, {0}, {0}], [[], [0], [0], [1, 2]], [None, 0, 0, None])
    leaf = prim_node(ctx, 0, [])
    assert leaf == {PrimalRow(CWI(), frozenset([T(set())]))}
    child = prim_node(ctx, 1, [leaf])
    assert len(child) == 1 and all(not r.S for r in child)
    joined = prim_node(ctx, 3, [child, child])
    assert joined == child


def test_solve_examples(sch2):
    assert solve_prim(sch2).exists
    assert not solve_prim(parse_program(P_LOOP)).exists
    res = solve_prim(parse_program(P_EMPTY))
    assert res.exists and len(res.td) == 1
    assert solve_prim(parse_program(P_CHOICE)).exists
    assert not solve_prim(parse_program("a. .")).exists


def test_loop_rows_never_prove():
    p = parse_program(P_LOOP)
    res = solve_prim(p)
    assert res.root_table and not any(is_proving(r) for r in res.root_table)


def test_shared_survivor_program():
    p = parse_program(SHARED_SURVIVOR)
    assert wv_exists(p)
    assert solve_prim(p, mode="choice").exists
    assert solve_prim(p).exists


def test_row_budget(sch2):
    with pytest.raises(BudgetExceeded):
        solve_prim(sch2, max_rows=2)


def test_unknown_mode(sch1):
    with pytest.raises(ValueError):
        solve_prim(sch1, mode="lazy")


def test_table_dump_is_stable(sch1):
    dumps = []
    for _ in range(2):
        lines = []
        solve_prim(sch1, on_table=lambda t, tab: lines.append(format_table(tab, sch1.atoms)))
        dumps.append(lines)
    assert dumps[0] == dumps[1]
    assert dumps[0][0] == "I: P{} N{} U{} | M: ({}/[]) | K: () | S: []"


@settings(max_examples=200, deadline=None)
@given(programs)
def test_equivalence_with_oracle(text):
    p = parse_program(text)
    assert solve_prim(p).exists == wv_exists(p)


@settings(max_examples=100, deadline=None)
@given(programs)
def test_pruning_is_neutral(text):
    p = parse_program(text)
    assert solve_prim(p, prune_killed=True).exists == solve_prim(p).exists


small_programs = st.builds(
    generate_random,
    n_atoms=st.integers(1, 4),
    n_rules=st.integers(0, 4),
    p_epistemic=st.sampled_from([0.3, 0.7]),
    seed=st.integers(0, 10**6),
)


@settings(max_examples=60, deadline=None)
@given(small_programs)
def test_choice_mode_agrees(text):
    p = parse_program(text)
    assert solve_prim(p, mode="choice").exists == solve_prim(p).exists


@settings(max_examples=60, deadline=None)
@given(programs)
def test_table_invariants(text):
    p = parse_program(text)
    if any(not r.atoms for r in p.rules):
        return
    td_holder = {}

    def check(t, table):
        td = td_holder.get("td")
        if td is None or td.kinds[t] != INTR:
            return
        covered = [j for j, r in enumerate(p.rules) if r.atoms <= td.bags[t]]
        for row in table:
            assert row.I.scope == td.bags[t] & p.elit
            q = epistemic_reduct(p.subprogram(covered), row.I) if covered else None
            for tup in row.M | row.K | frozenset().union(*row.S):
                assert from_mask(tup.witness) <= td.bags[t]
                if q is not None:
                    assert satisfies(from_mask(tup.witness), q)

    from elptd.graphs import primal_graph
    from elptd.td import decompose, make_nice

    td_holder["td"] = make_nice(decompose(primal_graph(p)))
    res = solve_prim(p, td=td_holder["td"], on_table=check)
    for row in res.root_table:
        assert not row.I.scope
        assert all(t.witness == 0 and t.counters <= {0} for t in row.M | row.K)
