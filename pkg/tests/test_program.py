import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elptd.generators import generate_random
from elptd.program import (
    CWI,
    BodyLiteral,
    ParseError,
    PlainProgram,
    PlainRule,
    ScopeError,
    epistemic_reduct,
    format_program,
    gl_reduct,
    parse_program,
    satisfies,
)

from conftest import P_SCH1


def names(p, ids):
    return set(p.names(ids))


def plain(universe, *rules):
    return PlainProgram(frozenset(universe), tuple(rules))


def test_parse_loop():
    p = parse_program("a :- not a.")
    assert p.atoms == ("a",)
    assert len(p.rules) == 1
    assert p.rules[0].body == (BodyLiteral(0, outer_neg=False, epistemic=True, inner_neg=False),)


def test_parse_empty():
    p = parse_program("")
    assert p.atoms == () and p.rules == ()


def test_parse_scholarship(sch1):
    assert len(sch1.atoms) == 5 and len(sch1.rules) == 5
    assert names(sch1, sch1.elit) == {"eligible", "ineligible"}


def test_six_literal_forms():
    p = parse_program(":- a, ~a, not a, not ~a, ~not a, ~not ~a.")
    forms = [(lit.outer_neg, lit.epistemic, lit.inner_neg) for lit in p.rules[0].body]
    assert forms == [
        (False, False, False),
        (True, False, False),
        (False, True, False),
        (False, True, True),
        (True, True, False),
        (True, True, True),
    ]


def test_arguments_and_comments():
    p = parse_program("% students\ninterview(mike) :- not eligible(mike). % why\n")
    assert p.atoms == ("interview(mike)", "eligible(mike)")


def test_interning_order_and_duplicates():
    p = parse_program("b :- a. b :- a.")
    assert p.atoms == ("b", "a")
    assert len(p.rules) == 2


@pytest.mark.parametrize(
    "text, line, col",
    [
        ("a :- b\n", 2, 1),
        ("not :- a.", 1, 1),
        ("a :- ~~b.", 1, 7),
        ("a :- b,, c.", 1, 8),
        ("A.", 1, 1),
    ],
)
def test_parse_errors_have_positions(text, line, col):
    with pytest.raises(ParseError) as e:
        parse_program(text)
    assert (e.value.line, e.value.column) == (line, col)


def test_epistemic_reduct_interview(sch1):
    i = CWI.make(P=[sch1.atom("interview")], U=[sch1.atom(a) for a in ("eligible", "ineligible", "highGPA", "lowGPA")])
    q = epistemic_reduct(sch1, i)
    fact = q.rules[3]
    assert fact.head == {sch1.atom("interview")} and not (fact.pos or fact.neg or fact.dneg)


def test_epistemic_reduct_eligible(sch1):
    rest = [sch1.atom(a) for a in ("ineligible", "interview", "highGPA", "lowGPA")]
    q = epistemic_reduct(sch1, CWI.make(P=[sch1.atom("eligible")], U=rest))
    r = q.rules[3]
    assert r.neg == {sch1.atom("eligible")} and not r.pos and not r.dneg


def test_epistemic_reduct_negations():
    p = parse_program("h :- ~not a. h :- ~not ~a. h :- not ~a.")
    a = p.atom("a")
    # a in P: ~not a -> ~~a; not ~a -> top; ~not ~a -> rule deleted
    q = epistemic_reduct(p, CWI.make(P=[a]))
    assert [(r.pos, r.neg, r.dneg) for r in q.rules] == [(set(), set(), {a}), (set(), set(), set())]
    # a in N: ~not ~a collapses ~~~a to ~a; ~not a deleted
    q = epistemic_reduct(p, CWI.make(N=[a]))
    assert [(r.pos, r.neg, r.dneg) for r in q.rules] == [(set(), {a}, set()), (set(), set(), {a})]


def test_epistemic_reduct_scope():
    p = parse_program("a :- not b.")
    with pytest.raises(ScopeError):
        epistemic_reduct(p, CWI())


def test_reduct_identity_without_epistemic():
    p = parse_program("a :- ~b. b | c :- a.")
    assert epistemic_reduct(p, CWI()) == PlainProgram.from_program(p)


def test_gl_reduct_examples():
    q = plain({0, 1}, PlainRule(frozenset({0}), neg=frozenset({1})), PlainRule(frozenset({1}), neg=frozenset({0})))
    assert gl_reduct(q, {0}).rules == (PlainRule(frozenset({0})),)
    dd = plain({0}, PlainRule(frozenset({0}), dneg=frozenset({0})))
    assert gl_reduct(dd, {0}).rules == (PlainRule(frozenset({0})),)
    assert gl_reduct(dd, set()).rules == ()
    pos = plain({0, 1}, PlainRule(frozenset({0}), pos=frozenset({1})))
    assert gl_reduct(pos, {0, 1}) == pos


def test_satisfies_examples(sch1):
    r = PlainRule(frozenset({0}), neg=frozenset({1}))
    assert satisfies({0}, r)
    assert not satisfies(set(), r)
    rest = [sch1.atom(a) for a in ("eligible", "ineligible", "highGPA", "lowGPA")]
    q = epistemic_reduct(sch1, CWI.make(P=[sch1.atom("interview")], U=rest))
    assert not satisfies({sch1.atom("highGPA"), sch1.atom("eligible")}, q)


def test_satisfies_rejects_epistemic():
    p = parse_program("a :- not b.")
    with pytest.raises(ValueError):
        satisfies(set(), p)


programs = st.builds(
    generate_random,
    n_atoms=st.integers(1, 5),
    n_rules=st.integers(0, 6),
    p_epistemic=st.sampled_from([0.0, 0.3, 0.7]),
    p_neg=st.sampled_from([0.0, 0.3, 0.7]),
    seed=st.integers(0, 10**6),
)


@settings(max_examples=150, deadline=None)
@given(programs, st.data())
def test_reduct_invariants(text, data):
    p = parse_program(text)
    statuses = data.draw(st.lists(st.sampled_from("PNU"), min_size=len(p.atoms), max_size=len(p.atoms)))
    i = CWI.make(*([a for a, s in enumerate(statuses) if s == c] for c in "PNU"))
    q = epistemic_reduct(p, i)
    assert all(isinstance(r, PlainRule) for r in q.rules)
    m = frozenset(a for a in p.atom_ids if data.draw(st.booleans()))
    red = gl_reduct(q, m)
    assert len(red.rules) <= len(q.rules)
    assert all(not r.neg and not r.dneg for r in red.rules)
    if satisfies(m, q):
        assert satisfies(m, red)


@settings(max_examples=150, deadline=None)
@given(programs)
def test_round_trip(text):
    p = parse_program(text)
    assert parse_program(format_program(p)) == p
    assert parse_program(format_program(parse_program(P_SCH1))) == parse_program(P_SCH1)
