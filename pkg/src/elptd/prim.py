"""Self-contained dynamic programming over the primal graph.

A primal row ``<I, M, K, S>`` holds a partial CWI ``I`` over the epistemic
atoms of the bag and three collections of answer set tuples
``<witness, counters>``:

* ``M`` -- all candidate answer sets of the reduct w.r.t. (extensions of) ``I``;
* ``K`` -- candidates that contradict a P or N value of ``I``; none of them
  may end up being an answer set;
* ``S`` -- obligations created by U values (some answer set contains the
  atom, some does not).  Each obligation is a set of alternative tuples and
  is met when one alternative ends up an answer set.

Two ways of carrying obligations are supported.  ``"choice"`` commits to one
successor per obligation and branches over all choices, so obligations stay
singletons.  ``"grouped"`` (default) keeps all successors of an obligation
together.  Both accept the same programs: tuples evolve independently of each
other, so choosing per obligation and checking at the root commute.

Interpretations are bitmasks over atom ids.  Every counterwitness is a model
of the reduct that is strictly smaller than the witness somewhere in the
processed part of the program; after an atom is removed a counterwitness may
therefore coincide with its witness on the bag.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple

from .graphs import primal_graph
from .oracle import BudgetExceeded
from .program import CWI, PlainProgram, Program, epistemic_reduct, to_mask
from .td import INTR, JOIN, LEAF, REM, TreeDecomposition, decompose, make_nice

__all__ = [
    "AnswerSetTuple",
    "OBLIGATION_MODES",
    "PrimResult",
    "PrimalRow",
    "format_table",
    "intr_cand",
    "is_proving",
    "prim_node",
    "solve_prim",
    "survival_sets",
    "updt_cand",
]

logger = logging.getLogger(__name__)

DEFAULT_MAX_ROWS = 200_000
OBLIGATION_MODES = ("grouped", "choice")

Masks = tuple  # tuple of (head, pos, neg, dneg) bitmask rules


class AnswerSetTuple(NamedTuple):
    witness: int
    counters: frozenset[int] = frozenset()

    @property
    def proving(self) -> bool:
        return not self.counters


Obligation = frozenset  # frozenset[AnswerSetTuple], met if one alternative proves


class PrimalRow(NamedTuple):
    I: CWI
    M: frozenset[AnswerSetTuple]
    K: frozenset[AnswerSetTuple] = frozenset()
    S: frozenset[Obligation] = frozenset()


def _masks(q: PlainProgram | Masks) -> Masks:
    if isinstance(q, PlainProgram):
        return tuple(r.masks for r in q.rules)
    return q


def _model(m: int, rules: Masks) -> bool:
    for h, pos, neg, dneg in rules:
        if pos & m == pos and not neg & m and dneg & m == dneg and not h & m:
            return False
    return True


def _reduct(m: int, rules: Masks) -> list[tuple[int, int]]:
    return [(h, pos) for h, pos, neg, dneg in rules if not neg & m and dneg & m == dneg]


def _reduct_model(c: int, reduct: list[tuple[int, int]]) -> bool:
    for h, pos in reduct:
        if pos & c == pos and not h & c:
            return False
    return True


def updt_cand(witness: int, counters: Iterable[int], q: PlainProgram | Masks) -> set[AnswerSetTuple]:
    """Keep the tuple if the witness is a model; drop counters that are not reduct models."""
    rules = _masks(q)
    if not _model(witness, rules):
        return set()
    reduct = _reduct(witness, rules)
    return {AnswerSetTuple(witness, frozenset(c for c in counters if _reduct_model(c, reduct)))}


def intr_cand(atom: int, witness: int, counters: Iterable[int], q: PlainProgram | Masks) -> set[AnswerSetTuple]:
    """Successors of a tuple when ``atom`` enters the bag.

    In the branch where the atom is true, the old witness becomes a
    counterwitness (it is strictly smaller) and every counterwitness may or
    may not contain the atom; in the false branch nothing changes.
    """
    bit = 1 << atom
    counters = frozenset(counters)
    if witness & bit or any(c & bit for c in counters):
        raise ValueError(f"atom {atom} already present in the tuple")
    rules = _masks(q)
    grown = {witness} | counters | {c | bit for c in counters}
    return updt_cand(witness | bit, grown, rules) | updt_cand(witness, counters, rules)


def _choice_images(successors: Iterable[Iterable[AnswerSetTuple]]) -> set[frozenset[AnswerSetTuple]]:
    options = [sorted(set(o)) for o in successors]
    return {frozenset(choice) for choice in itertools.product(*options)}


def survival_sets(
    atom: int, pool: Iterable[AnswerSetTuple], tracked: Iterable[AnswerSetTuple], q: PlainProgram | Masks
) -> set[frozenset[AnswerSetTuple]]:
    """All ways to keep one successor from ``pool`` per tracked tuple.

    The result holds the images of all choice functions: two tracked tuples
    may share a successor, so a result can be smaller than ``tracked``.  It
    is empty when some tuple has no successor (the row dies) and
    ``{frozenset()}`` when nothing is tracked.
    """
    pool = frozenset(pool)
    rules = _masks(q)
    return _choice_images(pool & intr_cand(atom, s.witness, s.counters, rules) for s in tracked)


def is_proving(row: PrimalRow) -> bool:
    """Root condition: a proving tuple in M, none in K, every obligation met by a proving tuple."""
    if row.I.scope or any(t.witness for t in itertools.chain(row.M, row.K, *row.S)):
        raise ValueError("is_proving expects a row over the empty root bag")
    return (
        any(t.proving for t in row.M)
        and not any(t.proving for t in row.K)
        and all(any(t.proving for t in o) for o in row.S)
    )


# -- node transitions --------------------------------------------------------


def _project(atom: int, tuples: Iterable[AnswerSetTuple]) -> frozenset[AnswerSetTuple]:
    keep = ~(1 << atom)
    return frozenset(
        AnswerSetTuple(t.witness & keep, frozenset(c & keep for c in t.counters)) for t in tuples
    )


def _merge(t1: AnswerSetTuple, t2: AnswerSetTuple) -> AnswerSetTuple:
    # a combined counterwitness agrees on the bag; one side may use its witness
    w = t1.witness
    counters = t1.counters & t2.counters
    if w in t1.counters or w in t2.counters:
        counters |= {w}
    return AnswerSetTuple(w, counters)


def _merges(left: Iterable[AnswerSetTuple], right: Iterable[AnswerSetTuple]) -> frozenset[AnswerSetTuple]:
    by_witness: dict[int, list[AnswerSetTuple]] = {}
    for t in right:
        by_witness.setdefault(t.witness, []).append(t)
    return frozenset(_merge(t1, t2) for t1 in left for t2 in by_witness.get(t1.witness, ()))


def _next_obligations(successors: list[frozenset[AnswerSetTuple]], mode: str) -> list[frozenset[Obligation]]:
    """Possible S' given the successors of every obligation; empty if the row dies."""
    if any(not s for s in successors):
        return []
    if mode == "choice":
        return [frozenset(frozenset([x]) for x in img) for img in _choice_images(successors)]
    # an obligation implied by a smaller one is redundant
    unique = sorted(set(successors), key=len)
    kept: list[frozenset] = []
    for o in unique:
        if not any(k <= o for k in kept):
            kept.append(o)
    return [frozenset(kept)]


def _minimal_obligations(rows: Iterable[PrimalRow]) -> frozenset[PrimalRow]:
    """Drop rows whose S strictly contains the S of a row with equal I, M, K.

    Sound because every extra obligation is an extra requirement at the root.
    """
    groups: dict[tuple, list[frozenset]] = {}
    for r in set(rows):
        groups.setdefault((r.I, r.M, r.K), []).append(r.S)
    out = []
    for (i, m, k), ss in groups.items():
        if len(ss) > 1:
            ss.sort(key=len)
            kept: list[frozenset] = []
            for s in ss:
                if not any(o < s for o in kept):
                    kept.append(s)
            ss = kept
        out.extend(PrimalRow(i, m, k, s) for s in ss)
    return frozenset(out)


@dataclass
class _Context:
    program: Program
    td: TreeDecomposition
    bag_rules: dict[int, Program]
    mode: str = "grouped"
    reducts: dict[tuple[int, CWI], Masks] = field(default_factory=dict)
    lifted: dict[tuple, frozenset[AnswerSetTuple]] = field(default_factory=dict)

    def rules_for(self, t: int, i: CWI) -> Masks:
        prog = self.bag_rules.get(t)
        if prog is None:
            return ()
        key = (t, i.restrict(i.scope & prog.elit))
        if key not in self.reducts:
            self.reducts[key] = tuple(r.masks for r in epistemic_reduct(prog, key[1]).rules)
        return self.reducts[key]

    def lift(self, atom: int, tuples: frozenset[AnswerSetTuple], rules: Masks) -> frozenset[AnswerSetTuple]:
        key = (atom, tuples, rules)
        out = self.lifted.get(key)
        if out is None:
            acc: set[AnswerSetTuple] = set()
            for t in tuples:
                acc |= intr_cand(atom, t.witness, t.counters, rules)
            out = self.lifted[key] = frozenset(acc)
        return out


def _intr(ctx: _Context, t: int, child: Iterable[PrimalRow]) -> list[PrimalRow]:
    a = ctx.td.vertex[t]
    bit = 1 << a
    epistemic = a in ctx.program.elit
    out: list[PrimalRow] = []
    for row in child:
        for status in ("P", "N", "U") if epistemic else (None,):
            i = row.I.assign(a, status) if status else row.I
            rules = ctx.rules_for(t, i)
            m = ctx.lift(a, row.M, rules)
            if not m:
                continue
            k = ctx.lift(a, row.K, rules)
            if status == "P":
                k |= {x for x in m if not x.witness & bit}
            elif status == "N":
                k |= {x for x in m if x.witness & bit}
            successors = [ctx.lift(a, o, rules) for o in row.S]
            if status == "U":
                successors.append(frozenset(x for x in m if x.witness & bit))
                successors.append(frozenset(x for x in m if not x.witness & bit))
            for s in _next_obligations(successors, ctx.mode):
                out.append(PrimalRow(i, m, k, s))
    return out


def _join(ctx: _Context, left: Iterable[PrimalRow], right: Iterable[PrimalRow]) -> list[PrimalRow]:
    by_i: dict[CWI, list[PrimalRow]] = {}
    for r in right:
        by_i.setdefault(r.I, []).append(r)
    out = []
    for r1 in left:
        for r2 in by_i.get(r1.I, ()):
            m = _merges(r1.M, r2.M)
            if not m:
                continue
            k = _merges(r1.K, r2.M | r2.K) | _merges(r1.M | r1.K, r2.K)
            successors = [_merges(o, r2.M) for o in r1.S] + [_merges(r1.M, o) for o in r2.S]
            for s in _next_obligations(successors, ctx.mode):
                out.append(PrimalRow(r1.I, m, k, s))
    return out


def _rem(ctx: _Context, t: int, child: Iterable[PrimalRow]) -> list[PrimalRow]:
    a = ctx.td.vertex[t]
    return [
        PrimalRow(
            row.I.forget(a),
            _project(a, row.M),
            _project(a, row.K),
            frozenset(_project(a, o) for o in row.S),
        )
        for row in child
    ]


def prim_node(ctx: _Context, t: int, child_tables: list[frozenset[PrimalRow]]) -> frozenset[PrimalRow]:
    kind = ctx.td.kinds[t]
    if kind == LEAF:
        return frozenset([PrimalRow(CWI(), frozenset([AnswerSetTuple(0)]))])
    if kind == INTR:
        rows = _intr(ctx, t, child_tables[0])
    elif kind == REM:
        rows = _rem(ctx, t, child_tables[0])
    elif kind == JOIN:
        rows = _join(ctx, *child_tables)
    else:
        raise ValueError(f"unknown node type {kind!r}")
    return _minimal_obligations(rows)


def _fmt_set(names: tuple[str, ...], mask: int) -> str:
    return "{" + ",".join(names[i] for i in range(len(names)) if mask >> i & 1) + "}"


def _fmt_tuples(names: tuple[str, ...], tuples: Iterable[AnswerSetTuple]) -> str:
    parts = sorted(
        _fmt_set(names, t.witness) + "/" + "[" + " ".join(sorted(_fmt_set(names, c) for c in t.counters)) + "]"
        for t in tuples
    )
    return "(" + " ".join(parts) + ")"


def format_table(table: Iterable[PrimalRow], names: tuple[str, ...]) -> str:
    """One line per row, sorted; stable for a fixed program and decomposition."""
    lines = []
    for r in table:
        i = " ".join(f"{s}{_fmt_set(names, to_mask(getattr(r.I, s)))}" for s in "PNU")
        s = " ".join(sorted(_fmt_tuples(names, o) for o in r.S))
        lines.append(f"I: {i} | M: {_fmt_tuples(names, r.M)} | K: {_fmt_tuples(names, r.K)} | S: [{s}]")
    return "\n".join(sorted(lines))


# -- driver -----------------------------------------------------------------


@dataclass
class PrimResult:
    exists: bool
    td: TreeDecomposition | None = None
    table_sizes: dict[int, int] = field(default_factory=dict)
    root_table: frozenset[PrimalRow] = frozenset()

    @property
    def max_table_rows(self) -> int:
        return max(self.table_sizes.values(), default=0)


def bag_programs(p: Program, td: TreeDecomposition) -> dict[int, Program]:
    """Rules fully covered by each introduce node's bag."""
    atoms = [to_mask(r.atoms) for r in p.rules]
    out = {}
    for t in range(len(td)):
        if td.kinds[t] != INTR:
            continue
        bag = to_mask(td.bags[t])
        js = [j for j, am in enumerate(atoms) if am & bag == am]
        if js:
            out[t] = p.subprogram(js)
    return out


def _final_rem_chain(td: TreeDecomposition) -> set[int]:
    """Nodes above which only remove nodes follow."""
    out = set()
    t = td.root
    while True:
        out.add(t)
        if td.kinds[t] != REM:
            break
        t = td.children[t][0]
    return out


def solve_prim(
    p: Program,
    heuristic: str = "min-fill",
    seed: int | None = None,
    *,
    mode: str = "grouped",
    max_rows: int = DEFAULT_MAX_ROWS,
    prune_killed: bool = False,
    td: TreeDecomposition | None = None,
    on_table: Callable[[int, frozenset[PrimalRow]], None] | None = None,
) -> PrimResult:
    """Decide world view existence; true iff the root table has a proving row.

    ``prune_killed`` drops rows holding a proving tuple in K once no atom can
    be introduced any more (such a row can never become proving).
    ``on_table`` is called with every finished node table.
    """
    if mode not in OBLIGATION_MODES:
        raise ValueError(f"unknown obligation mode {mode!r}")
    if any(not r.atoms for r in p.rules):
        # a rule without atoms is an unconditional contradiction
        return PrimResult(False)
    if td is None:
        td = make_nice(decompose(primal_graph(p), heuristic, seed))
    ctx = _Context(p, td, bag_programs(p, td), mode)
    final = _final_rem_chain(td) if prune_killed else set()
    tables: dict[int, frozenset[PrimalRow]] = {}
    sizes: dict[int, int] = {}
    for t in range(len(td)):
        table = prim_node(ctx, t, [tables.pop(c) for c in td.children[t]])
        if t in final:
            table = frozenset(r for r in table if not any(x.proving for x in r.K))
        if len(table) > max_rows:
            raise BudgetExceeded(f"table at node {t} has {len(table)} rows (limit {max_rows})")
        tables[t] = table
        sizes[t] = len(table)
        if on_table is not None:
            on_table(t, table)
        ctx.lifted.clear()
    root = tables[td.root]
    exists = any(is_proving(r) for r in root)
    logger.debug("prim: %d nodes, max table %d, exists=%s", len(td), max(sizes.values()), exists)
    return PrimResult(exists, td, sizes, root)
