"""Dynamic programming over the epistemic primal graph (oracle-based).

Rows are partial CWIs over the bag.  Rules are distributed over the TD so
that each rule is evaluated at exactly one introduce node; there the row's
compatibility with the answer sets of the reduct of the node's rules is
checked by a bounded number of answer-set existence queries.

Two rule distributions are available:

``"literal"``
    a rule goes to the first introduce node with a subset-maximal bag whose
    non-epistemic surroundings cover the rule's atoms.  The surroundings of a
    bag include every non-epistemic atom reachable from *any* single bag atom,
    so rules touching the same non-epistemic atom can land at different
    nodes, and an epistemic atom may occur outside epistemic literals in
    several nodes.  The per-node checks then no longer compose and the result
    can be wrong (see ``tests/test_eprim.py`` for concrete programs).

``"component"`` (default)
    only atoms that occur exclusively inside epistemic literals separate
    components.  Every other atom belongs to a component, and all rules
    touching a component require the component's whole epistemic
    neighbourhood in the bag, so they meet at the same node.  The decomposed
    graph is the epistemic primal graph built with that smaller separator
    set.  Atoms shared between nodes then only occur under negation after the
    reduct, hence are false in every answer set of every node program, and the
    answer sets of the whole reduct are exactly the products of the per-node
    ones.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .graphs import Graph, conn, epistemic_primal_graph, primal_graph, pure_epistemic_atoms, _reach
from .oracle import DEFAULT_ATOM_LIMIT, OracleStats, has_answer_set
from .program import CWI, PlainProgram, Program, epistemic_reduct
from .td import INTR, JOIN, LEAF, REM, TreeDecomposition, decompose, make_nice

__all__ = [
    "BagAssignment",
    "EprimResult",
    "assign_bag_rules",
    "check_row",
    "eprim_graph",
    "eprim_node",
    "solve_eprim",
]

logger = logging.getLogger(__name__)

VARIANTS = ("component", "literal")

Table = frozenset  # frozenset[CWI]


@dataclass
class BagAssignment:
    """Rules assigned to each TD node and the induced bag programs."""

    rules: dict[int, tuple[int, ...]]
    programs: dict[int, Program]

    def node_of(self, rule: int) -> int:
        for t, rs in self.rules.items():
            if rule in rs:
                return t
        raise KeyError(rule)


def eprim_graph(p: Program, variant: str = "component") -> Graph:
    """The graph whose decomposition drives the given variant."""
    if variant == "literal":
        return epistemic_primal_graph(p)
    if variant == "component":
        return epistemic_primal_graph(p, barrier=pure_epistemic_atoms(p))
    raise ValueError(f"unknown variant {variant!r}")


def _maximal_intr_nodes(td: TreeDecomposition) -> list[int]:
    distinct = set(td.bags)
    maximal = {b for b in distinct if not any(b < c for c in distinct)}
    return [t for t in range(len(td)) if td.kinds[t] == INTR and td.bags[t] in maximal]


def _required_component(p: Program, g: Graph, barrier: frozenset[int]) -> list[frozenset[int]]:
    out = []
    for r in p.rules:
        connectors = r.atoms - barrier
        reached, touched = _reach(g, connectors, barrier) if connectors else (set(), set())
        around = connectors | reached | touched | r.atoms
        out.append(frozenset(around & p.elit))
    return out


def assign_bag_rules(p: Program, td: TreeDecomposition, variant: str = "component") -> BagAssignment:
    """Give every rule to the first compatible introduce node (node ids are post-order)."""
    candidates = _maximal_intr_nodes(td)
    g = primal_graph(p)
    assigned: dict[int, list[int]] = {}
    if variant == "literal":
        reachable = conn(p, p.elit, g)
        conn_of: dict[frozenset[int], frozenset[int]] = {}
        for t in candidates:
            if td.bags[t] not in conn_of:
                conn_of[td.bags[t]] = conn(p, td.bags[t], g)

        def compatible(j: int, t: int) -> bool:
            return p.rules[j].atoms & reachable <= conn_of[td.bags[t]]

    elif variant == "component":
        required = _required_component(p, g, pure_epistemic_atoms(p))

        def compatible(j: int, t: int) -> bool:
            return required[j] <= td.bags[t]

    else:
        raise ValueError(f"unknown variant {variant!r}")

    for j in range(len(p.rules)):
        t = next((t for t in candidates if compatible(j, t)), None)
        if t is None:
            raise ValueError(f"rule {j} has no compatible node; is the TD a decomposition of the right graph?")
        assigned.setdefault(t, []).append(j)
    return BagAssignment(
        {t: tuple(js) for t, js in assigned.items()},
        {t: p.subprogram(js) for t, js in assigned.items()},
    )


def check_row(
    row: CWI,
    bag_prog: Program,
    stats: OracleStats,
    *,
    node: int = -1,
    bag_size: int | None = None,
    limit: int = DEFAULT_ATOM_LIMIT,
) -> bool:
    """Compatibility of ``row`` with the answer sets of the reduct of ``bag_prog``.

    Only atoms of ``bag_prog`` are checked.  Order: existence, then P, N and
    U atoms by ascending id; stops at the first failure.
    """
    if not bag_prog.rules:
        return True
    bag_size = len(row.scope) if bag_size is None else bag_size
    atoms = frozenset().union(*(r.atoms for r in bag_prog.rules))
    q = PlainProgram(atoms, epistemic_reduct(bag_prog, row).rules)
    checked = row.scope & atoms
    calls = 0

    def ask(ft=(), ff=()) -> bool:
        nonlocal calls
        calls += 1
        return has_answer_set(q, ft, ff, stats, node=node, limit=limit)

    ok = ask()
    if ok:
        ok = all(not ask(ft=(a,)) for a in sorted(row.P & checked))
    if ok:
        ok = all(not ask(ff=(a,)) for a in sorted(row.N & checked))
    if ok:
        ok = all(ask(ft=(a,)) and ask(ff=(a,)) for a in sorted(row.U & checked))
    stats.record_check(node, calls, bag_size)
    assert calls <= 2 + 2 * bag_size, (calls, bag_size)
    return ok


def eprim_node(
    td: TreeDecomposition,
    t: int,
    child_tables: list[Table],
    bag_prog: Program | None,
    stats: OracleStats,
    limit: int = DEFAULT_ATOM_LIMIT,
) -> Table:
    kind = td.kinds[t]
    if kind == LEAF:
        return frozenset([CWI()])
    if kind == INTR:
        (child,) = child_tables
        a = td.vertex[t]
        rows = [row.assign(a, s) for row in sorted(child, key=CWI.sort_key) for s in "PNU"]
        if bag_prog is not None and bag_prog.rules:
            rows = [r for r in rows if check_row(r, bag_prog, stats, node=t, bag_size=len(td.bags[t]), limit=limit)]
        return frozenset(rows)
    if kind == REM:
        (child,) = child_tables
        return frozenset(row.forget(td.vertex[t]) for row in child)
    if kind == JOIN:
        left, right = child_tables
        return left & right
    raise ValueError(f"unknown node type {kind!r}")


@dataclass
class EprimResult:
    exists: bool
    stats: OracleStats
    td: TreeDecomposition | None = None
    assignment: BagAssignment | None = None
    table_sizes: dict[int, int] = field(default_factory=dict)

    @property
    def max_table_rows(self) -> int:
        return max(self.table_sizes.values(), default=0)


def solve_eprim(
    p: Program,
    heuristic: str = "min-fill",
    seed: int | None = None,
    variant: str = "component",
    limit: int = DEFAULT_ATOM_LIMIT,
    td: TreeDecomposition | None = None,
) -> EprimResult:
    """Decide CWV (equivalently WV) existence with answer-set existence queries.

    ``td`` may supply a nice decomposition of ``eprim_graph(p, variant)``.
    """
    stats = OracleStats()
    if not p.elit:
        # no epistemic atoms: the only candidate is forced by the answer sets
        exists = has_answer_set(PlainProgram.from_program(p), stats=stats, limit=limit)
        return EprimResult(exists, stats)
    if td is None:
        td = make_nice(decompose(eprim_graph(p, variant), heuristic, seed))
    assignment = assign_bag_rules(p, td, variant)
    tables: dict[int, Table] = {}
    sizes = {}
    for t in range(len(td)):  # post-order ids
        tables[t] = eprim_node(
            td, t, [tables.pop(c) for c in td.children[t]], assignment.programs.get(t), stats, limit
        )
        sizes[t] = len(tables[t])
    exists = bool(tables[td.root])
    logger.debug("eprim: %d nodes, %d oracle calls, exists=%s", len(td), stats.calls, exists)
    return EprimResult(exists, stats, td, assignment, sizes)
