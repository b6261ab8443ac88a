"""Exhaustive reference semantics for ELPs.

Everything here is computed by enumeration and is meant for desk-scale
instances; it is the arbiter the dynamic programs are checked against.
Plain programs are split into atom-disjoint parts first (the answer sets of
such a union are exactly the products of the parts' answer sets); each part
is then enumerated exhaustively.
"""

from __future__ import annotations

import itertools
import threading
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

from .formula import Formula
from .program import CWI, PlainProgram, Program, ScopeError, epistemic_reduct, from_mask

__all__ = [
    "BudgetExceeded",
    "OracleStats",
    "answer_sets",
    "candidate_world_views",
    "cautiously_entails",
    "evaluate_formula_problem",
    "forced_cwi",
    "has_answer_set",
    "is_compatible",
    "world_views",
    "wv_exists",
]

DEFAULT_ATOM_LIMIT = 20
DEFAULT_EPISTEMIC_LIMIT = 12


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class OracleStats:
    """Exact count of answer-set existence queries.

    ``per_node`` attributes calls to TD nodes; ``checks`` records one
    ``(node, calls, bag_size)`` entry per row check.
    """

    calls: int = 0
    per_node: Counter = field(default_factory=Counter)
    checks: list[tuple[int, int, int]] = field(default_factory=list)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def record_call(self, node: int | None = None) -> None:
        with self._lock:
            self.calls += 1
            if node is not None:
                self.per_node[node] += 1

    def record_check(self, node: int, calls: int, bag_size: int) -> None:
        with self._lock:
            self.checks.append((node, calls, bag_size))


# -- answer sets ---------------------------------------------------------


def _components(p: PlainProgram) -> list[tuple[list[int], list]]:
    """Split rules into groups that share no atom; returns (atoms, rules) pairs."""
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for r in p.rules:
        atoms = sorted(r.atoms)
        for a in atoms:
            parent.setdefault(a, a)
        for a in atoms[1:]:
            ra, rb = find(atoms[0]), find(a)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int | None, tuple[list[int], list]] = {}
    for r in p.rules:
        key = find(min(r.atoms)) if r.atoms else None
        groups.setdefault(key, ([], []))[1].append(r)
    for a in parent:
        groups[find(a)][0].append(a)
    return [(sorted(atoms), rules) for _, (atoms, rules) in sorted(groups.items(), key=lambda kv: (kv[0] is not None, kv[0] or 0))]


def _local_rules(atoms: list[int], rules) -> tuple[tuple[int, int, int, int], ...]:
    pos = {a: i for i, a in enumerate(atoms)}

    def m(s):
        out = 0
        for a in s:
            out |= 1 << pos[a]
        return out

    return tuple(sorted({(m(r.head), m(r.pos), m(r.neg), m(r.dneg)) for r in rules}))


def _holds(mask: int, rules) -> bool:
    for h, pos, neg, dneg in rules:
        if pos & mask == pos and not neg & mask and dneg & mask == dneg and not h & mask:
            return False
    return True


@lru_cache(maxsize=1 << 16)
def _enumerate(n: int, rules: tuple[tuple[int, int, int, int], ...]) -> tuple[int, ...]:
    """Answer sets over ``n`` local atoms, by increasing size then lexicographically."""
    found = []
    for k in range(n + 1):
        for combo in itertools.combinations(range(n), k):
            m = 0
            for i in combo:
                m |= 1 << i
            if not _holds(m, rules):
                continue
            reduct = [(h, pos) for h, pos, neg, dneg in rules if not neg & m and dneg & m == dneg]
            if not _has_smaller_model(m, reduct):
                found.append(m)
    return tuple(found)


def _has_smaller_model(m: int, positive_rules: list[tuple[int, int]]) -> bool:
    if not m:
        return False
    sub = (m - 1) & m
    while True:
        if all(pos & sub != pos or h & sub for h, pos in positive_rules):
            return True
        if sub == 0:
            return False
        sub = (sub - 1) & m


def _component_answer_sets(p: PlainProgram, limit: int) -> list[tuple[list[int], tuple[int, ...]]]:
    out = []
    for atoms, rules in _components(p):
        if len(atoms) > limit:
            raise BudgetExceeded(f"{len(atoms)} atoms in one part exceeds the exhaustive limit {limit}")
        out.append((atoms, _enumerate(len(atoms), _local_rules(atoms, rules))))
    return out


def _globalize(atoms: list[int], local: int) -> frozenset[int]:
    return frozenset(atoms[i] for i in from_mask(local))


def answer_sets(p: PlainProgram, limit: int = DEFAULT_ATOM_LIMIT) -> frozenset[frozenset[int]]:
    """All answer sets of ``p``: models ``M`` with no model of ``p^M`` strictly inside."""
    parts = []
    for atoms, local in _component_answer_sets(p, limit):
        if not local:
            return frozenset()
        parts.append([_globalize(atoms, m) for m in local])
    return frozenset(frozenset().union(*combo) for combo in itertools.product(*parts))


def has_answer_set(
    p: PlainProgram,
    forbidden_true: Iterable[int] = (),
    forbidden_false: Iterable[int] = (),
    stats: OracleStats | None = None,
    *,
    node: int | None = None,
    limit: int = DEFAULT_ATOM_LIMIT,
) -> bool:
    """Is there an answer set avoiding ``forbidden_true`` and containing ``forbidden_false``?

    Same as asking for an answer set of ``p`` plus constraints ``:- a.`` and
    ``:- ~a.``.  Counts exactly one call on ``stats``.
    """
    if stats is not None:
        stats.record_call(node)
    ft, ff = frozenset(forbidden_true), frozenset(forbidden_false)
    covered: set[int] = set()
    for atoms, local in _component_answer_sets(p, limit):
        covered.update(atoms)
        pos = {a: i for i, a in enumerate(atoms)}
        t = sum(1 << pos[a] for a in ft if a in pos)
        f = sum(1 << pos[a] for a in ff if a in pos)
        if not any(not m & t and m & f == f for m in local):
            return False
    # atoms occurring in no rule are false in every answer set
    return ff <= covered


# -- compatibility and world views --------------------------------------------


def is_compatible(i: CWI, fam: Iterable[Iterable[int]]) -> bool:
    """The four compatibility conditions between a full CWI and a family of interpretations."""
    fam = [frozenset(j) for j in fam]
    scope = i.scope
    for j in fam:
        if not j <= scope:
            raise ScopeError("interpretation mentions atoms outside the CWI scope")
    if not fam:
        return False
    if any(not i.P <= j or i.N & j for j in fam):
        return False
    return all(any(a in j for j in fam) and any(a not in j for j in fam) for a in i.U)


def forced_cwi(fam: Iterable[Iterable[int]], universe: Iterable[int]) -> CWI:
    """The unique full CWI compatible with a nonempty family."""
    fam = [frozenset(j) for j in fam]
    if not fam:
        raise ValueError("empty family has no compatible CWI")
    P, N, U = [], [], []
    for a in universe:
        n_in = sum(a in j for j in fam)
        (P if n_in == len(fam) else N if n_in == 0 else U).append(a)
    return CWI.make(P, N, U)


def _guesses(p: Program, max_epistemic: int):
    elit = sorted(p.elit)
    if len(elit) > max_epistemic:
        raise BudgetExceeded(f"{len(elit)} epistemic atoms exceeds the limit {max_epistemic}")
    for statuses in itertools.product("PNU", repeat=len(elit)):
        P = [a for a, s in zip(elit, statuses) if s == "P"]
        N = [a for a, s in zip(elit, statuses) if s == "N"]
        U = [a for a, s in zip(elit, statuses) if s == "U"]
        yield CWI.make(P, N, U)


def _cwvs(p: Program, limit: int, max_epistemic: int):
    for guess in _guesses(p, max_epistemic):
        fam = answer_sets(epistemic_reduct(p, guess), limit)
        if not fam:
            continue
        full = forced_cwi(fam, p.atom_ids)
        if full.restrict(p.elit) == guess:
            yield full


def candidate_world_views(
    p: Program, limit: int = DEFAULT_ATOM_LIMIT, max_epistemic: int = DEFAULT_EPISTEMIC_LIMIT
) -> list[CWI]:
    """Every full CWI compatible with the answer sets of its own epistemic reduct.

    Only the epistemic atoms are guessed: the reduct depends on nothing else,
    and the values of the remaining atoms are forced by the answer sets.
    """
    return sorted(_cwvs(p, limit, max_epistemic), key=CWI.sort_key)


def world_views(
    p: Program, limit: int = DEFAULT_ATOM_LIMIT, max_epistemic: int = DEFAULT_EPISTEMIC_LIMIT
) -> list[CWI]:
    """Candidate world views that are minimal as literal sets."""
    cwvs = candidate_world_views(p, limit, max_epistemic)
    return [w for w in cwvs if not any(v != w and v.literal_subset(w) for v in cwvs)]


def wv_exists(p: Program, limit: int = DEFAULT_ATOM_LIMIT, max_epistemic: int = DEFAULT_EPISTEMIC_LIMIT) -> bool:
    return next(_cwvs(p, limit, max_epistemic), None) is not None


def cautiously_entails(p: Program, w: CWI, f: Formula, limit: int = DEFAULT_ATOM_LIMIT) -> bool:
    """``f`` is true in every answer set of the epistemic reduct w.r.t. ``w``."""
    unknown = f.atoms() - p.atom_ids
    if unknown:
        raise ValueError(f"formula mentions unknown atoms {sorted(unknown)}")
    return all(f.holds(j) for j in answer_sets(epistemic_reduct(p, w), limit))


def evaluate_formula_problem(
    p: Program, f: Formula, limit: int = DEFAULT_ATOM_LIMIT, max_epistemic: int = DEFAULT_EPISTEMIC_LIMIT
) -> bool:
    """Does some world view of ``p`` cautiously entail ``f``?"""
    return any(cautiously_entails(p, w, f, limit) for w in world_views(p, limit, max_epistemic))
