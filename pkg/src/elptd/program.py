"""Ground epistemic logic programs: data model, text format, reducts.

Atoms are dense integer ids into ``Program.atoms``.  Interpretations are
frozensets of atom ids at the API level; the solvers additionally use integer
bitmasks (bit ``i`` set iff atom ``i`` is true) for speed, see ``to_mask``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

__all__ = [
    "BodyLiteral",
    "CWI",
    "ParseError",
    "PlainProgram",
    "PlainRule",
    "Program",
    "Rule",
    "ScopeError",
    "epistemic_reduct",
    "format_program",
    "from_mask",
    "gl_reduct",
    "parse_program",
    "satisfies",
    "to_mask",
]


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class ScopeError(ValueError):
    """A CWI does not assign a value to an atom that needs one."""


def to_mask(atoms: Iterable[int]) -> int:
    m = 0
    for a in atoms:
        m |= 1 << a
    return m


def from_mask(mask: int) -> frozenset[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


@dataclass(frozen=True)
class BodyLiteral:
    """One of ``a``, ``~a``, ``not a``, ``not ~a``, ``~not a``, ``~not ~a``."""

    atom: int
    outer_neg: bool = False
    epistemic: bool = False
    inner_neg: bool = False

    def __post_init__(self):
        if self.inner_neg and not self.epistemic:
            raise ValueError("inner negation requires the epistemic operator")


@dataclass(frozen=True)
class Rule:
    head: frozenset[int]
    body: tuple[BodyLiteral, ...] = ()

    @cached_property
    def atoms(self) -> frozenset[int]:
        return self.head | {lit.atom for lit in self.body}

    @cached_property
    def elit(self) -> frozenset[int]:
        return frozenset(lit.atom for lit in self.body if lit.epistemic)


@dataclass(frozen=True)
class Program:
    """A ground ELP ``(atoms, rules)``.  ``atoms[i]`` is the name of atom ``i``."""

    atoms: tuple[str, ...] = ()
    rules: tuple[Rule, ...] = ()

    def __post_init__(self):
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError("atom names must be unique")
        n = len(self.atoms)
        for r in self.rules:
            if any(a < 0 or a >= n for a in r.atoms):
                raise ValueError(f"rule references unknown atom id: {r}")

    @cached_property
    def elit(self) -> frozenset[int]:
        return frozenset().union(*(r.elit for r in self.rules))

    @cached_property
    def atom_ids(self) -> frozenset[int]:
        return frozenset(range(len(self.atoms)))

    @cached_property
    def index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.atoms)}

    def atom(self, name: str) -> int:
        return self.index[name]

    def names(self, ids: Iterable[int]) -> list[str]:
        return sorted(self.atoms[i] for i in ids)

    def subprogram(self, rule_ids: Iterable[int]) -> Program:
        """Program over the same atom table containing only the given rules."""
        return Program(self.atoms, tuple(self.rules[i] for i in rule_ids))

    def __str__(self) -> str:
        return format_program(self)


@dataclass(frozen=True)
class CWI:
    """Three-valued assignment: P always true, N always false, U unknown.

    The scope of a CWI is ``P | N | U``; a full CWI has the whole atom table
    as its scope, a partial one only a subset (e.g. a TD bag).
    """

    P: frozenset[int] = frozenset()
    N: frozenset[int] = frozenset()
    U: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.P & self.N or self.P & self.U or self.N & self.U:
            raise ValueError("P, N and U must be pairwise disjoint")

    @classmethod
    def make(cls, P=(), N=(), U=()) -> CWI:
        return cls(frozenset(P), frozenset(N), frozenset(U))

    @property
    def scope(self) -> frozenset[int]:
        return self.P | self.N | self.U

    def status(self, a: int) -> str:
        if a in self.P:
            return "P"
        if a in self.N:
            return "N"
        if a in self.U:
            return "U"
        raise ScopeError(f"atom {a} not in CWI scope")

    def assign(self, a: int, status: str) -> CWI:
        if a in self.scope:
            raise ValueError(f"atom {a} already assigned")
        if status == "P":
            return CWI(self.P | {a}, self.N, self.U)
        if status == "N":
            return CWI(self.P, self.N | {a}, self.U)
        if status == "U":
            return CWI(self.P, self.N, self.U | {a})
        raise ValueError(f"unknown status {status!r}")

    def restrict(self, scope: Iterable[int]) -> CWI:
        s = frozenset(scope)
        return CWI(self.P & s, self.N & s, self.U & s)

    def forget(self, a: int) -> CWI:
        return CWI(self.P - {a}, self.N - {a}, self.U - {a})

    def union(self, other: CWI) -> CWI:
        return CWI(self.P | other.P, self.N | other.N, self.U | other.U)

    def literal_subset(self, other: CWI) -> bool:
        """``self`` is a subset of ``other`` read as literal sets P + {~a : a in N}."""
        return self.P <= other.P and self.N <= other.N

    def sort_key(self) -> tuple:
        return (sorted(self.P), sorted(self.N), sorted(self.U))


# -- plain programs ---------------------------------------------------------


@dataclass(frozen=True)
class PlainRule:
    """Rule without epistemic negation.

    The body is split by literal form: ``pos`` (a), ``neg`` (~a) and
    ``dneg`` (~~a).  A rule with only ``head``/``pos`` is positive.
    """

    head: frozenset[int] = frozenset()
    pos: frozenset[int] = frozenset()
    neg: frozenset[int] = frozenset()
    dneg: frozenset[int] = frozenset()

    @cached_property
    def atoms(self) -> frozenset[int]:
        return self.head | self.pos | self.neg | self.dneg

    @cached_property
    def masks(self) -> tuple[int, int, int, int]:
        return to_mask(self.head), to_mask(self.pos), to_mask(self.neg), to_mask(self.dneg)

    @property
    def is_positive(self) -> bool:
        return not self.neg and not self.dneg


@dataclass(frozen=True)
class PlainProgram:
    """Program with nested default negation only.  ``universe`` is its atom set."""

    universe: frozenset[int] = frozenset()
    rules: tuple[PlainRule, ...] = ()

    def __post_init__(self):
        for r in self.rules:
            if not r.atoms <= self.universe:
                raise ValueError("rule atoms outside the universe")

    @property
    def is_positive(self) -> bool:
        return all(r.is_positive for r in self.rules)

    @classmethod
    def from_program(cls, p: Program) -> PlainProgram:
        """View an ELP without epistemic literals as a plain program."""
        return epistemic_reduct(p, CWI())

    def with_rules(self, extra: Iterable[PlainRule]) -> PlainProgram:
        extra = tuple(extra)
        return PlainProgram(self.universe.union(*(r.atoms for r in extra)), self.rules + extra)


def rule_holds(m: int, rule: PlainRule) -> bool:
    """``m`` (a bitmask) is a classical model of ``rule``."""
    h, pos, neg, dneg = rule.masks
    if pos & m != pos or neg & m or dneg & m != dneg:
        return True
    return bool(h & m)


def satisfies(m: Iterable[int] | int, p: PlainProgram | PlainRule | Program | Rule) -> bool:
    """Classical satisfaction of a rule or program without epistemic literals."""
    mask = m if isinstance(m, int) else to_mask(m)
    if isinstance(p, Rule):
        return rule_holds(mask, _plain(p))
    if isinstance(p, Program):
        return all(rule_holds(mask, _plain(r)) for r in p.rules)
    if isinstance(p, PlainRule):
        return rule_holds(mask, p)
    return all(rule_holds(mask, r) for r in p.rules)


def _plain(r: Rule) -> PlainRule:
    if r.elit:
        raise ValueError("satisfaction of epistemic literals is undefined")
    pos = frozenset(l.atom for l in r.body if not l.outer_neg)
    neg = frozenset(l.atom for l in r.body if l.outer_neg)
    return PlainRule(r.head, pos, neg)


def epistemic_reduct(p: Program, i: CWI) -> PlainProgram:
    """Resolve every ``not l`` against ``i``.

    ``not l`` becomes ``~l`` when ``l`` holds in ``i`` and is dropped (true)
    otherwise; under an outer ``~`` the latter deletes the rule.  ``~~~a``
    collapses to ``~a``.  The universe is the program's whole atom table.
    """
    missing = p.elit - i.scope
    if missing:
        raise ScopeError(f"CWI has no value for epistemic atoms {p.names(missing)}")
    out = []
    for r in p.rules:
        pos, neg, dneg = set(), set(), set()
        for lit in r.body:
            a = lit.atom
            if not lit.epistemic:
                (neg if lit.outer_neg else pos).add(a)
                continue
            held = a in i.N if lit.inner_neg else a in i.P
            if not held:
                if lit.outer_neg:
                    break  # ~T falsifies the body
                continue
            # not l -> ~l ; ~not l -> ~~l ; l = a or ~a
            depth = 1 + lit.outer_neg + lit.inner_neg
            if depth == 3:
                depth = 1
            (neg if depth == 1 else dneg).add(a)
        else:
            out.append(PlainRule(r.head, frozenset(pos), frozenset(neg), frozenset(dneg)))
    return PlainProgram(p.atom_ids, tuple(out))


def gl_reduct(p: PlainProgram, m: Iterable[int] | int) -> PlainProgram:
    """Gelfond-Lifschitz reduct: keep rules whose negated elements hold in ``m``."""
    mask = m if isinstance(m, int) else to_mask(m)
    rules = []
    for r in p.rules:
        _, _, neg, dneg = r.masks
        if neg & mask or dneg & mask != dneg:
            continue
        rules.append(PlainRule(r.head, r.pos))
    return PlainProgram(p.universe, tuple(rules))


# -- text format -------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<arrow>:-)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
  | (?P<const>[0-9_][A-Za-z0-9_]*)
  | (?P<punct>[().,|~])
    """,
    re.VERBOSE,
)

_CONST = re.compile(r"[a-z0-9_]+\Z")


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> Iterator[_Tok]:
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok = m.group()
        if kind != "ws":
            if kind == "punct" or kind == "arrow":
                kind = tok
            yield _Tok(kind, tok, line, pos - line_start + 1)
        nl = tok.count("\n")
        if nl:
            line += nl
            line_start = pos + tok.rfind("\n") + 1
        pos = m.end()
    yield _Tok("eof", "", line, pos - line_start + 1)


class _Parser:
    def __init__(self, text: str):
        self.toks = list(_tokenize(text))
        self.i = 0
        self.atoms: dict[str, int] = {}

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def take(self, kind: str) -> _Tok:
        if self.tok.kind != kind:
            self.error(f"expected {kind!r}, found {self.tok.text or 'end of input'!r}")
        tok = self.tok
        self.i += 1
        return tok

    def program(self) -> Program:
        rules = []
        while self.tok.kind != "eof":
            rules.append(self.rule())
        names = [None] * len(self.atoms)
        for name, i in self.atoms.items():
            names[i] = name
        return Program(tuple(names), tuple(rules))

    def rule(self) -> Rule:
        head: list[int] = []
        if self.tok.kind == "ident":
            head.append(self.atom())
            while self.tok.kind == "|":
                self.i += 1
                head.append(self.atom())
        body: list[BodyLiteral] = []
        if self.tok.kind == ":-":
            self.i += 1
            body.append(self.bodylit())
            while self.tok.kind == ",":
                self.i += 1
                body.append(self.bodylit())
        self.take(".")
        return Rule(frozenset(head), tuple(body))

    def bodylit(self) -> BodyLiteral:
        outer = epistemic = inner = False
        if self.tok.kind == "~":
            outer = True
            self.i += 1
            if self.tok.kind == "~":
                self.error("'~' inside a literal must follow 'not'")
        if self.tok.kind == "ident" and self.tok.text == "not":
            epistemic = True
            self.i += 1
            if self.tok.kind == "~":
                inner = True
                self.i += 1
        return BodyLiteral(self.atom(), outer, epistemic, inner)

    def atom(self) -> int:
        tok = self.tok
        if tok.kind != "ident":
            self.error(f"expected an atom, found {tok.text or 'end of input'!r}")
        if tok.text == "not":
            self.error("'not' is reserved and cannot be used as an atom name")
        self.i += 1
        name = tok.text
        if self.tok.kind == "(":
            self.i += 1
            args = [self.const()]
            while self.tok.kind == ",":
                self.i += 1
                args.append(self.const())
            self.take(")")
            name = f"{name}({','.join(args)})"
        return self.atoms.setdefault(name, len(self.atoms))

    def const(self) -> str:
        tok = self.tok
        if tok.kind not in ("ident", "const") or not _CONST.match(tok.text):
            self.error(f"expected a constant, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok.text


def parse_program(text: str | bytes) -> Program:
    """Parse the rule language; atoms are numbered by first occurrence."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return _Parser(text).program()


def _format_literal(p: Program, lit: BodyLiteral) -> str:
    s = ""
    if lit.outer_neg:
        s += "~"
    if lit.epistemic:
        s += "not " + ("~" if lit.inner_neg else "")
    return s + p.atoms[lit.atom]


def format_rule(p: Program, r: Rule) -> str:
    head = " | ".join(p.atoms[a] for a in sorted(r.head))
    if not r.body:
        return f"{head}."
    body = ", ".join(_format_literal(p, lit) for lit in r.body)
    return f"{head} :- {body}." if head else f":- {body}."


def format_program(p: Program) -> str:
    """Canonical text form; ``parse_program`` reads it back to an equal program."""
    return "".join(format_rule(p, r) + "\n" for r in p.rules)
