"""Propositional formulas over program atoms.

Surface syntax: ``f := atom | "!" f | f "&" f | f "|" f | "(" f ")"`` with
precedence ``!`` > ``&`` > ``|``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .program import ParseError, Program

__all__ = ["And", "Atom", "Formula", "Not", "Or", "parse_formula"]


@dataclass(frozen=True)
class Atom:
    atom: int

    def holds(self, m: frozenset[int]) -> bool:
        return self.atom in m

    def atoms(self) -> frozenset[int]:
        return frozenset((self.atom,))


@dataclass(frozen=True)
class Not:
    sub: Formula

    def holds(self, m: frozenset[int]) -> bool:
        return not self.sub.holds(m)

    def atoms(self) -> frozenset[int]:
        return self.sub.atoms()


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula

    def holds(self, m: frozenset[int]) -> bool:
        return self.left.holds(m) and self.right.holds(m)

    def atoms(self) -> frozenset[int]:
        return self.left.atoms() | self.right.atoms()


@dataclass(frozen=True)
class Or:
    left: Formula
    right: Formula

    def holds(self, m: frozenset[int]) -> bool:
        return self.left.holds(m) or self.right.holds(m)

    def atoms(self) -> frozenset[int]:
        return self.left.atoms() | self.right.atoms()


Formula = Union[Atom, Not, And, Or]

_TOK = re.compile(r"\s*(?:([a-z][A-Za-z0-9_]*(?:\([a-z0-9_]+(?:\s*,\s*[a-z0-9_]+)*\))?)|([!&|()]))")


def parse_formula(text: str, program: Program) -> Formula:
    """Parse ``text``; atom names are resolved against ``program``."""
    toks: list[tuple[str, int]] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOK.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r} in formula", 1, pos + 1)
        toks.append((m.group(1) or m.group(2), m.start(1) if m.group(1) else m.start(2)))
        pos = m.end()
    toks.append(("", len(text)))
    i = 0

    def peek() -> str:
        return toks[i][0]

    def fail(msg: str):
        raise ParseError(msg, 1, toks[i][1] + 1)

    def disj() -> Formula:
        nonlocal i
        f = conj()
        while peek() == "|":
            i += 1
            f = Or(f, conj())
        return f

    def conj() -> Formula:
        nonlocal i
        f = unary()
        while peek() == "&":
            i += 1
            f = And(f, unary())
        return f

    def unary() -> Formula:
        nonlocal i
        tok = peek()
        if tok == "!":
            i += 1
            return Not(unary())
        if tok == "(":
            i += 1
            f = disj()
            if peek() != ")":
                fail("expected ')'")
            i += 1
            return f
        if tok and tok[0].isalpha():
            name = re.sub(r"\s+", "", tok)
            if name not in program.index:
                fail(f"unknown atom {name!r}")
            i += 1
            return Atom(program.index[name])
        fail(f"unexpected {tok or 'end of formula'!r}")

    f = disj()
    if peek():
        fail(f"unexpected {peek()!r}")
    return f
