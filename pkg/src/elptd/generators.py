"""Instance generators: the scholarship family and random ground ELPs."""

from __future__ import annotations

import random

__all__ = ["generate_random", "generate_scholarship", "student_names"]

_SCHOLARSHIP = (
    "eligible_{s} :- highGPA_{s}.",
    "ineligible_{s} :- lowGPA_{s}.",
    ":- eligible_{s}, ineligible_{s}.",
    "interview_{s} :- not eligible_{s}, not ineligible_{s}.",
    "lowGPA_{s} | highGPA_{s}.",
)


def student_names(n: int) -> list[str]:
    return (["mike", "mark"] + [f"s{i}" for i in range(3, n + 1)])[:n]


def generate_scholarship(n: int, seed: int | None = None) -> str:
    """``n`` atom-disjoint copies of the scholarship program, one per student.

    With a seed the rule order is shuffled (the program is the same set of rules).
    """
    if n < 1:
        raise ValueError("need at least one student")
    lines = [rule.format(s=s) for s in student_names(n) for rule in _SCHOLARSHIP]
    if seed is not None:
        random.Random(seed).shuffle(lines)
    return "\n".join(lines) + "\n"


def generate_random(
    n_atoms: int,
    n_rules: int,
    max_head: int = 2,
    max_body: int = 3,
    p_epistemic: float = 0.3,
    p_neg: float = 0.3,
    seed: int = 0,
) -> str:
    """Random ground ELP text over atoms ``a0 .. a{n_atoms-1}``.

    Each rule draws a head of 0..max_head distinct atoms and 0..max_body body
    literals; every literal is epistemic with probability ``p_epistemic`` and
    each available negation is set with probability ``p_neg``.  Rules with
    neither head nor body are not produced.
    """
    if n_atoms < 1 or n_rules < 0 or max_head < 0 or max_body < 0:
        raise ValueError("sizes must be positive")
    if not (0 <= p_epistemic <= 1 and 0 <= p_neg <= 1):
        raise ValueError("probabilities must lie in [0, 1]")
    rng = random.Random(seed)
    atoms = [f"a{i}" for i in range(n_atoms)]
    lines = []
    for _ in range(n_rules):
        head = rng.sample(atoms, rng.randint(0, min(max_head, n_atoms)))
        lo = 1 if not head else 0
        body = []
        for _ in range(rng.randint(lo, max(lo, max_body))):
            lit = rng.choice(atoms)
            if rng.random() < p_epistemic:
                lit = "not " + ("~" if rng.random() < p_neg else "") + lit
            if rng.random() < p_neg:
                lit = "~" + lit
            body.append(lit)
        text = " | ".join(head)
        if body:
            text += (" :- " if head else ":- ") + ", ".join(body)
        lines.append(text + ".")
    return "\n".join(lines) + ("\n" if lines else "")
