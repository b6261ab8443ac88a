import random

import pytest

from elptd.generators import generate_random, generate_scholarship
from elptd.program import parse_program

P_SCH1 = """
eligible :- highGPA.
ineligible :- lowGPA.
:- eligible, ineligible.
interview :- not eligible, not ineligible.
lowGPA | highGPA.
"""
P_LOOP = "a :- not a."
P_EMPTY = ""
P_CHOICE = "a | b."


def corpus(per_setting=170, seeds_offset=0):
    """Fixed random programs: up to 6 atoms, up to 8 rules, three epistemic densities."""
    out = []
    for pe in (0.0, 0.3, 0.7):
        for seed in range(seeds_offset, seeds_offset + per_setting):
            rng = random.Random(seed * 7 + int(pe * 10))
            out.append(generate_random(rng.randint(1, 6), rng.randint(0, 8), 2, 3, pe, 0.3, seed))
    return out


@pytest.fixture
def sch1():
    return parse_program(P_SCH1)


@pytest.fixture
def sch2():
    return parse_program(generate_scholarship(2))


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
