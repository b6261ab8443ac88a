"""World view existence for ground epistemic logic programs via tree decompositions.

Three deciders share one program model: an exhaustive reference oracle, a
dynamic program over the epistemic primal graph that queries an answer-set
oracle (``solve_eprim``) and a self-contained dynamic program over the
primal graph (``solve_prim``).
"""

from .eprim import solve_eprim
from .formula import parse_formula
from .oracle import BudgetExceeded, answer_sets, candidate_world_views, evaluate_formula_problem, world_views, wv_exists
from .prim import solve_prim
from .program import CWI, ParseError, Program, parse_program

__all__ = [
    "CWI",
    "BudgetExceeded",
    "ParseError",
    "Program",
    "answer_sets",
    "candidate_world_views",
    "evaluate_formula_problem",
    "parse_formula",
    "parse_program",
    "solve_eprim",
    "solve_prim",
    "world_views",
    "wv_exists",
]

__version__ = "0.1.0"
