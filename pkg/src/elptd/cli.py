"""Command line: ``elptd solve``, ``elptd gen`` and ``elptd graph``.

Exit codes of ``solve``: 10 a world view exists, 20 none exists, 2 the
algorithms disagree (``--alg all``), 1 any error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import dataclass, field

from .eprim import solve_eprim
from .formula import parse_formula
from .generators import generate_random, generate_scholarship
from .graphs import dump_edge_list, epistemic_primal_graph, incidence_graph, primal_graph
from .oracle import DEFAULT_ATOM_LIMIT, BudgetExceeded, evaluate_formula_problem, wv_exists
from .prim import DEFAULT_MAX_ROWS, format_table, solve_prim
from .program import ParseError, Program, parse_program
from .td import decompose, dump_td

log = logging.getLogger("elptd")

EXIT_WV, EXIT_NO_WV, EXIT_ERROR, EXIT_DISAGREE = 10, 20, 1, 2
ALGORITHMS = ("brute", "eprim", "prim")
STATS_KEYS = (
    "algorithm",
    "wv_exists",
    "agreement",
    "atoms",
    "rules",
    "epistemic_atoms",
    "tw_primal",
    "tw_epistemic_primal",
    "tw_incidence",
    "td_nodes",
    "oracle_calls",
    "max_table_rows",
    "wall_time_ms",
)


@dataclass
class RunConfig:
    algorithm: str = "all"
    heuristic: str = "min-fill"
    seed: int | None = None
    formula: str | None = None
    atom_limit: int = DEFAULT_ATOM_LIMIT
    max_rows: int = DEFAULT_MAX_ROWS
    verbosity: int = 0
    stats_path: str | None = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS + ("all",):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.formula is not None and self.algorithm != "brute":
            raise ValueError("--formula requires --alg brute")


@dataclass
class RunReport:
    algorithm: str
    wv_exists: bool
    answers: dict[str, bool]
    atoms: int
    rules: int
    epistemic_atoms: int
    tw_primal: int
    tw_epistemic_primal: int
    tw_incidence: int
    td_nodes: int | None = None
    oracle_calls: int | None = None
    max_table_rows: int | None = None
    wall_time_ms: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def agreement(self) -> bool:
        return len(set(self.answers.values())) <= 1

    @property
    def exit_code(self) -> int:
        if not self.agreement:
            return EXIT_DISAGREE
        return EXIT_WV if self.wv_exists else EXIT_NO_WV

    def to_json(self, verbosity: int = 0) -> dict:
        out = {k: getattr(self, k) for k in STATS_KEYS}
        if verbosity >= 2:
            out["details"] = dict(self.details, answers=self.answers)
        return out


def _width(g, cfg: RunConfig) -> int:
    return max(decompose(g, cfg.heuristic, cfg.seed).width, 0)


def run(cfg: RunConfig, text: str) -> RunReport:
    """Solve one program with the configured algorithm(s)."""
    start = time.perf_counter()
    p = parse_program(text)
    answers: dict[str, bool] = {}
    details: dict = {}
    td_nodes = oracle_calls = max_rows = None
    algs = ALGORITHMS if cfg.algorithm == "all" else (cfg.algorithm,)

    for alg in algs:
        t0 = time.perf_counter()
        if alg == "brute":
            if cfg.formula is not None:
                answers[alg] = evaluate_formula_problem(p, parse_formula(cfg.formula, p), cfg.atom_limit)
            else:
                answers[alg] = wv_exists(p, cfg.atom_limit)
        elif alg == "eprim":
            res = solve_eprim(p, cfg.heuristic, cfg.seed, limit=cfg.atom_limit)
            answers[alg] = res.exists
            oracle_calls = res.stats.calls
            max_rows = max(max_rows or 0, res.max_table_rows)
            if res.td is not None:
                td_nodes = len(res.td)
                details["eprim_nodes"] = [
                    {
                        "node": t,
                        "kind": res.td.kinds[t],
                        "bag_size": len(res.td.bags[t]),
                        "rows": res.table_sizes[t],
                        "oracle_calls": res.stats.per_node.get(t, 0),
                    }
                    for t in range(len(res.td))
                ]
        else:
            def dump(t, table):
                log.debug("prim table %d:\n%s", t, format_table(table, p.atoms))

            res = solve_prim(
                p, cfg.heuristic, cfg.seed, max_rows=cfg.max_rows, on_table=dump if cfg.verbosity >= 3 else None
            )
            answers[alg] = res.exists
            max_rows = max(max_rows or 0, res.max_table_rows)
            if res.td is not None:
                td_nodes = len(res.td)
                details["prim_nodes"] = [
                    {"node": t, "kind": res.td.kinds[t], "bag_size": len(res.td.bags[t]), "rows": res.table_sizes[t]}
                    for t in range(len(res.td))
                ]
        log.info("%s: %s (%.1f ms)", alg, answers[alg], 1000 * (time.perf_counter() - t0))

    # the exhaustive oracle is the reference whenever it ran
    exists = answers["brute"] if "brute" in answers else answers[algs[0]]
    return RunReport(
        algorithm=cfg.algorithm,
        wv_exists=exists,
        answers=answers,
        atoms=len(p.atoms),
        rules=len(p.rules),
        epistemic_atoms=len(p.elit),
        tw_primal=_width(primal_graph(p), cfg),
        tw_epistemic_primal=_width(epistemic_primal_graph(p), cfg),
        tw_incidence=_width(incidence_graph(p), cfg),
        td_nodes=td_nodes,
        oracle_calls=oracle_calls,
        max_table_rows=max_rows,
        wall_time_ms=round(1000 * (time.perf_counter() - start), 3),
        details=details,
    )


def emit_stats(report: RunReport, path: str, verbosity: int = 0) -> None:
    data = json.dumps(report.to_json(verbosity), indent=2, sort_keys=False)
    if path == "-":
        print(data)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(data + "\n")


# -- argument handling --------------------------------------------------------


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _cmd_solve(args) -> int:
    cfg = RunConfig(
        algorithm=args.alg,
        heuristic=args.td,
        seed=args.seed,
        formula=args.formula,
        atom_limit=args.budget_atoms,
        max_rows=args.budget_rows,
        verbosity=args.verbose,
        stats_path=args.stats,
    )
    report = run(cfg, _read(args.file))
    if not report.agreement:
        log.error("algorithms disagree: %s", report.answers)
    print("WV EXISTS" if report.wv_exists else "NO WV")
    if cfg.stats_path:
        emit_stats(report, cfg.stats_path, cfg.verbosity)
    return report.exit_code


def _cmd_gen(args) -> int:
    if args.family == "scholarship":
        sys.stdout.write(generate_scholarship(args.n, args.seed))
    else:
        sys.stdout.write(
            generate_random(
                args.atoms, args.rules, args.max_head, args.max_body, args.p_epistemic, args.p_neg, args.seed
            )
        )
    return 0


def _cmd_graph(args) -> int:
    p: Program = parse_program(_read(args.file))
    build = {"primal": primal_graph, "epistemic": epistemic_primal_graph, "incidence": incidence_graph}
    g = build[args.kind](p)
    if args.decompose:
        sys.stdout.write(dump_td(decompose(g, args.td, args.seed), g))
    else:
        sys.stdout.write(dump_edge_list(g))
    return 0


class _ArgumentParser(argparse.ArgumentParser):
    # usage errors are plain errors; status 2 means disagreement
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="elptd", description="World view existence for ground epistemic logic programs.")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="decide whether a world view exists")
    s.add_argument("file", help="program file, '-' for stdin")
    s.add_argument("--alg", choices=ALGORITHMS + ("all",), default="all")
    s.add_argument("--formula", help="with --alg brute: does some world view cautiously entail EXPR")
    s.add_argument("--td", choices=("min-fill", "min-degree"), default="min-fill")
    s.add_argument("--seed", type=int, default=None, help="tie-breaking seed for the elimination ordering")
    s.add_argument("--stats", metavar="PATH", help="write a JSON report ('-' for stdout)")
    s.add_argument("--budget-atoms", type=int, default=DEFAULT_ATOM_LIMIT, help="exhaustive enumeration limit")
    s.add_argument("--budget-rows", type=int, default=DEFAULT_MAX_ROWS, help="PRIM table size limit")
    s.add_argument("-v", "--verbose", action="count", default=0)
    s.set_defaults(func=_cmd_solve)

    g = sub.add_parser("gen", help="generate instances")
    gsub = g.add_subparsers(dest="family", required=True)
    sch = gsub.add_parser("scholarship")
    sch.add_argument("n", type=int)
    sch.add_argument("--seed", type=int, default=None)
    rnd = gsub.add_parser("random")
    rnd.add_argument("--atoms", type=int, default=6)
    rnd.add_argument("--rules", type=int, default=8)
    rnd.add_argument("--max-head", type=int, default=2)
    rnd.add_argument("--max-body", type=int, default=3)
    rnd.add_argument("--p-epistemic", type=float, default=0.3)
    rnd.add_argument("--p-neg", type=float, default=0.3)
    rnd.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=_cmd_gen)

    gr = sub.add_parser("graph", help="print a program graph or its decomposition")
    gr.add_argument("file")
    gr.add_argument("--kind", choices=("primal", "epistemic", "incidence"), default="primal")
    gr.add_argument("--decompose", action="store_true", help="print a tree decomposition instead of the edges")
    gr.add_argument("--td", choices=("min-fill", "min-degree"), default="min-fill")
    gr.add_argument("--seed", type=int, default=None)
    gr.set_defaults(func=_cmd_graph)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = [logging.WARNING, logging.INFO][min(getattr(args, "verbose", 0), 1)]
    if getattr(args, "verbose", 0) >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ParseError, ValueError, BudgetExceeded, OSError) as e:
        log.error("%s", e)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
