"""Command-line front end.

    ibba solve PROBLEM [--method ibba|pen] [--epsilon E] [--max-iter N] [--trace OUT] [--json]
    ibba compare PROBLEM... [--out FILE] [--jobs N] [--json]
    ibba plot TRACE PROBLEM --out FILE.svg
    ibba fixture NAME --out PATH

Exit status of ``solve``: 0 solved, 2 infeasible, 3 feasibility unresolved
(or no feasible penalty solution), 4 iteration budget exhausted, 1 error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import fixtures
from .expr import ExpressionError
from .index import TrialError
from .penalty import PenaltyConfig, PenaltyError, tune_penalty
from .plot import render_svg
from .problem import ProblemError
from .problem_file import ProblemFileError, load_problem, save_problem
from .report import compare, comparison_json, format_comparison, ibba_report, pen_report
from .solver import NonInteriorPointError, SolverConfig, Status, solve
from .trace import Trace, TraceError

EXIT_CODES = {
    Status.ACCURACY: 0,
    Status.INFEASIBLE: 2,
    Status.UNRESOLVED: 3,
    Status.BUDGET: 4,
}

BUILTIN = {
    "problem7": fixtures.problem7,
    "constant-infeasible": fixtures.constant_infeasible,
    "disjoint-infeasible": fixtures.disjoint_infeasible,
}


def cmd_solve(args) -> int:
    spec = load_problem(args.problem)
    if args.method == "ibba":
        outcome = solve(spec, SolverConfig(args.epsilon, args.max_iter, emit_trace=bool(args.trace)))
        report = ibba_report(spec, outcome)
        records = outcome.trace
        code = EXIT_CODES[outcome.status]
    else:
        outcome = tune_penalty(spec, PenaltyConfig(), args.epsilon, args.max_iter, emit_trace=bool(args.trace))
        report = pen_report(spec, outcome)
        records = outcome.trace
        if outcome.failed:
            code = 3
        elif outcome.last_run.budget_exhausted:
            code = 4
        else:
            code = 0
    if args.trace:
        Trace(args.method, spec.name, spec.m, spec.a, spec.b, records).write(args.trace)
    print(report.to_json() if args.json else report.to_text(), end="" if not args.json else "\n")
    return code


def cmd_compare(args) -> int:
    specs = [load_problem(p) for p in args.problems]
    rows = compare(specs, args.epsilon, args.jobs)
    text = comparison_json(rows) + "\n" if args.json else format_comparison(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text, end="")
    return 0


def cmd_plot(args) -> int:
    svg = render_svg(Trace.read(args.trace), load_problem(args.problem))
    Path(args.out).write_text(svg)
    return 0


def cmd_fixture(args) -> int:
    out = Path(args.out)
    if args.name == "battery":
        out.mkdir(parents=True, exist_ok=True)
        for gp in fixtures.generate_battery(args.count, args.seed):
            save_problem(gp.spec, out / f"{gp.spec.name}.problem")
        return 0
    save_problem(BUILTIN[args.name](), out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ibba", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one problem file")
    p.add_argument("problem")
    p.add_argument("--method", choices=("ibba", "pen"), default="ibba")
    p.add_argument("--epsilon", type=float, default=None, help="default: 1e-4*(b-a)")
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--trace", metavar="OUT", help="write a JSON-lines trace")
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("compare", help="IBBA versus PEN on several problems")
    p.add_argument("problems", nargs="+")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("plot", help="render a trace as an SVG diagram")
    p.add_argument("trace")
    p.add_argument("problem")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("fixture", help="write a built-in problem file")
    p.add_argument("name", choices=sorted(BUILTIN) + ["battery"])
    p.add_argument("--out", required=True, help="file, or directory for 'battery'")
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=2024)
    p.set_defaults(func=cmd_fixture)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ProblemFileError, ProblemError, ExpressionError, TrialError, TraceError,
            PenaltyError, NonInteriorPointError, OSError) as exc:
        print(f"ibba: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
