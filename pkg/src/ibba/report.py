"""Run reports and the IBBA/PEN comparison table."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

from .penalty import PenaltyConfig, PenaltyOutcome, tune_penalty
from .problem import ProblemSpec
from .solver import SolveOutcome, SolverConfig, Status, solve


@dataclass
class RunReport:
    problem: str
    method: str  # "IBBA" or "PEN"
    status: str
    x: Optional[float]
    f: Optional[float]
    n_g: list[int]
    n_f: int
    iterations: int
    evaluations: int
    bounds: Optional[tuple[float, float]] = None
    pstar: Optional[float] = None
    bound_case: Optional[str] = None

    def check(self) -> None:
        """The weighted total must follow from the counters."""
        if sum(self.n_g) + self.n_f != self.iterations:
            raise ValueError(f"{self.problem}: counters do not add up to the iteration count")
        weighted = sum(j * n for j, n in enumerate(self.n_g, start=1)) + (len(self.n_g) + 1) * self.n_f
        if weighted != self.evaluations:
            raise ValueError(f"{self.problem}: weighted evaluations {weighted} != {self.evaluations}")

    def to_text(self) -> str:
        tag = self.method
        xcol, fcol = ("XIBBA", "FIBBA") if tag == "IBBA" else ("XPEN", "FXPEN")
        lines = [
            f"Problem: {self.problem}",
            f"Method: {tag}",
            f"Status: {self.status}",
            f"{xcol}: {_num(self.x)}",
            f"{fcol}: {_num(self.f)}",
        ]
        if tag == "IBBA":
            lines += [f"N_g{j}: {n}" for j, n in enumerate(self.n_g, start=1)]
            lines.append(f"N_f: {self.n_f}")
        else:
            lines.append(f"P*: {_num(self.pstar)}")
        lines += [f"Iterations: {self.iterations}", f"Eval.: {self.evaluations}"]
        if self.bounds is not None:
            lines.append(f"Bounds: [{_num(self.bounds[0])}, {_num(self.bounds[1])}] (case {self.bound_case})")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)


def _num(v) -> str:
    return "-" if v is None else f"{v:.8f}"


def ibba_report(spec: ProblemSpec, outcome: SolveOutcome) -> RunReport:
    report = RunReport(
        problem=spec.name,
        method="IBBA",
        status=outcome.status.value,
        x=outcome.x,
        f=outcome.f,
        n_g=list(outcome.ledger.n_g),
        n_f=outcome.ledger.n_f,
        iterations=outcome.ledger.iterations,
        evaluations=outcome.ledger.weighted,
        bounds=outcome.bounds,
        bound_case=outcome.bound_case,
    )
    report.check()
    return report


def pen_report(spec: ProblemSpec, outcome: PenaltyOutcome) -> RunReport:
    if outcome.failed:
        status = "TuningFailed"
    elif outcome.last_run is not None and outcome.last_run.budget_exhausted:
        status = Status.BUDGET.value
    else:
        status = Status.ACCURACY.value
    report = RunReport(
        problem=spec.name,
        method="PEN",
        status=status,
        x=outcome.x,
        f=outcome.f,
        n_g=list(outcome.ledger.n_g),
        n_f=outcome.ledger.n_f,
        iterations=outcome.ledger.iterations,
        evaluations=outcome.ledger.weighted,
        pstar=outcome.pstar,
    )
    report.check()
    return report


# ------------------------------------------------------------------ comparison


@dataclass
class ComparisonRow:
    problem: str
    pen_iterations: int = 0
    ibba_iterations: int = 0
    pen_evaluations: int = 0
    ibba_evaluations: int = 0
    error: Optional[str] = None
    reports: list[RunReport] = field(default_factory=list)

    @property
    def iteration_speedup(self) -> float:
        return self.pen_iterations / self.ibba_iterations

    @property
    def evaluation_speedup(self) -> float:
        return self.pen_evaluations / self.ibba_evaluations


@dataclass
class ComparisonSummary:
    pen_iterations: float
    ibba_iterations: float
    iteration_speedup: float  # ratio of the averages
    pen_evaluations: float
    ibba_evaluations: float
    evaluation_speedup: float
    mean_iteration_speedup: float  # average of per-problem ratios
    mean_evaluation_speedup: float


def compare_one(spec: ProblemSpec, epsilon: Optional[float] = None,
                penalty: PenaltyConfig = PenaltyConfig()) -> ComparisonRow:
    row = ComparisonRow(spec.name)
    try:
        ibba = solve(spec, SolverConfig(epsilon=epsilon))
        pen = tune_penalty(spec, penalty, epsilon)
    except Exception as exc:  # reported inline, row excluded from averages
        row.error = f"{type(exc).__name__}: {exc}"
        return row
    row.reports = [ibba_report(spec, ibba), pen_report(spec, pen)]
    if ibba.status is not Status.ACCURACY:
        row.error = f"IBBA stopped with {ibba.status.value}"
    elif pen.failed:
        row.error = f"PEN found no feasible point up to P*={pen.pstar:g}"
    row.ibba_iterations = ibba.ledger.iterations
    row.ibba_evaluations = ibba.ledger.weighted
    row.pen_iterations = pen.ledger.iterations
    row.pen_evaluations = pen.ledger.weighted
    return row


def _compare_task(args):
    return compare_one(*args)


def compare(specs: list[ProblemSpec], epsilon: Optional[float] = None, jobs: int = 1,
            penalty: PenaltyConfig = PenaltyConfig()) -> list[ComparisonRow]:
    """Run both methods on every problem; rows come back in input order."""
    tasks = [(spec, epsilon, penalty) for spec in specs]
    if jobs > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_compare_task, tasks))
    return [_compare_task(t) for t in tasks]


def summarize(rows: list[ComparisonRow]) -> Optional[ComparisonSummary]:
    ok = [r for r in rows if r.error is None]
    if not ok:
        return None
    n = len(ok)

    def mean(values):
        return sum(values) / n

    pen_it = mean([r.pen_iterations for r in ok])
    ibba_it = mean([r.ibba_iterations for r in ok])
    pen_ev = mean([r.pen_evaluations for r in ok])
    ibba_ev = mean([r.ibba_evaluations for r in ok])
    return ComparisonSummary(
        pen_it, ibba_it, pen_it / ibba_it,
        pen_ev, ibba_ev, pen_ev / ibba_ev,
        mean([r.iteration_speedup for r in ok]),
        mean([r.evaluation_speedup for r in ok]),
    )


def format_comparison(rows: list[ComparisonRow]) -> str:
    """Fixed-width table: iterations and evaluations with speedups, plus averages."""
    width = max([len("Problem")] + [len(r.problem) for r in rows] + [len("Mean speedup")])
    head1 = f"{'':<{width}} | {'Iterations':^30} | {'Evaluations':^30}"
    head2 = (f"{'Problem':<{width}} | {'PEN':>9} {'IBBA':>9} {'Speedup':>10} | "
             f"{'PEN':>9} {'IBBA':>9} {'Speedup':>10}")
    rule = "-" * len(head2)
    lines = [head1, head2, rule]
    for r in rows:
        if r.error is not None:
            lines.append(f"{r.problem:<{width}} | failed: {r.error}")
            continue
        lines.append(
            f"{r.problem:<{width}} | {r.pen_iterations:>9d} {r.ibba_iterations:>9d} {r.iteration_speedup:>10.2f} | "
            f"{r.pen_evaluations:>9d} {r.ibba_evaluations:>9d} {r.evaluation_speedup:>10.2f}"
        )
    s = summarize(rows)
    lines.append(rule)
    if s is not None:
        lines.append(
            f"{'Average':<{width}} | {s.pen_iterations:>9.1f} {s.ibba_iterations:>9.1f} {s.iteration_speedup:>10.2f} | "
            f"{s.pen_evaluations:>9.1f} {s.ibba_evaluations:>9.1f} {s.evaluation_speedup:>10.2f}"
        )
        lines.append(
            f"{'Mean speedup':<{width}} | {'':>9} {'':>9} {s.mean_iteration_speedup:>10.2f} | "
            f"{'':>9} {'':>9} {s.mean_evaluation_speedup:>10.2f}"
        )
    return "\n".join(lines) + "\n"


def comparison_json(rows: list[ComparisonRow]) -> str:
    out = []
    for r in rows:
        item = {"problem": r.problem, "error": r.error}
        if r.error is None:
            item.update(
                pen_iterations=r.pen_iterations, ibba_iterations=r.ibba_iterations,
                iteration_speedup=r.iteration_speedup, pen_evaluations=r.pen_evaluations,
                ibba_evaluations=r.ibba_evaluations, evaluation_speedup=r.evaluation_speedup,
            )
        out.append(item)
    s = summarize(rows)
    return json.dumps({"rows": out, "summary": asdict(s) if s else None}, indent=2)
