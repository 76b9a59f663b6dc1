"""Penalty baseline: the sawtooth method on ``f + P* max(g_1, ..., g_m, 0)``."""

from __future__ import annotations

import bisect
import heapq
import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional

from .problem import EvaluationLedger, ProblemSpec, check


class PenaltyError(RuntimeError):
    pass


@dataclass(frozen=True)
class PenaltyConfig:
    initial: float = 15.0
    restart: float = 20.0
    increment: float = 10.0
    tolerance: float = 0.0  # feasibility test is g_j(x) <= tolerance
    max_rounds: int = 60

    def __post_init__(self):
        if min(self.initial, self.restart, self.increment) <= 0:
            raise ValueError("penalty coefficients must be positive")
        if self.tolerance < 0:
            raise ValueError("feasibility tolerance must be non-negative")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")

    def schedule(self):
        """15, 20, 30, 40, ... with the default settings."""
        yield self.initial
        for r in itertools.count():
            yield self.restart + r * self.increment


def penalized(spec: ProblemSpec, pstar: float, ledger: Optional[EvaluationLedger] = None) -> Callable[[float], float]:
    """``x -> f(x) + pstar * max(g_1(x), ..., g_m(x), 0)``.

    Every call evaluates all ``m + 1`` functions and is booked in ``ledger``
    as one trial at the top level.
    """
    constraints = spec.constraints
    objective = spec.objective
    top = spec.m + 1

    def F(x: float) -> float:
        violation = max([g(x) for g in constraints] + [0.0])
        value = objective(x) + pstar * violation
        if ledger is not None:
            ledger.record_trial(top)
        return value

    return F


def penalty_lipschitz(spec: ProblemSpec, pstar: float) -> float:
    """Lipschitz overestimate of the penalized function."""
    worst = max((g.K for g in spec.constraints), default=0.0)
    return spec.objective.K + pstar * worst


@dataclass
class PijavskiiResult:
    x: float
    value: float
    iterations: int
    lower_bound: float  # minimal characteristic at the stop
    trials: list[tuple[float, float]]  # (x, F(x)) in evaluation order
    min_characteristics: list[float] = field(default_factory=list)  # per iteration
    budget_exhausted: bool = False
    trace: list[dict] = field(default_factory=list)

    def __iter__(self):
        # unpacks as (x, value, iterations)
        return iter((self.x, self.value, self.iterations))


def pijavskii_minimize(
    F: Callable[[float], float],
    K: float,
    a: float,
    b: float,
    eps: float,
    max_iterations: int = 100_000,
    emit_trace: bool = False,
) -> PijavskiiResult:
    """Sawtooth minimization of ``F`` on ``[a, b]`` with Lipschitz overestimate ``K``.

    Starts from trials at ``a`` and ``b``; each step splits the leftmost interval
    of minimal characteristic ``0.5 * (F_l + F_r - K * (x_r - x_l))`` at the
    minimizer of the two cones, and stops once that interval is no longer than
    ``eps``.
    """
    if not K > 0:
        raise ValueError("K must be positive")
    if not a < b:
        raise ValueError("need a < b")
    trials = [(a, F(a)), (b, F(b))]
    heap = []
    counter = itertools.count()
    mins = []
    trace = []
    xs = [a, b]
    best = min(trials[0][1], trials[1][1])
    if emit_trace:
        trace = [
            {"k": 0, "x": a, "value": trials[0][1], "best": trials[0][1], "t": None, "R_t": None},
            {"k": 1, "x": b, "value": trials[1][1], "best": best, "t": None, "R_t": None},
        ]

    def push(xl, fl, xr, fr):
        R = 0.5 * (fl + fr - K * (xr - xl))
        # ties go to the leftmost interval
        heapq.heappush(heap, (R, xl, next(counter), xr, fl, fr))

    push(a, trials[0][1], b, trials[1][1])
    exhausted = False
    while True:
        R, xl, _, xr, fl, fr = heap[0]
        mins.append(R)
        if xr - xl <= eps:
            break
        if len(trials) >= max_iterations:
            exhausted = True
            break
        heapq.heappop(heap)
        y = 0.5 * (xl + xr - (fr - fl) / K)
        if not xl < y < xr:
            raise PenaltyError(f"trial point {y!r} not inside ({xl!r}, {xr!r}); K is too small")
        fy = F(y)
        trials.append((y, fy))
        if emit_trace:
            t = bisect.bisect_left(xs, xl) + 1
            xs.insert(t, y)
            best = min(best, fy)
            trace.append({"k": len(trials) - 1, "x": y, "value": fy, "best": best, "t": t, "R_t": R})
        push(xl, fl, y, fy)
        push(y, fy, xr, fr)
    bx, bf = min(trials, key=lambda t: t[1])
    return PijavskiiResult(bx, bf, len(trials), mins[-1], trials, mins, exhausted, trace)


@dataclass
class PenaltyOutcome:
    x: Optional[float]
    value: Optional[float]  # penalized value at x
    f: Optional[float]  # objective at x
    pstar: float
    feasible: bool
    rounds: list[tuple[float, float, bool]]  # (P*, x, feasible) per round
    ledger: EvaluationLedger
    last_run: Optional[PijavskiiResult] = None
    failed: bool = False
    trace: list[dict] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return self.ledger.iterations


def is_feasible(spec: ProblemSpec, x: float, tolerance: float = 0.0) -> bool:
    return all(g(x) <= tolerance for g in spec.constraints)


def tune_penalty(
    spec: ProblemSpec,
    config: PenaltyConfig = PenaltyConfig(),
    eps: Optional[float] = None,
    max_iterations: int = 100_000,
    emit_trace: bool = False,
) -> PenaltyOutcome:
    """Rerun the penalty method with a growing ``P*`` until its answer is feasible.

    The ledger accumulates over all rounds.  ``failed`` is set when the round
    limit is reached without a feasible answer.
    """
    check(spec)
    partial = [j for j, g in enumerate(spec.constraints, start=1) if g.partial]
    if partial:
        raise PenaltyError(
            f"{spec.name}: constraints {partial} are only partially defined; "
            "the penalty method needs every constraint on all of [a, b]"
        )
    if eps is None:
        eps = 1e-4 * (spec.b - spec.a)
    ledger = EvaluationLedger(spec.m)
    rounds = []
    trace = []
    run = None
    top = spec.m + 1
    for pstar in itertools.islice(config.schedule(), config.max_rounds):
        F = penalized(spec, pstar, ledger)
        run = pijavskii_minimize(
            F, penalty_lipschitz(spec, pstar), spec.a, spec.b, eps, max_iterations, emit_trace
        )
        trace.extend(
            {"k": r["k"], "x": r["x"], "nu": top, "raw": r["value"], "zstar": r["best"],
             "t": r["t"], "R_t": r["R_t"], "pstar": pstar}
            for r in run.trace
        )
        feasible = is_feasible(spec, run.x, config.tolerance)
        rounds.append((pstar, run.x, feasible))
        if feasible or spec.m == 0:
            return PenaltyOutcome(run.x, run.value, spec.objective(run.x), pstar, True, rounds, ledger, run,
                                  trace=trace)
    return PenaltyOutcome(run.x, run.value, spec.objective(run.x), pstar, False, rounds, ledger, run,
                          failed=True, trace=trace)
