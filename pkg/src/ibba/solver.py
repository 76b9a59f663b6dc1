"""Index Branch-and-Bound Algorithm (IBBA).

The solver keeps the trials sorted by ``x``.  Every pair of neighbours forms an
interval whose *characteristic* ``R`` is the minimum of an index support
function built from the two endpoint values ``z = phi_k(x)``.  Each iteration
subdivides the leftmost interval of minimal ``R``.  A positive minimum proves
the problem infeasible; a short selected interval ends the search.
"""

from __future__ import annotations

import bisect
import enum
import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

from .index import Trial, ZStar, evaluate_index, phi_value, update_zstar
from .problem import EvaluationLedger, ProblemSpec, check


class Case(enum.Enum):
    EQUAL = "EqualIndex"
    RISING = "RisingIndex"
    FALLING = "FallingIndex"


class Status(enum.Enum):
    INFEASIBLE = "InfeasibleDetected"
    ACCURACY = "AccuracyReached"
    UNRESOLVED = "FeasibilityUnresolved"
    BUDGET = "BudgetExhausted"


class NonInteriorPointError(RuntimeError):
    """The next trial point fell on or outside the selected interval.

    This happens only when some ``K_j`` does not exceed the true Lipschitz
    constant, or through roundoff on intervals near machine resolution.
    """


@dataclass(frozen=True)
class IntervalState:
    left: Trial
    right: Trial
    case: Case
    R: float
    y_minus: float
    y_plus: float
    pruned: bool = False

    @property
    def length(self) -> float:
        return self.right.x - self.left.x

    @property
    def top_index(self) -> int:
        return max(self.left.index, self.right.index)


@dataclass(frozen=True)
class SolverConfig:
    """``epsilon=None`` means ``1e-4 * (b - a)``.

    ``incremental=False`` recomputes every characteristic at every iteration
    and never prunes; it exists as a reference for the incremental path.
    """

    epsilon: Optional[float] = None
    max_iterations: int = 100_000
    emit_trace: bool = False
    incremental: bool = True

    def __post_init__(self):
        if self.epsilon is not None and not self.epsilon >= 0:
            raise ValueError("epsilon must be non-negative")
        if self.max_iterations < 2:
            raise ValueError("max_iterations must be at least 2")

    def resolve_epsilon(self, spec: ProblemSpec) -> float:
        if self.epsilon is None:
            return 1e-4 * (spec.b - spec.a)
        return self.epsilon


@dataclass
class SolveOutcome:
    status: Status
    zstar: ZStar
    M: int
    ledger: EvaluationLedger
    trials: list[Trial]  # creation order, trials[k] is x^k
    intervals: list[IntervalState]  # final row, left to right
    epsilon: float
    selected: Optional[int] = None  # t of the last selected interval [x_{t-1}, x_t], 1-based
    bounds: Optional[tuple[float, float]] = None
    bound_case: Optional[str] = None  # "ii" or "iii"
    trace: list[dict] = field(default_factory=list)

    @property
    def row(self) -> list[Trial]:
        return sorted(self.trials, key=lambda t: t.x)

    @property
    def x(self) -> Optional[float]:
        return self.zstar.witness.x if self.zstar.witness else None

    @property
    def f(self) -> Optional[float]:
        return self.zstar.value


# ------------------------------------------------------------------ interval rules


def characteristic(left: Trial, right: Trial, zstar: ZStar, spec: ProblemSpec) -> tuple[float, Case]:
    """Minimum of the index support function over ``[left.x, right.x]``."""
    m = spec.m
    z_l = phi_value(left, zstar, m)
    z_r = phi_value(right, zstar, m)
    length = right.x - left.x
    if left.index == right.index:
        if left.index == m + 1:
            # Shift after the sawtooth value, not before: the rounding then matches
            # the plain sawtooth method and the Z* shift cannot reorder intervals.
            return 0.5 * (left.raw + right.raw - spec.K(m + 1) * length) - zstar.value, Case.EQUAL
        return 0.5 * (z_l + z_r - spec.K(right.index) * length), Case.EQUAL
    K_l = spec.K(left.index)
    K_r = spec.K(right.index)
    if left.index < right.index:
        return z_r - K_r * (length - z_l / K_l), Case.RISING
    return z_l - K_l * (length - z_r / K_r), Case.FALLING


def shrink_points(left: Trial, right: Trial, zstar: ZStar, spec: ProblemSpec) -> tuple[float, float]:
    """``(y_minus, y_plus)`` clamped to the interval.

    Outside ``[y_minus, y_plus]`` the lower endpoint value cone stays
    positive, so ``phi_k`` cannot be non-positive there.
    """
    m = spec.m
    y_minus = left.x + phi_value(left, zstar, m) / spec.K(left.index)
    y_plus = right.x - phi_value(right, zstar, m) / spec.K(right.index)
    return min(y_minus, right.x), max(y_plus, left.x)


def make_interval(left: Trial, right: Trial, zstar: ZStar, spec: ProblemSpec) -> IntervalState:
    R, case = characteristic(left, right, zstar, spec)
    y_minus, y_plus = shrink_points(left, right, zstar, spec)
    return IntervalState(left, right, case, R, y_minus, y_plus, pruned=R > 0)


def new_trial_point(interval: IntervalState, spec: ProblemSpec) -> float:
    """Next trial inside the selected interval.

    For equal indices this is the sawtooth minimizer
    ``0.5 * (x_l + x_r - (g(x_r) - g(x_l)) / K)``.  It is written with raw
    values: the incumbent shift cancels in the difference, and the unshifted
    form matches the plain sawtooth method bit for bit when ``m = 0``.
    """
    left, right = interval.left, interval.right
    if interval.case is Case.EQUAL:
        K = spec.K(right.index)
        point = 0.5 * (left.x + right.x - (right.raw - left.raw) / K)
    elif interval.case is Case.RISING:
        point = 0.5 * (interval.y_minus + right.x)
    else:
        point = 0.5 * (left.x + interval.y_plus)
    if not left.x < point < right.x:
        raise NonInteriorPointError(
            f"trial point {point!r} not inside ({left.x!r}, {right.x!r}); "
            f"check that every K exceeds its Lipschitz constant"
        )
    return point


def select_interval(intervals) -> int:
    """Number ``t`` (1-based) of the leftmost non-pruned interval with minimal ``R``.

    Interval ``t`` is ``[x_{t-1}, x_t]`` in the sorted row.
    """
    best = None
    for pos, iv in enumerate(intervals):
        if iv.pruned:
            continue
        if best is None or iv.R < intervals[best].R:
            best = pos
    if best is None:
        raise ValueError("no active interval")
    return best + 1


# ------------------------------------------------------------------ bounds


def _envelope_min(feasible: list[Trial], K: float, lo: float, hi: float) -> float:
    """Minimum over ``[lo, hi]`` of the sawtooth minorant built on feasible trials."""
    xs = [t.x for t in feasible]

    def psi(x):
        pos = bisect.bisect_right(xs, x)
        if pos == 0:
            return feasible[0].raw - K * (xs[0] - x)
        if pos == len(xs):
            return feasible[-1].raw - K * (x - xs[-1])
        u, v = feasible[pos - 1], feasible[pos]
        return max(u.raw - K * (x - u.x), v.raw - K * (v.x - x))

    candidates = [lo, hi]
    for u, v in zip(feasible, feasible[1:]):
        y = 0.5 * (u.x + v.x - (v.raw - u.raw) / K)
        if lo < y < hi:
            candidates.append(y)
    return min(psi(c) for c in candidates)


def result_bounds(outcome: SolveOutcome, spec: ProblemSpec) -> tuple[tuple[float, float], str]:
    """Enclosure ``[lower, Z*]`` of the global minimum after an accurate stop.

    Returns the bounds and which situation applied: ``"ii"`` when every
    interval lying entirely below the top level has a positive characteristic
    (lower bound ``R_t + Z*``), ``"iii"`` otherwise (lower bound from a sawtooth
    minorant on the feasible trials, minimized over the intervals with
    negative characteristic).
    """
    m = spec.m
    if outcome.status is not Status.ACCURACY or outcome.M != m + 1:
        raise ValueError(f"bounds are defined only after an accurate stop with M = m+1, got {outcome.status.value}")
    zval = outcome.zstar.value
    intervals = outcome.intervals
    low_levels_positive = all(iv.R > 0 for iv in intervals if iv.top_index < m + 1)
    if low_levels_positive:
        R_t = min(iv.R for iv in intervals)
        return (R_t + zval, zval), "ii"
    feasible = sorted((t for t in outcome.trials if t.index == m + 1), key=lambda t: t.x)
    K = spec.K(m + 1)
    negative = [iv for iv in intervals if iv.R < 0]
    if negative:
        lower = min(_envelope_min(feasible, K, iv.left.x, iv.right.x) for iv in negative)
    else:
        lower = _envelope_min(feasible, K, spec.a, spec.b)
    return (min(lower, zval), zval), "iii"


# ------------------------------------------------------------------ solve


class _Row:
    """Trials sorted by ``x`` with the interval state keyed by left endpoint stamp."""

    def __init__(self):
        self.xs: list[float] = []
        self.trials: list[Trial] = []

    def insert(self, trial: Trial) -> int:
        pos = bisect.bisect_left(self.xs, trial.x)
        if pos < len(self.xs) and self.xs[pos] == trial.x:
            raise NonInteriorPointError(f"duplicate trial point {trial.x!r}")
        self.xs.insert(pos, trial.x)
        self.trials.insert(pos, trial)
        return pos

    def position(self, x: float) -> int:
        return bisect.bisect_left(self.xs, x)


def solve(spec: ProblemSpec, config: SolverConfig = SolverConfig()) -> SolveOutcome:
    """Run IBBA on ``spec`` until one of the stopping rules fires."""
    check(spec)
    m = spec.m
    eps = config.resolve_epsilon(spec)
    ledger = EvaluationLedger(m)
    trace: list[dict] = []
    created: list[Trial] = []
    row = _Row()
    zstar = ZStar()
    M = 0

    def run_trial(x: float, t_pos=None, R_t=None) -> tuple[Trial, bool]:
        nonlocal zstar, M
        trial = evaluate_index(spec, x, stamp=len(created), ledger=ledger)
        created.append(trial)
        zstar, improved = update_zstar(zstar, trial, m)
        M = max(M, trial.index)
        if config.emit_trace:
            trace.append({
                "k": trial.stamp, "x": x, "nu": trial.index, "raw": trial.raw,
                "zstar": zstar.value, "t": t_pos, "R_t": R_t,
            })
        return trial, improved

    for x in (spec.a, spec.b):
        row.insert(run_trial(x)[0])

    select = _IncrementalSelector(spec) if config.incremental else _FullSelector(spec)
    select.reset(row, zstar)

    status = None
    selected = None
    while status is None:
        chosen = select.best(row, zstar)
        if chosen is None:
            status = Status.INFEASIBLE
            break
        selected = row.position(chosen.left.x) + 1
        if chosen.R > 0:
            status = Status.INFEASIBLE
        elif chosen.length <= eps:
            status = Status.ACCURACY if M == m + 1 else Status.UNRESOLVED
        elif ledger.iterations >= config.max_iterations:
            status = Status.BUDGET
        else:
            x_new = new_trial_point(chosen, spec)
            trial, improved = run_trial(x_new, selected, chosen.R)
            row.insert(trial)
            select.split(chosen, trial, zstar, improved)

    final = [make_interval(l, r, zstar, spec) for l, r in zip(row.trials, row.trials[1:])]
    outcome = SolveOutcome(
        status=status, zstar=zstar, M=M, ledger=ledger, trials=created,
        intervals=final, epsilon=eps, selected=selected, trace=trace,
    )
    if status is Status.ACCURACY:
        outcome.bounds, outcome.bound_case = result_bounds(outcome, spec)
    return outcome


class _FullSelector:
    """Recompute every characteristic each iteration; no pruning."""

    def __init__(self, spec):
        self.spec = spec

    def reset(self, row, zstar):
        pass

    def best(self, row, zstar):
        states = [make_interval(l, r, zstar, self.spec) for l, r in zip(row.trials, row.trials[1:])]
        best = None
        for iv in states:
            if best is None or iv.R < best.R:
                best = iv
        return best

    def split(self, parent, trial, zstar, improved):
        pass


class _IncrementalSelector:
    """Heap of active intervals; only the two children are recomputed per step.

    When ``Z*`` strictly decreases, every active interval touching the top
    level is recomputed.  Characteristics only grow under that update, so
    intervals pruned for ``R > 0`` never come back.
    """

    def __init__(self, spec):
        self.spec = spec
        self.top = spec.m + 1
        self.active: dict[int, IntervalState] = {}  # left stamp -> state
        self.heap: list = []
        self.counter = itertools.count()

    def _push(self, state: IntervalState):
        if state.pruned:
            self.active.pop(state.left.stamp, None)
            return
        self.active[state.left.stamp] = state
        heapq.heappush(self.heap, (state.R, state.left.x, next(self.counter), state))

    def reset(self, row, zstar):
        for l, r in zip(row.trials, row.trials[1:]):
            self._push(make_interval(l, r, zstar, self.spec))

    def best(self, row, zstar):
        heap = self.heap
        while heap:
            state = heap[0][3]
            if self.active.get(state.left.stamp) is state:
                return state
            heapq.heappop(heap)
        return None

    def split(self, parent, trial, zstar, improved):
        del self.active[parent.left.stamp]
        self._push(make_interval(parent.left, trial, zstar, self.spec))
        self._push(make_interval(trial, parent.right, zstar, self.spec))
        if improved:
            stale = [s for s in self.active.values() if s.top_index == self.top]
            for state in stale:
                self._push(make_interval(state.left, state.right, zstar, self.spec))
        if len(self.heap) > 4 * len(self.active) + 64:
            self.heap = [e for e in self.heap if self.active.get(e[3].left.stamp) is e[3]]
            heapq.heapify(self.heap)
