"""Constrained univariate problems with an ordered constraint chain."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .expr import Expression, parse


class ProblemError(ValueError):
    """A problem definition violates one or more invariants."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


@dataclass(frozen=True)
class Function:
    """One link of the chain: an expression with its Lipschitz overestimate ``K``.

    ``partial`` marks a constraint whose expression is only meaningful where the
    preceding constraints hold.  The index scheme never evaluates it elsewhere,
    but the penalty baseline would, so it refuses such problems.
    """

    expr: Expression
    K: float
    partial: bool = False

    def __call__(self, x: float) -> float:
        return self.expr(x)


@dataclass(frozen=True)
class ProblemSpec:
    """``min f(x)`` over ``[a, b]`` subject to ``g_1(x) <= 0, ..., g_m(x) <= 0``.

    The order of ``constraints`` is the evaluation order.  ``reference`` is an
    optional ``(x, f)`` pair used only in reports.
    """

    name: str
    a: float
    b: float
    constraints: tuple[Function, ...]
    objective: Function
    reference: Optional[tuple[float, float]] = None

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))

    @property
    def m(self) -> int:
        return len(self.constraints)

    def level(self, j: int) -> Function:
        """The function ``g_j`` for ``1 <= j <= m + 1`` (``g_{m+1}`` is the objective)."""
        if j == self.m + 1:
            return self.objective
        if 1 <= j <= self.m:
            return self.constraints[j - 1]
        raise IndexError(f"level {j} outside 1..{self.m + 1}")

    def K(self, j: int) -> float:
        return self.level(j).K

    @property
    def functions(self) -> tuple[Function, ...]:
        return self.constraints + (self.objective,)

    @classmethod
    def from_strings(cls, name, a, b, objective, constraints=(), reference=None):
        """Build a spec from ``(text, K)`` pairs; handy for fixtures and tests."""
        objective_text, objective_k = objective
        return cls(
            name=name,
            a=float(a),
            b=float(b),
            constraints=tuple(Function(parse(t), float(k)) for t, k in constraints),
            objective=Function(parse(objective_text), float(objective_k)),
            reference=reference,
        )


def validate(spec: ProblemSpec) -> list[str]:
    """Return every violated invariant; an empty list means the spec is usable.

    Expressions are never evaluated here.
    """
    errors = []
    if not (math.isfinite(spec.a) and math.isfinite(spec.b)):
        errors.append("domain endpoints must be finite")
    elif not spec.a < spec.b:
        errors.append("empty domain: a must be smaller than b")
    for j, fn in enumerate(spec.functions, start=1):
        label = "objective" if j == spec.m + 1 else f"constraint g_{j}"
        if not math.isfinite(fn.K):
            errors.append(f"nonfinite overestimate K_{j} for {label}")
        elif fn.K <= 0:
            errors.append(f"nonpositive overestimate K_{j} for {label}")
    return errors


def check(spec: ProblemSpec) -> ProblemSpec:
    errors = validate(spec)
    if errors:
        raise ProblemError(errors)
    return spec


@dataclass
class EvaluationLedger:
    """Per-level trial counts.

    ``counts[j - 1]`` is the number of trials whose index was ``j``; the last
    entry is ``N_f``.  A trial with index ``j`` costs ``j`` function evaluations.
    """

    m: int
    counts: list[int] = field(default_factory=list)
    iterations: int = 0

    def __post_init__(self):
        if not self.counts:
            self.counts = [0] * (self.m + 1)
        if len(self.counts) != self.m + 1:
            raise ValueError(f"expected {self.m + 1} counters, got {len(self.counts)}")

    def record_trial(self, index: int) -> "EvaluationLedger":
        if not 1 <= index <= self.m + 1:
            raise ValueError(f"trial index {index} outside 1..{self.m + 1}")
        self.counts[index - 1] += 1
        self.iterations += 1
        return self

    @property
    def n_g(self) -> list[int]:
        return self.counts[:-1]

    @property
    def n_f(self) -> int:
        return self.counts[-1]

    @property
    def weighted(self) -> int:
        return sum(j * n for j, n in enumerate(self.counts, start=1))

    def merge(self, other: "EvaluationLedger") -> "EvaluationLedger":
        if other.m != self.m:
            raise ValueError("cannot merge ledgers of different chain lengths")
        return EvaluationLedger(
            self.m,
            [p + q for p, q in zip(self.counts, other.counts)],
            self.iterations + other.iterations,
        )
