"""Trials under the index scheme.

A trial at ``x`` evaluates ``g_1, g_2, ...`` in order and stops at the first
violated constraint; the objective is evaluated only when every constraint
holds.  The level reached is the trial's index ``nu``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .expr import EvaluationError
from .problem import EvaluationLedger, ProblemSpec


@dataclass(frozen=True)
class Trial:
    x: float
    index: int
    raw: float  # g_index(x)
    stamp: int  # creation order: 0 for a, 1 for b, then k for x^k


@dataclass(frozen=True)
class ZStar:
    """Best objective value among trials of index ``m + 1``; ``value is None`` if none yet."""

    value: Optional[float] = None
    witness: Optional[Trial] = None

    @property
    def present(self) -> bool:
        return self.value is not None


class TrialError(RuntimeError):
    pass


def evaluate_index(
    spec: ProblemSpec, x: float, stamp: int = 0, ledger: Optional[EvaluationLedger] = None
) -> Trial:
    """Run one trial at ``x``; exactly ``nu`` expressions are evaluated."""
    level = 1
    try:
        for level, g in enumerate(spec.functions, start=1):
            raw = g(x)
            if raw > 0 or level == spec.m + 1:
                break
    except EvaluationError as exc:
        raise TrialError(
            f"{spec.name}: evaluation of level {level} failed at x={x!r}: {exc}"
        ) from exc
    index = level
    if ledger is not None:
        ledger.record_trial(index)
    return Trial(x, index, raw, stamp)


def phi_value(trial: Trial, zstar: ZStar, m: int) -> float:
    """``g_nu(x)`` below the top level, ``f(x) - Z*`` at level ``m + 1``."""
    if trial.index < m + 1:
        return trial.raw
    if zstar.value is None:
        raise ValueError("Z* is absent but the trial has index m+1")
    return trial.raw - zstar.value


def update_zstar(zstar: ZStar, trial: Trial, m: int) -> tuple[ZStar, bool]:
    """Fold ``trial`` into the incumbent; ties do not count as improvement."""
    if trial.index != m + 1:
        return zstar, False
    if zstar.value is None or trial.raw < zstar.value:
        return ZStar(trial.raw, trial), True
    return zstar, False
