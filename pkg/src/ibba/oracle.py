"""Brute-force reference computations for tests and fixtures.

Nothing in the solvers imports this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .expr import Expression
from .problem import ProblemSpec


@dataclass
class GridReport:
    step: float
    best_x: Optional[float]  # None when no grid point is feasible
    best_f: Optional[float]
    feasible_fraction: float
    index_counts: list[int]  # grid points whose index is 1, ..., m+1

    @property
    def feasible(self) -> bool:
        return self.best_x is not None


def grid_indices(spec: ProblemSpec, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Index and raw value of every point of ``xs`` under the constraint chain.

    Each function is evaluated only on the points that passed all earlier
    constraints.
    """
    index = np.full(xs.shape, spec.m + 1, dtype=np.int64)
    raw = np.empty(xs.shape)
    alive = np.ones(xs.shape, dtype=bool)
    for j, g in enumerate(spec.constraints, start=1):
        idx = np.flatnonzero(alive)
        if idx.size == 0:
            break
        values = g.expr.evaluate_array(xs[idx])
        failed = idx[values > 0]
        index[failed] = j
        raw[failed] = values[values > 0]
        alive[failed] = False
    idx = np.flatnonzero(alive)
    if idx.size:
        raw[idx] = spec.objective.expr.evaluate_array(xs[idx])
    return index, raw


def grid_minimize(spec: ProblemSpec, n: int) -> GridReport:
    """Feasible minimum over ``n + 1`` uniformly spaced points of ``[a, b]``.

    Ties go to the leftmost point.  ``best_f`` is recomputed with the scalar
    evaluator at ``best_x``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    xs = np.linspace(spec.a, spec.b, n + 1)
    index, raw = grid_indices(spec, xs)
    counts = np.bincount(index - 1, minlength=spec.m + 1).tolist()
    feasible = index == spec.m + 1
    step = (spec.b - spec.a) / n
    if not feasible.any():
        return GridReport(step, None, None, 0.0, counts)
    masked = np.where(feasible, raw, np.inf)
    best = int(np.argmin(masked))
    bx = float(xs[best])
    return GridReport(step, bx, spec.objective(bx), float(feasible.mean()), counts)


def estimate_lipschitz(expr: Expression, a: float, b: float, n: int) -> float:
    """Largest divided difference on a uniform grid: a lower bound on the Lipschitz constant."""
    if n < 2:
        raise ValueError("n must be at least 2")
    xs = np.linspace(a, b, n + 1)
    values = expr.evaluate_array(xs)
    return float(np.max(np.abs(np.diff(values)) / np.diff(xs)))
