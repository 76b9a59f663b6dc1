"""Univariate Lipschitz global optimization with ordered multiextremal constraints."""

from .expr import Expression, parse
from .index import Trial, ZStar, evaluate_index
from .penalty import PenaltyConfig, pijavskii_minimize, tune_penalty
from .problem import EvaluationLedger, Function, ProblemSpec, validate
from .solver import SolveOutcome, SolverConfig, Status, solve

__all__ = [
    "EvaluationLedger", "Expression", "Function", "PenaltyConfig", "ProblemSpec",
    "SolveOutcome", "SolverConfig", "Status", "Trial", "ZStar", "evaluate_index",
    "parse", "pijavskii_minimize", "solve", "tune_penalty", "validate",
]
