"""Built-in problems and a seeded generator of constrained test problems.

Generated problems use trigonometric polynomials, for which a Lipschitz bound
follows from the coefficients: ``|d/dx a sin(w x + p)| <= |a| w``.  Each
``K`` is that bound times a safety factor, so ``K > L`` holds by construction.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .problem import ProblemSpec

PROBLEM7_OBJECTIVE = "exp(-cos(4*x-3))+(4*x-3)^2/250-1"
PROBLEM7_G1 = "sin(x)^3*exp(-sin(3*x))+1/2"
PROBLEM7_G2 = "cos(7/5*(x+3))-sin(7*(x+3))+3/10"

# Grid estimates on [-3, 2] with 10^6 steps: f 6.3079, g1 5.3593, g2 8.3320.
PROBLEM7_K = {"g1": 6.5, "g2": 10.0, "f": 7.5}


def problem7() -> ProblemSpec:
    """Differentiable problem 7 with two multiextremal constraints on [-3, 2]."""
    return ProblemSpec.from_strings(
        "problem7",
        -3.0,
        2.0,
        (PROBLEM7_OBJECTIVE, PROBLEM7_K["f"]),
        [(PROBLEM7_G1, PROBLEM7_K["g1"]), (PROBLEM7_G2, PROBLEM7_K["g2"])],
        reference=(-0.774575, -0.33007410),
    )


def constant_infeasible() -> ProblemSpec:
    return ProblemSpec.from_strings("constant-infeasible", 0.0, 1.0, ("x", 1.0), [("1", 1.0)])


def disjoint_infeasible() -> ProblemSpec:
    """``g_1`` holds only on ``[0, 0.4]`` while ``g_2`` holds only on ``[0.6, 1]``."""
    return ProblemSpec.from_strings(
        "disjoint-infeasible",
        0.0,
        1.0,
        ("sin(5*x)", 6.0),
        [("x-0.4+0.05*sin(20*x)", 2.5), ("0.6-x+0.05*cos(20*x)", 2.5)],
    )


def unconstrained_fixtures() -> list[ProblemSpec]:
    return [
        ProblemSpec.from_strings("vee", 0.0, 1.0, ("abs(x-0.3)", 1.5)),
        ProblemSpec.from_strings("sine-mix", 2.7, 7.5, ("sin(x)+sin(10*x/3)", 5.0)),
        ProblemSpec.from_strings("damped", 0.0, 10.0, ("-x*sin(x)/5+0.1*abs(x-6)", 2.5)),
    ]


@dataclass(frozen=True)
class GeneratedProblem:
    spec: ProblemSpec
    lipschitz: tuple[float, ...]  # analytic upper bounds on L_1, ..., L_{m+1}


def _trig_terms(rng: random.Random, freq: float, terms: int) -> tuple[list[tuple[float, float, float]], float]:
    out = []
    bound = 0.0
    for k in range(1, terms + 1):
        amp = round(rng.uniform(0.3, 1.0) * rng.choice((-1, 1)), 3)
        w = round(k * freq, 3)
        phase = round(rng.uniform(0.0, 2 * math.pi), 3)
        out.append((amp, w, phase))
        bound += abs(amp) * w
    return out, bound


def _trig_text(terms) -> str:
    parts = []
    for amp, w, phase in terms:
        sign = "-" if amp < 0 else "+"
        parts.append(f" {sign} {abs(amp)!r}*sin({w!r}*x+{phase!r})")
    text = "".join(parts).strip()
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


def _trig_value(terms, x: float) -> float:
    return sum(amp * math.sin(w * x + phase) for amp, w, phase in terms)


def generate_problem(seed: int, safety: float = 1.2) -> GeneratedProblem:
    """A feasible problem with 1 to 3 multiextremal constraints.

    All constraints are shifted to be negative at a common anchor point, so the
    feasible set contains a neighbourhood of it.  The objective adds a kink
    ``c*abs(x - x0)`` to a trigonometric polynomial.
    """
    rng = random.Random(seed)
    a = round(rng.uniform(-5.0, 0.0), 1)
    b = round(a + rng.uniform(4.0, 10.0), 1)
    anchor = rng.uniform(a + 0.1 * (b - a), b - 0.1 * (b - a))
    m = rng.randint(1, 3)

    constraints = []
    bounds = []
    for _ in range(m):
        terms, L = _trig_terms(rng, round(rng.uniform(0.8, 2.0), 3), rng.randint(2, 3))
        margin = rng.uniform(0.05, 0.3) * sum(abs(t[0]) for t in terms)
        shift = round(-_trig_value(terms, anchor) - margin, 3)
        text = f"{_trig_text(terms)} + {shift!r}" if shift >= 0 else f"{_trig_text(terms)} - {-shift!r}"
        constraints.append((text, math.ceil(safety * L * 1000) / 1000))
        bounds.append(L)

    terms, L = _trig_terms(rng, round(rng.uniform(0.6, 1.5), 3), 3)
    kink = round(rng.uniform(0.1, 0.5), 3)
    center = round(rng.uniform(a, b), 3)
    objective = f"{_trig_text(terms)} + {kink!r}*abs(x-{center!r})" if center >= 0 else \
        f"{_trig_text(terms)} + {kink!r}*abs(x+{-center!r})"
    L += kink
    bounds.append(L)
    spec = ProblemSpec.from_strings(
        f"generated-{seed}", a, b, (objective, math.ceil(safety * L * 1000) / 1000), constraints
    )
    return GeneratedProblem(spec, tuple(bounds))


def generate_battery(count: int = 10, seed: int = 2024) -> list[GeneratedProblem]:
    return [generate_problem(seed + i) for i in range(count)]


def small_fixtures() -> list[ProblemSpec]:
    """Short-running constrained problems for exhaustive per-iteration checks."""
    return [
        ProblemSpec.from_strings(
            "small-one", 0.0, 1.0, ("cos(7*x)+x", 8.0), [("sin(12*x)-0.3", 13.0)]
        ),
        ProblemSpec.from_strings(
            "small-two", 0.0, 2.0, ("x*sin(5*x)", 11.5),
            [("sin(6*x)+0.2", 6.6), ("cos(9*x)-0.4", 9.9)],
        ),
        disjoint_infeasible(),
    ]


def penalty_trap() -> ProblemSpec:
    """Deep infeasible basin at 0.8 with violation 0.06; feasible minimum 0 at x = 0.2.

    The penalized basin value is ``-1 + 0.06 P*``: below 0 for ``P* = 15``, above
    0 for ``P* = 20``.
    """
    return ProblemSpec.from_strings(
        "penalty-trap", 0.0, 1.0,
        ("min(abs(x-0.2), 4*abs(x-0.8)-1)", 4.5),
        [("min(0.06, x-0.5)", 1.5)],
    )
