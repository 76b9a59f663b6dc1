import math
from types import SimpleNamespace

import pytest
from hypothesis import given, strategies as st

from ibba.fixtures import constant_infeasible, disjoint_infeasible, problem7, unconstrained_fixtures
from ibba.index import Trial, ZStar
from ibba.oracle import grid_minimize
from ibba.problem import ProblemSpec
from ibba.solver import (
    Case, IntervalState, NonInteriorPointError, SolveOutcome, SolverConfig, Status,
    characteristic, make_interval, new_trial_point, result_bounds, select_interval,
    shrink_points, solve,
)
from ibba.problem import EvaluationLedger


def two_level(k1, kf, a=0.0, b=3.0):
    """m = 1: index 1 is the constraint, index 2 the objective."""
    return ProblemSpec.from_strings("two-level", a, b, ("x", kf), [("x", k1)])


class TestCharacteristic:
    def test_equal_index(self):
        spec = two_level(2.0, 1.0)
        R, case = characteristic(Trial(0.0, 1, 1.0, 0), Trial(1.0, 1, 1.0, 1), ZStar(), spec)
        assert (R, case) == (0.0, Case.EQUAL)

    def test_rising_index(self):
        spec = two_level(1.0, 1.0)
        # right endpoint at the top level with raw - Z* = 1
        R, case = characteristic(Trial(0.0, 1, 1.0, 0), Trial(2.0, 2, 1.5, 1), ZStar(0.5), spec)
        assert (R, case) == (0.0, Case.RISING)

    def test_falling_index(self):
        # z_l=2, K_l=2, z_r=1, K_r=1, length 3: 2 - 2*(3 - 1/1) = -2
        spec = two_level(1.0, 2.0)
        R, case = characteristic(Trial(0.0, 2, 2.0, 0), Trial(3.0, 1, 1.0, 1), ZStar(0.0), spec)
        assert (R, case) == (-2.0, Case.FALLING)

    def test_top_level_needs_zstar(self):
        spec = two_level(1.0, 1.0)
        with pytest.raises(ValueError):
            characteristic(Trial(0.0, 2, 1.0, 0), Trial(1.0, 2, 1.0, 1), ZStar(), spec)


class TestShrinkPoints:
    def test_y_minus(self):
        spec = two_level(2.0, 1.0)
        y_minus, _ = shrink_points(Trial(0.0, 1, 1.0, 0), Trial(3.0, 1, 1.0, 1), ZStar(), spec)
        assert y_minus == 0.5

    def test_y_plus_at_incumbent(self):
        spec = two_level(2.0, 7.0)
        incumbent = Trial(1.0, 2, -0.25, 1)
        _, y_plus = shrink_points(Trial(0.0, 1, 1.0, 0), incumbent, ZStar(-0.25, incumbent), spec)
        assert y_plus == 1.0

    def test_clamped(self):
        spec = two_level(1.0, 1.0)
        y_minus, y_plus = shrink_points(Trial(0.0, 1, 5.0, 0), Trial(1.0, 1, 5.0, 1), ZStar(), spec)
        assert (y_minus, y_plus) == (1.0, 0.0)
        iv = make_interval(Trial(0.0, 1, 5.0, 0), Trial(1.0, 1, 5.0, 1), ZStar(), spec)
        assert iv.R > 0 and iv.pruned


class TestNewTrialPoint:
    def test_equal_symmetric(self):
        spec = two_level(2.0, 1.0)
        iv = make_interval(Trial(0.0, 1, 0.3, 0), Trial(1.0, 1, 0.3, 1), ZStar(), spec)
        assert new_trial_point(iv, spec) == 0.5

    def test_rising(self):
        spec = two_level(2.0, 1.0)
        iv = make_interval(Trial(0.0, 1, 0.4, 0), Trial(1.0, 2, 0.0, 1), ZStar(0.0), spec)
        assert iv.case is Case.RISING
        assert new_trial_point(iv, spec) == pytest.approx(0.6, abs=1e-15)

    def test_falling(self):
        spec = two_level(2.0, 1.0)
        iv = make_interval(Trial(0.0, 2, 0.0, 0), Trial(1.0, 1, 0.4, 1), ZStar(0.0), spec)
        assert iv.case is Case.FALLING
        assert new_trial_point(iv, spec) == pytest.approx(0.4, abs=1e-15)

    def test_equal_matches_sawtooth_point(self):
        spec = two_level(1.0, 4.0)
        left, right = Trial(0.0, 2, 1.0, 0), Trial(1.0, 2, 2.0, 1)
        iv = make_interval(left, right, ZStar(1.0, left), spec)
        assert new_trial_point(iv, spec) == 0.5 * (0.0 + 1.0 - (2.0 - 1.0) / 4.0)

    def test_non_interior(self):
        # K equals the slope: R = 0 and the sawtooth point lands on x_l
        spec = ProblemSpec.from_strings("steep", 0, 1, ("x", 1.0))
        with pytest.raises(NonInteriorPointError):
            solve(spec)

    def test_non_interior_direct(self):
        spec = two_level(1.0, 1.0)
        iv = make_interval(Trial(0.0, 1, 0.1, 0), Trial(1.0, 1, 2.1, 1), ZStar(), spec)
        with pytest.raises(NonInteriorPointError):
            new_trial_point(iv, spec)


class TestSelect:
    @staticmethod
    def states(values, pruned=()):
        return [SimpleNamespace(R=r, pruned=i in pruned) for i, r in enumerate(values)]

    @pytest.mark.parametrize(
        "values, t",
        [([3, -1, -1], 2), ([0.5], 1), ([-2, -3, -2.9999], 2), ([0.0, 0.0], 1)],
    )
    def test_leftmost_minimum(self, values, t):
        assert select_interval(self.states(values)) == t

    def test_skips_pruned(self):
        assert select_interval(self.states([-5, 1, -1], pruned={0})) == 3

    def test_empty(self):
        with pytest.raises(ValueError):
            select_interval(self.states([1.0], pruned={0}))


class TestSolve:
    def test_constant_infeasible_stops_after_initial_trials(self):
        # z = 1 at both ends, K = 1: R = 0.5*(1 + 1 - 1) = 0.5 > 0 immediately
        out = solve(constant_infeasible())
        assert out.status is Status.INFEASIBLE
        assert out.ledger.counts == [2, 0]
        assert out.intervals[0].R == 0.5
        assert out.zstar.value is None and out.x is None

    def test_disjoint_infeasible(self):
        out = solve(disjoint_infeasible())
        assert out.status is Status.INFEASIBLE
        assert out.ledger.n_f == 0
        assert all(iv.R > 0 for iv in out.intervals)

    def test_unconstrained_vee(self):
        spec = ProblemSpec.from_strings("vee", 0, 1, ("abs(x-0.3)", 1.5))
        out = solve(spec, SolverConfig(epsilon=1e-4))
        assert out.status is Status.ACCURACY
        assert abs(out.f) <= 1.5e-4
        assert grid_minimize(spec, 10**6).best_f == pytest.approx(0.0, abs=1e-12)

    def test_feasibility_unresolved(self):
        spec = ProblemSpec.from_strings("narrow", 0, 1, ("x", 1.0), [("abs(x-0.5037)-1e-4", 1.5)])
        out = solve(spec, SolverConfig(epsilon=0.05))
        assert out.status is Status.UNRESOLVED
        assert out.M < spec.m + 1 and out.bounds is None

    def test_budget(self):
        out = solve(problem7(), SolverConfig(max_iterations=50))
        assert out.status is Status.BUDGET
        assert out.ledger.iterations == 50 == len(out.trials)

    def test_trial_log_numberings(self):
        out = solve(problem7(), SolverConfig(max_iterations=30))
        assert [t.stamp for t in out.trials] == list(range(30))
        assert out.trials[0].x == -3.0 and out.trials[1].x == 2.0
        xs = [t.x for t in out.row]
        assert xs == sorted(xs) and len(set(xs)) == len(xs)

    def test_trace_records(self):
        out = solve(problem7(), SolverConfig(max_iterations=40, emit_trace=True))
        assert len(out.trace) == 40
        assert out.trace[0]["t"] is None and out.trace[1]["t"] is None
        for rec, trial in zip(out.trace, out.trials):
            assert (rec["k"], rec["x"], rec["nu"], rec["raw"]) == (trial.stamp, trial.x, trial.index, trial.raw)
        assert all(rec["R_t"] <= 0 for rec in out.trace[2:])

    @pytest.mark.parametrize("spec", [problem7(), constant_infeasible(), disjoint_infeasible()] + unconstrained_fixtures(),
                             ids=lambda s: s.name)
    def test_status_invariants(self, spec):
        out = solve(spec)
        assert (out.status is Status.UNRESOLVED) == (out.status is not Status.BUDGET and out.status is not Status.INFEASIBLE
                                                    and out.M < spec.m + 1)
        if out.status is Status.INFEASIBLE:
            assert all(iv.R > 0 for iv in out.intervals)
        if out.bounds is not None:
            assert out.bounds[0] <= out.zstar.value == out.bounds[1]
        assert sum(out.ledger.n_g) + out.ledger.n_f == out.ledger.iterations == len(out.trials)

    def test_negative_interval_shrink_points_ordered(self):
        out = solve(problem7())
        for iv in out.intervals:
            if iv.R < 0:
                assert iv.y_minus < iv.y_plus

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SolverConfig(epsilon=-1.0)
        with pytest.raises(ValueError):
            SolverConfig(max_iterations=1)


def _fake_trial(x, index, raw, stamp):
    return Trial(x, index, raw, stamp)


class TestResultBounds:
    def test_case_ii_substitution(self):
        spec = two_level(1.0, 1.0, 0.0, 4.0)
        t = [_fake_trial(0.0, 1, 1.0, 0), _fake_trial(1.0, 2, 1.001, 2), _fake_trial(2.0, 2, 1.0, 3),
             _fake_trial(3.0, 2, 1.001, 4), _fake_trial(4.0, 1, 1.0, 1)]
        zstar = ZStar(1.0, t[2])
        ivs = [
            IntervalState(t[0], t[1], Case.RISING, 0.5, 0.0, 0.0, True),
            IntervalState(t[1], t[2], Case.EQUAL, -0.002, 0.0, 0.0),
            IntervalState(t[2], t[3], Case.EQUAL, -0.002, 0.0, 0.0),
            IntervalState(t[3], t[4], Case.FALLING, 0.5, 0.0, 0.0, True),
        ]
        out = SolveOutcome(Status.ACCURACY, zstar, 2, EvaluationLedger(1), t, ivs, 1e-3)
        (lo, hi), case = result_bounds(out, spec)
        assert case == "ii"
        assert lo == pytest.approx(0.998, abs=1e-15) and hi == 1.0

    @pytest.mark.parametrize("spec", unconstrained_fixtures(), ids=lambda s: s.name)
    def test_unconstrained_is_case_ii(self, spec):
        out = solve(spec)
        assert out.bound_case == "ii"
        assert out.bounds[0] == min(iv.R for iv in out.intervals) + out.zstar.value

    def test_problem7_encloses_grid_minimum(self):
        spec = problem7()
        out = solve(spec)
        grid = grid_minimize(spec, 10**6)
        assert out.bounds[0] <= grid.best_f
        # the grid cannot beat the true minimum by more than its resolution slack
        assert grid.best_f <= out.bounds[1] + spec.K(3) * (spec.b - spec.a) / 10**6

    def test_wrong_status(self):
        out = solve(constant_infeasible())
        with pytest.raises(ValueError):
            result_bounds(out, constant_infeasible())


_raws = st.floats(-5, 5, allow_nan=False)


@given(
    li=st.integers(1, 3), ri=st.integers(1, 3), lraw=_raws, rraw=_raws,
    length=st.floats(1e-6, 10), z_hi=st.floats(-5, 5), drop=st.floats(0, 5),
)
def test_characteristic_monotone_in_zstar(li, ri, lraw, rraw, length, z_hi, drop):
    spec = ProblemSpec.from_strings("mono", 0, 20, ("x", 3.0), [("x", 1.0), ("x", 2.0)])
    # below the top level raw is positive by definition of the index
    lraw = abs(lraw) + 1e-9 if li < 3 else max(lraw, z_hi)
    rraw = abs(rraw) + 1e-9 if ri < 3 else max(rraw, z_hi)
    left, right = Trial(0.0, li, lraw, 0), Trial(length, ri, rraw, 1)
    before, _ = characteristic(left, right, ZStar(z_hi), spec)
    after, _ = characteristic(left, right, ZStar(z_hi - drop), spec)
    assert after >= before - 1e-12 * (1 + abs(before))


@pytest.mark.parametrize("seed", range(2024, 2034))
def test_unconstrained_matches_sawtooth_on_generated_objectives(seed):
    from ibba.fixtures import generate_problem
    from ibba.penalty import pijavskii_minimize

    full = generate_problem(seed).spec
    spec = ProblemSpec(full.name, full.a, full.b, (), full.objective)
    eps = 1e-4 * (spec.b - spec.a)
    out = solve(spec, SolverConfig(epsilon=eps))
    ref = pijavskii_minimize(spec.objective, spec.objective.K, spec.a, spec.b, eps)
    assert [(t.x, t.raw) for t in out.trials] == ref.trials
