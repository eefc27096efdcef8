import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alphamatch import (
    EPSILON,
    CmrvProblem,
    Instance,
    LimitExceeded,
    RankValueFunction,
    SolveLimits,
    SolveStatus,
    is_feasible,
    solve_assignment_value,
    solve_cmrv,
)
from oracles import brute_force_cmrv
from util import random_instance, rank_weights


def inverse_v(inst):
    return RankValueFunction.inverse(inst.num_locations)


class TestExamples:
    def test_zero_floor_equals_unconstrained_rank_optimum(self, rng):
        inst = random_instance(rng, 6, 3)
        sol = solve_cmrv(CmrvProblem(inst, inverse_v(inst), gamma=0.0))
        # cross-check: the same optimum through the assignment solver run on
        # the rank weights as if they were employment probabilities
        proxy = Instance(
            quotas=inst.quotas,
            pi=rank_weights(inst, inverse_v(inst)),
            preferences=inst.preferences,
        )
        assert sol.status is SolveStatus.OPTIMAL
        assert sol.welfare == pytest.approx(solve_assignment_value(proxy), abs=EPSILON)

    def test_floor_at_optimum_selects_best_co_optimal_matching(self):
        # two employment-optimal matchings (z = 2.2); welfare picks (1,0,1,0)
        inst = Instance(
            quotas=(2, 2),
            pi=[[0.5, 0.5], [0.6, 0.4], [0.4, 0.6], [0.5, 0.5]],
            preferences=((1, 0), (1, 0), (0, 1), (0, 1)),
        )
        z_star = solve_assignment_value(inst)
        assert z_star == pytest.approx(2.2, abs=EPSILON)
        sol = solve_cmrv(CmrvProblem(inst, inverse_v(inst), gamma=z_star))
        assert sol.status is SolveStatus.OPTIMAL
        assert sol.welfare == pytest.approx(3.0, abs=EPSILON)
        assert sol.z == pytest.approx(2.2, abs=EPSILON)
        assert sol.matching.assignment == (1, 0, 1, 0)

    def test_contested_top_choice_under_tight_floor(self):
        # both families want location 0; the floor forces one to location 1
        inst = Instance(
            quotas=(1, 1),
            pi=[[0.1, 0.9], [0.1, 0.9]],
            preferences=((0, 1), (0, 1)),
        )
        sol = solve_cmrv(CmrvProblem(inst, RankValueFunction((1.0, 0.5)), gamma=1.0))
        assert sol.status is SolveStatus.OPTIMAL
        assert sol.welfare == pytest.approx(1.5, abs=EPSILON)
        assert sol.z == pytest.approx(1.0, abs=EPSILON)
        first_choices = sum(1 for i, a in enumerate(sol.matching.assignment) if a == 0)
        assert first_choices == 1


class TestOracleEquivalence:
    @given(seed=st.integers(0, 10_000), frac=st.floats(0.0, 1.0))
    @settings(max_examples=40, deadline=None)
    def test_welfare_matches_enumeration(self, seed, frac):
        r = np.random.default_rng(seed)
        inst = random_instance(
            r, int(r.integers(2, 9)), int(r.integers(2, 5)), complete=bool(seed % 2)
        )
        v = inverse_v(inst)
        gamma = frac * solve_assignment_value(inst)
        sol = solve_cmrv(CmrvProblem(inst, v, gamma=gamma))
        expected = brute_force_cmrv(
            inst.pi.tolist(), inst.quotas, rank_weights(inst, v), gamma
        )
        assert sol.status is SolveStatus.OPTIMAL
        assert expected is not None
        assert sol.welfare == pytest.approx(expected[0], abs=EPSILON)
        assert sol.z >= gamma - EPSILON
        assert is_feasible(inst, sol.matching)


class TestProperties:
    @given(seed=st.integers(0, 10_000), a=st.floats(0, 1), b=st.floats(0, 1))
    @settings(max_examples=25, deadline=None)
    def test_welfare_non_increasing_in_floor(self, seed, a, b):
        r = np.random.default_rng(seed)
        inst = random_instance(r, 6, 3)
        v = inverse_v(inst)
        z_star = solve_assignment_value(inst)
        lo, hi = sorted((a * z_star, b * z_star))
        w_lo = solve_cmrv(CmrvProblem(inst, v, gamma=lo)).welfare
        w_hi = solve_cmrv(CmrvProblem(inst, v, gamma=hi)).welfare
        assert w_lo >= w_hi - EPSILON

    def test_floor_above_optimum_is_infeasible(self, rng):
        inst = random_instance(rng, 5, 3)
        z_star = solve_assignment_value(inst)
        sol = solve_cmrv(CmrvProblem(inst, inverse_v(inst), gamma=z_star + 0.5))
        assert sol.status is SolveStatus.INFEASIBLE
        assert sol.matching is None
        assert math.isnan(sol.welfare)

    def test_deterministic(self, rng):
        inst = random_instance(rng, 7, 3)
        prob = CmrvProblem(inst, inverse_v(inst), gamma=0.8 * solve_assignment_value(inst))
        a = solve_cmrv(prob)
        b = solve_cmrv(prob)
        assert a.matching.assignment == b.matching.assignment
        assert a.welfare == b.welfare

    def test_gamma_must_be_nonnegative(self, rng):
        inst = random_instance(rng, 3, 2)
        with pytest.raises(ValueError):
            CmrvProblem(inst, inverse_v(inst), gamma=-0.1)


class TestSearchDiagnostics:
    def test_node_log_records_valid_bounds(self, rng):
        inst = random_instance(rng, 8, 3)
        gamma = 0.9 * solve_assignment_value(inst)
        log = io.StringIO()
        sol = solve_cmrv(CmrvProblem(inst, inverse_v(inst), gamma=gamma), node_log=log)
        lines = log.getvalue().splitlines()
        assert lines[0] == "node,bound,incumbent,lambda"
        assert len(lines) >= 2
        root_bound = float(lines[1].split(",")[1])
        bounds = [float(line.split(",")[1]) for line in lines[1:]]
        # upper bounds never undercut the reported optimum
        assert root_bound >= sol.welfare - EPSILON
        assert max(bounds) >= sol.welfare - EPSILON

    def test_node_budget_raises_limit_exceeded(self, rng):
        inst = random_instance(rng, 6, 3)
        gamma = 0.9 * solve_assignment_value(inst)
        with pytest.raises(LimitExceeded) as err:
            solve_cmrv(
                CmrvProblem(inst, inverse_v(inst), gamma=gamma),
                SolveLimits(max_nodes=0),
            )
        assert err.value.nodes == 1

    def test_default_limits(self):
        limits = SolveLimits()
        assert limits.max_nodes == 1_000_000
        assert limits.max_seconds is None
