import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alphamatch import (
    AlphaParam,
    Instance,
    Matching,
    QuotaMode,
    RankValueFunction,
    government_objective,
    is_feasible,
    rank_of,
    validate_instance,
)
from oracles import rank_by_scan


def make_instance(quotas, pi, preferences, **kw):
    return Instance(quotas=quotas, pi=pi, preferences=preferences, **kw)


class TestValidateInstance:
    def test_valid_instance_has_empty_report(self):
        inst = make_instance((1, 1), [[0.5, 0.5], [0.5, 0.5]], ((0, 1), (1, 0)))
        assert validate_instance(inst).ok

    def test_quota_sum_mismatch(self):
        inst = make_instance((1, 0), [[0.5, 0.5], [0.5, 0.5]], ((0, 1), (1, 0)))
        report = validate_instance(inst)
        assert any("quota sum mismatch" in v for v in report.violations)

    def test_quota_sum_free_in_upper_bound_mode(self):
        inst = make_instance(
            (3, 3),
            [[0.5, 0.5], [0.5, 0.5]],
            ((0, 1), (1, 0)),
            quota_mode=QuotaMode.UPPER_BOUND,
        )
        assert validate_instance(inst).ok

    def test_pi_out_of_range(self):
        inst = make_instance((1, 1), [[0.5, 1.5], [0.5, 0.5]], ((0, 1), (1, 0)))
        assert any("pi out of range" in v for v in validate_instance(inst).violations)

    def test_duplicate_and_unknown_preference_entries(self):
        inst = make_instance((1, 1), [[0.5, 0.5], [0.5, 0.5]], ((0, 0), (1, 7)))
        report = validate_instance(inst)
        assert any("duplicate" in v for v in report.violations)
        assert any("invalid location" in v for v in report.violations)

    def test_validation_does_not_mutate(self):
        inst = make_instance((1, 1), [[0.5, 0.5], [0.5, 0.5]], ((0, 1), (1, 0)))
        before = inst.pi.copy()
        validate_instance(inst)
        assert np.array_equal(inst.pi, before)


class TestGovernmentObjective:
    def test_single_pair(self):
        inst = make_instance((1,), [[0.7]], ((0,),))
        assert government_objective(inst, Matching((0,))) == pytest.approx(0.7)

    def test_empty_matching_sums_to_zero(self):
        inst = make_instance((1, 1), [[0.5, 0.5], [0.5, 0.5]], ((0, 1), (1, 0)))
        assert government_objective(inst, Matching((None, None))) == 0.0

    def test_diagonal_hand_sum(self):
        pi = [[0.2, 0, 0], [0, 0.3, 0], [0, 0, 0.5]]
        inst = make_instance((1, 1, 1), pi, ((0, 1, 2),) * 3)
        assert government_objective(inst, Matching((0, 1, 2))) == pytest.approx(1.0)

    @given(scale=st.floats(0.1, 4.0), seed=st.integers(0, 10_000))
    @settings(max_examples=30, deadline=None)
    def test_linear_in_pi(self, scale, seed):
        # bounds deliberately relaxed: construction does not clamp pi
        r = np.random.default_rng(seed)
        pi = r.uniform(size=(3, 2))
        inst = make_instance((2, 1), pi, ((0, 1),) * 3)
        scaled = make_instance((2, 1), pi * scale, ((0, 1),) * 3)
        mu = Matching((0, 0, 1))
        assert government_objective(scaled, mu) == pytest.approx(
            scale * government_objective(inst, mu)
        )


class TestRankOf:
    def test_examples(self):
        # lists over locations {A=0, B=1, C=2}
        inst = make_instance(
            (1, 1, 1),
            [[0.1] * 3] * 3,
            ((1, 0, 2), (1, 0), (0,)),
        )
        assert rank_of(inst, 0, 0) == 2
        assert rank_of(inst, 1, 2) is None
        assert rank_of(inst, 2, 0) == 1

    @given(seed=st.integers(0, 10_000))
    @settings(max_examples=50, deadline=None)
    def test_agrees_with_naive_scan(self, seed):
        r = np.random.default_rng(seed)
        num_locations = int(r.integers(1, 6))
        prefs = tuple(int(j) for j in r.permutation(num_locations))[
            : int(r.integers(1, num_locations + 1))
        ]
        inst = make_instance(
            (num_locations,) + (0,) * (num_locations - 1),
            [[0.0] * num_locations],
            (prefs,),
        )
        for j in range(num_locations):
            assert rank_of(inst, 0, j) == rank_by_scan(prefs, j)


class TestFeasibility:
    def test_exact_counts(self):
        inst = make_instance((2, 1), [[0.1, 0.2]] * 3, ((0, 1),) * 3)
        assert is_feasible(inst, Matching((0, 0, 1)))
        assert not is_feasible(inst, Matching((0, 1, 1)))
        assert not is_feasible(inst, Matching((0, 0, None)))

    def test_upper_bound_counts(self):
        inst = make_instance(
            (2, 2),
            [[0.1, 0.2]] * 3,
            ((0, 1),) * 3,
            quota_mode=QuotaMode.UPPER_BOUND,
        )
        assert is_feasible(inst, Matching((0, 1, 1)))
        assert is_feasible(inst, Matching((0, 0, 1)))
        assert not is_feasible(inst, Matching((None, 0, 1)))

    def test_assigned_counts_sum_to_families(self):
        inst = make_instance((2, 1), [[0.1, 0.2]] * 3, ((0, 1),) * 3)
        mu = Matching((0, 0, 1))
        assert sum(mu.location_counts(2)) == inst.num_families


class TestDomainTypes:
    def test_rank_value_function_monotone(self):
        with pytest.raises(ValueError):
            RankValueFunction((0.2, 0.5))
        with pytest.raises(ValueError):
            RankValueFunction((1.5, 0.5))
        v = RankValueFunction.inverse(4)
        assert v(1) == 1.0 and v(4) == pytest.approx(0.25)

    def test_alpha_bounds(self):
        assert AlphaParam(0.5).value == 0.5
        with pytest.raises(ValueError):
            AlphaParam(1.2)
        with pytest.raises(ValueError):
            AlphaParam(-0.1)

    def test_instance_is_immutable(self):
        inst = make_instance((1,), [[0.5]], ((0,),))
        with pytest.raises(Exception):
            inst.pi[0, 0] = 0.9
        with pytest.raises(Exception):
            inst.quotas = (2,)

    def test_structural_errors_raise_at_construction(self):
        with pytest.raises(ValueError):
            make_instance((1,), [[0.5, 0.5]], ((0,),))
        with pytest.raises(ValueError):
            make_instance((1, 1), [[0.5, 0.5]], ((0,), (1,)))

    def test_completeness_flag(self):
        assert make_instance((1, 1), [[0.1, 0.2]] * 2, ((0, 1), (1, 0))).has_complete_preferences
        assert not make_instance((1, 1), [[0.1, 0.2]] * 2, ((0,), (1, 0))).has_complete_preferences
