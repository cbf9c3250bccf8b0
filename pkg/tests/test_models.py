import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustdoe import (
    CapacityError,
    DegeneratePriorError,
    MaximalModel,
    PriorSpec,
    Submodel,
    count_submodels,
    enumerate_submodels,
    model_prior,
    weight_table,
    weight_table_enumerated,
    weight_table_exchangeable,
)


def lattice_size_oracle(k):
    """Independent count: choose the mains, then any subset of their pairs."""
    return sum(math.comb(k, a) * 2 ** math.comb(a, 2) for a in range(k + 1))


class TestEnumeration:
    @pytest.mark.parametrize("k,n_eligible", [(2, 5), (3, 18), (4, 113), (5, 1439)])
    def test_eligible_counts_at_14_runs(self, k, n_eligible):
        subs = enumerate_submodels(MaximalModel.full_second_order(k), 14)
        assert sum(s.eligible for s in subs) == n_eligible

    def test_totals_match_closed_form(self):
        for k in range(0, 7):
            mm = MaximalModel.full_second_order(k)
            subs = enumerate_submodels(mm, 100)
            assert len(subs) == lattice_size_oracle(k) == count_submodels(mm)

    def test_k5_total_and_ineligible_split(self):
        subs = enumerate_submodels(MaximalModel.full_second_order(5), 14)
        assert len(subs) == 1450
        assert sum(not s.eligible for s in subs) == 11

    def test_deterministic_order(self):
        mm = MaximalModel.full_second_order(3)
        a = enumerate_submodels(mm, 8)
        b = enumerate_submodels(mm, 8)
        assert a == b
        assert a[0] == Submodel(frozenset(), frozenset())

    def test_capacity_error(self):
        with pytest.raises(CapacityError):
            enumerate_submodels(MaximalModel.full_second_order(8), 20)

    def test_partial_interaction_set(self):
        mm = MaximalModel(3, ((1, 2),))
        subs = enumerate_submodels(mm, 10)
        # mains subsets: 8; interaction admissible only when {1,2} present: 2 extra
        assert len(subs) == 10

    def test_heredity_enforced(self):
        with pytest.raises(ValueError):
            Submodel({1}, {(1, 2)})

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10 ** 6))
    def test_heredity_closure(self, seed):
        rng = np.random.default_rng(seed)
        subs = enumerate_submodels(MaximalModel.full_second_order(4), 12)
        sub = subs[rng.integers(len(subs))]
        if not sub.mains:
            return
        drop = sorted(sub.mains)[rng.integers(len(sub.mains))]
        reduced = Submodel(
            sub.mains - {drop},
            {p for p in sub.interactions if drop not in p},
        )
        assert reduced.n_effects < sub.n_effects or not sub.interactions

    def test_eligibility_depends_on_size_only(self):
        subs = enumerate_submodels(MaximalModel.full_second_order(4), 6)
        for s in subs:
            assert s.eligible == (s.n_effects + 1 <= 6)


class TestModelPrior:
    def test_intercept_only(self):
        mm = MaximalModel.full_second_order(2)
        prior = PriorSpec.hierarchical(0.5, 0.25)
        sub = Submodel(frozenset(), frozenset())
        # absent parents make the interaction impossible: its factor is 1
        assert model_prior(sub, prior, mm) == pytest.approx(0.25)

    def test_full_model(self):
        mm = MaximalModel.full_second_order(2)
        prior = PriorSpec.hierarchical(0.5, 0.25)
        sub = Submodel({1, 2}, {(1, 2)})
        assert model_prior(sub, prior, mm) == pytest.approx(0.0625)

    def test_equal_mode(self):
        mm = MaximalModel.full_second_order(3)
        for sub in enumerate_submodels(mm, 10):
            assert model_prior(sub, PriorSpec.equal(), mm) == 1.0

    def test_per_factor_probabilities(self):
        mm = MaximalModel.full_second_order(2)
        prior = PriorSpec.hierarchical((0.9, 0.2), {(1, 2): 0.5})
        sub = Submodel({1}, frozenset())
        assert model_prior(sub, prior, mm) == pytest.approx(0.9 * 0.8)

    def test_probability_bounds(self):
        with pytest.raises(ValueError):
            PriorSpec.hierarchical(1.0, 0.25)
        with pytest.raises(ValueError):
            PriorSpec.hierarchical(0.5, 1.0)

    def test_serialization_roundtrip(self):
        for p in (PriorSpec.equal(), PriorSpec.hierarchical(0.5, 0.25)):
            assert PriorSpec.from_json(p.to_json()) == p


class TestEnumeratedWeights:
    def test_equal_weights_k3(self):
        mm = MaximalModel.full_second_order(3)
        w = weight_table_enumerated(enumerate_submodels(mm, 14), PriorSpec.equal(), mm, 14)
        nz = w.per_model[w.per_model > 0]
        assert len(nz) == 18
        assert nz == pytest.approx(np.full(18, 1 / 18))
        assert w.per_model.sum() == pytest.approx(1.0, abs=1e-12)

    def test_pair_table_basics(self):
        mm = MaximalModel.full_second_order(2)
        w = weight_table_enumerated(enumerate_submodels(mm, 14), PriorSpec.equal(), mm, 14)
        assert w.pair[0, 0] == pytest.approx(1.0)
        # models containing both mains: {1,2} and {1,2,12} of the 5
        assert w.pair[1, 2] == pytest.approx(2 / 5)
        v = mm.n_effects
        for i in range(v + 1):
            for j in range(v + 1):
                assert w.pair[i, j] <= min(w.pair[i, i], w.pair[j, j]) + 1e-12
                assert -1e-15 <= w.pair[i, j] <= 1.0 + 1e-15

    def test_printed_exponent_equivalence(self):
        # the product prior is sometimes written with main-effect factor
        # (1-pi)^(k-delta) instead of the Bernoulli (1-pi)^(1-delta); the two
        # differ by a model-independent constant, so normalized weights match
        mm = MaximalModel.full_second_order(3)
        subs = enumerate_submodels(mm, 9)
        prior = PriorSpec.hierarchical(0.4, 0.2)
        w = weight_table_enumerated(subs, prior, mm, 9)

        def printed_raw(sub):
            out = 1.0
            for f in (1, 2, 3):
                d = 1 if f in sub.mains else 0
                out *= 0.4 ** d * 0.6 ** (3 - d)
            for p in mm.interactions:
                if p[0] in sub.mains and p[1] in sub.mains:
                    out *= 0.2 if p in sub.interactions else 0.8
            return out

        raw = np.array([printed_raw(s) if s.eligible else 0.0 for s in subs])
        assert w.per_model == pytest.approx(raw / raw.sum(), abs=1e-14)

    def test_gamma_positive_normalization(self):
        mm = MaximalModel.full_second_order(3)
        subs = enumerate_submodels(mm, 4)  # only models with <= 3 effects fit
        w = weight_table_enumerated(subs, PriorSpec.hierarchical(0.5, 0.25), mm, 4)
        assert w.per_model.sum() == pytest.approx(1.0, abs=1e-12)
        assert all(w.per_model[i] == 0.0 for i, s in enumerate(subs) if not s.eligible)


class TestExchangeableWeights:
    @pytest.mark.parametrize("k", [2, 3, 4, 5])
    @pytest.mark.parametrize("n_runs", [8, 14, 32])
    def test_matches_enumeration(self, k, n_runs):
        mm = MaximalModel.full_second_order(k)
        subs = enumerate_submodels(mm, n_runs)
        we = weight_table_enumerated(subs, PriorSpec.hierarchical(0.3, 0.25), mm, n_runs)
        wx = weight_table_exchangeable(k, 0.3, 0.25, n_runs)
        assert np.abs(we.pair - wx.pair).max() < 1e-12
        assert wx.gamma == pytest.approx(we.gamma, abs=1e-12)

    def test_equal_mode_matches_enumeration(self):
        mm = MaximalModel.full_second_order(4)
        subs = enumerate_submodels(mm, 9)
        we = weight_table_enumerated(subs, PriorSpec.equal(), mm, 9)
        wx = weight_table_exchangeable(4, None, None, 9, mode="equal")
        assert np.abs(we.pair - wx.pair).max() < 1e-12

    def test_degenerate_prior_single_model(self):
        w = weight_table_exchangeable(3, 1.0, 0.0, 10)
        # only the all-mains model survives, so every main-effect class is 1
        assert w.pair[0, 1] == pytest.approx(1.0)
        assert w.pair[1, 2] == pytest.approx(1.0)
        assert w.pair[0, 4] == 0.0  # interaction classes empty

    def test_degenerate_prior_error(self):
        with pytest.raises(DegeneratePriorError):
            weight_table_exchangeable(5, 1.0, 0.0, 4)  # all-mains model ineligible

    def test_saturated_scale_runs_fast(self):
        import time

        t0 = time.perf_counter()
        w = weight_table_exchangeable(24, 0.5, 0.25, 25)
        assert time.perf_counter() - t0 < 1.0
        assert w.pair.shape == (301, 301)
        assert np.isfinite(w.pair).all()

    def test_interaction_prob_without_pairs(self):
        with pytest.raises(ValueError):
            weight_table_exchangeable(1, 0.5, 0.25, 10)


class TestDispatcher:
    def test_auto_prefers_enumerated(self):
        w = weight_table(MaximalModel.full_second_order(3), PriorSpec.equal(), 14)
        assert w.per_model is not None

    def test_auto_switches_for_large_lattices(self):
        w = weight_table(MaximalModel.full_second_order(24),
                         PriorSpec.hierarchical(0.5, 0.25), 25)
        assert w.per_model is None

    def test_exchangeable_rejects_asymmetric(self):
        prior = PriorSpec.hierarchical((0.5, 0.6), {(1, 2): 0.25})
        with pytest.raises(ValueError):
            weight_table(MaximalModel.full_second_order(2), prior, 10,
                         engine="exchangeable")
