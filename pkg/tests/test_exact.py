import itertools

import numpy as np
import pytest

from robustdoe import (
    AllInestimableError,
    Design,
    MaximalModel,
    PriorSpec,
    Submodel,
    enumerate_submodels,
    exact_criteria,
    project,
    projection_average_exact,
    projection_average_tilde,
    trace_h,
    trace_ig,
    weight_table,
)


def equal_weights(k, n_runs):
    return weight_table(MaximalModel.full_second_order(k), PriorSpec.equal(),
                        n_runs, engine="enumerated")


class TestTraces:
    def test_trace_h_two_mains(self, full_factorial_2x2):
        assert trace_h(full_factorial_2x2, Submodel({1, 2}, frozenset())) == pytest.approx(0.5)

    def test_trace_h_intercept_only(self, full_factorial_2x2):
        assert trace_h(full_factorial_2x2, Submodel(frozenset(), frozenset())) == 0.0

    def test_trace_h_aliased_columns(self):
        # two identical factor columns are fully aliased
        ent = np.array([[1, 1], [1, 1], [-1, -1], [-1, -1]])
        bad = Submodel({1, 2}, frozenset())
        assert trace_h(Design(ent), bad) is None
        assert trace_ig(Design(ent), bad) is None

    def test_trace_ig_values(self, full_factorial_2x2):
        assert trace_ig(full_factorial_2x2, Submodel({1, 2}, frozenset())) == pytest.approx(5 / 12)
        assert trace_ig(full_factorial_2x2, Submodel({1, 2}, {(1, 2)})) == pytest.approx(4 / 9)

    def test_trace_ig_intercept_only(self, n6):
        assert trace_ig(n6, Submodel(frozenset(), frozenset())) == pytest.approx(1 / 6)

    def test_trace_ig_floor_on_balanced(self, b_designs):
        d = b_designs["B2"]
        for sub in enumerate_submodels(MaximalModel.full_second_order(3), d.runs):
            v = trace_ig(project(d, [1, 2, 3]), sub)
            if v is not None:
                assert v >= 1 / d.runs - 1e-12


class TestExactCriteria:
    def test_first_order_hand_values(self, full_factorial_2x2):
        mm = MaximalModel.first_order(2)
        w = weight_table(mm, PriorSpec.equal(), 4)
        rep = exact_criteria(full_factorial_2x2, mm, w, 0.5)
        assert rep.a_value == pytest.approx(0.25)
        assert rep.i_value == pytest.approx(1 / 3)
        assert rep.p_alpha == pytest.approx(7 / 24)
        assert not rep.used_harmonic

    def test_alpha_endpoints(self, full_factorial_2x2):
        mm = MaximalModel.first_order(2)
        w = weight_table(mm, PriorSpec.equal(), 4)
        r0 = exact_criteria(full_factorial_2x2, mm, w, 0.0)
        r1 = exact_criteria(full_factorial_2x2, mm, w, 1.0)
        assert r0.p_alpha == r0.a_value
        assert r1.p_alpha == r1.i_value

    def test_affine_in_alpha(self, b_designs):
        d = project(b_designs["B4"], [1, 2, 3])
        mm = MaximalModel.full_second_order(3)
        w = weight_table(mm, PriorSpec.equal(), 14)
        reps = {a: exact_criteria(d, mm, w, a) for a in (0.0, 0.3, 1.0)}
        expected = reps[0.0].p_alpha + 0.3 * (reps[1.0].p_alpha - reps[0.0].p_alpha)
        assert reps[0.3].p_alpha == pytest.approx(expected, abs=1e-12)

    def test_published_harmonic_value(self, b_designs):
        w = equal_weights(5, 14)
        rep = exact_criteria(b_designs["B1"], w.maximal, w, 0.5)
        assert rep.used_harmonic
        assert rep.p_alpha == pytest.approx(0.513219989785412, abs=1e-9)

    def test_row_and_sign_invariance(self, b_designs):
        d = b_designs["B7"]
        w = equal_weights(5, 14)
        base = exact_criteria(d, w.maximal, w, 0.5).p_alpha
        rng = np.random.default_rng(11)
        ent = d.entries[rng.permutation(d.runs)].copy()
        ent[:, 2] *= -1
        assert exact_criteria(Design(ent), w.maximal, w, 0.5).p_alpha == pytest.approx(base, abs=1e-12)

    def test_harmonic_efficiency_sum_is_monotone(self, b_designs):
        w = equal_weights(5, 14)
        rep = exact_criteria(b_designs["B1"], w.maximal, w, 0.5, collect_models=True)
        contribs = [
            1 / m.trace_h
            for m in rep.per_model
            if m.estimable and m.trace_h > 0
        ]
        partial = np.cumsum(contribs)
        assert (np.diff(partial) > 0).all()

    def test_all_inestimable(self):
        ent = np.array([[1], [1], [1], [1]])
        d = Design(ent)
        mm = MaximalModel.first_order(1)
        w = weight_table(mm, PriorSpec.equal(), 4)
        with pytest.raises(AllInestimableError):
            exact_criteria(d, mm, w, 0.5)

    def test_per_model_detail(self, b_designs):
        w = equal_weights(2, 14)
        d = project(b_designs["B1"], [1, 2])
        rep = exact_criteria(d, w.maximal, w, 0.5, collect_models=True)
        assert len(rep.per_model) == 5
        assert all(m.estimable for m in rep.per_model)


class TestRegularExactness:
    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0])
    def test_approx_equals_exact_when_estimable(self, a_designs, alpha):
        # on regular designs every fully estimable evaluation is exact
        checked = 0
        for lbl in ("A2", "A3", "A4"):
            d = a_designs[lbl]
            for k in (2, 3, 4, 5):
                w = equal_weights(k, d.runs)
                for cols in itertools.combinations(range(1, 6), k):
                    p = project(d, cols)
                    rep = exact_criteria(p, w.maximal, w, alpha)
                    if rep.used_harmonic:
                        continue
                    tilde = projection_average_tilde(p, k, w, alpha).value
                    assert abs(tilde - rep.p_alpha) < 1e-10
                    checked += 1
        assert checked > 30


class TestProjectionAverage:
    def test_single_projection_equals_direct(self, b_designs):
        w = equal_weights(5, 14)
        d = b_designs["B2"]
        avg = projection_average_exact(d, 5, w, 0.5)
        one = exact_criteria(d, w.maximal, w, 0.5)
        assert avg.value == pytest.approx(one.p_alpha, abs=1e-12)
        assert avg.n_projections == 1

    def test_published_k2_and_k3(self, b_designs):
        from robustdoe.reference import matches_printed

        w2 = equal_weights(2, 14)
        val2 = projection_average_exact(b_designs["B1"], 2, w2, 0.5).value
        assert matches_printed(val2, 0.1019, 4)
        w3 = equal_weights(3, 14)
        val3 = projection_average_exact(b_designs["B12"], 3, w3, 0.5).value
        assert matches_printed(val3, 0.1950, 4)

    def test_pooled_vs_per_projection_agree_when_estimable(self, b_designs):
        w = equal_weights(3, 14)
        d = b_designs["B5"]
        pooled = projection_average_exact(d, 3, w, 0.5, pooled=True)
        meaned = projection_average_exact(d, 3, w, 0.5, pooled=False)
        assert not pooled.used_harmonic and not meaned.used_harmonic
        assert pooled.value == pytest.approx(meaned.value, abs=1e-12)

    def test_forced_harmonic_pools_projections(self, b_designs):
        w = equal_weights(4, 14)
        d = b_designs["B1"]
        pooled = projection_average_exact(d, 4, w, 0.5, force_harmonic=True)
        assert pooled.used_harmonic
        assert pooled.value == pytest.approx(0.257477, abs=5e-6)

    def test_bad_projection_size(self, b_designs):
        w = equal_weights(3, 14)
        with pytest.raises(ValueError):
            projection_average_exact(b_designs["B1"], 6, w, 0.5)
        with pytest.raises(ValueError):
            projection_average_exact(b_designs["B1"], 4, w, 0.5)
