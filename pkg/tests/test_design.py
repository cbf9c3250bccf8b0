import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustdoe import (
    Design,
    DesignDimensionError,
    DesignFormatError,
    MaximalModel,
    Submodel,
    design_to_text,
    e_s2,
    gma_compare,
    gwlp,
    j_characteristic,
    model_matrix,
    parse_design,
    project,
)


def random_design(rng, n, m):
    return Design(rng.choice([-1, 1], size=(n, m)))


class TestParse:
    def test_minimal(self):
        d = parse_design("1,1\n-1,-1")
        assert (d.runs, d.factors) == (2, 2)
        assert d.entries.tolist() == [[1, 1], [-1, -1]]

    def test_catalog_block(self, a_designs):
        assert (a_designs["A1"].runs, a_designs["A1"].factors) == (16, 5)

    def test_bad_token_names_position(self):
        with pytest.raises(DesignFormatError, match="row 1, column 2"):
            parse_design("1,2")

    def test_ragged_rows(self):
        with pytest.raises(DesignDimensionError, match="row 2"):
            parse_design("1 1\n1 1 -1")

    def test_comments_whitespace_unicode_minus(self):
        d = parse_design("# header\n +1  −1\n-1, 1\n")
        assert d.entries.tolist() == [[1, -1], [-1, 1]]

    def test_roundtrip(self, n6):
        assert parse_design(design_to_text(n6)).entries.tolist() == n6.entries.tolist()

    def test_rejects_single_run(self):
        with pytest.raises(ValueError):
            parse_design("1 1")

    def test_rejects_non_pm1_entries(self):
        with pytest.raises(ValueError):
            Design(np.array([[1, 0], [1, 1]]))


class TestProject:
    def test_identity(self, a_designs):
        a4 = a_designs["A4"]
        assert project(a4, range(1, 6)).entries.tolist() == a4.entries.tolist()

    def test_column_slicing(self, b_designs):
        b1 = b_designs["B1"]
        p = project(b1, [1, 2])
        assert (p.runs, p.factors) == (14, 2)
        assert p.entries.tolist() == b1.entries[:, :2].tolist()

    def test_all_three_column_projections(self, b_designs):
        combos = list(itertools.combinations(range(1, 6), 3))
        assert len(combos) == 10 == len(set(combos))
        for cols in combos:
            assert project(b_designs["B1"], cols).factors == 3

    def test_duplicate_and_out_of_range(self, b_designs):
        with pytest.raises(ValueError):
            project(b_designs["B1"], [1, 1])
        with pytest.raises(ValueError):
            project(b_designs["B1"], [0])
        with pytest.raises(ValueError):
            project(b_designs["B1"], [6])


class TestModelMatrix:
    def test_full_factorial_orthogonal(self, full_factorial_2x2):
        sub = Submodel({1, 2}, {(1, 2)})
        x = model_matrix(full_factorial_2x2, sub)
        assert x.shape == (4, 4)
        assert np.array_equal(x.T @ x, 4 * np.eye(4))

    def test_intercept_only(self, n6):
        x = model_matrix(n6, Submodel(frozenset(), frozenset()))
        assert x.shape == (6, 1)
        assert (x == 1.0).all()

    def test_full_second_order_gram_diagonal(self, b_designs):
        x = model_matrix(b_designs["B1"], MaximalModel.full_second_order(5))
        assert x.shape == (14, 16)
        assert np.array_equal((x.T @ x).diagonal(), np.full(16, 14.0))

    def test_missing_factor(self, n6):
        with pytest.raises(ValueError):
            model_matrix(n6, MaximalModel.full_second_order(6))


class TestJCharacteristic:
    def test_balanced_single_column(self, n6):
        for f in range(1, 6):
            assert j_characteristic(n6, [f]) == 0

    def test_n6_pair(self, n6):
        assert j_characteristic(n6, [1, 2]) == 2

    def test_a1_full_word(self, a_designs):
        assert j_characteristic(a_designs["A1"], [1, 2, 3, 4, 5]) == 0

    def test_empty_subset(self, n6):
        with pytest.raises(ValueError):
            j_characteristic(n6, [])

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2 ** 31 - 1))
    def test_invariances(self, seed):
        rng = np.random.default_rng(seed)
        d = random_design(rng, 8, 4)
        w = sorted(rng.choice(range(1, 5), size=2, replace=False).tolist())
        base = j_characteristic(d, w)
        perm = rng.permutation(8)
        assert j_characteristic(Design(d.entries[perm]), w) == base
        # negating any column, in or out of w, leaves the absolute sum fixed
        for col in range(1, 5):
            ent = d.entries.copy()
            ent[:, col - 1] *= -1
            assert j_characteristic(Design(ent), w) == base


class TestGwlp:
    def test_regular_suite_patterns(self, a_designs):
        expected = {
            "A1": (0, 0, 2, 1, 0),
            "A2": (0, 0, 1, 0, 0),
            "A3": (0, 0, 0, 1, 0),
            "A4": (0, 0, 0, 0, 1),
        }
        for lbl, exp in expected.items():
            assert gwlp(a_designs[lbl]).b == pytest.approx(exp, abs=1e-12)

    def test_full_factorial_vanishes(self):
        rows = list(itertools.product([-1, 1], repeat=3))
        assert gwlp(Design(np.array(rows))).b == pytest.approx((0, 0, 0), abs=1e-15)

    def test_n6_prefix(self, n6):
        w = gwlp(n6, max_order=4)
        assert w.b == pytest.approx((0.0, 10 / 9, 20 / 9, 5 / 9), abs=1e-12)

    def test_entry_bounds(self):
        rng = np.random.default_rng(3)
        d = random_design(rng, 7, 5)
        w = gwlp(d)
        for l, b in enumerate(w.b, start=1):
            assert 0.0 <= b <= math.comb(5, l) + 1e-12

    def test_projection_consistency(self, b_designs):
        # the projected pattern is the subset sum over the projected columns
        d = b_designs["B3"]
        cols = (1, 3, 5)
        w = gwlp(project(d, cols))
        for l in range(1, 4):
            direct = sum(
                (j_characteristic(d, sub) / d.runs) ** 2
                for sub in itertools.combinations(cols, l)
            )
            assert w[l] == pytest.approx(direct, abs=1e-12)

    def test_max_order_default_for_wide_designs(self):
        rng = np.random.default_rng(0)
        d = random_design(rng, 6, 18)
        assert gwlp(d).order == 4


class TestGmaCompare:
    def test_published_ordering(self, a_designs):
        w = {lbl: gwlp(d) for lbl, d in a_designs.items()}
        assert gma_compare(w["A4"], w["A3"]) == -1
        assert gma_compare(w["A3"], w["A2"]) == -1
        assert gma_compare(w["A2"], w["A1"]) == -1
        assert gma_compare(w["A1"], w["A4"]) == 1

    def test_tied(self, a_designs):
        w = gwlp(a_designs["A2"])
        assert gma_compare(w, w) == 0

    def test_length_mismatch(self, a_designs, n6):
        with pytest.raises(ValueError):
            gma_compare(gwlp(a_designs["A1"]), gwlp(n6, max_order=4))


class TestES2:
    def test_strength_two_array(self, a_designs):
        assert e_s2(a_designs["A4"]) == 0.0

    def test_n6_direct_oracle(self, n6):
        # oracle: plain pairwise inner products
        total = 0
        for i in range(5):
            for j in range(i + 1, 5):
                a_ij = int((n6.entries[:, i] * n6.entries[:, j]).sum())
                total += a_ij * a_ij
        assert total / 10 == 4.0
        assert e_s2(n6) == pytest.approx(4.0, abs=1e-12)

    def test_identical_columns(self):
        d = Design(np.array([[1, 1], [1, 1], [-1, -1], [-1, -1]]))
        assert e_s2(d) == pytest.approx(16.0)

    def test_word_count_identity_on_catalog(self, a_designs, b_designs, n6):
        designs = list(a_designs.values()) + list(b_designs.values()) + [n6]
        for d in designs:
            w = gwlp(d, max_order=2)
            assert e_s2(d) == pytest.approx(
                d.runs ** 2 * w[2] / math.comb(d.factors, 2), abs=1e-10
            )

    def test_single_factor(self):
        d = Design(np.array([[1], [-1]]))
        with pytest.raises(ValueError):
            e_s2(d)


def test_design_is_immutable(n6):
    with pytest.raises(ValueError):
        n6.entries[0, 0] = 1
