"""Closed-form link between the approximate criteria and word counts.

For exchangeable weights, the design-dependent part of the approximate
criterion collapses onto the first four generalized word counts.  Grouping
the Gram entries of a full second-order model matrix by what they alias
(intercept-main, main-main, main-interaction sharing or not sharing a factor,
interaction-interaction overlapping or disjoint) turns the double sum over
effect pairs into

    C1*b_1 + C2*b_2 + C3*b_3 + C4*b_4

with coefficients built from six joint inclusion probabilities xi_ab (the
total weight of submodels containing a specific set of a main effects and b
interactions).  The expansion is expressed in squared-aliasing units
(a_ij^2/N^2): the criterion value itself is the expansion divided by the run
count, plus a design-independent baseline from the Gram diagonal.  All terms
are nonnegative for alpha in [0, 1], so dominance in (b_1..b_4) implies
dominance in the criterion.
"""

import math
from dataclasses import dataclass

import numpy as np

from .design import Design, gwlp
from .errors import SymmetryError
from .models import MaximalModel, WeightTable

_XI_CLASS_TOL = 1e-12


@dataclass(frozen=True)
class XiSet:
    """Joint inclusion probabilities by effect-pair class.

    xi10: one specific main effect; xi20: two specific mains; xi21: a specific
    interaction (with its parents); xi31: a main plus a disjoint interaction;
    xi32: two interactions sharing one factor; xi42: two disjoint
    interactions.  Classes that need more factors than the model has are 0.
    """

    xi10: float
    xi20: float
    xi21: float
    xi31: float
    xi32: float
    xi42: float


def _pair_class(maximal: MaximalModel, i: int, j: int) -> str:
    """Symmetry class of ordinals (i, j) in a full second-order model."""
    k = maximal.n_factors

    def kind(o):
        if o == 0:
            return ("intercept",)
        if o <= k:
            return ("main", o)
        return ("interaction",) + maximal.interactions[o - k - 1]

    a, b = kind(i), kind(j)
    if a[0] == "interaction" and b[0] != "interaction":
        a, b = b, a
    if a == b:
        return {"intercept": "one", "main": "xi10", "interaction": "xi21"}[a[0]]
    if a[0] == "intercept":
        return "xi10" if b[0] == "main" else "xi21"
    if a[0] == "main" and b[0] == "main":
        return "xi20"
    if a[0] == "main":
        return "xi21" if a[1] in b[1:] else "xi31"
    shared = len(set(a[1:]) & set(b[1:]))
    return "xi32" if shared == 1 else "xi42"


def xi_from_weights(weights: WeightTable) -> XiSet:
    """Read the xi classes off a pairwise weight table, verifying symmetry.

    Every entry of the table must agree with its class representative to
    within 1e-12, otherwise the table is not exchangeable and a SymmetryError
    names the first offending pair.  Accepts full second-order tables and
    first-order tables (whose interaction classes are all zero).
    """
    maximal = weights.maximal
    if not (maximal.is_full_second_order or maximal.n_interactions == 0):
        raise SymmetryError(
            "xi extraction requires a full second-order or first-order maximal model"
        )
    values = {"one": 1.0}
    order = ["xi10", "xi20", "xi21", "xi31", "xi32", "xi42"]
    pair = weights.pair
    v = maximal.n_effects
    for i in range(v + 1):
        for j in range(i, v + 1):
            cls = _pair_class(maximal, i, j)
            val = pair[i, j]
            if abs(pair[j, i] - val) > _XI_CLASS_TOL:
                raise SymmetryError(f"weight table asymmetric at ordinals ({i},{j})")
            if cls in values:
                if abs(values[cls] - val) > _XI_CLASS_TOL:
                    raise SymmetryError(
                        f"class {cls} disagrees at ordinals ({i},{j}): "
                        f"{val!r} vs {values[cls]!r}"
                    )
            else:
                values[cls] = float(val)
    return XiSet(*(values.get(name, 0.0) for name in order))


def bridge_first_order(b1: float, b2: float, xi1: float, xi2: float, alpha: float) -> float:
    """Word-count expansion for a first-order maximal model.

    xi1 is the inclusion probability of one specific main effect, xi2 of two.
    """
    _check_alpha(alpha)
    return (1.0 + alpha / 3.0) * xi1 * b1 + 2.0 * (1.0 - 2.0 * alpha / 3.0) * xi2 * b2


@dataclass(frozen=True)
class BridgeValue:
    value: float
    coefficients: tuple[float, float, float, float]
    alpha: float


def bridge_second_order(b_prefix, xi: XiSet, k: int, alpha: float) -> BridgeValue:
    """Word-count expansion for the full second-order maximal model.

    ``b_prefix`` is (b_1, b_2, b_3, b_4); shorter prefixes are padded with
    zeros.  Returns the four coefficients alongside the value so dominance
    arguments can inspect them.
    """
    _check_alpha(alpha)
    if k < 2:
        raise ValueError("second-order expansion needs at least 2 factors")
    b = tuple(b_prefix) + (0.0,) * (4 - len(tuple(b_prefix)))
    if len(b) > 4:
        b = b[:4]
    c1 = (1.0 + alpha / 3.0) * xi.xi10 + 2.0 * (1.0 - 7.0 * alpha / 9.0) * (k - 1) * xi.xi21
    c2 = (
        2.0 * (1.0 - 2.0 * alpha / 3.0) * xi.xi20
        + (1.0 + alpha / 9.0) * xi.xi21
        + 2.0 * (1.0 - 8.0 * alpha / 9.0) * (k - 2) * xi.xi32
    )
    c3 = 6.0 * (1.0 - 7.0 * alpha / 9.0) * xi.xi31
    c4 = 6.0 * (1.0 - 8.0 * alpha / 9.0) * xi.xi42
    coeff = (c1, c2, c3, c4)
    return BridgeValue(float(np.dot(coeff, b)), coeff, alpha)


def orthogonal_baseline(maximal: MaximalModel, n_runs: int, xi: XiSet, alpha: float) -> float:
    """Criterion value of a design with no aliasing at all.

    The Gram diagonal contributes 1/N per effect regardless of the design;
    this is the design-independent part that the word-count expansion omits.
    """
    _check_alpha(alpha)
    k = maximal.n_factors
    base = alpha + k * (1.0 - 2.0 * alpha / 3.0) * xi.xi10
    base += maximal.n_interactions * (1.0 - 8.0 * alpha / 9.0) * xi.xi21
    return base / n_runs


def tilde_via_bridge(design: Design, weights: WeightTable, alpha: float) -> float:
    """Approximate criterion of the whole design from its word counts alone."""
    xi = xi_from_weights(weights)
    maximal = weights.maximal
    base = orthogonal_baseline(maximal, design.runs, xi, alpha)
    if maximal.n_interactions == 0:
        pattern = gwlp(design, max_order=min(2, design.factors))
        expansion = bridge_first_order(
            pattern[1], pattern[2] if design.factors >= 2 else 0.0,
            xi.xi10, xi.xi20, alpha,
        )
    else:
        pattern = gwlp(design, max_order=min(4, design.factors))
        b = [pattern[l] if l <= design.factors else 0.0 for l in range(1, 5)]
        expansion = bridge_second_order(b, xi, maximal.n_factors, alpha).value
    return base + expansion / design.runs


def verify_bridge(d1: Design, d2: Design, weights: WeightTable, alpha: float) -> float:
    """Residual between the criterion difference and the bridged difference.

    Both designs are evaluated directly through their r tables, and again
    through the word-count expansion; the residual is the absolute difference
    of the two difference computations (the shared baseline cancels).  For
    matching run counts and exchangeable weights this is zero up to roundoff.
    """
    if d1.runs != d2.runs:
        raise ValueError(f"run counts differ: {d1.runs} vs {d2.runs}")
    if d1.factors != d2.factors or d1.factors != weights.maximal.n_factors:
        raise ValueError("designs and weight table must share one factor count")
    from .approx import r_table, tilde_criteria

    direct = (
        tilde_criteria(r_table(d1, weights.maximal), weights, alpha).p_alpha
        - tilde_criteria(r_table(d2, weights.maximal), weights, alpha).p_alpha
    )
    bridged = tilde_via_bridge(d1, weights, alpha) - tilde_via_bridge(d2, weights, alpha)
    return abs(direct - bridged)


def _check_alpha(alpha: float):
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
