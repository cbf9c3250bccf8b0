"""Fast criterion approximations from the squared-correlation table.

The diagonal of the inverse information matrix of the maximal model is
approximated by truncating its series expansion at second order, which leaves
only the quantities r[i][j] = a_ij^2 / (a_ii^2 a_jj) built from the Gram
matrix entries a_ij of the full maximal-model matrix.  For a two-level design
a_ii = N, so r is symmetric with diagonal 1/N and off-diagonal values in
[0, 1/N].

Everything downstream is a weighted double sum over the one table:

* prediction side: sum of g_i r_ij p_ij with g = (1, 1/3, 1/9) by effect kind;
* estimation side: the same sum with g replaced by an indicator that skips the
  intercept row;
* the alpha blend: coefficients alpha for the intercept row, 1 - 2*alpha/3 for
  main-effect rows, 1 - 8*alpha/9 for interaction rows.

No per-submodel work occurs: submodel structure enters only through the
pairwise weight table, which is the entire speed advantage over the exact
criteria.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .design import Design, gwlp, model_matrix, project
from .errors import SymmetryError
from .models import MaximalModel, WeightTable

_PROJECTION_BATCH = 4096


@dataclass(frozen=True)
class RTable:
    """Gram matrix of the maximal-model matrix and its r_ij table.

    Built once per (design, maximal model) and reused for every submodel
    weighting.  ``gram`` is exact (integer arithmetic); ``r`` applies the
    1/(a_ii^2 a_jj) scaling.
    """

    gram: np.ndarray
    r: np.ndarray
    n_runs: int
    maximal: MaximalModel

    def __post_init__(self):
        for name in ("gram", "r"):
            a = np.asarray(getattr(self, name))
            a.flags.writeable = False
            object.__setattr__(self, name, a)


def r_table(design: Design, maximal: MaximalModel) -> RTable:
    x = model_matrix(design, maximal).astype(np.int64)
    gram = x.T @ x
    d = gram.diagonal().astype(np.float64)
    r = gram.astype(np.float64) ** 2 / (d[:, None] ** 2 * d[None, :])
    return RTable(gram, r, design.runs, maximal)


def g_weights(maximal: MaximalModel) -> np.ndarray:
    """Region-moment row weights (1, 1/3, 1/9) by effect kind."""
    k, ks = maximal.n_factors, maximal.n_interactions
    return np.concatenate([[1.0], np.full(k, 1.0 / 3.0), np.full(ks, 1.0 / 9.0)])


def alpha_weights(maximal: MaximalModel, alpha: float) -> np.ndarray:
    """Row coefficients of the alpha blend.

    Exactly the alpha mix of the prediction row weights and the estimation
    row indicator: alpha*g_i + (1-alpha)*[i >= 1].
    """
    k, ks = maximal.n_factors, maximal.n_interactions
    return np.concatenate([
        [alpha],
        np.full(k, 1.0 - 2.0 * alpha / 3.0),
        np.full(ks, 1.0 - 8.0 * alpha / 9.0),
    ])


@dataclass(frozen=True)
class TildeValues:
    a_value: float
    i_value: float
    p_alpha: float
    alpha: float


def tilde_criteria(rtable: RTable, weights: WeightTable, alpha: float) -> TildeValues:
    """Approximate criteria from one r table and one pairwise weight table."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if weights.pair.shape != rtable.r.shape:
        raise ValueError(
            f"weight table shape {weights.pair.shape} does not match r table {rtable.r.shape}"
        )
    rp = rtable.r * weights.pair
    i_val = float(g_weights(rtable.maximal) @ rp.sum(axis=1))
    a_val = float(rp[1:, :].sum())
    return TildeValues(a_val, i_val, alpha * i_val + (1.0 - alpha) * a_val, alpha)


def _interaction_pairs_0based(k: int) -> np.ndarray:
    return np.array(list(itertools.combinations(range(k), 2)), dtype=np.intp).reshape(-1, 2)


def _batched_projection_sums(design, combos, coeff: np.ndarray, with_interactions: bool) -> np.ndarray:
    """sum_ij coeff[i][j] * r_ij per projection, over batches of projections.

    Builds every projection's maximal-model matrix in one stacked array, forms
    the Grams with a single einsum per batch, and contracts against the
    coefficient matrix.  Exact for +-1 designs: a_ii = N, so r = gram^2 / N^3.
    """
    n = design.runs
    k = combos.shape[1]
    pairs = _interaction_pairs_0based(k) if with_interactions else np.empty((0, 2), dtype=np.intp)
    ent = design.entries.astype(np.float64)
    out = np.empty(len(combos))
    for lo in range(0, len(combos), _PROJECTION_BATCH):
        batch = combos[lo:lo + _PROJECTION_BATCH]
        mains = ent[:, batch].transpose(1, 0, 2)
        cols = [np.ones((len(batch), n, 1))]
        cols.append(mains)
        if len(pairs):
            cols.append(mains[:, :, pairs[:, 0]] * mains[:, :, pairs[:, 1]])
        x = np.concatenate(cols, axis=2)
        gram = np.einsum("pni,pnj->pij", x, x)
        out[lo:lo + len(batch)] = np.einsum("pij,ij->p", gram * gram, coeff) / float(n) ** 3
    return out


@dataclass(frozen=True)
class ProjectionTildeReport:
    value: float
    a_value: float
    i_value: float
    alpha: float
    n_projections: int
    method: str


def projection_values_tilde(
    design: Design,
    k: int,
    weights: WeightTable,
    alpha: float,
) -> np.ndarray:
    """Per-projection approximate values for every k-factor projection.

    Projections enumerate column subsets in ascending order; one weight table
    (depending only on k, the interaction structure, the run size, and the
    prior) applies to all of them.
    """
    if not 1 <= k <= design.factors:
        raise ValueError(f"projection size {k} out of range 1..{design.factors}")
    if weights.maximal.n_factors != k:
        raise ValueError("weight table factor count does not match projection size")
    if not weights.maximal.is_full_second_order and weights.maximal.n_interactions:
        # partial interaction sets: interaction columns do not follow the
        # all-pairs layout, so evaluate projection by projection
        vals = []
        for cols in itertools.combinations(range(1, design.factors + 1), k):
            rt = r_table(project(design, cols), weights.maximal)
            vals.append(tilde_criteria(rt, weights, alpha).p_alpha)
        return np.array(vals)
    combos = np.array(
        list(itertools.combinations(range(design.factors), k)), dtype=np.intp
    ).reshape(-1, k)
    coeff = alpha_weights(weights.maximal, alpha)[:, None] * weights.pair
    return _batched_projection_sums(design, combos, coeff,
                                    weights.maximal.n_interactions > 0)


def projection_average_tilde(
    design: Design,
    k: int,
    weights: WeightTable,
    alpha: float,
    method: str = "auto",
) -> ProjectionTildeReport:
    """Mean approximate criterion over all k-factor projections.

    ``method="direct"`` evaluates every projection's r table.  For
    exchangeable weight tables over full second-order (or first-order)
    templates, ``method="moments"`` collapses the average into generalized
    word counts of the unprojected design, which is exactly equivalent and
    independent of the projection count; ``"auto"`` picks it whenever valid.
    The estimation and prediction components are recovered as the alpha = 0
    and alpha = 1 blends.
    """
    if method not in ("auto", "direct", "moments"):
        raise ValueError(f"unknown method {method!r}")
    n_proj = math.comb(design.factors, k)
    if method in ("auto", "moments"):
        try:
            vals = _moments_average(design, k, weights, (alpha, 0.0, 1.0))
            return ProjectionTildeReport(vals[0], vals[1], vals[2], alpha, n_proj, "moments")
        except SymmetryError:
            if method == "moments":
                raise
    per_a = projection_values_tilde(design, k, weights, 0.0)
    per_i = projection_values_tilde(design, k, weights, 1.0)
    a_val, i_val = float(per_a.mean()), float(per_i.mean())
    return ProjectionTildeReport(
        alpha * i_val + (1.0 - alpha) * a_val, a_val, i_val, alpha, n_proj, "direct",
    )


def _moments_average(design: Design, k: int, weights: WeightTable, alphas) -> list[float]:
    """Projection-averaged values via word counts of the full design.

    The mean over projections of each b_l is the unprojected b_l scaled by the
    fraction of k-subsets containing a fixed l-subset; the per-projection
    value is an affine function of (b_1..b_4), so the average needs only the
    design's word counts up to order 4 (order 2 for first-order templates).
    Requires an exchangeable weight table.
    """
    from .bridge import xi_from_weights, bridge_first_order, bridge_second_order, orthogonal_baseline

    xi = xi_from_weights(weights)
    maximal = weights.maximal
    m = design.factors
    n = design.runs
    first_order = maximal.n_interactions == 0
    max_l = 2 if first_order else 4
    pattern = gwlp(design, max_order=min(max_l, m))
    scaled = [
        pattern[l] * math.comb(m - l, k - l) / math.comb(m, k) if l <= min(k, m) else 0.0
        for l in range(1, max_l + 1)
    ]
    out = []
    for a in alphas:
        base = orthogonal_baseline(maximal, n, xi, a)
        if first_order:
            expansion = bridge_first_order(scaled[0], scaled[1], xi.xi10, xi.xi20, a)
        else:
            expansion = bridge_second_order(scaled, xi, k, a).value
        out.append(base + expansion / n)
    return out
