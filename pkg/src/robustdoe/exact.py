"""Exact robust criteria via information-matrix inversion.

For each eligible submodel the estimation criterion takes the trace of the
inverse information matrix without its intercept row/column, and the
prediction criterion takes tr[(X_s'X_s)^-1 G_s] where G_s is the diagonal
region-moment matrix over the cuboidal region [-1,1]^k_s: entry 1 for the
intercept, 1/3 per main effect, 1/9 per interaction.  Weighted averages over
the submodel lattice give the A-type value, the I-type value, and their
alpha blend.

When some eligible submodel is inestimable for the design at hand, the
weighted averages are replaced by weighted harmonic means over the estimable
submodels: each model contributes its efficiency (reciprocal trace, zero when
inestimable), and the aggregate is inverted back.  The intercept-only model
carries no effect parameters, so it contributes zero to the estimation-side
harmonic sum.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .design import Design, model_matrix, project
from .errors import AllInestimableError
from .models import MaximalModel, Submodel, WeightTable, _submodels_cached, ENUMERATION_CAP

# Gram matrices of +-1 designs are integer, so true singularity is exact; the
# relative eigenvalue floor only guards floating-point roundoff.
RANK_TOL = 1e-9

MOMENT_INTERCEPT = 1.0
MOMENT_MAIN = 1.0 / 3.0
MOMENT_INTERACTION = 1.0 / 9.0


def moment_diagonal(n_mains: int, n_interactions: int) -> np.ndarray:
    """Diagonal of the region-moment matrix for a model with the given shape."""
    return np.concatenate([
        [MOMENT_INTERCEPT],
        np.full(n_mains, MOMENT_MAIN),
        np.full(n_interactions, MOMENT_INTERACTION),
    ])


def _inverse_diagonal(gram: np.ndarray, n_runs: int) -> np.ndarray | None:
    """Diagonal of gram^-1 via symmetric eigendecomposition.

    Returns None when the matrix is rank-deficient at the relative tolerance;
    the diagonal comes from the factorization directly, the full inverse is
    never formed.
    """
    lam, vec = np.linalg.eigh(gram)
    if lam[0] <= RANK_TOL * n_runs:
        return None
    return (vec * vec) @ (1.0 / lam)


def trace_h(design: Design, sub: Submodel) -> float | None:
    """Trace of the inverse information matrix minus its intercept entry.

    None marks an inestimable submodel (singular X_s'X_s).  The intercept-only
    model has an empty effect block and returns 0.
    """
    x = model_matrix(design, sub)
    diag = _inverse_diagonal(x.T @ x, design.runs)
    if diag is None:
        return None
    return float(diag[1:].sum())


def trace_ig(design: Design, sub: Submodel) -> float | None:
    """tr[(X_s'X_s)^-1 G_s] with the diagonal region-moment matrix, or None."""
    x = model_matrix(design, sub)
    diag = _inverse_diagonal(x.T @ x, design.runs)
    if diag is None:
        return None
    g = moment_diagonal(len(sub.mains), len(sub.interactions))
    return float((g * diag).sum())


@dataclass(frozen=True)
class ModelEval:
    """Per-submodel detail: traces are None when inestimable."""

    index: int
    n_effects: int
    trace_h: float | None
    trace_ig: float | None
    estimable: bool


@dataclass(frozen=True)
class ExactReport:
    a_value: float
    i_value: float
    p_alpha: float
    alpha: float
    used_harmonic: bool
    n_eligible: int
    n_estimable: int
    per_model: tuple | None = None


def _eligible_traces(design: Design, weights: WeightTable):
    """Traces of every positively weighted submodel, sliced from one Gram.

    The maximal-model Gram is formed once; each submodel's information matrix
    is the principal submatrix at its ordinals.
    """
    if weights.per_model is None:
        raise ValueError("exact criteria need per-model weights (enumerated engine)")
    subs = _submodels_cached(weights.maximal, weights.n_runs, ENUMERATION_CAP)
    x = model_matrix(design, weights.maximal)
    gram = x.T @ x
    k = weights.maximal.n_factors
    rows = []
    for i, (sub, p) in enumerate(zip(subs, weights.per_model)):
        if p == 0.0:
            continue
        idx = sub.ordinals(weights.maximal)
        diag = _inverse_diagonal(gram[np.ix_(idx, idx)], design.runs)
        if diag is None:
            rows.append((i, p, len(sub.mains), len(sub.interactions), None, None))
            continue
        g = moment_diagonal(len(sub.mains), len(sub.interactions))
        rows.append((
            i, p, len(sub.mains), len(sub.interactions),
            float(diag[1:].sum()), float((g * diag).sum()),
        ))
    return rows


def _aggregate(trace_rows, alpha: float, force_harmonic: bool):
    """Combine weighted per-model traces into the A/I/P values.

    ``trace_rows`` holds (weight, trace_h, trace_ig) with None traces for
    inestimable models.  Arithmetic averaging applies when everything is
    estimable and harmonic averaging was not forced; otherwise both sides
    switch to weighted harmonic means.
    """
    n_est = sum(1 for _, th, _ in trace_rows if th is not None)
    n_tot = len(trace_rows)
    harmonic = force_harmonic or n_est < n_tot
    if not harmonic:
        a_val = sum(p * th for p, th, _ in trace_rows)
        i_val = sum(p * ti for p, _, ti in trace_rows)
    else:
        if n_est == 0:
            raise AllInestimableError("no estimable submodel under positive weight")
        a_sum = sum(p / th for p, th, _ in trace_rows if th is not None and th > 0.0)
        i_sum = sum(p / ti for p, _, ti in trace_rows if ti is not None)
        if a_sum <= 0.0 or i_sum <= 0.0:
            raise AllInestimableError("harmonic denominators vanish")
        a_val = 1.0 / a_sum
        i_val = 1.0 / i_sum
    return a_val, i_val, alpha * i_val + (1.0 - alpha) * a_val, harmonic, n_est, n_tot


def exact_criteria(
    design: Design,
    maximal: MaximalModel,
    weights: WeightTable,
    alpha: float,
    force_harmonic: bool = False,
    collect_models: bool = False,
) -> ExactReport:
    """Weighted-average criteria over the eligible submodel lattice.

    Requires a weight table from the enumerated engine (per-model weights).
    The harmonic fallback engages automatically when any positively weighted
    submodel is inestimable; ``force_harmonic`` engages it unconditionally.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if weights.maximal != maximal:
        raise ValueError("weight table was built for a different maximal model")
    rows = _eligible_traces(design, weights)
    a_val, i_val, p_val, harmonic, n_est, n_tot = _aggregate(
        [(p, th, ti) for _, p, _, _, th, ti in rows], alpha, force_harmonic
    )
    per_model = None
    if collect_models:
        per_model = tuple(
            ModelEval(i, km + ki, th, ti, th is not None)
            for i, _, km, ki, th, ti in rows
        )
    return ExactReport(a_val, i_val, p_val, alpha, harmonic, n_tot, n_est, per_model)


@dataclass(frozen=True)
class ProjectionExactReport:
    value: float
    a_value: float
    i_value: float
    alpha: float
    used_harmonic: bool
    n_projections: int
    n_inestimable_models: int


def projection_average_exact(
    design: Design,
    k: int,
    weights: WeightTable,
    alpha: float,
    force_harmonic: bool | None = None,
    pooled: bool = True,
) -> ProjectionExactReport:
    """Criterion value averaged over all k-factor projections.

    One weight table (built for k factors at this run size) applies to every
    projection.  With ``pooled`` (the default), the C(m,k) projections'
    submodels form a single weighted family, each model carrying weight
    p_s / C(m,k): when every model in the family is estimable this reduces
    exactly to the arithmetic mean of per-projection values, and otherwise the
    harmonic fallback is applied to the pooled family, which is the convention
    the published saturated/nonregular benchmarks follow.  ``pooled=False``
    instead averages per-projection reports, each switching to the harmonic
    form on its own.

    ``force_harmonic=None`` switches automatically; True/False forces.
    """
    if not 1 <= k <= design.factors:
        raise ValueError(f"projection size {k} out of range 1..{design.factors}")
    if weights.maximal.n_factors != k:
        raise ValueError("weight table factor count does not match projection size")
    combos = list(itertools.combinations(range(1, design.factors + 1), k))
    n_proj = len(combos)
    if pooled:
        pool = []
        for cols in combos:
            sub = project(design, cols)
            pool.extend(
                (p / n_proj, th, ti)
                for _, p, _, _, th, ti in _eligible_traces(sub, weights)
            )
        a_val, i_val, p_val, harmonic, n_est, n_tot = _aggregate(
            pool, alpha, bool(force_harmonic)
        )
        return ProjectionExactReport(
            p_val, a_val, i_val, alpha, harmonic, n_proj, n_tot - n_est
        )
    reports = [
        exact_criteria(project(design, cols), weights.maximal, weights, alpha,
                       force_harmonic=bool(force_harmonic))
        for cols in combos
    ]
    bad = sum(r.n_eligible - r.n_estimable for r in reports)
    return ProjectionExactReport(
        float(np.mean([r.p_alpha for r in reports])),
        float(np.mean([r.a_value for r in reports])),
        float(np.mean([r.i_value for r in reports])),
        alpha,
        any(r.used_harmonic for r in reports),
        n_proj,
        bad,
    )
