"""Columnwise-pairwise construction of robust designs.

The search minimizes the mean approximate criterion over all k-factor
projections.  Each restart starts from a random (near) level-balanced design
and alternates two steps until no improvement is found in the first g columns:

1. reorder columns so that the column whose deletion leaves the smallest
   objective comes first (the least useful column gets adjusted first);
2. scan the leading columns, trying every within-column swap of a -1 with a
   +1 entry in (low row, high row) order; the first strictly improving swap
   is accepted and the procedure returns to the reordering step.

Swaps preserve column sums, so level balance of the start design is invariant.
The objective sequence over accepted moves is strictly decreasing, which
guarantees termination; a sweep cap bounds runtime as a safety net.

For exchangeable weights the objective is evaluated through the word-count
form of the projection average: the state keeps exact integer column-product
sums for every factor subset up to order 4, and a candidate swap touches only
the subsets containing the adjusted column.  This makes move evaluation
O(m^3) instead of O(C(m,k) * v^2) and keeps the accept/reject decision
bit-for-bit deterministic.  Asymmetric priors fall back to direct
per-projection evaluation.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .approx import projection_average_tilde
from .bridge import bridge_second_order, orthogonal_baseline, xi_from_weights
from .design import Design, _signed_subset_sums
from .errors import SymmetryError
from .models import MaximalModel, PriorSpec, WeightTable, weight_table

DEFAULT_ADJUST_COLUMNS = 5  # columns adjusted per sweep; the customary choice
DEFAULT_MAX_SWEEPS = 10_000


@dataclass(frozen=True)
class SearchConfig:
    n_runs: int
    n_factors: int
    k: int
    alpha: float = 0.5
    prior: PriorSpec = field(default_factory=PriorSpec.equal)
    adjust_columns: int = DEFAULT_ADJUST_COLUMNS
    restarts: int = 1
    seed: int = 0
    max_sweeps: int = DEFAULT_MAX_SWEEPS
    model: str = "second-order"

    def __post_init__(self):
        if self.n_runs < 2:
            raise ValueError("need at least 2 runs")
        if not 1 <= self.k <= self.n_factors:
            raise ValueError(f"projection size {self.k} out of range 1..{self.n_factors}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.adjust_columns < 1:
            raise ValueError("adjust_columns must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.model not in ("second-order", "first-order"):
            raise ValueError(f"unknown model template {self.model!r}")

    def maximal_for(self, k: int) -> MaximalModel:
        if self.model == "second-order":
            return MaximalModel.full_second_order(k)
        return MaximalModel.first_order(k)


@dataclass(frozen=True)
class MoveRecord:
    """One accepted adjustment: 1-based column position, 0-based rows."""

    sweep: int
    column: int
    row_to_plus: int
    row_to_minus: int
    objective: float


@dataclass(frozen=True)
class RestartTrace:
    restart: int
    start_design: Design
    start_objective: float
    moves: tuple[MoveRecord, ...]
    final_design: Design
    final_objective: float
    sweep_cap_hit: bool


@dataclass(frozen=True)
class SearchResult:
    design: Design
    objective: float
    restart: int
    traces: tuple[RestartTrace, ...]
    config: SearchConfig


def random_balanced_design(n_runs: int, n_factors: int, seed) -> Design:
    """Random level-balanced design (near-balanced for odd run counts).

    Each column independently holds ceil(N/2) entries of one sign and
    floor(N/2) of the other, shuffled; for odd N the majority sign is chosen
    at random per column.  ``seed`` may be an int or a numpy Generator;
    identical seeds give identical designs.
    """
    if n_runs < 2:
        raise ValueError("need at least 2 runs")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    half = n_runs // 2
    cols = np.empty((n_runs, n_factors), dtype=np.int8)
    for j in range(n_factors):
        majority = 1 if n_runs % 2 == 0 or rng.integers(2) else -1
        col = np.full(n_runs, -majority, dtype=np.int8)
        col[: n_runs - half] = majority
        cols[:, j] = rng.permutation(col)
    return Design(cols, label="random-start")


def first_order_adjustments(design: Design, column: int):
    """Yield every one-swap variant of a column, preserving its sum.

    Each yielded design flips one -1 entry to +1 and one +1 entry to -1 in
    the given 1-based column, enumerated in (minus row, plus row) ascending
    order.  A constant column yields nothing.
    """
    if not 1 <= column <= design.factors:
        raise ValueError(f"column {column} out of range 1..{design.factors}")
    col = design.entries[:, column - 1]
    minus_rows = np.nonzero(col == -1)[0]
    plus_rows = np.nonzero(col == 1)[0]
    for r_minus in minus_rows:
        for r_plus in plus_rows:
            ent = design.entries.copy()
            ent[r_minus, column - 1] = 1
            ent[r_plus, column - 1] = -1
            yield Design(ent, design.label)


class _MomentObjective:
    """Word-count objective state with exact integer subset sums.

    ``values`` per order l hold the signed column-product sums of every
    l-subset of column positions; ``sq[l]`` is the exact integer sum of their
    squares.  The objective is an affine function of the sq vector, so
    candidate swaps only need the integer deltas on subsets containing the
    adjusted column.
    """

    def __init__(self, entries: np.ndarray, cfg: SearchConfig, weights: WeightTable,
                 loo_weights: WeightTable | None):
        self.cfg = cfg
        self.m = entries.shape[1]
        self.n = entries.shape[0]
        self.entries = entries.astype(np.int8).copy()
        k = cfg.k
        first_order = cfg.model == "first-order"
        self.max_l = min(2 if first_order else 4, k, self.m)
        self._subsets = [
            np.array(list(itertools.combinations(range(self.m), l)), dtype=np.intp)
            for l in range(1, self.max_l + 1)
        ]
        self._contains_cache: dict = {}
        self._lam, self._base = self._coefficients(self.m, k, weights)
        if self.m >= 2:
            k_loo = min(k, self.m - 1)
            self._lam_loo, self._base_loo = self._coefficients(
                self.m - 1, k_loo, loo_weights if k_loo < k else weights
            )
        self._rebuild()

    def _coefficients(self, m: int, k: int, weights: WeightTable):
        """Affine objective coefficients for an m-column design at size k.

        The first-order word-count coefficients are the second-order ones with
        the interaction classes zeroed, so one formula serves both templates.
        """
        xi = xi_from_weights(weights)
        alpha = self.cfg.alpha
        if k >= 2:
            coeff = bridge_second_order((0.0, 0.0, 0.0, 0.0), xi, k, alpha).coefficients
        else:
            coeff = ((1.0 + alpha / 3.0) * xi.xi10, 0.0, 0.0, 0.0)
        base = orthogonal_baseline(self.cfg.maximal_for(k), self.n, xi, alpha)
        lam = []
        for l in range(1, self.max_l + 1):
            if l > k:
                lam.append(0.0)
                continue
            frac = math.comb(m - l, k - l) / math.comb(m, k)
            lam.append(coeff[l - 1] * frac / (self.n * float(self.n) ** 2))
        return np.array(lam), base

    def _rebuild(self):
        self.values = _signed_subset_sums(self.entries, self.max_l)
        self.sq = [int((v * v).sum()) for v in self.values]

    def _contains(self, col: int):
        """Per order: (subset indices containing col, their other columns)."""
        key = col
        if key not in self._contains_cache:
            per_l = []
            for l, subs in enumerate(self._subsets, start=1):
                mask = (subs == col).any(axis=1)
                idx = np.nonzero(mask)[0]
                others = subs[idx]
                others = others[others != col].reshape(len(idx), l - 1)
                per_l.append((idx, others))
            self._contains_cache[key] = per_l
        return self._contains_cache[key]

    def objective(self) -> float:
        return self._base + float(np.dot(self._lam, [float(s) for s in self.sq]))

    def loo_objective(self, col: int) -> float:
        """Objective of the design with the given column position deleted."""
        val = self._base_loo
        for l, (idx, _) in enumerate(self._contains(col)):
            if self._lam_loo[l] == 0.0:
                continue
            t = self.values[l][idx]
            val += self._lam_loo[l] * float(self.sq[l] - int((t * t).sum()))
        return val

    def column_products(self, col: int):
        """Row products over the non-col members of every subset containing col."""
        out = []
        ent = self.entries.astype(np.int64)
        for l, (idx, others) in enumerate(self._contains(col), start=1):
            if l == 1:
                q = np.ones((self.n, len(idx)), dtype=np.int64)
            else:
                q = ent[:, others].prod(axis=2)
            out.append(q)
        return out

    def move_objective(self, col: int, r_minus: int, r_plus: int, q_tables) -> float:
        """Objective after swapping (-1 at r_minus, +1 at r_plus) in col."""
        val = self._base
        sign = self.entries[:, col].astype(np.int64)
        for l in range(self.max_l):
            idx, _ = self._contains(col)[l]
            t = self.values[l][idx]
            p = sign[r_minus] * q_tables[l][r_minus] + sign[r_plus] * q_tables[l][r_plus]
            delta = -2 * p
            dsq = int((delta * (2 * t + delta)).sum())
            val += self._lam[l] * float(self.sq[l] + dsq)
        return val

    def apply_move(self, col: int, r_minus: int, r_plus: int, q_tables):
        sign = self.entries[:, col].astype(np.int64)
        for l in range(self.max_l):
            idx, _ = self._contains(col)[l]
            p = sign[r_minus] * q_tables[l][r_minus] + sign[r_plus] * q_tables[l][r_plus]
            delta = -2 * p
            t = self.values[l]
            self.sq[l] += int((delta * (2 * t[idx] + delta)).sum())
            t[idx] += delta
        self.entries[r_minus, col] = 1
        self.entries[r_plus, col] = -1

    def permute_columns(self, order):
        self.entries = np.ascontiguousarray(self.entries[:, order])
        self._rebuild()


class _DirectObjective:
    """Fallback objective for non-exchangeable weights: full re-evaluation."""

    def __init__(self, entries: np.ndarray, cfg: SearchConfig, weights: WeightTable,
                 loo_weights: WeightTable | None):
        self.cfg = cfg
        self.entries = entries.astype(np.int8).copy()
        self.m = entries.shape[1]
        self._weights = weights
        self._loo_weights = loo_weights if loo_weights is not None else weights
        self._k_loo = min(cfg.k, self.m - 1) if self.m >= 2 else None

    def _value(self, entries, k, weights) -> float:
        return projection_average_tilde(
            Design(entries), k, weights, self.cfg.alpha, method="direct"
        ).value

    def objective(self) -> float:
        return self._value(self.entries, self.cfg.k, self._weights)

    def loo_objective(self, col: int) -> float:
        keep = [c for c in range(self.m) if c != col]
        return self._value(self.entries[:, keep], self._k_loo, self._loo_weights)

    def column_products(self, col: int):
        return None

    def move_objective(self, col, r_minus, r_plus, q_tables) -> float:
        ent = self.entries.copy()
        ent[r_minus, col] = 1
        ent[r_plus, col] = -1
        return self._value(ent, self.cfg.k, self._weights)

    def apply_move(self, col, r_minus, r_plus, q_tables):
        self.entries[r_minus, col] = 1
        self.entries[r_plus, col] = -1

    def permute_columns(self, order):
        self.entries = np.ascontiguousarray(self.entries[:, order])


def _search_tables(cfg: SearchConfig, m: int):
    weights = weight_table(cfg.maximal_for(cfg.k), cfg.prior, cfg.n_runs)
    loo_weights = None
    if m >= 2 and min(cfg.k, m - 1) < cfg.k:
        loo_weights = weight_table(cfg.maximal_for(m - 1), cfg.prior, cfg.n_runs)
    return weights, loo_weights


def _build_objective(entries: np.ndarray, cfg: SearchConfig, tables=None):
    weights, loo_weights = tables if tables is not None else _search_tables(cfg, entries.shape[1])
    try:
        return _MomentObjective(entries, cfg, weights, loo_weights)
    except SymmetryError:
        return _DirectObjective(entries, cfg, weights, loo_weights)


def reorder_columns(design: Design, cfg: SearchConfig) -> Design:
    """Sort columns ascending by the objective of the design without them.

    The column whose deletion leaves the smallest projection-averaged value
    contributes least, so it is moved first in line for adjustment.  Ties keep
    the original column order.  The full-design objective is invariant under
    the permutation.
    """
    if design.factors < 2:
        return design
    state = _build_objective(design.entries, cfg)
    order = _loo_order(state)
    return Design(design.entries[:, order], design.label)


def _loo_order(state) -> np.ndarray:
    vals = np.array([state.loo_objective(c) for c in range(state.m)])
    return np.argsort(vals, kind="stable")


def _run_restart(index: int, rng: np.random.Generator, cfg: SearchConfig, tables):
    design = random_balanced_design(cfg.n_runs, cfg.n_factors, rng)
    state = _build_objective(design.entries, cfg, tables)
    current = state.objective()
    start = current
    moves = []
    cap_hit = False
    g = min(cfg.adjust_columns, cfg.n_factors)
    sweep = 0
    while True:
        sweep += 1
        if sweep > cfg.max_sweeps:
            cap_hit = True
            break
        if state.m >= 2:
            state.permute_columns(_loo_order(state))
        improved = False
        for pos in range(g):
            col = state.entries[:, pos]
            minus_rows = np.nonzero(col == -1)[0]
            plus_rows = np.nonzero(col == 1)[0]
            if len(minus_rows) == 0 or len(plus_rows) == 0:
                continue
            q_tables = state.column_products(pos)
            for r_minus in minus_rows:
                for r_plus in plus_rows:
                    candidate = state.move_objective(pos, int(r_minus), int(r_plus), q_tables)
                    if candidate < current:
                        state.apply_move(pos, int(r_minus), int(r_plus), q_tables)
                        current = candidate
                        moves.append(MoveRecord(sweep, pos + 1, int(r_minus), int(r_plus), candidate))
                        improved = True
                        break
                if improved:
                    break
            if improved:
                break
        if not improved:
            break
    final = Design(state.entries.copy(), label=f"cpw-restart-{index}")
    return final, RestartTrace(index, design, start, tuple(moves), final, current, cap_hit)


def cpw_search(cfg: SearchConfig) -> SearchResult:
    """Multi-restart columnwise-pairwise search.

    Restarts draw independent streams from the master seed and run the
    reorder/adjust loop to a local optimum; the best final objective wins,
    ties going to the earliest restart.  Identical configurations (including
    the seed) reproduce identical results and traces.
    """
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    tables = _search_tables(cfg, cfg.n_factors)
    best = None
    traces = []
    for i, ss in enumerate(streams):
        design, trace = _run_restart(i, np.random.Generator(np.random.PCG64(ss)), cfg, tables)
        traces.append(trace)
        if best is None or trace.final_objective < best[1]:
            best = (design, trace.final_objective, i)
    design, objective, index = best
    return SearchResult(design.relabel(f"cpw-{cfg.n_runs}x{cfg.n_factors}"), objective,
                        index, tuple(traces), cfg)
