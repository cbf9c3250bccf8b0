"""Maximal models, heredity submodel lattices, and submodel weights.

A maximal model has k main effects plus a set of two-factor interactions; the
final fitted model is assumed to be one of its submodels obeying strong
heredity (an interaction may appear only with both parent main effects).  A
submodel with v_s effects is *eligible* when v_s + 1 <= N, i.e. its parameters
fit in the run size; this is structural, unlike estimability which depends on
the design.

Weights over submodels come from one of two engines:

* ``weight_table_enumerated`` walks the whole lattice and works for any prior
  and any interaction set, but its cost is the lattice size;
* ``weight_table_exchangeable`` computes the same table in closed form via
  binomial sums when the prior is symmetric across factors and the maximal
  model is the full second-order one.  It never materializes per-model
  weights, so it scales to saturated-design sizes (k = 24 and beyond).

Both produce a ``WeightTable``: the per-model weights p_s (enumerated engine
only) and the pairwise table p_pair[i][j] = sum of p_s over submodels
containing both effects i and j, indexed by model-matrix ordinals
(0 = intercept, 1..k mains, k+1..v interactions).
"""

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .errors import CapacityError, DegeneratePriorError

ENUMERATION_CAP = 10_000_000

_WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class MaximalModel:
    """k main effects plus a tuple of 1-based factor pairs (f, g), f < g."""

    n_factors: int
    interactions: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        k = self.n_factors
        if k < 0:
            raise ValueError("n_factors must be >= 0")
        pairs = tuple(tuple(p) for p in self.interactions)
        seen = set()
        for f, g in pairs:
            if not (1 <= f < g <= k):
                raise ValueError(f"interaction ({f},{g}) invalid for {k} factors")
            if (f, g) in seen:
                raise ValueError(f"duplicate interaction ({f},{g})")
            seen.add((f, g))
        object.__setattr__(self, "interactions", tuple(sorted(pairs)))

    @classmethod
    def full_second_order(cls, k: int) -> "MaximalModel":
        return cls(k, tuple(itertools.combinations(range(1, k + 1), 2)))

    @classmethod
    def first_order(cls, k: int) -> "MaximalModel":
        return cls(k, ())

    @property
    def n_interactions(self) -> int:
        return len(self.interactions)

    @property
    def n_effects(self) -> int:
        """v = k + k*: effects excluding the intercept."""
        return self.n_factors + len(self.interactions)

    @property
    def is_full_second_order(self) -> bool:
        return len(self.interactions) == math.comb(self.n_factors, 2)

    def terms(self) -> list[tuple]:
        """Model-matrix terms in ordinal order: intercept, mains, interactions."""
        out = [("intercept",)]
        out += [("main", f) for f in range(1, self.n_factors + 1)]
        out += [("interaction", f, g) for f, g in self.interactions]
        return out

    def interaction_ordinal(self, pair: tuple[int, int]) -> int:
        return self.n_factors + 1 + self.interactions.index(tuple(pair))


@dataclass(frozen=True)
class Submodel:
    """A strong-heredity submodel: a set of mains and a set of interactions."""

    mains: frozenset
    interactions: frozenset
    eligible: bool = True

    def __post_init__(self):
        object.__setattr__(self, "mains", frozenset(self.mains))
        object.__setattr__(self, "interactions", frozenset(tuple(p) for p in self.interactions))
        for f, g in self.interactions:
            if f not in self.mains or g not in self.mains:
                raise ValueError(
                    f"heredity violation: interaction ({f},{g}) without both parent mains"
                )

    @property
    def n_effects(self) -> int:
        """v_s: number of effect columns excluding the intercept."""
        return len(self.mains) + len(self.interactions)

    def terms(self) -> list[tuple]:
        out = [("intercept",)]
        out += [("main", f) for f in sorted(self.mains)]
        out += [("interaction", f, g) for f, g in sorted(self.interactions)]
        return out

    def ordinals(self, maximal: MaximalModel) -> list[int]:
        """Positions of this submodel's columns in the maximal model matrix."""
        idx = [0] + sorted(self.mains)
        idx += [maximal.interaction_ordinal(p) for p in sorted(self.interactions)]
        return idx


@dataclass(frozen=True)
class PriorSpec:
    """Prior inclusion probabilities for effects.

    ``equal`` mode weights every eligible submodel identically.  In
    ``hierarchical`` mode each main effect i enters with probability pi_main,
    and each maximal-model interaction (i, j) enters with conditional
    probability pi_int given both parents are present (it cannot enter
    otherwise).  Scalars broadcast to all factors/pairs; per-effect values may
    be given as a sequence (mains, by factor) or a mapping from pairs.
    """

    mode: str = "equal"
    pi_main: object = None
    pi_int: object = None

    def __post_init__(self):
        if self.mode not in ("equal", "hierarchical"):
            raise ValueError(f"unknown prior mode {self.mode!r}")
        if self.mode == "hierarchical":
            if self.pi_main is None or self.pi_int is None:
                raise ValueError("hierarchical mode requires pi_main and pi_int")
            pm = self.pi_main
            pm = float(pm) if np.isscalar(pm) else tuple(float(x) for x in pm)
            for x in (pm,) if np.isscalar(pm) else pm:
                if not 0.0 < x < 1.0:
                    raise ValueError(f"main-effect probability {x} outside (0,1)")
            pi = self.pi_int
            if isinstance(pi, dict):
                pi = tuple(sorted((tuple(int(x) for x in key), float(v)) for key, v in pi.items()))
                vals = [v for _, v in pi]
            elif np.isscalar(pi):
                pi = float(pi)
                vals = [pi]
            else:
                raise ValueError("pi_int must be a scalar or a mapping from factor pairs")
            for x in vals:
                if not 0.0 <= x < 1.0:
                    raise ValueError(f"interaction probability {x} outside [0,1)")
            object.__setattr__(self, "pi_main", pm)
            object.__setattr__(self, "pi_int", pi)

    @classmethod
    def equal(cls) -> "PriorSpec":
        return cls("equal")

    @classmethod
    def hierarchical(cls, pi_main, pi_int) -> "PriorSpec":
        return cls("hierarchical", pi_main, pi_int)

    @property
    def is_symmetric(self) -> bool:
        """True when every factor (and every pair) shares one probability."""
        if self.mode == "equal":
            return True
        return np.isscalar(self.pi_main) and np.isscalar(self.pi_int)

    def main_prob(self, factor: int) -> float:
        if np.isscalar(self.pi_main):
            return float(self.pi_main)
        return float(self.pi_main[factor - 1])

    def int_prob(self, pair: tuple[int, int]) -> float:
        if np.isscalar(self.pi_int):
            return float(self.pi_int)
        return dict(self.pi_int)[tuple(pair)]

    def to_json(self) -> dict:
        if self.mode == "equal":
            return {"mode": "equal"}
        out = {"mode": "hierarchical"}
        out["pi1"] = self.pi_main if np.isscalar(self.pi_main) else list(self.pi_main)
        if np.isscalar(self.pi_int):
            out["pi2"] = self.pi_int
        else:
            out["pi2"] = {f"{f},{g}": v for (f, g), v in self.pi_int}
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "PriorSpec":
        mode = obj.get("mode", "equal")
        if mode == "equal":
            return cls.equal()
        pi2 = obj["pi2"]
        if isinstance(pi2, dict):
            pi2 = {tuple(int(t) for t in key.split(",")): float(v) for key, v in pi2.items()}
        return cls.hierarchical(obj["pi1"], pi2)


@dataclass(frozen=True)
class WeightTable:
    """Normalized submodel weights and the derived pairwise table.

    ``pair[i][j]`` is the total weight of eligible submodels containing both
    effects i and j (model-matrix ordinals, 0 = intercept, which every model
    contains).  ``per_model`` aligns with ``enumerate_submodels`` order and is
    None for the closed-form engine.  ``gamma`` is the normalizing constant:
    the raw prior mass of the eligible part of the lattice.
    """

    maximal: MaximalModel
    n_runs: int
    pair: np.ndarray
    gamma: float
    eligible_count: int
    per_model: np.ndarray | None = None

    def __post_init__(self):
        p = np.asarray(self.pair, dtype=np.float64)
        p.flags.writeable = False
        object.__setattr__(self, "pair", p)
        if self.per_model is not None:
            q = np.asarray(self.per_model, dtype=np.float64)
            q.flags.writeable = False
            object.__setattr__(self, "per_model", q)


def count_submodels(maximal: MaximalModel) -> int:
    """Size of the strong-heredity lattice, including the intercept-only model."""
    k = maximal.n_factors
    if maximal.is_full_second_order:
        return sum(math.comb(k, a) * 2 ** math.comb(a, 2) for a in range(k + 1))
    if 2 ** k > ENUMERATION_CAP:
        raise CapacityError(f"cannot count lattice over 2^{k} main-effect subsets")
    total = 0
    for mask in range(2 ** k):
        mains = {f for f in range(1, k + 1) if mask >> (f - 1) & 1}
        adm = sum(1 for f, g in maximal.interactions if f in mains and g in mains)
        total += 2 ** adm
    return total


@functools.lru_cache(maxsize=32)
def _submodels_cached(maximal: MaximalModel, n_runs: int, cap: int) -> tuple:
    return tuple(enumerate_submodels(maximal, n_runs, cap))


def enumerate_submodels(maximal: MaximalModel, n_runs: int, cap: int = ENUMERATION_CAP) -> list[Submodel]:
    """All strong-heredity submodels, flagged eligible when v_s + 1 <= N.

    Deterministic order: main-effect subsets in binary counting order (factor
    f maps to bit f-1), then interaction subsets of the admissible
    interactions likewise.  The intercept-only model comes first.  Raises
    CapacityError when the lattice exceeds ``cap`` nodes.
    """
    total = count_submodels(maximal)
    if total > cap:
        raise CapacityError(
            f"heredity lattice has {total} submodels (cap {cap}); "
            "use the exchangeable weight engine for symmetric priors"
        )
    k = maximal.n_factors
    out = []
    for mask in range(2 ** k):
        mains = frozenset(f for f in range(1, k + 1) if mask >> (f - 1) & 1)
        adm = [p for p in maximal.interactions if p[0] in mains and p[1] in mains]
        base = len(mains)
        for imask in range(2 ** len(adm)):
            ints = frozenset(adm[t] for t in range(len(adm)) if imask >> t & 1)
            v_s = base + len(ints)
            out.append(Submodel(mains, ints, eligible=(v_s + 1) <= n_runs))
    return out


def model_prior(sub: Submodel, prior: PriorSpec, maximal: MaximalModel) -> float:
    """Raw (unnormalized) prior mass of one submodel.

    Equal mode returns 1 for every model.  Hierarchical mode multiplies a
    Bernoulli factor per main effect and, for each maximal-model interaction
    whose parents are both present, a Bernoulli factor for the interaction;
    pairs with an absent parent are impossible and contribute factor 1.
    """
    if prior.mode == "equal":
        return 1.0
    w = 1.0
    for f in range(1, maximal.n_factors + 1):
        p = prior.main_prob(f)
        w *= p if f in sub.mains else (1.0 - p)
    for pair in maximal.interactions:
        if pair[0] in sub.mains and pair[1] in sub.mains:
            p = prior.int_prob(pair)
            w *= p if pair in sub.interactions else (1.0 - p)
    return w


def weight_table_enumerated(
    submodels: list[Submodel],
    prior: PriorSpec,
    maximal: MaximalModel,
    n_runs: int,
) -> WeightTable:
    """Normalized weights by explicit lattice walk.

    Ineligible submodels get weight zero; eligible ones get their raw prior
    divided by gamma, the total eligible mass.  The pairwise table accumulates
    each model's weight over all ordinal pairs it covers.
    """
    raw = np.array(
        [model_prior(s, prior, maximal) if s.eligible else 0.0 for s in submodels]
    )
    gamma = float(raw.sum())
    n_eligible = sum(1 for s in submodels if s.eligible)
    if gamma <= 0.0:
        raise DegeneratePriorError(
            f"all {n_eligible} eligible submodels have zero prior mass"
        )
    p_s = raw / gamma
    v = maximal.n_effects
    pair = np.zeros((v + 1, v + 1))
    for sub, p in zip(submodels, p_s):
        if p == 0.0:
            continue
        idx = sub.ordinals(maximal)
        pair[np.ix_(idx, idx)] += p
    total = float(p_s.sum())
    if abs(total - 1.0) > _WEIGHT_SUM_TOL:
        raise ArithmeticError(f"weights sum to {total}, expected 1")
    return WeightTable(maximal, n_runs, pair, gamma, n_eligible, p_s)


def _class_mass(k: int, n_runs: int, pi1: float, pi2: float, r: int, t: int) -> float:
    """Total prior mass of eligible submodels containing r given mains and t
    given interactions (parents included in the r mains).

    Sums over (a, b) = (mains count, interaction count) with 1 + a + b <= N:
    the models containing the fixed effects with profile (a, b) number
    C(k-r, a-r) * C(C(a,2)-t, b-t), and each such model has prior
    pi1^a (1-pi1)^(k-a) pi2^b (1-pi2)^(C(a,2)-b).  Inner sums over b collapse
    to binomial pmf/cdf evaluations.
    """
    if r > k:
        return 0.0
    total = 0.0
    for a in range(r, k + 1):
        b_room = n_runs - 1 - a - t
        if b_room < 0:
            continue
        n2 = math.comb(a, 2) - t
        if n2 < 0:
            continue
        outer = binom.pmf(a - r, k - r, pi1)
        if outer == 0.0:
            continue
        inner = binom.cdf(min(b_room, n2), n2, pi2) if n2 > 0 else 1.0
        total += outer * inner
    return (pi1 ** r) * (pi2 ** t if t else 1.0) * total


def _equal_class_mass(k: int, n_runs: int, r: int, t: int) -> float:
    """Equal-weight analogue of _class_mass: counts eligible models."""
    if r > k:
        return 0.0
    total = 0
    for a in range(r, k + 1):
        b_room = n_runs - 1 - a - t
        if b_room < 0:
            continue
        n2 = math.comb(a, 2) - t
        if n2 < 0:
            continue
        c_out = math.comb(k - r, a - r)
        total += c_out * sum(math.comb(n2, u) for u in range(0, min(b_room, n2) + 1))
    return float(total)


def weight_table_exchangeable(
    n_factors: int,
    pi_main: float | None,
    pi_int: float | None,
    n_runs: int,
    mode: str = "hierarchical",
) -> WeightTable:
    """Closed-form weight table for symmetric priors over the full
    second-order maximal model.

    Exchangeability across factors means p_pair[i][j] depends only on the
    kinds of i and j and how they share factors; the six distinct classes are
    filled from conditioned binomial sums without enumerating the lattice.
    ``mode="equal"`` computes the equal-weight table the same way (counting
    instead of weighing).  Use the enumerated engine for asymmetric priors or
    partial interaction sets.
    """
    k = n_factors
    if mode == "hierarchical":
        if pi_main is None or pi_int is None:
            raise ValueError("hierarchical mode requires pi_main and pi_int")
        if pi_int > 0 and k < 2:
            raise ValueError("interaction probability given for k < 2")

        def mass(r, t):
            return _class_mass(k, n_runs, pi_main, pi_int, r, t)

    elif mode == "equal":

        def mass(r, t):
            return _equal_class_mass(k, n_runs, r, t)

    else:
        raise ValueError(f"unknown mode {mode!r}")

    maximal = MaximalModel.full_second_order(k)
    gamma = mass(0, 0)
    if gamma <= 0.0:
        raise DegeneratePriorError("no eligible submodel has positive prior mass")
    xi10 = mass(1, 0) / gamma
    xi20 = mass(2, 0) / gamma
    xi21 = mass(2, 1) / gamma
    xi31 = mass(3, 1) / gamma
    xi32 = mass(3, 2) / gamma
    xi42 = mass(4, 2) / gamma

    v = maximal.n_effects
    pair = np.zeros((v + 1, v + 1))
    pair[0, 0] = 1.0
    for f in range(1, k + 1):
        pair[0, f] = pair[f, 0] = pair[f, f] = xi10
    for f, g in itertools.combinations(range(1, k + 1), 2):
        pair[f, g] = pair[g, f] = xi20
    for p in maximal.interactions:
        i = maximal.interaction_ordinal(p)
        pair[0, i] = pair[i, 0] = pair[i, i] = xi21
        for f in range(1, k + 1):
            pair[f, i] = pair[i, f] = xi21 if f in p else xi31
    for pa, pb in itertools.combinations(maximal.interactions, 2):
        i, j = maximal.interaction_ordinal(pa), maximal.interaction_ordinal(pb)
        shared = len(set(pa) & set(pb))
        pair[i, j] = pair[j, i] = xi32 if shared == 1 else xi42

    eligible = int(round(_equal_class_mass(k, n_runs, 0, 0)))
    return WeightTable(maximal, n_runs, pair, gamma, eligible, None)


def weight_table(
    maximal: MaximalModel,
    prior: PriorSpec,
    n_runs: int,
    engine: str = "auto",
) -> WeightTable:
    """Build a weight table, choosing the engine when ``engine="auto"``.

    Enumeration is preferred (it also yields per-model weights, needed by the
    exact criteria); when the lattice is too large and the prior is symmetric
    over a full second-order model, the closed-form engine takes over.
    """
    if engine not in ("auto", "enumerated", "exchangeable"):
        raise ValueError(f"unknown engine {engine!r}")
    can_exchange = maximal.is_full_second_order and prior.is_symmetric
    if engine == "exchangeable" or (
        engine == "auto" and can_exchange and count_submodels(maximal) > ENUMERATION_CAP
    ):
        if not can_exchange:
            raise ValueError("exchangeable engine requires a symmetric prior and a full second-order model")
        if prior.mode == "equal":
            return weight_table_exchangeable(maximal.n_factors, None, None, n_runs, mode="equal")
        return weight_table_exchangeable(
            maximal.n_factors, prior.main_prob(1), prior.int_prob((1, 2)) if maximal.n_factors >= 2 else 0.0,
            n_runs,
        )
    subs = enumerate_submodels(maximal, n_runs)
    return weight_table_enumerated(subs, prior, maximal, n_runs)
