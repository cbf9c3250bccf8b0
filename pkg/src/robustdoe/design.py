"""Two-level designs and their aberration statistics.

A design is an N x m matrix over {-1, +1}: one row per run, one column per
factor.  Factors are addressed 1-based throughout the public API, matching the
column numbering used in printed design catalogs.

The aberration statistics implemented here are built on column-product sums:
for a factor subset w, the J-characteristic is the absolute value of the
row sum of the elementwise product of the columns in w.  Squaring and
normalizing by the run count and summing over subsets of size l gives the
generalized word count b_l; the vector (b_1, ..., b_m) is the generalized
wordlength pattern (GWLP).  Generalized minimum aberration (GMA) orders
designs by sequentially minimizing b_1, b_2, ...
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DesignDimensionError, DesignFormatError

# GWLP entries of +-1 designs are rationals with denominator N^2, so true ties
# are exact; the tolerance only absorbs double rounding.
GMA_TIE_TOL = 1e-9

# Full-length GWLPs enumerate 2^m subsets; beyond this many factors callers
# must request a bounded order.
FULL_GWLP_MAX_FACTORS = 16

DEFAULT_GWLP_ORDER = 4


@dataclass(frozen=True, eq=False)
class Design:
    """An N x m two-level design with entries in {-1, +1}.

    Immutable after construction (the entry array is frozen), so instances are
    safe to share across threads.  Level balance is a queryable property, not
    an invariant: odd-run designs are at best near-balanced.
    """

    entries: np.ndarray
    label: str = ""

    def __eq__(self, other):
        if not isinstance(other, Design):
            return NotImplemented
        return (self.label == other.label
                and self.entries.shape == other.entries.shape
                and bool(np.array_equal(self.entries, other.entries)))

    def __hash__(self):
        return hash((self.label, self.entries.shape, self.entries.tobytes()))

    def __post_init__(self):
        a = np.asarray(self.entries)
        if a.ndim != 2:
            raise ValueError(f"design entries must be 2-dimensional, got shape {a.shape}")
        if a.shape[0] < 2 or a.shape[1] < 1:
            raise ValueError(f"design must have at least 2 runs and 1 factor, got {a.shape}")
        if not np.isin(a, (-1, 1)).all():
            raise ValueError("design entries must all be -1 or +1")
        a = np.ascontiguousarray(a, dtype=np.int8)
        a.flags.writeable = False
        object.__setattr__(self, "entries", a)

    @property
    def runs(self) -> int:
        return self.entries.shape[0]

    @property
    def factors(self) -> int:
        return self.entries.shape[1]

    def column(self, factor: int) -> np.ndarray:
        """Return the column of a 1-based factor index."""
        if not 1 <= factor <= self.factors:
            raise ValueError(f"factor {factor} out of range 1..{self.factors}")
        return self.entries[:, factor - 1]

    def is_level_balanced(self) -> bool:
        """True when every column sum is 0 (even N) or +-1 (odd N)."""
        sums = np.abs(self.entries.sum(axis=0, dtype=np.int64))
        return bool((sums <= self.runs % 2).all())

    def relabel(self, label: str) -> "Design":
        return Design(self.entries, label)

    def __repr__(self):
        tag = f" {self.label!r}" if self.label else ""
        return f"Design({self.runs}x{self.factors}{tag})"


@dataclass(frozen=True)
class Gwlp:
    """Generalized wordlength pattern prefix (b_1, ..., b_order).

    ``b[l-1]`` holds b_l; b_0 equals the run count by definition and is not
    stored.  ``order`` may be smaller than ``factors`` when the pattern was
    computed up to a bounded word length.
    """

    b: tuple[float, ...]
    runs: int
    factors: int

    @property
    def order(self) -> int:
        return len(self.b)

    def __getitem__(self, l: int) -> float:
        """b_l for l in 0..order (b_0 = run count)."""
        if l == 0:
            return float(self.runs)
        if not 1 <= l <= self.order:
            raise IndexError(f"b_{l} not computed (order {self.order})")
        return self.b[l - 1]


_MINUS_CHARS = str.maketrans({"−": "-", ",": " "})


def parse_design(text: str, label: str = "") -> Design:
    """Parse design text: one run per line, comma or whitespace separated.

    Tokens must be ``1``/``+1`` or ``-1`` (ASCII or U+2212 minus).  Lines that
    are empty or start with ``#`` are skipped.  Raises DesignFormatError for a
    bad token (naming its 1-based row and column) and DesignDimensionError for
    ragged rows.
    """
    rows = []
    for raw in text.splitlines():
        line = raw.translate(_MINUS_CHARS).strip()
        if not line or line.startswith("#"):
            continue
        row = []
        for col, tok in enumerate(line.split(), start=1):
            if tok in ("1", "+1"):
                row.append(1)
            elif tok == "-1":
                row.append(-1)
            else:
                raise DesignFormatError(
                    f"invalid token {tok!r} at row {len(rows) + 1}, column {col}: "
                    "expected -1 or +1"
                )
        rows.append(row)
    if not rows:
        raise DesignFormatError("no design rows found")
    width = len(rows[0])
    for i, row in enumerate(rows, start=1):
        if len(row) != width:
            raise DesignDimensionError(
                f"row {i} has {len(row)} entries, expected {width}"
            )
    return Design(np.array(rows, dtype=np.int8), label)


def load_design(path, label: str | None = None) -> Design:
    """Read a design from a text file; the label defaults to the file stem."""
    import pathlib

    p = pathlib.Path(path)
    return parse_design(p.read_text(encoding="utf-8"), label if label is not None else p.stem)


def design_to_text(design: Design) -> str:
    return "\n".join(" ".join(f"{v:2d}" for v in row) for row in design.entries) + "\n"


def _check_factor_subset(cols, m: int, allow_empty: bool = False):
    cols = [int(c) for c in cols]
    if not cols and not allow_empty:
        raise ValueError("factor subset must be nonempty")
    seen = set()
    for c in cols:
        if not 1 <= c <= m:
            raise ValueError(f"factor {c} out of range 1..{m}")
        if c in seen:
            raise ValueError(f"duplicate factor {c}")
        seen.add(c)
    return cols


def project(design: Design, cols) -> Design:
    """Select the given 1-based columns, in order, as a new design."""
    cols = _check_factor_subset(cols, design.factors)
    sub = design.entries[:, [c - 1 for c in cols]]
    label = design.label and f"{design.label}[{','.join(map(str, cols))}]"
    return Design(sub, label)


def model_matrix(design: Design, model) -> np.ndarray:
    """Model matrix for a maximal model or submodel.

    Column 0 is all ones, followed by the model's main-effect columns and then
    its two-factor-interaction columns (elementwise products), in the model's
    term order.  Raises ValueError when the model references a factor the
    design does not have.
    """
    terms = model.terms()
    n = design.runs
    out = np.empty((n, len(terms)), dtype=np.float64)
    ent = design.entries
    for j, term in enumerate(terms):
        if term[0] == "intercept":
            out[:, j] = 1.0
        elif term[0] == "main":
            f = term[1]
            if not 1 <= f <= design.factors:
                raise ValueError(f"model references factor {f}, design has {design.factors}")
            out[:, j] = ent[:, f - 1]
        else:
            f, g = term[1], term[2]
            for x in (f, g):
                if not 1 <= x <= design.factors:
                    raise ValueError(f"model references factor {x}, design has {design.factors}")
            out[:, j] = ent[:, f - 1] * ent[:, g - 1]
    return out


def j_characteristic(design: Design, factors) -> int:
    """J_l(w): absolute row sum of the product of the columns in w.

    Integer-valued for two-level designs.  The empty subset is rejected; the
    l=0 word is the constant run count and never goes through this function.
    """
    cols = _check_factor_subset(factors, design.factors)
    prod = design.entries[:, [c - 1 for c in cols]].prod(axis=1, dtype=np.int64)
    return int(abs(prod.sum()))


def _signed_subset_sums(entries: np.ndarray, order: int) -> list[np.ndarray]:
    """Signed column-product row sums for every subset of size 1..order.

    Returns one int64 vector per size l, indexed by the position of the subset
    in itertools.combinations order.  Products are built incrementally, size
    l from size l-1, so the cost is O(sum_l C(m,l) * N).
    """
    n, m = entries.shape
    ent = entries.astype(np.int64)
    sums: list[np.ndarray] = []
    prev: dict[tuple[int, ...], np.ndarray] = {(): np.ones(n, dtype=np.int64)}
    for l in range(1, order + 1):
        cur: dict[tuple[int, ...], np.ndarray] = {}
        vals = np.empty(math.comb(m, l), dtype=np.int64)
        for idx, w in enumerate(itertools.combinations(range(m), l)):
            prod = prev[w[:-1]] * ent[:, w[-1]]
            cur[w] = prod
            vals[idx] = prod.sum()
        sums.append(vals)
        prev = cur
    return sums


def gwlp(design: Design, max_order: int | None = None) -> Gwlp:
    """Generalized wordlength pattern (b_1, ..., b_order).

    b_l sums [J_l(w)/N]^2 over all l-subsets of factors.  With ``max_order``
    unset, the full pattern is computed for designs of up to
    ``FULL_GWLP_MAX_FACTORS`` factors; wider designs default to order
    ``DEFAULT_GWLP_ORDER``, which is all the downstream criteria need.
    Column inner sums are exact integers, so each b_l carries only one final
    rounding.
    """
    m = design.factors
    if max_order is None:
        order = m if m <= FULL_GWLP_MAX_FACTORS else min(DEFAULT_GWLP_ORDER, m)
    else:
        if max_order < 1:
            raise ValueError("max_order must be >= 1")
        order = min(max_order, m)
    n2 = design.runs * design.runs
    sums = _signed_subset_sums(design.entries, order)
    b = tuple(float((vals.astype(np.float64) ** 2).sum() / n2) for vals in sums)
    return Gwlp(b, design.runs, m)


def gma_compare(w1: Gwlp, w2: Gwlp) -> int:
    """Lexicographic GMA comparison of two wordlength patterns.

    Returns -1 when the first pattern is better (smaller on the first entry
    that differs by more than GMA_TIE_TOL), +1 when worse, 0 when tied.
    """
    if w1.factors != w2.factors or w1.order != w2.order:
        raise ValueError(
            f"patterns not comparable: {w1.factors}/{w1.order} vs {w2.factors}/{w2.order}"
        )
    for x, y in zip(w1.b, w2.b):
        if abs(x - y) > GMA_TIE_TOL:
            return -1 if x < y else 1
    return 0


def e_s2(design: Design) -> float:
    """Mean squared off-diagonal Gram entry, sum a_ij^2 / C(m,2) over i<j.

    The standard supersaturated-design criterion; equals N^2 b_2 / C(m,2)
    exactly.  Inner products are computed as integers.
    """
    m = design.factors
    if m < 2:
        raise ValueError("e_s2 requires at least 2 factors")
    ent = design.entries.astype(np.int64)
    gram = ent.T @ ent
    iu = np.triu_indices(m, k=1)
    return float((gram[iu].astype(np.float64) ** 2).sum() / math.comb(m, 2))
