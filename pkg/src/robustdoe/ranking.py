"""Rank vectors with shared ties and their correlation."""

import numpy as np
from scipy.stats import rankdata


def rank_min_ties(values, decimals: int | None = None) -> np.ndarray:
    """Ranks with ties sharing the minimum rank (1 = best/smallest).

    ``decimals`` ranks the values rounded to that many places, matching how
    published tables rank at display precision; None ranks full precision.
    """
    v = np.asarray(values, dtype=np.float64)
    if decimals is not None:
        v = np.round(v, decimals)
    return rankdata(v, method="min").astype(int)


def rank_correlation(r1, r2) -> float:
    """Pearson correlation of two rank vectors.

    Two constant vectors correlate perfectly by convention (they induce the
    same trivial ordering); one constant vector against a non-constant one
    yields 0.
    """
    a = np.asarray(r1, dtype=np.float64)
    b = np.asarray(r2, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("rank vectors must have equal length")
    va = a.var()
    vb = b.var()
    if va == 0.0 and vb == 0.0:
        return 1.0
    if va == 0.0 or vb == 0.0:
        return 0.0
    return float(np.corrcoef(a, b)[0, 1])
