"""Information gain ratio of a feature with respect to the impacted label."""

from __future__ import annotations

import numpy as np


def equal_frequency_bins(x, bins: int = 10) -> np.ndarray:
    """Bin index per value: floor(#values strictly below v * bins / n).

    Equal values always share a bin and at most ``bins`` categories appear.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    below = np.searchsorted(np.sort(x), x, side="left")
    return (below * bins) // n


def _entropy(counts):
    counts = np.asarray(counts, dtype=float)
    counts = counts[counts > 0]
    if counts.size == 0:
        return 0.0
    p = counts / counts.sum()
    return float(-(p * np.log2(p)).sum())


def gain_ratio(categories, labels) -> float:
    """IG / IV of a categorical attribute; 0 when the intrinsic value is 0."""
    categories = np.asarray(categories)
    labels = np.asarray(labels, dtype=bool)
    n = len(labels)
    if n == 0:
        return 0.0
    h = _entropy([labels.sum(), n - labels.sum()])
    cond = 0.0
    sizes = []
    for v in np.unique(categories):
        sel = labels[categories == v]
        sizes.append(len(sel))
        cond += len(sel) / n * _entropy([sel.sum(), len(sel) - sel.sum()])
    iv = _entropy(sizes)
    if iv <= 0:
        return 0.0
    return max(0.0, min(1.0, (h - cond) / iv))


def igr_values(x, y, bins: int = 10) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=bool)
    keep = ~np.isnan(x)
    return gain_ratio(equal_frequency_bins(x[keep], bins), y[keep])


def igr(matrix, feature_name: str, bins: int = 10) -> float:
    j = matrix.feature_names.index(feature_name)
    return igr_values(matrix.X[:, j], matrix.y, bins)


def igr_rank(matrix, bins: int = 10) -> list[tuple[str, float, int]]:
    """(feature, IGR, rank) sorted by descending IGR, ties by feature name."""
    scores = [(f, igr(matrix, f, bins)) for f in matrix.feature_names]
    scores.sort(key=lambda t: (-t[1], t[0]))
    return [(f, s, i + 1) for i, (f, s) in enumerate(scores)]
