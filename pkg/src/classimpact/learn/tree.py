"""Binary decision tree over numeric features.

Splits are ``x[f] <= threshold`` with the threshold at the midpoint between
adjacent distinct training values; each feature proposes its best-gain
threshold.  ``criterion="gain_ratio"`` follows C4.5: among features whose gain
reaches the average proposed gain, the highest gain ratio wins.
``criterion="gain"`` takes the highest gain and is what the random forest uses.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import norm


def _entropy2(pos, n):
    """Binary entropy in bits of counts arrays (pos of n)."""
    pos = np.asarray(pos, dtype=float)
    n = np.asarray(n, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(n > 0, pos / n, 0.0)
        q = 1.0 - p
        h = -(np.where(p > 0, p * np.log2(p), 0.0) + np.where(q > 0, q * np.log2(q), 0.0))
    return h


class Node:
    __slots__ = ("feature", "threshold", "left", "right", "n", "pos", "majority_left")

    def __init__(self, n, pos):
        self.n = n
        self.pos = pos
        self.feature = None
        self.threshold = None
        self.left = None
        self.right = None
        self.majority_left = True

    @property
    def is_leaf(self):
        return self.feature is None

    @property
    def prob(self):
        return self.pos / self.n if self.n else 0.0

    @property
    def errors(self):
        return min(self.pos, self.n - self.pos)

    def make_leaf(self):
        self.feature = self.threshold = self.left = self.right = None


def best_split(x, y, min_leaf=1):
    """Best information-gain threshold on one feature column.

    Returns (gain, gain_ratio, threshold), or None when no threshold leaves
    ``min_leaf`` rows on both sides or the gain is zero.  Ties go to the lowest
    threshold.
    """
    n = len(x)
    if n < 2 * min_leaf:
        return None
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    cum_pos = np.cumsum(ys)
    total_pos = cum_pos[-1]
    left_n = np.arange(1, n)
    valid = xs[1:] > xs[:-1]
    valid &= (left_n >= min_leaf) & (n - left_n >= min_leaf)
    if not valid.any():
        return None
    ln = left_n[valid].astype(float)
    lp = cum_pos[:-1][valid].astype(float)
    rn = n - ln
    rp = total_pos - lp
    h = _entropy2(total_pos, n)
    gain = h - (ln / n) * _entropy2(lp, ln) - (rn / n) * _entropy2(rp, rn)
    i = int(np.argmax(gain))
    if gain[i] <= 1e-12:
        return None
    threshold = (xs[:-1][valid][i] + xs[1:][valid][i]) / 2.0
    split_info = float(_entropy2(ln[i], n))
    return float(gain[i]), float(gain[i] / split_info), float(threshold)


class DecisionTree:
    def __init__(self, min_leaf=2, criterion="gain_ratio", confidence=0.25, prune=True,
                 max_features=None, max_depth=None, seed=0):
        if criterion not in ("gain_ratio", "gain"):
            raise ValueError(f"unknown criterion {criterion!r}")
        if prune and not 0 < confidence <= 0.5:
            raise ValueError("confidence must be in (0, 0.5]")
        self.min_leaf = min_leaf
        self.criterion = criterion
        self.confidence = confidence
        self.prune = prune
        self.max_features = max_features
        self.max_depth = max_depth
        self.seed = seed
        self._z = norm.ppf(1 - confidence) if prune else None
        self.root = None
        self.n_features = 0

    # -------------------------------------------------------------- growing

    def _choose(self, X, y, features):
        cands = []
        for f in features:
            res = best_split(X[:, f], y, self.min_leaf)
            if res is not None:
                cands.append((res[0], res[1], int(f), res[2]))
        if not cands:
            return None
        if self.criterion == "gain":
            best = max(cands, key=lambda c: (c[0], -c[2]))
        else:
            avg_gain = sum(c[0] for c in cands) / len(cands)
            eligible = [c for c in cands if c[0] + 1e-12 >= avg_gain]
            best = max(eligible, key=lambda c: (c[1], -c[2]))
        return best[2], best[3]

    def _grow(self, X, y, idx, depth, rng):
        node = Node(len(idx), int(y[idx].sum()))
        if node.pos in (0, node.n) or node.n < 2 * self.min_leaf:
            return node
        if self.max_depth is not None and depth >= self.max_depth:
            return node
        d = X.shape[1]
        if self.max_features and self.max_features < d:
            features = np.sort(rng.choice(d, size=self.max_features, replace=False))
        else:
            features = range(d)
        choice = self._choose(X[idx], y[idx], features)
        if choice is None:
            return node
        f, t = choice
        go_left = X[idx, f] <= t
        node.feature, node.threshold = int(f), float(t)
        node.left = self._grow(X, y, idx[go_left], depth + 1, rng)
        node.right = self._grow(X, y, idx[~go_left], depth + 1, rng)
        node.majority_left = node.left.n >= node.right.n
        return node

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        self.n_features = X.shape[1]
        rng = np.random.default_rng(self.seed)
        self.root = self._grow(X, y, np.arange(len(y)), 0, rng)
        if self.prune:
            self._prune(self.root)
        return self

    # -------------------------------------------------------------- pruning

    def _added_errors(self, n, e):
        """Pessimistic extra errors for a leaf (upper confidence limit of the binomial)."""
        cf = self.confidence
        if e < 1:
            base = n * (1 - cf ** (1.0 / n))
            if e == 0:
                return base
            return base + e * (self._added_errors(n, 1) - base)
        if e + 0.5 >= n:
            return max(n - e, 0.0)
        z = self._z
        f = (e + 0.5) / n
        r = (f + z * z / (2 * n) + z * math.sqrt(f / n - f * f / n + z * z / (4 * n * n))) / (1 + z * z / n)
        return r * n - e

    def _leaf_estimate(self, node):
        return node.errors + self._added_errors(node.n, node.errors)

    def _prune(self, node):
        """Bottom-up subtree replacement; returns the estimated errors of the (pruned) subtree."""
        if node.is_leaf:
            return self._leaf_estimate(node)
        subtree = self._prune(node.left) + self._prune(node.right)
        as_leaf = self._leaf_estimate(node)
        if as_leaf <= subtree + 0.1:
            node.make_leaf()
            return as_leaf
        return subtree

    # -------------------------------------------------------------- prediction

    def predict_proba(self, X):
        X = np.asarray(X, dtype=float)
        out = np.empty(len(X))
        self._route(self.root, X, np.arange(len(X)), out)
        return out

    def _route(self, node, X, idx, out):
        if len(idx) == 0:
            return
        if node.is_leaf:
            out[idx] = node.prob
            return
        x = X[idx, node.feature]
        missing = np.isnan(x)
        left = (x <= node.threshold) & ~missing
        if node.majority_left:
            left |= missing
        self._route(node.left, X, idx[left], out)
        self._route(node.right, X, idx[~left], out)

    def predict(self, X):
        return self.predict_proba(X) > 0.5

    # -------------------------------------------------------------- inspection

    def depth(self, node=None):
        node = node or self.root
        if node.is_leaf:
            return 0
        return 1 + max(self.depth(node.left), self.depth(node.right))

    def leaves(self, node=None):
        node = node or self.root
        if node.is_leaf:
            return 1
        return self.leaves(node.left) + self.leaves(node.right)

    def used_features(self):
        out = set()
        stack = [self.root]
        while stack:
            node = stack.pop()
            if not node.is_leaf:
                out.add(node.feature)
                stack += [node.left, node.right]
        return out
