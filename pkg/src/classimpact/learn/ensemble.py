"""Bootstrap ensembles of decision trees."""

import math

import numpy as np

from .tree import DecisionTree


class _Voting:
    def __init__(self, n_trees, seed):
        self.n_trees = n_trees
        self.seed = seed
        self.trees = []

    def _make_tree(self, d, seed):
        raise NotImplementedError

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        n, d = X.shape
        seeds = np.random.SeedSequence(self.seed).spawn(self.n_trees)
        self.trees = []
        for ss in seeds:
            rng = np.random.default_rng(ss)
            idx = rng.integers(0, n, size=n)
            tree = self._make_tree(d, int(rng.integers(0, 2**31 - 1)))
            self.trees.append(tree.fit(X[idx], y[idx]))
        return self

    def predict_proba(self, X):
        """Fraction of member trees voting "impacted"."""
        votes = np.zeros(len(X))
        for tree in self.trees:
            votes += tree.predict(X)
        return votes / len(self.trees)

    def predict(self, X):
        # strict majority: an even split of votes goes to the negative class
        return self.predict_proba(X) > 0.5


class RandomForest(_Voting):
    """Unpruned information-gain trees, floor(sqrt(d)) candidate features per split."""

    def __init__(self, n_trees=100, seed=1, min_leaf=1):
        super().__init__(n_trees, seed)
        self.min_leaf = min_leaf

    def _make_tree(self, d, seed):
        k = max(1, int(math.isqrt(d)))
        return DecisionTree(min_leaf=self.min_leaf, criterion="gain", prune=False, max_features=k, seed=seed)


class Bagging(_Voting):
    def __init__(self, n_trees=10, seed=1, min_leaf=2):
        super().__init__(n_trees, seed)
        self.min_leaf = min_leaf

    def _make_tree(self, d, seed):
        return DecisionTree(min_leaf=self.min_leaf, criterion="gain_ratio", prune=False, seed=seed)
