import numpy as np

LOG_2PI = np.log(2 * np.pi)


class GaussianNaiveBayes:
    """Per-class, per-feature normal densities with maximum-likelihood variance.

    Each variance is floored at ``1e-9 * range**2`` of the feature; a feature
    that is constant over the training data carries no information and is
    ignored.  Missing values (NaN) skip that feature's likelihood term.
    """

    var_floor = 1e-9

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=bool)
        self.classes = (False, True)
        counts = np.array([(~y).sum(), y.sum()], dtype=float)
        self.log_prior = np.log(counts / counts.sum())
        rng = X.max(axis=0) - X.min(axis=0) if len(X) else np.zeros(X.shape[1])
        self.active = rng > 0
        floor = self.var_floor * rng ** 2
        self.mean = np.vstack([X[~y].mean(axis=0), X[y].mean(axis=0)])
        var = np.vstack([X[~y].var(axis=0), X[y].var(axis=0)])
        self.var = np.maximum(var, floor)
        self.var[:, ~self.active] = 1.0
        return self

    def log_joint(self, X):
        X = np.asarray(X, dtype=float)
        out = np.tile(self.log_prior, (len(X), 1))
        for c in (0, 1):
            z = -0.5 * (LOG_2PI + np.log(self.var[c]) + (X - self.mean[c]) ** 2 / self.var[c])
            z[:, ~self.active] = 0.0
            out[:, c] += np.nansum(z, axis=1)
        return out

    def predict_proba(self, X):
        lj = self.log_joint(X)
        lj -= lj.max(axis=1, keepdims=True)
        p = np.exp(lj)
        return p[:, 1] / p.sum(axis=1)

    def predict(self, X):
        return self.predict_proba(X) > 0.5
