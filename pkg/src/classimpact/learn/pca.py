"""Principal component projection retaining a fraction of the variance."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)


@dataclass
class PCAProjection:
    mean: np.ndarray
    components: np.ndarray  # d x k, orthonormal columns
    eigenvalues: np.ndarray  # kept, descending
    total_variance: float
    degenerate: bool = False

    @property
    def n_components(self):
        return self.components.shape[1]

    @property
    def explained_fraction(self):
        return float(self.eigenvalues.sum() / self.total_variance) if self.total_variance > 0 else 1.0

    def transform(self, X):
        X = np.asarray(X, dtype=float)
        # missing values are read as the training mean (zero after centring)
        Z = np.where(np.isnan(X), 0.0, X - self.mean)
        return Z @ self.components

    def apply(self, matrix):
        from ..dataset import FeatureMatrix

        names = tuple(f"PC{i + 1}" for i in range(self.n_components))
        return FeatureMatrix(names, list(matrix.keys), list(matrix.classes), matrix.order.copy(),
                             self.transform(matrix.X), matrix.y.copy(), matrix.horizon.copy())


def fit_pca(X, variance: float = 0.95, eig_tol: float = 1e-10) -> PCAProjection:
    X = np.asarray(X, dtype=float)
    if not 0 < variance <= 1:
        raise ValueError("variance fraction must be in (0, 1]")
    if np.isnan(X).any():
        raise ValueError("PCA input must not contain missing values")
    n, d = X.shape
    mean = X.mean(axis=0) if n else np.zeros(d)
    if n < 2 or d == 0:
        return PCAProjection(mean, np.zeros((d, 0)), np.zeros(0), 0.0, True)
    cov = np.cov(X - mean, rowvar=False).reshape(d, d)
    vals, vecs = np.linalg.eigh(cov)
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    total = float(vals[vals > 0].sum())
    scale = max(total, 1.0)
    positive = vals > eig_tol * scale
    degenerate = not positive.all()
    if degenerate:
        log.warning("covariance is rank-deficient: dropping %d zero eigenvalue(s)", int((~positive).sum()))
    vals, vecs = vals[positive], vecs[:, positive]
    if total <= 0 or len(vals) == 0:
        return PCAProjection(mean, np.zeros((d, 0)), np.zeros(0), 0.0, True)
    # fix each component's sign so the largest-magnitude loading is positive
    for j in range(vecs.shape[1]):
        if vecs[np.argmax(np.abs(vecs[:, j])), j] < 0:
            vecs[:, j] = -vecs[:, j]
    cum = np.cumsum(vals) / total
    k = int(np.searchsorted(cum, variance - 1e-12) + 1)
    k = min(k, len(vals))
    return PCAProjection(mean, vecs[:, :k], vals[:k], total, degenerate)


def pca_reduce(matrix, variance: float = 0.95):
    """(transformed matrix, projection) for a FeatureMatrix without missing values."""
    proj = fit_pca(matrix.X, variance)
    return proj.apply(matrix), proj
