import numpy as np
from scipy.special import expit


class RidgeLogistic:
    """Binary logistic regression with an L2 (ridge) penalty, fitted by IRLS.

    Features are standardised with training statistics; the intercept is not
    penalised.  Minimises ``-loglik + ridge * ||w||^2``.  Missing values at
    prediction time are replaced by the training mean.
    """

    def __init__(self, ridge=1e-8, max_iter=100, tol=1e-8):
        self.ridge = ridge
        self.max_iter = max_iter
        self.tol = tol

    def _design(self, X):
        Z = (np.asarray(X, dtype=float) - self.center) / self.scale
        Z = np.where(np.isnan(Z), 0.0, Z)
        return np.hstack([np.ones((len(Z), 1)), Z])

    def _loss(self, A, y, beta):
        eta = A @ beta
        # log(1 + e^eta) - y*eta, computed stably
        nll = np.sum(np.logaddexp(0.0, eta) - y * eta)
        return nll + self.ridge * np.sum(beta[1:] ** 2)

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        self.center = X.mean(axis=0)
        sd = X.std(axis=0)
        self.scale = np.where(sd > 0, sd, 1.0)
        A = self._design(X)
        d = A.shape[1]
        penalty = np.full(d, 2 * self.ridge)
        penalty[0] = 0.0
        beta = np.zeros(d)
        loss = self._loss(A, y, beta)
        self.n_iter = 0
        for it in range(1, self.max_iter + 1):
            p = expit(A @ beta)
            w = p * (1 - p)
            grad = A.T @ (y - p) - penalty * beta
            H = (A * w[:, None]).T @ A + np.diag(penalty)
            try:
                step = np.linalg.solve(H, grad)
            except np.linalg.LinAlgError:
                step = np.linalg.lstsq(H, grad, rcond=None)[0]
            if not np.all(np.isfinite(step)):
                break
            # step halving keeps the objective monotone near separation
            t = 1.0
            while True:
                cand = beta + t * step
                new_loss = self._loss(A, y, cand)
                if new_loss <= loss or t < 1e-10:
                    break
                t *= 0.5
            self.n_iter = it
            improvement = loss - new_loss
            if new_loss <= loss:
                beta, loss = cand, new_loss
            if improvement < self.tol:
                break
        self.beta = beta
        self.loss = loss
        return self

    def predict_proba(self, X):
        return expit(self._design(X) @ self.beta)

    def predict(self, X):
        return self.predict_proba(X) > 0.5
