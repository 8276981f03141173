"""Learner specifications, training and prediction behind one interface."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import FeatureMismatch, NonFiniteFeature, SingleClassTraining
from .bayes import GaussianNaiveBayes
from .ensemble import Bagging, RandomForest
from .logistic import RidgeLogistic
from .tree import DecisionTree

KINDS = ("DecisionTree", "RandomForest", "NaiveBayes", "Logistic", "Bagging")

DEFAULT_PARAMS = {
    "DecisionTree": {"confidence": 0.25, "min_leaf": 2},
    "RandomForest": {"trees": 100},
    "NaiveBayes": {},
    "Logistic": {"ridge": 1e-8, "max_iter": 100, "tol": 1e-8},
    "Bagging": {"iterations": 10, "min_leaf": 2},
}

_ALIASES = {
    "dt": "DecisionTree", "j48": "DecisionTree", "tree": "DecisionTree", "decisiontree": "DecisionTree",
    "rf": "RandomForest", "randomforest": "RandomForest",
    "nb": "NaiveBayes", "naivebayes": "NaiveBayes",
    "lr": "Logistic", "logistic": "Logistic",
    "bagging": "Bagging",
}


def canonical_kind(name: str) -> str:
    key = name.replace("_", "").replace("-", "").lower()
    if key not in _ALIASES:
        raise ValueError(f"unknown learner {name!r}; choose from {', '.join(KINDS)}")
    return _ALIASES[key]


@dataclass(frozen=True)
class LearnerSpec:
    kind: str = "DecisionTree"
    params: dict = field(default_factory=dict)
    seed: int = 1

    def __post_init__(self):
        kind = canonical_kind(self.kind)
        object.__setattr__(self, "kind", kind)
        unknown = set(self.params) - set(DEFAULT_PARAMS[kind])
        if unknown:
            raise ValueError(f"{kind} does not accept parameter(s) {sorted(unknown)}")
        merged = {**DEFAULT_PARAMS[kind], **self.params}
        p = merged
        if kind == "DecisionTree" and not (0 < p["confidence"] <= 0.5 and p["min_leaf"] >= 1):
            raise ValueError("DecisionTree needs 0 < confidence <= 0.5 and min_leaf >= 1")
        if kind == "RandomForest" and p["trees"] < 1:
            raise ValueError("RandomForest needs trees >= 1")
        if kind == "Bagging" and (p["iterations"] < 1 or p["min_leaf"] < 1):
            raise ValueError("Bagging needs iterations >= 1 and min_leaf >= 1")
        if kind == "Logistic" and (p["ridge"] < 0 or p["max_iter"] < 1):
            raise ValueError("Logistic needs ridge >= 0 and max_iter >= 1")
        object.__setattr__(self, "params", merged)

    def with_seed(self, seed: int) -> "LearnerSpec":
        return LearnerSpec(self.kind, dict(self.params), seed)

    def build(self):
        p = self.params
        if self.kind == "DecisionTree":
            return DecisionTree(min_leaf=p["min_leaf"], confidence=p["confidence"], seed=self.seed)
        if self.kind == "RandomForest":
            return RandomForest(n_trees=p["trees"], seed=self.seed)
        if self.kind == "NaiveBayes":
            return GaussianNaiveBayes()
        if self.kind == "Logistic":
            return RidgeLogistic(ridge=p["ridge"], max_iter=p["max_iter"], tol=p["tol"])
        return Bagging(n_trees=p["iterations"], seed=self.seed, min_leaf=p["min_leaf"])


class _Constant:
    """Fallback for an empty feature set: predicts the majority label, ties -> negative."""

    def fit(self, X, y):
        self.p = float(np.mean(y)) if len(y) else 0.0
        return self

    def predict_proba(self, X):
        return np.full(len(X), self.p)

    def predict(self, X):
        return self.predict_proba(X) > 0.5


@dataclass
class TrainedModel:
    spec: LearnerSpec
    feature_names: tuple[str, ...]
    estimator: object
    meta: dict = field(default_factory=dict)

    @property
    def kind(self):
        return self.spec.kind


def train(spec: LearnerSpec, matrix) -> TrainedModel:
    X, y = matrix.X, matrix.y
    if len(y) < 2:
        raise SingleClassTraining("need at least two training rows")
    if y.all() or not y.any():
        raise SingleClassTraining("training rows carry a single label")
    if X.size and not np.isfinite(X).all():
        raise NonFiniteFeature("training features must be finite (drop or impute missing values first)")
    est = spec.build() if X.shape[1] else _Constant()
    est.fit(X, y)
    return TrainedModel(spec, tuple(matrix.feature_names), est,
                        {"seed": spec.seed, "rows": int(len(y)), "positives": int(y.sum())})


def _check_features(model, names):
    if tuple(names) != model.feature_names:
        raise FeatureMismatch(f"model expects {list(model.feature_names)}, got {list(names)}")


def predict_scores(model: TrainedModel, matrix) -> np.ndarray:
    _check_features(model, matrix.feature_names)
    return np.asarray(model.estimator.predict_proba(matrix.X), dtype=float)


def predict_labels(model: TrainedModel, matrix) -> np.ndarray:
    _check_features(model, matrix.feature_names)
    return np.asarray(model.estimator.predict(matrix.X), dtype=bool)


def predict(model: TrainedModel, row, feature_names=None) -> tuple[str, float]:
    """Predict one row given as a mapping name -> value or a sequence in model order."""
    if isinstance(row, dict):
        if feature_names is None and set(row) != set(model.feature_names):
            raise FeatureMismatch(f"row features {sorted(row)} do not match the model")
        x = np.array([[np.nan if row.get(f) is None else row[f] for f in model.feature_names]], dtype=float)
    else:
        if feature_names is not None:
            _check_features(model, feature_names)
        x = np.asarray(row, dtype=float).reshape(1, -1)
        if x.shape[1] != len(model.feature_names):
            raise FeatureMismatch(f"expected {len(model.feature_names)} values, got {x.shape[1]}")
    score = float(model.estimator.predict_proba(x)[0])
    label = bool(model.estimator.predict(x)[0])
    return ("yes" if label else "no"), score
