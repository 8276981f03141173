"""Confusion counts, precision/recall/F1 and the repeated undersampling protocol."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from ..dataset import FeatureMatrix, SampleSpec, time_split, undersample
from .models import LearnerSpec, predict_labels, train
from .pca import fit_pca

log = logging.getLogger(__name__)


def precision(tp, fp):
    return tp / (tp + fp) if tp + fp else 0.0


def recall(tp, fn):
    return tp / (tp + fn) if tp + fn else 0.0


def f_measure(p, r, x=1.0):
    """F_x: recall weighted x times as much as precision."""
    denom = x * x * p + r
    return (1 + x * x) * p * r / denom if denom else 0.0


@dataclass
class SampleResult:
    seed: int
    tp: int
    fp: int
    tn: int
    fn: int
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0

    def __post_init__(self):
        self.precision = precision(self.tp, self.fp)
        self.recall = recall(self.tp, self.fn)
        self.f1 = f_measure(self.precision, self.recall)

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn


def confusion(y_true, y_pred, seed=0) -> SampleResult:
    y_true = np.asarray(y_true, dtype=bool)
    y_pred = np.asarray(y_pred, dtype=bool)
    tp = int((y_true & y_pred).sum())
    fp = int((~y_true & y_pred).sum())
    tn = int((~y_true & ~y_pred).sum())
    fn = int((y_true & ~y_pred).sum())
    return SampleResult(seed, tp, fp, tn, fn)


def evaluate(model, test: FeatureMatrix, seed=None) -> SampleResult:
    pred = predict_labels(model, test)
    return confusion(test.y, pred, model.spec.seed if seed is None else seed)


@dataclass
class EvalReport:
    learner: str
    params: dict
    features: list[str]
    per_sample: list[SampleResult] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def _stat(self, name, fn):
        vals = np.array([getattr(s, name) for s in self.per_sample], dtype=float)
        return float(fn(vals)) if len(vals) else 0.0

    @property
    def mean(self):
        return {k: self._stat(k, np.mean) for k in ("precision", "recall", "f1")}

    @property
    def stddev(self):
        # population standard deviation over the repeated samples
        return {k: self._stat(k, np.std) for k in ("precision", "recall", "f1")}

    @property
    def seeds(self):
        return [s.seed for s in self.per_sample]

    def to_dict(self):
        return {
            "learner": self.learner,
            "params": self.params,
            "features": list(self.features),
            "seeds": self.seeds,
            "per_sample": [asdict(s) for s in self.per_sample],
            "mean": self.mean,
            "stddev": self.stddev,
            **({"info": self.info} if self.info else {}),
        }


def run_protocol(spec: LearnerSpec, matrix: FeatureMatrix, sample: SampleSpec = SampleSpec(),
                 train_fraction: float = 0.8, pca_variance: float | None = None, split=None) -> EvalReport:
    """Split once in time order; per seed undersample, train and score on the untouched test rows."""
    train_rows, test_rows = split if split is not None else time_split(matrix, train_fraction)
    complete = train_rows.complete_rows()
    dropped = int((~complete).sum())
    if dropped:
        log.info("dropping %d training row(s) with missing values", dropped)
        train_rows = train_rows.take(np.nonzero(complete)[0])
    report = EvalReport(spec.kind, dict(spec.params), list(matrix.feature_names))
    report.info = {
        "train_rows": len(train_rows),
        "test_rows": len(test_rows),
        "dropped_incomplete_train_rows": dropped,
        "test_rows_with_missing": int((~test_rows.complete_rows()).sum()),
        "boundary_requirement": test_rows.keys[0] if len(test_rows) else None,
    }
    for seed in sample.seeds:
        balanced = undersample(train_rows, seed)
        test = test_rows
        if pca_variance is not None:
            pca = fit_pca(balanced.X, pca_variance)
            balanced = pca.apply(balanced)
            test = pca.apply(test_rows)
        model = train(spec.with_seed(seed), balanced)
        report.per_sample.append(evaluate(model, test, seed))
    return report
