"""Classifiers, evaluation protocol, feature ranking and selection."""

from .bayes import GaussianNaiveBayes
from .ensemble import Bagging, RandomForest
from .evaluation import EvalReport, SampleResult, confusion, evaluate, f_measure, precision, recall, run_protocol
from .igr import equal_frequency_bins, gain_ratio, igr, igr_rank, igr_values
from .logistic import RidgeLogistic
from .models import KINDS, LearnerSpec, TrainedModel, canonical_kind, predict, predict_labels, predict_scores, train
from .pca import PCAProjection, fit_pca, pca_reduce
from .selection import SelectionResult, best_first, wrapper_select
from .tree import DecisionTree

__all__ = [
    "GaussianNaiveBayes", "Bagging", "RandomForest", "RidgeLogistic", "DecisionTree",
    "EvalReport", "SampleResult", "confusion", "evaluate", "f_measure", "precision", "recall", "run_protocol",
    "equal_frequency_bins", "gain_ratio", "igr", "igr_rank", "igr_values",
    "KINDS", "LearnerSpec", "TrainedModel", "canonical_kind", "predict", "predict_labels", "predict_scores", "train",
    "PCAProjection", "fit_pca", "pca_reduce", "SelectionResult", "best_first", "wrapper_select",
]
