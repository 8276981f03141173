"""Labeled (requirement, class) feature matrix, chronological split, undersampling and export."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .corpus import Corpus, RequirementKind
from .errors import DegenerateSplit, InsufficientNegatives, UnorderedMatrix
from .linker import LinkConfig, LinkResult
from .metrics import ClassTextStore, ExternalMetricsTable, MetricsBuilder, MetricsConfig

log = logging.getLogger(__name__)

KEY_COLUMNS = ("requirement", "class", "order")
LABEL_COLUMN = "impacted"


@dataclass
class FeatureMatrix:
    """Rows sorted by (requirement first-commit position, requirement key, class path).

    Missing metric values are NaN in ``X``.
    """

    feature_names: tuple[str, ...]
    keys: list[str]
    classes: list[str]
    order: np.ndarray
    X: np.ndarray
    y: np.ndarray
    horizon: np.ndarray | None = None
    report: dict = field(default_factory=dict)

    def __post_init__(self):
        self.order = np.asarray(self.order, dtype=np.int64)
        self.X = np.asarray(self.X, dtype=float).reshape(len(self.keys), len(self.feature_names))
        self.y = np.asarray(self.y, dtype=bool)
        if self.horizon is None:
            self.horizon = np.full(len(self.keys), -1, dtype=np.int64)

    def __len__(self):
        return len(self.keys)

    @property
    def positives(self) -> int:
        return int(self.y.sum())

    def take(self, idx) -> "FeatureMatrix":
        idx = np.asarray(idx, dtype=np.int64)
        return FeatureMatrix(self.feature_names, [self.keys[i] for i in idx], [self.classes[i] for i in idx],
                             self.order[idx], self.X[idx], self.y[idx], self.horizon[idx])

    def select(self, features: Sequence[str]) -> "FeatureMatrix":
        cols = [self.feature_names.index(f) for f in features]
        return FeatureMatrix(tuple(features), list(self.keys), list(self.classes), self.order.copy(),
                             self.X[:, cols], self.y.copy(), self.horizon.copy())

    def complete_rows(self) -> np.ndarray:
        """Boolean mask of rows with no missing value."""
        return ~np.isnan(self.X).any(axis=1) if self.X.size else np.ones(len(self), dtype=bool)

    def requirement_keys(self) -> list[str]:
        return list(dict.fromkeys(self.keys))

    def is_chronological(self) -> bool:
        if len(self) < 2:
            return True
        if np.any(np.diff(self.order) < 0):
            return False
        # every requirement must occupy one contiguous block
        seen = set()
        prev = None
        for k in self.keys:
            if k != prev:
                if k in seen:
                    return False
                seen.add(k)
                prev = k
        return True


def build_matrix(corpus: Corpus, linked: LinkResult, link_config: LinkConfig,
                 config: MetricsConfig | None = None, externals: ExternalMetricsTable | None = None,
                 class_texts: ClassTextStore | None = None) -> FeatureMatrix:
    """One row per (new-feature requirement, candidate class); label = class was touched."""
    config = config or MetricsConfig()
    if externals is None:
        config = replace(config, families=tuple(f for f in config.families if f not in ("SQ", "CKJM")))
    builder = MetricsBuilder(corpus, linked.changes, link_config, config, externals, class_texts)
    names = config.feature_names()
    keys, classes, order, rows, labels, horizon = [], [], [], [], [], []
    empty_history = 0
    features = [ch for ch in builder.changes if ch.requirement.kind == RequirementKind.NEW_FEATURE]
    for ch in features:
        for row in builder.rows_for(ch):
            keys.append(row.requirement_key)
            classes.append(row.class_path)
            order.append(ch.first_position)
            rows.append([math.nan if row.values[n] is None else row.values[n] for n in names])
            labels.append(row.class_path in ch.touched_files)
            horizon.append(row.horizon)
            empty_history += row.tlcc_empty
    X = np.array(rows, dtype=float).reshape(len(rows), len(names))
    m = FeatureMatrix(names, keys, classes, order, X, labels, np.array(horizon, dtype=np.int64))
    m.report = {
        "requirements": len(features),
        "rows": len(m),
        "positives": m.positives,
        "positive_rate": (m.positives / len(m)) if len(m) else 0.0,
        "rows_with_missing": int((~m.complete_rows()).sum()),
        "rows_without_history": int(empty_history),
        "warnings": list(builder.warnings),
    }
    return m


def audit_anti_leak(matrix: FeatureMatrix) -> list[int]:
    """Indices of rows that consulted a commit at or after their requirement's first commit."""
    return [int(i) for i in np.nonzero(matrix.horizon >= matrix.order)[0]]


# ---------------------------------------------------------------- split and sampling

def time_split(matrix: FeatureMatrix, train_fraction: float = 0.8):
    """Chronological split at the requirement boundary closest to ceil(fraction * rows)."""
    if not matrix.is_chronological():
        raise UnorderedMatrix("rows must be sorted by requirement first commit")
    n = len(matrix)
    target = math.ceil(train_fraction * n)
    cuts = [i for i in range(1, n) if matrix.keys[i] != matrix.keys[i - 1]]
    if not cuts:
        raise DegenerateSplit("need at least two requirements to split")
    cut = min(cuts, key=lambda b: (abs(b - target), -b))
    idx = np.arange(n)
    return matrix.take(idx[:cut]), matrix.take(idx[cut:])


def undersample(train: FeatureMatrix, seed: int) -> FeatureMatrix:
    """Keep every positive row and an equal-sized seeded random draw of negatives."""
    pos = np.nonzero(train.y)[0]
    neg = np.nonzero(~train.y)[0]
    if len(pos) == 0:
        raise InsufficientNegatives("training data has no positive row")
    if len(neg) < len(pos):
        raise InsufficientNegatives(f"{len(neg)} negatives cannot balance {len(pos)} positives")
    rng = np.random.default_rng(seed)
    chosen = rng.choice(neg, size=len(pos), replace=False)
    return train.take(np.sort(np.concatenate([pos, chosen])))


def protocol_seeds(seed: int, repeats: int) -> list[int]:
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    return [seed + k for k in range(1, repeats + 1)]


@dataclass(frozen=True)
class SampleSpec:
    seed: int = 0
    repeats: int = 20

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")

    @property
    def seeds(self):
        return protocol_seeds(self.seed, self.repeats)


def split_manifest(train: FeatureMatrix, test: FeatureMatrix) -> dict:
    return {
        "train_rows": len(train),
        "test_rows": len(test),
        "train_requirements": len(train.requirement_keys()),
        "test_requirements": len(test.requirement_keys()),
        "boundary_requirement": test.keys[0] if len(test) else None,
        "last_train_requirement": train.keys[-1] if len(train) else None,
    }


# ---------------------------------------------------------------- export

def _fmt(v: float) -> str:
    return "" if math.isnan(v) else repr(float(v))


def export_csv(matrix: FeatureMatrix, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*KEY_COLUMNS, *matrix.feature_names, LABEL_COLUMN])
        for i in range(len(matrix)):
            w.writerow([matrix.keys[i], matrix.classes[i], int(matrix.order[i]),
                        *(_fmt(v) for v in matrix.X[i]), "yes" if matrix.y[i] else "no"])


def read_csv(path) -> FeatureMatrix:
    with open(path, newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = next(r)
        if tuple(header[:3]) != KEY_COLUMNS or header[-1] != LABEL_COLUMN:
            raise ValueError(f"{path}: not a feature-matrix CSV")
        names = tuple(header[3:-1])
        keys, classes, order, rows, labels = [], [], [], [], []
        for rec in r:
            keys.append(rec[0])
            classes.append(rec[1])
            order.append(int(rec[2]))
            rows.append([float(v) if v != "" else math.nan for v in rec[3:-1]])
            labels.append(rec[-1] == "yes")
    return FeatureMatrix(names, keys, classes, order, np.array(rows, dtype=float).reshape(len(rows), len(names)),
                         labels)


def export_arff(matrix: FeatureMatrix, path, relation: str = "impact"):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"% {len(matrix)} requirement-class pairs, rows in CSV order\n")
        fh.write(f"@RELATION {relation}\n\n")
        for name in matrix.feature_names:
            fh.write(f"@ATTRIBUTE {name} NUMERIC\n")
        fh.write(f"@ATTRIBUTE {LABEL_COLUMN} {{yes,no}}\n\n@DATA\n")
        for i in range(len(matrix)):
            vals = ["?" if math.isnan(v) else repr(float(v)) for v in matrix.X[i]]
            vals.append("yes" if matrix.y[i] else "no")
            fh.write(",".join(vals) + "\n")
