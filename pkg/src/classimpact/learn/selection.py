"""Best-first wrapper search over feature subsets."""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

from ..dataset import FeatureMatrix, SampleSpec, time_split
from .evaluation import run_protocol
from .models import LearnerSpec

log = logging.getLogger(__name__)


@dataclass
class SelectionResult:
    subset: tuple[str, ...]
    score: float  # mean F1 found during the search
    final_score: float | None = None  # rescored with the full repeat count
    expansions: int = 0
    evaluated: int = 0
    trace: list = field(default_factory=list)

    def to_dict(self, learner=None):
        return {
            "learner": learner,
            "subset": list(self.subset),
            "score": self.final_score if self.final_score is not None else self.score,
            "search_score": self.score,
            "expansions": self.expansions,
            "evaluated": self.evaluated,
        }


def _rank(score, subset):
    # heap order: higher score, then smaller subset, then lexicographic
    return (-score, len(subset), subset)


def best_first(features: Sequence[str], scorer: Callable[[tuple[str, ...]], float],
               patience: int = 5, min_improvement: float = 0.001) -> SelectionResult:
    """Search from the empty set, expanding by adding or removing one feature.

    Stops once ``patience`` consecutive expansions fail to raise the best score
    by ``min_improvement`` (relative), or when nothing is left to expand.
    """
    features = tuple(sorted(features))
    cache: dict[tuple[str, ...], float] = {}

    def score(subset):
        if subset not in cache:
            cache[subset] = float(scorer(subset))
        return cache[subset]

    start = ()
    best = (score(start), start)
    frontier = [_rank(best[0], start)]
    expanded = set()
    stale = expansions = 0
    trace = []
    while frontier and stale < patience:
        _, _, node = heapq.heappop(frontier)
        if node in expanded:
            continue
        expanded.add(node)
        expansions += 1
        improved = False
        members = set(node)
        for f in features:
            child = tuple(sorted(members ^ {f}))
            if child in cache:
                continue
            s = score(child)
            heapq.heappush(frontier, _rank(s, child))
            if s > best[0] and s >= best[0] * (1 + min_improvement):
                improved = True
            if _rank(s, child) < _rank(*best):
                best = (s, child)
        trace.append({"expanded": list(node), "best": list(best[1]), "score": best[0]})
        stale = 0 if improved else stale + 1
    return SelectionResult(best[1], best[0], None, expansions, len(cache), trace)


def wrapper_select(spec: LearnerSpec, matrix: FeatureMatrix, repeats: int = 5, final_repeats: int = 20,
                   seed: int = 0, train_fraction: float = 0.8, scorer=None, patience: int = 5) -> SelectionResult:
    """Pick the feature subset maximising mean F1 of the evaluation protocol.

    The chronological split is fixed once so all subsets see the same rows.
    """
    split = time_split(matrix, train_fraction)
    if scorer is None:
        def scorer(subset):
            if not subset:
                return 0.0  # the constant predictor never flags a class
            part = (split[0].select(subset), split[1].select(subset))
            return run_protocol(spec, matrix.select(subset), SampleSpec(seed, repeats), split=part).mean["f1"]
    result = best_first(matrix.feature_names, scorer, patience=patience)
    if final_repeats and result.subset:
        sub = result.subset
        part = (split[0].select(sub), split[1].select(sub))
        result.final_score = run_protocol(spec, matrix.select(sub), SampleSpec(seed, final_repeats),
                                          split=part).mean["f1"]
    elif final_repeats:
        result.final_score = 0.0
    log.info("selected %s after %d expansions", list(result.subset), result.expansions)
    return result
