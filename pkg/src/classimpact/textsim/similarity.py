"""Pairwise similarity between two preprocessed token streams.

Every technique maps into [0, 1].  ``vsm``, ``jsd`` and ``optimum`` (with a
symmetric term similarity) are symmetric; ``bleu`` and ``greedy`` are not.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

TECHNIQUES = ("VSM", "JSD", "GC", "OPC", "BC")

TermSim = Callable[[str, str], float]


@dataclass(frozen=True)
class CorpusStats:
    doc_count: int
    doc_freq: dict[str, int] = field(default_factory=dict)

    @classmethod
    def from_documents(cls, docs: Iterable[Sequence[str]]) -> "CorpusStats":
        df = Counter()
        n = 0
        for doc in docs:
            n += 1
            df.update(set(doc))
        return cls(max(n, 1), dict(df))

    def idf(self, term: str) -> float:
        # unseen terms count as appearing in one document
        return math.log(self.doc_count / self.doc_freq.get(term, 1))


def _weights(tf: Counter, stats: CorpusStats | None) -> dict[str, float]:
    if stats is None:
        return {t: float(c) for t, c in tf.items()}
    return {t: c * stats.idf(t) for t, c in tf.items()}


def _cosine(u: dict, v: dict) -> float:
    nu = math.sqrt(sum(w * w for w in u.values()))
    nv = math.sqrt(sum(w * w for w in v.values()))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    if len(u) > len(v):
        u, v = v, u
    dot = sum(w * v.get(t, 0.0) for t, w in u.items())
    return min(1.0, max(0.0, dot / (nu * nv)))


def vsm_similarity(a: Sequence[str], b: Sequence[str], stats: CorpusStats | None = None) -> float:
    """Cosine of tf-idf vectors (tf = raw count, idf = ln(N/df)).

    When a non-empty stream's tf-idf vector vanishes (all of its terms occur in
    every document) both sides fall back to raw term frequencies.
    """
    if not a or not b:
        return 0.0
    tfa, tfb = Counter(a), Counter(b)
    wa, wb = _weights(tfa, stats), _weights(tfb, stats)
    if stats is not None and (not any(wa.values()) or not any(wb.values())):
        wa, wb = _weights(tfa, None), _weights(tfb, None)
    return _cosine(wa, wb)


def _distribution(tokens: Sequence[str]) -> dict[str, float]:
    counts = Counter(tokens)
    total = len(tokens)
    return {t: c / total for t, c in counts.items()}


def jsd_similarity(a: Sequence[str], b: Sequence[str]) -> float:
    """1 - Jensen-Shannon divergence (base 2) of the term distributions."""
    if not a or not b:
        return 0.0
    p, q = _distribution(a), _distribution(b)
    jsd = 0.0
    for t in sorted(p.keys() | q.keys()):  # fixed order keeps the sum reproducible
        pt, qt = p.get(t, 0.0), q.get(t, 0.0)
        mt = 0.5 * (pt + qt)
        if pt > 0:
            jsd += 0.5 * pt * math.log2(pt / mt)
        if qt > 0:
            jsd += 0.5 * qt * math.log2(qt / mt)
    return min(1.0, max(0.0, 1.0 - jsd))


def _ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu_similarity(candidate: Sequence[str], reference: Sequence[str], max_order: int = 4) -> float:
    """Sentence BLEU of ``candidate`` against a single ``reference``.

    Orders above the candidate length are skipped.  A zero clipped count is
    replaced by the floor 1 / (2 * len(candidate)).
    """
    c, r = len(candidate), len(reference)
    if c == 0 or r == 0:
        return 0.0
    floor = 1.0 / (2 * c)
    log_sum = 0.0
    orders = min(max_order, c)
    for n in range(1, orders + 1):
        cand = _ngrams(candidate, n)
        ref = _ngrams(reference, n)
        matched = sum(min(cnt, ref[g]) for g, cnt in cand.items())
        total = c - n + 1
        log_sum += math.log(matched / total if matched else floor)
    bp = 1.0 if c > r else math.exp(1.0 - r / c)
    return min(1.0, bp * math.exp(log_sum / orders))


def term_sim_exact(t1: str, t2: str) -> float:
    return 1.0 if t1 == t2 else 0.0


def _distinct(tokens):
    return list(dict.fromkeys(tokens))


def greedy_similarity(a: Sequence[str], b: Sequence[str], term_sim: TermSim = term_sim_exact) -> float:
    """Mean over the distinct terms of ``a`` of their best match in ``b``."""
    ta, tb = _distinct(a), _distinct(b)
    if not ta or not tb:
        return 0.0
    if term_sim is term_sim_exact:
        return len(set(ta) & set(tb)) / len(ta)
    total = 0.0
    for x in ta:
        total += max(term_sim(x, y) for y in tb)
    return total / len(ta)


def optimum_similarity(a: Sequence[str], b: Sequence[str], term_sim: TermSim = term_sim_exact) -> float:
    """Maximum-weight one-to-one term assignment, normalised by the larger vocabulary."""
    ta, tb = _distinct(a), _distinct(b)
    if not ta or not tb:
        return 0.0
    norm = max(len(ta), len(tb))
    if term_sim is term_sim_exact:
        return len(set(ta) & set(tb)) / norm
    scores = np.array([[term_sim(x, y) for y in tb] for x in ta], dtype=float)
    rows, cols = linear_sum_assignment(scores, maximize=True)
    return float(min(1.0, scores[rows, cols].sum() / norm))


def similarity(technique: str, a, b, stats: CorpusStats | None = None,
               term_sim: TermSim = term_sim_exact) -> float:
    if technique == "VSM":
        return vsm_similarity(a, b, stats)
    if technique == "JSD":
        return jsd_similarity(a, b)
    if technique == "GC":
        return greedy_similarity(a, b, term_sim)
    if technique == "OPC":
        return optimum_similarity(a, b, term_sim)
    if technique == "BC":
        return bleu_similarity(a, b)
    raise ValueError(f"unknown technique {technique!r}")
