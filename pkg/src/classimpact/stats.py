"""Kruskal-Wallis and two-sided Fisher exact tests."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import exp, lgamma

import numpy as np
from scipy.stats import chi2, rankdata

from .errors import DegenerateInput, ZeroMargin

log = logging.getLogger(__name__)

ALPHA = 0.05


@dataclass
class TestResult:
    test: str
    statistic: float
    p: float
    df: int | None = None
    flags: list[str] = field(default_factory=list)
    alpha: float = ALPHA

    @property
    def significant(self) -> bool:
        return self.p < self.alpha

    def to_dict(self):
        return {"test": self.test, "statistic": self.statistic, "df": self.df, "p": self.p,
                "alpha": self.alpha, "significant": self.significant, "flags": list(self.flags)}


def kruskal_wallis(groups, strict: bool = False) -> TestResult:
    """H statistic with mid-ranks and tie correction; p from the chi-square tail.

    When every observation is equal H=0, p=1 and the result is flagged
    ``degenerate`` (or DegenerateInput is raised when ``strict``).
    """
    groups = [np.asarray(g, dtype=float).ravel() for g in groups]
    if len(groups) < 2 or any(len(g) == 0 for g in groups):
        raise ValueError("need at least two non-empty groups")
    data = np.concatenate(groups)
    n, k = len(data), len(groups)
    if n < 3:
        raise ValueError("need at least three observations")
    flags = []
    if any(len(g) < 5 for g in groups):
        flags.append("small-sample: chi-square approximation is rough for groups under 5")
    ranks = rankdata(data)
    _, counts = np.unique(data, return_counts=True)
    ties = 1.0 - float((counts ** 3 - counts).sum()) / (n ** 3 - n)
    if ties <= 0:
        if strict:
            raise DegenerateInput("all observations are equal")
        return TestResult("kruskal-wallis", 0.0, 1.0, k - 1, ["degenerate: all observations equal", *flags])
    h = 0.0
    start = 0
    for g in groups:
        r = ranks[start:start + len(g)]
        start += len(g)
        h += len(g) * (r.mean() - (n + 1) / 2) ** 2
    h = 12.0 / (n * (n + 1)) * h / ties
    p = float(chi2.sf(h, k - 1))
    return TestResult("kruskal-wallis", float(h), min(1.0, p), k - 1, flags)


def _log_hyper(a, r1, c1, n):
    # log P(top-left = a) for fixed margins
    r2, c2 = n - r1, n - c1
    b, c, d = r1 - a, c1 - a, r2 - c1 + a
    return (lgamma(r1 + 1) + lgamma(r2 + 1) + lgamma(c1 + 1) + lgamma(c2 + 1) - lgamma(n + 1)
            - lgamma(a + 1) - lgamma(b + 1) - lgamma(c + 1) - lgamma(d + 1))


def fisher_exact_2x2(a: int, b: int, c: int, d: int) -> float:
    """Two-sided p: total probability of tables no more likely than the observed one."""
    cells = (a, b, c, d)
    if any(int(v) != v or v < 0 for v in cells):
        raise ValueError("cells must be non-negative integers")
    a, b, c, d = map(int, cells)
    if min(a + b, c + d, a + c, b + d) == 0:
        raise ZeroMargin("every row and column margin must be positive")
    r1, c1, n = a + b, a + c, a + b + c + d
    lo, hi = max(0, c1 - (n - r1)), min(r1, c1)
    logs = np.array([_log_hyper(x, r1, c1, n) for x in range(lo, hi + 1)])
    observed = logs[a - lo]
    # relative tolerance guards against lgamma rounding on equal-probability tables
    keep = logs <= observed + np.log1p(1e-7)
    p = float(np.exp(logs[keep] - logs.max()).sum() * exp(logs.max()))
    return min(1.0, p)


def fisher_result(a, b, c, d) -> TestResult:
    return TestResult("fisher-exact-2x2", float(a * d - b * c), fisher_exact_2x2(a, b, c, d))


def compare_reports(report_a: dict, report_b: dict, metric: str = "f1", labels=("A", "B")) -> dict:
    """Kruskal-Wallis on the per-sample values of two eval reports."""
    ga = [s[metric] for s in report_a["per_sample"]]
    gb = [s[metric] for s in report_b["per_sample"]]
    res = kruskal_wallis([ga, gb])
    out = res.to_dict()
    out["metric"] = metric
    out["groups"] = {labels[0]: {"n": len(ga), "median": float(np.median(ga))},
                     labels[1]: {"n": len(gb), "median": float(np.median(gb))}}
    return out
