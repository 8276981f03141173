import math

import numpy as np
import pytest

from classimpact.errors import DegenerateInput, ZeroMargin
from classimpact.stats import compare_reports, fisher_exact_2x2, fisher_result, kruskal_wallis


def test_identical_groups_are_degenerate():
    res = kruskal_wallis([[0.5] * 6, [0.5] * 6])
    assert (res.statistic, res.p) == (0.0, 1.0)
    assert any("degenerate" in f for f in res.flags)
    with pytest.raises(DegenerateInput):
        kruskal_wallis([[1, 1, 1], [1, 1]], strict=True)


def test_h_by_hand():
    res = kruskal_wallis([[1, 2, 3], [4, 5, 6]])
    # mean ranks 2 and 5 around the overall 3.5
    expected = 12 / (6 * 7) * (3 * 1.5 ** 2 + 3 * 1.5 ** 2)
    assert res.statistic == pytest.approx(expected) == pytest.approx(3.857, abs=5e-4)
    assert res.df == 1 and any("small-sample" in f for f in res.flags)


def test_tie_correction_by_hand():
    a, b = [1, 2, 2, 3, 5], [2, 4, 5, 6, 7]
    data = sorted(a + b)
    rank = {v: np.mean([i + 1 for i, w in enumerate(data) if w == v]) for v in set(data)}
    n = len(data)
    raw = 12 / (n * (n + 1)) * sum(len(g) * (np.mean([rank[v] for v in g]) - (n + 1) / 2) ** 2 for g in (a, b))
    ties = 1 - sum(t ** 3 - t for t in (data.count(v) for v in set(data))) / (n ** 3 - n)
    assert kruskal_wallis([a, b]).statistic == pytest.approx(raw / ties)


def test_matches_scipy():
    scipy_stats = pytest.importorskip("scipy.stats")
    rng = np.random.default_rng(1)
    for _ in range(20):
        groups = [rng.integers(0, 6, rng.integers(3, 12)) for _ in range(rng.integers(2, 5))]
        ours = kruskal_wallis(groups)
        ref = scipy_stats.kruskal(*groups)
        assert ours.statistic == pytest.approx(ref.statistic) and ours.p == pytest.approx(ref.pvalue)


def test_false_positive_rate_near_alpha():
    rng = np.random.default_rng(2024)
    rejects = sum(kruskal_wallis([rng.normal(size=20), rng.normal(size=20)]).significant for _ in range(1000))
    assert abs(rejects / 1000 - 0.05) <= 0.02


def test_invariant_under_monotone_transform():
    rng = np.random.default_rng(3)
    g1, g2 = rng.random(15), rng.random(15) + 0.2
    a = kruskal_wallis([g1, g2])
    b = kruskal_wallis([np.exp(3 * g1), np.exp(3 * g2)])
    assert a.statistic == pytest.approx(b.statistic) and a.p == pytest.approx(b.p)


def test_bad_inputs():
    with pytest.raises(ValueError):
        kruskal_wallis([[1, 2, 3]])
    with pytest.raises(ValueError):
        kruskal_wallis([[1, 2], []])
    with pytest.raises(ValueError):
        kruskal_wallis([[1], [2]])


def enumerate_fisher(a, b, c, d):
    r1, c1, n = a + b, a + c, a + b + c + d

    def prob(x):
        return math.comb(c1, x) * math.comb(n - c1, r1 - x) / math.comb(n, r1)

    observed = prob(a)
    xs = range(max(0, r1 - (n - c1)), min(r1, c1) + 1)
    return min(1.0, sum(prob(x) for x in xs if prob(x) <= observed * (1 + 1e-7)))


@pytest.mark.parametrize("table", [(3, 1, 1, 3), (1, 9, 11, 3), (0, 5, 5, 0), (2, 7, 8, 2), (10, 2, 3, 15),
                                   (1, 1, 1, 1), (5, 0, 0, 5), (12, 5, 7, 9)])
def test_fisher_against_enumeration(table):
    assert fisher_exact_2x2(*table) == pytest.approx(enumerate_fisher(*table), rel=1e-9)


def test_fisher_known_values():
    assert fisher_exact_2x2(3, 1, 1, 3) == pytest.approx(0.4857, abs=5e-5)
    assert fisher_exact_2x2(1, 1, 1, 1) == pytest.approx(1.0)


def test_fisher_diagonal_decreases():
    ps = [fisher_exact_2x2(k, 0, 0, k) for k in range(1, 10)]
    assert all(x > y for x, y in zip(ps, ps[1:]))


def test_fisher_symmetries():
    rng = np.random.default_rng(0)
    for a, b, c, d in rng.integers(1, 15, (30, 4)):
        p = fisher_exact_2x2(a, b, c, d)
        assert fisher_exact_2x2(a, c, b, d) == pytest.approx(p)  # transpose
        assert fisher_exact_2x2(c, d, a, b) == pytest.approx(p)  # row swap
        assert fisher_exact_2x2(b, a, d, c) == pytest.approx(p)  # column swap


def test_fisher_errors_and_result():
    with pytest.raises(ZeroMargin):
        fisher_exact_2x2(0, 0, 3, 4)
    with pytest.raises(ValueError):
        fisher_exact_2x2(-1, 2, 3, 4)
    res = fisher_result(3, 1, 1, 3)
    assert res.statistic == 8 and not res.significant


def test_compare_reports():
    a = {"per_sample": [{"f1": v} for v in np.linspace(0.8, 0.9, 10)]}
    b = {"per_sample": [{"f1": v} for v in np.linspace(0.1, 0.2, 10)]}
    out = compare_reports(a, b, labels=("with", "without"))
    assert out["significant"] and out["groups"]["with"]["n"] == 10
    assert out["groups"]["without"]["median"] == pytest.approx(0.15)
