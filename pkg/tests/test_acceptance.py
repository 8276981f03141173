"""End-to-end acceptance checks; each prints one PASS/FAIL line."""

import itertools
import math
import time

import numpy as np
import pytest

from classimpact.arff import check_arff_file
from classimpact.dataset import FeatureMatrix, SampleSpec, build_matrix, export_arff, export_csv, read_csv, time_split
from classimpact.learn import LearnerSpec, igr_values, precision, run_protocol, wrapper_select
from classimpact.learn.selection import best_first
from classimpact.linker import LinkConfig, link
from classimpact.metrics import MetricsConfig, family_of, tlcc_lin, tlcc_log, tlcc_scp
from classimpact.stats import fisher_exact_2x2, kruskal_wallis
from classimpact.synth import SynthSpec, generate
from classimpact.textsim import preprocess


def announce(capsys, number, title, ok, seconds, detail=""):
    with capsys.disabled():
        print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({seconds:.2f}s) {detail}".rstrip())


@pytest.fixture(scope="module")
def synthetic():
    syn = generate(SynthSpec())
    cfg = LinkConfig(syn.corpus.project_key)
    t0 = time.perf_counter()
    m = build_matrix(syn.corpus, link(syn.corpus, cfg), cfg,
                     MetricsConfig(families=("R2RS", "TLCC", "SQ", "CKJM")), syn.externals)
    return syn, m, time.perf_counter() - t0


# ---------------------------------------------------------------- 1

def test_criterion_1_locality_table(capsys):
    expected = {"A": ([1, 1, 1, 1, 0, 0], (0.67, 0.16, 0.47)),
                "B": ([0, 0, 1, 1, 1, 0], (0.5, 0.18, 0.51)),
                "C": ([0, 0, 0, 0, 1, 1], (0.33, 0.25, 0.24))}
    t0 = time.perf_counter()
    worst = 0.0
    for flags, want in expected.values():
        got = (tlcc_scp(flags), tlcc_lin(flags), tlcc_log(flags))
        worst = max(worst, *(abs(g - w) for g, w in zip(got, want)))
    dt = time.perf_counter() - t0
    ok = worst <= 0.005 and dt < 1
    announce(capsys, 1, "temporal locality table within 0.005", ok, dt, f"max error {worst:.4f}")
    assert ok


# ---------------------------------------------------------------- 2

def test_criterion_2_precision_arithmetic(capsys):
    t0 = time.perf_counter()
    p = precision(17, 24)
    dt = time.perf_counter() - t0
    ok = abs(p - 0.415) <= 0.005 and dt < 1
    announce(capsys, 2, "TP=17, FP=24 gives precision 41.5% +- 0.5pp", ok, dt, f"precision {100 * p:.2f}%")
    assert ok


# ---------------------------------------------------------------- 3

def _vocabulary_overlap(syn):
    """Per requirement: share of its stems already used by the last ten requirements on its topic."""
    history: dict[int, list[set]] = {}
    by_key = {r.key: r for r in syn.corpus.requirements}
    shares = []
    for c in syn.corpus.commits[1:]:
        paths = [f.path for f in c.file_changes]
        key = c.message.split(":")[0]
        if len(paths) < 2 or key not in by_key:  # bug fixes touch a single class
            continue
        topic = syn.topic_of[paths[0]]
        req = by_key[key]
        stems = set(preprocess(f"{req.title} {req.description}"))
        prior = history.setdefault(topic, [])
        if prior:
            seen = set().union(*prior[-10:])
            shares.append(len(stems & seen) / len(stems))
        prior.append(stems)
    return shares


def test_criterion_3_planted_signal(capsys, synthetic):
    syn, m, build_time = synthetic
    n_req, n_cls = len(set(m.keys)), len(syn.topic_of)
    shares = _vocabulary_overlap(syn)
    t0 = time.perf_counter()
    spec = LearnerSpec("DecisionTree", seed=0)
    with_r2rs = m.select([f for f in m.feature_names if family_of(f) in ("R2RS", "SQ", "CKJM")])
    without = m.select([f for f in m.feature_names if family_of(f) in ("SQ", "CKJM")])
    f1_with = run_protocol(spec, with_r2rs, SampleSpec(0, 20)).mean["f1"]
    f1_without = run_protocol(spec, without, SampleSpec(0, 20)).mean["f1"]
    dt = time.perf_counter() - t0 + build_time
    ok = (n_req >= 50 and n_cls >= 200 and min(shares) >= 0.6 and f1_with >= 0.80 and f1_without <= 0.35
          and dt < 60)
    announce(capsys, 3, "synthetic corpus, R2RS on vs off", ok, dt,
             f"{n_req} requirements, {n_cls} classes, vocabulary overlap {np.mean(shares):.2f} "
             f"(min {min(shares):.2f}), F1 with {f1_with:.3f}, without {f1_without:.3f}")
    assert ok


# ---------------------------------------------------------------- 4

def brute_igr(x, y, bins):
    n = len(x)
    cat = [sum(w < v for w in x) * bins // n for v in x]

    def h(counts):
        tot = sum(counts)
        return -sum(c / tot * math.log2(c / tot) for c in counts if c)

    table = {}
    for c, label in zip(cat, y):
        table.setdefault(c, [0, 0])[int(label)] += 1
    ig = h([sum(not v for v in y), sum(bool(v) for v in y)]) - sum(sum(r) / n * h(r) for r in table.values())
    iv = h([sum(r) for r in table.values()])
    return 0.0 if iv == 0 else ig / iv


def test_criterion_4_igr_oracle(capsys):
    rng = np.random.default_rng(44)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        rows, feats, bins = int(rng.integers(1, 13)), int(rng.integers(1, 4)), int(rng.integers(1, 5))
        X = rng.integers(0, 5, (rows, feats)).astype(float)
        y = rng.random(rows) < 0.5
        for j in range(feats):
            worst = max(worst, abs(igr_values(X[:, j], y, bins) - brute_igr(list(X[:, j]), list(y), bins)))
    label = np.array([True, False] * 6)
    identical = igr_values(label.astype(float), label, 2)
    constant = igr_values(np.zeros(12), label, 4)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and abs(identical - 1.0) <= 1e-12 and constant == 0.0
    announce(capsys, 4, "IGR equals brute-force entropy on 200 matrices", ok, dt,
             f"max error {worst:.1e}, identical {identical}, constant {constant}")
    assert ok


# ---------------------------------------------------------------- 5

def enumerate_fisher(a, b, c, d):
    r1, c1, n = a + b, a + c, a + b + c + d
    prob = lambda x: math.comb(c1, x) * math.comb(n - c1, r1 - x) / math.comb(n, r1)
    obs = prob(a)
    return sum(prob(x) for x in range(max(0, r1 + c1 - n), min(r1, c1) + 1) if prob(x) <= obs * (1 + 1e-7))


def test_criterion_5_property_suites(capsys):
    import test_properties as props

    suites = [props.test_similarity_in_unit_interval, props.test_similarity_identity,
              props.test_distribution_order, props.test_tlcc_bounds, props.test_tlcc_monotone_in_flags,
              props.test_no_row_sees_its_own_future, props.test_undersample_balanced_and_deterministic,
              props.test_kruskal_wallis_ranges, props.test_fisher_range_and_transpose, props.test_igr_in_unit_interval]
    t0 = time.perf_counter()
    failed = []
    for suite in suites:
        try:
            suite()
        except Exception as exc:  # report every suite, not just the first failure
            failed.append(f"{suite.__name__}: {type(exc).__name__}")
    kw = kruskal_wallis([[0.7] * 8, [0.7] * 8])
    fisher = fisher_exact_2x2(3, 1, 1, 3)
    dt = time.perf_counter() - t0
    ok = (not failed and (kw.statistic, kw.p) == (0.0, 1.0) and abs(fisher - 0.4857) <= 1e-4
          and abs(fisher - enumerate_fisher(3, 1, 1, 3)) <= 1e-12)
    announce(capsys, 5, f"{len(suites)} property suites x 1000 cases", ok, dt,
             f"KW identical H={kw.statistic} p={kw.p}, Fisher [[3,1],[1,3]] = {fisher:.4f}"
             + (f"; failed: {failed}" if failed else ""))
    assert ok


# ---------------------------------------------------------------- 6

def four_feature_corpus(seed=6):
    rng = np.random.default_rng(seed)
    n_req, classes = 30, 10
    n = n_req * classes
    y = rng.random(n) < 0.2
    X = np.column_stack([rng.normal(size=n), rng.normal(size=n), y + 0.0, rng.normal(size=n)])
    return FeatureMatrix(("noise_a", "noise_b", "signal", "noise_c"), [f"R-{i // classes}" for i in range(n)],
                         [f"C{i % classes}.java" for i in range(n)], [i // classes for i in range(n)], X, y)


def test_criterion_6_wrapper_matches_exhaustive(capsys):
    m = four_feature_corpus()
    spec = LearnerSpec("DecisionTree")
    t0 = time.perf_counter()
    split = time_split(m)

    def scorer(subset):
        if not subset:
            return 0.0
        part = (split[0].select(subset), split[1].select(subset))
        return run_protocol(spec, m.select(subset), SampleSpec(0, 5), split=part).mean["f1"]

    scores = {tuple(sorted(s)): scorer(tuple(sorted(s)))
              for r in range(5) for s in itertools.combinations(m.feature_names, r)}
    exhaustive = min(scores, key=lambda s: (-scores[s], len(s), s))
    searched = best_first(m.feature_names, scorer).subset
    selected = wrapper_select(spec, m, repeats=5, final_repeats=20).subset
    dt = time.perf_counter() - t0
    ok = len(scores) == 16 and selected == searched == exhaustive == ("signal",) and dt < 30
    announce(capsys, 6, "wrapper selection vs exhaustive search over 16 subsets", ok, dt,
             f"selected {list(selected)}, exhaustive {list(exhaustive)}")
    assert ok


# ---------------------------------------------------------------- 7

def test_criterion_7_export_fidelity(capsys, synthetic, tmp_path):
    _, m, _ = synthetic
    m = m.take(np.arange(0, len(m), 7))
    m.X[::5, -1] = np.nan  # exercise missing values
    t0 = time.perf_counter()
    export_arff(m, tmp_path / "matrix.arff", relation="impact-acceptance")
    errors = check_arff_file(tmp_path / "matrix.arff")
    export_csv(m, tmp_path / "matrix.csv")
    back = read_csv(tmp_path / "matrix.csv")
    same = (back.feature_names == m.feature_names and back.keys == m.keys and back.classes == m.classes
            and np.array_equal(back.X, m.X, equal_nan=True) and np.array_equal(back.y, m.y)
            and np.array_equal(back.order, m.order))
    dt = time.perf_counter() - t0
    ok = not errors and same
    announce(capsys, 7, "ARFF validates and CSV round-trips", ok, dt,
             f"{len(m)} rows x {len(m.feature_names)} features, ARFF errors {len(errors)}, lossless {same}")
    assert ok
