import itertools
import math
from collections import Counter

import numpy as np
import pytest

from classimpact.textsim import (CorpusStats, bleu_similarity, greedy_similarity, jsd_similarity,
                                 optimum_similarity, preprocess, similarity, term_sim_exact, vsm_similarity)
from classimpact.textsim.porter import stem
from conftest import FIXTURES


def test_camel_case_split():
    assert preprocess("timeEvent", split=True) == ["time", "event"]
    assert preprocess("timeEvent") == ["timeev"]
    assert preprocess("HTTPServer utf8_codec", split=True) == ["http", "server", "utf", "8", "codec"]


def test_empty_and_punctuation():
    assert preprocess("") == []
    assert preprocess("!!! --- ...") == []
    toks = preprocess("SSL+thrift, clients' servers.")
    assert toks == ["ssl", "thrift", "client", "server"]
    assert all(t.isalnum() for t in toks)


def test_no_stop_word_removal():
    assert preprocess("the and of") == ["the", "and", "of"]


@pytest.mark.parametrize("word,expected", [
    ("caresses", "caress"), ("ponies", "poni"), ("ties", "ti"), ("caress", "caress"), ("cats", "cat"),
    ("feed", "feed"), ("agreed", "agre"), ("plastered", "plaster"), ("motoring", "motor"), ("sing", "sing"),
    ("conflated", "conflat"), ("hopping", "hop"), ("falling", "fall"), ("happy", "happi"),
    ("relational", "relat"), ("generalizations", "gener"), ("oscillators", "oscil"),
])
def test_porter_reference_vectors(word, expected):
    assert stem(word) == expected


def test_porter_frozen_fixture():
    pairs = [line.split("\t") for line in (FIXTURES / "porter_pairs.tsv").read_text().splitlines()]
    wrong = [(w, s, stem(w)) for w, s in pairs if stem(w) != s]
    assert len(pairs) > 2000 and wrong == []


def test_porter_against_nltk_live():
    porter = pytest.importorskip("nltk.stem.porter")
    ps = porter.PorterStemmer(mode=porter.PorterStemmer.MARTIN_EXTENSIONS)
    rng = np.random.default_rng(5)
    letters = list("abcdefghilmnoprstuyz")
    words = ["".join(rng.choice(letters, rng.integers(3, 12))) + sfx
             for sfx in ("", "ing", "ed", "ation", "ness", "ly", "ies", "izer", "ical", "ement")
             for _ in range(100)]
    assert [stem(w) for w in words] == [ps.stem(w) for w in words]


# ---------------------------------------------------------------- VSM

def test_vsm_identity_and_disjoint():
    stats = CorpusStats.from_documents([["a", "b"], ["c"], ["d"]])
    assert vsm_similarity(["a", "b"], ["a", "b"], stats) == pytest.approx(1.0)
    assert vsm_similarity(["a"], ["c"], stats) == 0.0
    assert vsm_similarity([], [], stats) == 0.0


def test_vsm_hand_computed():
    docs = [["encrypt", "wire"], ["encrypt", "client", "server", "wire"], ["client", "monitor"]]
    stats = CorpusStats.from_documents(docs)
    idf = {"encrypt": math.log(3 / 2), "wire": math.log(3 / 2), "client": math.log(3 / 2),
           "server": math.log(3 / 1), "monitor": math.log(3 / 1)}
    a = {"encrypt": idf["encrypt"], "wire": idf["wire"]}
    b = {"encrypt": idf["encrypt"], "client": idf["client"], "server": idf["server"], "wire": idf["wire"]}
    dot = sum(a[t] * b.get(t, 0) for t in a)
    expected = dot / (math.sqrt(sum(v * v for v in a.values())) * math.sqrt(sum(v * v for v in b.values())))
    assert vsm_similarity(docs[0], docs[1], stats) == pytest.approx(expected, abs=1e-12)
    assert vsm_similarity(docs[1], docs[0], stats) == pytest.approx(expected, abs=1e-12)


def test_vsm_unseen_terms_use_df_one():
    stats = CorpusStats.from_documents([["a"], ["a"]])
    assert stats.idf("zzz") == pytest.approx(math.log(2))


def test_vsm_zero_vector_falls_back_to_tf():
    # every term occurs in every document: tf-idf vanishes, raw tf cosine is used
    stats = CorpusStats.from_documents([["a", "b"], ["a", "b"]])
    assert vsm_similarity(["a", "a", "b"], ["a", "b"], stats) == pytest.approx(3 / math.sqrt(5 * 2))


# ---------------------------------------------------------------- JSD

def test_jsd_identity_and_disjoint():
    assert jsd_similarity(["a", "b", "a"], ["b", "a", "a"]) == pytest.approx(1.0)
    assert jsd_similarity(["a"], ["b"]) == pytest.approx(0.0)
    assert jsd_similarity([], []) == 0.0


def test_jsd_brute_force():
    p = {"a": 2 / 3, "b": 1 / 3}
    q = {"a": 1 / 3, "b": 2 / 3}
    m = {t: (p[t] + q[t]) / 2 for t in p}
    kl = lambda x: sum(x[t] * math.log2(x[t] / m[t]) for t in x)
    expected = 1 - (0.5 * kl(p) + 0.5 * kl(q))
    assert jsd_similarity(["a", "a", "b"], ["a", "b", "b"]) == pytest.approx(expected, abs=1e-12)


# ---------------------------------------------------------------- BLEU

def _brute_bleu(cand, ref):
    orders = min(4, len(cand))
    logs = []
    for n in range(1, orders + 1):
        cg = [tuple(cand[i:i + n]) for i in range(len(cand) - n + 1)]
        rg = [tuple(ref[i:i + n]) for i in range(len(ref) - n + 1)]
        clipped = sum(min(cg.count(g), rg.count(g)) for g in set(cg))
        logs.append(math.log(clipped / len(cg)) if clipped else math.log(1 / (2 * len(cand))))
    bp = 1.0 if len(cand) > len(ref) else math.exp(1 - len(ref) / len(cand))
    return bp * math.exp(sum(logs) / orders)


def test_bleu_identity_and_brevity():
    s = "a b c d e".split()
    assert bleu_similarity(s, s) == pytest.approx(1.0)
    got = bleu_similarity("a b c d".split(), "a b c d e".split())
    assert got == pytest.approx(math.exp(1 - 5 / 4))
    assert got == pytest.approx(_brute_bleu("a b c d".split(), "a b c d e".split()))


def test_bleu_no_overlap_is_floor_level():
    c = "p q r s".split()
    assert bleu_similarity(c, "w x y z".split()) <= 1 / (2 * len(c)) * (1 + 1e-12)


def test_bleu_asymmetric():
    a, b = "a b c d e f".split(), "a b c d".split()
    assert bleu_similarity(a, b) != bleu_similarity(b, a)


@pytest.mark.parametrize("seed", range(5))
def test_bleu_random_against_brute(seed):
    rng = np.random.default_rng(seed)
    cand = list(rng.choice(list("abcd"), rng.integers(1, 9)))
    ref = list(rng.choice(list("abcd"), rng.integers(1, 9)))
    assert bleu_similarity(cand, ref) == pytest.approx(min(1.0, _brute_bleu(cand, ref)), abs=1e-12)


# ---------------------------------------------------------------- greedy / optimum

def test_greedy_subset_and_disjoint():
    assert greedy_similarity(["a", "b"], ["a", "b", "c"]) == 1.0
    assert greedy_similarity(["a"], ["b"]) == 0.0
    assert greedy_similarity([], ["b"]) == 0.0


def _matrix_sim(terms_a, terms_b, matrix):
    lookup = {(x, y): matrix[i, j] for i, x in enumerate(terms_a) for j, y in enumerate(terms_b)}
    return lambda x, y: lookup[(x, y)]


def test_greedy_random_matrix():
    rng = np.random.default_rng(0)
    m = rng.random((3, 3))
    a, b = ["x1", "x2", "x3"], ["y1", "y2", "y3"]
    expected = sum(max(m[i, j] for j in range(3)) for i in range(3)) / 3
    assert greedy_similarity(a, b, _matrix_sim(a, b, m)) == pytest.approx(expected)


def test_optimum_brute_force_injections():
    rng = np.random.default_rng(1)
    m = rng.random((2, 3))
    a, b = ["x1", "x2"], ["y1", "y2", "y3"]
    best = max(m[0, j] + m[1, k] for j, k in itertools.permutations(range(3), 2))
    assert optimum_similarity(a, b, _matrix_sim(a, b, m)) == pytest.approx(best / 3)


def test_optimum_identity_and_disjoint():
    assert optimum_similarity(["a", "b", "a"], ["a", "b", "a"]) == 1.0
    assert optimum_similarity(["a"], ["b"]) == 0.0
    assert optimum_similarity([], []) == 0.0


def test_optimum_exact_shortcut_matches_assignment():
    a, b = list("abcde"), list("cdefgh")
    via_matrix = optimum_similarity(a, b, lambda x, y: float(x == y))
    assert via_matrix == optimum_similarity(a, b) == pytest.approx(3 / 6)


def test_term_sim_exact():
    assert term_sim_exact("run", "run") == 1.0
    assert term_sim_exact("run", "walk") == 0.0
    rng = np.random.default_rng(2)
    assert all(term_sim_exact(t, t) == 1.0 for t in ("".join(rng.choice(list("xyz"), 4)) for _ in range(100)))


def test_dispatcher_rejects_unknown():
    with pytest.raises(ValueError):
        similarity("CMC", ["a"], ["a"])


def test_counter_based_distribution_sums_to_one():
    toks = "a b b c c c".split()
    c = Counter(toks)
    assert sum(v / len(toks) for v in c.values()) == pytest.approx(1.0)
