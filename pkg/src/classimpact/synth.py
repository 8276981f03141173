"""Synthetic corpora with a planted requirement-vocabulary signal.

Classes are grouped into topics.  Every topic owns a private vocabulary and
each feature requirement is written in the vocabulary of one topic and touches
every class of that topic.  A class's Requirements Set therefore speaks the same
words as the requirements that will change it next, while the external metrics
are pure noise.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from .corpus import ChangeKind, Commit, Corpus, FileChange, Requirement, RequirementKind, build_corpus
from .metrics import EXTERNAL_METRICS, ExternalMetricsTable
from .textsim import preprocess

_ONSETS = "b c d f g h j k l m n p r s t v z".split()
_VOWELS = "a e i o u".split()
EPOCH = datetime(2015, 1, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class SynthSpec:
    project_key: str = "SYN"
    topics: int = 20
    classes_per_topic: int = 10
    requirements: int = 80
    words_per_topic: int = 7
    words_per_requirement: int = 6  # distinct topic words, so two requirements of a topic share >= 5 of them
    shared_words: int = 15  # vocabulary every topic draws from
    shared_per_requirement: int = 1
    bugs: int = 10
    releases: int = 4
    seed: int = 7


@dataclass
class SynthCorpus:
    corpus: Corpus
    externals: ExternalMetricsTable
    topic_of: dict[str, int]  # class path -> topic
    vocab: list[list[str]]

    def write(self, directory) -> dict[str, Path]:
        from .corpus import write_corpus

        paths = write_corpus(self.corpus, directory)
        paths["externals"] = Path(directory) / "externals.csv"
        write_externals(self.externals, paths["externals"])
        return paths


def _words(rng, count, taken):
    """Pronounceable pseudo-words whose stems are pairwise distinct."""
    out = []
    while len(out) < count:
        w = "".join(rng.choice(_ONSETS) + rng.choice(_VOWELS) for _ in range(3)) + rng.choice(_ONSETS)
        stem = preprocess(w)
        if len(stem) == 1 and stem[0] not in taken:
            taken.add(stem[0])
            out.append(w)
    return out


def generate(spec: SynthSpec = SynthSpec()) -> SynthCorpus:
    rng = np.random.default_rng(spec.seed)
    taken: set[str] = set()
    shared = _words(rng, spec.shared_words, taken)
    vocab = [_words(rng, spec.words_per_topic, taken) for _ in range(spec.topics)]
    classes = {t: [f"src/main/java/org/syn/t{t:02d}/C{t:02d}x{j:02d}.java" for j in range(spec.classes_per_topic)]
               for t in range(spec.topics)}
    topic_of = {c: t for t, cs in classes.items() for c in cs}

    # every topic appears once before topics repeat, so later requirements have history
    order = list(rng.permutation(spec.topics))
    while len(order) < spec.requirements:
        order.append(int(rng.integers(spec.topics)))
    order = order[:spec.requirements]

    releases = [f"{i + 1}.0" for i in range(spec.releases)]
    per_release = -(-spec.requirements // spec.releases)

    commits = [Commit("c0000", (), EPOCH, "initial import",
                      tuple(FileChange(c, ChangeKind.ADDED) for c in sorted(topic_of)))]
    reqs = []
    step = timedelta(days=1)
    number = 0
    for i, t in enumerate(order):
        number += 1
        key = f"{spec.project_key}-{number}"
        words = list(rng.choice(vocab[t], spec.words_per_requirement, replace=False)) + \
            list(rng.choice(shared, spec.shared_per_requirement, replace=False))
        rng.shuffle(words)
        half = len(words) // 3
        created = EPOCH + (i + 1) * step
        reqs.append(Requirement(key, RequirementKind.NEW_FEATURE, " ".join(words[:half]), " ".join(words[half:]),
                                created, releases[i // per_release]))
        commits.append(Commit(f"c{len(commits):04d}", (commits[-1].id,), created + timedelta(hours=2),
                              f"{key}: implement {words[0]}",
                              tuple(FileChange(c, ChangeKind.MODIFIED) for c in classes[t])))
        if i < spec.bugs:
            # an unrelated bug fix touching a random class, linked to a bug issue
            number += 1
            bkey = f"{spec.project_key}-{number}"
            victim = sorted(topic_of)[int(rng.integers(len(topic_of)))]
            reqs.append(Requirement(bkey, RequirementKind.BUG, "fix crash", " ".join(rng.choice(shared, 4)),
                                    created + timedelta(hours=3), releases[i // per_release]))
            commits.append(Commit(f"c{len(commits):04d}", (commits[-1].id,), created + timedelta(hours=5),
                                  f"{bkey} fix", (FileChange(victim, ChangeKind.MODIFIED),)))
    corpus = build_corpus(spec.project_key, commits, sorted(reqs, key=lambda r: (r.created, r.key)), releases)
    return SynthCorpus(corpus, noise_externals(releases, sorted(topic_of), rng), topic_of, vocab)


def noise_externals(releases, class_paths, rng) -> ExternalMetricsTable:
    table = ExternalMetricsTable()
    for rel in releases:
        for c in class_paths:
            table.rows[(rel, c)] = {m: float(np.round(rng.gamma(2.0, 10.0), 3)) for m in EXTERNAL_METRICS}
    return table


def write_externals(table: ExternalMetricsTable, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["release_id", "class_path", "metric", "value"])
        for (rel, c), vals in sorted(table.rows.items()):
            for m, v in vals.items():
                w.writerow([rel, c, m, repr(v)])
