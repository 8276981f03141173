"""Per (requirement, class) metric families.

Families and column names::

    R2RS_<VSM|JSD|GC|OPC|CMC|BC>_<Max|Av|Top5>   similarity to the class's requirements set
    R2C_<VSM|JSD>                               similarity to the class source text
    TLCC_<SCP|Lin|Log>                          temporal locality of past touches
    SQ_* / CKJM_*                               externally computed code metrics

Every history-derived input of a row comes from commits strictly before the
row's requirement was first committed; ``MetricRow.horizon`` records the latest
commit position consulted so this can be audited.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from bisect import bisect_left
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .corpus import Corpus, Requirement, RequirementKind
from .errors import EmptyHistory, NonNumericValue, UnknownMetricName
from .linker import LinkConfig, RequirementChange, history_anchors, release_boundaries
from .textsim import CorpusStats, preprocess, similarity, term_sim_exact

log = logging.getLogger(__name__)

R2RS_TECHNIQUES = ("VSM", "JSD", "GC", "OPC", "CMC", "BC")
DISTRIBUTIONS = ("Max", "Av", "Top5")
R2C_TECHNIQUES = ("VSM", "JSD")
TLCC_VARIANTS = ("SCP", "Lin", "Log")
SQ_METRICS = ("SQ_Com", "SQ_NCLOC", "SQ_Viol")
CKJM_METRICS = ("CKJM_WMC", "CKJM_DIT", "CKJM_NOC", "CKJM_CBO", "CKJM_RFC",
                "CKJM_LCOM", "CKJM_CA", "CKJM_NPM")
EXTERNAL_METRICS = SQ_METRICS + CKJM_METRICS
FAMILIES = ("R2RS", "R2C", "TLCC", "SQ", "CKJM")

REQUIREMENTS_SET_SIZE = 10


def r2rs_name(technique, kind):
    return f"R2RS_{technique}_{kind}"


ALL_FEATURES = (
    tuple(r2rs_name(t, k) for t in R2RS_TECHNIQUES for k in DISTRIBUTIONS)
    + tuple(f"R2C_{t}" for t in R2C_TECHNIQUES)
    + tuple(f"TLCC_{v}" for v in TLCC_VARIANTS)
    + EXTERNAL_METRICS
)


def family_of(feature: str) -> str:
    return feature.split("_", 1)[0]


# ---------------------------------------------------------------- temporal locality

def _check(flags):
    if len(flags) == 0:
        raise EmptyHistory("no prior requirement")


def tlcc_scp(flags: Sequence[int]) -> float:
    """Fraction of prior requirements that touched the class."""
    _check(flags)
    return sum(flags) / len(flags)


def tlcc_lin(flags: Sequence[int]) -> float:
    _check(flags)
    n = len(flags)
    return sum(t / (n - i) for i, t in enumerate(flags)) / n


def tlcc_log(flags: Sequence[int]) -> float:
    """Logarithmic locality; the most recent requirement (lag 0, ln 1 = 0) adds nothing."""
    _check(flags)
    n = len(flags)
    total = 0.0
    for i, t in enumerate(flags):
        lag = n - i  # 1 + N - i with 1-based i
        if t and lag > 1:
            total += 1.0 / math.log(lag)
    return total / n


def tlcc_weights(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Linear and logarithmic weight vectors for a history of length n (oldest first)."""
    lag = np.arange(n, 0, -1, dtype=float)
    lin = 1.0 / lag
    log_w = np.zeros(n)
    log_w[lag > 1] = 1.0 / np.log(lag[lag > 1])
    return lin, log_w


# ---------------------------------------------------------------- distribution scores

def distribution_score(scores: Sequence[float], kind: str) -> float:
    if len(scores) == 0:
        return 0.0
    if kind == "Max":
        return float(max(scores))
    if kind == "Av":
        return float(sum(scores) / len(scores))
    if kind == "Top5":
        top = sorted(scores, reverse=True)[:5]
        return float(sum(top) / len(top))
    raise ValueError(f"unknown distribution score {kind!r}")


# ---------------------------------------------------------------- text families

def requirement_tokens(req: Requirement) -> list[str]:
    return preprocess(req.text)


def r2rs(query: Requirement, members: Sequence[Requirement], technique: str, kind: str,
         stats: CorpusStats | None = None, term_sim=term_sim_exact) -> float:
    """Fold the query's similarity to each requirements-set member."""
    if not members:
        return 0.0
    if technique == "CMC":
        raise NotImplementedError("the Corley-Mihalcea comparator is not available")
    q = requirement_tokens(query)
    scores = [similarity(technique, q, requirement_tokens(m), stats, term_sim) for m in members]
    return distribution_score(scores, kind)


def r2c(query: Requirement, class_text: str, technique: str, stats: CorpusStats | None = None) -> float:
    if technique not in R2C_TECHNIQUES:
        raise ValueError(f"R2C supports only {R2C_TECHNIQUES}")
    return similarity(technique, requirement_tokens(query), preprocess(class_text, split=True), stats)


# ---------------------------------------------------------------- externals

@dataclass
class ExternalMetricsTable:
    rows: dict[tuple[str, str], dict[str, float]] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def get(self, release_id, class_path) -> dict[str, float] | None:
        return self.rows.get((release_id, class_path))

    def __len__(self):
        return sum(len(v) for v in self.rows.values())


def ingest_external(path) -> ExternalMetricsTable:
    """Read ``release_id,class_path,metric,value`` rows; later duplicates win."""
    table = ExternalMetricsTable()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = {"release_id", "class_path", "metric", "value"} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing column(s) {sorted(missing)}")
        for lineno, row in enumerate(reader, start=2):
            name = row["metric"].strip()
            if name not in EXTERNAL_METRICS:
                raise UnknownMetricName(name, lineno)
            try:
                value = float(row["value"])
            except (TypeError, ValueError):
                raise NonNumericValue(row["value"], lineno) from None
            if not math.isfinite(value):
                raise NonNumericValue(row["value"], lineno)
            key = (row["release_id"].strip(), row["class_path"].strip())
            slot = table.rows.setdefault(key, {})
            if name in slot:
                table.warnings.append(f"line {lineno}: duplicate {name} for {key[0]}/{key[1]}; last value kept")
            slot[name] = value
    return table


# ---------------------------------------------------------------- class source text

class ClassTextStore:
    """Versioned class sources: ``{"commit", "path", "text"}`` JSON lines.

    ``text_at(path, cutoff)`` returns the latest version recorded at a commit
    position strictly below ``cutoff``.
    """

    def __init__(self, versions=None):
        self._versions = versions or {}  # path -> sorted [(position, text)]

    @classmethod
    def from_jsonl(cls, path, corpus: Corpus) -> "ClassTextStore":
        index = corpus.commit_index
        versions = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                rec = json.loads(line)
                if rec["commit"] not in index:
                    log.warning("class text for unknown commit %s ignored", rec["commit"])
                    continue
                versions.setdefault(rec["path"], []).append((index[rec["commit"]], rec.get("text", "")))
        for v in versions.values():
            v.sort(key=lambda x: x[0])
        return cls(versions)

    def text_at(self, path: str, cutoff: int) -> tuple[str, int]:
        """(text, position) of the visible version, or ("", -1)."""
        versions = self._versions.get(path)
        if not versions:
            return "", -1
        i = bisect_left(versions, cutoff, key=lambda x: x[0]) - 1
        if i < 0:
            return "", -1
        pos, text = versions[i]
        return text, pos


# ---------------------------------------------------------------- history model

@dataclass(frozen=True)
class ClassHistory:
    class_path: str
    touch_flags: tuple[int, ...]

    @property
    def n(self):
        return len(self.touch_flags)


@dataclass(frozen=True)
class RequirementsSet:
    class_path: str
    members: tuple[str, ...]  # requirement keys, most recent last


@dataclass
class MetricsConfig:
    families: tuple[str, ...] = ("R2RS", "R2C", "TLCC", "SQ", "CKJM")
    r2rs_techniques: tuple[str, ...] = ("VSM", "JSD", "GC", "OPC", "BC")
    distributions: tuple[str, ...] = DISTRIBUTIONS
    r2c_techniques: tuple[str, ...] = R2C_TECHNIQUES
    history_kinds: str = "all"  # "all" linked issues feed histories, or "features" only
    tlcc_granularity: str = "release"
    set_size: int = REQUIREMENTS_SET_SIZE
    term_sim: Callable[[str, str], float] = term_sim_exact

    def feature_names(self) -> tuple[str, ...]:
        names = []
        if "R2RS" in self.families:
            names += [r2rs_name(t, k) for t in self.r2rs_techniques for k in self.distributions]
        if "R2C" in self.families:
            names += [f"R2C_{t}" for t in self.r2c_techniques]
        if "TLCC" in self.families:
            names += [f"TLCC_{v}" for v in TLCC_VARIANTS]
        if "SQ" in self.families:
            names += list(SQ_METRICS)
        if "CKJM" in self.families:
            names += list(CKJM_METRICS)
        return tuple(names)

    def validate(self):
        unknown = set(self.families) - set(FAMILIES)
        if unknown:
            raise ValueError(f"unknown metric families {sorted(unknown)}")
        if not self.families:
            raise ValueError("at least one metric family must be enabled")
        if "CMC" in self.r2rs_techniques:
            raise ValueError("R2RS_CMC_* slots are reserved; the comparator is not implemented")
        bad = set(self.r2rs_techniques) - set(R2RS_TECHNIQUES)
        if bad:
            raise ValueError(f"unknown techniques {sorted(bad)}")
        if self.history_kinds not in ("all", "features"):
            raise ValueError("history_kinds must be 'all' or 'features'")
        if self.tlcc_granularity not in ("release", "requirement"):
            raise ValueError("tlcc_granularity must be 'release' or 'requirement'")


@dataclass
class MetricRow:
    requirement_key: str
    class_path: str
    values: dict[str, float | None]
    horizon: int  # latest commit position read while computing the row, -1 if none
    anchor: int   # first linked commit position of the requirement
    tlcc_empty: bool = False


class _Prior:
    __slots__ = ("change", "commit_files")

    def __init__(self, change, commit_files):
        self.change = change
        self.commit_files = commit_files  # sorted [(position, frozenset of class files)]

    def visible(self, cutoff) -> tuple[frozenset, int]:
        files = set()
        last = -1
        for pos, fs in self.commit_files:
            if pos >= cutoff:
                break
            files |= fs
            last = pos
        return frozenset(files), last


class MetricsBuilder:
    """Computes metric rows for the candidate classes of feature requirements."""

    def __init__(self, corpus: Corpus, changes: Sequence[RequirementChange], link_config: LinkConfig,
                 config: MetricsConfig | None = None, externals: ExternalMetricsTable | None = None,
                 class_texts: ClassTextStore | None = None):
        self.corpus = corpus
        self.config = config or MetricsConfig()
        self.config.validate()
        self.externals = externals
        self.class_texts = class_texts or ClassTextStore()
        self.changes = sorted(changes, key=lambda ch: (ch.first_position, ch.key))
        index = corpus.commit_index
        self._priors = []
        for ch in self.changes:
            if self.config.history_kinds == "features" and ch.requirement.kind != RequirementKind.NEW_FEATURE:
                continue
            per_commit = []
            for cid in ch.linked_commits:
                files = frozenset(f.path for f in corpus.commit(cid).file_changes if link_config.is_class(f.path))
                per_commit.append((index[cid], files))
            per_commit.sort(key=lambda x: x[0])
            self._priors.append(_Prior(ch, per_commit))
        self._prior_positions = [p.change.first_position for p in self._priors]
        self.warnings: list[str] = []
        boundaries = None
        if self.config.tlcc_granularity == "release":
            boundaries = release_boundaries(corpus, self.changes, self.warnings)
        self.tlcc_anchor = history_anchors(corpus, self.changes, self.config.tlcc_granularity, boundaries)
        self._tokens = {}

    def tokens(self, req: Requirement) -> list[str]:
        toks = self._tokens.get(req.key)
        if toks is None:
            toks = self._tokens[req.key] = requirement_tokens(req)
        return toks

    def priors_before(self, cutoff: int) -> list[_Prior]:
        return self._priors[:bisect_left(self._prior_positions, cutoff)]

    def class_history(self, class_path: str, cutoff: int) -> ClassHistory:
        flags = tuple(int(class_path in p.visible(cutoff)[0]) for p in self.priors_before(cutoff))
        return ClassHistory(class_path, flags)

    def requirements_set(self, class_path: str, cutoff: int) -> RequirementsSet:
        members = [p.change.key for p in self.priors_before(cutoff) if class_path in p.visible(cutoff)[0]]
        return RequirementsSet(class_path, tuple(members[-self.config.set_size:]))

    def rows_for(self, change: RequirementChange, candidates=None) -> list[MetricRow]:
        cfg = self.config
        query = change.requirement
        anchor = change.first_position
        candidates = sorted(candidates if candidates is not None else change.candidates)
        names = cfg.feature_names()
        values = {c: {} for c in candidates}
        horizon = {c: -1 for c in candidates}

        # requirement-level history: sets and idf statistics
        priors = self.priors_before(anchor)
        visible = [p.visible(anchor) for p in priors]
        stats_horizon = max((p.change.first_position for p in priors), default=-1)

        q = self.tokens(query)
        stats = None
        if "R2RS" in cfg.families or "R2C" in cfg.families:
            stats = CorpusStats.from_documents([self.tokens(p.change.requirement) for p in priors] + [q])

        if "R2RS" in cfg.families:
            pair_cache = {}
            touched_by = {c: [] for c in candidates}
            for i, (files, last) in enumerate(visible):
                for c in files:
                    if c in touched_by:
                        touched_by[c].append(i)
            for c in candidates:
                members = touched_by[c][-cfg.set_size:]
                member_horizon = max((visible[i][1] for i in members), default=-1)
                horizon[c] = max(horizon[c], member_horizon, stats_horizon if members else -1)
                for tech in cfg.r2rs_techniques:
                    scores = []
                    for i in members:
                        key = (i, tech)
                        if key not in pair_cache:
                            other = self.tokens(priors[i].change.requirement)
                            pair_cache[key] = similarity(tech, q, other, stats, cfg.term_sim)
                        scores.append(pair_cache[key])
                    for kind in cfg.distributions:
                        values[c][r2rs_name(tech, kind)] = distribution_score(scores, kind)

        if "R2C" in cfg.families:
            text_cutoff = self.tlcc_anchor.get(change.key, anchor)
            for c in candidates:
                text, pos = self.class_texts.text_at(c, text_cutoff)
                toks = preprocess(text, split=True)
                for tech in cfg.r2c_techniques:
                    values[c][f"R2C_{tech}"] = similarity(tech, q, toks, stats)
                horizon[c] = max(horizon[c], pos, stats_horizon if toks else -1)

        empty = False
        if "TLCC" in cfg.families:
            cutoff = self.tlcc_anchor.get(change.key, anchor)
            tl_priors = self.priors_before(cutoff)
            tl_visible = [p.visible(cutoff) for p in tl_priors]
            n = len(tl_priors)
            if n == 0:
                empty = True
                for c in candidates:
                    for v in TLCC_VARIANTS:
                        values[c][f"TLCC_{v}"] = 0.0
            else:
                lin_w, log_w = tlcc_weights(n)
                col = {c: j for j, c in enumerate(candidates)}
                flags = np.zeros((len(candidates), n))
                for i, (files, last) in enumerate(tl_visible):
                    for c in files:
                        j = col.get(c)
                        if j is not None:
                            flags[j, i] = 1.0
                scp = flags.sum(axis=1) / n
                lin = flags @ lin_w / n
                lg = flags @ log_w / n
                # an all-zero history still reads every prior requirement's commits
                seen = max((l for _, l in tl_visible), default=-1)
                for c, j in col.items():
                    values[c]["TLCC_SCP"] = float(scp[j])
                    values[c]["TLCC_Lin"] = float(lin[j])
                    values[c]["TLCC_Log"] = float(lg[j])
                    horizon[c] = max(horizon[c], seen)

        ext_names = [m for m in EXTERNAL_METRICS if family_of(m) in cfg.families]
        if ext_names:
            for c in candidates:
                row = self.externals.get(query.release_id, c) if self.externals else None
                for m in ext_names:
                    values[c][m] = None if row is None or m not in row else row[m]

        return [MetricRow(query.key, c, {n_: values[c].get(n_) for n_ in names}, horizon[c], anchor, empty)
                for c in candidates]


def assemble(builder: MetricsBuilder, change: RequirementChange, class_path: str) -> MetricRow:
    """Metric vector for one (requirement, class) pair."""
    return builder.rows_for(change, [class_path])[0]
