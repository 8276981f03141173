"""Requirement-to-commit linking, touched/untouched file sets and release boundaries."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from .corpus import DEFAULT_CLASS_EXTENSIONS, ChangeKind, Corpus, Requirement
from .errors import OrphanCommit

log = logging.getLogger(__name__)

PRE_HISTORY = "<pre-history>"


@dataclass(frozen=True)
class LinkConfig:
    project_key: str
    regex_template: str = ".*{key}-([0-9]+).*"
    class_extensions: tuple[str, ...] = DEFAULT_CLASS_EXTENSIONS

    @property
    def pattern(self) -> str:
        return self.regex_template.format(key=re.escape(self.project_key))

    @property
    def scanner(self) -> re.Pattern:
        # The template's greedy ``.*`` wrappers only matter for whole-message
        # matching; strip them so finditer reports every occurrence.
        core = self.regex_template.replace(".*", "")
        return re.compile(core.format(key=re.escape(self.project_key)))

    def is_class(self, path: str) -> bool:
        return path.endswith(tuple(self.class_extensions))


def referenced_keys(message: str, config: LinkConfig) -> list[str]:
    """Requirement keys mentioned in a commit message, in order of first mention."""
    keys = []
    for m in config.scanner.finditer(message):
        key = f"{config.project_key}-{m.group(1)}"
        if key not in keys:
            keys.append(key)
    return keys


@dataclass(frozen=True)
class RequirementChange:
    requirement: Requirement
    linked_commits: tuple[str, ...]
    touched_files: frozenset[str]
    untouched_files: frozenset[str]
    first_commit_id: str
    first_position: int

    @property
    def key(self):
        return self.requirement.key

    @property
    def candidates(self) -> frozenset[str]:
        return self.touched_files | self.untouched_files


@dataclass(frozen=True)
class ReleaseBoundary:
    release_id: str
    boundary_commit_id: str
    # position of the boundary in corpus order, -1 for the pre-history marker
    boundary_position: int


@dataclass
class LinkResult:
    changes: list[RequirementChange]
    unlinked: list[str]
    linked_commit_count: int = 0
    commit_count: int = 0

    def by_key(self) -> dict[str, RequirementChange]:
        return {c.key: c for c in self.changes}

    def report(self) -> dict:
        rows = []
        for ch in self.changes:
            rows.append({
                "key": ch.key,
                "kind": ch.requirement.kind.value,
                "status": "linked",
                "commits": list(ch.linked_commits),
                "first_commit": ch.first_commit_id,
                "touched": len(ch.touched_files),
                "untouched": len(ch.untouched_files),
            })
        for key in self.unlinked:
            rows.append({"key": key, "status": "unlinked", "commits": [], "touched": 0, "untouched": 0})
        rows.sort(key=lambda r: r["key"])
        return {
            "linked": len(self.changes),
            "unlinked": len(self.unlinked),
            "commits": self.commit_count,
            "linked_commits": self.linked_commit_count,
            "linked_commit_ratio": (self.linked_commit_count / self.commit_count) if self.commit_count else 0.0,
            "requirements": rows,
        }


def touched_files(corpus: Corpus, commit_ids, config: LinkConfig) -> frozenset[str]:
    """Union of class-file paths changed by the given commits."""
    out = set()
    for cid in commit_ids:
        for f in corpus.commit(cid).file_changes:
            if config.is_class(f.path):
                out.add(f.path)
    return frozenset(out)


class SnapshotIndex:
    """Replays Added/Modified/Deleted events to answer "which class files exist at commit k".

    Snapshots are materialised lazily for requested positions, in a single forward pass.
    """

    def __init__(self, corpus: Corpus, config: LinkConfig):
        self.corpus = corpus
        self.config = config
        self.first_seen = {}  # path -> timestamp of its first appearance
        for c in corpus.commits:
            for f in c.file_changes:
                if config.is_class(f.path) and f.kind != ChangeKind.DELETED:
                    self.first_seen.setdefault(f.path, c.timestamp)
        self._cache = {}

    def prepare(self, positions):
        wanted = sorted(set(positions) - set(self._cache))
        if not wanted:
            return
        live = set()
        j = 0
        for i, c in enumerate(self.corpus.commits):
            if i > wanted[-1]:
                break
            for f in c.file_changes:
                if not self.config.is_class(f.path):
                    continue
                if f.kind == ChangeKind.DELETED:
                    live.discard(f.path)
                else:
                    live.add(f.path)
            while j < len(wanted) and wanted[j] == i:
                self._cache[i] = frozenset(live)
                j += 1

    def at(self, position: int) -> frozenset[str]:
        """Class files existing after applying commits[0..position] inclusive."""
        if position < 0:
            return frozenset()
        if position not in self._cache:
            self.prepare([position])
        return self._cache[position]


def untouched_files(corpus: Corpus, requirement: Requirement, first_position: int, touched,
                    config: LinkConfig, snapshots: SnapshotIndex | None = None) -> frozenset[str]:
    snapshots = snapshots or SnapshotIndex(corpus, config)
    present = snapshots.at(first_position)
    return frozenset(p for p in present
                     if snapshots.first_seen.get(p, requirement.created) <= requirement.created
                     and p not in touched)


def link(corpus: Corpus, config: LinkConfig) -> LinkResult:
    """Attach each requirement to the commits whose message mentions its key."""
    known = corpus.requirement_index
    commits_for = {}
    linked_commits = 0
    for c in corpus.commits:
        hit = False
        for key in referenced_keys(c.message, config):
            if key in known:
                commits_for.setdefault(key, []).append(c.id)
                hit = True
        linked_commits += hit

    snapshots = SnapshotIndex(corpus, config)
    index = corpus.commit_index
    snapshots.prepare(index[ids[0]] for ids in commits_for.values())

    changes, unlinked = [], []
    for req in corpus.requirements:
        ids = commits_for.get(req.key)
        if not ids:
            unlinked.append(req.key)
            continue
        # commits were appended in corpus order, so ids[0] is the (timestamp, id)-minimum
        first = ids[0]
        touched = touched_files(corpus, ids, config)
        untouched = untouched_files(corpus, req, index[first], touched, config, snapshots)
        changes.append(RequirementChange(req, tuple(ids), touched, untouched, first, index[first]))
    changes.sort(key=lambda ch: (ch.first_position, ch.key))
    if unlinked:
        log.info("%d requirement(s) have no linked commit", len(unlinked))
    return LinkResult(changes, unlinked, linked_commits, len(corpus.commits))


def release_boundaries(corpus: Corpus, changes, warnings: list | None = None) -> list[ReleaseBoundary]:
    """Per release: the parent of the earliest linked commit among that release's requirements."""
    earliest = {}
    for ch in changes:
        rid = ch.requirement.release_id
        if rid is None:
            continue
        if rid not in earliest or ch.first_position < earliest[rid].first_position:
            earliest[rid] = ch
    order = list(corpus.releases) if corpus.releases is not None else sorted(earliest)
    index = corpus.commit_index
    root_position = 0
    out = []
    for rid in order:
        ch = earliest.get(rid)
        if ch is None:
            msg = f"release {rid} has no linked requirement; omitted"
            log.warning(msg)
            if warnings is not None:
                warnings.append(msg)
            continue
        commit = corpus.commit(ch.first_commit_id)
        parents = [p for p in commit.parent_ids if p in index]
        if not parents:
            if ch.first_position != root_position:
                raise OrphanCommit(commit.id, rid)
            out.append(ReleaseBoundary(rid, PRE_HISTORY, -1))
            continue
        # for merges take the latest parent that still precedes the commit
        parent = max(parents, key=lambda p: index[p])
        out.append(ReleaseBoundary(rid, parent, index[parent]))
    return out


def history_anchors(corpus: Corpus, changes, granularity="release", boundaries=None) -> dict[str, int]:
    """Map requirement key -> first commit position that is *not* visible as history.

    ``requirement`` granularity: everything strictly before the requirement's first
    linked commit.  ``release`` granularity: everything up to and including the
    release boundary commit; requirements without a resolvable release fall back to
    the requirement rule.
    """
    if granularity not in ("release", "requirement"):
        raise ValueError(f"unknown granularity {granularity!r}")
    anchors = {ch.key: ch.first_position for ch in changes}
    if granularity == "requirement":
        return anchors
    if boundaries is None:
        boundaries = release_boundaries(corpus, changes)
    cut = {b.release_id: b.boundary_position + 1 for b in boundaries}
    for ch in changes:
        rid = ch.requirement.release_id
        if rid in cut:
            anchors[ch.key] = min(cut[rid], ch.first_position)
    return anchors
