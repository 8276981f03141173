"""Parsing of commit-log / issue exports into an immutable, time-ordered corpus.

Inputs are JSON-lines files::

    commits.jsonl  {"id", "parents": [...], "timestamp", "message", "files": [{"path", "kind"}]}
    issues.jsonl   {"key", "type", "summary", "description", "created", "fixVersion"}
    releases.txt   one release id per line, oldest first
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Iterable

from .errors import (
    DuplicateCommit,
    DuplicateRequirement,
    KeyPrefixMismatch,
    MalformedRecord,
    UnknownRelease,
)

DEFAULT_CLASS_EXTENSIONS = (".java",)


class ChangeKind(str, Enum):
    ADDED = "Added"
    MODIFIED = "Modified"
    DELETED = "Deleted"


class RequirementKind(str, Enum):
    NEW_FEATURE = "NewFeature"
    BUG = "Bug"
    OTHER = "Other"


@dataclass(frozen=True)
class FileChange:
    path: str
    kind: ChangeKind


@dataclass(frozen=True)
class Commit:
    id: str
    parent_ids: tuple[str, ...]
    timestamp: datetime
    message: str
    file_changes: tuple[FileChange, ...] = ()

    @property
    def order_key(self):
        return (self.timestamp, self.id)


@dataclass(frozen=True)
class Requirement:
    key: str
    kind: RequirementKind
    title: str
    description: str
    created: datetime
    release_id: str | None = None

    @property
    def text(self):
        return f"{self.title}\n{self.description}" if self.description else self.title


@dataclass(frozen=True)
class Corpus:
    project_key: str
    commits: tuple[Commit, ...] = ()
    requirements: tuple[Requirement, ...] = ()
    releases: tuple[str, ...] | None = None

    @cached_property
    def commit_index(self) -> dict[str, int]:
        """Commit id -> position in the (timestamp, id) order."""
        return {c.id: i for i, c in enumerate(self.commits)}

    @cached_property
    def requirement_index(self) -> dict[str, Requirement]:
        return {r.key: r for r in self.requirements}

    def commit(self, commit_id: str) -> Commit:
        return self.commits[self.commit_index[commit_id]]


def parse_timestamp(value: str) -> datetime:
    """ISO-8601 -> aware UTC datetime truncated to whole seconds. Naive input is taken as UTC."""
    if not isinstance(value, str):
        raise ValueError(f"timestamp must be a string, got {type(value).__name__}")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _records(lines: Iterable[str], source=None):
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecord(lineno, f"invalid JSON ({exc.msg})", source) from None
        if not isinstance(record, dict):
            raise MalformedRecord(lineno, "record is not an object", source)
        yield lineno, record


def _commit_from_record(lineno, rec, source):
    try:
        cid = rec["id"]
        parents = rec.get("parents", [])
        ts = parse_timestamp(rec["timestamp"])
        message = rec.get("message", "")
        files = rec.get("files", [])
        if not isinstance(cid, str) or not cid:
            raise ValueError("id must be a non-empty string")
        if not isinstance(parents, list) or not all(isinstance(p, str) for p in parents):
            raise ValueError("parents must be a list of strings")
        if not isinstance(message, str):
            raise ValueError("message must be a string")
        changes = []
        for f in files:
            path = f["path"]
            if not isinstance(path, str) or not path:
                raise ValueError("file path must be a non-empty string")
            changes.append(FileChange(path, ChangeKind(f["kind"])))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedRecord(lineno, str(exc), source) from None
    return Commit(cid, tuple(parents), ts, message, tuple(changes))


def parse_commit_log(lines: Iterable[str], source=None) -> tuple[Commit, ...]:
    """Parse commit records and return them sorted by (timestamp, id)."""
    commits = []
    seen = set()
    for lineno, rec in _records(lines, source):
        commit = _commit_from_record(lineno, rec, source)
        if commit.id in seen:
            raise DuplicateCommit(commit.id)
        seen.add(commit.id)
        commits.append(commit)
    commits.sort(key=lambda c: c.order_key)
    return tuple(commits)


_KIND_ALIASES = {
    "newfeature": RequirementKind.NEW_FEATURE,
    "feature": RequirementKind.NEW_FEATURE,
    "bug": RequirementKind.BUG,
}


def map_issue_type(value: str) -> RequirementKind:
    norm = "".join(ch for ch in value.lower() if ch.isalnum())
    return _KIND_ALIASES.get(norm, RequirementKind.OTHER)


def parse_issues(lines: Iterable[str], project_key: str, source=None) -> tuple[Requirement, ...]:
    """Parse issue records; rows whose key is not ``<project_key>-<n>`` are rejected."""
    prefix = f"{project_key}-"
    reqs = []
    seen = set()
    for lineno, rec in _records(lines, source):
        try:
            key = rec["key"]
            if not isinstance(key, str):
                raise ValueError("key must be a string")
            kind = map_issue_type(rec.get("type") or "")
            title = rec.get("summary") or ""
            description = rec.get("description") or ""
            created = parse_timestamp(rec["created"])
            release = rec.get("fixVersion")
            if release is not None and not isinstance(release, str):
                raise ValueError("fixVersion must be a string or null")
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedRecord(lineno, str(exc), source) from None
        if not key.startswith(prefix) or not key[len(prefix):].isdigit():
            raise KeyPrefixMismatch(key, project_key)
        if key in seen:
            raise DuplicateRequirement(key)
        seen.add(key)
        reqs.append(Requirement(key, kind, title, description, created, release or None))
    reqs.sort(key=lambda r: (r.created, r.key))
    return tuple(reqs)


def parse_releases(lines: Iterable[str]) -> tuple[str, ...]:
    return tuple(line.strip() for line in lines if line.strip())


def build_corpus(project_key, commits=(), requirements=(), releases=None) -> Corpus:
    if releases is not None:
        known = set(releases)
        for req in requirements:
            if req.release_id is not None and req.release_id not in known:
                raise UnknownRelease(req.key, req.release_id)
    return Corpus(project_key, tuple(commits), tuple(requirements),
                  tuple(releases) if releases is not None else None)


def load_corpus(project_key, commits_path, issues_path, releases_path=None) -> Corpus:
    with open(commits_path, encoding="utf-8") as fh:
        commits = parse_commit_log(fh, source=str(commits_path))
    with open(issues_path, encoding="utf-8") as fh:
        reqs = parse_issues(fh, project_key, source=str(issues_path))
    releases = None
    if releases_path:
        with open(releases_path, encoding="utf-8") as fh:
            releases = parse_releases(fh)
    return build_corpus(project_key, commits, reqs, releases)


def dump_commits(commits: Iterable[Commit]) -> list[str]:
    out = []
    for c in commits:
        out.append(json.dumps({
            "id": c.id,
            "parents": list(c.parent_ids),
            "timestamp": format_timestamp(c.timestamp),
            "message": c.message,
            "files": [{"path": f.path, "kind": f.kind.value} for f in c.file_changes],
        }, ensure_ascii=False))
    return out


_KIND_TO_TYPE = {
    RequirementKind.NEW_FEATURE: "New Feature",
    RequirementKind.BUG: "Bug",
    RequirementKind.OTHER: "Other",
}


def dump_issues(requirements: Iterable[Requirement]) -> list[str]:
    return [json.dumps({
        "key": r.key,
        "type": _KIND_TO_TYPE[r.kind],
        "summary": r.title,
        "description": r.description,
        "created": format_timestamp(r.created),
        "fixVersion": r.release_id,
    }, ensure_ascii=False) for r in requirements]


def write_corpus(corpus: Corpus, directory) -> dict[str, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = {"commits": directory / "commits.jsonl", "issues": directory / "issues.jsonl"}
    paths["commits"].write_text("".join(l + "\n" for l in dump_commits(corpus.commits)), encoding="utf-8")
    paths["issues"].write_text("".join(l + "\n" for l in dump_issues(corpus.requirements)), encoding="utf-8")
    if corpus.releases is not None:
        paths["releases"] = directory / "releases.txt"
        paths["releases"].write_text("".join(r + "\n" for r in corpus.releases), encoding="utf-8")
    return paths


@dataclass
class ValidationReport:
    commits: int
    requirements: dict[str, int]
    distinct_files: int
    distinct_class_files: int
    warnings: list[str] = field(default_factory=list)

    def to_dict(self):
        return {
            "commits": self.commits,
            "requirements": self.requirements,
            "distinct_files": self.distinct_files,
            "distinct_class_files": self.distinct_class_files,
            "warnings": list(self.warnings),
        }


def validate(corpus: Corpus, class_extensions=DEFAULT_CLASS_EXTENSIONS) -> ValidationReport:
    counts = {k.value: 0 for k in RequirementKind}
    for r in corpus.requirements:
        counts[r.kind.value] += 1
    paths = {f.path for c in corpus.commits for f in c.file_changes}
    classes = {p for p in paths if p.endswith(tuple(class_extensions))}
    warnings = []
    if corpus.commits:
        last = max(c.timestamp for c in corpus.commits)
        for r in corpus.requirements:
            if r.created > last:
                warnings.append(f"{r.key} created {format_timestamp(r.created)} after the last commit")
    known = {c.id for c in corpus.commits}
    for c in corpus.commits:
        missing = [p for p in c.parent_ids if p not in known]
        if missing:
            warnings.append(f"commit {c.id} references unknown parent(s) {', '.join(missing)}")
    return ValidationReport(len(corpus.commits), counts, len(paths), len(classes), warnings)
