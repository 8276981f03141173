"""Minimal ARFF grammar checker and loader (dense format, numeric/nominal/string attributes)."""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, field

_NAME = r"(?:'[^']*'|\"[^\"]*\"|[^\s{},%'\"]+)"
_RELATION = re.compile(rf"^@relation\s+({_NAME})\s*$", re.IGNORECASE)
_ATTRIBUTE = re.compile(rf"^@attribute\s+({_NAME})\s+(.+?)\s*$", re.IGNORECASE)
_NUMERIC_TYPES = {"numeric", "real", "integer"}


@dataclass
class ArffDocument:
    relation: str = ""
    attributes: list[tuple[str, object]] = field(default_factory=list)  # type is a str or a list of labels
    data: list[list[object]] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    @property
    def valid(self):
        return not self.errors


def _unquote(s):
    s = s.strip()
    if len(s) >= 2 and s[0] == s[-1] and s[0] in "'\"":
        return s[1:-1]
    return s


def _split_values(line):
    return next(csv.reader([line], skipinitialspace=True, quotechar="'"))


def parse_arff(text: str) -> ArffDocument:
    doc = ArffDocument()
    section = "header"
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if section == "header":
            if m := _RELATION.match(line):
                if doc.relation:
                    doc.errors.append(f"line {lineno}: duplicate @RELATION")
                doc.relation = _unquote(m.group(1))
                continue
            if not doc.relation:
                doc.errors.append(f"line {lineno}: expected @RELATION first")
                continue
            if m := _ATTRIBUTE.match(line):
                name, typ = _unquote(m.group(1)), m.group(2).strip()
                if typ.lower() in _NUMERIC_TYPES or typ.lower() == "string":
                    doc.attributes.append((name, typ.lower()))
                elif typ.startswith("{") and typ.endswith("}"):
                    labels = [_unquote(v) for v in typ[1:-1].split(",")]
                    if not all(labels):
                        doc.errors.append(f"line {lineno}: empty nominal label")
                    doc.attributes.append((name, labels))
                else:
                    doc.errors.append(f"line {lineno}: unsupported attribute type {typ!r}")
                if name in [a for a, _ in doc.attributes[:-1]]:
                    doc.errors.append(f"line {lineno}: duplicate attribute {name!r}")
                continue
            if line.lower() == "@data":
                if not doc.attributes:
                    doc.errors.append(f"line {lineno}: @DATA before any @ATTRIBUTE")
                section = "data"
                continue
            doc.errors.append(f"line {lineno}: unexpected header line {line[:40]!r}")
            continue
        values = _split_values(line)
        if len(values) != len(doc.attributes):
            doc.errors.append(f"line {lineno}: {len(values)} values for {len(doc.attributes)} attributes")
            continue
        row = []
        for (name, typ), v in zip(doc.attributes, values):
            v = v.strip()
            if v == "?":
                row.append(None)
            elif isinstance(typ, list):
                if _unquote(v) not in typ:
                    doc.errors.append(f"line {lineno}: {v!r} not a label of {name}")
                row.append(_unquote(v))
            elif typ == "string":
                row.append(_unquote(v))
            else:
                try:
                    x = float(v)
                    if not math.isfinite(x):
                        raise ValueError
                except ValueError:
                    doc.errors.append(f"line {lineno}: {v!r} is not numeric ({name})")
                    x = None
                if typ == "integer" and x is not None and x != int(x):
                    doc.errors.append(f"line {lineno}: {v!r} is not an integer ({name})")
                row.append(x)
        doc.data.append(row)
    if section != "data":
        doc.errors.append("missing @DATA section")
    return doc


def check_arff_file(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return parse_arff(fh.read()).errors
