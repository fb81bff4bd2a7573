"""QDTrees-style record files and per-source/per-split composition statistics."""
from __future__ import annotations

import json
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .core import Kind, TokenSeq, parse_linear, validate

log = logging.getLogger(__name__)

COMPOSITION = "composition"
CONJUNCTION = "conjunction"
SOURCES = ("CWQ", "LC", "other")
SPLITS = ("train", "dev", "test")


@dataclass(frozen=True)
class QdtRecord:
    id: str
    source: str
    split: str
    question: str
    qdt: str
    comp_types: frozenset = frozenset()

    def to_json(self) -> dict:
        return {
            "id": self.id, "source": self.source, "split": self.split,
            "question": self.question, "qdt": self.qdt,
            "comp_types": sorted(self.comp_types),
        }


def comp_types(qdt: str | TokenSeq) -> frozenset:
    """Composition iff an inner question exists; conjunction iff some question has >= 2 descriptions."""
    seq = TokenSeq.of(qdt)
    out = set()
    if any(t.kind is Kind.INQL for t in seq):
        out.add(COMPOSITION)
    tree = parse_linear(seq)
    if any(len(q.descriptions) >= 2 for q in tree.question_nodes()):
        out.add(CONJUNCTION)
    return frozenset(out)


@dataclass
class LoadResult:
    records: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)


def _record_from(obj: dict, lineno: int, diagnostics: list) -> QdtRecord | None:
    missing = [k for k in ("id", "question", "qdt") if k not in obj]
    if missing:
        diagnostics.append(f"line {lineno}: missing field(s) {', '.join(missing)}")
        return None
    source = obj.get("source", "other")
    split = obj.get("split", "train")
    if source not in SOURCES:
        source = "other"
    if split not in SPLITS:
        diagnostics.append(f"line {lineno}: unknown split {split!r}")
        return None
    report = validate(obj["qdt"], obj["question"])
    if not report.valid:
        codes = ", ".join(sorted({i.code for i in report.errors}))
        diagnostics.append(f"line {lineno} ({obj['id']}): invalid qdt: {codes}")
        return None
    types = comp_types(obj["qdt"])
    stored = obj.get("comp_types")
    if stored is not None and frozenset(stored) != types:
        diagnostics.append(f"line {lineno} ({obj['id']}): stored comp_types {sorted(stored)} "
                           f"differ from derived {sorted(types)}")
    return QdtRecord(str(obj["id"]), source, split, obj["question"], obj["qdt"], types)


def parse_records(lines: Iterable[str]) -> LoadResult:
    result = LoadResult()
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            result.diagnostics.append(f"line {lineno}: not a JSON record ({e.msg})")
            continue
        if not isinstance(obj, dict):
            result.diagnostics.append(f"line {lineno}: not a JSON object")
            continue
        rec = _record_from(obj, lineno, result.diagnostics)
        if rec is not None:
            result.records.append(rec)
    for d in result.diagnostics:
        log.warning(d)
    return result


def load_dataset(path: str | Path) -> LoadResult:
    with open(path, encoding="utf-8") as f:
        return parse_records(f)


def save_dataset(records: Iterable[QdtRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec.to_json(), ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------

@dataclass
class StatsRow:
    comp: int = 0
    conj: int = 0
    both: int = 0
    total: int = 0

    def add(self, types: frozenset) -> None:
        self.total += 1
        self.comp += COMPOSITION in types
        self.conj += CONJUNCTION in types
        self.both += COMPOSITION in types and CONJUNCTION in types

    def __iadd__(self, other: "StatsRow"):
        self.comp += other.comp
        self.conj += other.conj
        self.both += other.both
        self.total += other.total
        return self

    def as_tuple(self):
        return (self.comp, self.conj, self.both, self.total)


@dataclass
class StatsTable:
    rows: dict = field(default_factory=dict)  # (source, split) -> StatsRow

    def source_total(self, source: str) -> StatsRow:
        out = StatsRow()
        for (src, _), row in self.rows.items():
            if src == source:
                out += row
        return out

    def total(self) -> StatsRow:
        out = StatsRow()
        for row in self.rows.values():
            out += row
        return out

    def render(self) -> str:
        lines = [f"{'Source':<10}{'Comp.':>8}{'Conj.':>8}{'Comp.&Conj.':>13}{'Total':>8}"]

        def fmt(name, row):
            c, j, b, t = row.as_tuple()
            return f"{name:<10}{c:>8,}{j:>8,}{b:>13,}{t:>8,}"

        sources = [s for s in SOURCES if any(k[0] == s for k in self.rows)]
        for src in sources:
            lines.append(fmt(src, self.source_total(src)))
            for split in SPLITS:
                if (src, split) in self.rows:
                    lines.append(fmt("  " + split.capitalize(), self.rows[(src, split)]))
        lines.append(fmt("Total", self.total()))
        return "\n".join(lines)

    def to_json(self) -> dict:
        out = {f"{s}/{p}": dict(zip(("comp", "conj", "both", "total"), r.as_tuple()))
               for (s, p), r in sorted(self.rows.items())}
        out["Total"] = dict(zip(("comp", "conj", "both", "total"), self.total().as_tuple()))
        return out


def stats(records: Iterable[QdtRecord]) -> StatsTable:
    rows: dict = defaultdict(StatsRow)
    for rec in records:
        rows[(rec.source, rec.split)].add(rec.comp_types or comp_types(rec.qdt))
    return StatsTable(dict(rows))
