"""S-expression logical forms and their bracketed, label-based rendering.

Normalized form replaces every KB element by a bracketed readable string:
entities by their label, relations and classes by their dotted path written
as a comma-separated word list, literals by their text::

    (JOIN location.location.people_born_here m.02__x)
    (JOIN [location, location, people born here] [Miami Marlins])
"""
from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

from .core import SeqLike, TokenSeq, strip_separators
from .errors import (
    AmbiguousLabel, ArityError, SExprSyntaxError, UnknownElement, UnknownEntity, ValidationFailure,
)

ARITY = {
    "AND": 2, "JOIN": 2, "R": 1, "COUNT": 1, "ARGMAX": 2, "ARGMIN": 2,
    "LT": 2, "LE": 2, "GT": 2, "GE": 2,
}
# operators whose first argument, when a bare dotted identifier, names a class
CLASS_SLOT_OPS = {"AND", "ARGMAX", "ARGMIN"}

FREEBASE_ENTITY = r"[mg]\.[0-9a-zA-Z_]+"
_DOTTED = re.compile(r"[A-Za-z_][\w\-]*(?:\.[\w\-]+)+")


@dataclass(frozen=True)
class Entity:
    id: str


@dataclass(frozen=True)
class Relation:
    path: str


@dataclass(frozen=True)
class Class:
    id: str


@dataclass(frozen=True)
class Literal:
    text: str
    type_tag: str | None = None

    @classmethod
    def parse(cls, raw: str) -> "Literal":
        text, sep, tag = raw.partition("^^")
        return cls(text, tag if sep else None)

    def __str__(self):
        return f"{self.text}^^{self.type_tag}" if self.type_tag else self.text


@dataclass(frozen=True)
class Apply:
    op: str
    args: tuple

    def __post_init__(self):
        if self.op not in ARITY:
            raise SExprSyntaxError(f"unknown operator {self.op!r}")
        if len(self.args) != ARITY[self.op]:
            raise ArityError(f"{self.op} takes {ARITY[self.op]} argument(s), got {len(self.args)}")


SExpr = Union[Apply, Entity, Relation, Class, Literal]


def to_text(expr: SExpr) -> str:
    if isinstance(expr, Apply):
        return "(" + " ".join([expr.op] + [to_text(a) for a in expr.args]) + ")"
    if isinstance(expr, Entity):
        return expr.id
    if isinstance(expr, Relation):
        return expr.path
    if isinstance(expr, Class):
        return expr.id
    return str(expr)


# ---------------------------------------------------------------------------
# Raw S-expression parsing
# ---------------------------------------------------------------------------

def _lex(text: str, bracketed: bool = False) -> list[tuple[str, int]]:
    """Split into ``(``, ``)`` and atoms; with ``bracketed`` a ``[...]`` span is one atom."""
    out = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()":
            out.append((c, i))
            i += 1
        elif bracketed and c == "[":
            level, j = 0, i
            while j < n:
                if text[j] == "[":
                    level += 1
                elif text[j] == "]":
                    level -= 1
                    if level == 0:
                        break
                j += 1
            if j == n:
                raise SExprSyntaxError("unterminated '['", i)
            out.append((text[i:j + 1], i))
            i = j + 1
        elif c == '"':
            j = text.find('"', i + 1)
            if j < 0:
                raise SExprSyntaxError("unterminated string literal", i)
            while j + 1 < n and not text[j + 1].isspace() and text[j + 1] not in "()":
                j += 1
            out.append((text[i:j + 1], i))
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()":
                j += 1
            out.append((text[i:j], i))
            i = j
    return out


def _build(tokens, leaf, text_len: int):
    pos = 0

    def expr(parent_op=None, slot=None):
        nonlocal pos
        if pos >= len(tokens):
            raise SExprSyntaxError("unexpected end of input", text_len)
        tok, at = tokens[pos]
        if tok == ")":
            raise SExprSyntaxError("unexpected ')'", at)
        if tok != "(":
            pos += 1
            return leaf(tok, at, parent_op, slot)
        pos += 1
        if pos >= len(tokens) or tokens[pos][0] in "()":
            raise SExprSyntaxError("expected an operator after '('", tokens[pos][1] if pos < len(tokens) else text_len)
        op, op_at = tokens[pos]
        if op not in ARITY:
            raise SExprSyntaxError(f"unknown operator {op!r}", op_at)
        pos += 1
        args = []
        while pos < len(tokens) and tokens[pos][0] != ")":
            args.append(expr(op, len(args)))
        if pos >= len(tokens):
            raise SExprSyntaxError("missing ')'", at)
        pos += 1
        return Apply(op, tuple(args))

    result = expr()
    if pos != len(tokens):
        raise SExprSyntaxError("trailing input", tokens[pos][1])
    return result


def classify(atom: str, parent_op: str | None = None, slot: int | None = None,
             entity_pattern: str = FREEBASE_ENTITY) -> SExpr:
    if re.fullmatch(entity_pattern, atom):
        return Entity(atom)
    if _DOTTED.fullmatch(atom):
        if parent_op in CLASS_SLOT_OPS and slot == 0:
            return Class(atom)
        return Relation(atom)
    return Literal.parse(atom)


def parse_sexpr(text: str, entity_pattern: str = FREEBASE_ENTITY) -> SExpr:
    tokens = _lex(text)
    if not tokens:
        raise SExprSyntaxError("empty expression", 0)
    return _build(tokens, lambda tok, at, op, slot: classify(tok, op, slot, entity_pattern), len(text))


# ---------------------------------------------------------------------------
# Labels
# ---------------------------------------------------------------------------

class EntityLabelMap:
    """id -> label, with reverse lookup that may be ambiguous."""

    def __init__(self, labels: Mapping[str, str]):
        self._label = dict(labels)
        self._ids: dict[str, list[str]] = {}
        for ent, label in self._label.items():
            self._ids.setdefault(label, []).append(ent)

    @classmethod
    def load(cls, path: str | Path) -> "EntityLabelMap":
        with open(path, encoding="utf-8", newline="") as f:
            rows = [r for r in csv.reader(f, delimiter="\t", quoting=csv.QUOTE_NONE) if r]
        return cls({r[0]: r[1] for r in rows})

    def label(self, ent: str) -> str:
        try:
            return self._label[ent]
        except KeyError:
            raise UnknownEntity(ent) from None

    def ids(self, label: str) -> list[str]:
        return list(self._ids.get(label, ()))

    def __contains__(self, ent):
        return ent in self._label

    def __len__(self):
        return len(self._label)


def load_relation_vocab(path: str | Path) -> set[str]:
    with open(path, encoding="utf-8") as f:
        return {line.strip() for line in f if line.strip()}


def relation_words(path: str) -> str:
    return ", ".join(seg.replace("_", " ") for seg in path.split("."))


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------

def normalize(expr: SExpr | str, labels: EntityLabelMap | Mapping[str, str]) -> str:
    if isinstance(expr, str):
        expr = parse_sexpr(expr)
    if not isinstance(labels, EntityLabelMap):
        labels = EntityLabelMap(labels)

    def render(e):
        if isinstance(e, Apply):
            return "(" + " ".join([e.op] + [render(a) for a in e.args]) + ")"
        if isinstance(e, Entity):
            return f"[{labels.label(e.id)}]"
        if isinstance(e, (Relation, Class)):
            return f"[{relation_words(e.path if isinstance(e, Relation) else e.id)}]"
        return f"[{e}]"

    return render(expr)


def denormalize(text: str, labels: EntityLabelMap | Mapping[str, str], relation_vocab: Iterable[str],
                candidates: Sequence[str] | None = None) -> SExpr:
    """Map each bracketed element back to a KB element.

    Word lists resolve through ``relation_vocab`` (rendering is not
    invertible on its own); labels resolve through ``labels``, using the
    order of ``candidates`` to pick among ids sharing a label; anything
    else becomes a literal.
    """
    if not isinstance(labels, EntityLabelMap):
        labels = EntityLabelMap(labels)
    by_words: dict[str, list[str]] = {}
    for rel in relation_vocab:
        by_words.setdefault(relation_words(rel), []).append(rel)
    rank = {ent: i for i, ent in enumerate(candidates or ())}

    def leaf(tok, at, op, slot):
        if not (tok.startswith("[") and tok.endswith("]")):
            raise SExprSyntaxError(f"expected a bracketed element, got {tok!r}", at)
        content = tok[1:-1]
        if not content:
            raise UnknownElement(f"empty element at offset {at}")
        rels = by_words.get(content)
        if rels:
            if len(rels) > 1:
                raise AmbiguousLabel(content, sorted(rels))
            return Class(rels[0]) if op in CLASS_SLOT_OPS and slot == 0 else Relation(rels[0])
        ids = labels.ids(content)
        if len(ids) == 1:
            return Entity(ids[0])
        if len(ids) > 1:
            ranked = [e for e in ids if e in rank]
            if not ranked:
                raise AmbiguousLabel(content, ids)
            return Entity(min(ranked, key=rank.__getitem__))
        if ", " in content:
            raise UnknownElement(f"word list [{content}] matches no known relation")
        return Literal.parse(content)

    tokens = _lex(text, bracketed=True)
    if not tokens:
        raise SExprSyntaxError("empty expression", 0)
    return _build(tokens, leaf, len(text))


# ---------------------------------------------------------------------------
# Query generator input
# ---------------------------------------------------------------------------

def bracket(label: str) -> str:
    return label if label.startswith("[") and label.endswith("]") else f"[{label}]"


def assemble_model_input(question: SeqLike, qdt: SeqLike, entity_labels: Sequence[str],
                         delimiter: str = "||") -> str:
    question, qdt = TokenSeq.of(question), TokenSeq.of(qdt)
    if strip_separators(qdt) != question:
        raise ValidationFailure("QDT words differ from the question")
    entities = "; ".join(bracket(x) for x in entity_labels)
    return f" {delimiter} ".join([str(question), str(qdt), entities])
