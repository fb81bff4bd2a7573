"""Question Decomposition Tree data model and the linearized grammar.

A linearized QDT is the original question with three separators inserted
as standalone tokens::

    QDT      := DescList
    DescList := Desc ([DES] Desc)*
    Desc     := (Word | [INQL] DescList [INQR])+

``[INQ]`` never appears in a linearization; it is the placeholder used when
an inner question is shown inside its parent description.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

import networkx as nx

from .errors import EmptyDescription, StrayPlaceholder, UnbalancedBrackets


class Kind(enum.Enum):
    WORD = "word"
    DES = "[DES]"
    INQL = "[INQL]"
    INQR = "[INQR]"
    INQ = "[INQ]"


SEPARATOR_KINDS = (Kind.DES, Kind.INQL, Kind.INQR)
_BY_SURFACE = {k.value: k for k in Kind if k is not Kind.WORD}


@dataclass(frozen=True)
class Token:
    kind: Kind
    text: str

    def __post_init__(self):
        if self.kind is Kind.WORD:
            if not self.text or any(c.isspace() for c in self.text) or self.text in _BY_SURFACE:
                raise ValueError(f"invalid word token {self.text!r}")
        elif self.text != self.kind.value:
            raise ValueError(f"{self.kind.name} token must be spelled {self.kind.value}")

    @classmethod
    def word(cls, text: str) -> "Token":
        return cls(Kind.WORD, text)

    @classmethod
    def sep(cls, kind: Kind) -> "Token":
        return cls(kind, kind.value)

    @property
    def is_word(self) -> bool:
        return self.kind is Kind.WORD

    @property
    def is_separator(self) -> bool:
        return self.kind in SEPARATOR_KINDS

    def __str__(self):
        return self.text


DES = Token.sep(Kind.DES)
INQL = Token.sep(Kind.INQL)
INQR = Token.sep(Kind.INQR)
INQ = Token.sep(Kind.INQ)


@dataclass(frozen=True)
class TokenSeq:
    """Immutable token sequence; both raw questions and linearized QDTs."""

    tokens: tuple = ()

    def __post_init__(self):
        if not isinstance(self.tokens, tuple):
            object.__setattr__(self, "tokens", tuple(self.tokens))

    @classmethod
    def of(cls, value: "SeqLike") -> "TokenSeq":
        if isinstance(value, TokenSeq):
            return value
        if isinstance(value, str):
            return tokenize(value)
        return cls(tuple(value))

    def __len__(self):
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return TokenSeq(self.tokens[item])
        return self.tokens[item]

    def __add__(self, other):
        return TokenSeq(self.tokens + TokenSeq.of(other).tokens)

    def __str__(self):
        return " ".join(t.text for t in self.tokens)

    def __repr__(self):
        return f"TokenSeq({str(self)!r})"

    @property
    def words(self) -> list[str]:
        return [t.text for t in self.tokens if t.is_word]

    @property
    def is_plain(self) -> bool:
        return all(t.is_word for t in self.tokens)

    def separator_count(self) -> int:
        return sum(1 for t in self.tokens if t.is_separator)

    def insert(self, index: int, token: Token) -> "TokenSeq":
        return TokenSeq(self.tokens[:index] + (token,) + self.tokens[index:])


SeqLike = Union[TokenSeq, str, Sequence[Token]]


def tokenize(text: str) -> TokenSeq:
    out = []
    for piece in text.split():
        kind = _BY_SURFACE.get(piece)
        out.append(Token.sep(kind) if kind else Token.word(piece))
    return TokenSeq(tuple(out))


def strip_separators(seq: SeqLike) -> TokenSeq:
    return TokenSeq(tuple(t for t in TokenSeq.of(seq) if t.is_word))


# ---------------------------------------------------------------------------
# Tree model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TextSegment:
    words: tuple


@dataclass(frozen=True)
class InnerQuestion:
    question: "QuestionNode"


Segment = Union[TextSegment, InnerQuestion]


@dataclass(frozen=True)
class DescriptionNode:
    segments: tuple

    def inner_questions(self) -> list["QuestionNode"]:
        return [s.question for s in self.segments if isinstance(s, InnerQuestion)]

    def label(self) -> str:
        """Description text with inner questions shown as ``[INQ]``; words lowercased."""
        parts = []
        for seg in self.segments:
            if isinstance(seg, TextSegment):
                parts.extend(w.lower() for w in seg.words)
            else:
                parts.append(INQ.text)
        return " ".join(parts)


@dataclass(frozen=True)
class QuestionNode:
    descriptions: tuple

    def __post_init__(self):
        if not self.descriptions:
            raise ValueError("a question node needs at least one description")


@dataclass(frozen=True)
class QdtTree:
    root: QuestionNode

    def question_nodes(self) -> Iterator[QuestionNode]:
        stack = [self.root]
        while stack:
            q = stack.pop()
            yield q
            for d in reversed(q.descriptions):
                stack.extend(reversed(d.inner_questions()))

    def description_nodes(self) -> Iterator[DescriptionNode]:
        for q in self.question_nodes():
            yield from q.descriptions


def make_description(*parts) -> DescriptionNode:
    """Build a description from strings (split into words) and QuestionNodes.

    Adjacent strings are merged so the no-adjacent-text invariant holds.
    """
    segments: list = []
    for part in parts:
        if isinstance(part, QuestionNode):
            segments.append(InnerQuestion(part))
            continue
        words = tuple(part.split()) if isinstance(part, str) else tuple(part)
        if not words:
            continue
        if segments and isinstance(segments[-1], TextSegment):
            segments[-1] = TextSegment(segments[-1].words + words)
        else:
            segments.append(TextSegment(words))
    if not segments:
        raise ValueError("a description needs at least one segment")
    return DescriptionNode(tuple(segments))


def make_question(*descriptions: DescriptionNode) -> QuestionNode:
    return QuestionNode(tuple(descriptions))


# ---------------------------------------------------------------------------
# Parsing / serialization
# ---------------------------------------------------------------------------

def _check_balance(tokens: Sequence[Token]) -> None:
    open_at = []
    for i, tok in enumerate(tokens):
        if tok.kind is Kind.INQL:
            open_at.append(i)
        elif tok.kind is Kind.INQR:
            if not open_at:
                raise UnbalancedBrackets("[INQR] without matching [INQL]", i)
            open_at.pop()
    if open_at:
        raise UnbalancedBrackets("[INQL] is never closed", open_at[-1])


class _Parser:
    def __init__(self, tokens: Sequence[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos].kind if self.pos < len(self.tokens) else None

    def desc_list(self) -> QuestionNode:
        descs = [self.desc()]
        while self.peek() is Kind.DES:
            self.pos += 1
            descs.append(self.desc())
        return QuestionNode(tuple(descs))

    def desc(self) -> DescriptionNode:
        start = self.pos
        segments: list = []
        words: list = []
        while True:
            kind = self.peek()
            if kind is Kind.WORD:
                words.append(self.tokens[self.pos].text)
                self.pos += 1
            elif kind is Kind.INQL:
                if words:
                    segments.append(TextSegment(tuple(words)))
                    words = []
                opened = self.pos
                self.pos += 1
                inner = self.desc_list()
                if self.peek() is not Kind.INQR:
                    raise UnbalancedBrackets("[INQL] is never closed", opened)
                self.pos += 1
                segments.append(InnerQuestion(inner))
            elif kind is Kind.INQ:
                raise StrayPlaceholder("[INQ] is not allowed in a linearized QDT", self.pos)
            else:
                break
        if words:
            segments.append(TextSegment(tuple(words)))
        if not segments:
            raise EmptyDescription("empty description", start)
        return DescriptionNode(tuple(segments))


def parse_linear(seq: SeqLike) -> QdtTree:
    tokens = TokenSeq.of(seq).tokens
    _check_balance(tokens)
    parser = _Parser(tokens)
    root = parser.desc_list()
    if parser.pos != len(tokens):
        # _check_balance guarantees this is a bracket, but keep the error structured
        raise UnbalancedBrackets("unexpected token", parser.pos)
    return QdtTree(root)


def _emit_question(q: QuestionNode, out: list) -> None:
    for i, d in enumerate(q.descriptions):
        if i:
            out.append(DES)
        for seg in d.segments:
            if isinstance(seg, TextSegment):
                out.extend(Token.word(w) for w in seg.words)
            else:
                out.append(INQL)
                _emit_question(seg.question, out)
                out.append(INQR)


def serialize(tree: QdtTree) -> TokenSeq:
    out: list = []
    _emit_question(tree.root, out)
    return TokenSeq(tuple(out))


def depth(tree: QdtTree) -> int:
    def q_depth(q: QuestionNode) -> int:
        inner = [q_depth(x) for d in q.descriptions for x in d.inner_questions()]
        return 1 + max(inner, default=0)

    return q_depth(tree.root)


def canonical_text(seq: SeqLike, case_sensitive: bool = False) -> str:
    text = str(TokenSeq.of(seq))
    return text if case_sensitive else text.lower()


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Issue:
    code: str
    message: str
    token_index: int | None = None
    severity: str = "error"


@dataclass
class ValidationReport:
    issues: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not any(i.severity == "error" for i in self.issues)

    @property
    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "error"]

    @property
    def warnings(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "warning"]

    def codes(self) -> list[str]:
        return [i.code for i in self.issues]


def validate(seq: SeqLike, original: SeqLike | None = None,
             case_sensitive: bool = True) -> ValidationReport:
    tokens = TokenSeq.of(seq).tokens
    issues: list[Issue] = []

    open_at = []
    for i, tok in enumerate(tokens):
        if tok.kind is Kind.INQL:
            open_at.append(i)
        elif tok.kind is Kind.INQR:
            if open_at:
                open_at.pop()
            else:
                issues.append(Issue("unbalanced", "[INQR] without matching [INQL]", i))
        elif tok.kind is Kind.INQ:
            issues.append(Issue("stray_placeholder", "[INQ] is not allowed in a linearized QDT", i))
    for i in open_at:
        issues.append(Issue("unbalanced", "[INQL] is never closed", i))

    # A description opens at the start, after [DES] or after [INQL]; it is empty
    # if the next token closes it again.
    opens = {Kind.DES, Kind.INQL}
    closes = {Kind.DES, Kind.INQR}
    for i in range(len(tokens) + 1):
        opened = i == 0 or tokens[i - 1].kind in opens
        closed = i == len(tokens) or tokens[i].kind in closes
        if opened and closed:
            issues.append(Issue("empty_description", "empty description", i))

    if not any(i.severity == "error" for i in issues):
        tree = parse_linear(tokens)
        for d in tree.description_nodes():
            n = len(d.inner_questions())
            if n > 1:
                issues.append(Issue("multiple_inner_questions",
                                    f"description holds {n} inner questions", None, "warning"))

    if original is not None:
        got = strip_separators(tokens).words
        want = TokenSeq.of(original).words
        if not case_sensitive:
            got = [w.lower() for w in got]
            want = [w.lower() for w in want]
        if got != want:
            idx = next((k for k, (a, b) in enumerate(zip(got, want)) if a != b),
                       min(len(got), len(want)))
            issues.append(Issue("question_mismatch",
                                f"words differ from the original question at word {idx}", idx))

    issues.sort(key=lambda x: (x.token_index is None, x.token_index or 0))
    return ValidationReport(issues)


# ---------------------------------------------------------------------------
# Graph view
# ---------------------------------------------------------------------------

def to_graph(tree: QdtTree) -> nx.DiGraph:
    """Directed graph: question nodes ("Q" root, "INQ" inner) -> descriptions -> inner questions."""
    g = nx.DiGraph()
    counter = iter(range(10 ** 9))

    def add_question(q: QuestionNode, label: str) -> int:
        qid = next(counter)
        g.add_node(qid, label=label)
        for d in q.descriptions:
            did = next(counter)
            g.add_node(did, label=d.label())
            g.add_edge(qid, did)
            for inner in d.inner_questions():
                g.add_edge(did, add_question(inner, "INQ"))
        return qid

    add_question(tree.root, "Q")
    return g


def as_tree(value: Union[QdtTree, SeqLike]) -> QdtTree:
    return value if isinstance(value, QdtTree) else parse_linear(value)


def iter_words(tree: QdtTree) -> Iterable[str]:
    return strip_separators(serialize(tree)).words
