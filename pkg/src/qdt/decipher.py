"""Clue-driven separator insertion.

A clue is a generated, possibly corrupted decomposition. Each separator in
the clue becomes a query; every query is matched against a small window of
candidate insertion points in the untouched question, and the winning
insertions are merged back into one linearized QDT.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .core import (
    DES, INQ, INQL, INQR, Kind, QuestionNode, TextSegment, Token, TokenSeq, SeqLike,
    parse_linear, validate,
)
from .errors import Atomic, InvalidMerge, NoSeparators, ScorerFailure

WINDOW = 5


@dataclass(frozen=True)
class Clue:
    tokens: TokenSeq
    source_question: TokenSeq | None = None


@dataclass(frozen=True)
class Query:
    tokens: TokenSeq
    separator_index: int
    separator_kind: Kind
    ordinal: int

    def __post_init__(self):
        if self.tokens.separator_count() != 1 or not self.tokens[self.separator_index].is_separator:
            raise ValueError("a query holds exactly one separator")

    @classmethod
    def from_tokens(cls, tokens: SeqLike, ordinal: int = 0) -> "Query":
        tokens = TokenSeq.of(tokens)
        idx = [i for i, t in enumerate(tokens) if t.is_separator]
        if len(idx) != 1:
            raise ValueError(f"a query holds exactly one separator, got {len(idx)}")
        return cls(tokens, idx[0], tokens[idx[0]].kind, ordinal)


@dataclass(frozen=True)
class CandidateOption:
    insert_position: int
    rendered: TokenSeq


@dataclass(frozen=True)
class Branch:
    insert_position: int
    separator_kind: Kind
    ordinal: int
    rendered: TokenSeq


@dataclass
class DecipherResult:
    output: TokenSeq
    branches: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# Queries and options
# ---------------------------------------------------------------------------

def derive_queries(clue: Clue | SeqLike) -> list[Query]:
    tokens = clue.tokens if isinstance(clue, Clue) else TokenSeq.of(clue)
    sep_at = [i for i, t in enumerate(tokens) if t.is_separator]
    if not sep_at:
        raise NoSeparators("clue has no separators")
    queries = []
    for ordinal, keep in enumerate(sep_at):
        kept = [t for i, t in enumerate(tokens) if i == keep or not t.is_separator]
        index = keep - sum(1 for i in sep_at if i < keep)
        queries.append(Query(TokenSeq(tuple(kept)), index, tokens[keep].kind, ordinal))
    return queries


def approximate_position(query: Query) -> int:
    """Number of non-separator tokens before the query's separator."""
    return query.separator_index


def anchored_position(query: Query, question_len: int) -> tuple[int, bool]:
    """Estimated insertion point in a question of ``question_len`` words.

    The separator's offset is counted from whichever end of the query is
    nearer, so a clue that lost or gained words before a late separator still
    lands near the right spot. Returns ``(position, clamped)``.
    """
    before = approximate_position(query)
    after = len(query.tokens) - 1 - before
    p = question_len - after if after < before else before
    clamped = min(max(p, 0), question_len)
    return clamped, clamped != p


def option_window(center: int, n: int, size: int = WINDOW) -> range:
    """``size`` consecutive positions in [0, n] around center, shifted inward at the edges."""
    if n + 1 <= size:
        return range(0, n + 1)
    half = size // 2
    lo = min(max(center - half, 0), n + 1 - size)
    return range(lo, lo + size)


def render(question: SeqLike, position: int, kind: Kind) -> TokenSeq:
    return TokenSeq.of(question).insert(position, Token.sep(kind))


def build_options(query: Query, question: SeqLike, center: int | None = None) -> list[CandidateOption]:
    question = TokenSeq.of(question)
    if center is None:
        center, _ = anchored_position(query, len(question))
    return [CandidateOption(p, render(question, p, query.separator_kind))
            for p in option_window(center, len(question))]


# ---------------------------------------------------------------------------
# Scoring
# ---------------------------------------------------------------------------

def _key(tok: Token) -> str:
    return tok.text.lower() if tok.is_word else tok.text


def token_edit_distance(a: Sequence[Token], b: Sequence[Token]) -> int:
    """Levenshtein distance over tokens; words compare case-insensitively."""
    ka = [_key(t) for t in a]
    kb = [_key(t) for t in b]
    prev = list(range(len(kb) + 1))
    for i, x in enumerate(ka, 1):
        cur = [i] + [0] * len(kb)
        for j, y in enumerate(kb, 1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y))
        prev = cur
    return prev[-1]


def align_score(query: Query, options: Sequence[CandidateOption]) -> list[float]:
    return [-float(token_edit_distance(query.tokens, o.rendered)) for o in options]


class Scorer:
    """Scores candidate options for a query; higher is better."""

    def score(self, query: Query, options: Sequence[CandidateOption]) -> list[float]:
        raise NotImplementedError

    def close(self):
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class AlignScorer(Scorer):
    def score(self, query, options):
        return align_score(query, options)


def _check_scores(scores, n: int) -> list[float]:
    try:
        values = list(scores)
    except TypeError as e:
        raise ScorerFailure(f"scores are not a sequence: {scores!r}") from e
    if len(values) != n:
        raise ScorerFailure(f"expected {n} scores, got {len(values)}")
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ScorerFailure(f"invalid score {v!r}")
        out.append(float(v))
    return out


def select_branch(query: Query, options: Sequence[CandidateOption], scorer: Scorer | None = None,
                  center: int | None = None) -> Branch:
    if not options:
        raise ValueError("no options to select from")
    scorer = scorer or AlignScorer()
    scores = _check_scores(scorer.score(query, options), len(options))
    if center is None:
        center, _ = anchored_position(query, len(options[0].rendered) - 1)
    best = min(range(len(options)),
               key=lambda i: (-scores[i], abs(options[i].insert_position - center),
                              options[i].insert_position))
    opt = options[best]
    return Branch(opt.insert_position, query.separator_kind, query.ordinal, opt.rendered)


# ---------------------------------------------------------------------------
# Merging
# ---------------------------------------------------------------------------

def _repair(tokens: list[Token], diagnostics: list) -> list[Token]:
    keep = [True] * len(tokens)
    open_at = []
    for i, t in enumerate(tokens):
        if t.kind is Kind.INQL:
            open_at.append(i)
        elif t.kind is Kind.INQR:
            if open_at:
                open_at.pop()
            else:
                keep[i] = False
    for i in open_at:
        keep[i] = False
    dropped = [tokens[i].text for i in range(len(tokens)) if not keep[i]]
    if dropped:
        diagnostics.append(f"repair: dropped unmatched {' '.join(dropped)}")
    out = [t for t, k in zip(tokens, keep) if k]

    changed = True
    while changed:
        changed = False
        for i, t in enumerate(out):
            prev = out[i - 1].kind if i else None
            nxt = out[i + 1].kind if i + 1 < len(out) else None
            if t.kind is Kind.DES and (prev in (None, Kind.DES, Kind.INQL) or nxt in (None, Kind.INQR)):
                del out[i]
                diagnostics.append("repair: collapsed empty description")
                changed = True
                break
            if t.kind is Kind.INQL and nxt is Kind.INQR:
                del out[i:i + 2]
                diagnostics.append("repair: removed empty inner question")
                changed = True
                break
    return out


def merge_branches(question: SeqLike, branches: Sequence[Branch], repair: bool = False,
                   diagnostics: list | None = None) -> TokenSeq:
    question = TokenSeq.of(question)
    diagnostics = [] if diagnostics is None else diagnostics
    tokens = list(question.tokens)
    for b in sorted(branches, key=lambda b: (b.insert_position, b.ordinal), reverse=True):
        if not 0 <= b.insert_position <= len(question):
            raise InvalidMerge(f"position {b.insert_position} outside question of {len(question)} words")
        tokens.insert(b.insert_position, Token.sep(b.separator_kind))
    report = validate(TokenSeq(tuple(tokens)), question)
    if not report.valid and repair:
        tokens = _repair(tokens, diagnostics)
        report = validate(TokenSeq(tuple(tokens)), question)
    if not report.valid:
        detail = "; ".join(f"{i.code}@{i.token_index}" for i in report.errors)
        raise InvalidMerge(f"merged QDT is invalid: {detail}", report.errors)
    return TokenSeq(tuple(tokens))


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

def decipher_queries(question: SeqLike, queries: Sequence[Query], scorer: Scorer | None = None,
                     repair: bool = False) -> DecipherResult:
    question = TokenSeq.of(question)
    if not question.is_plain:
        raise ValueError("question must contain words only")
    scorer = scorer or AlignScorer()
    result = DecipherResult(question)
    for q in queries:
        center, clamped = anchored_position(q, len(question))
        if clamped:
            result.diagnostics.append(f"query {q.ordinal}: position clamped to {center}")
        options = build_options(q, question, center)
        result.branches.append(select_branch(q, options, scorer, center))
    result.output = merge_branches(question, result.branches, repair, result.diagnostics)
    return result


def decipher_detailed(question: SeqLike, clue: Clue | SeqLike, scorer: Scorer | None = None,
                      repair: bool = False) -> DecipherResult:
    question = TokenSeq.of(question)
    try:
        queries = derive_queries(clue)
    except NoSeparators:
        return DecipherResult(question, [], ["clue has no separators; question kept atomic"])
    return decipher_queries(question, queries, scorer, repair)


def decipher(question: SeqLike, clue: Clue | SeqLike, scorer: Scorer | None = None,
             repair: bool = False) -> TokenSeq:
    return decipher_detailed(question, clue, scorer, repair).output


# ---------------------------------------------------------------------------
# Two-part view for comparison with split-based decomposers
# ---------------------------------------------------------------------------

def _words_of(q: QuestionNode, placeholder: bool) -> list[Token]:
    out = []
    for d in q.descriptions:
        for seg in d.segments:
            if isinstance(seg, TextSegment):
                out.extend(Token.word(w) for w in seg.words)
            elif placeholder:
                out.append(INQ)
            else:
                out.extend(_words_of(seg.question, False))
    return out


def degrade_to_pair(qdt: SeqLike) -> tuple[TokenSeq, TokenSeq]:
    qdt = TokenSeq.of(qdt)
    if not qdt.separator_count():
        raise Atomic("QDT has no separators")
    root = parse_linear(qdt).root
    inner = [x for d in root.descriptions for x in d.inner_questions()]
    if inner:
        return TokenSeq(tuple(_words_of(root, True))), TokenSeq(tuple(_words_of(inner[0], False)))
    first, rest = root.descriptions[0], QuestionNode(root.descriptions[1:])
    return (TokenSeq(tuple(_words_of(QuestionNode((first,)), False))),
            TokenSeq(tuple(_words_of(rest, False))))


__all__ = [
    "Clue", "Query", "CandidateOption", "Branch", "DecipherResult", "Scorer", "AlignScorer",
    "derive_queries", "approximate_position", "anchored_position", "option_window",
    "build_options", "token_edit_distance", "align_score", "select_branch", "merge_branches",
    "decipher_queries", "decipher_detailed", "decipher", "degrade_to_pair", "render",
    "DES", "INQL", "INQR",
]
