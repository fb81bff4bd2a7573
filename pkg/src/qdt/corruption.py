"""Training data for the option ranker: gold branches, shifted negatives, noisy queries."""
from __future__ import annotations

import hashlib
import logging
import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import Token, TokenSeq, SeqLike, strip_separators, validate
from .decipher import Branch, CandidateOption, Query, option_window, render
from .errors import NoSeparators

log = logging.getLogger(__name__)

REPLACE, DELETE, INSERT_AFTER, KEEP = "replace", "delete", "insert_after", "keep"
ACTIONS = (REPLACE, DELETE, INSERT_AFTER, KEEP)


@dataclass(frozen=True)
class CorruptionRates:
    replace: float = 0.01
    delete: float = 0.01
    insert_after: float = 0.01
    keep: float = 0.97

    def __post_init__(self):
        values = self.as_tuple()
        if any(v < 0 for v in values) or not math.isclose(sum(values), 1.0, abs_tol=1e-9):
            raise ValueError(f"corruption rates must be >= 0 and sum to 1, got {values}")

    def as_tuple(self) -> tuple:
        return (self.replace, self.delete, self.insert_after, self.keep)

    @classmethod
    def parse(cls, text: str) -> "CorruptionRates":
        """Parse ``"replace,delete,insert_after,keep"``."""
        parts = [float(x) for x in text.split(",")]
        if len(parts) != 4:
            raise ValueError("expected four comma-separated rates")
        return cls(*parts)


@dataclass(frozen=True)
class TrainingRecord:
    id: str
    question: TokenSeq
    query: TokenSeq
    options: tuple
    gold_index: int

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "question": str(self.question),
            "query": str(self.query),
            "options": [str(o.rendered) for o in self.options],
            "gold_index": self.gold_index,
        }


def extract_branches(gold: SeqLike) -> list[Branch]:
    gold = TokenSeq.of(gold)
    question = strip_separators(gold)
    branches = []
    words_seen = 0
    for tok in gold:
        if tok.is_separator:
            branches.append(Branch(words_seen, tok.kind, len(branches),
                                   render(question, words_seen, tok.kind)))
        elif tok.is_word:
            words_seen += 1
    if not branches:
        raise NoSeparators("gold QDT has no separators")
    return branches


def negative_options(branch: Branch, question: SeqLike) -> list[CandidateOption]:
    """The gold option plus its nearest in-range neighbours, ascending by position."""
    question = TokenSeq.of(question)
    return [CandidateOption(p, render(question, p, branch.separator_kind))
            for p in option_window(branch.insert_position, len(question))]


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def corrupt_tokens(tokens: Sequence[Token], rates: CorruptionRates, rng: random.Random,
                   lowercase: bool = False) -> tuple[list[Token], list[str]]:
    """Apply one independently drawn action per word; separators pass through."""
    pool = [t.text for t in tokens if t.is_word]
    cut = []
    acc = 0.0
    for r in rates.as_tuple()[:3]:
        acc += r
        cut.append(acc)
    out: list[Token] = []
    actions: list[str] = []
    for tok in tokens:
        if not tok.is_word:
            out.append(tok)
            continue
        u = rng.random()
        if u < cut[0]:
            action = REPLACE
            out.append(Token.word(rng.choice(pool)))
        elif u < cut[1]:
            action = DELETE
        elif u < cut[2]:
            action = INSERT_AFTER
            out.append(tok)
            out.append(Token.word(rng.choice(pool)))
        else:
            action = KEEP
            out.append(Token.word(tok.text.lower()) if lowercase else tok)
        actions.append(action)
    return out, actions


def corrupt(branch: Branch, rates: CorruptionRates | None = None, seed=0,
            lowercase: bool = False) -> Query:
    rates = rates or CorruptionRates()
    tokens, _ = corrupt_tokens(branch.rendered.tokens, rates, _rng(seed), lowercase)
    return Query.from_tokens(TokenSeq(tuple(tokens)), branch.ordinal)


def example_seed(seed: int, example_id: str) -> int:
    digest = hashlib.sha256(f"{seed}:{example_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def _examples(dataset: Iterable) -> Iterable[tuple[str, str, str]]:
    for i, item in enumerate(dataset):
        if hasattr(item, "qdt"):
            yield str(item.id), item.question, item.qdt
        elif len(item) == 3:
            yield str(item[0]), item[1], item[2]
        else:
            yield str(i), item[0], item[1]


def generate_training_set(dataset: Iterable, rates: CorruptionRates | None = None, seed: int = 0,
                          lowercase: bool = False, diagnostics: list | None = None) -> list[TrainingRecord]:
    """One record per gold separator; a pure function of (dataset, rates, seed).

    ``dataset`` items are ``(question, qdt)``, ``(id, question, qdt)`` or
    objects with ``id``/``question``/``qdt`` attributes.
    """
    rates = rates or CorruptionRates()
    diagnostics = [] if diagnostics is None else diagnostics
    records = []
    for ex_id, question, gold in _examples(dataset):
        question, gold = TokenSeq.of(question), TokenSeq.of(gold)
        report = validate(gold, question)
        if not report.valid:
            msg = f"{ex_id}: invalid gold ({', '.join(report.codes())})"
        elif not gold.separator_count():
            msg = f"{ex_id}: gold has no separators"
        else:
            msg = None
        if msg:
            log.warning(msg)
            diagnostics.append(msg)
            continue
        rng = random.Random(example_seed(seed, ex_id))
        for branch in extract_branches(gold):
            options = negative_options(branch, question)
            gold_index = next(i for i, o in enumerate(options) if o.insert_position == branch.insert_position)
            query = corrupt(branch, rates, rng, lowercase)
            records.append(TrainingRecord(f"{ex_id}-{branch.ordinal}", question, query.tokens,
                                          tuple(options), gold_index))
    return records


__all__ = [
    "CorruptionRates", "TrainingRecord", "ACTIONS", "extract_branches", "negative_options",
    "corrupt_tokens", "corrupt", "example_seed", "generate_training_set",
]
