"""Decomposition and QA evaluation measures."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Hashable, Iterable, Sequence

from .core import (
    QdtTree, SeqLike, Token, TokenSeq, as_tree, canonical_text, depth, parse_linear, to_graph,
)
from .decipher import degrade_to_pair
from .errors import Atomic, InvalidInput, LengthMismatch, QdtParseError
from .ged import DEFAULT_NODE_LIMIT, GedCosts, graph_edit_distance, graph_size, normalized_ged

PAIR_SEP = Token.word("[SEP]")


@dataclass
class EvalReport:
    em: float | None = None
    tda: float | None = None
    ged_mean: float | None = None
    ged_raw_mean: float | None = None
    seq_em: float | None = None
    bleu4: float | None = None
    rouge_l: float | None = None
    answers: dict | None = None
    counts: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def lines(self) -> list[str]:
        out = []
        for name in ("em", "tda", "ged_mean", "ged_raw_mean", "seq_em", "bleu4", "rouge_l"):
            value = getattr(self, name)
            if value is not None:
                out.append(f"{name:<13}{value:.4f}")
        for name, value in (self.answers or {}).items():
            out.append(f"{name:<13}{value:.4f}")
        for name, value in self.counts.items():
            out.append(f"{name:<13}{value}")
        return out


def _same_length(a: Sequence, b: Sequence, allow_empty: bool = True) -> None:
    if len(a) != len(b):
        raise LengthMismatch(f"{len(a)} predictions vs {len(b)} references")
    if not allow_empty and not a:
        raise LengthMismatch("no items to evaluate")


# ---------------------------------------------------------------------------
# Tree-based
# ---------------------------------------------------------------------------

def tree_exact_match(pred: SeqLike, gold: SeqLike, case_sensitive: bool = False) -> bool:
    try:
        parse_linear(pred)
        parse_linear(gold)
    except QdtParseError as e:
        raise InvalidInput(str(e)) from e
    return canonical_text(pred, case_sensitive) == canonical_text(gold, case_sensitive)


def _try_depth(seq: SeqLike) -> int | None:
    try:
        return depth(parse_linear(seq))
    except QdtParseError:
        return None


def tree_depth_accuracy(preds: Sequence[SeqLike], golds: Sequence[SeqLike]) -> float:
    _same_length(preds, golds, allow_empty=False)
    hits = sum(1 for p, g in zip(preds, golds)
               if (dp := _try_depth(p)) is not None and dp == depth(parse_linear(g)))
    return hits / len(golds)


def tree_ged(pred: QdtTree | SeqLike, gold: QdtTree | SeqLike, costs: GedCosts | None = None,
             node_limit: int = DEFAULT_NODE_LIMIT) -> float:
    return graph_edit_distance(to_graph(as_tree(pred)), to_graph(as_tree(gold)), costs, node_limit)


def tree_ged_normalized(pred, gold, costs: GedCosts | None = None,
                        node_limit: int = DEFAULT_NODE_LIMIT) -> float:
    """Raw GED divided by the node+edge count of the larger graph."""
    return normalized_ged(to_graph(as_tree(pred)), to_graph(as_tree(gold)), costs, node_limit)[1]


def evaluate_trees(preds: Sequence[SeqLike], golds: Sequence[SeqLike], costs: GedCosts | None = None,
                   case_sensitive: bool = False, node_limit: int = DEFAULT_NODE_LIMIT) -> EvalReport:
    """EM, TDA and GED over aligned predictions.

    An unparseable prediction is scored as the empty graph, i.e. the full
    size of the gold graph in raw GED and 1.0 normalized.
    """
    _same_length(preds, golds, allow_empty=False)
    em = tda = 0
    ged_norm, ged_raw = [], []
    unparseable = 0
    for p, g in zip(preds, golds):
        gold_tree = parse_linear(g)
        gold_graph = to_graph(gold_tree)
        try:
            pred_tree = parse_linear(p)
        except QdtParseError:
            unparseable += 1
            raw = float(graph_size(gold_graph))
            ged_raw.append(raw)
            ged_norm.append(1.0)
            continue
        if canonical_text(p, case_sensitive) == canonical_text(g, case_sensitive):
            em += 1
        if depth(pred_tree) == depth(gold_tree):
            tda += 1
        pred_graph = to_graph(pred_tree)
        raw = graph_edit_distance(pred_graph, gold_graph, costs, node_limit)
        size = max(graph_size(pred_graph), graph_size(gold_graph))
        ged_raw.append(raw)
        ged_norm.append(raw / size)
    n = len(golds)
    return EvalReport(em=em / n, tda=tda / n, ged_mean=sum(ged_norm) / n,
                      ged_raw_mean=sum(ged_raw) / n,
                      counts={"n": n, "exact": em, "depth_match": tda, "unparseable": unparseable})


# ---------------------------------------------------------------------------
# Sequence-based
# ---------------------------------------------------------------------------

def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _words(seq) -> list[str]:
    return [t.text for t in TokenSeq.of(seq)] if not isinstance(seq, list) else seq


def bleu4(candidates: Sequence[SeqLike], references: Sequence[SeqLike], max_n: int = 4,
          epsilon: float = 1e-9) -> float:
    """Corpus BLEU, uniform weights, brevity penalty; zero match counts become ``epsilon``."""
    _same_length(candidates, references)
    matches = [0] * max_n
    totals = [0] * max_n
    cand_len = ref_len = 0
    for c, r in zip(candidates, references):
        c, r = _words(c), _words(r)
        cand_len += len(c)
        ref_len += len(r)
        for n in range(1, max_n + 1):
            cn, rn = _ngrams(c, n), _ngrams(r, n)
            matches[n - 1] += sum(min(k, rn[g]) for g, k in cn.items())
            totals[n - 1] += max(len(c) - n + 1, 0)
    if cand_len == 0:
        return 0.0
    log_p = 0.0
    for m, t in zip(matches, totals):
        log_p += math.log((m if m else epsilon) / (t if t else 1))
    bp = 1.0 if cand_len > ref_len else math.exp(1 - ref_len / cand_len)
    return bp * math.exp(log_p / max_n)


def lcs_length(a: Sequence, b: Sequence) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(candidate: SeqLike, reference: SeqLike, beta: float = 1.2) -> float:
    c, r = _words(candidate), _words(reference)
    if not c or not r:
        return 0.0
    lcs = lcs_length(c, r)
    if lcs == 0:
        return 0.0
    p, rec = lcs / len(c), lcs / len(r)
    return (1 + beta ** 2) * p * rec / (rec + beta ** 2 * p)


def seq_exact_match(pred_pair, gold_pair, case_sensitive: bool = False) -> bool:
    return all(canonical_text(p, case_sensitive) == canonical_text(g, case_sensitive)
               for p, g in zip(pred_pair, gold_pair, strict=True))


def as_pair(item) -> tuple[TokenSeq, TokenSeq]:
    """Two-part view of a linearized QDT; an atomic question pairs with an empty part."""
    if isinstance(item, tuple):
        return TokenSeq.of(item[0]), TokenSeq.of(item[1])
    seq = TokenSeq.of(item)
    try:
        return degrade_to_pair(seq)
    except Atomic:
        return seq, TokenSeq()


def joined_pair(pair) -> list[str]:
    first, second = pair
    return [t.text for t in first] + [PAIR_SEP.text] + [t.text for t in second]


def evaluate_sequences(preds: Sequence, golds: Sequence, case_sensitive: bool = False) -> EvalReport:
    """EM/BLEU-4/ROUGE-L on two-part decompositions.

    Items are linearized QDTs (degraded to two parts) or ready-made pairs.
    Each pair is scored as one segment, its parts joined by ``[SEP]``.
    """
    _same_length(preds, golds, allow_empty=False)
    pp = [as_pair(p) for p in preds]
    gp = [as_pair(g) for g in golds]
    em = sum(seq_exact_match(p, g, case_sensitive) for p, g in zip(pp, gp))
    fold = (lambda s: s) if case_sensitive else (lambda s: [w.lower() for w in s])
    cands = [fold(joined_pair(p)) for p in pp]
    refs = [fold(joined_pair(g)) for g in gp]
    n = len(golds)
    return EvalReport(seq_em=em / n, bleu4=bleu4(cands, refs),
                      rouge_l=sum(rouge_l(c, r) for c, r in zip(cands, refs)) / n,
                      counts={"n": n, "exact": em})


# ---------------------------------------------------------------------------
# Answer sets
# ---------------------------------------------------------------------------

def answer_prf(pred: Iterable[Hashable], gold: Iterable[Hashable]) -> tuple[float, float, float]:
    pred, gold = set(pred), set(gold)
    if not pred and not gold:
        return 1.0, 1.0, 1.0
    hit = len(pred & gold)
    p = hit / len(pred) if pred else 0.0
    r = hit / len(gold) if gold else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f


def answer_set_metrics(preds: Sequence[Iterable[Hashable]], golds: Sequence[Iterable[Hashable]]) -> dict:
    _same_length(preds, golds, allow_empty=False)
    rows = [answer_prf(p, g) for p, g in zip(preds, golds)]
    n = len(rows)
    acc = sum(1 for p, g in zip(preds, golds) if set(p) == set(g)) / n
    macro_p = sum(r[0] for r in rows) / n
    macro_r = sum(r[1] for r in rows) / n
    macro_f1 = sum(r[2] for r in rows) / n
    return {"avg_f1": macro_f1, "acc": acc, "macro_p": macro_p, "macro_r": macro_r, "macro_f1": macro_f1}


__all__ = [
    "EvalReport", "tree_exact_match", "tree_depth_accuracy", "tree_ged", "evaluate_trees",
    "bleu4", "rouge_l", "lcs_length", "seq_exact_match", "as_pair", "evaluate_sequences",
    "answer_prf", "answer_set_metrics", "GedCosts", "tree_ged_normalized",
]
