import math

import pytest

from conftest import TEXT_PAIRS
from oracles import bleu_oracle, rouge_l_oracle
from qdt.errors import InvalidInput, LengthMismatch
from qdt.metrics import (
    answer_prf, answer_set_metrics, as_pair, bleu4, evaluate_sequences, evaluate_trees, lcs_length,
    rouge_l, seq_exact_match, tree_depth_accuracy, tree_exact_match,
)

# frozen from the exact-arithmetic oracles in oracles.py
BLEU_CORPUS = 0.3381634111114176
ROUGE = [1.0, 0.8187919463087249, 0.7155425219941349, 0.8798076923076923, 0.17888563049853373,
         0.5596330275229358, 0.3860759493670886, 0.0, 0.7142857142857143, 0.3696969696969697]


def _split(pairs):
    return [c for c, _ in pairs], [r for _, r in pairs]


def test_bleu_matches_oracle():
    cands, refs = _split(TEXT_PAIRS)
    assert bleu4(cands, refs) == pytest.approx(BLEU_CORPUS, abs=1e-9)
    assert bleu_oracle(TEXT_PAIRS) == pytest.approx(BLEU_CORPUS, abs=1e-12)
    for pair in TEXT_PAIRS:
        assert bleu4([pair[0]], [pair[1]]) == pytest.approx(bleu_oracle([pair]), abs=1e-9)


def test_bleu_edge_cases():
    assert bleu4(["a b c d"], ["a b c d"]) == pytest.approx(1.0)
    # no overlap: every precision is eps, so the score is eps itself
    assert bleu4(["x y z"], ["p q r s"]) == pytest.approx(math.exp(1 - 4 / 3) * 1e-9 / 3 ** 0.25 / 2 ** 0.25)
    assert bleu4([""], ["a"]) == 0.0
    with pytest.raises(LengthMismatch):
        bleu4(["a"], [])


def test_rouge_matches_oracle():
    for (c, r), want in zip(TEXT_PAIRS, ROUGE):
        assert rouge_l(c, r) == pytest.approx(want, abs=1e-9)
        assert rouge_l_oracle(c, r) == pytest.approx(want, abs=1e-12)
    assert rouge_l("", "a") == 0.0


def test_lcs():
    assert lcs_length("ABCBDAB", "BDCABA") == 4
    assert lcs_length([], [1]) == 0


def test_tree_exact_match_and_errors():
    assert tree_exact_match("What [DES] is", "what [DES] IS")
    assert not tree_exact_match("What [DES] is", "what [DES] IS", case_sensitive=True)
    with pytest.raises(InvalidInput):
        tree_exact_match("a [INQL] b", "a b")


def test_tree_depth_accuracy():
    preds = ["a [INQL] b [INQR]", "a b", "a [INQL] b"]
    golds = ["c [INQL] d [INQR]", "c [INQL] d [INQR]", "a b"]
    assert tree_depth_accuracy(preds, golds) == pytest.approx(1 / 3)
    with pytest.raises(LengthMismatch):
        tree_depth_accuracy([], [])
    with pytest.raises(LengthMismatch):
        tree_depth_accuracy(["a"], ["a", "b"])


def test_evaluate_trees(marlins_linear):
    flat = marlins_linear.replace(" [INQL]", " [DES]").replace(" [INQR]", "")
    rep = evaluate_trees([marlins_linear, flat, "a [INQL] b"], [marlins_linear, marlins_linear, "a [DES] b"])
    assert rep.em == pytest.approx(1 / 3)
    assert rep.tda == pytest.approx(1 / 3)
    # 0, 7/11, and 1.0 for the unparseable prediction
    assert rep.ged_mean == pytest.approx((0 + 7 / 11 + 1) / 3)
    assert rep.ged_raw_mean == pytest.approx((0 + 7 + 5) / 3)
    assert rep.counts == {"n": 3, "exact": 1, "depth_match": 1, "unparseable": 1}
    assert set(rep.to_json()) >= {"em", "tda", "ged_mean", "counts"}
    assert rep.lines()[0].startswith("em")


def test_pairs():
    assert [str(x) for x in as_pair("a b [DES] c")] == ["a b", "c"]
    assert [str(x) for x in as_pair("a b")] == ["a b", ""]
    assert [str(x) for x in as_pair(("x y", "z"))] == ["x y", "z"]
    assert seq_exact_match(("A", "b"), ("a", "B"))
    with pytest.raises(ValueError):
        seq_exact_match(("a",), ("a", "b"))


def test_evaluate_sequences():
    preds = ["what films [DES] featuring swift", "a b"]
    golds = ["What films [DES] featuring Taylor Swift", "a b"]
    rep = evaluate_sequences(preds, golds)
    assert rep.seq_em == 0.5
    # second pair joins as "a b [SEP]", first as "what films [SEP] featuring swift"
    want_rouge = (rouge_l_oracle("what films [SEP] featuring swift", "what films [SEP] featuring taylor swift")
                  + 1.0) / 2
    assert rep.rouge_l == pytest.approx(want_rouge, abs=1e-9)
    want_bleu = bleu_oracle([("what films [SEP] featuring swift", "what films [SEP] featuring taylor swift"),
                             ("a b [SEP]", "a b [SEP]")])
    assert rep.bleu4 == pytest.approx(want_bleu, abs=1e-9)


def test_answer_metrics():
    assert answer_prf({"a"}, {"a", "b"}) == pytest.approx((1.0, 0.5, 2 / 3))
    assert answer_prf(set(), set()) == (1.0, 1.0, 1.0)
    assert answer_prf({"a"}, set()) == (0.0, 0.0, 0.0)
    m = answer_set_metrics([{"a"}, set(), {"x"}], [{"a", "b"}, set(), {"y"}])
    assert m["avg_f1"] == pytest.approx((2 / 3 + 1 + 0) / 3)
    assert m["acc"] == pytest.approx(1 / 3)
    assert m["macro_p"] == pytest.approx(2 / 3)
    assert m["macro_r"] == pytest.approx(0.5)
    with pytest.raises(LengthMismatch):
        answer_set_metrics([], [])
