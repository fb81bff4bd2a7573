import hashlib
import json
import random
from collections import Counter

import pytest

from qdt.core import Kind, TokenSeq, serialize, strip_separators
from qdt.corruption import (
    ACTIONS, DELETE, INSERT_AFTER, KEEP, REPLACE, CorruptionRates, corrupt, corrupt_tokens,
    example_seed, extract_branches, generate_training_set, negative_options,
)
from qdt.errors import NoSeparators
from qdt.sampling import random_trees


def test_rates_validation_and_parse():
    assert CorruptionRates().as_tuple() == (0.01, 0.01, 0.01, 0.97)
    assert CorruptionRates.parse("0.1,0.1,0.1,0.7").replace == 0.1
    with pytest.raises(ValueError):
        CorruptionRates(0.5, 0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        CorruptionRates(-0.1, 0.1, 0.0, 1.0)
    with pytest.raises(ValueError):
        CorruptionRates.parse("0.5,0.5")


def test_extract_branches():
    bs = extract_branches("a [DES] b [INQL] c d [INQR]")
    assert [(b.insert_position, b.separator_kind, b.ordinal) for b in bs] == [
        (1, Kind.DES, 0), (2, Kind.INQL, 1), (4, Kind.INQR, 2)]
    assert str(bs[1].rendered) == "a b [INQL] c d"
    with pytest.raises(NoSeparators):
        extract_branches("a b")


def test_negative_options_contain_gold():
    question = TokenSeq.of("a b c d e f g h")
    for b in extract_branches("a b c d e f g [DES] h"):
        opts = negative_options(b, question)
        assert len(opts) == 5
        assert b.insert_position in [o.insert_position for o in opts]
        assert [o.insert_position for o in opts] == sorted(o.insert_position for o in opts)


def test_keep_only_is_identity():
    b = extract_branches("What films [DES] featuring Taylor Swift")[0]
    q = corrupt(b, CorruptionRates(0, 0, 0, 1), seed=3)
    assert q.tokens == b.rendered
    q = corrupt(b, CorruptionRates(0, 0, 0, 1), seed=3, lowercase=True)
    assert str(q.tokens) == "what films [DES] featuring taylor swift"


def test_each_action_alone():
    toks = TokenSeq.of("a b [DES] c").tokens
    out, acts = corrupt_tokens(toks, CorruptionRates(0, 1, 0, 0), random.Random(0))
    assert [t.text for t in out] == ["[DES]"] and acts == [DELETE] * 3
    out, acts = corrupt_tokens(toks, CorruptionRates(0, 0, 1, 0), random.Random(0))
    assert len(out) == 7 and acts == [INSERT_AFTER] * 3
    out, acts = corrupt_tokens(toks, CorruptionRates(1, 0, 0, 0), random.Random(0))
    assert len(out) == 4 and out[2].kind is Kind.DES and acts == [REPLACE] * 3
    assert all(t.text in {"a", "b", "c"} for t in out if t.is_word)


def test_corrupt_is_deterministic():
    b = extract_branches("a b c d e f g h [DES] i j k l")[0]
    rates = CorruptionRates(0.2, 0.2, 0.2, 0.4)
    assert corrupt(b, rates, seed=7) == corrupt(b, rates, seed=7)
    assert len({str(corrupt(b, rates, seed=s).tokens) for s in range(20)}) > 1


def test_example_seed_stable():
    assert example_seed(0, "x") == example_seed(0, "x")
    assert example_seed(0, "x") != example_seed(1, "x")
    digest = hashlib.sha256(b"0:ex-1").digest()
    assert example_seed(0, "ex-1") == int.from_bytes(digest[:8], "big") == 12952975272164430976


def _dataset(n=30):
    out = []
    for i, t in enumerate(random_trees(n, seed=2)):
        lin = serialize(t)
        out.append((f"ex{i}", str(strip_separators(lin)), str(lin)))
    return out


def test_training_set_records():
    data = _dataset()
    diags = []
    recs = generate_training_set(data, seed=11, diagnostics=diags)
    expected = sum(TokenSeq.of(q).separator_count() for _, _, q in data)
    assert len(recs) == expected
    assert len(diags) == sum(1 for _, _, q in data if not TokenSeq.of(q).separator_count())
    for r in recs:
        opts = [o.rendered for o in r.options]
        assert r.query.separator_count() == 1
        assert strip_separators(opts[r.gold_index]) == r.question
        js = r.to_json()
        assert set(js) == {"id", "question", "query", "options", "gold_index"}
        json.dumps(js)


def test_training_set_pure_function_of_inputs():
    data = _dataset()
    a = [r.to_json() for r in generate_training_set(data, seed=5)]
    b = [r.to_json() for r in generate_training_set(list(reversed(data)), seed=5)]
    assert sorted(a, key=lambda r: r["id"]) == sorted(b, key=lambda r: r["id"])
    c = [r.to_json() for r in generate_training_set(data, seed=6, rates=CorruptionRates(0.2, 0.2, 0.2, 0.4))]
    assert a != c


def test_training_set_skips_invalid_gold():
    diags = []
    recs = generate_training_set([("x", "a b", "a [INQL] b"), ("y", "a b", "a [DES] b")], diagnostics=diags)
    assert [r.id for r in recs] == ["y-0"]
    assert diags and diags[0].startswith("x:")


def test_frequencies_small_sample():
    rng = random.Random(0)
    toks = TokenSeq.of(" ".join(["w"] * 50)).tokens
    counts = Counter()
    for _ in range(200):
        counts.update(corrupt_tokens(toks, CorruptionRates(), rng)[1])
    assert set(counts) <= set(ACTIONS)
    assert counts[KEEP] / sum(counts.values()) > 0.95
