"""Slow, independent reference implementations used to check the library."""
from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from fractions import Fraction
from functools import lru_cache

import networkx as nx
import numpy as np

from qdt.core import QdtTree, make_description, make_question, to_graph
from qdt.sexpr import ARITY, CLASS_SLOT_OPS, Apply, Class, Entity, Literal, Relation


# ---------------------------------------------------------------------------
# Exhaustive small QDTs
# ---------------------------------------------------------------------------

def _questions(budget: int, words):
    # a question node costs 1, plus its descriptions
    if budget < 2:
        return

    def desc_lists(b):
        for d, used in _descriptions(b, words):
            yield [d], used
            for rest, used2 in desc_lists(b - used):
                yield [d] + rest, used + used2

    for ds, used in desc_lists(budget - 1):
        yield make_question(*ds), 1 + used


def _descriptions(budget: int, words):
    if budget < 1:
        return
    for w in words:
        yield make_description(w), 1
    for q, used in _questions(budget - 1, words):
        for w in words:
            yield make_description(w, q), 1 + used
            yield make_description(q, w), 1 + used
        yield make_description(q), 1 + used


def small_qdt_graphs(max_nodes: int = 6, words=("a",)) -> list[nx.DiGraph]:
    """Every QDT graph with at most ``max_nodes`` nodes, up to labeled isomorphism."""
    match = lambda x, y: x["label"] == y["label"]  # noqa: E731
    seen: list[nx.DiGraph] = []
    for q, _ in _questions(max_nodes, words):
        g = to_graph(QdtTree(q))
        if not any(h.number_of_nodes() == g.number_of_nodes()
                   and h.number_of_edges() == g.number_of_edges()
                   and nx.is_isomorphic(h, g, node_match=match) for h in seen):
            seen.append(g)
    return seen


# ---------------------------------------------------------------------------
# Brute-force GED: try every partial injective node mapping
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _mappings(n1: int, n2: int) -> np.ndarray:
    """All maps from range(n1) into range(n2) + {deleted}, injective on range(n2).

    "deleted" is encoded as n2.
    """
    rows = []
    for k in range(min(n1, n2) + 1):
        for kept in itertools.combinations(range(n1), k):
            for image in itertools.permutations(range(n2), k):
                row = [n2] * n1
                for u, v in zip(kept, image):
                    row[u] = v
                rows.append(row)
    return np.array(rows, dtype=np.int64).reshape(len(rows), n1)


def brute_force_ged(g1: nx.DiGraph, g2: nx.DiGraph) -> int:
    """Unit-cost GED: node/edge insert, delete and relabel all cost 1."""
    n1_nodes, n2_nodes = list(g1.nodes), list(g2.nodes)
    n1, n2 = len(n1_nodes), len(n2_nodes)
    i1 = {n: i for i, n in enumerate(n1_nodes)}
    i2 = {n: i for i, n in enumerate(n2_nodes)}
    # relabel cost with an extra "deleted" column costing 1
    sub = np.ones((n1, n2 + 1), dtype=np.int64)
    for a in n1_nodes:
        for b in n2_nodes:
            sub[i1[a], i2[b]] = int(g1.nodes[a]["label"] != g2.nodes[b]["label"])
    adj2 = np.zeros((n2 + 1, n2 + 1), dtype=np.int64)
    for u, v in g2.edges:
        adj2[i2[u], i2[v]] = 1

    M = _mappings(n1, n2)
    node_cost = sub[np.arange(n1), M].sum(axis=1)
    inserted_nodes = n2 - (M < n2).sum(axis=1)
    kept_edges = np.zeros(len(M), dtype=np.int64)
    for u, v in g1.edges:
        kept_edges += adj2[M[:, i1[u]], M[:, i1[v]]]
    edge_cost = (g1.number_of_edges() - kept_edges) + (g2.number_of_edges() - kept_edges)
    return int((node_cost + inserted_nodes + edge_cost).min())


# ---------------------------------------------------------------------------
# BLEU / ROUGE-L with exact arithmetic
# ---------------------------------------------------------------------------

def _grams(words, n):
    return Counter(tuple(words[i:i + n]) for i in range(len(words) - n + 1))


def bleu_oracle(pairs, max_n: int = 4, eps=Fraction(1, 10 ** 9)) -> float:
    """Corpus BLEU with clipped counts, brevity penalty and eps for empty match counts."""
    matched = [0] * max_n
    possible = [0] * max_n
    c_len = r_len = 0
    for cand, ref in pairs:
        c, r = cand.split(), ref.split()
        c_len += len(c)
        r_len += len(r)
        for n in range(1, max_n + 1):
            cg, rg = _grams(c, n), _grams(r, n)
            matched[n - 1] += sum(min(cnt, rg[g]) for g, cnt in cg.items())
            possible[n - 1] += sum(cg.values())
    precisions = [Fraction(m) / (p or 1) if m else eps / (p or 1) for m, p in zip(matched, possible)]
    geo = math.exp(sum(math.log(p) for p in precisions) / max_n)
    bp = 1.0 if c_len > r_len else math.exp(1 - Fraction(r_len, c_len))
    return bp * geo


def _lcs(a, b) -> int:
    @lru_cache(maxsize=None)
    def go(i, j):
        if i == len(a) or j == len(b):
            return 0
        if a[i] == b[j]:
            return 1 + go(i + 1, j + 1)
        return max(go(i + 1, j), go(i, j + 1))
    return go(0, 0)


def rouge_l_oracle(cand: str, ref: str, beta=Fraction(6, 5)) -> float:
    c, r = tuple(cand.split()), tuple(ref.split())
    if not c or not r:
        return 0.0
    lcs = _lcs(c, r)
    if not lcs:
        return 0.0
    p, rec = Fraction(lcs, len(c)), Fraction(lcs, len(r))
    return float((1 + beta ** 2) * p * rec / (rec + beta ** 2 * p))


# ---------------------------------------------------------------------------
# Random logical forms over a synthetic KB
# ---------------------------------------------------------------------------

RELATIONS = [
    "location.location.people_born_here", "people.person.place_of_birth", "film.film.starring",
    "sports.sports_team.location", "education.education.institution", "film.performance.actor",
    "location.country.capital", "people.person.education", "sports.pro_athlete.career_start",
    "film.film.netflix_id",
]
CLASSES = ["film.film", "people.person", "location.citytown", "sports.sports_team"]
LITERALS = ["1997", "70068848", "1990^^xsd:integer", "2000-01-01^^xsd:dateTime", "4.5^^xsd:float"]


def synthetic_kb(n_entities: int = 40, seed: int = 0):
    """Entity ids mapped to distinct labels, plus the relation vocabulary."""
    rng = random.Random(seed)
    ids = set()
    while len(ids) < n_entities:
        ids.add("m." + "".join(rng.choice("0123456789abcdefghijklmnopqrstuvwxyz_") for _ in range(5)))
    labels = {e: f"Entity {i} of kb" for i, e in enumerate(sorted(ids))}
    return labels, set(RELATIONS) | set(CLASSES)


def random_sexpr(rng, entity_ids, max_depth: int = 4):
    def leaf(op, slot):
        if op in CLASS_SLOT_OPS and slot == 0 and rng.random() < 0.5:
            return Class(rng.choice(CLASSES))
        r = rng.random()
        if r < 0.4:
            return Entity(rng.choice(entity_ids))
        if r < 0.8 and not (op in CLASS_SLOT_OPS and slot == 0):
            return Relation(rng.choice(RELATIONS))
        return Literal.parse(rng.choice(LITERALS))

    def node(level, op=None, slot=None):
        if level >= max_depth or (level and rng.random() < 0.35):
            return leaf(op, slot)
        name = rng.choice(sorted(ARITY))
        return Apply(name, tuple(node(level + 1, name, i) for i in range(ARITY[name])))

    return node(0)
