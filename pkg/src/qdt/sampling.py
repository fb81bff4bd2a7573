"""Seeded generator of random QDTs for property tests and benchmarks."""
from __future__ import annotations

import random

from .core import QdtTree, make_description, make_question, serialize, strip_separators

_VOCAB = (
    "what which who where films schools movie team home of the a is also birthplace "
    "notable athlete career began in 1997 featuring have numbers above attended by "
    "character focus film played for country language spoken capital river city "
    "born here largest population than more less after before Taylor Swift Kate"
).split()


def random_tree(rng: random.Random, max_depth: int = 3, max_words: int = 30) -> QdtTree:
    """Sample a QDT with depth <= max_depth and at most max_words words."""
    budget = [rng.randint(1, max_words)]

    def take(n):
        n = max(1, min(n, budget[0]))
        budget[0] -= n
        return [rng.choice(_VOCAB) for _ in range(n)]

    def question(level: int):
        n_desc = rng.choice((1, 1, 2, 2, 3))
        descs = []
        for i in range(n_desc):
            if i and budget[0] <= 0:
                break
            parts = [take(rng.randint(1, 4))]
            if level < max_depth and budget[0] >= 1 and rng.random() < 0.35:
                inner = question(level + 1)
                r = rng.random()
                if r < 0.15:
                    parts = [inner]
                elif r < 0.3:
                    parts.insert(0, inner)
                else:
                    parts.append(inner)
                if budget[0] > 0 and rng.random() < 0.4:
                    parts.append(take(rng.randint(1, 3)))
            descs.append(make_description(*parts))
        return make_question(*descs)

    tree = QdtTree(question(1))
    # take() never drops below one word per segment, so enforce the word cap here
    if len(strip_separators(serialize(tree))) > max_words:
        return random_tree(rng, max_depth, max_words)
    return tree


def random_trees(n: int, seed: int = 0, max_depth: int = 3, max_words: int = 30) -> list[QdtTree]:
    rng = random.Random(seed)
    return [random_tree(rng, max_depth, max_words) for _ in range(n)]
