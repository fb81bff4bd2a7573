"""Exact graph edit distance for small labeled digraphs.

Best-first (A*) search over partial node mappings. G1 nodes are assigned
in breadth-first order, each either to an unused G2 node or to deletion;
an edge's cost is charged once both of its G1 endpoints are decided. The
remaining cost is bounded from below by an optimal assignment of the
undecided nodes (see ``_Search.bound``), so the first complete mapping
popped from the queue is optimal.
"""
from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Callable

import networkx as nx
import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import SizeLimit

DEFAULT_NODE_LIMIT = 30


@dataclass(frozen=True)
class GedCosts:
    node_insert: float = 1.0
    node_delete: float = 1.0
    node_substitute: Callable[[str, str], float] | float = 1.0
    edge_insert: float = 1.0
    edge_delete: float = 1.0

    def __post_init__(self):
        for name in ("node_insert", "node_delete", "edge_insert", "edge_delete"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not callable(self.node_substitute) and self.node_substitute < 0:
            raise ValueError("node_substitute must be >= 0")

    def substitute(self, a: str, b: str) -> float:
        if a == b:
            return 0.0
        if callable(self.node_substitute):
            return float(self.node_substitute(a, b))
        return float(self.node_substitute)


@dataclass
class _Graph:
    labels: list
    edges: set

    @classmethod
    def of(cls, g: nx.DiGraph, order=None) -> "_Graph":
        nodes = list(order) if order is not None else list(g.nodes)
        index = {n: i for i, n in enumerate(nodes)}
        edges = {(index[u], index[v]) for u, v in g.edges}
        return cls([g.nodes[n].get("label") for n in nodes], edges)

    def __len__(self):
        return len(self.labels)


def _search_order(g: nx.DiGraph) -> list:
    roots = [n for n in g.nodes if g.in_degree(n) == 0] or list(g.nodes)[:1]
    seen, order = set(), []
    for r in roots:
        for n in itertools.chain([r], (v for _, v in nx.bfs_edges(g, r))):
            if n not in seen:
                seen.add(n)
                order.append(n)
    order.extend(n for n in g.nodes if n not in seen)
    return order


def graph_edit_distance(g1: nx.DiGraph, g2: nx.DiGraph, costs: GedCosts | None = None,
                        node_limit: int = DEFAULT_NODE_LIMIT) -> float:
    """Minimal edit cost turning ``g1`` into ``g2`` (nodes carry a ``label`` attribute)."""
    costs = costs or GedCosts()
    for g in (g1, g2):
        if g.number_of_nodes() > node_limit:
            raise SizeLimit(f"graph has {g.number_of_nodes()} nodes, limit is {node_limit}")
    return float(_Search(_Graph.of(g1, _search_order(g1)), _Graph.of(g2, _search_order(g2)), costs).run())


class _Search:
    def __init__(self, a: _Graph, b: _Graph, costs: GedCosts):
        self.a, self.b, self.costs = a, b, costs
        self.n1, self.n2 = len(a), len(b)
        n1, n2 = self.n1, self.n2
        self.A = np.zeros((n1, n1))
        for u, v in a.edges:
            self.A[u, v] = 1
        self.B = np.zeros((n2, n2))
        for u, v in b.edges:
            self.B[u, v] = 1
        self.Bpad = np.zeros((n2 + 1, n2 + 1))
        self.Bpad[:n2, :n2] = self.B
        self.BTpad = self.Bpad.T.copy()
        self.sub = np.array([[costs.substitute(x, y) for y in b.labels]
                             for x in a.labels]).reshape(n1, n2)
        self.edel, self.eins = costs.edge_delete, costs.edge_insert

    def edge_step(self, k: int, v: int, mapping: tuple) -> float:
        """Edge cost settled by mapping G1 node k to v (-1 = delete), given mapping[:k]."""
        A, B = self.A, self.B
        cost = 0.0
        for w in range(k):
            fw = mapping[w]
            for e1, e2 in ((A[k, w], B[v, fw] if v >= 0 and fw >= 0 else 0),
                           (A[w, k], B[fw, v] if v >= 0 and fw >= 0 else 0)):
                if e1 and not e2:
                    cost += self.edel
                elif e2 and not e1:
                    cost += self.eins
        return cost

    def bound(self, k: int, mapping: tuple, used: int) -> float:
        """Admissible estimate of the cost still to pay from this partial mapping.

        Edges between an undecided node and a decided one are priced exactly
        per candidate pair; edges with both ends undecided get half their
        degree-difference cost at each end.
        """
        n1, n2, A = self.n1, self.n2, self.A
        rest2 = [v for v in range(n2) if not used >> v & 1]
        usedv = [v for v in range(n2) if used >> v & 1]
        r1, r2 = n1 - k, len(rest2)
        if r1 == 0 and r2 == 0:
            return 0.0
        edel, eins = self.edel, self.eins

        # Bpad has an all-zero last row/column standing in for "deleted"
        fmap = [x if x >= 0 else n2 for x in mapping[:k]]
        B_rest = self.Bpad[rest2]                            # rows: undecided v
        BT_rest = self.BTpad[rest2]
        A_out_dec = A[k:, :k]                                # rest1 -> decided
        A_in_dec = A[:k, k:].T                               # decided -> rest1
        # matched[u, v]: edges u-w / v-f(w) present in both graphs, per direction
        matched_out = A_out_dec @ B_rest[:, fmap].T
        matched_in = A_in_dec @ BT_rest[:, fmap].T
        dout1 = A_out_dec.sum(1)[:, None]
        din1 = A_in_dec.sum(1)[:, None]
        dout2 = B_rest[:, usedv].sum(1)[None, :]
        din2 = BT_rest[:, usedv].sum(1)[None, :]
        exact = ((dout1 - matched_out + din1 - matched_in) * edel
                 + (dout2 - matched_out + din2 - matched_in) * eins)

        A_rr = A[k:, k:]
        B_rr = B_rest[:, rest2]
        ro1, ri1 = A_rr.sum(1)[:, None], A_rr.sum(0)[:, None]
        ro2, ri2 = B_rr.sum(1)[None, :], B_rr.sum(0)[None, :]
        half = np.zeros((r1, r2))
        for d1, d2 in ((ro1, ro2), (ri1, ri2)):
            diff = d1 - d2
            half += np.where(diff > 0, diff * edel / 2, -diff * eins / 2)

        pair = self.sub[k:, rest2] + exact + half
        drop = (self.costs.node_delete + (dout1 + din1)[:, 0] * edel
                + (ro1 + ri1)[:, 0] * edel / 2)
        add = (self.costs.node_insert + (dout2 + din2)[0, :] * eins
               + (ro2 + ri2)[0, :] * eins / 2)
        if r1 == 0:
            return float(add.sum())
        if r2 == 0:
            return float(drop.sum())
        big = 1e12
        m = np.zeros((r1 + r2, r1 + r2))
        m[:r1, :r2] = pair
        m[:r1, r2:] = big
        m[r1:, :r2] = big
        m[np.arange(r1), r2 + np.arange(r1)] = drop
        m[r1 + np.arange(r2), np.arange(r2)] = add
        rows, cols = linear_sum_assignment(m)
        return float(m[rows, cols].sum())

    def completion(self, used: int) -> float:
        cost = 0.0
        for v in range(self.n2):
            if not used >> v & 1:
                cost += self.costs.node_insert
        for u, v in self.b.edges:
            if not (used >> u & 1) or not (used >> v & 1):
                cost += self.eins
        return cost

    def run(self) -> float:
        # Children enter the queue with their parent's f (valid: the parent's
        # bound already covers every child); the real bound is computed only
        # when a child is popped, and the child is re-queued if it rises.
        # Ties on f go to the deepest partial mapping.
        n1, n2 = self.n1, self.n2
        tie = itertools.count()
        heap = [(self.bound(0, (), 0), 0, 0.0, next(tie), 0, (), 0, True)]
        while heap:
            f, _, g, _, k, mapping, used, exact = heapq.heappop(heap)
            if k == n1 + 1:
                return g
            if k == n1:
                total = g + self.completion(used)
                heapq.heappush(heap, (total, -n1 - 1, total, next(tie), n1 + 1, mapping, used, True))
                continue
            if not exact:
                fk = g + self.bound(k, mapping, used)
                if fk > f:
                    heapq.heappush(heap, (fk, -k, g, next(tie), k, mapping, used, True))
                    continue
            for v in itertools.chain(range(n2), (-1,)):
                if v >= 0 and used >> v & 1:
                    continue
                child = mapping + (v,)
                node = self.sub[k, v] if v >= 0 else self.costs.node_delete
                ng = g + node + self.edge_step(k, v, child)
                nu = used | (1 << v) if v >= 0 else used
                heapq.heappush(heap, (max(f, ng), -k - 1, ng, next(tie), k + 1, child, nu, False))
        raise AssertionError("search exhausted without a complete mapping")


def graph_size(g: nx.DiGraph) -> int:
    return g.number_of_nodes() + g.number_of_edges()


def normalized_ged(g1: nx.DiGraph, g2: nx.DiGraph, costs: GedCosts | None = None,
                   node_limit: int = DEFAULT_NODE_LIMIT) -> tuple[float, float]:
    """``(raw, raw / size of the larger graph)``; size counts nodes plus edges."""
    raw = graph_edit_distance(g1, g2, costs, node_limit)
    size = max(graph_size(g1), graph_size(g2))
    return raw, (raw / size if size else 0.0)
