"""Sparse bipartite matching graph and full matchings over it.

An edge exists only for node pairs with a positive propagated similarity;
its cost is 1/(1+score), so better-scoring pairs are cheaper. A full
matching covers every node of both trees exactly once, either by a pair or
by leaving it in the unmatched set (the no-match assignment), and is charged
``no_match_cost`` per unmatched node.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .similarity import SftmParams, SimilarityTable
from .tree import LabeledTree


class NotFull(ValueError):
    """The matching does not cover every node exactly once."""


@dataclass(frozen=True)
class Edge:
    n: int
    m: int
    cost: float


@dataclass
class MatchGraph:
    """Edges sorted by (cost, n, m) plus per-node adjacency into that order.

    Immutable after construction; ``_scratch`` caches optimizer working
    structures derived from the edge list.
    """

    edges: tuple[Edge, ...]
    t1_adjacency: tuple[tuple[int, ...], ...]
    t2_adjacency: tuple[tuple[int, ...], ...]
    t1_size: int
    t2_size: int
    _scratch: object = field(default=None, repr=False, compare=False)


def build_graph(sp: SimilarityTable, t1: LabeledTree, t2: LabeledTree) -> MatchGraph:
    """One edge per positive similarity entry, cost 1/(1+score)."""
    edges = sorted(
        (Edge(n=n, m=m, cost=1.0 / (1.0 + score)) for (n, m), score in sp.scores.items()),
        key=lambda e: (e.cost, e.n, e.m),
    )
    t1_adj: list[list[int]] = [[] for _ in range(len(t1))]
    t2_adj: list[list[int]] = [[] for _ in range(len(t2))]
    for idx, edge in enumerate(edges):
        t1_adj[edge.n].append(idx)
        t2_adj[edge.m].append(idx)
    return MatchGraph(
        edges=tuple(edges),
        t1_adjacency=tuple(tuple(a) for a in t1_adj),
        t2_adjacency=tuple(tuple(a) for a in t2_adj),
        t1_size=len(t1),
        t2_size=len(t2),
    )


def edge_count(g: MatchGraph) -> int:
    return len(g.edges)


def neighbors(g: MatchGraph, side: str, node_id: int) -> list[Edge]:
    """Edges incident to a node, cheapest first. ``side`` is "t1" or "t2"."""
    if side == "t1":
        adjacency = g.t1_adjacency
    elif side == "t2":
        adjacency = g.t2_adjacency
    else:
        raise ValueError(f"side must be 't1' or 't2', got {side!r}")
    if not 0 <= node_id < len(adjacency):
        return []
    return [g.edges[i] for i in adjacency[node_id]]


@dataclass(frozen=True)
class Matching:
    """A full matching: ordered selected pairs plus the unmatched remainder.

    ``pairs[k]`` is (t1 node, t2 node) and ``pair_costs[k]`` its edge cost.
    Pair order is meaningful to the optimizer's suggestion step and is
    preserved.
    """

    pairs: tuple[tuple[int, int], ...]
    pair_costs: tuple[float, ...]
    unmatched_t1: frozenset[int]
    unmatched_t2: frozenset[int]
    t1_size: int
    t2_size: int
    _checked: bool = field(default=False, repr=False, compare=False)

    @property
    def size(self) -> int:
        """Edge count of the full matching, no-match assignments included."""
        return len(self.pairs) + len(self.unmatched_t1) + len(self.unmatched_t2)


def validate_full(m: Matching) -> None:
    """Raise :class:`NotFull` unless every node is covered exactly once."""
    if m._checked:
        return
    if len(m.pairs) != len(m.pair_costs):
        raise NotFull("pair/cost length mismatch")
    t1_seen = {n for n, _ in m.pairs}
    t2_seen = {mm for _, mm in m.pairs}
    if len(t1_seen) != len(m.pairs) or len(t2_seen) != len(m.pairs):
        raise NotFull("a node appears in more than one pair")
    if t1_seen & m.unmatched_t1 or t2_seen & m.unmatched_t2:
        raise NotFull("a node is both matched and unmatched")
    if len(m.pairs) + len(m.unmatched_t1) != m.t1_size:
        raise NotFull(
            f"t1 coverage {len(m.pairs)}+{len(m.unmatched_t1)} != {m.t1_size}"
        )
    if len(m.pairs) + len(m.unmatched_t2) != m.t2_size:
        raise NotFull(
            f"t2 coverage {len(m.pairs)}+{len(m.unmatched_t2)} != {m.t2_size}"
        )


def matching_cost(m: Matching, params: SftmParams) -> float:
    """Total cost: selected edge costs plus the no-match penalty per uncovered node."""
    validate_full(m)
    return sum(m.pair_costs) + params.no_match_cost * (
        len(m.unmatched_t1) + len(m.unmatched_t2)
    )


def matching_to_json(m: Matching, t1: LabeledTree, t2: LabeledTree, indent: int | None = 2) -> str:
    """Serialize a matching with xpaths rather than bare node ids."""
    obj = {
        "pairs": [
            {
                "t1_xpath": t1.node(n).xpath,
                "t2_xpath": t2.node(mm).xpath,
                "cost": cost,
            }
            for (n, mm), cost in zip(m.pairs, m.pair_costs)
        ],
        "unmatched_t1": sorted(t1.node(n).xpath for n in m.unmatched_t1),
        "unmatched_t2": sorted(t2.node(mm).xpath for mm in m.unmatched_t2),
    }
    return json.dumps(obj, ensure_ascii=False, indent=indent)
