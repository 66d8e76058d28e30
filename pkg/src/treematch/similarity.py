"""Token-level similarity between the nodes of two trees.

Pipeline: build an inverted index over the first tree's tokens, drop tokens
that occur in too many nodes (sublinear threshold), score each second-tree
node against the index with IDF weighting, then propagate scores up the
parent chain so local topology counts too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .tokens import DEFAULT_TOKEN_OPTIONS, TokenOptions, tokenize_node
from .tree import LabeledTree


class MissingToken(KeyError):
    """Requested a token that is not in the index."""


@dataclass(frozen=True)
class SftmParams:
    """Tuning knobs for the whole matching pipeline.

    ``alpha`` sets the token-multiplicity cutoff f(N) = N**alpha; tokens held
    by more than ceil(f(N)) first-tree nodes are ignored. ``weights`` has one
    entry per propagation level 0..p. ``beta`` sharpens the optimizer's
    objective, ``gamma`` is the per-edge stop probability of the matching
    suggestion scan, and ``no_match_cost`` is the penalty for leaving a node
    unmatched.
    """

    alpha: float = 0.5
    p: int = 2
    weights: tuple[float, ...] = (1.0, 0.5, 0.25)
    beta: float = 4.0
    gamma: float = 0.9
    iterations: int = 100
    no_match_cost: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.p < 0:
            raise ValueError(f"propagation depth must be >= 0, got {self.p}")
        if len(self.weights) != self.p + 1:
            raise ValueError(
                f"need {self.p + 1} weights for depth {self.p}, got {len(self.weights)}"
            )
        if self.weights[0] <= 0:
            raise ValueError("weight w0 must be > 0")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be non-negative")
        if self.beta <= 0:
            raise ValueError(f"beta must be > 0, got {self.beta}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.no_match_cost <= 0:
            raise ValueError(f"no_match_cost must be > 0, got {self.no_match_cost}")


@dataclass
class TokenIndex:
    """Inverted index: token -> set of first-tree node ids that carry it."""

    entries: dict[str, set[int]]
    t1_size: int


@dataclass
class SimilarityTable:
    """Sparse (n, m) -> score table; absent means zero, stored scores are > 0."""

    scores: dict[tuple[int, int], float] = field(default_factory=dict)

    def get(self, n: int, m: int) -> float:
        return self.scores.get((n, m), 0.0)

    def __len__(self) -> int:
        return len(self.scores)


def build_token_index(
    t1: LabeledTree, options: TokenOptions = DEFAULT_TOKEN_OPTIONS
) -> TokenIndex:
    """Index every node of the first tree under each of its tokens."""
    entries: dict[str, set[int]] = {}
    for node in t1:
        for token in sorted(tokenize_node(t1, node.id, options)):
            bucket = entries.get(token)
            if bucket is None:
                entries[token] = {node.id}
            else:
                bucket.add(node.id)
    return TokenIndex(entries=entries, t1_size=len(t1))


def threshold_cutoff(t1_size: int, alpha: float) -> int:
    # the epsilon guards against pow() landing a hair above an exact integer
    return math.ceil(t1_size**alpha - 1e-9)


def apply_threshold(index: TokenIndex, alpha: float) -> TokenIndex:
    """Drop tokens carried by more than ceil(N**alpha) nodes; keep the rest."""
    cutoff = threshold_cutoff(index.t1_size, alpha)
    entries = {t: nodes for t, nodes in index.entries.items() if len(nodes) <= cutoff}
    return TokenIndex(entries=entries, t1_size=index.t1_size)


def idf(index: TokenIndex, token: str) -> float:
    """log(N / multiplicity): how rare, hence how informative, a token is."""
    nodes = index.entries.get(token)
    if nodes is None:
        raise MissingToken(token)
    return math.log(index.t1_size / len(nodes))


def neighbor_scores(
    t2: LabeledTree,
    m: int,
    index: TokenIndex,
    options: TokenOptions = DEFAULT_TOKEN_OPTIONS,
    contribution_log: dict[str, int] | None = None,
) -> dict[int, float]:
    """Initial similarity of one second-tree node against all indexed nodes.

    Each shared token adds its IDF to the token-holders' scores; only nodes
    with a positive accumulated score appear in the result. When given,
    ``contribution_log`` records each contributing token's index multiplicity.
    """
    scores: dict[int, float] = {}
    for token in sorted(tokenize_node(t2, m, options)):
        bucket = index.entries.get(token)
        if not bucket:
            continue
        weight = math.log(index.t1_size / len(bucket))
        if contribution_log is not None:
            contribution_log[token] = len(bucket)
        if weight == 0.0:
            continue
        for n in bucket:
            scores[n] = scores.get(n, 0.0) + weight
    return {n: s for n, s in scores.items() if s > 0.0}


def initial_similarity(
    t1: LabeledTree,
    t2: LabeledTree,
    params: SftmParams,
    options: TokenOptions = DEFAULT_TOKEN_OPTIONS,
    contribution_log: dict[str, int] | None = None,
) -> SimilarityTable:
    """Label-only similarity for every node pair that shares an indexed token."""
    index = apply_threshold(build_token_index(t1, options), params.alpha)
    idf_by_token = {
        t: math.log(index.t1_size / len(nodes)) for t, nodes in index.entries.items()
    }
    table: dict[tuple[int, int], float] = {}
    entries = index.entries
    for m in range(len(t2)):
        acc: dict[int, float] = {}
        for token in sorted(tokenize_node(t2, m, options)):
            bucket = entries.get(token)
            if not bucket:
                continue
            if contribution_log is not None:
                contribution_log[token] = len(bucket)
            weight = idf_by_token[token]
            if weight == 0.0:
                continue
            for n in bucket:
                acc[n] = acc.get(n, 0.0) + weight
        for n, s in acc.items():
            if s > 0.0:
                table[(n, m)] = s
    return SimilarityTable(scores=table)


def propagate(
    s0: SimilarityTable,
    t1: LabeledTree,
    t2: LabeledTree,
    params: SftmParams,
) -> SimilarityTable:
    """Blend each pair's score with its ancestors' scores, weighted per level.

    Only pairs with a positive initial score are kept; a missing ancestor or
    an absent ancestor-pair score contributes nothing.
    """
    weights = params.weights
    depth = params.p
    parents1 = [node.parent for node in t1]
    parents2 = [node.parent for node in t2]
    base = s0.scores
    out: dict[tuple[int, int], float] = {}
    for (n, m), score in base.items():
        total = weights[0] * score
        a: int | None = n
        b: int | None = m
        for i in range(1, depth + 1):
            a = parents1[a]  # type: ignore[index]
            b = parents2[b]  # type: ignore[index]
            if a is None or b is None:
                break
            up = base.get((a, b))
            if up is not None:
                total += weights[i] * up
        out[(n, m)] = total
    return SimilarityTable(scores=out)


def similarity_debug_dump(
    index: TokenIndex, table: SimilarityTable, t1: LabeledTree, t2: LabeledTree
) -> dict:
    """JSON-ready diagnostic view: token multiplicities and xpath-keyed scores."""
    return {
        "token_counts": {t: len(nodes) for t, nodes in sorted(index.entries.items())},
        "scores": [
            {"t1": t1.node(n).xpath, "t2": t2.node(m).xpath, "score": s}
            for (n, m), s in sorted(table.scores.items())
        ],
    }
