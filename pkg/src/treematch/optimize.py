"""Metropolis search for a low-cost full matching on the sparse graph.

The walk starts from a greedy matching and repeatedly proposes a related
matching: keep a random-length prefix of the current pairs, then complete by
scanning the remaining edges in cost order, stopping on each scanned edge
with probability ``gamma``. Costs are fixed up front and never recomputed.
Acceptance uses the standard Metropolis rule on the normalized objective
exp(-beta * cost / size); the best matching seen is returned.

Everything is driven by one seeded generator; per proposal the draw order is
the kept-prefix length first, then one uniform draw per scanned edge, then
one acceptance draw per iteration. Runs reproduce bit-for-bit given
(graph, params, seed).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable

from .graph import MatchGraph, Matching, matching_cost
from .similarity import SftmParams

ProgressHook = Callable[[int, float, float], None]


class EmptyMatching(ValueError):
    """Objective of a matching with no edges at all (both trees empty)."""


@dataclass
class MetropolisState:
    """Walk state: the last accepted matching and the cheapest one seen."""

    current: Matching
    best: Matching
    rng: random.Random
    accepted_count: int = 0
    iteration: int = 0


class _Scratch:
    """Working arrays derived from a graph, shared across suggestion calls."""

    def __init__(self, g: MatchGraph):
        self.edge_n = [e.n for e in g.edges]
        self.edge_m = [e.m for e in g.edges]
        self.edge_cost = [e.cost for e in g.edges]
        self.t1_incident = [list(a) for a in g.t1_adjacency]
        self.t2_incident = [list(a) for a in g.t2_adjacency]
        self.count = len(g.edges)
        self.alive_template = b"\x01" * self.count
        self.skip_base = list(range(1, self.count + 1))


def _scratch_for(g: MatchGraph) -> _Scratch:
    scratch = g._scratch
    if scratch is None:
        scratch = _Scratch(g)
        g._scratch = scratch
    return scratch  # type: ignore[return-value]


def initial_matching(
    g: MatchGraph, params: SftmParams, rng: random.Random | None = None
) -> Matching:
    """Greedy start: walk edges cheapest-first, take both-endpoints-free ones."""
    del params, rng  # deterministic; kept for interface symmetry
    t1_used = bytearray(g.t1_size)
    t2_used = bytearray(g.t2_size)
    pairs: list[tuple[int, int]] = []
    costs: list[float] = []
    for edge in g.edges:
        if not t1_used[edge.n] and not t2_used[edge.m]:
            t1_used[edge.n] = 1
            t2_used[edge.m] = 1
            pairs.append((edge.n, edge.m))
            costs.append(edge.cost)
    return Matching(
        pairs=tuple(pairs),
        pair_costs=tuple(costs),
        unmatched_t1=frozenset(i for i in range(g.t1_size) if not t1_used[i]),
        unmatched_t2=frozenset(i for i in range(g.t2_size) if not t2_used[i]),
        t1_size=g.t1_size,
        t2_size=g.t2_size,
        _checked=True,
    )


def suggest_matching(
    g: MatchGraph, m_t: Matching, params: SftmParams, rng: random.Random
) -> Matching:
    """Propose a full matching related to ``m_t``.

    Keeps a uniform-random number of ``m_t``'s pairs in stored order (pruning
    their incident edges), then repeatedly scans the surviving edges cheapest
    first, selecting each scanned edge with probability ``gamma`` and falling
    back to the last remaining edge when a scan runs out. Nodes left with no
    selected edge become unmatched.
    """
    scratch = _scratch_for(g)
    edge_total = scratch.count
    edge_n = scratch.edge_n
    edge_m = scratch.edge_m
    edge_cost = scratch.edge_cost
    t1_incident = scratch.t1_incident
    t2_incident = scratch.t2_incident

    alive = bytearray(scratch.alive_template)
    skip = scratch.skip_base.copy()
    live = edge_total
    t1_used = bytearray(g.t1_size)
    t2_used = bytearray(g.t2_size)
    pairs: list[tuple[int, int]] = []
    costs: list[float] = []
    gamma = params.gamma
    rand = rng.random

    def find_live(i: int) -> int:
        # first live edge index >= i; compresses skip pointers over dead runs
        j = i
        while j < edge_total and not alive[j]:
            j = skip[j]
        while i < j:
            nxt = skip[i]
            skip[i] = j
            i = nxt
        return j

    to_keep = rng.randint(0, len(m_t.pairs))
    for k in range(to_keep):
        n, m2 = m_t.pairs[k]
        pairs.append((n, m2))
        costs.append(m_t.pair_costs[k])
        t1_used[n] = 1
        t2_used[m2] = 1
        for e in t1_incident[n]:
            if alive[e]:
                alive[e] = 0
                live -= 1
        for e in t2_incident[m2]:
            if alive[e]:
                alive[e] = 0
                live -= 1

    while live > 0:
        pos = find_live(0)
        chosen = -1
        last = -1
        while pos < edge_total:
            last = pos
            if rand() < gamma:
                chosen = pos
                break
            pos = find_live(pos + 1)
        if chosen < 0:
            chosen = last  # scan exhausted: take the last remaining edge
        n = edge_n[chosen]
        m2 = edge_m[chosen]
        pairs.append((n, m2))
        costs.append(edge_cost[chosen])
        t1_used[n] = 1
        t2_used[m2] = 1
        for e in t1_incident[n]:
            if alive[e]:
                alive[e] = 0
                live -= 1
        for e in t2_incident[m2]:
            if alive[e]:
                alive[e] = 0
                live -= 1

    return Matching(
        pairs=tuple(pairs),
        pair_costs=tuple(costs),
        unmatched_t1=frozenset(i for i in range(g.t1_size) if not t1_used[i]),
        unmatched_t2=frozenset(i for i in range(g.t2_size) if not t2_used[i]),
        t1_size=g.t1_size,
        t2_size=g.t2_size,
        _checked=True,
    )


def objective(m: Matching, params: SftmParams) -> float:
    """Normalized quality exp(-beta * cost / size), in (0, 1]."""
    size = m.size
    if size == 0:
        raise EmptyMatching("matching covers no node at all")
    return math.exp(-params.beta * matching_cost(m, params) / size)


def metropolis(
    g: MatchGraph, params: SftmParams, progress: ProgressHook | None = None
) -> Matching:
    """Run the Metropolis walk and return the cheapest full matching seen."""
    rng = random.Random(params.seed)
    current = initial_matching(g, params, rng)
    if current.size == 0:
        return current  # both trees empty; nothing to walk over
    state = MetropolisState(current=current, best=current, rng=rng)
    cur_cost = matching_cost(current, params)
    best_cost = cur_cost
    beta = params.beta

    for it in range(1, params.iterations + 1):
        state.iteration = it
        proposal = suggest_matching(g, state.current, params, rng)
        prop_cost = matching_cost(proposal, params)
        log_ratio = -beta * (prop_cost / proposal.size - cur_cost / state.current.size)
        accept_prob = 1.0 if log_ratio >= 0.0 else math.exp(log_ratio)
        if rng.random() < accept_prob:
            state.current = proposal
            cur_cost = prop_cost
            state.accepted_count += 1
        if prop_cost < best_cost:
            state.best = proposal
            best_cost = prop_cost
        if progress is not None:
            progress(it, cur_cost, best_cost)

    return state.best
