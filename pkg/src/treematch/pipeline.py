"""End-to-end matching: similarity, graph build, then Metropolis search."""

from __future__ import annotations

from .graph import MatchGraph, Matching, build_graph
from .optimize import ProgressHook, metropolis
from .similarity import SftmParams, initial_similarity, propagate
from .tokens import DEFAULT_TOKEN_OPTIONS, TokenOptions
from .tree import LabeledTree


def match_trees_detailed(
    t1: LabeledTree,
    t2: LabeledTree,
    params: SftmParams = SftmParams(),
    options: TokenOptions = DEFAULT_TOKEN_OPTIONS,
    progress: ProgressHook | None = None,
) -> tuple[Matching, MatchGraph]:
    s0 = initial_similarity(t1, t2, params, options)
    sp = propagate(s0, t1, t2, params)
    g = build_graph(sp, t1, t2)
    return metropolis(g, params, progress), g


def match_trees(
    t1: LabeledTree,
    t2: LabeledTree,
    params: SftmParams = SftmParams(),
    options: TokenOptions = DEFAULT_TOKEN_OPTIONS,
) -> Matching:
    """Match two trees and return the best full matching found."""
    matching, _ = match_trees_detailed(t1, t2, params, options)
    return matching
