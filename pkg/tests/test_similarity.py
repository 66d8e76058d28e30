from __future__ import annotations

import math

import pytest
from hypothesis import given, settings

from oracles import brute_force_s0
from strategies import labeled_trees, tree_pairs
from treematch.similarity import (
    MissingToken,
    SftmParams,
    SimilarityTable,
    TokenIndex,
    apply_threshold,
    build_token_index,
    idf,
    initial_similarity,
    neighbor_scores,
    propagate,
    threshold_cutoff,
)
from treematch.tree import DraftNode, freeze

EXACT = SftmParams(alpha=1.0)


def tree_of(html_shape: DraftNode):
    return freeze(html_shape)


class TestParams:
    def test_defaults_valid(self):
        params = SftmParams()
        assert params.alpha == 0.5
        assert len(params.weights) == params.p + 1

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"alpha": 0.0},
            {"alpha": 1.5},
            {"p": 1},  # weights length mismatch
            {"p": 1, "weights": (0.0, 1.0)},  # w0 must be positive
            {"weights": (1.0, -0.5, 0.25)},
            {"beta": 0.0},
            {"gamma": 1.5},
            {"iterations": 0},
            {"no_match_cost": 0.0},
        ],
    )
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(ValueError):
            SftmParams(**kwargs)


class TestTokenIndex:
    def test_single_node_tree(self):
        tree = tree_of(DraftNode(tag="p"))
        index = build_token_index(tree)
        assert index.entries == {"tag:p": {0}, "xpath:/p": {0}}

    def test_sibling_entries(self):
        tree = tree_of(DraftNode(tag="div", children=[DraftNode(tag="p"), DraftNode(tag="p")]))
        index = build_token_index(tree)
        assert index.entries["tag:p"] == {1, 2}
        assert index.entries["xpath:/div/p[1]"] == {1}
        assert index.entries["xpath:/div/p[2]"] == {2}

    @given(labeled_trees(max_nodes=15))
    def test_index_matches_direct_scan(self, tree):
        from treematch.tokens import tokenize_node

        index = build_token_index(tree)
        for token, nodes in index.entries.items():
            assert nodes == {
                n.id for n in tree if token in tokenize_node(tree, n.id)
            }
        for node in tree:
            for token in tokenize_node(tree, node.id):
                assert node.id in index.entries[token]


class TestThreshold:
    def test_cutoff_formula(self):
        assert threshold_cutoff(10000, 0.5) == 100
        assert threshold_cutoff(100, 0.5) == 10
        assert threshold_cutoff(100, 1.0) == 100

    def test_drop_over_cutoff(self):
        index = TokenIndex(
            entries={"big": set(range(101)), "ok": set(range(100))}, t1_size=10000
        )
        kept = apply_threshold(index, 0.5)
        # cutoff is 100: |big| = 101 > 100 dropped, |ok| = 100 kept untouched
        assert set(kept.entries) == {"ok"}
        assert kept.entries["ok"] == index.entries["ok"]

    def test_alpha_one_keeps_everything(self):
        index = TokenIndex(entries={"t": set(range(50))}, t1_size=50)
        assert apply_threshold(index, 1.0).entries == index.entries

    def test_boundary_sizes(self):
        index = TokenIndex(
            entries={"a": set(range(5)), "b": set(range(10)), "c": set(range(11))},
            t1_size=100,
        )
        kept = apply_threshold(index, 0.5)
        assert set(kept.entries) == {"a", "b"}


class TestIdf:
    def test_formula(self):
        index = TokenIndex(entries={"t": set(range(10))}, t1_size=100)
        assert idf(index, "t") == pytest.approx(math.log(10.0), rel=1e-12)

    def test_ubiquitous_token_is_zero(self):
        index = TokenIndex(entries={"t": set(range(64))}, t1_size=64)
        assert idf(index, "t") == 0.0

    def test_singleton_tree(self):
        index = TokenIndex(entries={"t": {0}}, t1_size=1)
        assert idf(index, "t") == 0.0

    def test_missing_token(self):
        index = TokenIndex(entries={}, t1_size=3)
        with pytest.raises(MissingToken):
            idf(index, "nope")

    @given(labeled_trees(max_nodes=20))
    def test_monotone_in_rarity(self, tree):
        index = build_token_index(tree)
        tokens = sorted(index.entries)
        for a in tokens:
            for b in tokens:
                if len(index.entries[a]) < len(index.entries[b]):
                    assert idf(index, a) > idf(index, b)


class TestNeighborScores:
    def test_disjoint_vocabulary(self):
        t1 = tree_of(DraftNode(tag="div"))
        t2 = tree_of(DraftNode(tag="table"))
        index = build_token_index(t1)
        assert neighbor_scores(t2, 0, index) == {}

    def test_sum_of_shared_idf(self):
        t1 = tree_of(
            DraftNode(tag="div", children=[
                DraftNode(tag="p", attrs=[("class", "x")]),
                DraftNode(tag="p"),
            ])
        )
        t2 = tree_of(DraftNode(tag="p", attrs=[("class", "x")]))
        index = build_token_index(t1)
        scores = neighbor_scores(t2, 0, index)
        # node 1 shares tag:p and val:x and attr:class; node 2 shares tag:p
        expected_1 = idf(index, "tag:p") + idf(index, "attr:class") + idf(index, "val:x")
        assert scores[1] == pytest.approx(expected_1, rel=1e-12)
        assert scores[2] == pytest.approx(idf(index, "tag:p"), rel=1e-12)

    def test_contribution_log_records_multiplicity(self):
        t1 = tree_of(DraftNode(tag="div", children=[DraftNode(tag="p"), DraftNode(tag="p")]))
        t2 = tree_of(DraftNode(tag="p"))
        index = apply_threshold(build_token_index(t1), 1.0)
        log: dict[str, int] = {}
        neighbor_scores(t2, 0, index, contribution_log=log)
        assert log["tag:p"] == 2


class TestInitialSimilarity:
    def test_single_node_identical_trees_all_idf_zero(self):
        # every token of a 1-node tree has multiplicity N=1, so IDF = 0 and
        # no strictly positive score exists
        t = tree_of(DraftNode(tag="p"))
        assert initial_similarity(t, t, EXACT).scores == {}

    def test_identical_two_node_trees(self):
        t = tree_of(DraftNode(tag="div", children=[DraftNode(tag="p")]))
        table = initial_similarity(t, t, EXACT)
        # each node's tag and xpath tokens are singletons: ln(2) + ln(2)
        assert table.get(0, 0) == pytest.approx(2 * math.log(2), rel=1e-12)
        assert table.get(1, 1) == pytest.approx(2 * math.log(2), rel=1e-12)
        assert table.get(0, 1) == 0.0

    def test_disjoint_trees_empty(self):
        t1 = tree_of(DraftNode(tag="div"))
        t2 = tree_of(DraftNode(tag="table"))
        assert initial_similarity(t1, t2, EXACT).scores == {}

    @settings(max_examples=40, deadline=None)
    @given(tree_pairs(max_nodes=12))
    def test_matches_brute_force_alpha_one(self, pair):
        t1, t2 = pair
        table = initial_similarity(t1, t2, EXACT)
        oracle = brute_force_s0(t1, t2, 1.0)
        assert set(table.scores) == set(oracle)
        for key, value in oracle.items():
            assert table.scores[key] == pytest.approx(value, rel=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(tree_pairs(max_nodes=12))
    def test_matches_brute_force_default_alpha(self, pair):
        t1, t2 = pair
        params = SftmParams()
        table = initial_similarity(t1, t2, params)
        oracle = brute_force_s0(t1, t2, params.alpha)
        assert set(table.scores) == set(oracle)
        for key, value in oracle.items():
            assert table.scores[key] == pytest.approx(value, rel=1e-12)

    def test_threshold_soundness_instrumented(self):
        t = tree_of(
            DraftNode(tag="div", children=[DraftNode(tag="p") for _ in range(8)])
        )
        params = SftmParams(alpha=0.5)
        log: dict[str, int] = {}
        initial_similarity(t, t, params, contribution_log=log)
        cutoff = threshold_cutoff(len(t), params.alpha)
        assert log  # something contributed
        assert all(count <= cutoff for count in log.values())
        # tag:p sits in 8 nodes > cutoff 3 and must not have contributed
        assert "tag:p" not in log


class TestPropagate:
    def chain_pair(self):
        t1 = tree_of(DraftNode(tag="a", children=[DraftNode(tag="b")]))
        t2 = tree_of(DraftNode(tag="a", children=[DraftNode(tag="b")]))
        return t1, t2

    def test_depth_zero_is_identity(self):
        t1, t2 = self.chain_pair()
        s0 = SimilarityTable(scores={(0, 0): 2.0, (1, 1): 1.0})
        params = SftmParams(p=0, weights=(1.0,))
        assert propagate(s0, t1, t2, params).scores == s0.scores

    def test_roots_have_no_ancestors(self):
        t1 = tree_of(DraftNode(tag="a"))
        t2 = tree_of(DraftNode(tag="a"))
        s0 = SimilarityTable(scores={(0, 0): 2.0})
        params = SftmParams(p=2, weights=(1.0, 0.5, 0.25))
        assert propagate(s0, t1, t2, params).scores == {(0, 0): 2.0}

    def test_chain_sum(self):
        t1, t2 = self.chain_pair()
        s0 = SimilarityTable(scores={(0, 0): 1.0, (1, 1): 1.0})
        params = SftmParams(p=1, weights=(1.0, 0.5))
        result = propagate(s0, t1, t2, params)
        assert result.scores[(1, 1)] == pytest.approx(1.5)
        assert result.scores[(0, 0)] == pytest.approx(1.0)

    def test_zero_s0_pairs_stay_excluded(self):
        t1, t2 = self.chain_pair()
        # children similar, parents similar, but no (child, parent) entry may appear
        s0 = SimilarityTable(scores={(0, 0): 3.0})
        params = SftmParams(p=1, weights=(1.0, 0.5))
        result = propagate(s0, t1, t2, params)
        assert set(result.scores) == {(0, 0)}

    def test_missing_ancestor_entry_contributes_zero(self):
        t1, t2 = self.chain_pair()
        s0 = SimilarityTable(scores={(1, 1): 2.0})
        params = SftmParams(p=2, weights=(1.0, 0.5, 0.25))
        assert propagate(s0, t1, t2, params).scores[(1, 1)] == pytest.approx(2.0)

    @settings(max_examples=30, deadline=None)
    @given(tree_pairs(max_nodes=10))
    def test_lower_bound_w0_s0(self, pair):
        t1, t2 = pair
        params = SftmParams()
        s0 = initial_similarity(t1, t2, params)
        sp = propagate(s0, t1, t2, params)
        assert set(sp.scores) == set(s0.scores)
        for key, base in s0.scores.items():
            assert sp.scores[key] >= params.weights[0] * base - 1e-12
            assert math.isfinite(sp.scores[key])

    def test_propagation_locality(self):
        # a pair's propagated score depends only on score entries along its
        # ancestor chain within depth p: perturbing pairs confined to a
        # different branch leaves it untouched
        def page():
            left = DraftNode(tag="ul", children=[DraftNode(tag="li")])
            right = DraftNode(tag="div", children=[DraftNode(tag="p")])
            return freeze(DraftNode(tag="body", children=[left, right]))

        t1 = page()
        t2 = page()
        ul, li, div, p_ = 1, 2, 3, 4
        base = {(0, 0): 1.0, (ul, ul): 1.0, (li, li): 1.0, (div, div): 1.0, (p_, p_): 1.0}
        perturbed = dict(base)
        perturbed[(div, div)] = 9.0
        perturbed[(p_, p_)] = 9.0
        params = SftmParams(p=1, weights=(1.0, 0.5))
        sp_a = propagate(SimilarityTable(scores=base), t1, t2, params)
        sp_b = propagate(SimilarityTable(scores=perturbed), t1, t2, params)
        # the ul/li branch chains (depth 1) avoid the div branch entirely
        assert sp_a.scores[(ul, ul)] == sp_b.scores[(ul, ul)]
        assert sp_a.scores[(li, li)] == sp_b.scores[(li, li)]
        # while the perturbed branch did move
        assert sp_a.scores[(p_, p_)] != sp_b.scores[(p_, p_)]
