"""Sampling models and Laplacian construction."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sandlap.gflinalg import rank_and_corank
from sandlap.graphs import (
    BipartiteDigraph,
    Digraph,
    ModelParams,
    laplacian,
    laplacian_mod_p,
    restrict,
    sample_bipartite_digraph,
    sample_er_digraph,
)


def params(n=10, alpha=1.0, q=0.5, p=2, seed=0):
    return ModelParams(n=n, alpha=alpha, q=q, p=p, seed=seed)


class TestModelParams:
    def test_m_uses_floor(self):
        assert params(n=10, alpha=0.35).m == 3
        assert params(n=8, alpha=1.0).m == 8

    def test_rejects_bad_ranges(self):
        with pytest.raises(ValueError):
            params(q=0.0)
        with pytest.raises(ValueError):
            params(q=1.0)
        with pytest.raises(ValueError):
            params(alpha=1.5)
        with pytest.raises(ValueError):
            params(p=6)
        with pytest.raises(ValueError):
            params(seed=1 << 64)

    def test_rejects_empty_second_part(self):
        with pytest.raises(ValueError, match="second part"):
            params(n=5, alpha=0.1)

    def test_alpha_below_one_over_p_is_allowed(self):
        # sweeps cross the 1/p threshold on purpose
        assert params(n=100, alpha=0.2, p=3).m == 20

    def test_json_round_trip(self):
        src = params(n=12, alpha=0.5, q=0.3, p=7, seed=99)
        assert ModelParams.from_json_dict(src.to_json_dict()) == src


class TestSampling:
    def test_vanishing_q_gives_empty_graph(self):
        g = sample_bipartite_digraph(
            params(n=10, q=1e-12), np.random.default_rng(0)
        )
        assert g.edge_count == 0

    def test_saturating_q_gives_complete_graph(self):
        g = sample_bipartite_digraph(
            params(n=10, alpha=0.5, q=1 - 1e-12), np.random.default_rng(0)
        )
        assert g.edge_count == 2 * 10 * 5

    def test_edge_count_concentrates(self):
        # 2 * n * m Bernoulli(1/2) draws: mean 1e6, sigma = 707.1
        g = sample_bipartite_digraph(
            params(n=1000, alpha=1.0, q=0.5), np.random.default_rng(7)
        )
        assert abs(g.edge_count - 1_000_000) < 4 * 707.1

    def test_er_edge_count_concentrates(self):
        # n(n-1) Bernoulli(0.3) draws: mean 2970, sigma = 45.6
        g = sample_er_digraph(100, 0.3, np.random.default_rng(7))
        assert abs(g.edge_count - 2970) < 4 * 45.6

    def test_er_extremes(self):
        assert sample_er_digraph(8, 1e-12, np.random.default_rng(0)).edge_count == 0
        full = sample_er_digraph(8, 1 - 1e-12, np.random.default_rng(0))
        assert full.edge_count == 8 * 7

    def test_same_seed_same_graph(self):
        pr = params(n=40, alpha=0.7, q=0.3, seed=5)
        a = sample_bipartite_digraph(pr, np.random.default_rng(5))
        b = sample_bipartite_digraph(pr, np.random.default_rng(5))
        assert a == b

    def test_er_has_no_self_loops(self):
        g = sample_er_digraph(50, 0.9, np.random.default_rng(3))
        assert not np.diagonal(g.adj).any()


class TestGraphTypes:
    def test_rejects_shape_mismatch(self):
        with pytest.raises(ValueError):
            BipartiteDigraph(2, 2, [[1, 0]], [[0, 0], [0, 0]])

    def test_rejects_non_indicator_entries(self):
        with pytest.raises(ValueError):
            Digraph(2, [[0, 2], [0, 0]])

    def test_rejects_self_loops(self):
        with pytest.raises(ValueError, match="diagonal"):
            Digraph(2, [[1, 0], [0, 0]])

    def test_json_round_trips(self):
        g = sample_bipartite_digraph(params(n=6, alpha=0.5), np.random.default_rng(1))
        assert BipartiteDigraph.from_json_dict(g.to_json_dict()) == g
        d = sample_er_digraph(6, 0.4, np.random.default_rng(1))
        assert Digraph.from_json_dict(d.to_json_dict()) == d


class TestLaplacian:
    def test_empty_graph_gives_zero_matrix(self):
        g = Digraph(3, [[0] * 3] * 3)
        assert laplacian(g).tolists() == [[0] * 3] * 3

    def test_single_edge(self):
        g = Digraph(2, [[0, 1], [0, 0]])
        assert laplacian(g).tolists() == [[-1, 1], [0, 0]]
        assert laplacian_mod_p(g, 2).tolists() == [[1, 1], [0, 0]]

    def test_complete_digraph(self):
        g = Digraph(3, [[0, 1, 1], [1, 0, 1], [1, 1, 0]])
        lap = laplacian(g).tolists()
        assert all(lap[i][i] == -2 for i in range(3))
        assert all(lap[i][j] == 1 for i in range(3) for j in range(3) if i != j)
        mod2 = laplacian_mod_p(g, 2)
        assert all(mod2.data[i, i] == 0 for i in range(3))

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3, 5]))
    def test_mod_p_kills_all_ones_vector(self, seed, p):
        g = sample_bipartite_digraph(
            params(n=9, alpha=0.6, q=0.4, p=p, seed=seed), np.random.default_rng(seed)
        )
        lm = laplacian_mod_p(g, p)
        ones = np.ones(lm.cols, dtype=np.int64)
        assert not ((lm.data @ ones) % p).any()

    def test_row_sums_vanish_across_many_samples(self):
        rng = np.random.default_rng(11)
        for trial in range(1000):
            n = int(rng.integers(2, 9))
            alpha = float(rng.uniform(0.2, 1.0))
            if int(alpha * n) < 1:
                alpha = 1.0
            g = sample_bipartite_digraph(
                params(n=n, alpha=alpha, q=float(rng.uniform(0.05, 0.95))), rng
            )
            lap = np.array(laplacian(g).tolists(), dtype=np.int64)
            assert not lap.sum(axis=1).any()

    def test_off_diagonal_matches_indicators(self):
        g = sample_bipartite_digraph(params(n=7, alpha=0.6, q=0.5), np.random.default_rng(2))
        lap = np.array(laplacian(g).tolists(), dtype=np.int64)
        n, m = g.n, g.m
        assert np.array_equal(lap[:n, n:], g.edges_12)
        assert np.array_equal(lap[n:, :n], g.edges_21)

    def test_bipartite_block_structure(self):
        g = sample_bipartite_digraph(params(n=8, alpha=0.75, q=0.5), np.random.default_rng(4))
        lap = np.array(laplacian(g).tolists(), dtype=np.int64)
        n = g.n
        top_left = lap[:n, :n]
        off = top_left - np.diag(np.diagonal(top_left))
        assert not off.any()


class TestRestrict:
    def test_full_index_sets_identity(self):
        g = sample_er_digraph(6, 0.5, np.random.default_rng(9))
        lm = laplacian_mod_p(g, 3)
        assert restrict(lm, range(6), range(6)) == lm

    def test_bipartite_top_right_block_is_edges_12(self):
        g = sample_bipartite_digraph(params(n=6, alpha=0.5, q=0.5), np.random.default_rng(8))
        lm = laplacian_mod_p(g, 2)
        block = restrict(lm, range(g.n), range(g.n, g.n + g.m))
        assert np.array_equal(block.data, g.edges_12.astype(np.int64))

    def test_empty_row_set(self):
        g = sample_er_digraph(4, 0.5, np.random.default_rng(0))
        sub = restrict(laplacian_mod_p(g, 2), [], range(4))
        assert (sub.rows, sub.cols) == (0, 4)
        assert rank_and_corank(sub) == (0, 4)

    def test_rejects_unsorted_or_out_of_range(self):
        g = sample_er_digraph(4, 0.5, np.random.default_rng(0))
        lm = laplacian_mod_p(g, 2)
        with pytest.raises(ValueError, match="strictly increasing"):
            restrict(lm, [2, 1], [0])
        with pytest.raises(ValueError, match="out of range"):
            restrict(lm, [0], [7])
