import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from netwf import WeightedNetwork
from netwf.similarity import (
    ProfileSimilarity,
    directed_edge_similarity,
    pearson,
    profile_correlations,
    psn_threshold,
    source_profile_similarity,
    target_profile_similarity,
    undirected_edge_similarity,
    undirected_profile_similarity,
)

from conftest import random_directed, random_undirected


def corr_two_pass(x, y):
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


def loop_psn(W, exclude_pair):
    v = W.shape[0]
    S = np.eye(v)
    for i in range(v):
        for j in range(v):
            if i == j:
                continue
            cols = [c for c in range(v) if not (exclude_pair and c in (i, j))]
            S[i, j] = corr_two_pass(list(W[i, cols]), list(W[j, cols]))
    return S


class TestPearson:
    def test_perfect(self):
        assert pearson([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0, abs=1e-15)

    def test_anti(self):
        assert pearson([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0, abs=1e-15)

    def test_two_pass_oracle(self):
        expected = corr_two_pass([1, 2, 3], [1, 2, 4])
        assert expected == pytest.approx(0.98198, abs=1e-5)
        assert pearson([1, 2, 3], [1, 2, 4]) == pytest.approx(expected, abs=1e-15)

    def test_constant_is_zero(self):
        assert pearson([2, 2, 2], [1, 5, 3]) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            pearson([1, 2], [1, 2, 3])
        with pytest.raises(ValueError):
            pearson([1], [1])

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 10**6), c=st.floats(0.01, 100.0))
    def test_scale_invariance(self, seed, c):
        rng = np.random.default_rng(seed)
        x, y = rng.normal(size=(2, 7))
        assert pearson(c * x, y) == pytest.approx(pearson(x, y), abs=1e-12)


class TestPSN:
    def test_identical_rows(self):
        W = np.array([[0, 1, 2, 5.0], [0, 1, 2, 5.0], [3, 1, 0, 2.0], [1, 4, 2, 0.0]])
        net = WeightedNetwork(tuple("abcd"), W, directed=True)
        assert source_profile_similarity(net)["a", "b"] == pytest.approx(1.0)

    def test_proportional_profiles_excluding_pair(self):
        # rows 0 and 1 read (0, 1, 2) and (0, 2, 4) on columns 2..4
        W = np.array(
            [
                [0, 9, 0, 1, 2],
                [-7, 0, 0, 2, 4],
                [1, 3, 0, 1, 5],
                [2, 1, 4, 0, 3],
                [5, 2, 1, 1, 0],
            ],
            dtype=float,
        )
        net = WeightedNetwork(tuple(range(5)), W, directed=True)
        s = source_profile_similarity(net, exclude_pair=True)
        assert s.matrix[0, 1] == pytest.approx(1.0, abs=1e-14)

    @pytest.mark.parametrize("exclude_pair", [False, True])
    def test_source_matches_loop_oracle(self, exclude_pair):
        net = random_directed(6, 11)
        S = source_profile_similarity(net, exclude_pair).matrix
        assert np.max(np.abs(S - loop_psn(np.asarray(net.weights), exclude_pair))) <= 1e-12

    @pytest.mark.parametrize("exclude_pair", [False, True])
    def test_target_matches_loop_oracle(self, exclude_pair):
        net = random_directed(6, 12)
        S = target_profile_similarity(net, exclude_pair).matrix
        assert np.max(np.abs(S - loop_psn(np.asarray(net.weights).T, exclude_pair))) <= 1e-12

    def test_identical_columns(self):
        W = np.array([[0, 1, 1, 3.0], [2, 0, 0, 1.0], [5, 3, 3, 0.0], [1, 2, 2, 4.0]])
        net = WeightedNetwork(tuple("abcd"), W, directed=True)
        assert target_profile_similarity(net)["b", "c"] == pytest.approx(1.0)

    def test_target_is_source_of_transpose(self):
        net = random_directed(7, 3)
        netT = WeightedNetwork(net.node_ids, np.asarray(net.weights).T, directed=True)
        np.testing.assert_array_equal(target_profile_similarity(net).matrix, source_profile_similarity(netT).matrix)

    def test_undirected_structural_twins(self):
        # nodes a and b attach identically to c, d, e
        W = np.zeros((5, 5))
        for x, y, w in [(0, 2, 1.0), (0, 3, 2.0), (0, 4, 0.5), (1, 2, 1.0), (1, 3, 2.0), (1, 4, 0.5), (2, 3, 1.5)]:
            W[x, y] = W[y, x] = w
        net = WeightedNetwork(tuple("abcde"), W, directed=False)
        assert undirected_profile_similarity(net)["a", "b"] == pytest.approx(1.0)

    def test_undirected_anti_proportional(self):
        # profiles of a and b on the other nodes are (1, 2) and (-1, -2), plus the shared zero
        W = np.zeros((4, 4))
        W[0, 2], W[0, 3], W[1, 2], W[1, 3] = 1.0, 2.0, -1.0, -2.0
        W = W + W.T
        net = WeightedNetwork(tuple("abcd"), W, directed=False)
        assert undirected_profile_similarity(net)["a", "b"] == pytest.approx(-1.0)
        assert undirected_profile_similarity(net, exclude_pair=True)["a", "b"] == pytest.approx(-1.0)

    def test_direction_checks(self):
        with pytest.raises(ValueError):
            source_profile_similarity(random_undirected(5, 0))
        with pytest.raises(ValueError):
            undirected_profile_similarity(random_directed(5, 0))

    def test_missing_entries_rejected(self):
        W = np.asarray(random_undirected(5, 0).weights).copy()
        W[0, 1] = W[1, 0] = np.nan
        with pytest.raises(ValueError, match="impute"):
            undirected_profile_similarity(WeightedNetwork(None, W, directed=False))

    def test_degenerate_node(self):
        W = np.asarray(random_undirected(6, 1).weights).copy()
        W[0, :] = W[:, 0] = 0.0
        S = undirected_profile_similarity(WeightedNetwork(None, W, directed=False)).matrix
        assert S[0, 0] == 1.0
        np.testing.assert_array_equal(S[0, 1:], 0.0)

    @pytest.mark.parametrize("exclude_pair", [False, True])
    def test_symmetric_bounded_unit_diagonal(self, exclude_pair):
        S = undirected_profile_similarity(random_undirected(9, 4), exclude_pair).matrix
        np.testing.assert_array_equal(S, S.T)
        assert np.all(np.abs(S) <= 1.0)
        np.testing.assert_array_equal(np.diag(S), 1.0)

    def test_full_profile_psn_is_psd(self):
        S = undirected_profile_similarity(random_undirected(12, 5)).matrix
        assert np.linalg.eigvalsh(S).min() > -1e-12

    def test_label_permutation(self):
        net = random_undirected(7, 6)
        perm = np.random.default_rng(0).permutation(7)
        S = undirected_profile_similarity(net)
        Sp = undirected_profile_similarity(net.permuted(perm))
        np.testing.assert_allclose(Sp.matrix, S.matrix[np.ix_(perm, perm)], atol=1e-14)
        assert Sp["n1", "n4"] == pytest.approx(S["n1", "n4"], abs=1e-14)

    def test_positive_scaling(self):
        net = random_directed(6, 7)
        scaled = WeightedNetwork(net.node_ids, 3.5 * np.asarray(net.weights), directed=True)
        np.testing.assert_allclose(
            source_profile_similarity(scaled).matrix, source_profile_similarity(net).matrix, atol=1e-13
        )

    def test_profile_correlations_too_small_for_exclusion(self):
        with pytest.raises(ValueError):
            profile_correlations(np.ones((3, 3)), exclude_pair=True)


def psn(M, kind="undirected"):
    return ProfileSimilarity(np.asarray(M, dtype=float), kind, tuple("ABCDE"[: len(M)]))


class TestEdgeSimilarity:
    def test_directed_self(self):
        net = random_directed(5, 1)
        s, t = source_profile_similarity(net), target_profile_similarity(net)
        assert directed_edge_similarity(s, t, ("n0", "n1"), ("n0", "n1")) == pytest.approx(1.0)

    def test_directed_product(self):
        S = np.eye(4)
        S[0, 2] = S[2, 0] = 0.5
        T = np.eye(4)
        T[1, 3] = T[3, 1] = 0.8
        val = directed_edge_similarity(psn(S, "source"), psn(T, "target"), ("A", "B"), ("C", "D"))
        assert val == pytest.approx(0.4)

    def test_directed_matches_kronecker(self):
        from test_linalg import kron_explicit

        net = random_directed(5, 2)
        s, t = source_profile_similarity(net), target_profile_similarity(net)
        K = kron_explicit(s.matrix, t.matrix)
        ids = net.node_ids
        for a, b, c, d in [(0, 1, 2, 3), (4, 4, 1, 0), (3, 2, 3, 2)]:
            val = directed_edge_similarity(s, t, (ids[a], ids[b]), (ids[c], ids[d]))
            assert val == pytest.approx(K[a * 5 + b, c * 5 + d], abs=1e-15)

    def test_undirected_self(self):
        S = np.eye(3)
        S[0, 1] = S[1, 0] = 0.3
        assert undirected_edge_similarity(psn(S), ("A", "B"), ("A", "B")) == pytest.approx(0.5 * (1 + 0.09))

    def test_undirected_one_matching(self):
        S = np.eye(4)
        assert undirected_edge_similarity(psn(S), ("A", "B"), ("A", "B")) == pytest.approx(0.5)
        S2 = np.eye(4)
        S2[0, 2] = S2[2, 0] = 1.0
        S2[1, 3] = S2[3, 1] = 1.0
        assert undirected_edge_similarity(psn(S2), ("A", "B"), ("C", "D")) == pytest.approx(0.5)

    def test_undirected_matches_symmetrized_kronecker(self):
        from test_linalg import kron_explicit

        net = random_undirected(5, 3)
        s = undirected_profile_similarity(net)
        K = kron_explicit(s.matrix, s.matrix)
        ids = net.node_ids
        for a, b, c, d in [(0, 1, 2, 3), (4, 2, 1, 0), (1, 1, 3, 4)]:
            oracle = 0.5 * (K[a * 5 + b, c * 5 + d] + K[a * 5 + b, d * 5 + c])
            assert undirected_edge_similarity(s, (ids[a], ids[b]), (ids[c], ids[d])) == pytest.approx(oracle, abs=1e-15)

    def test_undirected_eight_symmetries(self):
        s = undirected_profile_similarity(random_undirected(6, 8))
        a, b, c, d = "n0", "n3", "n5", "n2"
        base = undirected_edge_similarity(s, (a, b), (c, d))
        for e1, e2 in itertools.product([(a, b), (b, a)], [(c, d), (d, c)]):
            assert undirected_edge_similarity(s, e1, e2) == pytest.approx(base, abs=1e-15)
            assert undirected_edge_similarity(s, e2, e1) == pytest.approx(base, abs=1e-15)

    def test_unknown_label(self):
        with pytest.raises(ValueError):
            undirected_edge_similarity(psn(np.eye(3)), ("A", "Z"), ("A", "B"))

    def test_wrong_kind(self):
        with pytest.raises(ValueError):
            undirected_edge_similarity(psn(np.eye(3), "source"), ("A", "B"), ("A", "B"))


class TestThreshold:
    def test_cutoff_one_empty(self):
        s = undirected_profile_similarity(random_undirected(6, 0))
        assert psn_threshold(s, 1.0) == []

    def test_cutoff_minus_one_everything(self):
        s = undirected_profile_similarity(random_undirected(6, 0))
        assert len(psn_threshold(s, -1.0)) == 15

    def test_strict(self):
        M = np.eye(3)
        M[0, 1] = M[1, 0] = 0.2
        M[1, 2] = M[2, 1] = 0.21
        assert psn_threshold(psn(M), 0.2) == [("B", "C")]


def test_profile_similarity_validation():
    with pytest.raises(ValueError):
        ProfileSimilarity(np.array([[1.0, 0.5], [0.4, 1.0]]), "undirected", ("a", "b"))
    with pytest.raises(ValueError):
        ProfileSimilarity(np.array([[1.0, 1.5], [1.5, 1.0]]), "undirected", ("a", "b"))
    with pytest.raises(ValueError):
        ProfileSimilarity(np.eye(2), "sideways", ("a", "b"))
