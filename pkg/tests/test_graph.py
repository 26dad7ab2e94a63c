"""Neighbor selection, affinity construction, and normalization."""

import numpy as np
import pytest

from pmlp.core import AffinityMatrix, DataError, FeatureMatrix, NumericalError, PmlpConfig
from pmlp.graph import (
    build_affinity,
    knn_edges,
    knn_select,
    normalize_symmetric,
)
from pmlp.synthlab import gen_gaussian_blobs

CLASSICAL = PmlpConfig(mode="classical_lpa")


class TestKnnSelect:
    def test_nearest_two_on_a_line(self):
        fm = FeatureMatrix([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [9.0, 9.0]])
        neighbors = knn_select(fm, 0, 2)
        assert neighbors.indices.tolist() == [1, 2]
        np.testing.assert_allclose(neighbors.distances, [1.0, 2.0])

    def test_all_other_rows(self):
        fm = FeatureMatrix([[0.0], [3.0], [1.0], [7.0]])
        neighbors = knn_select(fm, 0, 3)
        assert sorted(neighbors.indices.tolist()) == [1, 2, 3]
        assert neighbors.indices.tolist() == [2, 1, 3]  # ascending distance

    def test_center_never_included(self):
        fm = FeatureMatrix([[0.0], [0.0], [1.0]])  # row 1 coincides with center
        neighbors = knn_select(fm, 0, 2)
        assert 0 not in neighbors.indices.tolist()
        assert neighbors.indices.tolist() == [1, 2]

    def test_tie_breaks_toward_lower_index(self):
        fm = FeatureMatrix([[0.0, 0.0], [0.0, 2.0], [2.0, 0.0], [-2.0, 0.0]])
        neighbors = knn_select(fm, 0, 3)
        assert neighbors.indices.tolist() == [1, 2, 3]

    def test_count_must_leave_room(self):
        fm = FeatureMatrix([[0.0], [1.0]])
        with pytest.raises(DataError):
            knn_select(fm, 0, 2)

    def test_edges_match_per_center_selection(self):
        rng = np.random.default_rng(3)
        fm = FeatureMatrix(rng.normal(size=(12, 3)))
        edges = knn_edges(fm, 4)
        for center in range(12):
            expected = knn_select(fm, center, 4).indices.tolist()
            got = edges[edges[:, 0] == center][:, 1].tolist()
            assert got == expected


class TestBuildAffinity:
    def test_three_collinear_points(self):
        spacing = 2.0
        fm = FeatureMatrix([[0.0], [spacing], [2 * spacing]])
        W = build_affinity(fm, [0, 1, 2], CLASSICAL)
        np.testing.assert_allclose(W.data[0, 1], 1.0 / spacing)
        np.testing.assert_allclose(W.data[1, 2], 1.0 / spacing)
        np.testing.assert_allclose(W.data[0, 2], 1.0 / (2 * spacing))

    def test_diagonal_zero_entries_nonnegative(self):
        rng = np.random.default_rng(0)
        fm = FeatureMatrix(rng.normal(size=(10, 2)))
        cfg = PmlpConfig(kde_support_n=5, bandwidth_h=1.0)
        W = build_affinity(fm, np.arange(10), cfg)
        assert np.all(np.diagonal(W.data) == 0.0)
        assert W.data.min() >= 0.0

    def test_huge_bandwidth_matches_classical(self):
        dataset = gen_gaussian_blobs(
            [[0.0, 0.0], [5.0, 0.0]], 1.0, per_class=15, labeled_per_class=1, seed=8
        )
        nodes = np.arange(30)
        pm = build_affinity(
            dataset.features,
            nodes,
            PmlpConfig(bandwidth_h=1e12, kde_support_n=10),
        )
        classical = build_affinity(dataset.features, nodes, CLASSICAL)
        scale = np.max(np.abs(classical.data))
        assert np.max(np.abs(pm.data - classical.data)) / scale < 1e-6

    def test_duplicate_nodes_rejected(self):
        fm = FeatureMatrix([[0.0], [1.0], [2.0]])
        with pytest.raises(DataError):
            build_affinity(fm, [0, 1, 1], CLASSICAL)

    def test_single_direction_edge_gets_half_weight(self):
        fm = FeatureMatrix([[0.0], [1.0], [3.0]])
        both = build_affinity(fm, [0, 1, 2], CLASSICAL, edges=[(0, 1), (1, 0)])
        single = build_affinity(fm, [0, 1, 2], CLASSICAL, edges=[(0, 1)])
        assert single.data[0, 1] == both.data[0, 1] / 2
        assert single.data[1, 0] == single.data[0, 1]
        assert both.data[0, 2] == 0.0

    def test_output_is_exactly_symmetric(self):
        rng = np.random.default_rng(4)
        fm = FeatureMatrix(rng.normal(size=(15, 2)))
        edges = knn_edges(fm, 3)
        W = build_affinity(fm, np.arange(15), PmlpConfig(kde_support_n=5), edges=edges)
        assert np.array_equal(W.data, W.data.T)

    def test_cosine_mode_clamps_negative_similarity(self):
        fm = FeatureMatrix([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]])
        W = build_affinity(
            fm, [0, 1, 2], PmlpConfig(mode="classical_lpa", distance_mode="cosine_similarity")
        )
        assert W.data[0, 1] == 0.0  # opposite vectors
        assert W.data[0, 2] == 0.0  # orthogonal

    def test_coincident_points_hit_distance_floor(self):
        fm = FeatureMatrix([[1.0, 1.0], [1.0, 1.0]])
        W = build_affinity(fm, [0, 1], CLASSICAL)
        assert W.data[0, 1] == 1e12  # 1 / EPS_DISTANCE


class TestNormalizeSymmetric:
    def test_unit_degrees_unchanged(self):
        S = normalize_symmetric(AffinityMatrix([[0.0, 1.0], [1.0, 0.0]]))
        np.testing.assert_array_equal(S, [[0.0, 1.0], [1.0, 0.0]])

    def test_uniform_scaling_cancels(self):
        S = normalize_symmetric(AffinityMatrix([[0.0, 2.0], [2.0, 0.0]]))
        np.testing.assert_allclose(S, [[0.0, 1.0], [1.0, 0.0]], atol=1e-15)

    def test_star_graph_by_hand(self):
        W = AffinityMatrix([[0.0, 1.0, 1.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
        S = normalize_symmetric(W)
        root2 = 1.0 / np.sqrt(2.0)
        np.testing.assert_allclose(S[0, 1], root2, atol=1e-15)
        np.testing.assert_allclose(S[0, 2], root2, atol=1e-15)
        assert S[1, 2] == 0.0

    def test_scale_invariance(self):
        rng = np.random.default_rng(7)
        M = rng.random((8, 8))
        M = (M + M.T) / 2
        np.fill_diagonal(M, 0.0)
        base = normalize_symmetric(AffinityMatrix(M))
        for c in (1e-3, 1.0, 1e3):
            scaled = normalize_symmetric(AffinityMatrix(c * M))
            assert np.max(np.abs(scaled - base)) < 1e-12

    def test_eigenvalues_in_unit_interval(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            n = rng.integers(3, 16)
            M = rng.random((n, n))
            M = (M + M.T) / 2
            np.fill_diagonal(M, 0.0)
            S = normalize_symmetric(AffinityMatrix(M))
            eigenvalues = np.linalg.eigvalsh(S)
            assert eigenvalues.min() >= -1.0 - 1e-12
            assert eigenvalues.max() <= 1.0 + 1e-12

    def test_output_exactly_symmetric(self):
        rng = np.random.default_rng(10)
        M = rng.random((9, 9))
        M = (M + M.T) / 2
        np.fill_diagonal(M, 0.0)
        S = normalize_symmetric(AffinityMatrix(M))
        assert np.array_equal(S, S.T)

    def test_isolated_node_error_names_row(self):
        W = AffinityMatrix(
            [[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]
        )
        with pytest.raises(NumericalError, match="row 2"):
            normalize_symmetric(W)
