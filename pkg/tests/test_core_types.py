import math

import numpy as np
import pytest

from isumap.core_types import (
    DenseMetric,
    Embedding,
    NeighborGraph,
    PointCloud,
    SparseMetric,
    dumps,
    loads,
    validate_point_cloud,
)


def _round_trip(obj):
    return loads(dumps(obj))


class TestSerialization:
    def test_point_cloud_round_trip_bit_exact(self):
        rng = np.random.default_rng(0)
        pc = PointCloud(points=rng.uniform(size=(7, 3)), labels=np.arange(7))
        back = _round_trip(pc)
        assert np.array_equal(back.points, pc.points)
        assert np.array_equal(back.labels, pc.labels)
        assert back.metric == "euclidean"

    def test_precomputed_round_trip(self):
        mat = np.array([[0.0, 1.5], [1.5, 0.0]])
        pc = PointCloud(points=np.zeros((2, 1)), metric="precomputed", precomputed=mat)
        back = _round_trip(pc)
        assert np.array_equal(back.precomputed, mat)

    def test_neighbor_graph_round_trip(self):
        rng = np.random.default_rng(1)
        g = NeighborGraph(
            k=2,
            neighbor_idx=[[1, 2], [0, 2], [0, 1]],
            raw_dist=rng.uniform(size=(3, 2)),
            local_dist=rng.uniform(size=(3, 2)),
            rho=rng.uniform(size=3),
            sigma=rng.uniform(0.5, 2.0, size=3),
        )
        back = _round_trip(g)
        for name in ("neighbor_idx", "raw_dist", "local_dist", "rho", "sigma"):
            assert np.array_equal(getattr(back, name), getattr(g, name))

    def test_sparse_metric_round_trip(self):
        sm = SparseMetric(4, {(0, 1): 0.1234567890123456, (2, 3): 0.0, (1, 3): 2.5})
        assert _round_trip(sm) == sm

    def test_dense_metric_round_trip_with_infinity(self):
        d = np.array([[0.0, 1.0, np.inf], [1.0, 0.0, np.inf], [np.inf, np.inf, 0.0]])
        back = _round_trip(DenseMetric(d))
        assert np.array_equal(back.dist, d)

    def test_embedding_round_trip(self):
        emb = Embedding(
            coords=np.random.default_rng(2).normal(size=(5, 2)),
            m=2,
            stress=0.25,
            method="classical_mds",
            eigenvalues=(3.0, -0.5),
        )
        back = _round_trip(emb)
        assert np.array_equal(back.coords, emb.coords)
        assert back.eigenvalues == emb.eigenvalues
        assert back.stress == emb.stress


class TestSparseMetric:
    def test_unordered_lookup_agrees(self):
        sm = SparseMetric(3, {(2, 1): 0.5})
        assert sm.get(1, 2) == sm.get(2, 1) == 0.5

    def test_absent_pair_is_infinite(self):
        sm = SparseMetric(3, {(0, 1): 1.0})
        assert sm.get(0, 2) == math.inf
        assert sm.get(1, 1) == 0.0

    def test_rejects_self_loops_and_bad_values(self):
        with pytest.raises(ValueError):
            SparseMetric(3, {(1, 1): 1.0})
        with pytest.raises(ValueError):
            SparseMetric(3, {(0, 1): -0.5})
        with pytest.raises(ValueError):
            SparseMetric(3, {(0, 1): math.inf})

    def test_zero_entries_are_stored(self):
        sm = SparseMetric(3, {(0, 1): 0.0})
        assert sm.get(0, 1) == 0.0  # stored zero, not absence

    def test_csr_is_symmetric(self):
        sm = SparseMetric(4, {(0, 1): 1.0, (1, 3): 2.0})
        indptr, indices, weights = sm.to_csr()
        assert indices.shape[0] == 4  # both directions
        assert indptr[-1] == 4


class TestValidation:
    def test_well_formed_euclidean_cloud(self):
        pc = PointCloud(points=[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        assert validate_point_cloud(pc) == []

    def test_asymmetric_precomputed_reported(self):
        mat = np.zeros((2, 2))
        mat[0, 1], mat[1, 0] = 1.0, 2.0
        pc = PointCloud(points=np.zeros((2, 1)), metric="precomputed", precomputed=mat)
        report = validate_point_cloud(pc)
        assert any("asymmetric" in v for v in report)

    def test_nonzero_diagonal_reported(self):
        mat = np.array([[0.5, 1.0], [1.0, 0.0]])
        pc = PointCloud(points=np.zeros((2, 1)), metric="precomputed", precomputed=mat)
        report = validate_point_cloud(pc)
        assert any("diagonal" in v for v in report)

    def test_label_length_mismatch_reported(self):
        pc = PointCloud(points=np.zeros((3, 2)), labels=[0, 1])
        assert any("labels" in v for v in validate_point_cloud(pc))


def test_arrays_are_immutable():
    pc = PointCloud(points=[[0.0, 1.0]])
    with pytest.raises(ValueError):
        pc.points[0, 0] = 5.0
