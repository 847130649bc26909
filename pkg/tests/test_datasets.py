import math

import numpy as np
import pytest
from scipy.stats import chi2

from isumap.datasets import (
    HOLE_U_FRACTION,
    HOLE_V_FRACTION,
    SWISS_U_MAX,
    SWISS_U_MIN,
    SWISS_V_MAX,
    load_csv,
    nonuniform_hemisphere,
    rolled_plane,
    rolled_plane_curve,
    swiss_roll,
    swiss_roll_chart,
    torus,
    write_points_csv,
)
from isumap.errors import ConfigError, DataError


class TestSwissRoll:
    def test_shape_and_ranges(self):
        pc = swiss_roll(3000, hole=False, seed=0)
        assert pc.points.shape == (3000, 3)
        radius = np.hypot(pc.points[:, 0], pc.points[:, 2])
        assert radius.min() >= SWISS_U_MIN - 1e-9
        assert radius.max() <= SWISS_U_MAX + 1e-9
        assert pc.points[:, 1].min() >= 0 and pc.points[:, 1].max() <= SWISS_V_MAX

    def test_hole_rejection_invariant(self):
        u, v = swiss_roll_chart(4000, True, seed=1)
        uc = 0.5 * (SWISS_U_MIN + SWISS_U_MAX)
        vc = 0.5 * SWISS_V_MAX
        inside = (np.abs(u - uc) < 0.5 * HOLE_U_FRACTION * (SWISS_U_MAX - SWISS_U_MIN)) & (
            np.abs(v - vc) < 0.5 * HOLE_V_FRACTION * SWISS_V_MAX
        )
        assert not inside.any()
        assert u.shape == (4000,)

    def test_deterministic(self):
        a = swiss_roll(500, hole=True, seed=7)
        b = swiss_roll(500, hole=True, seed=7)
        assert np.array_equal(a.points, b.points)
        assert np.array_equal(a.labels, b.labels)


class TestRolledPlane:
    def test_valid_cloud(self):
        pc = rolled_plane(800, c=4, seed=0)
        assert pc.points.shape == (800, 3)
        assert pc.labels is not None

    def test_turning_angle_monotone_in_c(self):
        def total_turning(c):
            curve = rolled_plane_curve(c)
            tangents = np.diff(curve, axis=0)
            angles = np.unwrap(np.arctan2(tangents[:, 1], tangents[:, 0]))
            return np.abs(np.diff(angles)).sum()

        turns = [total_turning(c) for c in (4, 5, 6)]
        assert turns[0] < turns[1] < turns[2]

    def test_deterministic(self):
        assert np.array_equal(rolled_plane(100, 5, 3).points, rolled_plane(100, 5, 3).points)

    def test_winding_validation(self):
        with pytest.raises(ConfigError):
            rolled_plane(10, c=7)


class TestTorus:
    def test_implicit_equation(self):
        pc = torus(3000, R=2.0, r=0.6, seed=0)
        x, y, z = pc.points.T
        residual = (np.hypot(x, y) - 2.0) ** 2 + z**2 - 0.6**2
        assert np.abs(residual).max() <= 1e-12
        assert pc.points.shape == (3000, 3)

    def test_tube_angle_marginal_matches_density(self):
        n = 100_000
        pc = torus(n, R=3.0, r=1.0, seed=1)
        x, y, z = pc.points.T
        theta = np.arctan2(z / 1.0, np.hypot(x, y) - 3.0) % (2 * math.pi)
        bins = 24
        counts, edges = np.histogram(theta, bins=bins, range=(0, 2 * math.pi))
        centers = 0.5 * (edges[:-1] + edges[1:])
        width = 2 * math.pi / bins
        expected = n * (3.0 + 1.0 * np.cos(centers)) / (2 * math.pi * 3.0) * width
        statistic = ((counts - expected) ** 2 / expected).sum()
        assert statistic < chi2.ppf(0.999, bins - 1)

    def test_parameter_validation(self):
        with pytest.raises(ConfigError):
            torus(10, R=1.0, r=2.0)


class TestHemisphere:
    def test_on_unit_sphere_upper_half(self):
        pc = nonuniform_hemisphere(10_000, concentration=3.0, seed=0)
        norms = np.linalg.norm(pc.points, axis=1)
        assert np.abs(norms - 1.0).max() <= 1e-12
        assert pc.points[:, 2].min() >= 0.0
        assert pc.points.shape == (10_000, 3)

    def test_pole_concentration_exceeds_uniform(self):
        pc = nonuniform_hemisphere(20_000, concentration=3.0, seed=1)
        polar = np.arccos(np.clip(pc.points[:, 2], -1, 1))
        fraction = (polar < math.radians(30)).mean()
        uniform_fraction = 1.0 - math.cos(math.radians(30))
        assert fraction > uniform_fraction

    def test_deterministic(self):
        a = nonuniform_hemisphere(300, seed=5)
        b = nonuniform_hemisphere(300, seed=5)
        assert np.array_equal(a.points, b.points)


class TestCsv:
    def test_feature_file_with_labels(self, tmp_path):
        path = tmp_path / "points.csv"
        path.write_text("x1,x2,label\n0.5,1.5,0\n2.5,3.5,1\n4.5,5.5,1\n")
        pc = load_csv(path)
        assert pc.n_points == 3 and pc.dim == 2
        assert pc.labels.tolist() == [0, 1, 1]

    def test_precomputed_square_matrix(self, tmp_path):
        path = tmp_path / "dist.csv"
        rows = ["0,1,2,3", "1,0,1.5,2", "2,1.5,0,1", "3,2,1,0"]
        path.write_text("\n".join(rows) + "\n")
        pc = load_csv(path, precomputed=True)
        assert pc.metric == "precomputed"
        assert pc.precomputed.shape == (4, 4)

    def test_asymmetric_precomputed_names_indices(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0,1,2,3\n1,0,1.501,2\n2,1.5,0,1\n3,2,1,0\n")
        with pytest.raises(DataError, match=r"\(1,2\)|\(2,1\)"):
            load_csv(path, precomputed=True)

    def test_ragged_rows(self, tmp_path):
        path = tmp_path / "ragged.csv"
        path.write_text("1,2\n3\n")
        with pytest.raises(DataError, match="ragged"):
            load_csv(path)

    def test_non_numeric_cell_location(self, tmp_path):
        path = tmp_path / "cells.csv"
        path.write_text("1,2\n3,oops\n")
        with pytest.raises(DataError, match="row 1, column 1"):
            load_csv(path)

    def test_write_read_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        pc = swiss_roll(50, seed=2)
        path = tmp_path / "roll.csv"
        write_points_csv(pc, path)
        back = load_csv(path)
        assert np.array_equal(back.points, pc.points)
        assert np.array_equal(back.labels, pc.labels)
