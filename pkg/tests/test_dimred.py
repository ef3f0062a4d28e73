import math

import numpy as np
import pytest

from mviefact import dimred, hull, mvie, synth
from mviefact.errors import BadDims, DimMismatch, RankDeficientData


class TestAffineFit:
    def test_points_on_a_line(self, rng):
        direction = np.array([1.0, 2.0, -1.0])
        direction /= np.linalg.norm(direction)
        offset = np.array([0.5, -0.3, 0.2])
        t = rng.standard_normal(30)
        x = offset[:, None] + direction[:, None] * t
        chart = dimred.affine_fit(x, 2)
        assert chart.Phi.shape == (3, 1)
        assert abs(abs(chart.Phi[:, 0] @ direction) - 1.0) <= 1e-12
        assert dimred.fit_residual(chart, x) <= 1e-12

    def test_noiseless_instance_residual(self):
        gt = synth.make_instance(30, 3, 200, 0.9, math.inf, seed=8)
        chart = dimred.affine_fit(gt.X, 3)
        scale = np.linalg.norm(gt.X - gt.X.mean(axis=1)[:, None],
                               axis=0).max()
        assert dimred.fit_residual(chart, gt.X) <= 1e-8 * scale

    def test_identical_columns_rank_deficient(self):
        x = np.tile(np.arange(4.0)[:, None], (1, 10))
        with pytest.raises(RankDeficientData):
            dimred.affine_fit(x, 3)

    def test_semi_orthonormal(self):
        gt = synth.make_instance(25, 4, 120, 0.8, math.inf, seed=2)
        chart = dimred.affine_fit(gt.X, 4)
        assert np.linalg.norm(chart.Phi.T @ chart.Phi - np.eye(3)) <= 1e-10

    def test_noisy_data_warns(self):
        gt = synth.make_instance(25, 3, 200, 0.9, 20.0, seed=4)
        with pytest.warns(UserWarning, match="residual"):
            dimred.affine_fit(gt.X, 3)

    def test_preconditions(self, rng):
        with pytest.raises(BadDims):
            dimred.affine_fit(rng.random((5, 2)), 3)


class TestTransforms:
    def test_centered_origin(self, rng):
        b = rng.standard_normal(6)
        x = np.tile(b[:, None], (1, 8)) + 0.0
        # give it rank via two extra spread columns, then reduce b copies
        chart = dimred.AffineChart(
            Phi=np.linalg.qr(rng.standard_normal((6, 2)))[0], b=b)
        red = dimred.reduce_points(np.tile(b[:, None], (1, 5)), chart)
        assert np.abs(red).max() <= 1e-12

    def test_chart_inverse(self, rng):
        phi = np.linalg.qr(rng.standard_normal((7, 3)))[0]
        b = rng.standard_normal(7)
        chart = dimred.AffineChart(Phi=phi, b=b)
        u = rng.standard_normal((3, 12))
        x = phi @ u + b[:, None]
        assert np.allclose(dimred.reduce_points(x, chart), u, atol=1e-12)

    def test_lift_basis_vectors(self, rng):
        phi = np.linalg.qr(rng.standard_normal((5, 2)))[0]
        b = rng.standard_normal(5)
        chart = dimred.AffineChart(Phi=phi, b=b)
        assert np.allclose(dimred.lift_point(np.zeros(2), chart), b)
        assert np.allclose(dimred.lift_point(np.array([1.0, 0.0]), chart),
                           b + phi[:, 0])

    def test_round_trip_on_instance(self):
        gt = synth.make_instance(40, 4, 300, 0.85, math.inf, seed=3)
        chart = dimred.affine_fit(gt.X, 4)
        back = dimred.lift_points(dimred.reduce_points(gt.X, chart), chart)
        scale = np.linalg.norm(gt.X, axis=0).max()
        assert np.linalg.norm(back - gt.X, axis=0).max() <= 1e-8 * scale

    def test_dim_mismatch(self, rng):
        chart = dimred.AffineChart(
            Phi=np.linalg.qr(rng.standard_normal((5, 2)))[0],
            b=np.zeros(5))
        with pytest.raises(DimMismatch):
            dimred.lift_point(np.zeros(3), chart)
        with pytest.raises(DimMismatch):
            dimred.reduce_points(np.zeros((4, 2)), chart)


class TestVolumeAndContainment:
    def test_volume_equivalence_on_solver_output(self):
        # lifted ellipsoid satisfies det(F^T F) = det(F')^2 because the
        # chart is semi-orthonormal
        gt = synth.make_instance(20, 3, 150, 0.9, math.inf, seed=6)
        chart = dimred.affine_fit(gt.X, 3)
        red = dimred.reduce_points(gt.X, chart)
        poly = hull.enumerate_facets(red.T)
        ell, _ = mvie.solve_mvie(poly)
        f_lift = chart.Phi @ ell.F
        lhs = np.linalg.det(f_lift.T @ f_lift)
        rhs = np.linalg.det(ell.F) ** 2
        assert abs(lhs - rhs) <= 1e-8 * abs(rhs)

    def test_containment_preservation(self, rng):
        # support values of an ellipsoid against reduced facets equal the
        # support values of the lifted ellipsoid against lifted facets
        gt = synth.make_instance(15, 3, 120, 0.9, math.inf, seed=9)
        chart = dimred.affine_fit(gt.X, 3)
        red = dimred.reduce_points(gt.X, chart)
        poly = hull.enumerate_facets(red.T)
        for _ in range(10):
            m = rng.standard_normal((2, 2)) * 0.05
            f = m @ m.T + 0.01 * np.eye(2)
            c = red.mean(axis=1)
            reduced_support = (np.linalg.norm(f @ poly.normals.T, axis=0)
                               + poly.normals @ c)
            # lifted facets: normal Phi g, offset h + (Phi g) . b
            g_lift = (chart.Phi @ poly.normals.T).T
            h_lift = poly.offsets + g_lift @ chart.b
            f_lift = chart.Phi @ f
            c_lift = dimred.lift_point(c, chart)
            lifted_support = (np.linalg.norm(f_lift.T @ g_lift.T, axis=0)
                              + g_lift @ c_lift)
            assert np.allclose(reduced_support + poly.offsets * 0,
                               lifted_support - (h_lift - poly.offsets),
                               atol=1e-10)
            inside_reduced = np.all(reduced_support <= poly.offsets + 1e-12)
            inside_lifted = np.all(lifted_support <= h_lift + 1e-12)
            assert inside_reduced == inside_lifted
