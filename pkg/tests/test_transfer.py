import inspect

import numpy as np
import pytest

from hartogs import domains, transfer
from hartogs.cli import builtin_example
from hartogs.config import NumericConfig
from hartogs.domains import HartogsDomainSpec, MapFamily
from hartogs.transfer import (JacobianBounds, jacobian_bounds,
                              jacobian_det_to_standard,
                              numerical_jacobian_det, pullback_isometry_check,
                              transfer_norm_bound)


class TestBlockJacobians:
    def test_identity(self):
        spec = HartogsDomainSpec.standard(3, 2)
        assert jacobian_det_to_standard(spec, [0.1, 0.2, 0.5]) == 1.0

    def test_affine_product(self):
        spec = builtin_example("affine4")
        det = jacobian_det_to_standard(spec, [0.5, 0.0, 0.0, 0.5])
        assert det == pytest.approx(2.0)

    def test_rational_varies_with_point(self):
        spec = builtin_example("rational3")
        z = np.array([0.01, -1 / 3 + 0.05, 0.5], dtype=complex)
        det = jacobian_det_to_standard(spec, z)
        assert det == pytest.approx(3.0 / (z[1] - 10.0))

    def test_against_numerical_jacobian(self):
        fam = MapFamily.rational_example()
        z = np.array([0.02, -0.3 + 0.04j], dtype=complex)
        exact = complex(fam.jacobian_det(z))
        approx = numerical_jacobian_det(fam.value, z)
        assert abs(exact - approx) < 1e-8

    def test_full_map_numerical_jacobian(self):
        spec = builtin_example("affine4")
        z = np.array([0.5, 0.05, 0.05, 0.6], dtype=complex)
        approx = numerical_jacobian_det(lambda v: domains.to_standard_model(spec, v), z)
        assert abs(approx - 2.0) < 1e-8


class TestJacobianBounds:
    def test_identity_bounds(self):
        spec = HartogsDomainSpec.standard(2, 1)
        got = jacobian_bounds(spec)
        assert (got.c, got.d, got.method) == (1.0, 1.0, "exact")

    def test_affine_exact(self):
        got = jacobian_bounds(builtin_example("affine4"))
        assert (got.c, got.d, got.method) == (2.0, 2.0, "exact")

    def test_affine_jacobian_is_constant_on_samples(self):
        # sampling route must reproduce the exact bounds for constant maps
        spec = builtin_example("affine4")
        rng = np.random.default_rng(1)
        pts = rng.normal(size=(500, 8)).view(complex) * 0.1
        dets = np.abs(jacobian_det_to_standard(spec, pts))
        assert dets.min() == pytest.approx(dets.max())
        assert dets.min() == pytest.approx(2.0)

    def test_rational_sampled_within_exact_interval(self):
        # |3/(z2 - 10)| lies in [3/11, 3/9] whenever |z2| < 1
        got = jacobian_bounds(builtin_example("rational3"), NumericConfig(seed=3))
        assert got.method == "sampled"
        assert 3 / 11 <= got.c <= got.d <= 3 / 9

    def test_invalid_bounds_rejected(self):
        with pytest.raises(ValueError):
            JacobianBounds(0.0, 1.0, "exact")
        with pytest.raises(ValueError):
            JacobianBounds(2.0, 1.0, "exact")


class TestTransferFactor:
    def test_p2_cancellation(self):
        bounds = JacobianBounds(0.37, 5.1, "sampled")
        assert transfer_norm_bound(3.3, bounds, 2.0) == pytest.approx(3.3)

    def test_example_value(self):
        assert transfer_norm_bound(1.0, JacobianBounds(1.0, 2.0, "exact"), 4.0) == pytest.approx(4.0)

    def test_constant_jacobian_cancels_for_all_p(self):
        bounds = JacobianBounds(1.7, 1.7, "exact")
        for p in (1.0, 1.5, 2.0, 3.7, 6.0):
            assert transfer_norm_bound(2.0, bounds, p) == pytest.approx(2.0)

    def test_conjugate_exponent_symmetry_only_for_equal_bounds(self):
        wide = JacobianBounds(1.0, 2.0, "exact")
        tight = JacobianBounds(1.5, 1.5, "exact")
        for p in (1.2, 1.5, 3.0, 4.0):
            q = p / (p - 1.0)
            assert transfer_norm_bound(1.0, tight, p) == pytest.approx(
                transfer_norm_bound(1.0, tight, q))
            if abs(p - 2.0) > 1e-9:
                assert transfer_norm_bound(1.0, wide, p) != pytest.approx(
                    transfer_norm_bound(1.0, wide, q))

    def test_validation(self):
        with pytest.raises(ValueError):
            transfer_norm_bound(0.0, JacobianBounds(1.0, 2.0, "exact"), 2.0)
        with pytest.raises(ValueError):
            transfer_norm_bound(1.0, JacobianBounds(1.0, 2.0, "exact"), 0.5)


CFG = NumericConfig(seed=14, mc_samples=300_000)


class TestPullbackIsometry:
    def test_identity_map_exact_equality(self):
        spec = HartogsDomainSpec.standard(2, 1)

        def f(pts):
            return pts[..., 1]

        report = pullback_isometry_check(spec, f, CFG)
        assert report.source_value == report.target_value
        assert report.source_stderr == report.target_stderr
        assert report.sigma_distance == 0.0

    def test_affine_constant_function(self):
        spec = builtin_example("affine4")

        def f(pts):
            return np.ones(pts.shape[:-1], dtype=complex)

        report = pullback_isometry_check(spec, f, CFG)
        assert report.sigma_distance < 3.0
        # target integral is the domain volume
        vol = domains.standard_volume(4, 3)
        assert abs(report.target_value - vol) < 3 * report.target_stderr

    def test_affine_chain_monomial(self):
        spec = builtin_example("affine4")

        def f(pts):
            return pts[..., 3]

        report = pullback_isometry_check(spec, f, CFG)
        assert report.sigma_distance < 3.0

    def test_json_report(self):
        spec = HartogsDomainSpec.standard(2, 1)
        report = pullback_isometry_check(spec, lambda pts: pts[..., 0],
                                         CFG.with_(mc_samples=20_000))
        data = report.to_json_dict()
        assert set(data) == {"source", "target", "sigma_distance"}


class TestStructuralRangeIndependence:
    def test_range_signature_depends_on_n_only(self):
        from hartogs.schur import admissible_p_range
        params = list(inspect.signature(admissible_p_range).parameters)
        assert params == ["n"]
