import math

import numpy as np
import pytest

from conecapture.perturbed_domain import (NodalDomainSpec, arc_pole,
                                          eigen_residual_check,
                                          g2_eigenfunction, h_function,
                                          radial_mode_u, stereo, stereo_inv,
                                          t2_boundary_beta,
                                          verify_containment)

SECTOR = 2.0 * math.pi / 3.0

# frozen from the extended-precision series oracle / direct evaluation
U3_AT_ONE = 2.58661776729109732288176653797
G2_AT_ONE_THIRDPI = 0.6621805101423973
H_AT_ONE_THIRDPI = 0.8578624844449837


class TestRadialMode:
    def test_value_one_at_origin(self):
        assert radial_mode_u(1, 5.102, 0.0) == 1.0

    def test_degenerate_double_cone_mode_is_constant(self):
        # at mu = 3.75 the l=1 upper parameter vanishes: u1 == 1
        for r in (0.3, 1.1, 2.4):
            assert radial_mode_u(1, 3.75, r) == pytest.approx(1.0, abs=1e-14)

    def test_frozen_l3_value(self):
        assert radial_mode_u(3, 5.102, 1.0) == pytest.approx(U3_AT_ONE,
                                                             abs=1e-12)

    def test_vector_matches_scalar(self):
        r = np.linspace(0.1, 2.5, 7)
        vec = radial_mode_u(3, 5.102, r)
        scal = [radial_mode_u(3, 5.102, float(x)) for x in r]
        assert np.allclose(vec, scal, atol=1e-13, rtol=1e-12)

    def test_invalid_inputs(self):
        with pytest.raises(ValueError):
            radial_mode_u(0, 5.102, 1.0)
        with pytest.raises(ValueError):
            radial_mode_u(1, 5.102, math.pi)


class TestEigenfunction:
    def test_vanishes_on_sector_sides(self):
        spec = NodalDomainSpec()
        assert g2_eigenfunction(spec, 1.0, 0.0) == 0.0
        assert abs(g2_eigenfunction(spec, 1.0, SECTOR)) < 1e-15

    def test_vanishes_at_origin(self):
        spec = NodalDomainSpec()
        assert g2_eigenfunction(spec, 0.0, 1.0) == 0.0

    def test_frozen_interior_value_positive(self):
        spec = NodalDomainSpec()
        val = g2_eigenfunction(spec, 1.0, math.pi / 3.0)
        assert val == pytest.approx(G2_AT_ONE_THIRDPI, abs=1e-12)
        assert val > 0.0

    def test_factorization_identity(self):
        spec = NodalDomainSpec()
        rng = np.random.default_rng(1)
        r = rng.uniform(0.1, 2.85, 300)
        th = rng.uniform(1e-3, SECTOR - 1e-3, 300)
        mask = np.abs(np.sin(1.5 * th)) >= 1e-6
        phi = g2_eigenfunction(spec, r, th)
        fact = np.sin(r) ** 1.5 * np.sin(1.5 * th) * h_function(spec, r, th)
        assert np.max(np.abs((phi - fact)[mask])) < 1e-12


class TestHFunction:
    def test_value_one_at_origin(self):
        spec = NodalDomainSpec()
        assert h_function(spec, 0.0, 0.7) == pytest.approx(1.0, abs=1e-15)

    def test_axis_ratio_three(self):
        spec = NodalDomainSpec()
        r = 1.3
        u1 = radial_mode_u(1, spec.mu, r)
        u3 = radial_mode_u(3, spec.mu, r)
        expect = u1 - 3.0 * spec.c * math.sin(r) ** 3 * u3
        assert h_function(spec, r, 0.0) == pytest.approx(expect, abs=1e-14)

    def test_symmetry_axis_ratio_minus_one(self):
        spec = NodalDomainSpec()
        val = h_function(spec, 1.0, math.pi / 3.0)
        assert val == pytest.approx(H_AT_ONE_THIRDPI, abs=1e-12)
        u1 = radial_mode_u(1, spec.mu, 1.0)
        u3 = radial_mode_u(3, spec.mu, 1.0)
        assert val == pytest.approx(
            u1 + spec.c * math.sin(1.0) ** 3 * u3, abs=1e-13)

    def test_reflection_symmetry(self):
        spec = NodalDomainSpec()
        rng = np.random.default_rng(5)
        r = rng.uniform(0.05, 2.85, 300)
        th = rng.uniform(1e-3, SECTOR - 1e-3, 300)
        left = h_function(spec, r, th)
        right = h_function(spec, r, SECTOR - th)
        assert np.max(np.abs(left - right)) < 1e-12


class TestBoundaryArc:
    def test_symmetry_axis_value(self):
        assert t2_boundary_beta(math.pi / 3.0) == pytest.approx(
            (math.sqrt(2.0) + math.sqrt(6.0)) / 2.0, abs=1e-15)

    def test_endpoint_value(self):
        expect = (math.sqrt(2.0) * 0.5 + math.sqrt(4.5)) / 2.0
        assert t2_boundary_beta(0.0) == pytest.approx(expect, abs=1e-15)

    def test_endpoints_equal_by_symmetry(self):
        assert t2_boundary_beta(0.0) == pytest.approx(
            t2_boundary_beta(SECTOR), abs=1e-14)

    def test_circle_equation(self):
        # the arc satisfies rho^2 - sqrt2 cos(theta - pi/3) rho - 1 = 0,
        # i.e. the circle centred at (sqrt2/4, sqrt6/4) of radius sqrt(3/2)
        th = np.linspace(0.0, SECTOR, 101)
        b = t2_boundary_beta(th)
        x = b * np.cos(th)
        y = b * np.sin(th)
        resid = (x - math.sqrt(2.0) / 4.0) ** 2 \
            + (y - math.sqrt(6.0) / 4.0) ** 2 - 1.5
        assert np.max(np.abs(resid)) < 1e-12

    def test_is_stereographic_image_of_a_great_circle(self):
        # every pulled-back arc point is spherical distance pi/2 from the
        # common pole, i.e. p . v = 0
        v = arc_pole()
        th = np.linspace(0.0, SECTOR, 400)
        r = stereo_inv(t2_boundary_beta(th))
        p = np.stack([np.sin(r) * np.cos(th), np.sin(r) * np.sin(th),
                      np.cos(r)])
        assert np.max(np.abs(v @ p)) < 1e-10


class TestStereo:
    def test_known_values(self):
        assert stereo(0.0) == 0.0
        assert stereo(math.pi / 2.0) == pytest.approx(1.0, abs=1e-15)

    def test_round_trip(self):
        rng = np.random.default_rng(0)
        r = rng.uniform(0.0, math.pi - 1e-6, 100)
        assert np.max(np.abs(stereo_inv(stereo(r)) - r)) < 1e-14

    def test_pole_rejected(self):
        with pytest.raises(ValueError):
            stereo(math.pi)


class TestContainment:
    def test_reference_spec_passes(self):
        cert = verify_containment(NodalDomainSpec(), safety=2.0)
        assert cert.passed
        assert all(h > 0.0 for _, h in cert.checkpoints)
        assert len(cert.checkpoints) == 5
        assert all(b > 0.0 for _, _, b in cert.intervals)
        assert cert.intervals[0][0] == 0.0
        assert cert.intervals[-1][1] == pytest.approx(math.pi / 3.0)
        # intervals chain without gaps
        for (_, hi, _), (lo, _, _) in zip(cert.intervals, cert.intervals[1:]):
            assert hi == pytest.approx(lo)

    def test_unperturbed_profile_vanishes_on_arc(self):
        # with c = 0 the profile is the bare l=1 radial factor, whose nodal
        # circle crosses the boundary arc near theta = 0.70: the march must
        # stall there rather than certify
        cert = verify_containment(NodalDomainSpec(c=0.0), safety=2.0)
        assert not cert.passed
        assert cert.failure is not None
        stall = float(cert.failure.split("theta = ")[1].split(" ")[0])
        assert 0.6 < stall < 0.8

    def test_large_coefficient_fails(self):
        cert = verify_containment(NodalDomainSpec(c=0.1), safety=2.0)
        assert not cert.passed
        assert cert.failure is not None

    def test_safety_below_one_rejected(self):
        with pytest.raises(ValueError):
            verify_containment(NodalDomainSpec(), safety=0.5)

    def test_mu_below_critical_rejected(self):
        with pytest.raises(ValueError):
            NodalDomainSpec(mu=5.0)

    def test_certificate_is_labelled_floating_point(self):
        cert = verify_containment(NodalDomainSpec(), safety=2.0)
        assert "not interval arithmetic" in cert.note


class TestEigenResidual:
    def test_second_order_decay(self):
        spec = NodalDomainSpec()
        r2 = eigen_residual_check(spec, samples=64, h=2e-3, seed=0)
        r1 = eigen_residual_check(spec, samples=64, h=1e-3, seed=0)
        assert 3.5 <= r2 / r1 <= 4.5

    def test_residual_small_relative_to_scale(self):
        spec = NodalDomainSpec()
        res = eigen_residual_check(spec, samples=64, h=1e-3, seed=0)
        assert res < 1e-2

    def test_detects_wrong_eigenvalue(self):
        spec = NodalDomainSpec()
        good = eigen_residual_check(spec, samples=64, h=1e-3, seed=0)
        bad = eigen_residual_check(spec, samples=64, h=1e-3, mu_test=5.2,
                                   seed=0)
        assert bad > 10.0 * good
        # and the mismatch does not shrink with h
        bad_half = eigen_residual_check(spec, samples=64, h=5e-4,
                                        mu_test=5.2, seed=0)
        assert bad_half > 0.5 * bad

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            eigen_residual_check(NodalDomainSpec(), samples=0, h=1e-3)
        with pytest.raises(ValueError):
            eigen_residual_check(NodalDomainSpec(), samples=4, h=0.1)
