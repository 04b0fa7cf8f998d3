"""Unit tests for null-coordinate maps, the Schwarzian and weighted maps."""

from math import cos, exp, log, pi, sin

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cylinder import ChartError
from cylinder.conformal import (
    CircleDiffeo,
    ClosedFormMap,
    FramedMorphism,
    Jet3,
    TorusTrigPoly,
    WeightPair,
    anomaly_independence,
    boost,
    compose,
    conformal_coupling_dimension,
    diag_limit_extrapolated,
    dilation,
    hadamard_diag_limit,
    log_conformal_factor,
    parametrix_pullback_diag,
    primary_check_dphi,
    pullback,
    richardson_limit,
    schwarzian,
    stress_anomaly,
    torus_integral,
    weighted_pullback,
    weighted_pushforward,
)
from cylinder.functionals import TestFnCircle


@pytest.mark.numeric
class TestJet3:
    """Forward-mode jets to third order."""

    def test_chain(self):
        x = 0.3
        j = Jet3.variable(x).exp().sin()
        assert j.value == pytest.approx(sin(exp(x)))
        assert j.d1 == pytest.approx(cos(exp(x)) * exp(x))

    def test_third_derivative_of_cube(self):
        x = Jet3.variable(1.5)
        j = x * x * x
        assert (j.value, j.d1, j.d2, j.d3) == pytest.approx((3.375, 6.75, 9.0, 6.0))

    def test_reciprocal(self):
        j = (1.0 / Jet3.variable(2.0))
        assert (j.value, j.d1, j.d2, j.d3) == pytest.approx((0.5, -0.25, 0.25, -0.375))

    def test_log_exp_inverse(self):
        j = Jet3.variable(0.7).exp().log()
        assert (j.value, j.d1, j.d2, j.d3) == pytest.approx((0.7, 1.0, 0.0, 0.0), abs=1e-12)


@pytest.mark.numeric
class TestClosedFormMap:
    """identity, exp, affine and Möbius maps."""

    def test_validation(self):
        with pytest.raises(ChartError):
            ClosedFormMap.affine(-1.0)
        with pytest.raises(ChartError):
            ClosedFormMap.mobius(1.0, 0.0, 0.0, -1.0)
        with pytest.raises(ChartError):
            ClosedFormMap("shear")

    def test_mobius_inverse(self):
        m = ClosedFormMap.mobius(2.0, 1.0, 1.0, 3.0)
        u = np.linspace(-1.0, 1.0, 7)
        assert m.inverse(m(u)) == pytest.approx(u)

    def test_exp_difference(self):
        e = ClosedFormMap.exponential()
        assert e.difference(1.0, 1.0 + 1e-9) == pytest.approx(exp(1.0) * 1e-9, rel=1e-7)

    def test_periodic(self):
        assert ClosedFormMap.identity().periodic
        assert not ClosedFormMap.exponential().periodic
        assert ClosedFormMap.affine(1.0, 0.5).periodic


@pytest.mark.numeric
class TestCircleDiffeo:
    """Fourier-parametrized diffeomorphisms of the circle."""

    def test_rejects_fold(self):
        with pytest.raises(ChartError):
            CircleDiffeo([(1, 0.0, 1.5)])

    def test_rejects_bad_terms(self):
        with pytest.raises(ChartError):
            CircleDiffeo([(-1, 0.1, 0.0)])
        with pytest.raises(ChartError):
            CircleDiffeo([(0, 0.1, 0.2)])

    def test_equivariant(self, sine_diffeo):
        u = np.linspace(0.0, 2 * pi, 9)
        assert sine_diffeo(u + 2 * pi) == pytest.approx(sine_diffeo(u) + 2 * pi)

    def test_inverse(self, random_diffeos):
        w = np.linspace(0.0, 2 * pi, 33)
        for mu in random_diffeos:
            assert mu(mu.inverse(w)) == pytest.approx(w, abs=1e-12)

    def test_difference(self, sine_diffeo):
        assert sine_diffeo.difference(0.2, 1.4) == pytest.approx(sine_diffeo(1.4) - sine_diffeo(0.2))

    def test_json(self, random_diffeos):
        for mu in random_diffeos:
            assert CircleDiffeo.from_json(mu.to_json()) == mu

    def test_random_amplitude(self, rng):
        with pytest.raises(ChartError):
            CircleDiffeo.random(rng, amplitude=1.0)

    def test_rotation(self):
        assert CircleDiffeo.rotation(0.5)(1.0) == pytest.approx(1.5)


@pytest.mark.numeric
class TestSchwarzian:
    """S(μ) = μ'''/μ' - (3/2)(μ''/μ')²."""

    def test_closed_forms(self):
        assert schwarzian(ClosedFormMap.identity(), 0.4) == 0.0
        assert schwarzian(ClosedFormMap.exponential(), 0.4) == pytest.approx(-0.5)
        assert schwarzian(ClosedFormMap.mobius(2.0, 1.0, 1.0, 3.0), 0.4) == pytest.approx(0.0, abs=1e-12)

    def test_rotation_is_flat(self):
        assert schwarzian(CircleDiffeo.rotation(0.3), 1.2) == pytest.approx(0.0)

    @settings(max_examples=20, deadline=None)
    @given(st.floats(min_value=0.0, max_value=2 * pi))
    def test_cocycle(self, u):
        mu = CircleDiffeo([(2, 0.05, 0.1)])
        nu = CircleDiffeo([(1, 0.2, 0.0), (3, 0.0, 0.05)])
        lhs = schwarzian(compose(mu, nu), u)
        rhs = schwarzian(mu, nu(u)) * nu.derivative(u) ** 2 + schwarzian(nu, u)
        assert lhs == pytest.approx(rhs, abs=1e-9)


@pytest.mark.numeric
class TestDiagonalLimit:
    """Point-split limit of the pulled-back chiral kernel."""

    def test_identity_exact(self):
        assert hadamard_diag_limit(ClosedFormMap.identity(), 0.3, 0.01) == 0.0

    def test_exp(self):
        """S(exp)/6 = -1/12."""
        assert diag_limit_extrapolated(ClosedFormMap.exponential(), 0.3) == pytest.approx(-1.0 / 12.0, abs=1e-9)

    def test_matches_schwarzian(self, sine_diffeo):
        u = np.linspace(0.0, 2 * pi, 12, endpoint=False)
        assert diag_limit_extrapolated(sine_diffeo, u) == pytest.approx(schwarzian(sine_diffeo, u) / 6.0, abs=1e-8)

    def test_zero_split(self):
        with pytest.raises(ChartError):
            hadamard_diag_limit(ClosedFormMap.identity(), 0.0, 0.0)

    def test_richardson(self):
        assert richardson_limit(lambda h: 2.0 + 3.0 * h * h, 0.1) == pytest.approx(2.0)


@pytest.mark.numeric
class TestStressAnomaly:
    """Transformation defect of the smeared stress tensor."""

    def test_identity(self):
        f = TestFnCircle.constant()
        lhs, rhs = stress_anomaly(CircleDiffeo.identity(), f, 1.0)
        assert lhs == pytest.approx(0.0, abs=1e-12)
        assert rhs == pytest.approx(0.0, abs=1e-12)

    def test_sine(self, sine_diffeo, random_test_fn):
        lhs, rhs = stress_anomaly(sine_diffeo, random_test_fn, 1.0)
        assert lhs == pytest.approx(rhs, abs=1e-6)

    def test_scales_with_hbar(self, sine_diffeo, random_test_fn):
        lhs1, _ = stress_anomaly(sine_diffeo, random_test_fn, 1.0)
        lhs2, _ = stress_anomaly(sine_diffeo, random_test_fn, 2.0)
        assert lhs2 == pytest.approx(2.0 * lhs1)

    def test_independent_of_hadamard_choice(self, random_diffeos, random_test_fn):
        for mu in random_diffeos:
            vacuum, shifted = anomaly_independence(mu, random_test_fn, 1.0)
            assert vacuum == pytest.approx(shifted, abs=1e-6)


@pytest.mark.numeric
class TestParametrixPullback:
    """Log-kernel shift under constant rescalings."""

    def test_affine(self):
        mu, nu = ClosedFormMap.affine(2.0), ClosedFormMap.affine(3.0)
        log_omega = log_conformal_factor(mu, nu, 0.1, 0.2)
        assert log_omega == pytest.approx(0.5 * log(6.0))
        value = parametrix_pullback_diag(mu, nu, 0.1, 0.2, 1e-3)
        assert value == pytest.approx(-log_omega / (2 * pi))

    def test_zero_split(self):
        with pytest.raises(ChartError):
            parametrix_pullback_diag(ClosedFormMap.identity(), ClosedFormMap.identity(), 0.0, 0.0, 0.0)


@pytest.mark.numeric
class TestWeights:
    """Conformal weights and framed morphisms."""

    def test_dimension_spin(self):
        w = WeightPair.from_dimension_spin(2.0, 0.0)
        assert (w.h, w.h_tilde) == (1.0, 1.0)
        assert WeightPair(1.0, 0.0).spin == 1.0
        assert WeightPair(0.5, 0.25).scaling_dimension == 0.75

    def test_admissible(self):
        assert boost(2.0).is_admissible()
        assert dilation(0.5).is_admissible()
        assert not boost(-1.0).is_admissible()

    def test_dilation_weight(self):
        w = WeightPair(0.75, 0.5)
        assert dilation(2.0).weight_factor(w, 0.1, 0.2) == pytest.approx(2.0 ** 1.25)

    def test_boost_weight(self):
        """Only the spin sees a boost."""
        w = WeightPair(0.75, 0.5)
        assert boost(2.0).weight_factor(w, 0.1, 0.2) == pytest.approx(2.0 ** -w.spin)

    def test_frame_with_map(self, sine_diffeo):
        chi = FramedMorphism(sine_diffeo, CircleDiffeo.identity(), scale_left=2.0)
        assert chi.omega_left(0.0) == pytest.approx(2.0 * 1.1)

    def test_coupling_dimension(self):
        assert conformal_coupling_dimension(2) == 0.0
        assert conformal_coupling_dimension(4) == 1.0


@pytest.mark.numeric
class TestWeightedMaps:
    """Weighted pullback and pushforward on the torus."""

    def test_zero_weight_is_pullback(self, sine_diffeo):
        phi = lambda u, v: np.sin(u) * np.cos(2 * v)
        maps = (sine_diffeo, CircleDiffeo.rotation(0.2))
        u, v = np.linspace(0, 6, 5), np.linspace(1, 3, 5)
        assert weighted_pullback(phi, maps, 0.0)(u, v) == pytest.approx(pullback(phi, maps)(u, v))

    def test_pull_after_push(self, sine_diffeo):
        f = lambda u, v: np.cos(u) + np.sin(v)
        maps = (sine_diffeo, CircleDiffeo([(2, 0.0, 0.1)]))
        restored = weighted_pullback(weighted_pushforward(f, maps, 0.7), maps, 0.7)
        u, v = np.linspace(0, 6, 7), np.linspace(0, 6, 7)
        assert restored(u, v) == pytest.approx(f(u, v), abs=1e-12)

    def test_torus_integral(self):
        assert torus_integral(lambda u, v: np.ones_like(u)) == pytest.approx(4 * pi ** 2)

    def test_torus_trig_poly_real(self, rng):
        phi = TorusTrigPoly.random_real(3, rng)
        values = phi(np.linspace(0, 6, 10), np.linspace(1, 2, 10))
        assert np.max(np.abs(values.imag)) < 1e-12

    def test_torus_shape(self):
        with pytest.raises(ValueError):
            TorusTrigPoly(np.zeros((2, 3)))


@pytest.mark.numeric
class TestPrimaryField:
    """∂φ transforms with weight (1, 0)."""

    def test_identity(self, rng):
        phi = TorusTrigPoly.random_real(2, rng)
        f = lambda u, v: np.cos(u) * np.sin(v)
        upper, lower = primary_check_dphi(CircleDiffeo.identity(), CircleDiffeo.identity(), f, phi, grid=32)
        assert upper == pytest.approx(lower, abs=1e-10)

    def test_sine(self, rng, sine_diffeo):
        phi = TorusTrigPoly.random_real(2, rng)
        f = lambda u, v: np.exp(np.cos(u)) * np.sin(v)
        upper, lower = primary_check_dphi(sine_diffeo, CircleDiffeo.rotation(0.3), f, phi)
        assert upper == pytest.approx(lower, abs=1e-8)

    def test_needs_periodic(self, rng):
        phi = TorusTrigPoly.random_real(1, rng)
        with pytest.raises(ChartError):
            primary_check_dphi(ClosedFormMap.exponential(), CircleDiffeo.identity(), lambda u, v: u, phi)
