"""Unit tests for propagators and two-point kernels."""

import csv
from fractions import Fraction
from math import log, pi

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cylinder import AlgebraError, ChartError
from cylinder.kernels import (
    DIAG_LIMIT,
    NullPoint,
    ParametrixKernel,
    abel_zeta_estimate,
    abel_zeta_oracle,
    central_term_pairing,
    diag_difference,
    diag_difference_oracle,
    dump_kernel_csv,
    dW_tail_bound,
    eval_dW_cyl,
    eval_dW_cyl_closed,
    eval_E_adv,
    eval_E_cyl,
    eval_E_left,
    eval_E_mink,
    eval_E_ret,
    eval_E_right,
    image_stabilization_bound,
    images_partial_sum,
    kernel_grid,
    squared_coeff,
    squared_coeff_closed,
    w_cyl,
)

ORIGIN = NullPoint(0.0, 0.0)

# Generic coordinates: avoid multiples of 2π in the separations.
coords = st.floats(min_value=-20.0, max_value=20.0, allow_nan=False).filter(
    lambda x: abs(x / (2 * pi) - round(x / (2 * pi))) > 1e-6
)
points = st.builds(NullPoint, coords, coords)


@pytest.mark.exact
class TestMinkowskiPropagators:
    """Causal propagators in null coordinates."""

    def test_future_point(self):
        x = NullPoint(1.0, 1.0)
        assert eval_E_mink(x, ORIGIN) == -0.5
        assert eval_E_ret(x, ORIGIN) == -0.5
        assert eval_E_adv(x, ORIGIN) == 0.0

    def test_spacelike_point(self):
        """E vanishes for spacelike separation."""
        x = NullPoint(1.0, -1.0)
        assert eval_E_mink(x, ORIGIN) == 0.0
        assert eval_E_ret(x, ORIGIN) == 0.0

    def test_retarded_minus_advanced(self):
        for x in (NullPoint(2.0, 3.0), NullPoint(-1.0, -0.5), NullPoint(0.3, -4.0)):
            assert eval_E_ret(x, ORIGIN) - eval_E_adv(x, ORIGIN) == eval_E_mink(x, ORIGIN)

    def test_adjoint(self):
        x, y = NullPoint(0.4, 1.7), NullPoint(-0.2, 0.3)
        assert eval_E_adv(x, y) == eval_E_ret(y, x)

    def test_chiral_split(self):
        x, y = NullPoint(0.4, -1.7), NullPoint(-0.2, 0.3)
        assert eval_E_left(x, y) + eval_E_right(x, y) == eval_E_mink(x, y)


@pytest.mark.exact
class TestCylinderPropagator:
    """Image sum and its floor-function closed form."""

    def test_near_origin_matches_minkowski(self):
        x = NullPoint(0.5, 0.5)
        assert eval_E_cyl(x, ORIGIN) == eval_E_mink(x, ORIGIN) == -0.5

    def test_canonical_range(self):
        p = NullPoint(13.0, 2.0).canonical()
        assert 0.0 <= p.u < 2 * pi
        assert p.u + p.v == pytest.approx(15.0)

    @settings(max_examples=60, deadline=None)
    @given(points, points)
    def test_images_stabilize(self, x, y):
        n = image_stabilization_bound(x, y)
        assert images_partial_sum(x, y, n) == eval_E_cyl(x, y)
        assert images_partial_sum(x, y, n + 3) == eval_E_cyl(x, y)

    @settings(max_examples=60, deadline=None)
    @given(points, points)
    def test_antisymmetric(self, x, y):
        assert eval_E_cyl(x, y) == -eval_E_cyl(y, x)

    @settings(max_examples=60, deadline=None)
    @given(points, points, st.integers(min_value=-3, max_value=3))
    def test_deck_invariant(self, x, y, k):
        assert eval_E_cyl(x.translate(k), y) == eval_E_cyl(x, y)


@pytest.mark.numeric
class TestTwoPointDerivative:
    """Mode sum against the closed form."""

    @pytest.mark.parametrize("eps,n", [(0.5, 40), (0.1, 200), (0.05, 400), (0.2, 10)])
    def test_tail_bound(self, eps, n):
        gap = abs(eval_dW_cyl(0.3, 1.1, eps, n) - eval_dW_cyl_closed(0.3, 1.1, eps))
        assert gap <= dW_tail_bound(eps, n) * (1 + 1e-9) + 1e-15

    def test_eps_must_be_positive(self):
        with pytest.raises(ValueError):
            eval_dW_cyl(0.0, 0.0, 0.0, 10)

    def test_boundary_value(self):
        """Small ε approaches -1/(16π sin²(u/2))."""
        closed = eval_dW_cyl_closed(1.3, 0.0, 1e-9)
        assert closed.real == pytest.approx(w_cyl(1.3), rel=1e-7)


@pytest.mark.numeric
class TestDiagDifference:
    """Smooth remainder of the chiral kernel at coincidence."""

    def test_limit(self):
        assert diag_difference(0.0) == DIAG_LIMIT
        assert DIAG_LIMIT == pytest.approx(-1.0 / (48.0 * pi))

    @pytest.mark.parametrize("s", [2e-4, 1e-2, 0.3, 0.49, 0.51, 1.0, 3.0, 6.0])
    def test_against_oracle(self, s):
        assert diag_difference(s) == pytest.approx(float(diag_difference_oracle(s)), rel=1e-10, abs=1e-14)

    def test_even(self):
        assert diag_difference(-0.7) == diag_difference(0.7)

    def test_outside_chart(self):
        with pytest.raises(ChartError):
            diag_difference(2 * pi)


@pytest.mark.numeric
class TestAbelRoute:
    """Regulated mode sum approaches ζ(-1) = -1/12."""

    def test_oracle_limit(self):
        assert float(abel_zeta_oracle(1e-3)) == pytest.approx(-1.0 / 12.0, abs=1e-6)

    @pytest.mark.parametrize("eps", [0.1, 1e-2, 1e-3])
    def test_estimate_matches_oracle(self, eps):
        n = int(40 / eps)
        assert abel_zeta_estimate(eps, n) == pytest.approx(float(abel_zeta_oracle(eps)), abs=1e-4)


@pytest.mark.exact
class TestSquaredKernel:
    """Coefficients of the squared chiral kernel."""

    def test_closed_form(self):
        assert all(squared_coeff(k) == squared_coeff_closed(k) for k in range(0, 201))

    def test_negative(self):
        with pytest.raises(ValueError):
            squared_coeff(-1)

    @pytest.mark.parametrize("n,expected", [(1, 0), (2, Fraction(1, 2)), (3, 2), (4, 5)])
    def test_central_pairing(self, n, expected):
        """n(n²-1)/12."""
        assert central_term_pairing(n, -n, n) == expected

    def test_central_pairing_selects(self):
        assert central_term_pairing(-2, 2, 4) == 0
        assert central_term_pairing(2, -1, 4) == 0

    def test_central_pairing_truncation(self):
        with pytest.raises(AlgebraError):
            central_term_pairing(5, -5, 4)


@pytest.mark.numeric
class TestParametrix:
    """Hadamard parametrix and its length scale."""

    def test_rejects_non_positive_scale(self):
        with pytest.raises(ValueError):
            ParametrixKernel(0.0)

    def test_scale_shift(self):
        a, b = ParametrixKernel(2.0), ParametrixKernel(1.0)
        shift = a.scale_shift(b)
        assert shift == pytest.approx(log(2.0) / (2 * pi))
        assert a.value(0.3, 0.7) - b.value(0.3, 0.7) == pytest.approx(shift)

    def test_chiral_derivative(self):
        assert ParametrixKernel.chiral_derivative(0.5) == pytest.approx(-1.0 / pi)


@pytest.mark.unit
class TestKernelDump:
    """Grids and CSV output."""

    def test_row_count(self):
        assert len(kernel_grid("e-cyl", 8)) == 64

    def test_unknown_kernel(self):
        with pytest.raises(ValueError):
            kernel_grid("bogus", 8)

    def test_bad_grid(self):
        with pytest.raises(ValueError):
            kernel_grid("e-mink", 0)

    def test_grid_avoids_zero(self):
        rows = kernel_grid("diag-diff", 16)
        assert all(u != 0.0 for u, _, _ in rows)

    def test_csv(self, temp_directory):
        path = dump_kernel_csv("w-cyl", 4, temp_directory / "w.csv")
        with open(path, newline="") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["u_sep", "v_sep", "value"]
        assert len(rows) == 17
        u, _, value = (float(x) for x in rows[1])
        assert value == w_cyl(u)
        assert np.isfinite([float(r[2]) for r in rows[1:]]).all()
