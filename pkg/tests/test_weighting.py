"""
Tests for the probability weighting functions and their shape checks.
"""
import math

import numpy as np
import pytest

from src.services.errors import DomainError, WeightingSpecError
from src.services.weighting import INV_E, WeightingKind, WeightingSpec, check_shape, w_eval, w_prime, w_second

ALPHA_GRID = [0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]


class TestWeightingSpec:
    """Construction rules for the weighting families."""

    def test_prelec_accepts_unit_interval(self):
        spec = WeightingSpec.prelec(0.6)
        assert spec.kind == WeightingKind.PRELEC
        assert spec.alpha == 0.6
        assert not spec.is_linear

    @pytest.mark.parametrize("alpha", [0.0, -0.2, 1.5, float("nan"), float("inf")])
    def test_prelec_rejects_out_of_range(self, alpha):
        with pytest.raises(WeightingSpecError):
            WeightingSpec.prelec(alpha)

    def test_prelec_alpha_one_is_linear(self):
        assert WeightingSpec.prelec(1.0).is_linear

    def test_identity_is_linear(self):
        spec = WeightingSpec.identity()
        assert spec.is_linear
        assert spec.label() == "identity"

    def test_spec_is_hashable(self):
        """Specs key the critical-point caches."""
        assert hash(WeightingSpec.prelec(0.4)) == hash(WeightingSpec.prelec(0.4))


class TestEvaluation:
    """w, w' and w'' values."""

    def test_fixed_point_at_inverse_e(self):
        assert w_eval(WeightingSpec.prelec(0.6), INV_E) == pytest.approx(INV_E, abs=1e-12)

    def test_endpoints(self):
        spec = WeightingSpec.prelec(0.6)
        assert w_eval(spec, 0.0) == 0.0
        assert w_eval(spec, 1.0) == 1.0

    def test_half(self):
        assert w_eval(WeightingSpec.prelec(0.6), 0.5) == pytest.approx(0.4481, abs=1e-4)

    def test_vector_input_returns_array(self):
        values = w_eval(WeightingSpec.prelec(0.6), np.array([0.0, 0.5, 1.0]))
        assert isinstance(values, np.ndarray)
        assert values.shape == (3,)

    def test_identity_passthrough(self):
        spec = WeightingSpec.identity()
        assert w_eval(spec, 0.3) == 0.3
        assert w_prime(spec, 0.3) == 1.0
        assert w_second(spec, 0.3) == 0.0

    def test_derivative_at_target(self):
        """X for theta = 0.9 sits near 0.79525."""
        assert w_prime(WeightingSpec.prelec(0.6), 0.79525) == pytest.approx(0.9, abs=1e-3)

    @pytest.mark.parametrize("x", [-0.1, 1.1, float("nan")])
    def test_eval_domain(self, x):
        with pytest.raises(DomainError):
            w_eval(WeightingSpec.prelec(0.6), x)

    @pytest.mark.parametrize("x", [0.0, 1.0])
    def test_derivative_needs_open_interval(self, x):
        with pytest.raises(DomainError):
            w_prime(WeightingSpec.prelec(0.6), x)

    def test_near_one_is_precise(self):
        """w(1 - 1e-12) stays strictly below 1 and is finite."""
        value = w_eval(WeightingSpec.prelec(0.6), 1.0 - 1e-12)
        assert value < 1.0
        assert math.isfinite(w_prime(WeightingSpec.prelec(0.6), 1.0 - 1e-12))


class TestPrelecIdentities:
    """Inflection at 1/e for every curvature."""

    @pytest.mark.parametrize("alpha", ALPHA_GRID)
    def test_inflection(self, alpha):
        spec = WeightingSpec.prelec(alpha)
        assert w_eval(spec, INV_E) == pytest.approx(INV_E, abs=1e-10)
        assert w_prime(spec, INV_E) == pytest.approx(alpha, abs=1e-10)
        assert w_second(spec, INV_E) == pytest.approx(0.0, abs=1e-10)


class TestDerivativeConsistency:
    """
    Analytic derivatives against central differences.

    Why: Critical points come from the closed-form w'; a slip in that
    formula moves X without any other test noticing.
    """

    @pytest.mark.parametrize("alpha", [0.2, 0.4, 0.6, 0.8, 0.95])
    def test_first_and_second(self, alpha):
        spec = WeightingSpec.prelec(alpha)
        xs = np.linspace(0.01, 0.99, 99)
        h = 1e-5 * np.minimum(xs, 1.0 - xs)

        fd_first = (w_eval(spec, xs + h) - w_eval(spec, xs - h)) / (2 * h)
        np.testing.assert_allclose(w_prime(spec, xs), fd_first, rtol=1e-5, atol=1e-7)

        fd_second = (w_prime(spec, xs + h) - w_prime(spec, xs - h)) / (2 * h)
        np.testing.assert_allclose(w_second(spec, xs), fd_second, rtol=1e-5, atol=1e-5)

    def test_second_derivative_positive_above_inflection(self):
        assert w_second(WeightingSpec.prelec(0.4), 0.9) > 0


class TestShape:
    """Grid shape diagnostics."""

    @pytest.mark.parametrize("alpha", [0.6, 0.95])
    def test_prelec_flags(self, alpha):
        report = check_shape(WeightingSpec.prelec(alpha))
        assert report.unique_min
        assert report.x_min == pytest.approx(INV_E, abs=1e-8)
        assert report.w_prime_min == pytest.approx(alpha, abs=1e-10)
        assert report.concave_convex_split
        assert report.endpoint_blowup
        assert report.ratio_bound
        assert report.convex_derivative

    def test_identity_has_no_minimum(self):
        report = check_shape(WeightingSpec.identity())
        assert not report.unique_min
        assert report.x_min is None
        assert report.w_prime_min == 1.0

    def test_grid_size_floor(self):
        with pytest.raises(DomainError):
            check_shape(WeightingSpec.prelec(0.6), grid_size=50)
