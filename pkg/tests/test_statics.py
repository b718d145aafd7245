"""
Tests for comparative statics over curvature and network structure.
"""
import pytest

from src.services.critical import solve_xbar, upper_root
from src.services.errors import HeterogeneityError, ParameterError, SizeError
from src.services.models import GameSpec, PlayerParams
from src.services.network import generate
from src.services.statics import Regime, compare_weighting, density_threshold, star_minimality_experiment, sum_x
from src.services.weighting import WeightingSpec, w_prime

PRELEC_06 = WeightingSpec.prelec(0.6)


class TestCompareWeighting:
    """
    Which curvature gives the lower attack probability.

    Why: The regime is read from X-bar alone; the direct comparison of the
    two X values checks that reading on every row.
    """

    def test_sparse_neighborhood(self):
        result = compare_weighting(0.4, 0.8, 3, 0.3)
        assert result.x1 == pytest.approx(0.8588, abs=1e-4)
        assert result.x2 == pytest.approx(0.6912, abs=1e-4)
        assert result.regime == Regime.HIGHER_ALPHA_MORE_SECURE
        assert result.consistent

    def test_dense_neighborhood(self):
        result = compare_weighting(0.4, 0.8, 5, 0.3)
        assert result.x1 == pytest.approx(0.9325, abs=1e-4)
        assert result.x2 == pytest.approx(0.9643, abs=1e-4)
        assert result.regime == Regime.LOWER_ALPHA_MORE_SECURE
        assert result.consistent

    def test_coincide_at_crossing(self):
        xbar = solve_xbar(0.4, 0.8)
        theta = w_prime(WeightingSpec.prelec(0.4), xbar)
        result = compare_weighting(0.4, 0.8, 1, theta)
        assert result.regime == Regime.COINCIDE
        assert result.x1 == pytest.approx(xbar, abs=1e-6)
        assert result.x2 == pytest.approx(xbar, abs=1e-6)

    @pytest.mark.parametrize("alphas", [(0.8, 0.4), (0.4, 0.4), (0.4, 1.0)])
    def test_order_violation(self, alphas):
        with pytest.raises(ParameterError):
            compare_weighting(*alphas, 3, 0.3)

    def test_alpha_above_theta(self):
        """d c / L = 0.6 does not exceed alpha2 = 0.8."""
        with pytest.raises(ParameterError):
            compare_weighting(0.4, 0.8, 2, 0.3)


class TestDensityThreshold:
    """Smallest d where the lower curvature wins."""

    def test_six_node_flip(self):
        assert density_threshold(0.4, 0.8, 0.3) in (4, 5)

    def test_expensive_security(self):
        assert density_threshold(0.4, 0.8, 2.0) == 2

    def test_threshold_consistent_with_regimes(self):
        d = density_threshold(0.4, 0.8, 0.3)
        assert compare_weighting(0.4, 0.8, d, 0.3).regime == Regime.LOWER_ALPHA_MORE_SECURE
        assert compare_weighting(0.4, 0.8, d - 1, 0.3).regime != Regime.LOWER_ALPHA_MORE_SECURE

    def test_vanishing_cost(self):
        assert density_threshold(0.4, 0.8, 1e-9) is None


class TestNetworkStructure:
    """Sum of attack probabilities over nodes."""

    def test_star(self):
        game = GameSpec.homogeneous(generate("star", 5), PRELEC_06, c=0.45)
        assert sum_x(game) == pytest.approx(0.97116 + 4 * 0.79525, abs=1e-3)

    def test_cycle(self):
        game = GameSpec.homogeneous(generate("cycle", 5), PRELEC_06, c=0.45)
        assert sum_x(game) == pytest.approx(5 * upper_root(PRELEC_06, 3 * 0.45))

    def test_heterogeneous(self):
        players = [PlayerParams(c=0.45, L=1.0, weighting=PRELEC_06)] * 4 + [PlayerParams(c=0.5, L=1.0, weighting=PRELEC_06)]
        with pytest.raises(HeterogeneityError):
            sum_x(GameSpec.build(generate("cycle", 5), players))

    @pytest.mark.parametrize("n, trees", [(3, 3), (4, 16), (5, 125), (6, 1296)])
    def test_star_minimal_among_trees(self, n, trees):
        result = star_minimality_experiment(n, PRELEC_06, 0.45, spot_checks=20)
        assert result.all_pass
        assert result.trees_checked == trees
        assert result.worst_gap >= -1e-12

    def test_size_cap(self):
        with pytest.raises(SizeError):
            star_minimality_experiment(8, PRELEC_06, 0.45)
