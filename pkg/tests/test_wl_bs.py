"""
Tests for weakest link and best shot equilibria.
"""
import numpy as np
import pytest

from src.services.errors import ConnectivityError, HeterogeneityError, ParameterError
from src.services.models import Externality, GameSpec, PlayerParams, StrategyProfile
from src.services.network import generate, maximal_independent_sets
from src.services.weighting import WeightingSpec, w_eval
from src.services.wl_bs import (
    OptimumRegime,
    best_shot_equilibria,
    single_player_optimum,
    verify_wl_bs,
    weakest_link_equilibria,
    weakest_link_forbidden_band,
)

PRELEC_06 = WeightingSpec.prelec(0.6)


class TestSinglePlayerOptimum:
    """Isolated player's investment."""

    def test_cheap_invests_fully(self):
        result = single_player_optimum(PRELEC_06, 0.45, 1.0)
        assert result.s_star == 1.0
        assert result.regime == OptimumRegime.FULL_INVEST

    def test_expensive_invests_interior(self):
        result = single_player_optimum(PRELEC_06, 0.9, 1.0)
        assert result.regime == OptimumRegime.INTERIOR
        assert result.s_star == pytest.approx(0.2047, abs=1e-3)

    def test_matches_grid_argmax(self):
        grid = np.linspace(0.0, 1.0, 10001)
        utility = -w_eval(PRELEC_06, 1.0 - grid) - 0.9 * grid
        assert single_player_optimum(PRELEC_06, 0.9, 1.0).s_star == pytest.approx(grid[np.argmax(utility)], abs=1e-3)

    def test_risk_neutral(self):
        assert single_player_optimum(WeightingSpec.identity(), 0.5, 1.0).s_star == 1.0
        assert single_player_optimum(WeightingSpec.identity(), 1.5, 1.0).s_star == 0.0

    def test_bad_cost(self):
        with pytest.raises(ParameterError):
            single_player_optimum(PRELEC_06, 0.0, 1.0)


class TestWeakestLink:
    """
    Common-investment equilibria.

    Why: The intervals come from a case analysis; sampling every interval
    with the deviation oracle confirms it on the fixture.
    """

    def test_expensive_regime(self, weakest_link_cycle):
        result = weakest_link_equilibria(weakest_link_cycle)
        assert len(result.intervals) == 1
        interval = result.intervals[0]
        assert interval.low == 0.0
        assert interval.high == pytest.approx(0.2047, abs=1e-3)
        assert interval.verified

    def test_interval_samples_pass_and_band_fails(self, weakest_link_cycle):
        result = weakest_link_equilibria(weakest_link_cycle)
        low, high = result.forbidden_band
        for s in np.linspace(0.0, low, 9):
            assert verify_wl_bs(weakest_link_cycle, StrategyProfile.constant(6, s)).is_pne
        for s in np.linspace(low, high, 9)[1:-1]:
            assert not verify_wl_bs(weakest_link_cycle, StrategyProfile.constant(6, s)).is_pne

    def test_intermediate_regime_has_near_one_band(self):
        game = GameSpec.homogeneous(generate("cycle", 6), PRELEC_06, c=0.7, externality=Externality.WEAKEST_LINK)
        result = weakest_link_equilibria(game)
        assert len(result.intervals) == 2
        upper = result.intervals[1]
        assert upper.high == 1.0
        assert not upper.low_closed
        assert upper.indeterminate_low
        assert result.forbidden_band[1] < upper.low < 1.0
        assert all(iv.verified for iv in result.intervals)
        assert result.contains(1.0)
        assert not result.contains(0.5 * sum(result.forbidden_band))

    def test_cheap_regime_allows_everything(self):
        game = GameSpec.homogeneous(generate("cycle", 6), PRELEC_06, c=0.5, externality=Externality.WEAKEST_LINK)
        result = weakest_link_equilibria(game)
        assert [(iv.low, iv.high) for iv in result.intervals] == [(0.0, 1.0)]

    def test_risk_neutral_expensive(self):
        game = GameSpec.homogeneous(
            generate("cycle", 6), WeightingSpec.identity(), c=1.5, externality=Externality.WEAKEST_LINK
        )
        result = weakest_link_equilibria(game)
        assert [(iv.low, iv.high) for iv in result.intervals] == [(0.0, 0.0)]

    def test_forbidden_band(self, weakest_link_cycle):
        low, high = weakest_link_forbidden_band(weakest_link_cycle)
        assert low == pytest.approx(1.0 - 0.7953, abs=1e-3)
        assert high == pytest.approx(1.0 - 0.081, abs=1e-3)

    def test_disconnected(self):
        game = GameSpec.homogeneous(generate("empty", 3), PRELEC_06, c=0.9, externality=Externality.WEAKEST_LINK)
        with pytest.raises(ConnectivityError):
            weakest_link_equilibria(game)

    def test_heterogeneous(self):
        players = [PlayerParams(c=0.9, L=1.0, weighting=PRELEC_06)] * 5 + [PlayerParams(c=0.8, L=1.0, weighting=PRELEC_06)]
        game = GameSpec.build(generate("cycle", 6), players, Externality.WEAKEST_LINK)
        with pytest.raises(HeterogeneityError):
            weakest_link_equilibria(game)

    def test_unequal_profile_is_not_pne(self, weakest_link_cycle):
        profile = StrategyProfile(s=(0.1, 0.2, 0.1, 0.1, 0.1, 0.1))
        assert not verify_wl_bs(weakest_link_cycle, profile).is_pne


class TestBestShot:
    """Maximal independent set equilibria."""

    @pytest.fixture
    def best_shot_game(self, ten_node_graph):
        return GameSpec.homogeneous(ten_node_graph, PRELEC_06, c=0.45, externality=Externality.BEST_SHOT)

    def test_supports_are_the_maximal_independent_sets(self, best_shot_game, ten_node_graph):
        profiles = best_shot_equilibria(best_shot_game)
        supports = [frozenset(i + 1 for i, v in enumerate(p.s) if v > 0) for p in profiles]
        assert supports == maximal_independent_sets(ten_node_graph)
        assert frozenset({1, 2, 3, 7, 9, 10}) in supports
        assert frozenset({2, 3, 4, 8}) in supports
        assert all(any(p.s) for p in profiles)

    def test_members_invest_fully_when_cheap(self, best_shot_game):
        profile = best_shot_equilibria(best_shot_game)[0]
        assert set(profile.s) == {0.0, 1.0}
        assert verify_wl_bs(best_shot_game, profile).is_pne

    def test_members_invest_interior_when_expensive(self, ten_node_graph):
        game = GameSpec.homogeneous(ten_node_graph, PRELEC_06, c=0.9, externality=Externality.BEST_SHOT)
        for profile in best_shot_equilibria(game):
            positive = [v for v in profile.s if v > 0]
            assert positive == pytest.approx([0.2047] * len(positive), abs=1e-3)

    def test_complete_graph_single_investor(self):
        game = GameSpec.homogeneous(generate("complete", 3), PRELEC_06, c=0.45, externality=Externality.BEST_SHOT)
        profiles = best_shot_equilibria(game)
        assert [p.s for p in profiles] == [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)]

    def test_adjacent_investors_not_pne(self, best_shot_game):
        s = [0.0] * 10
        s[0] = s[3] = 1.0
        assert not verify_wl_bs(best_shot_game, StrategyProfile(s=tuple(s))).is_pne

    def test_risk_neutral_expensive_never_invests(self):
        game = GameSpec.homogeneous(generate("path", 3), WeightingSpec.identity(), c=1.5, externality=Externality.BEST_SHOT)
        assert [p.s for p in best_shot_equilibria(game)] == [(0.0, 0.0, 0.0)]

    def test_wrong_externality(self, ten_node_game):
        with pytest.raises(ParameterError):
            best_shot_equilibria(ten_node_game)

    def test_total_effort_rejected_by_oracle(self, ten_node_game):
        with pytest.raises(ParameterError):
            verify_wl_bs(ten_node_game, StrategyProfile.constant(10, 0.0))
