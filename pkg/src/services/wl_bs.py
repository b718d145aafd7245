"""
Weakest Link and Best Shot - Equilibria under min and max externalities.

Both characterizations rest on the single-player optimum: a lone player
invests 1 when c/L < w'(z) and 1 - X (w'(X) = c/L) otherwise.

Weakest Link: on a common profile s, a player can only lower the minimum,
so s is an equilibrium iff s maximizes u(t) = -L w(1 - t) - c t over [0, s].
Best Shot: members of a maximal independent set invest the single-player
optimum and everyone else free-rides.
"""

import logging
import math
from enum import Enum

import numpy as np
from pydantic import BaseModel, Field

from src.config import get_settings
from src.services.critical import critical_points, solve_root_monotone, solve_z
from src.services.errors import ConnectivityError, ParameterError
from src.services.models import Externality, GameSpec, StrategyProfile
from src.services.network import maximal_independent_sets
from src.services.total_effort import deviation_gains
from src.services.weighting import WeightingSpec, w_eval

logger = logging.getLogger(__name__)

TIE_TOL = 1e-12


# =============================================================================
# Models
# =============================================================================

class OptimumRegime(str, Enum):
    FULL_INVEST = "full_invest"
    INTERIOR = "interior"
    ZERO = "zero"


class SinglePlayerOptimum(BaseModel):
    s_star: float
    regime: OptimumRegime
    tie: bool = Field(False, description="c/L equals the switching threshold; both candidates tie")
    x_upper: float | None = None
    w_prime_z: float | None = None


class WlInterval(BaseModel):
    low: float
    high: float
    low_closed: bool = True
    high_closed: bool = True
    indeterminate_low: bool = Field(False, description="Boundary solves an equality; membership not asserted")
    verified: bool | None = None
    samples: int = 0


class WlEquilibriumSet(BaseModel):
    intervals: list[WlInterval]
    notes: list[str] = Field(default_factory=list)
    x_upper: float | None = None
    v: float | None = None
    w_prime_z: float | None = None
    forbidden_band: tuple[float, float] | None = Field(None, description="Common investments (1 - X, 1 - V) that are never equilibria")

    def contains(self, s: float) -> bool:
        for iv in self.intervals:
            above = s >= iv.low if iv.low_closed else s > iv.low
            below = s <= iv.high if iv.high_closed else s < iv.high
            if above and below:
                return True
        return False


class WlBsVerification(BaseModel):
    is_pne: bool
    max_violation: float
    per_node_gain: list[float]


# =============================================================================
# Single Player
# =============================================================================

def _single_player_utility(spec: WeightingSpec, c: float, L: float, t):
    return -L * w_eval(spec, 1.0 - np.asarray(t, dtype=float)) - c * np.asarray(t, dtype=float)


def single_player_optimum(spec: WeightingSpec, c: float, L: float) -> SinglePlayerOptimum:
    """
    Optimal investment of an isolated player.

    Args:
        spec: Player weighting; identity gives the risk-neutral answer.
        c: Cost per unit of investment.
        L: Loss on successful attack.

    Returns:
        SinglePlayerOptimum; at c/L = w'(z) exactly the interior value is
        returned with tie=True.
    """
    if c <= 0 or L <= 0:
        raise ParameterError(f"require c > 0 and L > 0, got c={c}, L={L}")
    ratio = c / L

    if spec.is_linear:
        if math.isclose(ratio, 1.0, rel_tol=0.0, abs_tol=TIE_TOL):
            return SinglePlayerOptimum(s_star=1.0, regime=OptimumRegime.FULL_INVEST, tie=True)
        if ratio < 1.0:
            return SinglePlayerOptimum(s_star=1.0, regime=OptimumRegime.FULL_INVEST)
        return SinglePlayerOptimum(s_star=0.0, regime=OptimumRegime.ZERO)

    wz = solve_z(spec).w_prime_z
    if ratio < wz - TIE_TOL:
        return SinglePlayerOptimum(s_star=1.0, regime=OptimumRegime.FULL_INVEST, w_prime_z=wz)
    x_upper = critical_points(spec, ratio).x_upper
    return SinglePlayerOptimum(
        s_star=1.0 - x_upper,
        regime=OptimumRegime.INTERIOR,
        tie=abs(ratio - wz) <= TIE_TOL,
        x_upper=x_upper,
        w_prime_z=wz,
    )


# =============================================================================
# Verification
# =============================================================================

def verify_wl_bs(game: GameSpec, profile: StrategyProfile, tol: float | None = None) -> WlBsVerification:
    """
    Deviation oracle for min/max externalities.

    Candidates per player: a uniform grid on [0, 1] plus 0, 1, the current
    neighborhood min (or max) and the single-player optimum.
    """
    if game.externality == Externality.TOTAL_EFFORT:
        raise ParameterError("verify_wl_bs applies to weakest link and best shot games")
    settings = get_settings()
    tol = settings.verify_tol if tol is None else tol
    grid = np.linspace(0.0, 1.0, settings.deviation_grid)
    s = profile.as_array()
    pick = np.min if game.externality == Externality.WEAKEST_LINK else np.max

    gains = []
    for i in game.graph.nodes:
        p = game.player(i)
        extreme = float(pick(s[[j - 1 for j in game.graph.closed_neighborhood(i)]]))
        optimum = single_player_optimum(p.weighting, p.c, p.L).s_star
        candidates = np.concatenate([grid, [0.0, 1.0, extreme, optimum]])
        gains.append(deviation_gains(game, s, i, candidates))

    max_violation = max(gains) if gains else 0.0
    return WlBsVerification(is_pne=max_violation < tol, max_violation=max_violation, per_node_gain=gains)


# =============================================================================
# Weakest Link
# =============================================================================

def _require_wl(game: GameSpec, operation: str):
    if game.externality != Externality.WEAKEST_LINK:
        raise ParameterError(f"{operation} applies to weakest link games")
    if not game.graph.is_connected():
        raise ConnectivityError(f"{operation} requires a connected graph")
    return game.require_homogeneous(operation)


def weakest_link_forbidden_band(game: GameSpec) -> tuple[float, float] | None:
    """Open band (1 - X, 1 - V) of common investments that are never equilibria."""
    player = _require_wl(game, "weakest_link_forbidden_band")
    if player.weighting.is_linear:
        return None
    cp = critical_points(player.weighting, player.ratio)
    if not cp.interior_exists:
        return None
    return (1.0 - cp.x_upper, 1.0 - cp.v)


def _verify_interval(game: GameSpec, interval: WlInterval, points: int, tol: float) -> WlInterval:
    if interval.high - interval.low <= 0:
        samples = np.array([interval.low])
    elif interval.low_closed:
        samples = np.linspace(interval.low, interval.high, points)
    else:
        samples = np.linspace(interval.low, interval.high, points + 1)[1:]
    results = [verify_wl_bs(game, StrategyProfile.constant(game.n, float(v)), tol=tol).is_pne for v in samples]
    if not all(results):
        logger.warning("weakest link interval [%g, %g] failed %d of %d samples",
                       interval.low, interval.high, results.count(False), len(results))
    return interval.model_copy(update={"verified": all(results), "samples": len(results)})


def weakest_link_equilibria(game: GameSpec, epsilon_grid: int = 11, tol: float = 1e-7) -> WlEquilibriumSet:
    """
    Common investments s for which s * 1 is an equilibrium.

    Regimes by c/L:
      - c/L <= w'(x_min): every s in [0, 1].
      - w'(x_min) < c/L < w'(z): [0, 1 - X] and a near-one band (s*, 1],
        where u(s*) = u(1 - X).
      - c/L >= w'(z): [0, 1 - X].
    Each interval is checked on epsilon_grid sampled points.

    Raises:
        ConnectivityError: graph is disconnected.
        HeterogeneityError: players differ.
    """
    player = _require_wl(game, "weakest_link_equilibria")
    spec, c, L = player.weighting, player.c, player.L
    ratio = player.ratio

    if spec.is_linear:
        if ratio > 1.0 + TIE_TOL:
            intervals = [WlInterval(low=0.0, high=0.0)]
            notes = ["risk-neutral players with c/L > 1 never invest"]
        else:
            intervals = [WlInterval(low=0.0, high=1.0)]
            notes = ["risk-neutral players with c/L <= 1: any common investment"]
        result = WlEquilibriumSet(intervals=intervals, notes=notes)
    else:
        cp = critical_points(spec, ratio)
        wz = solve_z(spec).w_prime_z
        if not cp.interior_exists:
            result = WlEquilibriumSet(
                intervals=[WlInterval(low=0.0, high=1.0)],
                notes=["c/L <= w'(x_min): any common investment is an equilibrium"],
                w_prime_z=wz,
            )
        else:
            low_band = 1.0 - cp.x_upper
            intervals = [WlInterval(low=0.0, high=low_band)]
            notes = [f"attack probability at least X = {cp.x_upper:.6g}"]
            if ratio < wz + TIE_TOL:
                reference = _single_player_utility(spec, c, L, low_band)
                if abs(ratio - wz) <= TIE_TOL:
                    start = 1.0
                    notes.append("c/L equals w'(z): full investment ties with 1 - X")
                else:
                    start = solve_root_monotone(
                        lambda t: float(_single_player_utility(spec, c, L, t)) - reference,
                        1.0 - cp.v,
                        1.0,
                    )
                    notes.append(f"near-one band starts at {start:.6g}")
                intervals.append(WlInterval(low=start, high=1.0, low_closed=False, indeterminate_low=True))
            result = WlEquilibriumSet(
                intervals=intervals,
                notes=notes,
                x_upper=cp.x_upper,
                v=cp.v,
                w_prime_z=wz,
                forbidden_band=(low_band, 1.0 - cp.v),
            )

    checked = [_verify_interval(game, iv, epsilon_grid, tol) for iv in result.intervals]
    return result.model_copy(update={"intervals": checked})


# =============================================================================
# Best Shot
# =============================================================================

def best_shot_equilibria(game: GameSpec, limit: int | None = None) -> list[StrategyProfile]:
    """
    One profile per maximal independent set: members invest the single-player
    optimum, everyone else invests 0.

    Risk-neutral players with c/L > 1 have the all-zero profile as their only
    equilibrium.
    """
    if game.externality != Externality.BEST_SHOT:
        raise ParameterError("best_shot_equilibria applies to best shot games")
    player = game.require_homogeneous("best_shot_equilibria")
    optimum = single_player_optimum(player.weighting, player.c, player.L)
    if optimum.s_star == 0.0:
        return [StrategyProfile.constant(game.n, 0.0)]

    profiles = []
    for members in maximal_independent_sets(game.graph, limit=limit):
        s = np.zeros(game.n)
        s[[i - 1 for i in members]] = optimum.s_star
        profiles.append(StrategyProfile.from_array(s))
    return profiles
