"""
Comparative Statics - Weighting curvature and network structure.

Two Prelec players with alpha1 < alpha2 have derivatives that cross once
above 1/e, at X-bar. Comparing d*c/L with w'(X-bar) tells which of them
ends up with the lower attack probability X. On the structural side, the
sum of X(d_i) over nodes is smallest on the star among all trees.
"""

import logging
import math
from enum import Enum

import numpy as np
from pydantic import BaseModel, Field

from src.services.critical import solve_xbar, upper_root
from src.services.errors import ParameterError, SizeError
from src.services.models import GameSpec
from src.services.network import Graph, enumerate_trees, generate
from src.services.weighting import WeightingSpec, w_prime

logger = logging.getLogger(__name__)

REGIME_TOL = 1e-8
THRESHOLD_CAP = 10**6
STAR_LIMIT = 7


class Regime(str, Enum):
    LOWER_ALPHA_MORE_SECURE = "lower_alpha_more_secure"
    HIGHER_ALPHA_MORE_SECURE = "higher_alpha_more_secure"
    COINCIDE = "coincide"


class ComparativeStaticsResult(BaseModel):
    alpha1: float
    alpha2: float
    d: int
    theta: float = Field(..., description="d*c/L")
    xbar: float
    w_prime_xbar: float
    x1: float
    x2: float
    regime: Regime
    consistent: bool = Field(..., description="Ordering of x1, x2, xbar matches the regime")


class StarMinimalityResult(BaseModel):
    all_pass: bool
    worst_gap: float = Field(..., description="min over trees of sum_x(tree) - sum_x(star)")
    trees_checked: int
    edge_additions_checked: int


# =============================================================================
# Weighting Curvature
# =============================================================================

def _ordering_matches(regime: Regime, xbar: float, x1: float, x2: float) -> bool:
    if regime == Regime.COINCIDE:
        return abs(x1 - xbar) < 1e-6 and abs(x2 - xbar) < 1e-6
    if regime == Regime.LOWER_ALPHA_MORE_SECURE:
        return xbar < x1 + REGIME_TOL and x1 < x2 + REGIME_TOL
    return xbar > x1 - REGIME_TOL and x1 > x2 - REGIME_TOL


def compare_weighting(alpha1: float, alpha2: float, d: int, c: float, L: float = 1.0) -> ComparativeStaticsResult:
    """
    Compare X for two Prelec curvatures at the same neighborhood size and costs.

    Args:
        alpha1: Lower curvature parameter.
        alpha2: Higher curvature parameter.
        d: Extended-neighborhood size.
        c: Cost per unit of investment.
        L: Loss on successful attack.

    Returns:
        ComparativeStaticsResult; the regime follows from d*c/L versus w'(X-bar).

    Raises:
        ParameterError: unless 0 < alpha1 < alpha2 < min(1, d*c/L).
    """
    if c <= 0 or L <= 0 or d < 1:
        raise ParameterError(f"require c > 0, L > 0, d >= 1; got c={c}, L={L}, d={d}")
    theta = d * c / L
    if not (0 < alpha1 < alpha2 < 1) or alpha2 >= theta:
        raise ParameterError(
            f"require 0 < alpha1 < alpha2 < min(1, dc/L); got alpha1={alpha1}, alpha2={alpha2}, dc/L={theta:g}"
        )

    xbar = solve_xbar(alpha1, alpha2)
    w_prime_xbar = w_prime(WeightingSpec.prelec(alpha1), xbar)
    x1 = upper_root(WeightingSpec.prelec(alpha1), theta)
    x2 = upper_root(WeightingSpec.prelec(alpha2), theta)

    if abs(theta - w_prime_xbar) <= REGIME_TOL:
        regime = Regime.COINCIDE
    elif theta > w_prime_xbar:
        regime = Regime.LOWER_ALPHA_MORE_SECURE
    else:
        regime = Regime.HIGHER_ALPHA_MORE_SECURE

    return ComparativeStaticsResult(
        alpha1=alpha1,
        alpha2=alpha2,
        d=d,
        theta=theta,
        xbar=xbar,
        w_prime_xbar=w_prime_xbar,
        x1=x1,
        x2=x2,
        regime=regime,
        consistent=_ordering_matches(regime, xbar, x1, x2),
    )


def density_threshold(alpha1: float, alpha2: float, c: float, L: float = 1.0) -> int | None:
    """
    Smallest d >= 2 with d*c/L > w'(X-bar), where the lower curvature becomes
    the more secure one. None when no d up to 10^6 qualifies.
    """
    if c <= 0 or L <= 0:
        raise ParameterError(f"require c > 0 and L > 0, got c={c}, L={L}")
    xbar = solve_xbar(alpha1, alpha2)
    w_prime_xbar = w_prime(WeightingSpec.prelec(alpha1), xbar)
    d = max(2, math.floor(w_prime_xbar * L / c) + 1)
    return d if d <= THRESHOLD_CAP else None


# =============================================================================
# Network Structure
# =============================================================================

def sum_x(game: GameSpec) -> float:
    """Sum over nodes of X(d_i) for homogeneous players."""
    player = game.require_homogeneous("sum_x")
    return float(sum(upper_root(player.weighting, d * player.ratio) for d in game.graph.extended_sizes()))


def _graph_sum(graph: Graph, spec: WeightingSpec, c: float, L: float) -> float:
    return sum_x(GameSpec.homogeneous(graph, spec, c, L))


def star_minimality_experiment(
    n: int,
    spec: WeightingSpec,
    c: float,
    L: float = 1.0,
    spot_checks: int = 100,
    seed: int = 0,
) -> StarMinimalityResult:
    """
    Check the star against every labeled tree on n nodes, and that adding an
    edge to a sample of trees never lowers sum_x.

    Raises:
        SizeError: n > 7.
    """
    if n > STAR_LIMIT:
        raise SizeError(f"star experiment is capped at n={STAR_LIMIT}, got {n}")
    trees = enumerate_trees(n)
    star_sum = _graph_sum(generate("star", n), spec, c, L)
    tree_sums = [_graph_sum(tree, spec, c, L) for tree in trees]
    gaps = np.array(tree_sums) - star_sum
    worst_gap = float(gaps.min())
    all_pass = worst_gap >= -1e-12

    rng = np.random.default_rng(seed)
    picks = rng.choice(len(trees), size=min(spot_checks, len(trees)), replace=False)
    additions = 0
    for k in picks:
        tree, base = trees[k], tree_sums[k]
        present = set(tree.edges)
        for u in range(1, n + 1):
            for v in range(u + 1, n + 1):
                if (u, v) in present:
                    continue
                additions += 1
                grown = Graph.from_edges(n, [*tree.edges, (u, v)])
                if _graph_sum(grown, spec, c, L) < base - 1e-12:
                    logger.warning("adding edge %d-%d lowered sum_x", u, v)
                    all_pass = False

    return StarMinimalityResult(
        all_pass=all_pass,
        worst_gap=worst_gap,
        trees_checked=len(trees),
        edge_additions_checked=additions,
    )
