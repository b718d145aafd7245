"""
Total Effort - Best responses, equilibrium search and verification.

Attack probability at node i is 1 - (sum of investments over the extended
neighborhood) / d_i. With X_i solving w_i'(X_i) = d_i c_i / L_i, an active
player targets T_i = d_i (1 - X_i) of aggregate investment, so the best
response is clamp(T_i - s_bar_i, 0, 1). Players with d_i c_i / L_i <= w'(x_min)
invest 1 regardless of their neighbors.
"""

import logging
import math
from enum import Enum

import fnc
import numpy as np
from pydantic import BaseModel, Field
from scipy.linalg import lstsq, lu_factor, lu_solve

from src.config import get_settings
from src.services.critical import critical_points
from src.services.errors import (
    DomainError,
    ParameterError,
    SingularSystemError,
    UndefinedCriticalPointError,
)
from src.services.models import (
    EquilibriumReport,
    Externality,
    GameSpec,
    NodeCase,
    Order,
    PneVerification,
    SolveMethod,
    StartRule,
    StrategyProfile,
)
from src.services.weighting import WeightingSpec, w_eval

logger = logging.getLogger(__name__)

CASE_TOL = 1e-8
RANGE_SLACK = 1e-9


# =============================================================================
# Models
# =============================================================================

class PlayerTargets(BaseModel):
    """Per-node target aggregate T_i = d_i (1 - X_i), or a fixed dominant investment."""
    d: list[int]
    x_upper: list[float | None]
    targets: list[float | None]
    fixed: list[float | None] = Field(..., description="Dominant investment, None for active players")

    def target_array(self) -> np.ndarray:
        return np.array([np.nan if t is None else t for t in self.targets])

    def fixed_array(self) -> np.ndarray:
        return np.array([np.nan if f is None else f for f in self.fixed])


class PhiBound(BaseModel):
    bound_sum: float = Field(..., description="(1/n) * sum of X_i")
    bound_avg: float | None = Field(None, description="X at the average extended-neighborhood size; homogeneous players only")
    applicable: bool = Field(..., description="1 - X_i < 1/d_i at every node")
    per_node_applicable: list[bool]


class SecureWitness(str, Enum):
    DOMINANT = "dominant"
    V_AT_LEAST_INV_D = "v_at_least_inv_d"
    W_INV_D_EXCEEDS_COST = "w_inv_d_exceeds_cost"
    NONE = "none"


class SecurePneReport(BaseModel):
    exists: bool
    witness: list[SecureWitness]


class InvestmentSet(BaseModel):
    """Closed interval of optimal investments; [0, 1] means any investment is optimal."""
    low: float
    high: float

    @property
    def is_any(self) -> bool:
        return self.low == 0.0 and self.high == 1.0


class NestedPair(BaseModel):
    i: int
    j: int
    ok: bool


# =============================================================================
# Best Responses
# =============================================================================

def require_total_effort(game: GameSpec, operation: str) -> None:
    if game.externality != Externality.TOTAL_EFFORT:
        raise ParameterError(f"{operation} applies to total effort games, got {game.externality.value}")


def risk_neutral_best_response(c: float, L: float, d: int) -> InvestmentSet:
    """Best response under w(x) = x: 1 if dc/L < 1, 0 if dc/L > 1, anything at equality."""
    theta = d * c / L
    if math.isclose(theta, 1.0, rel_tol=0.0, abs_tol=1e-12):
        return InvestmentSet(low=0.0, high=1.0)
    value = 1.0 if theta < 1.0 else 0.0
    return InvestmentSet(low=value, high=value)


def best_response(
    spec: WeightingSpec,
    c: float,
    L: float,
    d: int,
    s_bar: float,
    x_upper: float | None = None,
) -> float:
    """
    Best response of a total effort player to neighbor investment s_bar.

    Args:
        spec: Player weighting.
        c: Cost per unit of investment.
        L: Loss on successful attack.
        d: Extended-neighborhood size.
        s_bar: Sum of the neighbors' investments, in [0, d - 1].
        x_upper: X to use instead of solving w'(X) = dc/L.

    Returns:
        clamp(d (1 - X) - s_bar, 0, 1), or 1 when dc/L <= w'(x_min).
    """
    if not math.isfinite(s_bar) or s_bar < -RANGE_SLACK or s_bar > d - 1 + RANGE_SLACK:
        raise DomainError(f"s_bar must lie in [0, {d - 1}], got {s_bar!r}")
    if x_upper is None:
        if spec.is_linear:
            return risk_neutral_best_response(c, L, d).high
        cp = critical_points(spec, d * c / L)
        if not cp.interior_exists:
            return 1.0
        x_upper = cp.x_upper
    return float(min(1.0, max(0.0, d * (1.0 - x_upper) - s_bar)))


def player_targets(game: GameSpec) -> PlayerTargets:
    """Resolve every player's target aggregate or dominant investment."""
    d_list, xs, targets, fixed = [], [], [], []
    for i in game.graph.nodes:
        p = game.player(i)
        d = game.graph.extended_size(i)
        d_list.append(d)
        if p.weighting.is_linear:
            xs.append(None)
            targets.append(None)
            fixed.append(risk_neutral_best_response(p.c, p.L, d).high)
            continue
        cp = critical_points(p.weighting, d * p.ratio)
        if cp.interior_exists:
            xs.append(cp.x_upper)
            targets.append(d * (1.0 - cp.x_upper))
            fixed.append(None)
        else:
            xs.append(None)
            targets.append(None)
            fixed.append(1.0)
    return PlayerTargets(d=d_list, x_upper=xs, targets=targets, fixed=fixed)


def expected_utility(game: GameSpec, i: int, profile: StrategyProfile) -> float:
    """-L_i w_i(x_i) - c_i s_i, with x_i the attack probability at node i."""
    p = game.player(i)
    s = profile.as_array()
    if s.size != game.n:
        raise ParameterError(f"profile has {s.size} entries for {game.n} nodes")
    x = game.attack_probabilities(s)[i - 1]
    return -p.L * w_eval(p.weighting, x) - p.c * s[i - 1]


def potential(game: GameSpec, profile: StrategyProfile) -> float:
    """
    Exact potential sum_i (T_i s_i - s_i^2 / 2) - sum_{i<j} a_ij s_i s_j over active players.

    Each active player's best response maximizes it in that player's coordinate.
    """
    require_total_effort(game, "potential")
    targets = player_targets(game)
    s = profile.as_array()
    t = targets.target_array()
    active = ~np.isnan(t)
    own = float(np.sum(t[active] * s[active] - 0.5 * s[active] ** 2))
    cross = 0.5 * float(s @ game.graph.adjacency_matrix() @ s)
    return own - cross


# =============================================================================
# Verification
# =============================================================================

def deviation_gains(game: GameSpec, s: np.ndarray, i: int, candidates: np.ndarray) -> float:
    """Largest utility gain node i can get by switching to any candidate investment."""
    p = game.player(i)
    idx = i - 1
    others = [j - 1 for j in game.graph.neighbors(i)]
    t = np.concatenate([np.clip(candidates, 0.0, 1.0), [s[idx]]])

    if game.externality == Externality.TOTAL_EFFORT:
        d = game.graph.extended_size(i)
        x = 1.0 - (t + s[others].sum()) / d
    elif game.externality == Externality.WEAKEST_LINK:
        x = 1.0 - (np.minimum(t, s[others].min()) if others else t)
    else:
        x = 1.0 - (np.maximum(t, s[others].max()) if others else t)

    u = -p.L * w_eval(p.weighting, np.clip(x, 0.0, 1.0)) - p.c * t
    return float(max(0.0, u[:-1].max() - u[-1]))


def classify_node(s_i: float, s_bar: float, target: float | None, fixed: float | None, tol: float = CASE_TOL) -> NodeCase:
    """Match a node's investment against the three best-response cases."""
    if fixed is not None:
        if abs(s_i - fixed) > tol:
            return NodeCase.NONE
        return NodeCase.FULL_INVEST if fixed == 1.0 else NodeCase.ZERO
    if s_i >= 1.0 - tol and 1.0 + s_bar < target + tol:
        return NodeCase.FULL_INVEST
    if s_i <= tol and s_bar > target - tol:
        return NodeCase.ZERO
    if abs(s_i + s_bar - target) < tol:
        return NodeCase.INTERIOR
    return NodeCase.NONE


def verify_pne(
    game: GameSpec,
    profile: StrategyProfile,
    tol: float | None = None,
    grid_size: int | None = None,
) -> PneVerification:
    """
    Check a profile against the best-response cases and a deviation oracle.

    The oracle tries a uniform grid of deviations in [0, 1] plus the analytic
    candidates {0, 1, clamp(T_i - s_bar_i)} for every node.

    Args:
        game: Total effort game.
        profile: Candidate equilibrium.
        tol: Largest tolerated utility gain (Settings.verify_tol by default).
        grid_size: Deviation grid size (Settings.deviation_grid by default).

    Returns:
        PneVerification; is_pne holds iff max_violation < tol.
    """
    require_total_effort(game, "verify_pne")
    settings = get_settings()
    tol = settings.verify_tol if tol is None else tol
    grid = np.linspace(0.0, 1.0, settings.deviation_grid if grid_size is None else grid_size)

    s = profile.as_array()
    targets = player_targets(game)
    adjacency = game.graph.adjacency_matrix()
    s_bar = adjacency @ s

    cases, gains = [], []
    for i in game.graph.nodes:
        idx = i - 1
        target, fixed = targets.targets[idx], targets.fixed[idx]
        cases.append(classify_node(s[idx], s_bar[idx], target, fixed))
        analytic = [0.0, 1.0, fixed if fixed is not None else min(1.0, max(0.0, target - s_bar[idx]))]
        gains.append(deviation_gains(game, s, i, np.concatenate([grid, analytic])))

    max_violation = max(gains) if gains else 0.0
    return PneVerification(
        is_pne=max_violation < tol,
        max_violation=max_violation,
        per_node_case=cases,
        per_node_gain=gains,
        characterization_ok=all(c != NodeCase.NONE for c in cases),
    )


def phi(game: GameSpec, profile: StrategyProfile) -> float:
    """Average true attack probability over all nodes."""
    return float(np.mean(game.attack_probabilities(profile.as_array())))


def build_report(
    game: GameSpec,
    s: np.ndarray,
    method: SolveMethod,
    iterations: int,
    converged: bool = True,
    diagnostics: dict | None = None,
    tol: float | None = None,
) -> EquilibriumReport:
    profile = StrategyProfile.from_array(s)
    verification = verify_pne(game, profile, tol=tol)
    report = EquilibriumReport(
        profile=profile,
        attack_probs=game.attack_probabilities(profile.as_array()).tolist(),
        phi=phi(game, profile),
        is_pne=converged and verification.is_pne,
        per_node_case=verification.per_node_case,
        max_violation=verification.max_violation,
        iterations=iterations,
        method=method,
        converged=converged,
        diagnostics=diagnostics or {},
    )
    logger.info(
        "%s finished: iterations=%d converged=%s is_pne=%s max_violation=%.3e",
        method.value, iterations, converged, report.is_pne, report.max_violation,
    )
    return report


# =============================================================================
# Equilibrium Search
# =============================================================================

def interior_system(game: GameSpec) -> tuple[np.ndarray, np.ndarray]:
    """(A + I, d * (1 - X)) for the interior equilibrium system."""
    require_total_effort(game, "interior_system")
    targets = player_targets(game)
    if any(t is None for t in targets.targets):
        missing = [i for i, t in zip(game.graph.nodes, targets.targets) if t is None]
        raise UndefinedCriticalPointError(f"X undefined at nodes {missing}; no interior system")
    return game.graph.adjacency_matrix() + np.eye(game.n), targets.target_array()


def _solve_interior_system(game: GameSpec) -> tuple[np.ndarray, bool]:
    matrix, rhs = interior_system(game)
    if np.linalg.matrix_rank(matrix) == game.n:
        return lu_solve(lu_factor(matrix), rhs), False

    solution, _, _, _ = lstsq(matrix, rhs)
    residual = np.linalg.norm(matrix @ solution - rhs)
    if residual > 1e-9 * max(1.0, np.linalg.norm(rhs)):
        raise SingularSystemError(f"(A+I)s = d(1-X) is singular and inconsistent (residual {residual:.3e})")
    logger.debug("singular interior system; using the minimum-norm solution")
    return solution, True


def interior_solve(game: GameSpec) -> EquilibriumReport | None:
    """
    Solve (A + I) s = d * (1 - X) and report it when s lies in [0, 1]^n.

    A singular but consistent system yields the minimum-norm solution,
    flagged as singular in the diagnostics.

    Raises:
        UndefinedCriticalPointError: some node has no X.
        SingularSystemError: the system is singular and inconsistent.
    """
    solution, singular = _solve_interior_system(game)
    if np.any(solution < -RANGE_SLACK) or np.any(solution > 1.0 + RANGE_SLACK):
        logger.info("interior solution leaves [0, 1]^n; no interior equilibrium")
        return None
    return build_report(
        game,
        np.clip(solution, 0.0, 1.0),
        SolveMethod.INTERIOR_SOLVE,
        iterations=1,
        diagnostics={"singular": singular},
    )


def _initial_profile(game: GameSpec, start: StartRule, rng: np.random.Generator) -> np.ndarray:
    if start == StartRule.ONES:
        return np.ones(game.n)
    if start == StartRule.RANDOM:
        return rng.uniform(0.0, 1.0, game.n)
    if start == StartRule.INTERIOR:
        try:
            solution, _ = _solve_interior_system(game)
            return np.clip(solution, 0.0, 1.0)
        except (UndefinedCriticalPointError, SingularSystemError) as exc:
            logger.warning("interior start unavailable (%s); starting from zeros", exc)
    return np.zeros(game.n)


def brd_solve(
    game: GameSpec,
    order: Order = Order.ROUND_ROBIN,
    seed: int | None = None,
    tol: float | None = None,
    max_sweeps: int | None = None,
    start: StartRule = StartRule.ZEROS,
) -> EquilibriumReport:
    """
    Sequential best-response dynamics.

    Each sweep updates every active player once, in index order or in a
    fresh random permutation. Stops when the largest change in a sweep drops
    below tol. Running out of sweeps is reported (converged=False,
    is_pne=False), not raised.

    Args:
        game: Total effort game.
        order: Update order per sweep.
        seed: Seed for random order and random start.
        tol: Stopping tolerance (Settings.brd_tol by default).
        max_sweeps: Sweep cap (Settings.brd_max_sweeps by default).
        start: Initial profile rule; dominant players start at their fixed value.

    Returns:
        EquilibriumReport with method BRD.
    """
    require_total_effort(game, "brd_solve")
    settings = get_settings()
    tol = settings.brd_tol if tol is None else tol
    max_sweeps = settings.brd_max_sweeps if max_sweeps is None else max_sweeps
    order, start = Order(order), StartRule(start)
    rng = np.random.default_rng(seed)

    targets = player_targets(game)
    t = targets.target_array()
    fixed = targets.fixed_array()
    active = np.flatnonzero(np.isnan(fixed))
    neighbors = [np.array(game.graph.neighbors(i), dtype=int) - 1 for i in game.graph.nodes]

    s = _initial_profile(game, start, rng)
    s[~np.isnan(fixed)] = fixed[~np.isnan(fixed)]

    converged = active.size == 0
    sweeps = 0
    while not converged and sweeps < max_sweeps:
        sweeps += 1
        sequence = rng.permutation(active) if order == Order.RANDOM else active
        change = 0.0
        for idx in sequence:
            new = min(1.0, max(0.0, t[idx] - s[neighbors[idx]].sum()))
            change = max(change, abs(new - s[idx]))
            s[idx] = new
        logger.debug("sweep %d: max change %.3e", sweeps, change)
        converged = bool(change < tol)

    if not converged:
        logger.warning("best-response dynamics did not converge in %d sweeps", max_sweeps)
    return build_report(
        game,
        s,
        SolveMethod.BRD,
        iterations=sweeps,
        converged=converged,
        diagnostics={"order": order.value, "start": start.value, "seed": seed},
    )


def solve_auto(
    game: GameSpec,
    order: Order = Order.ROUND_ROBIN,
    seed: int | None = None,
    start: StartRule = StartRule.ZEROS,
    tol: float | None = None,
    max_sweeps: int | None = None,
) -> EquilibriumReport:
    """Best-response dynamics, falling back to Lemke's method when BRD fails."""
    from src.services.lcp import solve_game_lcp

    report = brd_solve(game, order=order, seed=seed, tol=tol, max_sweeps=max_sweeps, start=start)
    if report.is_pne:
        return report
    logger.warning("BRD result not verified (converged=%s); falling back to LCP", report.converged)
    fallback = solve_game_lcp(game)
    fallback.diagnostics["fallback_from"] = SolveMethod.BRD.value
    return fallback


# =============================================================================
# Structural Checks
# =============================================================================

def average_size_bound(game: GameSpec) -> float:
    """
    X at the average extended-neighborhood size.

    Raises:
        HeterogeneityError: players differ.
        UndefinedCriticalPointError: X is undefined at d_avg.
    """
    require_total_effort(game, "average_size_bound")
    player = game.require_homogeneous("average_size_bound")
    d_avg = float(game.graph.extended_sizes().mean())
    avg_points = critical_points(player.weighting, d_avg * player.ratio)
    if not avg_points.interior_exists:
        raise UndefinedCriticalPointError("X undefined at the average neighborhood size")
    return avg_points.x_upper


def phi_upper_bound(game: GameSpec) -> PhiBound:
    """
    Upper bounds on phi at any equilibrium.

    bound_sum is the mean of X_i and holds for any players. bound_avg is X at
    the average extended-neighborhood size; it is None when players differ.

    Raises:
        UndefinedCriticalPointError: some X_i (or X at d_avg) is undefined.
    """
    require_total_effort(game, "phi_upper_bound")
    targets = player_targets(game)
    if any(x is None for x in targets.x_upper):
        raise UndefinedCriticalPointError("phi bound needs X_i at every node")

    xs = np.array(targets.x_upper)
    d = np.array(targets.d, dtype=float)
    per_node = (1.0 - xs < 1.0 / d).tolist()
    return PhiBound(
        bound_sum=float(xs.mean()),
        bound_avg=average_size_bound(game) if game.is_homogeneous() else None,
        applicable=all(per_node),
        per_node_applicable=per_node,
    )


def secure_pne_exists(game: GameSpec) -> SecurePneReport:
    """Whether everyone investing 1 is an equilibrium, with the condition each node meets."""
    witness = []
    for i in game.graph.nodes:
        p = game.player(i)
        d = game.graph.extended_size(i)
        theta = d * p.ratio
        if p.weighting.is_linear:
            dominant = theta <= 1.0
            v = None
        else:
            cp = critical_points(p.weighting, theta)
            dominant = not cp.interior_exists
            v = cp.v
        if dominant:
            witness.append(SecureWitness.DOMINANT)
        elif v is not None and v >= 1.0 / d:
            witness.append(SecureWitness.V_AT_LEAST_INV_D)
        elif w_eval(p.weighting, 1.0 / d) > p.ratio:
            witness.append(SecureWitness.W_INV_D_EXCEEDS_COST)
        else:
            witness.append(SecureWitness.NONE)
    return SecurePneReport(exists=SecureWitness.NONE not in witness, witness=witness)


def neighborhood_monotonicity_check(game: GameSpec, profile: StrategyProfile) -> list[NestedPair]:
    """For every pair with N-bar(i) strictly inside N-bar(j), check s_i >= s_j."""
    game.require_homogeneous("neighborhood_monotonicity_check")
    s = profile.as_array()
    closed = {i: set(game.graph.closed_neighborhood(i)) for i in game.graph.nodes}
    pairs = [(i, j) for i in game.graph.nodes for j in game.graph.nodes if i != j]
    nested = fnc.filter(lambda pair: closed[pair[0]] < closed[pair[1]], pairs)
    return [NestedPair(i=i, j=j, ok=bool(s[i - 1] >= s[j - 1] - 1e-9)) for i, j in nested]
