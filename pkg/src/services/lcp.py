"""
LCP - Total effort equilibria as a linear complementarity problem.

For active players (those with X_i defined) the equilibrium conditions are
LCP(q, M): z >= 0, q + M z >= 0, z'(q + M z) = 0 with

    q = [-T; 1],   M = [[A + I, I], [-I, 0]],   z = [s; mu]

where T_i = d_i (1 - X_i) less the investment of dominant neighbors, and
mu_i > 0 only where s_i = 1. Solved with Lemke's complementary pivoting,
covering vector of ones and a lexicographic ratio test.
"""

import logging
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from src.config import get_settings
from src.services.errors import IntegrityError, ParameterError
from src.services.models import EquilibriumReport, GameSpec, SolveMethod, StrategyProfile
from src.services.total_effort import build_report, player_targets, require_total_effort, verify_pne

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-11
CLAMP_TOL = 1e-7


# =============================================================================
# Models
# =============================================================================

class LcpStatus(str, Enum):
    SOLVED = "solved"
    RAY_TERMINATION = "ray_termination"
    ITER_LIMIT = "iter_limit"


class LcpInstance(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    n: int = Field(..., ge=0, description="Active player count; q has 2n entries")
    q: np.ndarray
    M: np.ndarray
    nodes: list[int] = Field(default_factory=list, description="Graph node behind each active row")
    fixed: dict[int, float] = Field(default_factory=dict, description="Dominant players removed from the system")


class LcpSolution(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    z: np.ndarray
    status: LcpStatus
    pivots: int
    complementarity: float = Field(..., description="|z'(q + M z)|")
    nodes: list[int] = Field(default_factory=list)
    fixed: dict[int, float] = Field(default_factory=dict)


class CopositivityReport(BaseModel):
    passed: bool
    min_quadform: float
    identity_ok: bool | None = Field(None, description="Block identity x'Mx = x1'Ax1 + x1'x1; None if M is not in block form")


class DualCheckReport(BaseModel):
    passed: bool
    min_value: float
    samples: int


# =============================================================================
# Instance Construction
# =============================================================================

def build_lcp(game: GameSpec, permutation: list[int] | None = None) -> LcpInstance:
    """
    Assemble q and M for the active players of a total effort game.

    Args:
        game: Total effort game.
        permutation: Optional order of the active nodes (1-based ids).

    Returns:
        LcpInstance over the active players.
    """
    require_total_effort(game, "build_lcp")
    targets = player_targets(game)
    fixed = {i: f for i, f in zip(game.graph.nodes, targets.fixed) if f is not None}
    nodes = [i for i in game.graph.nodes if i not in fixed]
    if permutation is not None:
        if sorted(permutation) != nodes:
            raise ParameterError("permutation must list every active node exactly once")
        nodes = list(permutation)

    m = len(nodes)
    adjacency = game.graph.adjacency_matrix()
    rows = [i - 1 for i in nodes]
    fixed_vec = np.zeros(game.n)
    for i, value in fixed.items():
        fixed_vec[i - 1] = value

    t = np.array([targets.targets[r] for r in rows]) - adjacency[rows] @ fixed_vec if m else np.zeros(0)
    block = adjacency[np.ix_(rows, rows)] + np.eye(m)
    M = np.block([[block, np.eye(m)], [-np.eye(m), np.zeros((m, m))]])
    q = np.concatenate([-t, np.ones(m)])
    return LcpInstance(n=m, q=q, M=M, nodes=nodes, fixed=fixed)


def dump_instance(inst: LcpInstance) -> str:
    """Plain-text dump: n, then the 2n entries of q, then the 2n rows of M."""
    lines = [str(inst.n)]
    lines += [f"{v:.17g}" for v in inst.q]
    lines += [" ".join(f"{v:.17g}" for v in row) for row in inst.M]
    return "\n".join(lines) + "\n"


def load_instance(text: str) -> LcpInstance:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    try:
        n = int(lines[0])
        size = 2 * n
        q = np.array([float(v) for v in lines[1:1 + size]])
        M = np.array([[float(v) for v in row.split()] for row in lines[1 + size:1 + 2 * size]])
    except (IndexError, ValueError) as exc:
        raise ParameterError(f"malformed LCP dump: {exc}") from None
    if q.shape != (size,) or M.shape != (size, size):
        raise ParameterError(f"LCP dump shapes q{q.shape}, M{M.shape} do not match n={n}")
    return LcpInstance(n=n, q=q, M=M, nodes=list(range(1, n + 1)))


# =============================================================================
# Lemke's Method
# =============================================================================

def _lexico_min_row(tableau: np.ndarray, col: int, size: int, basis: list[int], z0: int) -> int | None:
    rhs = tableau.shape[1] - 1
    candidates = np.flatnonzero(tableau[:, col] > PIVOT_TOL)
    if candidates.size == 0:
        return None

    # rhs first, then the columns of the initial identity, each scaled by the pivot entry
    for key in [rhs, *range(size)]:
        ratios = tableau[candidates, key] / tableau[candidates, col]
        best = ratios.min()
        candidates = candidates[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
        if key == rhs:
            z0_rows = [r for r in candidates if basis[r] == z0]
            if z0_rows:
                return z0_rows[0]
        if candidates.size == 1:
            break
    return int(candidates[0])


def _pivot(tableau: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    factors = tableau[:, col].copy()
    factors[row] = 0.0
    tableau -= np.outer(factors, tableau[row])


def lemke_solve(inst: LcpInstance, max_pivots: int | None = None) -> LcpSolution:
    """
    Lemke's complementary pivoting method.

    Tableau columns are [w (2n) | z (2n) | z0 | rhs] over [I, -M, -e, q].

    Args:
        inst: LCP instance.
        max_pivots: Pivot cap (Settings.lemke_pivot_factor * n by default).

    Returns:
        LcpSolution; ray termination and the pivot cap are reported statuses.
    """
    size = inst.q.size
    if max_pivots is None:
        max_pivots = get_settings().lemke_pivot_factor * max(inst.n, 1)

    def finish(z: np.ndarray, status: LcpStatus, pivots: int) -> LcpSolution:
        slack = inst.q + inst.M @ z
        sol = LcpSolution(
            z=z,
            status=status,
            pivots=pivots,
            complementarity=float(abs(z @ slack)),
            nodes=list(inst.nodes),
            fixed=dict(inst.fixed),
        )
        if status != LcpStatus.SOLVED:
            logger.warning("Lemke terminated with %s after %d pivots", status.value, pivots)
        return sol

    if size == 0 or np.all(inst.q >= 0):
        return finish(np.zeros(size), LcpStatus.SOLVED, 0)

    z0 = 2 * size
    tableau = np.hstack([np.eye(size), -inst.M, -np.ones((size, 1)), inst.q.reshape(-1, 1)]).astype(float)
    basis = list(range(size))

    q_min = inst.q.min()
    row = int(np.flatnonzero(inst.q == q_min)[-1])
    _pivot(tableau, row, z0)
    leaving, basis[row] = basis[row], z0
    pivots = 1
    status = LcpStatus.ITER_LIMIT

    while pivots < max_pivots:
        entering = leaving + size if leaving < size else leaving - size
        row = _lexico_min_row(tableau, entering, size, basis, z0)
        if row is None:
            status = LcpStatus.RAY_TERMINATION
            break
        _pivot(tableau, row, entering)
        leaving, basis[row] = basis[row], entering
        pivots += 1
        if leaving == z0:
            status = LcpStatus.SOLVED
            break

    z = np.zeros(size)
    for r, var in enumerate(basis):
        if size <= var < 2 * size:
            z[var - size] = tableau[r, -1]
    return finish(z, status, pivots)


# =============================================================================
# Structure Checks
# =============================================================================

def check_copositive(M: np.ndarray, trials: int = 10000, seed: int = 0) -> CopositivityReport:
    """
    Randomized copositivity check: x'Mx >= -1e-10 on sampled unit x >= 0.

    The coordinate vectors are always included.
    """
    M = np.asarray(M, dtype=float)
    size = M.shape[0]
    rng = np.random.default_rng(seed)
    samples = np.vstack([np.eye(size), rng.random((trials, size))])
    samples /= np.linalg.norm(samples, axis=1, keepdims=True)
    quad = np.einsum("ij,jk,ik->i", samples, M, samples)
    min_quadform = float(quad.min())

    identity_ok = None
    half = size // 2
    if size % 2 == 0 and half > 0:
        top_right, bottom_left, bottom_right = M[:half, half:], M[half:, :half], M[half:, half:]
        if np.allclose(top_right, np.eye(half)) and np.allclose(bottom_left, -np.eye(half)) and not bottom_right.any():
            x1 = samples[:, :half]
            adjacency = M[:half, :half] - np.eye(half)
            expected = np.einsum("ij,jk,ik->i", x1, adjacency, x1) + np.einsum("ij,ij->i", x1, x1)
            identity_ok = bool(np.allclose(quad, expected, atol=1e-12))

    return CopositivityReport(passed=min_quadform >= -1e-10, min_quadform=min_quadform, identity_ok=identity_ok)


def check_sol_dual(inst: LcpInstance, samples: int = 1000, seed: int = 0) -> DualCheckReport:
    """
    Check q'y >= 0 over sampled solutions y of LCP(0, M).

    For the block M, y >= 0 with My >= 0 forces the investment half to zero,
    so the solutions are y = (0, y2) with y2 >= 0.
    """
    n = inst.n
    rng = np.random.default_rng(seed)
    y = np.hstack([np.zeros((samples, n)), rng.random((samples, n))])
    my = y @ inst.M.T
    valid = np.all(my >= -1e-10, axis=1) & (np.abs(np.einsum("ij,ij->i", y, my)) < 1e-10)
    values = y[valid] @ inst.q
    min_value = float(values.min()) if values.size else 0.0
    return DualCheckReport(passed=bool(valid.all()) and min_value >= -1e-10, min_value=min_value, samples=samples)


# =============================================================================
# Game Pipeline
# =============================================================================

def extract_profile(sol: LcpSolution, game: GameSpec) -> StrategyProfile:
    """
    Investments from a solved LCP, dominant players restored.

    Raises:
        IntegrityError: a component needed a clamp larger than 1e-7.
    """
    if sol.status != LcpStatus.SOLVED:
        raise ParameterError(f"cannot extract a profile from a {sol.status.value} solution")
    s = np.zeros(game.n)
    for i, value in sol.fixed.items():
        s[i - 1] = value
    investments = sol.z[:len(sol.nodes)]
    clamped = np.clip(investments, 0.0, 1.0)
    excess = float(np.max(np.abs(clamped - investments))) if investments.size else 0.0
    if excess > CLAMP_TOL:
        raise IntegrityError(f"LCP investments leave [0, 1] by {excess:.3e}")
    for node, value in zip(sol.nodes, clamped):
        s[node - 1] = value
    return StrategyProfile.from_array(s)


def solve_game_lcp(game: GameSpec, max_pivots: int | None = None) -> EquilibriumReport:
    """Build, solve and verify the total effort LCP."""
    inst = build_lcp(game)
    sol = lemke_solve(inst, max_pivots=max_pivots)
    diagnostics = {"lcp_status": sol.status.value, "complementarity": sol.complementarity}
    if sol.status == LcpStatus.SOLVED:
        s = extract_profile(sol, game).as_array()
    else:
        s = np.zeros(game.n)
        for i, value in sol.fixed.items():
            s[i - 1] = value
        for node, value in zip(sol.nodes, sol.z[:len(sol.nodes)]):
            s[node - 1] = min(1.0, max(0.0, value))
    return build_report(
        game,
        s,
        SolveMethod.LCP,
        iterations=sol.pivots,
        converged=sol.status == LcpStatus.SOLVED,
        diagnostics=diagnostics,
    )


def enumerate_lcp_equilibria(game: GameSpec, restarts: int = 20, seed: int = 0) -> list[StrategyProfile]:
    """
    Distinct verified equilibria found by re-solving under random player orders.

    The list is whatever the restarts reach; it is not claimed complete.
    """
    rng = np.random.default_rng(seed)
    base = build_lcp(game).nodes
    found: dict[tuple, StrategyProfile] = {}
    for attempt in range(restarts + 1):
        order = base if attempt == 0 else [int(v) for v in rng.permutation(base)]
        sol = lemke_solve(build_lcp(game, permutation=order))
        if sol.status != LcpStatus.SOLVED:
            continue
        profile = extract_profile(sol, game)
        if not verify_pne(game, profile).is_pne:
            continue
        key = tuple(np.round(profile.as_array(), 6))
        found.setdefault(key, profile)
    return [found[k] for k in sorted(found)]
