"""
Critical Points - Scalar equations behind the equilibrium characterizations.

Solves w'(x) = theta for its two interior roots V < 1/e < X, the point z where
w'(z) = w(z)/z, and the crossing X-bar of two Prelec derivatives. Also checks
the large-neighborhood conditions (X - V > 1/d, V < 1/d, w(1/d) < c/L).
"""

import logging
import math
from functools import lru_cache
from typing import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import brentq

from src.services.errors import (
    BracketError,
    ConvergenceError,
    DomainError,
    NonFiniteError,
    ParameterError,
    UndefinedCriticalPointError,
    WeightingSpecError,
)
from src.services.weighting import INV_E, WeightingSpec, neg_log, w_eval, w_prime

logger = logging.getLogger(__name__)

EDGE = 1e-12
TANGENT_TOL = 1e-12
MAX_ITER = 200


# =============================================================================
# Models
# =============================================================================

class CriticalPoints(BaseModel):
    """Roots of w'(x) = theta around the minimizer of w'."""
    model_config = ConfigDict(frozen=True)

    x_min: float
    v: float | None = Field(None, description="Root below x_min")
    x_upper: float | None = Field(None, description="Root above x_min (X)")
    theta: float = Field(..., description="Target ratio d*c/L")
    interior_exists: bool
    tangent: bool = Field(False, description="theta equals w'(x_min)")


class ZPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    z: float
    w_prime_z: float


class AssumptionLargeNReport(BaseModel):
    """Large-neighborhood conditions for one extended-neighborhood size d."""
    d: int
    applicable: bool = Field(..., description="False when d*c/L <= w'(x_min), X undefined")
    holds: bool
    gap_xv: float | None = Field(None, description="X - V - 1/d")
    v_small: bool
    w_at_inv_d: float
    cond3: bool


# =============================================================================
# Root Finding
# =============================================================================

def solve_root_monotone(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-14,
    max_iter: int = MAX_ITER,
) -> float:
    """
    Find a root of f on [lo, hi] given a sign change at the endpoints.

    Brent's method first; plain bisection if Brent does not converge.

    Raises:
        BracketError: f(lo) and f(hi) share a sign.
        NonFiniteError: f returned NaN or infinity.
        ConvergenceError: bisection exhausted max_iter without meeting tol.
    """
    def checked(x: float) -> float:
        value = float(f(x))
        if not math.isfinite(value):
            raise NonFiniteError(f"non-finite function value {value} at x={x!r}")
        return value

    f_lo, f_hi = checked(lo), checked(hi)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise BracketError(f"no sign change on [{lo!r}, {hi!r}]: f={f_lo:.3e}, {f_hi:.3e}")

    root, info = brentq(checked, lo, hi, xtol=tol, maxiter=max_iter, full_output=True, disp=False)
    if info.converged:
        return float(root)

    logger.debug("brentq did not converge on [%r, %r]; bisecting", lo, hi)
    a, b, f_a = lo, hi, f_lo
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        f_mid = checked(mid)
        if f_mid == 0.0 or (b - a) < tol:
            return mid
        if (f_mid > 0) == (f_a > 0):
            a, f_a = mid, f_mid
        else:
            b = mid
    raise ConvergenceError(f"bisection did not reach tolerance {tol} in {max_iter} iterations")


# =============================================================================
# Critical Points
# =============================================================================

def _require_curved(spec: WeightingSpec, operation: str) -> None:
    if spec.is_linear:
        raise WeightingSpecError(f"{operation} requires a non-linear weighting; {spec.label()} has constant w'")


@lru_cache(maxsize=4096)
def _critical_points(spec: WeightingSpec, theta: float) -> CriticalPoints:
    w_min = spec.alpha
    tangent = abs(theta - w_min) <= TANGENT_TOL
    if theta <= w_min or tangent:
        return CriticalPoints(x_min=INV_E, theta=theta, interior_exists=False, tangent=tangent)

    def shifted(x: float) -> float:
        return w_prime(spec, x) - theta

    v = solve_root_monotone(shifted, EDGE, INV_E - EDGE)
    x_upper = solve_root_monotone(shifted, INV_E + EDGE, 1.0 - EDGE)
    return CriticalPoints(x_min=INV_E, v=v, x_upper=x_upper, theta=theta, interior_exists=True)


def critical_points(spec: WeightingSpec, theta: float) -> CriticalPoints:
    """
    Solve w'(x) = theta on both sides of x_min = 1/e.

    Args:
        spec: Prelec weighting with alpha in (0, 1).
        theta: Target ratio d*c/L (may be non-integer, e.g. d_avg*c/L).

    Returns:
        CriticalPoints; interior_exists is False when theta <= alpha, where
        investing 1 is the only best response.
    """
    _require_curved(spec, "critical_points")
    if not math.isfinite(theta) or theta <= 0:
        raise ParameterError(f"theta must be positive and finite, got {theta!r}")
    return _critical_points(spec, float(theta))


def upper_root(spec: WeightingSpec, theta: float) -> float:
    """X for theta, raising when it does not exist."""
    cp = critical_points(spec, theta)
    if not cp.interior_exists:
        raise UndefinedCriticalPointError(
            f"X undefined for {spec.label()} at theta={theta:g} (needs theta > {spec.alpha:g})"
        )
    return cp.x_upper


@lru_cache(maxsize=256)
def _solve_z(spec: WeightingSpec) -> ZPoint:
    def gap(x: float) -> float:
        return x * w_prime(spec, x) - w_eval(spec, x)

    z = solve_root_monotone(gap, INV_E + EDGE, 1.0 - 1e-9)
    return ZPoint(z=z, w_prime_z=w_prime(spec, z))


def solve_z(spec: WeightingSpec) -> ZPoint:
    """Unique z > 1/e with w'(z) = w(z)/z, and w'(z)."""
    _require_curved(spec, "solve_z")
    return _solve_z(spec)


# =============================================================================
# Derivative Crossing
# =============================================================================

def _check_order(alpha1: float, alpha2: float) -> None:
    if not (0 < alpha1 < alpha2 < 1):
        raise ParameterError(f"require 0 < alpha1 < alpha2 < 1, got alpha1={alpha1!r}, alpha2={alpha2!r}")


def g_eval(alpha1: float, alpha2: float, x):
    """g(x) = t^(a2-a1) * exp(t^a1 - t^a2) with t = -ln x; the ratio w'_2/w'_1 scaled by a1/a2."""
    _check_order(alpha1, alpha2)
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any((arr <= 0.0) | (arr >= 1.0)):
        raise DomainError(f"g requires x in (0, 1), got {x!r}")
    t = neg_log(arr)
    g = np.power(t, alpha2 - alpha1) * np.exp(np.power(t, alpha1) - np.power(t, alpha2))
    return float(g) if arr.ndim == 0 else g


@lru_cache(maxsize=256)
def solve_xbar(alpha1: float, alpha2: float) -> float:
    """Unique X-bar in (1/e, 1) where the derivatives of Prelec(alpha1) and Prelec(alpha2) cross."""
    _check_order(alpha1, alpha2)
    ratio = alpha1 / alpha2
    return solve_root_monotone(lambda x: g_eval(alpha1, alpha2, x) - ratio, INV_E + EDGE, 1.0 - EDGE)


# =============================================================================
# Assumption Checks
# =============================================================================

def check_assumption_largeN(spec: WeightingSpec, c: float, L: float, d: int) -> AssumptionLargeNReport:
    """
    Evaluate the three large-neighborhood conditions for size d.

    Args:
        spec: Player weighting.
        c: Cost per unit of investment.
        L: Loss on successful attack.
        d: Extended-neighborhood size (>= 1).

    Returns:
        AssumptionLargeNReport; applicable is False when X is undefined.
    """
    if d < 1 or c <= 0 or L <= 0:
        raise ParameterError(f"require d >= 1, c > 0, L > 0; got d={d}, c={c}, L={L}")
    cp = critical_points(spec, d * c / L)
    w_at_inv_d = w_eval(spec, 1.0 / d)
    cond3 = w_at_inv_d < c / L
    if not cp.interior_exists:
        return AssumptionLargeNReport(
            d=d, applicable=False, holds=False, v_small=False, w_at_inv_d=w_at_inv_d, cond3=cond3
        )
    gap_xv = cp.x_upper - cp.v - 1.0 / d
    v_small = cp.v < 1.0 / d
    return AssumptionLargeNReport(
        d=d,
        applicable=True,
        holds=gap_xv > 0 and v_small and cond3,
        gap_xv=gap_xv,
        v_small=v_small,
        w_at_inv_d=w_at_inv_d,
        cond3=cond3,
    )
