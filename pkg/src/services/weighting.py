"""
Weighting - Behavioral probability weighting functions.

Evaluates the Prelec weighting w(x) = exp(-(-ln x)^alpha) and the identity
weighting w(x) = x, their first two derivatives, and the shape checks the
equilibrium characterizations depend on. All functions accept a scalar or a
numpy array and return the same kind.
"""

import math
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.optimize import brentq

from src.services.errors import DomainError, WeightingSpecError

INV_E = 1.0 / math.e


# =============================================================================
# Models
# =============================================================================

class WeightingKind(str, Enum):
    PRELEC = "prelec"
    IDENTITY = "identity"


class WeightingSpec(BaseModel):
    """An immutable probability weighting function."""
    model_config = ConfigDict(frozen=True)

    kind: WeightingKind = Field(..., description="Weighting family")
    alpha: float = Field(1.0, gt=0, le=1, description="Prelec curvature parameter")

    @classmethod
    def prelec(cls, alpha: float) -> "WeightingSpec":
        if not isinstance(alpha, (int, float)) or not math.isfinite(alpha) or not 0 < alpha <= 1:
            raise WeightingSpecError(f"Prelec alpha must lie in (0, 1], got {alpha!r}")
        return cls(kind=WeightingKind.PRELEC, alpha=float(alpha))

    @classmethod
    def identity(cls) -> "WeightingSpec":
        return cls(kind=WeightingKind.IDENTITY, alpha=1.0)

    @property
    def is_linear(self) -> bool:
        """True when w(x) = x (identity, or Prelec with alpha = 1)."""
        return self.kind == WeightingKind.IDENTITY or self.alpha == 1.0

    def label(self) -> str:
        if self.kind == WeightingKind.IDENTITY:
            return "identity"
        return f"prelec(alpha={self.alpha:g})"


class ShapeReport(BaseModel):
    """Grid diagnostics of the shape assumptions on w."""
    x_min: float | None = Field(None, description="Minimizer of w' (None when w' is constant)")
    w_prime_min: float
    unique_min: bool
    concave_convex_split: bool
    endpoint_blowup: bool
    ratio_bound: bool = Field(..., description="w''/w' < 1/(1-x) on (x_min, 1)")
    convex_derivative: bool = Field(..., description="w' convex on (x_min, 1)")


# =============================================================================
# Evaluation
# =============================================================================

def _coerce(x, open_interval: bool) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"probability must be finite, got {x!r}")
    if open_interval:
        if np.any((arr <= 0.0) | (arr >= 1.0)):
            raise DomainError(f"derivative requires x in (0, 1), got {x!r}")
    elif np.any((arr < 0.0) | (arr > 1.0)):
        raise DomainError(f"probability must lie in [0, 1], got {x!r}")
    return arr, arr.ndim == 0


def neg_log(arr: np.ndarray) -> np.ndarray:
    # log1p keeps full precision for x close to 1
    with np.errstate(divide="ignore"):
        return np.where(arr >= 0.5, -np.log1p(arr - 1.0), -np.log(arr))


def _out(arr: np.ndarray, scalar: bool):
    return float(arr) if scalar else arr


def w_eval(spec: WeightingSpec, x):
    """Perceived probability w(x), with w(0)=0 and w(1)=1 by continuity."""
    arr, scalar = _coerce(x, open_interval=False)
    if spec.kind == WeightingKind.IDENTITY:
        return _out(arr.copy(), scalar)
    t = neg_log(arr)
    return _out(np.exp(-np.power(t, spec.alpha)), scalar)


def w_prime(spec: WeightingSpec, x):
    """First derivative w'(x) = w(x) * alpha * t^(alpha-1) / x with t = -ln x."""
    arr, scalar = _coerce(x, open_interval=True)
    if spec.kind == WeightingKind.IDENTITY:
        return _out(np.ones_like(arr), scalar)
    a = spec.alpha
    t = neg_log(arr)
    w = np.exp(-np.power(t, a))
    return _out(w * a * np.power(t, a - 1.0) / arr, scalar)


def w_second(spec: WeightingSpec, x):
    """Second derivative w''(x) = w'(x) / (x t) * [1 - t + alpha (t^alpha - 1)]."""
    arr, scalar = _coerce(x, open_interval=True)
    if spec.kind == WeightingKind.IDENTITY:
        return _out(np.zeros_like(arr), scalar)
    a = spec.alpha
    t = neg_log(arr)
    w = np.exp(-np.power(t, a))
    wp = w * a * np.power(t, a - 1.0) / arr
    bracket = 1.0 - t + a * (np.power(t, a) - 1.0)
    return _out(wp / (arr * t) * bracket, scalar)


# =============================================================================
# Shape Checks
# =============================================================================

def _single_crossing(values: np.ndarray, tol: float) -> int | None:
    """Index i where values change from negative to positive between i and i+1, if that is the only change."""
    signs = np.where(values > tol, 1, np.where(values < -tol, -1, 0))
    nonzero = np.flatnonzero(signs)
    if nonzero.size == 0:
        return None
    s = signs[nonzero]
    changes = np.flatnonzero(np.diff(s) != 0)
    if changes.size != 1 or s[0] != -1 or s[-1] != 1:
        return None
    return int(nonzero[changes[0]])


def check_shape(spec: WeightingSpec, grid_size: int = 1000) -> ShapeReport:
    """
    Sample w' and w'' on a uniform interior grid and report the shape flags.

    Args:
        spec: Weighting to inspect.
        grid_size: Number of interior grid points (at least 100).

    Returns:
        ShapeReport; failed checks are reported as False flags.
    """
    if grid_size < 100:
        raise DomainError(f"grid_size must be at least 100, got {grid_size}")

    xs = np.linspace(0.0, 1.0, grid_size + 2)[1:-1]
    wp = w_prime(spec, xs)
    wpp = w_second(spec, xs)
    scale = max(1.0, float(np.max(np.abs(wp))))

    split_at = _single_crossing(wpp, tol=1e-14 * scale)
    diffs = np.diff(wp)
    min_idx = int(np.argmin(wp))
    unique_min = (
        0 < min_idx < xs.size - 1
        and bool(np.all(diffs[:min_idx] < 0))
        and bool(np.all(diffs[min_idx:] > 0))
    )

    if split_at is not None:
        lo, hi = xs[split_at], xs[split_at + 1]
        x_min = brentq(lambda v: w_second(spec, v), lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
        w_prime_min = w_prime(spec, x_min)
    elif unique_min:
        x_min = float(xs[min_idx])
        w_prime_min = float(wp[min_idx])
    else:
        x_min = None
        w_prime_min = float(np.min(wp))

    eps = 1e-12
    endpoint_blowup = bool(w_prime(spec, eps) > wp[0] and w_prime(spec, 1.0 - eps) > wp[-1])

    if x_min is None:
        ratio_bound = convex_derivative = False
    else:
        upper = xs > x_min
        ratio_bound = bool(np.all(wpp[upper] / wp[upper] < 1.0 / (1.0 - xs[upper])))
        tail = wp[upper]
        second_diff = tail[2:] - 2.0 * tail[1:-1] + tail[:-2]
        convex_derivative = bool(tail.size >= 3 and np.all(second_diff >= -1e-12 * np.maximum(1.0, tail[1:-1])))

    return ShapeReport(
        x_min=x_min,
        w_prime_min=w_prime_min,
        unique_min=unique_min,
        concave_convex_split=split_at is not None,
        endpoint_blowup=endpoint_blowup,
        ratio_bound=ratio_bound,
        convex_derivative=convex_derivative,
    )
