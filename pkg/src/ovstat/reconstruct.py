"""Recovering the parent distribution from a regression curve.

Each route inverts one of the closed-form regressions of
:mod:`ovstat.regression`:

* minimum/maximum of the extended sample given the same extreme of the
  original sample: the derivative of the curve is a power of the parent tail
  (or cdf), so the cdf follows by taking a root of the slope;
* same-index adjacent extension, written as x minus a positive gap h(x): the
  cdf is an explicit functional of h involving one tail integral;
* conditioning on a single draw: the slope of the curve equals the rank
  kernel C(n-1, j-1) F^(j-1) (1-F)^(n-j), inverted pointwise along the
  monotone branch;
* identity regression of the shrunk-sample os on the mid-sample os: the
  parent is pinned down through an explicit quantile density.

Derivatives of tabulated curves default to three-point central differences;
callers may pass exact derivatives when they have them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .combinatorics import binom
from .curve import Curve

__all__ = [
    "ReconstructionError",
    "ReconstructionResult",
    "from_min_regression",
    "from_max_regression",
    "from_adjacent_regression",
    "from_single_regression_slope",
    "midsample_mixing_weight",
    "midsample_quantile_density",
    "quantile_from_linear_regression",
]

_SLACK = 1e-9


class ReconstructionError(ValueError):
    """The supplied curve cannot be a regression of the assumed kind."""


@dataclass(frozen=True)
class ReconstructionResult:
    """A reconstructed cdf tabulated on the input grid, plus diagnostics."""

    cdf: Curve
    gauge: str
    diagnostics: dict

    def max_abs_error_against(self, reference: Callable[[np.ndarray], np.ndarray]) -> float:
        ref = np.asarray(reference(self.cdf.grid), dtype=float)
        return float(np.max(np.abs(self.cdf.values - ref)))


def _derivative(curve: Curve, derivative) -> np.ndarray:
    if derivative is None:
        return curve.derivative()
    d = np.asarray(derivative, dtype=float)
    if d.shape != curve.grid.shape:
        raise ValueError("derivative must match the curve grid")
    return d


def _finish(grid, f, gauge: str, extra: dict | None = None) -> ReconstructionResult:
    f = np.clip(f, 0.0, 1.0)
    diagnostics = {
        "monotone": bool(np.all(np.diff(f) >= -_SLACK)),
        "min_value": float(f.min()),
        "max_value": float(f.max()),
    }
    if extra:
        diagnostics.update(extra)
    return ReconstructionResult(
        cdf=Curve(grid=grid, values=f, meaning="reconstructed cdf"),
        gauge=gauge,
        diagnostics=diagnostics,
    )


def from_min_regression(
    curve: Curve, n: int, m: int, derivative=None
) -> ReconstructionResult:
    """Parent cdf from g(x) = E(min of n draws | min of first m draws = x).

    The slope satisfies g' = (1 - F)^(n-m), so F = 1 - g'**(1/(n-m)).  The
    slope must take values in (0, 1] and decrease along the grid.
    """
    if not 1 <= m < n:
        raise ValueError("need 1 <= m < n")
    gp = _derivative(curve, derivative)
    if np.any(gp <= 0.0) or np.any(gp > 1.0 + _SLACK):
        raise ReconstructionError("slope of a min-regression must lie in (0, 1]")
    if np.any(np.diff(gp) > _SLACK):
        raise ReconstructionError("slope of a min-regression must be decreasing")
    if np.all(gp >= 1.0 - _SLACK):
        raise ReconstructionError("slope identically 1 corresponds to a degenerate cdf")
    f = 1.0 - np.minimum(gp, 1.0) ** (1.0 / (n - m))
    return _finish(curve.grid, f, gauge="none", extra={"slope_range": (float(gp.min()), float(gp.max()))})


def from_max_regression(
    curve: Curve, n: int, m: int, derivative=None
) -> ReconstructionResult:
    """Parent cdf from g(x) = E(max of n draws | max of first m draws = x).

    Mirror of :func:`from_min_regression`: F = g'**(1/(n-m)) with the slope
    increasing from 0 to 1.
    """
    if not 1 <= m < n:
        raise ValueError("need 1 <= m < n")
    gp = _derivative(curve, derivative)
    if np.any(gp <= 0.0) or np.any(gp > 1.0 + _SLACK):
        raise ReconstructionError("slope of a max-regression must lie in (0, 1]")
    if np.any(np.diff(gp) < -_SLACK):
        raise ReconstructionError("slope of a max-regression must be increasing")
    if np.all(gp >= 1.0 - _SLACK):
        raise ReconstructionError("slope identically 1 corresponds to a degenerate cdf")
    f = np.minimum(gp, 1.0) ** (1.0 / (n - m))
    return _finish(curve.grid, f, gauge="none", extra={"slope_range": (float(gp.min()), float(gp.max()))})


def from_adjacent_regression(
    h: Curve | Callable[[float], float],
    i: int,
    upper: float,
    grid=None,
) -> ReconstructionResult:
    """Parent cdf from E(i-th os after one extra draw | i-th os = x) = x - h(x).

    Needs i >= 2 and the gap h positive up to the upper support endpoint
    ``upper`` (may be +inf).  The cdf is

        F(x) = h(x)^(-1/(i-1)) / [ h(upper-)^(-1/(i-1))
                                   + (1/(i-1)) * int_x^upper h^(-i/(i-1)) ]

    with the first denominator term dropped when h diverges at the endpoint.
    """
    if i < 2:
        raise ValueError("the adjacent-gap route needs i >= 2")
    if isinstance(h, Curve):
        if grid is None:
            grid = h.grid
        if np.any(h.values <= 0.0):
            raise ReconstructionError("gap curve must be positive")
        h_fn = PchipInterpolator(h.grid, h.values, extrapolate=True)
    else:
        if grid is None:
            raise ValueError("grid required when the gap is given as a callable")
        h_fn = h
    grid = np.asarray(grid, dtype=float)
    e1 = 1.0 / (i - 1)
    e2 = i / (i - 1)

    if math.isinf(upper):
        recip_end = 0.0  # the gap integral h(b-) = int F^i diverges on an unbounded side
    else:
        try:
            h_end = float(h_fn(upper))
        except Exception:
            h_end = math.inf
        recip_end = 0.0 if not math.isfinite(h_end) or h_end <= 0 else h_end ** (-e1)

    def integrand(t: float) -> float:
        v = float(h_fn(t))
        if v <= 0.0:
            raise ReconstructionError("gap curve must be positive below the upper endpoint")
        return v ** (-e2)

    f = np.empty_like(grid)
    with warnings.catch_warnings():
        # divergence shows up as non-finite or runaway values, checked below
        warnings.simplefilter("ignore", IntegrationWarning)
        tail, _ = quad(integrand, grid[-1], upper, limit=400)
        if not math.isfinite(tail):
            raise ReconstructionError("tail integral of the gap curve diverges")
        for pos in range(len(grid) - 1, -1, -1):
            x = grid[pos]
            if pos < len(grid) - 1:
                piece, _ = quad(integrand, x, grid[pos + 1], limit=400)
                tail += piece
            hv = float(h_fn(x))
            if hv <= 0.0:
                raise ReconstructionError("gap curve must be positive")
            f[pos] = hv ** (-e1) / (recip_end + e1 * tail)
    if not np.all(np.isfinite(f)):
        raise ReconstructionError("reconstruction produced non-finite cdf values")
    return _finish(grid, f, gauge="none", extra={"upper_gap_reciprocal": recip_end})


def from_single_regression_slope(slope: Curve, j: int, n: int) -> ReconstructionResult:
    """Parent cdf from the slope of h(x) = E(j-th os of n draws | one draw = x).

    The slope equals C(n-1, j-1) F^(j-1) (1-F)^(n-j).  For 1 < j < n the
    kernel is unimodal in F, so the pointwise inversion picks the rising
    branch up to the slope maximum and the falling branch afterwards; the
    result must come out nondecreasing or the input is rejected.
    """
    if not 1 <= j <= n or n < 2:
        raise ValueError("need n >= 2 and 1 <= j <= n")
    hp = slope.values.astype(float)
    if np.any(hp <= 0.0):
        raise ReconstructionError("slope of the regression must be positive on the support")
    coeff = binom(n - 1, j - 1)
    if j == 1:
        f = 1.0 - (np.minimum(hp / coeff, 1.0)) ** (1.0 / (n - 1))
        return _finish(slope.grid, f, gauge="none")
    if j == n:
        f = (np.minimum(hp / coeff, 1.0)) ** (1.0 / (n - 1))
        return _finish(slope.grid, f, gauge="none")

    tstar = (j - 1) / (n - 1)
    kmax = coeff * tstar ** (j - 1) * (1.0 - tstar) ** (n - j)
    if np.any(hp > kmax * (1.0 + 1e-9)):
        raise ReconstructionError("slope exceeds the maximum of the rank kernel")
    hp = np.minimum(hp, kmax)

    def kern(t: float) -> float:
        return coeff * t ** (j - 1) * (1.0 - t) ** (n - j)

    peak = int(np.argmax(hp))
    f = np.empty_like(hp)
    for pos, target in enumerate(hp):
        lo, hi = (0.0, tstar) if pos <= peak else (tstar, 1.0)
        f[pos] = brentq(lambda t: kern(t) - target, lo, hi, xtol=1e-13)
    if np.any(np.diff(f) < -_SLACK):
        raise ReconstructionError("no monotone branch matches the supplied slope")
    return _finish(
        slope.grid,
        np.maximum.accumulate(f),
        gauge="none",
        extra={"branch_switch_index": peak, "kernel_max": float(kmax)},
    )


def midsample_mixing_weight(j: int, n: int) -> float:
    """Mixing weight attached to the upper neighbour in the identity regression."""
    if not 2 <= j <= n - 1:
        raise ValueError("need 2 <= j <= n-1")
    return j * (j - 1) / ((n - j + 1) * (n - j) + j * (j - 1))


def midsample_quantile_density(j: int, n: int) -> Callable:
    """Quantile density (up to scale) characterised by the identity regression
    E(X_{j-1:n-2} | X_{j:n}) = X_{j:n}.

    Returns q(u) = (j-1 + (n-2j+1) u) / (u^(1+(j-1)L) (1-u)^(1+(n-j)(1-L)))
    with L = j(j-1) / ((n-j+1)(n-j) + j(j-1)).
    """
    lam = midsample_mixing_weight(j, n)
    e_left = 1.0 + (j - 1) * lam
    e_right = 1.0 + (n - j) * (1.0 - lam)
    lin0 = float(j - 1)
    lin1 = float(n - 2 * j + 1)

    def q(u):
        ua = np.asarray(u, dtype=float)
        out = (lin0 + lin1 * ua) * ua ** (-e_left) * (1.0 - ua) ** (-e_right)
        return float(out) if np.ndim(u) == 0 else out

    return q


def quantile_from_linear_regression(lam: float, a: float, c: float):
    """Quantile function (and its density) solving the linear single-draw
    regression E(X | X_{j:n}) = a' X_{j:n} in mean-residual form.

    Q(y) = c y^(lam/a - 1) (1-y)^((1-lam)/a - 1) (lam - y) on (0, 1).
    Returns the pair (Q, Q'); the sign of c fixes which member is increasing.
    """
    if a <= 0:
        raise ValueError("the slope parameter must be > 0")
    p = lam / a - 1.0
    s = (1.0 - lam) / a - 1.0

    def quantile(y):
        ya = np.asarray(y, dtype=float)
        out = c * ya**p * (1.0 - ya) ** s * (lam - ya)
        return float(out) if np.ndim(y) == 0 else out

    def quantile_density(y):
        ya = np.asarray(y, dtype=float)
        bracket = (lam - ya) ** 2 / a - (lam - 2.0 * lam * ya + ya**2)
        out = c * ya ** (p - 1.0) * (1.0 - ya) ** (s - 1.0) * bracket
        return float(out) if np.ndim(y) == 0 else out

    return quantile, quantile_density
