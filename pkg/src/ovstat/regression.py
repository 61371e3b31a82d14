"""Conditional expectations between order statistics of overlapping samples.

The two regression curves

    E(first os | second os = y)  and  E(second os | first os = x)

are finite mixtures of single-sample conditional means E(X_{k:N} | X_{l:N}),
weighted by the exact rank-pair probabilities and by cdf-dependent factors.
The single-sample conditional means reduce to integrals of the parent
quantile function against polynomial kernels (the conditional law of one os
given another is that of an os from a truncated parent), so everything is
evaluated with one scalar quadrature engine in quantile coordinates.

Specialised closed forms for the smallest genuinely overlapping geometry
(offset 1, both samples of size 2) and for extension-sample regressions
(minimum, maximum, same-index adjacent, and conditioning on a single draw)
are implemented independently of the general mixture; agreement of the two
paths is part of the verification suite.
"""

from __future__ import annotations

import functools
import warnings
from typing import Callable

from scipy.integrate import IntegrationWarning, quad

from .combinatorics import binom
from .curve import Curve, tabulate
from .overlap import OverlapSpec
from . import overlap as _overlap
from .parent import ParentModel

__all__ = [
    "conditional_os_mean",
    "mean_original_given_extended",
    "mean_extended_given_original",
    "pair_regression_r1",
    "PAIR_REGRESSIONS_R1",
    "mean_min_extended",
    "mean_max_extended",
    "mean_adjacent",
    "mean_given_single",
    "tabulate_regression",
]

_QUAD_OPTS = dict(epsabs=1e-11, epsrel=1e-11, limit=400)


def _quiet_quad(fn, lo, hi):
    # the requested tolerance sits near quad's roundoff estimate for tail
    # integrands; the achieved accuracy is pinned by the closed-form tests
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(fn, lo, hi, **_QUAD_OPTS)
    return val


@functools.lru_cache(maxsize=512)
def _table(spec: OverlapSpec):
    return _overlap.probability_table(spec)


def _quad_q(model: ParentModel, weight: Callable[[float], float], lo: float, hi: float) -> float:
    """Integral of Q(u) * weight(u) over (lo, hi) in quantile coordinates."""
    if hi <= lo:
        return 0.0
    return _quiet_quad(lambda u: float(model.quantile(u)) * weight(u), lo, hi)


def _check_mean(model: ParentModel) -> None:
    if not model.finite_mean:
        warnings.warn(
            f"parent {model.name!r} appears to have an infinite absolute mean; "
            "regression integrals may diverge",
            RuntimeWarning,
            stacklevel=3,
        )


def conditional_os_mean(model: ParentModel, k: int, ell: int, N: int, y: float) -> float:
    """E(X_{k:N} | X_{ell:N} = y) for a single pooled sample of size N.

    Given X_{ell:N} = y, the lower os's are os's of ell-1 draws from the
    parent truncated above y and the upper ones are os's of N-ell draws from
    the parent truncated below y; either way the mean is a beta-weighted
    integral of the quantile function over the matching quantile range.
    """
    if not (1 <= k <= N and 1 <= ell <= N):
        raise ValueError("order-statistic indices must lie in 1..N")
    if k == ell:
        return float(y)
    w = float(model.cdf(y))
    if k < ell:
        a_idx, size = k, ell - 1  # k-th of ell-1 draws below y
        coeff = a_idx * binom(size, a_idx)
        return _quiet_quad(
            lambda z: float(model.quantile(w * z))
            * coeff
            * z ** (a_idx - 1)
            * (1.0 - z) ** (size - a_idx),
            0.0,
            1.0,
        )
    a_idx, size = k - ell, N - ell  # (k-ell)-th of N-ell draws above y
    coeff = a_idx * binom(size, a_idx)
    return _quiet_quad(
        lambda z: float(model.quantile(w + (1.0 - w) * z))
        * coeff
        * z ** (a_idx - 1)
        * (1.0 - z) ** (size - a_idx),
        0.0,
        1.0,
    )


def mean_original_given_extended(spec: OverlapSpec, model: ParentModel, y: float) -> float:
    """E(first os | second os = y): the full rank-mixture representation."""
    _check_mean(model)
    N = spec.pooled_size
    F = float(model.cdf(y))
    Fb = 1.0 - F
    j, n = spec.j, spec.n
    total = 0.0
    for ell in spec.ell_support:
        wf = (ell * binom(N, ell)) / (j * binom(n, j)) * F ** (ell - j) * Fb ** (j + spec.r - ell)
        if wf == 0.0:
            continue
        for k in spec.k_support:
            p = float(_table(spec)[(k, ell)])
            if p == 0.0:
                continue
            total += p * wf * conditional_os_mean(model, k, ell, N, y)
    return total


def mean_extended_given_original(spec: OverlapSpec, model: ParentModel, x: float) -> float:
    """E(second os | first os = x): the dual rank-mixture representation."""
    _check_mean(model)
    N = spec.pooled_size
    F = float(model.cdf(x))
    Fb = 1.0 - F
    i, m = spec.i, spec.m
    total = 0.0
    for k in spec.k_support:
        wf = (k * binom(N, k)) / (i * binom(m, i)) * F ** (k - i) * Fb ** (N - m - k + i)
        if wf == 0.0:
            continue
        for ell in spec.ell_support:
            p = float(_table(spec)[(k, ell)])
            if p == 0.0:
                continue
            total += p * wf * conditional_os_mean(model, ell, k, N, x)
    return total


# ---------------------------------------------------------------------------
# closed forms for offset 1, both samples of size 2
# ---------------------------------------------------------------------------

PAIR_REGRESSIONS_R1 = (
    "max_given_max",
    "min_given_min",
    "min_given_max",
    "max_given_min",
)


def pair_regression_r1(which: str, model: ParentModel, y: float) -> float:
    """Closed-form regressions for samples {X1, X2} and {X2, X3}.

    ``which`` picks the conditioned/conditioning os pair:
    ``max_given_max`` is E(max of first pair | max of second pair = y), and so
    on.  Only interior y is valid: the min/max forms divide by F(y) or 1-F(y).
    """
    _check_mean(model)
    w = float(model.cdf(y))
    if which == "max_given_max":
        if w <= 0.0:
            raise ValueError("conditioning maximum at the lower support endpoint")
        upper = _quad_q(model, lambda u: 1.0, w, 1.0)
        lower_u = _quad_q(model, lambda u: u, 0.0, w)
        return 0.5 * y * w + upper + lower_u / w
    if which == "min_given_min":
        if w >= 1.0:
            raise ValueError("conditioning minimum at the upper support endpoint")
        lower = _quad_q(model, lambda u: 1.0, 0.0, w)
        upper_b = _quad_q(model, lambda u: 1.0 - u, w, 1.0)
        return 0.5 * y * (1.0 - w) + lower + upper_b / (1.0 - w)
    if which == "min_given_max":
        if w <= 0.0:
            raise ValueError("conditioning maximum at the lower support endpoint")
        lower = _quad_q(model, lambda u: 1.0, 0.0, w)
        lower_u = _quad_q(model, lambda u: u, 0.0, w)
        return 0.5 * y * (1.0 - w) + lower / (2.0 * w) + lower - lower_u / w
    if which == "max_given_min":
        if w >= 1.0:
            raise ValueError("conditioning minimum at the upper support endpoint")
        upper = _quad_q(model, lambda u: 1.0, w, 1.0)
        upper_b = _quad_q(model, lambda u: 1.0 - u, w, 1.0)
        return 0.5 * y * w + upper / (2.0 * (1.0 - w)) + upper - upper_b / (1.0 - w)
    raise ValueError(f"unknown regression {which!r}; choose from {PAIR_REGRESSIONS_R1}")


# ---------------------------------------------------------------------------
# closed forms for extension-sample regressions
# ---------------------------------------------------------------------------


def mean_min_extended(model: ParentModel, n: int, m: int, x: float) -> float:
    """E(min of n draws | min of the first m draws = x), m < n."""
    if not 1 <= m < n:
        raise ValueError("need 1 <= m < n")
    _check_mean(model)
    w = float(model.cdf(x))
    d = n - m
    tail = _quad_q(model, lambda u: (1.0 - u) ** (d - 1), 0.0, w)
    return x * (1.0 - w) ** d + d * tail


def mean_max_extended(model: ParentModel, n: int, m: int, x: float) -> float:
    """E(max of n draws | max of the first m draws = x), m < n."""
    if not 1 <= m < n:
        raise ValueError("need 1 <= m < n")
    _check_mean(model)
    w = float(model.cdf(x))
    d = n - m
    tail = _quad_q(model, lambda u: u ** (d - 1), w, 1.0)
    return x * w**d + d * tail


def mean_adjacent(model: ParentModel, i: int, m: int, x: float) -> float:
    """E(i-th os after one extra draw | i-th os of m draws = x), 1 <= i <= m."""
    if not 1 <= i <= m:
        raise ValueError("need 1 <= i <= m")
    _check_mean(model)
    w = float(model.cdf(x))
    if i > 1 and w <= 0.0:
        raise ValueError("conditioning value at the lower support endpoint")
    lower = _quad_q(model, lambda u: u ** (i - 1), 0.0, w)
    return x * (1.0 - w) + i * lower / (w ** (i - 1) if i > 1 else 1.0)


def mean_given_single(model: ParentModel, j: int, n: int, x: float) -> float:
    """E(j-th os of n draws | one fixed draw = x)."""
    if not 1 <= j <= n:
        raise ValueError("need 1 <= j <= n")
    if n < 2:
        raise ValueError("need n >= 2")
    _check_mean(model)
    w = float(model.cdf(x))
    total = x * binom(n - 1, j - 1) * w ** (j - 1) * (1.0 - w) ** (n - j)
    if j <= n - 1:  # the fixed draw ranks above j: j-th os of the other n-1
        c = j * binom(n - 1, j)
        total += _quad_q(model, lambda u: c * u ** (j - 1) * (1.0 - u) ** (n - 1 - j), 0.0, w)
    if j >= 2:  # the fixed draw ranks below j: (j-1)-th os of the other n-1
        c = (j - 1) * binom(n - 1, j - 1)
        total += _quad_q(model, lambda u: c * u ** (j - 2) * (1.0 - u) ** (n - j), w, 1.0)
    return total


def tabulate_regression(
    producer: Callable[[float], float],
    model: ParentModel,
    size: int = 99,
    meaning: str = "regression",
) -> Curve:
    """Tabulate a pointwise regression on the quantile-spaced grid."""
    return tabulate(producer, model, size=size, meaning=meaning)
