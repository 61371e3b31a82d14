"""Parent distributions exposed through cdf, density, quantile and quantile density.

A parent model is the common absolutely continuous law of the iid draws
underlying all samples.  Besides the usual cdf/pdf pair, every model carries
its quantile function Q and quantile density q = Q'; the two sides are tied
together by the duality  f(Q(u)) q(u) = 1.

Two kinds of models exist:

* closed-form families (uniform, exponential, power, negative Pareto,
  negative exponential, logistic) where everything is analytic;
* quantile-density-defined families, built numerically from a positive
  function q on (0, 1).  The complementary beta family CB(alpha, beta) with
  q(u) proportional to u^(-alpha) (1-u)^(-beta) is the main instance.

Quantile-density families are only defined up to an affine map, so they are
pinned by the gauge Q(1/2) = location with the leading constant of q equal
to scale.

Numeric construction tabulates Q on a log-geometric grid reaching 1e-12 into
both tails (panelwise Gauss-Legendre, then cubic Hermite evaluation with the
exact derivative q); the cdf is the numerical inverse of the same table, so
cdf and quantile round-trip to inversion tolerance by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "ParentModel",
    "uniform",
    "exponential",
    "power_law",
    "negative_pareto",
    "negative_exponential",
    "logistic",
    "complementary_beta",
    "from_quantile_density",
    "make_family",
    "from_config",
    "FAMILIES",
]

U_MIN = 1e-12
_GRID_RATIO = 1.004


def _maybe_scalar(x, out: np.ndarray):
    if np.ndim(x) == 0:
        return float(out)
    return out


def _vec(fn: Callable) -> Callable:
    """Wrap an elementwise formula so scalars come back as floats."""

    def wrapped(x):
        arr = np.asarray(x, dtype=float)
        return _maybe_scalar(x, fn(arr))

    return wrapped


@dataclass(frozen=True)
class ParentModel:
    """A parent distribution on an open interval support.

    All four callables accept floats or numpy arrays.  ``finite_mean`` is a
    diagnostic flag: heavy-tailed quantile-density families may have infinite
    absolute first moment, in which case regression integrals are refused or
    trimmed by the callers.
    """

    name: str
    support: tuple[float, float]
    cdf: Callable = field(repr=False)
    pdf: Callable = field(repr=False)
    quantile: Callable = field(repr=False)
    quantile_density: Callable = field(repr=False)
    finite_mean: bool = True

    def sample(self, count: int, seed: int) -> np.ndarray:
        """``count`` iid draws via inverse-cdf sampling; deterministic per seed."""
        if count < 0:
            raise ValueError("count must be >= 0")
        rng = np.random.Generator(np.random.Philox(key=np.uint64(seed)))
        u = rng.random(count)
        np.clip(u, U_MIN, 1.0 - U_MIN, out=u)
        return np.asarray(self.quantile(u), dtype=float)

    def median(self) -> float:
        return float(self.quantile(0.5))

    def negate(self) -> "ParentModel":
        """The law of -X: reflected support, mirrored cdf and quantile."""
        a, b = self.support
        return ParentModel(
            name=f"negated {self.name}",
            support=(-b, -a),
            cdf=_vec(lambda x: 1.0 - np.asarray(self.cdf(-x), dtype=float)),
            pdf=_vec(lambda x: np.asarray(self.pdf(-x), dtype=float)),
            quantile=_vec(lambda u: -np.asarray(self.quantile(1.0 - u), dtype=float)),
            quantile_density=_vec(
                lambda u: np.asarray(self.quantile_density(1.0 - u), dtype=float)
            ),
            finite_mean=self.finite_mean,
        )

    def shifted_scaled(self, location: float, scale: float) -> "ParentModel":
        """The law of location + scale * X for scale > 0."""
        if scale <= 0:
            raise ValueError("scale must be > 0")
        a, b = self.support
        return ParentModel(
            name=f"{self.name} (loc={location:g}, scale={scale:g})",
            support=(location + scale * a, location + scale * b),
            cdf=_vec(lambda x: np.asarray(self.cdf((x - location) / scale), dtype=float)),
            pdf=_vec(lambda x: np.asarray(self.pdf((x - location) / scale), dtype=float) / scale),
            quantile=_vec(lambda u: location + scale * np.asarray(self.quantile(u), dtype=float)),
            quantile_density=_vec(
                lambda u: scale * np.asarray(self.quantile_density(u), dtype=float)
            ),
            finite_mean=self.finite_mean,
        )


# ---------------------------------------------------------------------------
# closed-form families
# ---------------------------------------------------------------------------


def uniform() -> ParentModel:
    return ParentModel(
        name="uniform",
        support=(0.0, 1.0),
        cdf=_vec(lambda x: np.clip(x, 0.0, 1.0)),
        pdf=_vec(lambda x: np.where((x > 0) & (x < 1), 1.0, 0.0)),
        quantile=_vec(lambda u: u),
        quantile_density=_vec(lambda u: np.ones_like(u)),
    )


def exponential() -> ParentModel:
    """Standard exponential, mean 1, support (0, inf)."""
    return ParentModel(
        name="exponential",
        support=(0.0, math.inf),
        cdf=_vec(lambda x: np.where(x > 0, -np.expm1(-np.maximum(x, 0.0)), 0.0)),
        pdf=_vec(lambda x: np.where(x > 0, np.exp(-np.maximum(x, 0.0)), 0.0)),
        quantile=_vec(lambda u: -np.log1p(-u)),
        quantile_density=_vec(lambda u: 1.0 / (1.0 - u)),
    )


def power_law(alpha: float) -> ParentModel:
    """cdf x**alpha on (0, 1); alpha > 0."""
    if alpha <= 0:
        raise ValueError("power exponent must be > 0")
    return ParentModel(
        name=f"power(alpha={alpha:g})",
        support=(0.0, 1.0),
        cdf=_vec(lambda x: np.clip(x, 0.0, 1.0) ** alpha),
        pdf=_vec(lambda x: np.where((x > 0) & (x < 1), alpha * np.maximum(x, 0.0) ** (alpha - 1.0), 0.0)),
        quantile=_vec(lambda u: u ** (1.0 / alpha)),
        quantile_density=_vec(lambda u: (1.0 / alpha) * u ** (1.0 / alpha - 1.0)),
    )


def negative_pareto(shape: float, rate: float = 1.0, upper: float = 0.0) -> ParentModel:
    """cdf (1 + rate*(upper - x))**(-shape) on (-inf, upper); shape, rate > 0.

    The reflection of a Pareto-type law; finite mean iff shape > 1.
    """
    if shape <= 0 or rate <= 0:
        raise ValueError("shape and rate must be > 0")
    return ParentModel(
        name=f"negative_pareto(shape={shape:g}, rate={rate:g}, upper={upper:g})",
        support=(-math.inf, upper),
        cdf=_vec(lambda x: np.where(x < upper, (1.0 + rate * (upper - np.minimum(x, upper))) ** (-shape), 1.0)),
        pdf=_vec(
            lambda x: np.where(
                x < upper,
                shape * rate * (1.0 + rate * (upper - np.minimum(x, upper))) ** (-shape - 1.0),
                0.0,
            )
        ),
        quantile=_vec(lambda u: upper - (u ** (-1.0 / shape) - 1.0) / rate),
        quantile_density=_vec(lambda u: u ** (-1.0 / shape - 1.0) / (shape * rate)),
        finite_mean=shape > 1,
    )


def negative_exponential(rate: float = 1.0) -> ParentModel:
    """cdf exp(rate*x) on (-inf, 0]; rate > 0."""
    if rate <= 0:
        raise ValueError("rate must be > 0")
    return ParentModel(
        name=f"negative_exponential(rate={rate:g})",
        support=(-math.inf, 0.0),
        cdf=_vec(lambda x: np.where(x < 0, np.exp(rate * np.minimum(x, 0.0)), 1.0)),
        pdf=_vec(lambda x: np.where(x < 0, rate * np.exp(rate * np.minimum(x, 0.0)), 0.0)),
        quantile=_vec(lambda u: np.log(u) / rate),
        quantile_density=_vec(lambda u: 1.0 / (rate * u)),
    )


def logistic() -> ParentModel:
    return ParentModel(
        name="logistic",
        support=(-math.inf, math.inf),
        cdf=_vec(lambda x: 1.0 / (1.0 + np.exp(-x))),
        pdf=_vec(lambda x: 0.25 / np.cosh(x / 2.0) ** 2),
        quantile=_vec(lambda u: np.log(u / (1.0 - u))),
        quantile_density=_vec(lambda u: 1.0 / (u * (1.0 - u))),
    )


# ---------------------------------------------------------------------------
# quantile-density-defined families
# ---------------------------------------------------------------------------


class _QuantileTable:
    """Tabulated quantile function built by integrating a quantile density.

    Nodes are log-geometric towards both endpoints (down to ``U_MIN``); node
    values come from panelwise 16-point Gauss-Legendre integration and
    evaluation is cubic Hermite with the exact derivative q, so interpolation
    stays accurate right through integrable endpoint singularities.
    """

    def __init__(self, q: Callable, location: float, scale: float):
        n_side = int(math.ceil(math.log(0.5 / U_MIN) / math.log(_GRID_RATIO))) + 1
        left = np.exp(np.linspace(math.log(U_MIN), math.log(0.5), n_side))
        right = 1.0 - np.exp(np.linspace(math.log(0.5), math.log(U_MIN), n_side))
        self.u = np.concatenate([left, right[1:]])
        self.median_index = n_side - 1

        q_arr = _coerce_vectorized(q)
        nodes, weights = np.polynomial.legendre.leggauss(16)
        u0, u1 = self.u[:-1], self.u[1:]
        half = 0.5 * (u1 - u0)
        mid = 0.5 * (u1 + u0)
        pts = mid[:, None] + half[:, None] * nodes[None, :]
        vals = scale * q_arr(pts.ravel()).reshape(pts.shape)
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise ValueError("quantile density must be positive and finite on (0, 1)")
        self.panel = (vals * weights[None, :]).sum(axis=1) * half
        if not np.all(np.isfinite(self.panel)):
            raise ValueError("quantile density is not integrable inside (0, 1)")
        # accumulate outward from the median: a divergent tail integral must
        # not contaminate the floating-point resolution of central values
        mid = self.median_index
        values = np.empty_like(self.u)
        values[mid] = location
        values[mid + 1 :] = location + np.cumsum(self.panel[mid:])
        values[:mid] = location - np.cumsum(self.panel[:mid][::-1])[::-1]
        self.values = values
        if np.any(np.diff(values) < 0):
            raise ValueError("quantile integration produced a non-monotone table")
        self.deriv = scale * q_arr(self.u)
        if not np.all(np.isfinite(self.deriv)) or np.any(self.deriv <= 0):
            raise ValueError("quantile density must be positive and finite on (0, 1)")
        self._q = q_arr
        self._scale = scale

    # cubic Hermite basis on one panel
    def _hermite(self, idx: np.ndarray, t: np.ndarray) -> np.ndarray:
        h = self.u[idx + 1] - self.u[idx]
        y0, y1 = self.values[idx], self.values[idx + 1]
        d0, d1 = self.deriv[idx], self.deriv[idx + 1]
        t2, t3 = t * t, t * t * t
        return (
            (2 * t3 - 3 * t2 + 1) * y0
            + (t3 - 2 * t2 + t) * h * d0
            + (-2 * t3 + 3 * t2) * y1
            + (t3 - t2) * h * d1
        )

    def quantile(self, u: np.ndarray) -> np.ndarray:
        u = np.clip(np.asarray(u, dtype=float), self.u[0], self.u[-1])
        idx = np.clip(np.searchsorted(self.u, u, side="right") - 1, 0, len(self.u) - 2)
        t = (u - self.u[idx]) / (self.u[idx + 1] - self.u[idx])
        return self._hermite(idx, t)

    def cdf(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(self.values, x, side="right") - 1, 0, len(self.u) - 2)
        lo = np.zeros_like(x, dtype=float)
        hi = np.ones_like(x, dtype=float)
        for _ in range(60):  # bisection in panel coordinate; monotone cubic
            t = 0.5 * (lo + hi)
            above = self._hermite(idx, t) > x
            hi = np.where(above, t, hi)
            lo = np.where(above, lo, t)
        t = 0.5 * (lo + hi)
        u = self.u[idx] + t * (self.u[idx + 1] - self.u[idx])
        return np.clip(u, self.u[0], self.u[-1])

    def decade_sums(self, of_values: bool) -> tuple[np.ndarray, np.ndarray]:
        """Per-decade integrals of q (or of |Q|) near each endpoint; used for
        divergence heuristics.  Decade d covers u in [10^-(d+1), 10^-d]."""
        u_mid = 0.5 * (self.u[:-1] + self.u[1:])
        if of_values:
            w = 0.5 * np.abs(self.values[:-1] + self.values[1:]) * np.diff(self.u)
        else:
            w = self.panel
        left_d = np.floor(-np.log10(u_mid)).astype(int)
        right_d = np.floor(-np.log10(1.0 - u_mid)).astype(int)
        max_d = int(-math.log10(U_MIN))
        left = np.zeros(max_d + 1)
        right = np.zeros(max_d + 1)
        np.add.at(left, np.clip(left_d, 0, max_d), w)
        np.add.at(right, np.clip(right_d, 0, max_d), w)
        return left, right


def _coerce_vectorized(q: Callable) -> Callable:
    probe = np.array([0.25, 0.5, 0.75])
    try:
        out = np.asarray(q(probe), dtype=float)
        if out.shape == probe.shape:
            return lambda u: np.asarray(q(u), dtype=float)
    except Exception:
        pass
    return np.vectorize(lambda u: float(q(u)))


def _diverges(decades: np.ndarray, lo: int = 6, hi: int = 11, threshold: float = 0.9) -> bool:
    # A geometric per-decade ratio >= ~1 means the endpoint integral diverges.
    s = decades[lo : hi + 1]
    if np.any(s <= 0):
        return False
    ratios = s[1:] / s[:-1]
    return bool(np.median(ratios) > threshold)


def from_quantile_density(
    q: Callable,
    location: float = 0.0,
    scale: float = 1.0,
    name: str | None = None,
    left_unbounded: bool | None = None,
    right_unbounded: bool | None = None,
) -> ParentModel:
    """Build a parent model from a positive quantile density on (0, 1).

    The model is pinned by Q(1/2) = location; ``scale`` multiplies q.  Support
    endpoints are declared infinite either explicitly or when the endpoint
    integral of q fails a per-decade convergence test.
    """
    if scale <= 0:
        raise ValueError("scale must be > 0")
    table = _QuantileTable(q, location, scale)

    q_left, q_right = table.decade_sums(of_values=False)
    if left_unbounded is None:
        left_unbounded = _diverges(q_left)
    if right_unbounded is None:
        right_unbounded = _diverges(q_right)
    lo = -math.inf if left_unbounded else _finite_endpoint(table, q_left, left=True)
    hi = math.inf if right_unbounded else _finite_endpoint(table, q_right, left=False)

    v_left, v_right = table.decade_sums(of_values=True)
    finite_mean = not (_diverges(v_left) or _diverges(v_right))

    qd = table._q
    sc = scale
    model = ParentModel(
        name=name or "quantile-density family",
        support=(lo, hi),
        cdf=_vec(table.cdf),
        pdf=_vec(lambda x: 1.0 / (sc * qd(table.cdf(np.asarray(x, dtype=float))))),
        quantile=_vec(table.quantile),
        quantile_density=_vec(lambda u: sc * qd(np.asarray(u, dtype=float))),
        finite_mean=finite_mean,
    )
    return model


def _finite_endpoint(table: _QuantileTable, decades: np.ndarray, left: bool) -> float:
    # Extrapolate the remaining tail mass of q geometrically beyond U_MIN.
    s_last, s_prev = decades[11], decades[10]
    tail = 0.0
    if s_prev > 0 and 0 < s_last < s_prev:
        rho = s_last / s_prev
        tail = s_last * rho / (1.0 - rho)
    return float(table.values[0] - tail) if left else float(table.values[-1] + tail)


def complementary_beta(
    alpha: float, beta: float, location: float = 0.0, scale: float = 1.0
) -> ParentModel:
    """The family with quantile density proportional to u^(-alpha) (1-u)^(-beta).

    Equivalently the density satisfies F^alpha (1-F)^beta proportional to f.
    alpha = beta = 1 is the logistic family; alpha = 0, beta = 1 the
    exponential type; alpha = beta = 0 the uniform.  The support endpoint on
    each side is finite exactly when the corresponding exponent is < 1.
    """
    model = from_quantile_density(
        lambda u: u ** (-alpha) * (1.0 - u) ** (-beta),
        location=location,
        scale=scale,
        name=f"cb(alpha={alpha:g}, beta={beta:g})",
        left_unbounded=alpha >= 1,
        right_unbounded=beta >= 1,
    )
    return model


# ---------------------------------------------------------------------------
# registry / config parsing
# ---------------------------------------------------------------------------

FAMILIES: dict[str, Callable[..., ParentModel]] = {
    "uniform": uniform,
    "exponential": exponential,
    "power": power_law,
    "negative_pareto": negative_pareto,
    "negative_exponential": negative_exponential,
    "logistic": logistic,
    "cb": complementary_beta,
}


def make_family(name: str, **params) -> ParentModel:
    """Look up a built-in family by name and construct it."""
    try:
        builder = FAMILIES[name]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None
    try:
        return builder(**params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for family {name!r}: {exc}") from None


def from_config(config: dict) -> ParentModel:
    """Build a model from a ``{family, params, location, scale}`` mapping.

    For the cb family location/scale are the native gauge; for closed-form
    families they act as an affine transform of the standard member.
    """
    cfg = dict(config)
    name = cfg.pop("family", None)
    if not name:
        raise ValueError("model config needs a 'family' key")
    params = dict(cfg.pop("params", {}) or {})
    location = float(cfg.pop("location", 0.0))
    scale = float(cfg.pop("scale", 1.0))
    if cfg:
        raise ValueError(f"unknown model config keys: {sorted(cfg)}")
    if name == "cb":
        return make_family(name, location=location, scale=scale, **params)
    model = make_family(name, **params)
    if location != 0.0 or scale != 1.0:
        model = model.shifted_scaled(location, scale)
    return model
