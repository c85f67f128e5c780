"""Distribution models, GPD closed forms, sampling and mean-excess oracles.

Every model carries vectorized cdf / tail / quantile maps, its right
endpoint and its known tail regime, so it can serve both as a sampler
and as an exact oracle for the estimators built on top of it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.special import ndtr, ndtri

from .empirical import SortedSample
from .errors import (
    MeanNotDefinedError,
    ParameterError,
    QuadratureError,
    SupportError,
)

# Below this |xi| the GPD formulas switch to the exponential branch with a
# first-order shape correction; the removable singularity at xi = 0 would
# otherwise cancel catastrophically.
XI_SWITCH = 1e-8

QUAD_RTOL = 1e-10


@dataclass(frozen=True)
class GpdParams:
    """Shape (xi) and scale (beta) of a generalized Pareto distribution."""

    xi: float
    beta: float

    def __post_init__(self):
        if not (self.beta > 0):
            raise ParameterError(f"beta must be positive, got {self.beta!r}")

    @property
    def right_endpoint(self) -> float:
        return math.inf if self.xi >= 0 else -self.beta / self.xi


def gpd_cdf(p: GpdParams, x):
    """GPD distribution function; domain-checked."""
    x = np.asarray(x, dtype=float)
    hi = p.right_endpoint
    if np.any(x < 0) or np.any(x > hi):
        raise SupportError(f"x outside the support [0, {hi}] of GPD(xi={p.xi}, beta={p.beta})")
    out = 1.0 - _gpd_tail_raw(p, x)
    return out.item() if out.ndim == 0 else out


def gpd_tail(p: GpdParams, x):
    """GPD survival function 1 - cdf."""
    x = np.asarray(x, dtype=float)
    hi = p.right_endpoint
    if np.any(x < 0) or np.any(x > hi):
        raise SupportError(f"x outside the support [0, {hi}] of GPD(xi={p.xi}, beta={p.beta})")
    out = _gpd_tail_raw(p, x)
    return out.item() if out.ndim == 0 else out


def _gpd_tail_raw(p: GpdParams, x):
    z = np.asarray(x, dtype=float) / p.beta
    if abs(p.xi) < XI_SWITCH:
        return np.exp(-z * (1.0 - p.xi * z / 2.0))
    with np.errstate(divide="ignore", over="ignore"):
        out = np.exp(-np.log1p(p.xi * z) / p.xi)
    # exact zero at the finite right endpoint
    if p.xi < 0:
        out = np.where(1.0 + p.xi * z <= 0, 0.0, out)
    return out


def gpd_quantile(p: GpdParams, u):
    """Left-continuous inverse of the GPD cdf on (0, 1)."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0) or np.any(u >= 1):
        raise ParameterError("u must lie in the open interval (0, 1)")
    out = _gpd_quantile_raw(p, u)
    return out.item() if out.ndim == 0 else out


def _gpd_quantile_raw(p: GpdParams, u):
    return _gpd_quantile_from_tail(p, -np.log1p(-np.asarray(u, dtype=float)))


def _gpd_quantile_from_tail(p: GpdParams, ell):
    """Quantile as a function of ell = -log(tail probability)."""
    ell = np.asarray(ell, dtype=float)
    if abs(p.xi) < XI_SWITCH:
        return p.beta * ell * (1.0 + p.xi * ell / 2.0)
    return p.beta * np.expm1(p.xi * ell) / p.xi


def me_closed_form(p: GpdParams, u):
    """GPD mean-excess function: affine in the threshold with slope xi/(1-xi)."""
    if p.xi >= 1:
        raise MeanNotDefinedError(f"mean does not exist for xi={p.xi} >= 1")
    u = np.asarray(u, dtype=float)
    hi = p.right_endpoint
    if np.any(u < 0) or np.any(u > hi):
        raise SupportError(f"threshold outside [0, {hi}]")
    out = (p.beta + p.xi * u) / (1.0 - p.xi)
    return out.item() if out.ndim == 0 else out


@dataclass(frozen=True)
class DistributionModel:
    """A named distribution with the maps needed for sampling and oracles."""

    name: str
    params: dict
    cdf: Callable
    tail: Callable
    quantile: Callable
    right_endpoint: float
    regime: str
    true_xi: float | None = None
    support_lo: float = 0.0
    # quantile(1 - w) as a function of the tail probability w; avoids the
    # float cancellation in 1 - w for w below machine epsilon.
    tail_quantile: Callable | None = None

    def quantile_of_tail(self, w):
        if self.tail_quantile is not None:
            return self.tail_quantile(w)
        return self.quantile(1.0 - np.asarray(w, dtype=float))

    def spec_string(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{self.name}:{inner}"

    def __repr__(self) -> str:
        return f"DistributionModel({self.spec_string()!r})"


def gpd_model(xi: float, beta: float = 1.0) -> DistributionModel:
    p = GpdParams(xi=xi, beta=beta)
    regime = "frechet" if xi > 0 else ("weibull" if xi < 0 else "gumbel")
    return DistributionModel(
        name="gpd",
        params={"xi": xi, "beta": beta},
        cdf=lambda x, p=p: 1.0 - _gpd_tail_raw(p, np.clip(x, 0.0, p.right_endpoint)),
        tail=lambda x, p=p: _gpd_tail_raw(p, np.clip(x, 0.0, p.right_endpoint)),
        quantile=lambda u, p=p: _gpd_quantile_raw(p, u),
        tail_quantile=lambda w, p=p: _gpd_quantile_from_tail(p, -np.log(w)),
        right_endpoint=p.right_endpoint,
        regime=regime,
        true_xi=xi,
    )


def pareto_model(alpha: float) -> DistributionModel:
    if alpha <= 0:
        raise ParameterError(f"alpha must be positive, got {alpha!r}")
    return DistributionModel(
        name="pareto",
        params={"alpha": alpha},
        cdf=lambda x: np.where(np.asarray(x, float) < 1, 0.0, 1.0 - np.maximum(x, 1.0) ** -alpha),
        tail=lambda x: np.where(np.asarray(x, float) < 1, 1.0, np.maximum(x, 1.0) ** -alpha),
        quantile=lambda u: (1.0 - np.asarray(u, float)) ** (-1.0 / alpha),
        tail_quantile=lambda w: np.asarray(w, float) ** (-1.0 / alpha),
        right_endpoint=math.inf,
        regime="frechet",
        true_xi=1.0 / alpha,
        support_lo=1.0,
    )


def uniform_model() -> DistributionModel:
    return DistributionModel(
        name="uniform",
        params={},
        cdf=lambda x: np.clip(np.asarray(x, float), 0.0, 1.0),
        tail=lambda x: 1.0 - np.clip(np.asarray(x, float), 0.0, 1.0),
        quantile=lambda u: np.asarray(u, float),
        tail_quantile=lambda w: 1.0 - np.asarray(w, float),
        right_endpoint=1.0,
        regime="weibull",
        true_xi=-1.0,
    )


def beta_tail_model(p: float) -> DistributionModel:
    """Distribution on [0, 1] with tail (1-x)^p; Weibull regime, xi = -1/p."""
    if p <= 0:
        raise ParameterError(f"p must be positive, got {p!r}")
    return DistributionModel(
        name="betatail",
        params={"p": p},
        cdf=lambda x: 1.0 - (1.0 - np.clip(np.asarray(x, float), 0.0, 1.0)) ** p,
        tail=lambda x: (1.0 - np.clip(np.asarray(x, float), 0.0, 1.0)) ** p,
        quantile=lambda u: 1.0 - (1.0 - np.asarray(u, float)) ** (1.0 / p),
        tail_quantile=lambda w: 1.0 - np.asarray(w, float) ** (1.0 / p),
        right_endpoint=1.0,
        regime="weibull",
        true_xi=-1.0 / p,
    )


def exponential_model(mean: float = 1.0) -> DistributionModel:
    if mean <= 0:
        raise ParameterError(f"mean must be positive, got {mean!r}")
    return DistributionModel(
        name="exp",
        params={"mean": mean},
        cdf=lambda x: -np.expm1(-np.maximum(np.asarray(x, float), 0.0) / mean),
        tail=lambda x: np.exp(-np.maximum(np.asarray(x, float), 0.0) / mean),
        quantile=lambda u: -mean * np.log1p(-np.asarray(u, float)),
        tail_quantile=lambda w: -mean * np.log(np.asarray(w, float)),
        right_endpoint=math.inf,
        regime="gumbel",
        true_xi=0.0,
    )


def lognormal_model() -> DistributionModel:
    def cdf(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(x <= 0, 0.0, ndtr(np.log(np.maximum(x, 1e-300))))

    def tail(x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(x <= 0, 1.0, ndtr(-np.log(np.maximum(x, 1e-300))))

    return DistributionModel(
        name="lognormal",
        params={},
        cdf=cdf,
        tail=tail,
        quantile=lambda u: np.exp(ndtri(np.asarray(u, float))),
        tail_quantile=lambda w: np.exp(-ndtri(np.asarray(w, float))),
        right_endpoint=math.inf,
        regime="gumbel",
        true_xi=0.0,
    )


_MODEL_FACTORIES = {
    "gpd": gpd_model,
    "pareto": pareto_model,
    "uniform": uniform_model,
    "betatail": beta_tail_model,
    "exp": exponential_model,
    "lognormal": lognormal_model,
}


def parse_model_spec(spec: str) -> DistributionModel:
    """Build a model from the text form "name:param=value,param=value"."""
    name, _, rest = spec.strip().partition(":")
    name = name.strip().lower()
    if name not in _MODEL_FACTORIES:
        raise ParameterError(
            f"unknown model {name!r}; choose from {sorted(_MODEL_FACTORIES)}"
        )
    kwargs = {}
    if rest:
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            if not eq:
                raise ParameterError(f"malformed parameter {item!r} in spec {spec!r}")
            try:
                kwargs[key.strip()] = float(value)
            except ValueError as exc:
                raise ParameterError(f"non-numeric value for {key.strip()!r}: {value!r}") from exc
    try:
        return _MODEL_FACTORIES[name](**kwargs)
    except TypeError as exc:
        raise ParameterError(f"bad parameters for model {name!r}: {exc}") from exc


def me_numeric(d: DistributionModel, u: float) -> float:
    """Mean-excess function by adaptive quadrature of the tail integral."""
    if u >= d.right_endpoint:
        raise SupportError(f"threshold u={u!r} is at or beyond the right endpoint")
    tail_u = float(d.tail(u))
    if tail_u <= 0:
        raise SupportError(f"tail vanishes at u={u!r}; mean excess undefined")
    value, _ = _quad(lambda s: float(d.tail(s)), u, d.right_endpoint)
    return value / tail_u


def _quad(f, lo, hi, epsrel=QUAD_RTOL):
    """scipy.integrate.quad with failure converted to QuadratureError."""
    out = integrate.quad(f, lo, hi, epsabs=0.0, epsrel=epsrel, limit=200, full_output=True)
    value, abserr = out[0], out[1]
    if len(out) > 3 or not np.isfinite(value):
        achieved = abserr / abs(value) if value else math.inf
        raise QuadratureError(
            f"quadrature failed on [{lo}, {hi}]: {out[-1] if len(out) > 3 else 'non-finite result'}",
            achieved_tolerance=achieved,
        )
    return value, abserr


@dataclass(frozen=True)
class ThresholdPolicy:
    """Rule generating intermediate order-statistic counts k for a sample size.

    Rules: power (k = ceil(n**exponent)), ratio (k = ceil(fraction * n)),
    explicit (a fixed list), and power_span (one k per exponent in a grid,
    used when a statistic is examined across several thresholds at one n).
    """

    rule: str
    exponent: float | None = None
    fraction: float | None = None
    ks: tuple[int, ...] | None = None
    exponents: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if self.rule == "power":
            if self.exponent is None or not 0 < self.exponent < 1:
                raise ParameterError("power rule needs an exponent in (0, 1)")
        elif self.rule == "ratio":
            if self.fraction is None or not 0 < self.fraction < 1:
                raise ParameterError("ratio rule needs a fraction in (0, 1)")
        elif self.rule == "explicit":
            if not self.ks or any(k < 1 for k in self.ks):
                raise ParameterError("explicit rule needs a nonempty list of k >= 1")
        elif self.rule == "power_span":
            if not self.exponents or any(not 0 < a < 1 for a in self.exponents):
                raise ParameterError("power_span rule needs exponents in (0, 1)")
        else:
            raise ParameterError(f"unknown threshold rule {self.rule!r}")

    def k_for(self, n: int) -> int:
        """Single representative k for this sample size."""
        ks = self.k_grid(n)
        return ks[len(ks) // 2]

    def k_grid(self, n: int) -> list[int]:
        """All k values the policy prescribes at sample size n, clipped to [1, n-1]."""
        if n < 2:
            raise ParameterError(f"need n >= 2, got {n}")
        if self.rule == "power":
            raw = [math.ceil(n ** self.exponent)]
        elif self.rule == "ratio":
            raw = [math.ceil(self.fraction * n)]
        elif self.rule == "explicit":
            raw = sorted(self.ks)
        else:
            raw = sorted(math.ceil(n ** a) for a in self.exponents)
        out = sorted({min(max(k, 1), n - 1) for k in raw})
        return out


def auto_k(n: int) -> int:
    """Default threshold count: grows without bound while k/n -> 0."""
    return math.ceil(n ** 0.45)


def sample_key(seed: int, replicate: int = 0) -> int:
    """128-bit Philox key, injective in (seed, replicate)."""
    if replicate < 0 or replicate >= 2**64:
        raise ParameterError("replicate index out of range")
    return (int(seed) % 2**64) * 2**64 + int(replicate)


def sample(d: DistributionModel, n: int, seed: int, replicate: int = 0) -> SortedSample:
    """n iid draws via inverse transform with a counter-based generator.

    Identical (d, n, seed, replicate) gives bit-identical output on any
    platform: Philox is a counter-based stream keyed by (seed, replicate).
    """
    if n < 1:
        raise ParameterError(f"need n >= 1, got {n}")
    gen = np.random.Generator(np.random.Philox(key=sample_key(seed, replicate)))
    u = gen.random(n)
    values = np.asarray(d.quantile(u), dtype=float)
    return SortedSample(values)
