"""Converse statistics, H-functionals and regular-variation oracles.

Each maximal domain of attraction has a thresholded statistic whose
limit identifies the tail: the slope statistic (positive shape), the
endpoint statistic (negative shape) and the auxiliary-normalized
statistic (zero shape), together with the deterministic H-functionals
that carry the same limits along the quantile function.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .distributions import DistributionModel, ThresholdPolicy, _quad, me_numeric
from .empirical import SortedSample, empirical_me
from .errors import (
    AuxiliaryError,
    EndpointError,
    MomentConditionError,
    NoExceedanceError,
    NonpositiveThresholdError,
    ParameterError,
    ScalingError,
)


def gamma_from_xi(xi: float) -> float:
    """Statistic limit gamma for a shape parameter xi.

    Positive shapes give gamma = xi/(1-xi) in (0, inf); negative shapes
    give gamma = -xi/(1-xi) in (0, 1); zero shape gives 1.
    """
    if xi > 0:
        if xi >= 1:
            raise ParameterError("slope limit needs xi < 1")
        return xi / (1.0 - xi)
    if xi < 0:
        return -xi / (1.0 - xi)
    return 1.0


def xi_from_gamma(gamma: float, regime: str) -> float:
    """Inverse of gamma_from_xi on the Frechet and Weibull branches."""
    if regime == "frechet":
        return gamma / (1.0 + gamma)
    if regime == "weibull":
        return -gamma / (1.0 - gamma)
    if regime == "gumbel":
        return 0.0
    raise ParameterError(f"unknown regime {regime!r}")


def _check_k(s: SortedSample, k: int):
    if not 2 <= k < s.n:
        raise ParameterError(f"need 2 <= k < n, got k={k}, n={s.n}")


def slope_statistic_frechet(s: SortedSample, k: int) -> float:
    """Average excess over X_(k+1), relative to X_(k+1); limit xi/(1-xi)."""
    _check_k(s, k)
    x = float(s.values[k])  # X_(k+1)
    if x <= 0:
        raise NonpositiveThresholdError(f"X_(k+1) = {x!r} must be positive")
    return (s.top_sum(k) - k * x) / (k * x)


def v_statistic_frechet(s: SortedSample, k: int) -> float:
    """Average of X_(i)/X_(k+1) over the top k, gated on X_(k+1) > 1; limit gamma + 1."""
    _check_k(s, k)
    x = float(s.values[k])
    if x <= 1:
        return 0.0
    return s.top_sum(k) / (k * x)


def endpoint_statistic_weibull(s: SortedSample, k: int, kappa: float) -> float:
    """Average excess over X_(k+1), relative to kappa - X_(k+1); limit -xi/(1-xi)."""
    _check_k(s, k)
    if kappa < s.values[0]:
        raise EndpointError(
            f"kappa={kappa!r} is below the sample maximum {s.values[0]!r}"
        )
    x = float(s.values[k])
    denom = kappa - x
    if denom == 0.0:
        raise ScalingError("kappa equals X_(k+1); zero normalizer")
    return (s.top_sum(k) - k * x) / (k * denom)


def z_statistic_weibull(s: SortedSample, k: int, kappa: float) -> float:
    """Transformed statistic on Z = (kappa - X)^(-1); limit 1 - gamma."""
    _check_k(s, k)
    if kappa <= s.values[0]:
        raise EndpointError(
            f"kappa={kappa!r} must exceed the sample maximum {s.values[0]!r}"
        )
    # X descending => kappa - X ascending => Z descending: Z_(i) = 1/(kappa - X_(i)).
    top = kappa - s.values[:k]
    z_k = 1.0 / (kappa - s.values[k - 1])
    return float(z_k * np.mean(top))


def gumbel_statistic(s: SortedSample, k: int, a, n: int | None = None) -> float:
    """Average excess over X_(k+1), normalized by a(n/k); limit 1."""
    _check_k(s, k)
    n = s.n if n is None else n
    a_val = float(a(n / k)) if callable(a) else float(a)
    if not a_val > 0:
        raise AuxiliaryError(f"auxiliary value a({n}/{k}) = {a_val!r} must be positive")
    x = float(s.values[k])
    return (s.top_sum(k) - k * x) / (k * a_val)


# ---------------------------------------------------------------------------
# Deterministic H-functionals (quadrature along the quantile function).
# Integrals over (y, 1) are computed after the substitution x = 1 - exp(-v),
# which removes the weight concentration at the upper endpoint.
# ---------------------------------------------------------------------------


def _quantile_integral(d: DistributionModel, y: float, shift: float = 0.0) -> float:
    """Integral of (quantile(x) - shift) over (y, 1)."""
    v0 = -math.log1p(-y)

    def integrand(v):
        w = math.exp(-v)
        if w == 0.0:
            return 0.0
        with np.errstate(over="ignore"):
            q = float(d.quantile_of_tail(w))
        return (q - shift) * w

    try:
        value, _ = _quad(integrand, v0, math.inf)
    except ArithmeticError as exc:
        raise MomentConditionError(
            f"quantile integral of {d.name} diverges near 1: {exc}"
        ) from exc
    if not np.isfinite(value):
        raise MomentConditionError(f"quantile integral of {d.name} is not finite")
    return value


def h_frechet(d: DistributionModel, y: float) -> float:
    """H(y) = int_y^1 quantile(x) dx / (quantile(y) (1-y)); limit gamma + 1."""
    if not 0 < y < 1:
        raise ParameterError("y must lie in (0, 1)")
    q_y = float(d.quantile(y))
    return _quantile_integral(d, y) / (q_y * (1.0 - y))


def h_weibull(d: DistributionModel, kappa: float, y: float) -> float:
    """H-functional of Z = (kappa - X)^(-1); limit 1 - gamma as y -> 1.

    Uses F_Z_inverse(u) = 1 / (kappa - F_inverse(u)), so the integrand is
    (kappa - quantile(x)) scaled by F_Z_inverse(y)/(1-y).
    """
    if not 0 < y < 1:
        raise ParameterError("y must lie in (0, 1)")
    q_y = float(d.quantile(y))
    if not q_y < kappa:
        raise EndpointError(f"quantile({y}) = {q_y!r} reaches kappa={kappa!r}")
    fz_y = 1.0 / (kappa - q_y)
    v0 = -math.log1p(-y)

    def integrand(v):
        w = math.exp(-v)
        if w == 0.0:
            return 0.0
        return (kappa - float(d.quantile_of_tail(w))) * w

    value, _ = _quad(integrand, v0, math.inf)
    return fz_y * value / (1.0 - y)


def h_gumbel(d: DistributionModel, x: float, literal: bool = False) -> float:
    """Average quantile excess above level x; equals f(quantile(x)).

    The default subtracts quantile(x), which matches the auxiliary
    function along the quantile path; literal=True keeps the raw average
    of the quantile over (x, 1) without the subtraction.
    """
    if not 0 < x < 1:
        raise ParameterError("x must lie in (0, 1)")
    shift = 0.0 if literal else float(d.quantile(x))
    return _quantile_integral(d, x, shift=shift) / (1.0 - x)


@dataclass(frozen=True)
class AuxiliaryFunction:
    """Slowly varying normalizer a(t) for the zero-shape statistic."""

    form: str  # "constant", "table" or "closed-form"
    value: float | None = None
    log_t: np.ndarray | None = None
    log_a: np.ndarray | None = None
    func: object = None

    def __call__(self, t):
        if self.form == "constant":
            return self.value if np.isscalar(t) else np.full(np.shape(t), self.value)
        if self.form == "table":
            out = np.exp(np.interp(np.log(t), self.log_t, self.log_a))
            return float(out) if np.isscalar(t) else out
        return self.func(t)

    @classmethod
    def constant(cls, value: float) -> "AuxiliaryFunction":
        if not value > 0:
            raise AuxiliaryError(f"auxiliary constant must be positive, got {value!r}")
        return cls(form="constant", value=float(value))

    @classmethod
    def from_table(cls, ts, values) -> "AuxiliaryFunction":
        ts = np.asarray(ts, dtype=float)
        values = np.asarray(values, dtype=float)
        if np.any(values <= 0) or np.any(ts <= 1):
            raise AuxiliaryError("table needs t > 1 and positive values")
        return cls(form="table", log_t=np.log(ts), log_a=np.log(values))

    @classmethod
    def from_callable(cls, func) -> "AuxiliaryFunction":
        return cls(form="closed-form", func=func)


def auxiliary_from_f(
    d: DistributionModel, t_min: float = 2.0, t_max: float = 1e9, num: int = 241
) -> AuxiliaryFunction:
    """a(t) = mean excess at the (1 - 1/t)-quantile, tabulated on a log grid."""
    ts = np.geomspace(t_min, t_max, num)
    vals = np.array([me_numeric(d, float(d.quantile(1.0 - 1.0 / t))) for t in ts])
    return AuxiliaryFunction.from_table(ts, vals)


def renyi_expectation(n: int, k: int) -> float:
    """Exact mean of 1/(1 - U) at the threshold order statistic: n/(k+1).

    U is the uniform order statistic with exactly k + 1 of the n sample
    values above it; the spacing representation of exponential order
    statistics gives E[1/(1 - U)] = prod_{i=1}^{n-k-1} (n-i+1)/(n-i),
    which telescopes to n/(k+1).
    """
    if not (1 <= k + 1 <= n):
        raise ParameterError(f"need 1 <= k+1 <= n, got n={n}, k={k}")
    return n / (k + 1)


def hall_wellner_gap(n: int, grid) -> tuple[float, float]:
    """Sup of |(1-y/n)^n 1[y<=n] - exp(-y)| on the grid, with its bound."""
    if n < 1:
        raise ParameterError(f"need n >= 1, got {n}")
    y = np.asarray(grid, dtype=float)
    if np.any(y < 0):
        raise ParameterError("grid must lie in [0, inf)")
    lhs = np.zeros_like(y)
    inside = y <= n
    lhs[inside] = (1.0 - y[inside] / n) ** n
    gap = float(np.max(np.abs(lhs - np.exp(-y))))
    bound = (2.0 + 1.0 / n) * math.exp(-2.0) / n
    return gap, bound


@dataclass(frozen=True)
class KaramataReport:
    """Numeric regular-variation check of g against index rho."""

    rho: float
    t_grid: np.ndarray
    x_grid: np.ndarray
    deviations: np.ndarray  # |g(tx)/g(t) - x^rho|, shape (len(t), len(x))
    tolerance: float

    @property
    def max_deviation(self) -> float:
        return float(self.deviations.max())

    @property
    def deviation_at_largest_t(self) -> float:
        return float(self.deviations[-1].max())

    @property
    def passed(self) -> bool:
        return self.deviation_at_largest_t <= self.tolerance


def karamata_oracle(g, rho: float, t_grid, x_grid, tolerance: float = 0.01) -> KaramataReport:
    """Check g(tx)/g(t) -> x^rho on the grids; certifies g in RV_rho numerically."""
    t_grid = np.sort(np.asarray(t_grid, dtype=float))
    x_grid = np.asarray(x_grid, dtype=float)
    dev = np.empty((t_grid.size, x_grid.size))
    for i, t in enumerate(t_grid):
        g_t = float(g(t))
        if not g_t > 0:
            raise ParameterError(f"g({t}) = {g_t!r} must be positive")
        for j, x in enumerate(x_grid):
            g_tx = float(g(t * x))
            if not g_tx > 0:
                raise ParameterError(f"g({t * x}) = {g_tx!r} must be positive")
            dev[i, j] = abs(g_tx / g_t - x**rho)
    return KaramataReport(
        rho=rho, t_grid=t_grid, x_grid=x_grid, deviations=dev, tolerance=tolerance
    )


# ---------------------------------------------------------------------------
# Regime classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RegimeEstimate:
    """Verdict of the regime decision layer, with per-threshold diagnostics."""

    regime: str  # "frechet", "weibull", "gumbel" or "inconclusive"
    gamma: float | None = None
    xi: float | None = None
    kappa: float | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def conclusive(self) -> bool:
        return self.regime != "inconclusive"

    def to_json(self) -> str:
        payload = {
            "regime": self.regime,
            "gamma": self.gamma,
            "xi": self.xi,
        }
        if self.kappa is not None:
            payload["kappa"] = self.kappa
        payload["per_k"] = [
            {"k": int(k), "statistic": float(v)}
            for k, v in self.diagnostics.get("per_k", [])
        ]
        return json.dumps(payload)


def _rel_spread(stats: np.ndarray) -> float:
    mean = float(np.mean(stats))
    if mean == 0.0:
        return math.inf
    return float(np.std(stats) / abs(mean))


DEFAULT_CLASSIFY_EXPONENTS = (0.45, 0.50, 0.55, 0.60, 0.65, 0.70)


def classify_regime(
    s: SortedSample,
    policy: ThresholdPolicy | None = None,
    *,
    stability_tol: float = 0.25,
    gumbel_tol: float = 0.15,
    gamma_floor: float = 0.05,
    shrink_ratio: float = 0.7,
    grow_ratio: float = 1.2,
) -> RegimeEstimate:
    """Decide the tail regime from the thresholded statistics across k.

    Order of checks: a stable positive slope statistic with a growing
    mean excess declares Frechet; a
    stable endpoint statistic in (0, 1) whose mean excess shrinks toward
    the endpoint candidate declares Weibull; a roughly constant mean
    excess across thresholds declares Gumbel. Anything else is an
    explicit inconclusive verdict, not an error.
    """
    if policy is None:
        policy = ThresholdPolicy(rule="power_span", exponents=DEFAULT_CLASSIFY_EXPONENTS)
    ks = [k for k in policy.k_grid(s.n) if 2 <= k < s.n]
    if len(ks) < 2:
        raise ParameterError("policy yields fewer than two usable k values")
    vals = s.values
    if vals[0] == vals[-1]:
        return RegimeEstimate(regime="inconclusive", diagnostics={"degenerate": True})
    # Mean-excess shrink ratio between the extreme thresholds: the ratio of
    # the average excess at the highest threshold (smallest k) to that at
    # the lowest (largest k). Near 1 for a slowly varying mean excess,
    # far below 1 when the mean excess collapses toward a finite endpoint,
    # far above 1 for a power tail.
    try:
        me_small_k = empirical_me(s, float(vals[ks[0]]))
        me_large_k = empirical_me(s, float(vals[ks[-1]]))
    except NoExceedanceError:
        return RegimeEstimate(regime="inconclusive", diagnostics={"degenerate": True})
    ratio = me_small_k / me_large_k if me_large_k > 0 else math.inf

    # Frechet: slope statistic stable, positive and bounded away from 0,
    # and the mean excess actually grows with the threshold. The growth
    # guard is what separates a power tail from a Gumbel-domain sample,
    # whose slope statistic is also stable (it decays like 1/log).
    if all(vals[k] > 0 for k in ks) and ratio > grow_ratio:
        slope = np.array([slope_statistic_frechet(s, k) for k in ks])
        if _rel_spread(slope) < stability_tol and float(np.median(slope)) > gamma_floor:
            gamma = float(np.median(slope))
            return RegimeEstimate(
                regime="frechet",
                gamma=gamma,
                xi=xi_from_gamma(gamma, "frechet"),
                diagnostics={"per_k": list(zip(ks, slope)), "me_ratio": ratio},
            )

    # Weibull: endpoint statistic stable in (0, 1) and a shrinking mean excess.
    x1 = float(vals[0])
    kappa_hat = x1 * (1.0 + 1.0 / s.n) if x1 > 0 else x1 + (x1 - float(vals[1]))
    kappa_hat = max(kappa_hat, x1 + 1e-12 * max(1.0, abs(x1)))
    wstats = np.array([endpoint_statistic_weibull(s, k, kappa_hat) for k in ks])
    med = float(np.median(wstats))
    if (
        _rel_spread(wstats) < stability_tol
        and 0.02 < med < 0.98
        and ratio < shrink_ratio
    ):
        return RegimeEstimate(
            regime="weibull",
            gamma=med,
            xi=xi_from_gamma(med, "weibull"),
            kappa=kappa_hat,
            diagnostics={"per_k": list(zip(ks, wstats)), "me_ratio": ratio},
        )

    # Gumbel: the mean excess is roughly constant across thresholds when
    # normalized by its value at the middle k.
    k_mid = ks[len(ks) // 2]
    a_const = empirical_me(s, float(vals[k_mid]))
    if a_const > 0:
        gstats = np.array(
            [(s.top_sum(k) - k * vals[k]) / (k * a_const) for k in ks]
        )
        if abs(float(np.mean(gstats)) - 1.0) < gumbel_tol:
            return RegimeEstimate(
                regime="gumbel",
                gamma=1.0,
                xi=0.0,
                diagnostics={"per_k": list(zip(ks, gstats)), "me_ratio": ratio},
            )

    return RegimeEstimate(regime="inconclusive", diagnostics={"me_ratio": ratio})
