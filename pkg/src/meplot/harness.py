"""Monte Carlo experiment runner for the convergence claims.

Sweeps (model, n, k-policy) over seeded replicates, evaluates a target
statistic or set distance against its theoretical limit, and aggregates
empirical exceedance probabilities and distance quantiles into a
deterministic report.
"""
from __future__ import annotations

import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .converse import (
    AuxiliaryFunction,
    auxiliary_from_f,
    endpoint_statistic_weibull,
    gamma_from_xi,
    gumbel_statistic,
    slope_statistic_frechet,
    v_statistic_frechet,
    z_statistic_weibull,
)
from .distributions import (
    DistributionModel,
    ThresholdPolicy,
    parse_model_spec,
    sample,
)
from .empirical import scaled_set
from .errors import ConfigError, MeplotError, ParameterError
from .geometry import Window, hausdorff_windowed, limit_set

TARGETS = (
    "slope_frechet",
    "v_frechet",
    "endpoint_weibull",
    "z_weibull",
    "gumbel",
    "hausdorff",
)

_TARGET_REGIME = {
    "slope_frechet": "frechet",
    "v_frechet": "frechet",
    "endpoint_weibull": "weibull",
    "z_weibull": "weibull",
    "gumbel": "gumbel",
}

# Default exceedance tolerance: relative to the limit with an absolute floor.
EPSILON_REL = 0.05
EPSILON_FLOOR = 0.02


def default_epsilon(limit: float) -> float:
    return max(EPSILON_REL * abs(limit), EPSILON_FLOOR)


def max_workers() -> int:
    """Thread cap from MEPLOT_THREADS; 1 when unset or unparseable."""
    raw = os.environ.get("MEPLOT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class ExperimentSpec:
    """One Monte Carlo experiment over an n-grid."""

    model: DistributionModel
    n_grid: tuple[int, ...]
    policy: ThresholdPolicy
    replicates: int
    seed: int
    regime: str
    target: str
    epsilon: float | None = None
    window: Window = field(default_factory=lambda: Window(5.0))
    aux: AuxiliaryFunction | None = None  # gumbel target only

    def __post_init__(self):
        if self.target not in TARGETS:
            raise ConfigError("target", f"unknown target {self.target!r}")
        if self.replicates < 1:
            raise ConfigError("replicates", "must be >= 1")
        grid = tuple(self.n_grid)
        if len(grid) == 0 or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("n_grid", "must be nonempty and strictly increasing")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ConfigError("epsilon", "must be positive")
        want = _TARGET_REGIME.get(self.target, self.regime)
        if want != self.regime:
            raise ConfigError(
                "regime", f"target {self.target!r} needs regime {want!r}, got {self.regime!r}"
            )
        if self.model.regime != self.regime:
            raise ConfigError(
                "model", f"model regime {self.model.regime!r} does not match {self.regime!r}"
            )

    def limit(self) -> float:
        """Theoretical limit of the target under the model's true shape."""
        if self.target == "hausdorff":
            return 0.0
        xi = self.model.true_xi
        gamma = gamma_from_xi(xi)
        return {
            "slope_frechet": gamma,
            "v_frechet": gamma + 1.0,
            "endpoint_weibull": gamma,
            "z_weibull": 1.0 - gamma,
            "gumbel": 1.0,
        }[self.target]


@dataclass(frozen=True)
class ReportRow:
    n: int
    k: int
    mean: float
    std: float
    median: float
    q25: float
    q75: float
    q90: float
    exceedance: float
    failures: int
    limit: float
    epsilon: float


@dataclass(frozen=True)
class ConvergenceReport:
    """Aggregated per-(n, k) results of one experiment."""

    spec_string: str
    target: str
    regime: str
    seed: int
    true_xi: float | None
    limit: float
    epsilon: float
    replicates: int
    rows: tuple[ReportRow, ...]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(
            f"# model={self.spec_string} target={self.target} regime={self.regime} "
            f"seed={self.seed} replicates={self.replicates}\n"
        )
        buf.write(
            f"# limit={self.limit!r} true_xi={self.true_xi!r} epsilon={self.epsilon!r}\n"
        )
        buf.write("n,k,metric,value\n")
        for r in self.rows:
            for metric in (
                "mean", "std", "median", "q25", "q75", "q90", "exceedance", "failures",
            ):
                buf.write(f"{r.n},{r.k},{metric},{getattr(r, metric)!r}\n")
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "model": self.spec_string,
                "target": self.target,
                "regime": self.regime,
                "seed": self.seed,
                "replicates": self.replicates,
                "limit": self.limit,
                "true_xi": self.true_xi,
                "epsilon": self.epsilon,
                "rows": [
                    {
                        "n": r.n,
                        "k": r.k,
                        "mean": r.mean,
                        "std": r.std,
                        "median": r.median,
                        "q25": r.q25,
                        "q75": r.q75,
                        "q90": r.q90,
                        "exceedance": r.exceedance,
                        "failures": r.failures,
                    }
                    for r in self.rows
                ],
            },
            indent=2,
        )


def _default_aux(spec: ExperimentSpec) -> AuxiliaryFunction:
    if spec.aux is not None:
        return spec.aux
    if spec.model.name == "exp":
        return AuxiliaryFunction.constant(spec.model.params.get("mean", 1.0))
    return auxiliary_from_f(spec.model)


def _evaluate_one(spec: ExperimentSpec, aux, n: int, k: int, replicate_index: int) -> float:
    s = sample(spec.model, n, spec.seed, replicate=replicate_index)
    if spec.target == "hausdorff":
        sset = scaled_set(s, k, spec.regime)
        lim = limit_set(spec.regime, spec.model.true_xi)
        return hausdorff_windowed(sset, lim, spec.window)
    if spec.target == "slope_frechet":
        return slope_statistic_frechet(s, k)
    if spec.target == "v_frechet":
        return v_statistic_frechet(s, k)
    if spec.target == "endpoint_weibull":
        return endpoint_statistic_weibull(s, k, spec.model.right_endpoint)
    if spec.target == "z_weibull":
        return z_statistic_weibull(s, k, spec.model.right_endpoint)
    return gumbel_statistic(s, k, aux, n)


def run_experiment(spec: ExperimentSpec, progress=None) -> ConvergenceReport:
    """Run the sweep; deterministic given the spec, regardless of thread count.

    Replicate seeds are derived injectively from (seed, n-index, k-index,
    replicate); results are gathered in replicate order before any
    aggregation so that summation order is fixed.
    """
    limit = spec.limit()
    epsilon = spec.epsilon if spec.epsilon is not None else default_epsilon(limit)
    aux = _default_aux(spec) if spec.target == "gumbel" else None
    rows = []
    workers = max_workers()
    for ni, n in enumerate(spec.n_grid):
        for ki, k in enumerate(spec.policy.k_grid(n)):
            if not 2 <= k < n:
                raise ConfigError("policy", f"k={k} invalid for n={n}")

            def one(r, n=n, k=k, ni=ni, ki=ki):
                rep = (ni << 40) | (ki << 24) | r
                try:
                    return _evaluate_one(spec, aux, n, k, rep)
                except MeplotError:
                    return math.nan

            indices = range(spec.replicates)
            if workers > 1:
                with ThreadPoolExecutor(max_workers=workers) as pool:
                    values = list(pool.map(one, indices))
            else:
                values = [one(r) for r in indices]
            values = np.asarray(values, dtype=float)
            ok = values[np.isfinite(values)]
            failures = int(values.size - ok.size)
            if ok.size:
                exceed = int(np.sum(np.abs(ok - limit) > epsilon)) + failures
                q25, med, q75, q90 = np.quantile(ok, [0.25, 0.5, 0.75, 0.9])
                row = ReportRow(
                    n=n, k=k,
                    mean=float(np.mean(ok)), std=float(np.std(ok)),
                    median=float(med), q25=float(q25), q75=float(q75), q90=float(q90),
                    exceedance=exceed / spec.replicates, failures=failures,
                    limit=limit, epsilon=epsilon,
                )
            else:
                row = ReportRow(
                    n=n, k=k, mean=math.nan, std=math.nan, median=math.nan,
                    q25=math.nan, q75=math.nan, q90=math.nan,
                    exceedance=1.0, failures=failures, limit=limit, epsilon=epsilon,
                )
            rows.append(row)
            if progress is not None:
                progress(row)
    return ConvergenceReport(
        spec_string=spec.model.spec_string(),
        target=spec.target,
        regime=spec.regime,
        seed=spec.seed,
        true_xi=spec.model.true_xi,
        limit=limit,
        epsilon=epsilon,
        replicates=spec.replicates,
        rows=tuple(rows),
    )


def exceedance_curve(report: ConvergenceReport) -> list[tuple[int, float]]:
    """Empirical exceedance probability per sample size (averaged over k)."""
    ns = sorted({r.n for r in report.rows})
    if len(ns) < 2:
        raise ParameterError("report covers fewer than two sample sizes")
    out = []
    for n in ns:
        probs = [r.exceedance for r in report.rows if r.n == n]
        out.append((n, float(np.mean(probs))))
    return out


# ---------------------------------------------------------------------------
# TOML configuration
# ---------------------------------------------------------------------------

_KNOWN_KEYS = {
    "model", "target", "regime", "n_grid", "replicates", "seed", "epsilon",
    "window", "policy", "aux",
}


def load_experiment_config(path) -> ExperimentSpec:
    """Build an ExperimentSpec from a TOML config file."""
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    for key in raw:
        if key not in _KNOWN_KEYS:
            raise ConfigError(key, "unknown configuration key")
    for key in ("model", "target", "regime", "n_grid", "replicates", "seed"):
        if key not in raw:
            raise ConfigError(key, "missing required key")
    model = parse_model_spec(raw["model"])
    policy_raw = raw.get("policy", {"rule": "power", "exponent": 0.45})
    try:
        policy = ThresholdPolicy(
            rule=policy_raw.get("rule", "power"),
            exponent=policy_raw.get("exponent"),
            fraction=policy_raw.get("fraction"),
            ks=tuple(policy_raw["ks"]) if "ks" in policy_raw else None,
            exponents=tuple(policy_raw.get("exponents", ())),
        )
    except ParameterError as exc:
        raise ConfigError("policy", str(exc)) from exc
    aux = None
    if "aux" in raw:
        aux_raw = str(raw["aux"])
        if aux_raw == "from_model":
            aux = auxiliary_from_f(model)
        elif aux_raw.startswith("constant:"):
            aux = AuxiliaryFunction.constant(float(aux_raw.split(":", 1)[1]))
        else:
            raise ConfigError("aux", f"expected 'from_model' or 'constant:<value>', got {aux_raw!r}")
    try:
        n_grid = tuple(int(n) for n in raw["n_grid"])
    except (TypeError, ValueError) as exc:
        raise ConfigError("n_grid", str(exc)) from exc
    return ExperimentSpec(
        model=model,
        n_grid=n_grid,
        policy=policy,
        replicates=int(raw["replicates"]),
        seed=int(raw["seed"]),
        regime=str(raw["regime"]),
        target=str(raw["target"]),
        epsilon=float(raw["epsilon"]) if "epsilon" in raw else None,
        window=Window(float(raw.get("window", 5.0))),
        aux=aux,
    )
