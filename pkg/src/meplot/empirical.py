"""Empirical mean-excess function, ME plot points and regime-scaled sets.

The sample is always held as descending order statistics; all estimators
are computed by index arithmetic on the sorted array and its prefix sums.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateSampleError,
    NoExceedanceError,
    ParameterError,
    ScalingError,
)

REGIMES = ("frechet", "weibull", "gumbel")


class SortedSample:
    """Descending order statistics of an iid sample.

    Prefix sums of the sorted values are cached so that the empirical
    mean-excess function at any order statistic costs O(1).
    """

    __slots__ = ("values", "_prefix")

    def __init__(self, data):
        values = np.asarray(data, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise ParameterError("sample must be a nonempty 1-d array")
        if not np.all(np.isfinite(values)):
            raise ParameterError("sample contains non-finite values")
        if values.size > 1 and np.any(np.diff(values) > 0):
            values = np.sort(values)[::-1]
        self.values = values
        self.values.setflags(write=False)
        self._prefix = np.concatenate(([0.0], np.cumsum(values)))

    @property
    def n(self) -> int:
        return self.values.size

    def exceedance_count(self, u: float) -> int:
        """Number of sample values strictly greater than u."""
        ascending = self.values[::-1]
        return self.n - int(np.searchsorted(ascending, u, side="right"))

    def top_sum(self, k: int) -> float:
        """Sum of the k largest values."""
        return float(self._prefix[k])

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"SortedSample(n={self.n}, max={self.values[0]!r}, min={self.values[-1]!r})"


def empirical_me(s: SortedSample, u: float) -> float:
    """Average excess over the threshold u among values strictly above it."""
    c = s.exceedance_count(u)
    if c == 0:
        raise NoExceedanceError(f"no sample value exceeds u={u!r}")
    return (s.top_sum(c) - c * u) / c


@dataclass(frozen=True)
class MePlotPoints:
    """ME plot: (threshold, mean excess) pairs over the order statistics."""

    points: np.ndarray  # shape (m, 2), thresholds descending

    def __len__(self) -> int:
        return len(self.points)

    def to_csv(self) -> str:
        return _points_csv(self.points, regime="none", meta="normalizer=identity")


@dataclass(frozen=True)
class ScaledSet:
    """Regime-scaled ME plot point set with its scaling metadata."""

    regime: str
    points: np.ndarray  # shape (m, 2)
    k: int
    scale_meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.points)

    def to_csv(self) -> str:
        meta = ",".join(f"{key}={value!r}" for key, value in self.scale_meta.items())
        return _points_csv(self.points, regime=self.regime, meta=meta)


def _points_csv(points: np.ndarray, regime: str, meta: str) -> str:
    buf = io.StringIO()
    buf.write(f"# regime={regime}\n")
    buf.write(f"# {meta}\n")
    for x, y in points:
        buf.write(f"{float(x)!r},{float(y)!r}\n")
    return buf.getvalue()


def me_plot(s: SortedSample) -> MePlotPoints:
    """ME plot points (X_(i), M-hat(X_(i))) for i = 2..n.

    Tied thresholds are emitted once; indices tied with the maximum are
    skipped because no strict exceedance exists there.
    """
    if s.n < 2:
        raise ParameterError("ME plot needs a sample of size >= 2")
    vals = s.values
    thresholds = np.unique(vals[1:])[::-1]  # distinct, descending
    thresholds = thresholds[thresholds < vals[0]]
    if thresholds.size == 0:
        raise DegenerateSampleError("all sample values are identical")
    counts = np.searchsorted(-vals, -thresholds, side="left")
    ordinates = (s._prefix[counts] - counts * thresholds) / counts
    return MePlotPoints(np.column_stack((thresholds, ordinates)))


def _me_at_indices(s: SortedSample, idx: np.ndarray):
    """M-hat at the order statistics s.values[idx]; NaN where no exceedance."""
    vals = s.values[idx]
    counts = np.searchsorted(-s.values, -vals, side="left")
    out = np.full(vals.shape, np.nan)
    ok = counts > 0
    out[ok] = (s._prefix[counts[ok]] - counts[ok] * vals[ok]) / counts[ok]
    return vals, out, ok


def scaled_set(s: SortedSample, k: int, regime: str) -> ScaledSet:
    """Scaled point set over the top k order statistics for one regime.

    Frechet scales by X_(k); Weibull recenters at X_(k) and scales by
    X_(1) - X_(k); Gumbel recenters at X_(k) and scales by
    (X_(ceil(k/2)) - X_(k)) / log 2.  The log 2 factor turns the spacing
    into a consistent estimate of the auxiliary function a(n/k) -- the
    raw spacing estimates a(n/k) * log 2, since the two order statistics
    sit at tail probabilities k/(2n) and k/n -- so that the ordinates of
    a Gumbel-domain sample concentrate near 1 rather than 1/log 2.
    """
    if regime not in REGIMES:
        raise ParameterError(f"unknown regime {regime!r}")
    if not 2 <= k < s.n:
        raise ParameterError(f"need 2 <= k < n, got k={k}, n={s.n}")
    vals = s.values
    idx = np.arange(1, k)  # order-statistic indices i = 2..k, 0-based
    x, me, ok = _me_at_indices(s, idx)
    x, me = x[ok], me[ok]
    if x.size == 0:
        raise DegenerateSampleError("no order statistic in 2..k has an exceedance")

    if regime == "frechet":
        norm = vals[k - 1]
        if norm <= 0:
            raise ScalingError(f"X_({k}) = {norm!r} must be positive for the Frechet scaling")
        points = np.column_stack((x / norm, me / norm))
        meta = {"normalizer": "X(k)", "X(k)": float(norm)}
    elif regime == "weibull":
        norm = vals[0] - vals[k - 1]
        if norm <= 0:
            raise ScalingError(
                f"X_(1) - X_({k}) = {norm!r} must be positive for the Weibull scaling"
            )
        points = np.column_stack(((x - vals[k - 1]) / norm, me / norm))
        meta = {"normalizer": "X(1)-X(k)", "X(1)": float(vals[0]), "X(k)": float(vals[k - 1])}
    else:
        half = math.ceil(k / 2)
        spacing = vals[half - 1] - vals[k - 1]
        if spacing <= 0:
            raise ScalingError(
                f"X_({half}) - X_({k}) = {spacing!r} must be positive for the Gumbel scaling"
            )
        norm = spacing / math.log(2.0)
        points = np.column_stack(((x - vals[k - 1]) / norm, me / norm))
        meta = {
            "normalizer": "(X(ceil(k/2))-X(k))/log2",
            "X(ceil(k/2))": float(vals[half - 1]),
            "X(k)": float(vals[k - 1]),
        }
    return ScaledSet(regime=regime, points=points, k=k, scale_meta=meta)


def extract_min_x_concomitant(s: ScaledSet) -> tuple[float, float]:
    """Point with minimal abscissa; ties broken by the smaller ordinate."""
    pts = s.points
    if len(pts) == 0:
        raise ParameterError("empty scaled set")
    xmin = pts[:, 0].min()
    at_min = pts[pts[:, 0] == xmin]
    return float(xmin), float(at_min[:, 1].min())
