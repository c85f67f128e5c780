"""Limit sets of the scaled ME plots and windowed Hausdorff distances.

Convergence of the random plot sets is measured after truncation to the
box [0, M]^2, where each limit set reduces to a line segment: the
positive-slope ray (Frechet), the negative-slope segment (Weibull) or
the horizontal height-1 ray (Gumbel).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .empirical import REGIMES, ScaledSet
from .errors import ParameterError, RegimeMismatchError, WindowError

# Discretization pitch of the clipped limit segment, as a fraction of M.
# Bounds the limit-side supremum error by M * LIMIT_PITCH.
LIMIT_PITCH = 1e-4


@dataclass(frozen=True)
class Window:
    """Truncation box [0, m]^2."""

    m: float

    def __post_init__(self):
        if not self.m > 0:
            raise ParameterError(f"window size must be positive, got {self.m!r}")


@dataclass(frozen=True)
class LimitSet:
    """Parametric limit of a scaled ME plot set.

    Frechet: ray (t, c*t), t >= 1, with c = xi/(1-xi) > 0.
    Weibull: segment (t, c*(t-1)), 0 <= t <= 1, with c = xi/(1-xi) < 0.
    Gumbel:  horizontal ray (t, 1), t >= 0 (slope_param fixed at 1).
    """

    regime: str
    slope_param: float

    def clipped_endpoints(self, w: Window) -> tuple[np.ndarray, np.ndarray]:
        """Endpoints of the limit set intersected with [0, M]^2."""
        m = w.m
        c = self.slope_param
        if self.regime == "frechet":
            t_hi = min(m, m / c)
            if t_hi < 1:
                raise WindowError(
                    f"Frechet limit ray misses [0,{m}]^2; need M >= max(1, {c})"
                )
            return np.array([1.0, c]), np.array([t_hi, c * t_hi])
        if self.regime == "weibull":
            t_lo = max(0.0, 1.0 + m / c)  # c < 0: ordinate at t is -c*(1-t)
            t_hi = min(1.0, m)
            if t_lo > t_hi:
                raise WindowError(f"Weibull limit segment misses [0,{m}]^2")
            return (
                np.array([t_lo, c * (t_lo - 1.0)]),
                np.array([t_hi, c * (t_hi - 1.0)]),
            )
        if m < 1:
            raise WindowError(f"Gumbel limit at height 1 misses [0,{m}]^2")
        return np.array([0.0, 1.0]), np.array([m, 1.0])

    def discretize(self, w: Window) -> np.ndarray:
        """Points along the clipped limit at pitch <= M * LIMIT_PITCH."""
        a, b = self.clipped_endpoints(w)
        length = float(np.hypot(*(b - a)))
        count = max(2, math.ceil(length / (w.m * LIMIT_PITCH)) + 1)
        ts = np.linspace(0.0, 1.0, count)
        return a[None, :] + ts[:, None] * (b - a)[None, :]


def limit_set(regime: str, xi: float | None = None) -> LimitSet:
    """Limit set for a regime; xi is required except in the Gumbel case."""
    if regime not in REGIMES:
        raise ParameterError(f"unknown regime {regime!r}")
    if regime == "frechet":
        if xi is None or not 0 < xi < 1:
            raise RegimeMismatchError(f"Frechet limit needs 0 < xi < 1, got {xi!r}")
        return LimitSet("frechet", xi / (1.0 - xi))
    if regime == "weibull":
        if xi is None or not xi < 0:
            raise RegimeMismatchError(f"Weibull limit needs xi < 0, got {xi!r}")
        return LimitSet("weibull", xi / (1.0 - xi))
    return LimitSet("gumbel", 1.0)


def _as_points(points) -> np.ndarray:
    if isinstance(points, ScaledSet):
        points = points.points
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != 2:
        raise ParameterError("expected an array of planar points")
    return pts


def _clip_points(pts: np.ndarray, w: Window) -> np.ndarray:
    keep = (
        (pts[:, 0] >= 0) & (pts[:, 0] <= w.m) & (pts[:, 1] >= 0) & (pts[:, 1] <= w.m)
    )
    return pts[keep]


def _dist_to_segment(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact Euclidean distance from each point to the segment [a, b]."""
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return np.hypot(pts[:, 0] - a[0], pts[:, 1] - a[1])
    t = np.clip(((pts - a) @ ab) / denom, 0.0, 1.0)
    proj = a[None, :] + t[:, None] * ab[None, :]
    return np.hypot(pts[:, 0] - proj[:, 0], pts[:, 1] - proj[:, 1])


def point_to_limit_distance(p, limit: LimitSet, w: Window) -> float:
    """Closed-form distance from one point to the window-clipped limit."""
    a, b = limit.clipped_endpoints(w)
    return float(_dist_to_segment(_as_points([p]), a, b)[0])


def hausdorff_windowed(points, limit: LimitSet, w: Window) -> float:
    """Hausdorff distance between the clipped point set and clipped limit.

    The point-to-limit side uses exact segment projections; the
    limit-to-points side discretizes the segment at pitch M * LIMIT_PITCH.
    """
    pts = _clip_points(_as_points(points), w)
    if pts.shape[0] == 0:
        raise WindowError(f"point set is empty inside [0,{w.m}]^2")
    a, b = limit.clipped_endpoints(w)
    side_points = float(_dist_to_segment(pts, a, b).max())
    grid = limit.discretize(w)
    side_limit = float(cKDTree(pts).query(grid, k=1)[0].max())
    return max(side_points, side_limit)


def hausdorff_points(a, b) -> float:
    """Hausdorff distance between two finite point sets (both directions)."""
    pa, pb = _as_points(a), _as_points(b)
    d_ab = cKDTree(pb).query(pa, k=1)[0].max()
    d_ba = cKDTree(pa).query(pb, k=1)[0].max()
    return float(max(d_ab, d_ba))
