"""Extrapolating the asymptotic distance from the recorded decay of D^2.

Squared distances of a Gilbert run decay roughly like a + b/c in the number
of corrections c. The offset a is chosen to make 1/(l - a) as linear in c as
possible, measured by the Pearson correlation, after dropping the first third
of the history. The estimated distance is sqrt(a).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .operators import NumericalError

MIN_POINTS = 9
EPS = 1e-12
GRID_POINTS = 1000
REFINE_TOL = 1e-10


class DegenerateHistoryError(NumericalError):
    pass


@dataclass(frozen=True)
class EstimatorResult:
    d_est: float
    a_star: float
    r_star: float

    def to_json(self) -> dict:
        return {"d_est": self.d_est, "a_star": self.a_star, "r_star": self.r_star}


def pearson(x: np.ndarray, y: np.ndarray) -> float:
    """Covariance over the product of standard deviations."""
    dx, dy = x - x.mean(), y - y.mean()
    sx, sy = np.sqrt(np.mean(dx * dx)), np.sqrt(np.mean(dy * dy))
    if sx == 0 or sy == 0 or not np.isfinite(sx * sy):
        return float("nan")
    return float(np.clip(np.mean(dx * dy) / (sx * sy), -1.0, 1.0))


def trimmed(history: Sequence[tuple[int, float]]) -> tuple[np.ndarray, np.ndarray]:
    """Correction indices and squared distances with the first third dropped."""
    h = np.asarray(history, dtype=float).reshape(-1, 2)
    h = h[len(h) // 3 :]
    return h[:, 0], h[:, 1]


def estimate(history: Sequence[tuple[int, float]]) -> EstimatorResult:
    c, l = trimmed(history)
    if len(l) < MIN_POINTS:
        raise DegenerateHistoryError(f"need at least {MIN_POINTS} points after trimming, got {len(l)}")
    if np.any(l <= 0):
        raise DegenerateHistoryError("squared distances must be positive")
    if np.ptp(l) == 0:
        raise DegenerateHistoryError("degenerate history: constant squared distances")
    upper = float(l.min()) - EPS
    if upper <= 0:
        raise DegenerateHistoryError("squared distances too close to zero to fit an offset")

    def r_of(a: float) -> float:
        r = pearson(c, 1 / (l - a))
        return -2.0 if np.isnan(r) else r

    grid = np.linspace(0.0, upper, GRID_POINTS)
    values = np.array([r_of(a) for a in grid])
    i = int(np.argmax(values))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, GRID_POINTS - 1)]
    a_star, r_star = float(grid[i]), float(values[i])
    if hi > lo:
        res = minimize_scalar(lambda a: -r_of(a), bounds=(lo, hi), method="bounded", options={"xatol": REFINE_TOL})
        if -res.fun > r_star:
            a_star, r_star = float(res.x), float(-res.fun)
    if r_star < -1:
        raise DegenerateHistoryError("correlation undefined for every offset")
    return EstimatorResult(float(np.sqrt(a_star)), a_star, r_star)
