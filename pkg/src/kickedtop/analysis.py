"""Scaling-law fits and characteristic time scales.

Exponents come from unweighted least squares in log-log space; the slope
transition of the fractional QFI is two such fits split at a stated
fractional access.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ScalingFit",
    "CharacteristicTimes",
    "fit_power_law",
    "characteristic_times",
    "slope_transition",
    "default_time_grid",
]


@dataclass(frozen=True)
class ScalingFit:
    axis: str                 # "time" or "subsystem"
    window: tuple[float, float]
    exponent: float
    intercept: float          # log of the prefactor
    r_squared: float
    n_points: int
    stderr: float             # standard error of the exponent
    n_excluded: int = 0       # nonpositive samples dropped before fitting


@dataclass(frozen=True)
class CharacteristicTimes:
    t_ehrenfest: float
    t_heisenberg: float
    j: float
    lam: float


def fit_power_law(samples: Iterable[tuple[float, float]],
                  window: tuple[float, float],
                  axis: str = "time") -> ScalingFit:
    """OLS fit of log(y) = intercept + s log(x) over x in [window[0], window[1]]."""
    lo, hi = window
    if not lo < hi:
        raise ValueError(f"empty window {window}")
    kept, n_excluded = [], 0
    for x, y in samples:
        if not lo <= x <= hi:
            continue
        if y <= 0.0 or x <= 0.0:
            n_excluded += 1
            continue
        kept.append((x, y))
    if len(kept) < 3:
        raise ValueError(f"need at least 3 in-window samples, got {len(kept)}")
    log_x = np.log([x for x, _ in kept])
    log_y = np.log([y for _, y in kept])
    n = len(kept)
    x_centered = log_x - log_x.mean()
    sxx = float(x_centered @ x_centered)
    if sxx == 0.0:
        raise ValueError("all in-window samples share one x value")
    slope = float(x_centered @ (log_y - log_y.mean())) / sxx
    intercept = float(log_y.mean() - slope * log_x.mean())
    residuals = log_y - (intercept + slope * log_x)
    ss_res = float(residuals @ residuals)
    ss_tot = float(np.sum((log_y - log_y.mean()) ** 2))
    r_squared = 1.0 if ss_tot <= 1e-300 else max(0.0, 1.0 - ss_res / ss_tot)
    stderr = math.sqrt(ss_res / (n - 2) / sxx) if n > 2 else 0.0
    return ScalingFit(axis=axis, window=(float(lo), float(hi)), exponent=slope,
                      intercept=intercept, r_squared=min(r_squared, 1.0),
                      n_points=n, stderr=stderr, n_excluded=n_excluded)


def characteristic_times(j: float, lam: float) -> CharacteristicTimes:
    """Ehrenfest time ln(2j)/lambda and Heisenberg time j/3."""
    if j <= 0:
        raise ValueError(f"j must be positive, got {j}")
    if lam <= 0:
        raise ValueError(f"Ehrenfest time undefined for lambda <= 0, got {lam}")
    return CharacteristicTimes(t_ehrenfest=math.log(2.0 * j) / lam,
                               t_heisenberg=j / 3.0, j=float(j), lam=float(lam))


def slope_transition(samples: Sequence[tuple[float, float]],
                     split: float) -> tuple[ScalingFit, ScalingFit]:
    """Log-log slopes below and above ``split`` in the x variable."""
    xs = [x for x, _ in samples]
    if not xs:
        raise ValueError("no samples")
    below = fit_power_law(samples, (min(xs), split), axis="subsystem")
    above = fit_power_law(samples, (split, max(xs)), axis="subsystem")
    return below, above


def default_time_grid(t_max: int, dense_until: int = 64) -> list[int]:
    """Stroboscopic sampling: every period up to ``dense_until``, then powers of 2."""
    if t_max < 0:
        raise ValueError("t_max must be nonnegative")
    times = set(range(0, min(dense_until, t_max) + 1))
    power = 1
    while power <= t_max:
        if power > dense_until:
            times.add(power)
        power *= 2
    return sorted(times)
