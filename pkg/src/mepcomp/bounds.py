"""Closed-form constants for the alpha-L* family and the power-function worst case."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _check_alpha(alpha):
    if not alpha >= 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")


def universal_upper(alpha: float) -> float:
    """Competitive ratio guaranteed by alpha-L* on every instance."""
    _check_alpha(alpha)
    return 4 * alpha**3 / (2 * alpha - 1) ** 2


def worstcase_lower(alpha: float) -> float:
    """Supremum of the alpha-L* ratio over the ``1 - v**p`` family (p -> 1/2)."""
    _check_alpha(alpha)
    return 4 * alpha**2 / (2 * alpha - 1) ** 2


def convex_bound(alpha: float) -> float:
    """Ratio bound when the lower-bound profile is convex."""
    _check_alpha(alpha)
    return (2 * alpha / (2 * alpha - 1)) ** 2


@dataclass(frozen=True)


class BoundsRow:
    alpha: float
    upper: float
    worst_lower: float
    convex: float


def bounds_row(alpha: float) -> BoundsRow:
    return BoundsRow(float(alpha), universal_upper(alpha), worstcase_lower(alpha), convex_bound(alpha))


def _check_p(p):
    if not 0.5 < p <= 1:
        raise ValueError(f"p must be in (0.5, 1] for a square-integrable optimum, got {p}")


def power_opt_square(p: float) -> float:
    """OPT at v = 0 for ``f(v) = 1 - v**p`` on the continuum."""
    _check_p(p)
    return p * p / (2 * p - 1)


def power_alphal_square(alpha: float, p: float) -> float:
    """Expectation of the square of alpha-L* at v = 0 for ``1 - v**p``."""
    _check_alpha(alpha)
    _check_p(p)
    return power_alphal_ratio(alpha, p) * power_opt_square(p)


def power_alphal_ratio(alpha: float, p: float) -> float:
    _check_alpha(alpha)
    _check_p(p)
    return 2 * alpha**2 / ((2 * alpha - 1) * (alpha + p - 1))


def power_alphal_estimate(alpha: float, p: float, x):
    """alpha-L* estimate at seed ``x`` for data 0 of ``1 - v**p``; log branch at alpha == p."""
    _check_alpha(alpha)
    if not 0 < p <= 1:
        raise ValueError("p must be in (0, 1]")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or np.any(x > 1):
        raise ValueError("x must be in (0, 1]")
    if alpha == p:
        out = alpha * alpha * x ** (alpha - 1) * np.log(1 / x)
    else:
        out = alpha * p / (alpha - p) * (x ** (p - 1) - x ** (alpha - 1))
    return float(out) if out.ndim == 0 else out


def optimal_alpha() -> float:
    """Minimiser of the universal bound (27/8 at alpha = 3/2)."""
    return 1.5

__all__ = [
    "BoundsRow",
    "bounds_row",
    "convex_bound",
    "optimal_alpha",
    "power_alphal_estimate",
    "power_alphal_ratio",
    "power_alphal_square",
    "power_opt_square",
    "universal_upper",
    "worstcase_lower",
]

