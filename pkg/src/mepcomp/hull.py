"""Lower convex hulls of lower-bound profiles and the v-optimal estimates they induce.

The v-optimal estimate is the negated slope of the greatest convex minorant of
the lower-bound profile, pinned at ``(rho, M)``.  For step profiles the
minorant only touches the profile at the left ends of the pieces, so a
monotone-chain scan over those points is exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instance import MepInstance, StepFn, lower_bound_fn

FEAS_TOL = 1e-12


class InfeasibleExtensionError(ValueError):
    """The pinned endpoint lies above what the lower-bound profile allows."""


@dataclass(frozen=True)
class HullSegments:
    vertices: np.ndarray  # shape (k, 2), x strictly increasing
    neg_slopes: np.ndarray

    @property
    def xs(self) -> np.ndarray:
        return self.vertices[:, 0]

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.vertices[:, 0])

    def energy(self) -> float:
        """Integral of the squared negated slope."""
        return float(np.sum(self.neg_slopes**2 * self.lengths))

    def mass(self) -> float:
        return float(np.sum(self.neg_slopes * self.lengths))

    def as_stepfn(self) -> StepFn:
        return StepFn(self.xs, self.neg_slopes)


def convex_minorant(xs, ys) -> np.ndarray:
    """Indices of the lower convex hull of points sorted by strictly increasing x.

    Collinear points are kept as vertices.  Convexity is tested on the same
    negated slopes that are reported, so the result is exactly monotone.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    stack: list[int] = []
    for i in range(len(xs)):
        while len(stack) >= 2:
            a, b = stack[-2], stack[-1]
            s_prev = (ys[a] - ys[b]) / (xs[b] - xs[a])
            s_new = (ys[b] - ys[i]) / (xs[i] - xs[b])
            if s_new > s_prev:
                stack.pop()
            else:
                break
        stack.append(i)
    return np.array(stack, dtype=int)


def hull_of_points(xs, ys) -> HullSegments:
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    idx = convex_minorant(xs, ys)
    hx, hy = xs[idx], ys[idx]
    neg = (hy[:-1] - hy[1:]) / np.diff(hx)
    return HullSegments(np.column_stack([hx, hy]), neg)


def lower_hull(profile: StepFn, anchor0: float, endpoint: tuple[float, float]) -> HullSegments:
    """Greatest convex chain below ``profile`` on ``(0, rho)`` through ``(rho, M)``."""
    rho, M = float(endpoint[0]), float(endpoint[1])
    b = profile.boundaries
    if not b[0] < rho <= b[-1]:
        raise ValueError(f"endpoint abscissa {rho} outside ({b[0]}, {b[-1]}]")
    cap = profile(rho)
    if M > cap + FEAS_TOL * max(1.0, abs(cap)):
        raise InfeasibleExtensionError(f"endpoint value {M} exceeds the profile bound {cap} at {rho}")
    starts = b[:-1]
    keep = starts < rho
    xs = starts[keep]
    ys = profile.values[keep].copy()
    # the first piece starts at the anchor abscissa
    ys[0] = min(ys[0], anchor0)
    xs = np.append(xs, rho)
    ys = np.append(ys, M)
    return hull_of_points(xs, ys)


def v_optimal_hull(inst: MepInstance, v_index: int) -> HullSegments:
    prof = lower_bound_fn(inst, v_index)
    return lower_hull(prof, prof.limit0, (1.0, 0.0))


def v_optimal_estimator(inst: MepInstance, v_index: int) -> StepFn:
    """Minimum-variance unbiased nonnegative estimates for datum ``v_index``."""
    return v_optimal_hull(inst, v_index).as_stepfn()


def opt_square(inst: MepInstance, v_index: int) -> float:
    """OPT(v): the least expectation of the square of any unbiased nonnegative estimator."""
    return v_optimal_hull(inst, v_index).energy()


def opt_squares(inst: MepInstance) -> np.ndarray:
    return np.array([opt_square(inst, i) for i in range(inst.size)])


def _check_mass(inst, v_index, rho, M):
    if not 0 < rho <= 1:
        raise ValueError(f"rho must be in (0, 1], got {rho}")
    prof = lower_bound_fn(inst, v_index)
    cap = prof(rho)
    if M < -FEAS_TOL or M > cap + FEAS_TOL * max(1.0, cap):
        raise InfeasibleExtensionError(f"committed mass {M} outside [0, {cap}]")
    return prof


def lambda_point(inst: MepInstance, v_index: int, rho: float, M: float) -> float:
    """The v-optimal estimate at seed ``rho`` given mass ``M`` already placed on ``(rho, 1]``.

    The infimum over ``eta in [0, rho)`` is attained at a piece start, so only
    those are scanned.
    """
    prof = _check_mass(inst, v_index, rho, M)
    starts = prof.boundaries[:-1]
    keep = starts < rho
    eta = starts[keep]
    right_vals = prof.values[keep].copy()
    right_vals[0] = prof.limit0
    return float(np.min((right_vals - M) / (rho - eta)))


def lambda_bounds(inst: MepInstance, rho: float, M: float, consistent=None) -> tuple[float, float]:
    """``(lambda_L, lambda_U)``: the ends of the admissible range at outcome ``(rho, consistent)``.

    ``consistent`` defaults to the unrevealed outcome at ``rho`` (grid values below it).
    """
    if consistent is None:
        consistent = inst.consistent_indices(rho)
    consistent = np.atleast_1d(np.asarray(consistent, dtype=int))
    if consistent.size == 0:
        raise ValueError("empty consistent set")
    low = float(inst.f[consistent].min())
    lam_l = (low - M) / rho
    lam_u = max(lambda_point(inst, int(z), rho, M) for z in consistent)
    return lam_l, lam_u


def optimal_completion(inst: MepInstance, v_index: int, rho: float, M: float) -> HullSegments:
    """Variance-optimal extension on ``(0, rho]`` for datum ``v_index`` given mass ``M`` beyond ``rho``."""
    prof = _check_mass(inst, v_index, rho, M)
    return lower_hull(prof, prof.limit0, (rho, M))


def optimal_completion_square(inst: MepInstance, v_index: int, rho: float, M: float) -> float:
    return optimal_completion(inst, v_index, rho, M).energy()


def ratio_value(square: float, opt: float) -> float:
    """Competitive ratio with the degenerate convention for ``OPT == 0``."""
    if opt == 0:
        return 1.0 if square == 0 else float("inf")
    return square / opt
