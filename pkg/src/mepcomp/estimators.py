"""The alpha-L* estimator family and generic estimator evaluation.

For a fixed datum, the alpha-L* estimate solves ``x f(x) = alpha (L(x) - int_x^1 f)``
with ``L`` the lower-bound profile shifted so that ``L(1) = 0``.  The solution is
``alpha x**(alpha-1) int_x^1 y**(-alpha) dD(y)`` where ``D`` is the drop measure of the
profile.  Step profiles have atomic drops at the seed-interval boundaries, which
gives the closed form held by :class:`AlphaLForm`.  :class:`DensityAlphaL`
covers drops spread as a piecewise-constant density.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .hull import opt_square, ratio_value
from .instance import MepInstance, StepFn, lower_bound_fn


def _check_alpha(alpha):
    if not alpha >= 1:
        raise ValueError(f"alpha must be >= 1 (alpha < 1 is dominated by L*), got {alpha}")


@dataclass(frozen=True)
class AlphaLForm:
    """Estimate ``shift + alpha * C_k * x**(alpha-1)`` on ``(t_lo[k], t_hi[k]]``."""

    alpha: float
    shift: float
    t_lo: np.ndarray
    t_hi: np.ndarray
    C: np.ndarray

    def __call__(self, u):
        u_arr = np.asarray(u, dtype=float)
        if np.any(u_arr <= 0) or np.any(u_arr > 1):
            raise ValueError("seed must lie in (0, 1]")
        k = np.clip(np.searchsorted(self.t_hi, u_arr, side="left"), 0, len(self.C) - 1)
        out = self.shift + self.alpha * self.C[k] * u_arr ** (self.alpha - 1)
        return float(out) if np.ndim(out) == 0 else out

    def integral(self) -> float:
        a = self.alpha
        return float(np.sum(self.shift * (self.t_hi - self.t_lo) + self.C * (self.t_hi**a - self.t_lo**a)))

    def square(self) -> float:
        a = self.alpha
        lo, hi, C, s = self.t_lo, self.t_hi, self.C, self.shift
        e = 2 * a - 1
        terms = s * s * (hi - lo) + 2 * s * C * (hi**a - lo**a) + a * a * C * C * (hi**e - lo**e) / e
        return float(np.sum(terms))


def alpha_l_estimator(inst: MepInstance, v_index: int, alpha: float) -> AlphaLForm:
    _check_alpha(alpha)
    prof = lower_bound_fn(inst, v_index)
    b, c = prof.boundaries, prof.values
    shift = float(c[-1])
    drops = c[:-1] - c[1:]  # drop at b[1..K-1]
    weighted = drops * b[1:-1] ** (-alpha)
    # C_k sums the drops at boundaries >= t_hi[k]
    tail = np.concatenate((np.cumsum(weighted[::-1])[::-1], [0.0]))
    return AlphaLForm(float(alpha), shift, b[:-1].copy(), b[1:].copy(), tail)


def square_expectation_alphal(form: AlphaLForm) -> float:
    return form.square()


@dataclass(frozen=True)
class DensityAlphaL:
    """alpha-L* solution for a piecewise-constant drop density ``g`` (lower bound ``L(1) = 0``).

    On ``(t[i], t[i+1]]`` the estimate is ``A_i + B_i x**(alpha-1)`` for alpha > 1 and
    ``T_i + w_i log(t[i+1]/x)`` for alpha == 1.
    """

    alpha: float
    t: np.ndarray
    w: np.ndarray

    def _tail(self) -> np.ndarray:
        # T[i] = int_{t[i+1]}^1 y**-alpha g(y) dy
        a, t, w = self.alpha, self.t, self.w
        if a == 1:
            per = w[1:] * np.log(t[2:] / t[1:-1])
        else:
            per = w[1:] * (t[1:-1] ** (1 - a) - t[2:] ** (1 - a)) / (a - 1)
        return np.concatenate((np.cumsum(per[::-1])[::-1], [0.0]))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        a, t, w = self.alpha, self.t, self.w
        i = np.clip(np.searchsorted(t, x, side="left") - 1, 0, len(w) - 1)
        T = self._tail()[i]
        hi = t[i + 1]
        if a == 1:
            return T + w[i] * np.log(hi / x)
        return a * x ** (a - 1) * (T + w[i] * (x ** (1 - a) - hi ** (1 - a)) / (a - 1))

    def square(self) -> float:
        a, t, w = self.alpha, self.t, self.w
        lo, hi = t[:-1], t[1:]
        T = self._tail()
        if a == 1:
            with np.errstate(divide="ignore", invalid="ignore"):
                La = np.where(lo > 0, np.log(hi / np.where(lo > 0, lo, 1.0)), 0.0)
            int_L = hi - lo - lo * La
            int_L2 = 2 * hi - lo * La**2 - 2 * lo * La - 2 * lo
            return float(np.sum(T * T * (hi - lo) + 2 * T * w * int_L + w * w * int_L2))
        A = a * w / (a - 1)
        B = a * (T - w * hi ** (1 - a) / (a - 1))
        e = 2 * a - 1
        terms = A * A * (hi - lo) + 2 * A * B * (hi**a - lo**a) / a + B * B * (hi**e - lo**e) / e
        return float(np.sum(terms))


def alpha_l_density(t, w, alpha: float) -> DensityAlphaL:
    _check_alpha(alpha)
    t = np.asarray(t, dtype=float)
    w = np.asarray(w, dtype=float)
    if t[0] != 0 or t[-1] != 1 or len(t) != len(w) + 1:
        raise ValueError("density must tile (0, 1]")
    if np.any(w < 0):
        raise ValueError("density must be nonnegative")
    return DensityAlphaL(float(alpha), t, w)


@dataclass(frozen=True)
class EstimatorTable:
    """Admissible-estimator representation on a finite instance.

    ``y[k]`` is the estimate on seed interval ``k`` for every datum not yet
    revealed there; ``z[j]`` is the estimate for datum ``j`` on ``(0, v_j]``.
    """

    boundaries: np.ndarray
    values: np.ndarray
    y: np.ndarray
    z: np.ndarray

    def _unrevealed(self, j):
        return self.boundaries[:-1] >= self.values[j]

    def value(self, j: int, u: float) -> float:
        if not 0 < u <= 1:
            raise ValueError("seed must lie in (0, 1]")
        if u <= self.values[j]:
            return float(self.z[j])
        k = int(np.searchsorted(self.boundaries, u, side="left")) - 1
        return float(self.y[k])

    def integral(self, j: int) -> float:
        m = self._unrevealed(j)
        return float(self.values[j] * self.z[j] + np.sum(self.y[m] * np.diff(self.boundaries)[m]))

    def square(self, j: int) -> float:
        m = self._unrevealed(j)
        return float(self.values[j] * self.z[j] ** 2 + np.sum(self.y[m] ** 2 * np.diff(self.boundaries)[m]))

    def as_stepfn(self, j: int) -> StepFn:
        """The estimate for datum ``j`` as a function of the seed."""
        b = self.boundaries
        m = self._unrevealed(j)
        vj = self.values[j]
        if vj > 0:
            return StepFn(np.concatenate(([0.0], b[:-1][m], [1.0])), np.concatenate(([self.z[j]], self.y[m])))
        return StepFn(b, self.y.copy())

    def to_dict(self) -> dict:
        return {"y": self.y.tolist(), "z": self.z.tolist()}


Estimator = Union[AlphaLForm, DensityAlphaL, EstimatorTable, StepFn]


def evaluate(est: Estimator, v_index: int, u: float) -> float:
    """Estimate at seed ``u`` for datum ``v_index`` (right-closed intervals)."""
    if not 0 < u <= 1:
        raise ValueError("seed must lie in (0, 1]")
    if isinstance(est, EstimatorTable):
        return est.value(v_index, u)
    return float(est(u))


def square_expectation(est: Estimator, v_index: int | None = None) -> float:
    if isinstance(est, EstimatorTable):
        return est.square(v_index)
    if isinstance(est, StepFn):
        return est.square_integral()
    return est.square()


def integral(est: Estimator, v_index: int | None = None) -> float:
    if isinstance(est, EstimatorTable):
        return est.integral(v_index)
    return est.integral()


def unbiasedness_check(inst: MepInstance, est: Estimator, v_index: int) -> float:
    """Residual ``int_0^1 est(u) du - f(v)``."""
    return integral(est, v_index) - float(inst.f[v_index])


def ratio(inst: MepInstance, est: Estimator, v_index: int, opt: float | None = None) -> float:
    if opt is None:
        opt = opt_square(inst, v_index)
    return ratio_value(square_expectation(est, v_index), opt)


EstimatorFamily = Union[EstimatorTable, Callable[[int], Estimator]]


def ratios(inst: MepInstance, family: EstimatorFamily, opts=None) -> np.ndarray:
    """Per-datum ratios for a table or a callable ``v_index -> estimator``."""
    out = np.empty(inst.size)
    for j in range(inst.size):
        est = family if isinstance(family, EstimatorTable) else family(j)
        out[j] = ratio(inst, est, j, None if opts is None else opts[j])
    return out


def max_ratio(inst: MepInstance, family: EstimatorFamily, opts=None) -> tuple[float, int]:
    """Largest per-datum ratio and the index of the datum attaining it."""
    r = ratios(inst, family, opts)
    j = int(np.argmax(r))
    return float(r[j]), j


def alpha_l_family(inst: MepInstance, alpha: float) -> Callable[[int], AlphaLForm]:
    _check_alpha(alpha)
    return lambda j: alpha_l_estimator(inst, j, alpha)


def alpha_l_squares(inst: MepInstance, alpha: float) -> np.ndarray:
    """Expectation of the square of alpha-L* for every datum at once."""
    _check_alpha(alpha)
    b = inst.boundaries
    lo, hi = b[:-1], b[1:]
    e = 2 * alpha - 1
    seg_lin = hi**alpha - lo**alpha
    seg_sq = alpha * alpha * (hi**e - lo**e) / e
    bw = b[1:-1] ** (-alpha)
    out = np.empty(inst.size)
    P = inst.prefix_min[:-1]
    for j in range(inst.size):
        # pieces left of v_j sit at f(v_j); pieces at or right of it follow the prefix minimum
        c = np.where(lo < inst.values[j], inst.f[j], P)
        shift = c[-1]
        w = (c[:-1] - c[1:]) * bw
        C = np.concatenate((np.cumsum(w[::-1])[::-1], [0.0]))
        out[j] = np.sum(shift * shift * (hi - lo) + 2 * shift * C * seg_lin + C * C * seg_sq)
    return out


# ---------------------------------------------------------------------------
# in-range (truncated) variant on a refined seed grid


def _lambda_all(inst: MepInstance, rho: float, M: float, k: int) -> np.ndarray:
    """``lambda(rho, z, M)`` for every grid value ``z <= b_k``, with ``rho`` in interval ``k``."""
    b = inst.boundaries[: k + 1]
    P = inst.prefix_min[: k + 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        Q = (P - M) / (rho - b)
    Q = np.where(np.isfinite(P), Q, np.inf)
    sufmin = np.minimum.accumulate(Q[::-1])[::-1]
    zi = np.nonzero(inst.values <= b[-1])[0]
    s = inst.boundary_index[zi]
    lam = sufmin[s]
    pos = s > 0
    # eta strictly below z sees the revealed value f(z); eta = 0 is tightest
    lam[pos] = np.minimum(lam[pos], (inst.f[zi[pos]] - M) / rho)
    return lam


def _refined_walk(inst: MepInstance, v_index: int, alpha: float, m: int, truncate: bool) -> StepFn:
    _check_alpha(alpha)
    if m < 1:
        raise ValueError("refinement must be >= 1")
    b = inst.boundaries
    K = inst.partition.n_intervals
    v = inst.values[v_index]
    fv = inst.f[v_index]
    s = int(inst.boundary_index[v_index])
    shift = float(inst.prefix_min[K - 1]) if s < K else float(fv)
    M = 0.0
    edges = [1.0]
    vals = []
    for k in range(K - 1, s - 1, -1):
        P = inst.prefix_min[k]
        cells = np.linspace(b[k], b[k + 1], m + 1)
        for i in range(m, 0, -1):
            lo, hi = cells[i - 1], cells[i]
            Rs = max(P - M - hi * shift, 0.0)
            mass = shift * (hi - lo) + Rs * (1.0 - (lo / hi) ** alpha)
            val = mass / (hi - lo)
            if truncate:
                lam_u = float(np.max(_lambda_all(inst, hi, M, k)))
                val = min(val, lam_u)
            vals.append(val)
            edges.append(lo)
            M += val * (hi - lo)
    if v > 0:
        vals.append(max(fv - M, 0.0) / v)
        edges.append(0.0)
    return StepFn(np.array(edges[::-1]), np.array(vals[::-1]))


def alpha_l_truncated(inst: MepInstance, v_index: int, alpha: float, m: int = 16) -> StepFn:
    """In-range alpha-L*: estimate ``min(lambda_U, shift + alpha (lambda_L - shift))``.

    Computed right to left on ``m`` equal cells per seed interval.  Untruncated
    cells carry the exact cell average of the closed form, so alpha = 1 (never
    truncated) reproduces L* averaged per cell.
    """
    return _refined_walk(inst, v_index, alpha, m, truncate=True)


def alpha_l_refined(inst: MepInstance, v_index: int, alpha: float, m: int = 16) -> StepFn:
    """Untruncated alpha-L* on the same refined grid as :func:`alpha_l_truncated`."""
    return _refined_walk(inst, v_index, alpha, m, truncate=False)
