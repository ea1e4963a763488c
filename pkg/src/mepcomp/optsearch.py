"""Instance-optimal competitive estimators on finite threshold-sampling instances.

``feasible_estimator`` fixes the shared estimate on seed intervals from right
to left.  Each interval takes the largest value that keeps, for every datum
still unrevealed there, the already-committed square plus the cheapest
possible completion below ``c * OPT``.  ``optimal_ratio`` bisects on ``c``.

The cheapest completion of datum ``j`` pinned at ``(b_k, M)`` is a lower hull
whose last edge is the tangent from ``(b_k, M)``; everything left of the
tangent point is the hull of a prefix of the profile points.  Those prefix
energies do not depend on ``c`` or ``M`` and are tabulated once per instance,
so a completion costs one suffix-minimum scan.

Taking the largest value per interval matches the minimax optimum on the
``1 - v**p`` and ``(1 - v)**p`` families.  On other instances the greedy can
stop above the optimum, so ``c_star`` is an upper bound there; the witness
table is always verified to be ``c``-competitive.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numba
import numpy as np

from .estimators import EstimatorTable, alpha_l_squares
from .hull import ratio_value
from .instance import MepInstance, family_instance

log = logging.getLogger(__name__)

SEARCH_SLACK = 1e-10
VERIFY_SLACK = 1e-9
BISECT_STEPS = 64


class BracketError(RuntimeError):
    """The ratio search could not find a feasible upper end."""


@numba.njit(cache=True)
def _prefix_energy_table(b, P, fv, s):
    """``E[j, l]``: energy of the lower hull of datum j's points up to point ``l``.

    Datum j's points are ``(0, f_j)`` followed by ``(b_l, P_l)`` for ``s_j <= l < K``;
    column ``K`` is the pinned endpoint ``(1, 0)`` so ``E[j, K]`` is OPT.
    """
    n = fv.shape[0]
    K = b.shape[0] - 1
    E = np.full((n, K + 1), np.nan)
    xs = np.empty(K + 2)
    ys = np.empty(K + 2)
    en = np.empty(K + 2)
    for j in range(n):
        top = 0
        xs[0] = 0.0
        ys[0] = fv[j]
        en[0] = 0.0
        start = s[j]
        if start == 0:
            E[j, 0] = 0.0
            start = 1
        for l in range(start, K + 1):
            if l < K:
                x = b[l]
                y = P[l]
            else:
                x = 1.0
                y = 0.0
            while top >= 1:
                s_prev = (ys[top - 1] - ys[top]) / (xs[top] - xs[top - 1])
                s_new = (ys[top] - y) / (x - xs[top])
                if s_new > s_prev:
                    top -= 1
                else:
                    break
            sl = (ys[top] - y) / (x - xs[top])
            e = en[top] + sl * sl * (x - xs[top])
            top += 1
            xs[top] = x
            ys[top] = y
            en[top] = e
            E[j, l] = e
    return E


@numba.njit(cache=True)
def _violation(y, k, M, S, c, b, P, fv, s, E, opt, nk, sufmin, sufarg, out_phi, out_lam):
    """Fill per-datum ``phi_j(y)`` and tangent slopes for interval ``k``; return worst excess index."""
    bk = b[k]
    dk = b[k + 1] - bk
    M2 = M + y * dk
    S2 = S + y * y * dk
    lo_i = s[0]
    best = np.inf
    barg = -1
    for i in range(k - 1, lo_i - 1, -1):
        r = (P[i] - M2) / (bk - b[i])
        if r <= best:
            best = r
            barg = i
        sufmin[i] = best
        sufarg[i] = barg
    worst = -1
    worst_ex = 0.0
    for j in range(nk):
        a_ratio = (fv[j] - M2) / bk
        if s[j] < k and sufmin[s[j]] < a_ratio:
            lam = sufmin[s[j]]
            p = sufarg[s[j]]
            comp = E[j, p] + lam * lam * (bk - b[p])
        else:
            lam = a_ratio
            comp = lam * lam * bk
        phi = S2 + comp
        out_phi[j] = phi
        out_lam[j] = lam
        ex = phi - c * opt[j] * (1.0 + SEARCH_SLACK)
        if ex > worst_ex:
            worst_ex = ex
            worst = j
    return worst


@numba.njit(cache=True)
def _max_y(k, M, S, c, b, P, fv, s, E, opt, nk, sufmin, sufarg, phi, lam):
    """Largest feasible shared value on interval ``k``; returns (y, binding datum or -1)."""
    dk = b[k + 1] - b[k]
    cap = (P[k] - M) / dk
    if cap < 0.0:
        cap = 0.0

    def upper_ok(y):
        _violation(y, k, M, S, c, b, P, fv, s, E, opt, nk, sufmin, sufarg, phi, lam)
        for j in range(nk):
            if phi[j] > c * opt[j] * (1.0 + SEARCH_SLACK) and y >= lam[j]:
                return False
        return True

    if upper_ok(cap):
        y = cap
    else:
        lo = 0.0
        hi = cap
        if not upper_ok(lo):
            w = _violation(lo, k, M, S, c, b, P, fv, s, E, opt, nk, sufmin, sufarg, phi, lam)
            return 0.0, max(w, 0)
        for _ in range(BISECT_STEPS):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if upper_ok(mid):
                lo = mid
            else:
                hi = mid
        y = lo
    w = _violation(y, k, M, S, c, b, P, fv, s, E, opt, nk, sufmin, sufarg, phi, lam)
    return y, w


@numba.njit(cache=True)
def _greedy(c, b, P, fv, s, E, opt, counts):
    K = b.shape[0] - 1
    n = fv.shape[0]
    y = np.zeros(K)
    sufmin = np.empty(K)
    sufarg = np.empty(K, dtype=np.int64)
    phi = np.empty(n)
    lam = np.empty(n)
    M = 0.0
    S = 0.0
    for k in range(K - 1, -1, -1):
        nk = counts[k]
        if nk == 0:
            continue
        dk = b[k + 1] - b[k]
        if b[k] == 0.0:
            # only v_0 = 0 is left; unbiasedness forces the value
            yk = (fv[0] - M) / dk
            if yk < 0.0:
                return y, k, 0
            S2 = S + yk * yk * dk
            if S2 > c * opt[0] * (1.0 + SEARCH_SLACK):
                y[k] = yk
                return y, k, 0
            y[k] = yk
            M += yk * dk
            S = S2
            continue
        yk, w = _max_y(k, M, S, c, b, P, fv, s, E, opt, nk, sufmin, sufarg, phi, lam)
        y[k] = yk
        if w >= 0:
            return y, k, w
        M += yk * dk
        S += yk * yk * dk
    return y, -1, -1


@dataclass(frozen=True)
class FeasibilityOutcome:
    feasible: bool
    c: float
    table: EstimatorTable | None = None
    per_v_ratio: np.ndarray | None = None
    fail_interval: int | None = None
    binding_datum: int | None = None

    @property
    def status(self) -> str:
        return "feasible" if self.feasible else "infeasible"


@dataclass(frozen=True)
class OptimalResult:
    c_star: float
    table: EstimatorTable
    bracket: tuple[float, float]
    iterations: int
    ratios: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "c_star": self.c_star,
            "bracket": [self.bracket[0], self.bracket[1]],
            "table": self.table.to_dict(),
            "ratios": [r if np.isfinite(r) else None for r in self.ratios.tolist()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


class OptimalSearch:
    """Per-instance precomputation shared by every feasibility call."""

    def __init__(self, inst: MepInstance):
        self.inst = inst
        self.b = inst.boundaries.copy()
        K = len(self.b) - 1
        self.P = inst.prefix_min[:K].copy()
        self.fv = inst.f.copy()
        self.s = inst.boundary_index.astype(np.int64)
        self.E = _prefix_energy_table(self.b, self.P, self.fv, self.s)
        self.opt = self.E[:, K].copy()
        # number of data unrevealed on each interval (s_j <= k)
        self.counts = np.searchsorted(self.s, np.arange(K), side="right").astype(np.int64)
        self._lstar = None

    @property
    def lstar_max_ratio(self) -> float:
        if self._lstar is None:
            sq = alpha_l_squares(self.inst, 1.0)
            self._lstar = max(ratio_value(a, o) for a, o in zip(sq, self.opt))
        return self._lstar

    def max_shared_value(self, k: int, M: float, S: float, c: float) -> float:
        """Largest feasible shared estimate on interval ``k`` given committed mass and square.

        Raises ``ValueError`` when no value satisfies every unrevealed datum.
        """
        nk = int(self.counts[k])
        K = len(self.b) - 1
        if nk == 0:
            return 0.0
        if self.b[k] == 0.0:
            return (self.fv[0] - M) / (self.b[1] - self.b[0])
        y, w = _max_y(k, M, S, c, self.b, self.P, self.fv, self.s, self.E, self.opt, nk,
                      np.empty(K), np.empty(K, dtype=np.int64), np.empty(len(self.fv)), np.empty(len(self.fv)))
        if w >= 0:
            raise ValueError(f"no feasible shared value on interval {k}; binding datum {w}")
        return y

    def table_from_shared(self, y) -> EstimatorTable:
        b = self.b
        dk = np.diff(b)
        tail = np.concatenate((np.cumsum((y * dk)[::-1])[::-1], [0.0]))
        M = tail[self.s]
        v = self.inst.values
        z = np.where(v > 0, (self.fv - M) / np.where(v > 0, v, 1.0), 0.0)
        z = np.maximum(z, 0.0)
        return EstimatorTable(b.copy(), v.copy(), np.asarray(y, dtype=float).copy(), z)

    def ratios(self, table: EstimatorTable) -> np.ndarray:
        return np.array([ratio_value(table.square(j), self.opt[j]) for j in range(len(self.fv))])

    def feasible(self, c: float) -> FeasibilityOutcome:
        if c < 1:
            raise ValueError("c must be >= 1")
        y, fk, fj = _greedy(float(c), self.b, self.P, self.fv, self.s, self.E, self.opt, self.counts)
        if fk >= 0:
            return FeasibilityOutcome(False, c, fail_interval=int(fk), binding_datum=int(fj))
        table = self.table_from_shared(y)
        r = self.ratios(table)
        bad = np.nonzero(r > c * (1 + VERIFY_SLACK))[0]
        if bad.size:
            j = int(bad[np.argmax(r[bad])])
            return FeasibilityOutcome(False, c, table, r, fail_interval=int(self.s[j]), binding_datum=j)
        return FeasibilityOutcome(True, c, table, r)


def feasible_estimator(inst: MepInstance, c: float) -> FeasibilityOutcome:
    return OptimalSearch(inst).feasible(c)


def max_shared_value(search: OptimalSearch, k: int, M: float, S: float, c: float) -> float:
    return search.max_shared_value(k, M, S, c)


def optimal_ratio(inst: MepInstance, tol: float = 1e-4, max_widen: int = 6,
                  search: OptimalSearch | None = None) -> OptimalResult:
    """Smallest ``c`` (to within ``tol``) for which a c-competitive estimator exists."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    search = search or OptimalSearch(inst)
    iters = 0
    at_one = search.feasible(1.0)
    iters += 1
    if at_one.feasible:
        return OptimalResult(1.0, at_one.table, (1.0, 1.0), iters, at_one.per_v_ratio)
    hi = max(search.lstar_max_ratio, 4.0)
    best = search.feasible(hi)
    iters += 1
    widen = 0
    while not best.feasible:
        log.warning("greedy construction infeasible at c=%g (at or above the L* ratio)", hi)
        widen += 1
        if widen > max_widen:
            raise BracketError(f"no feasible estimator found up to c={hi}")
        hi *= 2
        best = search.feasible(hi)
        iters += 1
    lo = 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        out = search.feasible(mid)
        iters += 1
        if out.feasible:
            hi, best = mid, out
        else:
            lo = mid
    return OptimalResult(0.5 * (lo + hi), best.table, (lo, hi), iters, best.per_v_ratio)


@dataclass(frozen=True)
class SweepRow:
    p: float
    c_star: float
    lstar_ratio: float


@dataclass(frozen=True)
class SweepResult:
    family: str
    n: int
    rows: list

    @property
    def best(self) -> SweepRow:
        return max(self.rows, key=lambda r: r.c_star)

    def to_dict(self) -> dict:
        b = self.best
        return {
            "family": self.family,
            "n": self.n,
            "rows": [{"p": r.p, "c_star": r.c_star, "lstar_ratio": r.lstar_ratio} for r in self.rows],
            "max_c_star": b.c_star,
            "argmax_p": b.p,
        }


def _sweep_one(args):
    family, p, n, tol = args
    search = OptimalSearch(family_instance(family, p, n))
    res = optimal_ratio(search.inst, tol, search=search)
    return SweepRow(float(p), res.c_star, search.lstar_max_ratio)


def sweep_optimal(family: str, ps, n: int, tol: float = 1e-4, workers: int | None = None) -> SweepResult:
    """Optimal ratio and L* ratio for each ``p``; ``workers > 1`` runs in a process pool."""
    jobs = [(family, float(p), int(n), tol) for p in ps]
    if workers and workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as pool:
            rows = list(pool.map(_sweep_one, jobs))
    else:
        rows = [_sweep_one(j) for j in jobs]
    return SweepResult(family, int(n), rows)
