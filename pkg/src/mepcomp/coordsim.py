"""Coordinated PPS samples of two keyed rows and L_p^p estimation from them.

Each key gets one seed ``u`` from a salted hash; an entry ``v`` is sampled iff
``v >= u``, in both rows with the same ``u``.  Per key this is a monotone
estimation problem for ``|v1 - v2|**p``.  Its lower-bound profile is
``(w_max - u)**p`` once only the larger value is visible, so the drops have
density ``p (w_max - y)**(p-1)`` on ``(w_min, w_max)`` and the alpha-L*
estimate can be computed from the sample alone.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import integrate

_SCALE = 2.0**-53


def hash_seed(key, salt: int) -> float:
    """Deterministic seed in ``(0, 1)`` from ``(key, salt)`` with 53 bits of resolution."""
    h = hashlib.blake2b(str(key).encode(), digest_size=8, salt=int(salt & (2**64 - 1)).to_bytes(8, "little"))
    return ((int.from_bytes(h.digest(), "little") >> 11) + 0.5) * _SCALE


@dataclass(frozen=True)
class KeyedDataset:
    keys: list
    v1: np.ndarray
    v2: np.ndarray

    def __post_init__(self):
        v1 = np.asarray(self.v1, dtype=float)
        v2 = np.asarray(self.v2, dtype=float)
        if not len(self.keys) == len(v1) == len(v2):
            raise ValueError("keys and rows must have equal length")
        for v in (v1, v2):
            if np.any(~np.isfinite(v)) or np.any(v < 0) or np.any(v > 1):
                raise ValueError("row values must lie in [0, 1]")
        object.__setattr__(self, "keys", list(self.keys))
        object.__setattr__(self, "v1", v1)
        object.__setattr__(self, "v2", v2)

    def truth(self, p: float) -> float:
        return float(np.sum(np.abs(self.v1 - self.v2) ** p))


@dataclass(frozen=True)
class SampleRecord:
    key: object
    seed: float
    included: tuple[bool, bool]
    values: tuple[float | None, float | None]


def coordinated_sample(ds: KeyedDataset, salt: int) -> list[SampleRecord]:
    out = []
    for key, a, b in zip(ds.keys, ds.v1, ds.v2):
        u = hash_seed(key, salt)
        inc = (bool(a >= u), bool(b >= u))
        out.append(SampleRecord(key, u, inc, (float(a) if inc[0] else None, float(b) if inc[1] else None)))
    return out


def _power_integral(lo, hi, beta):
    """``int_lo^hi y**beta dy`` with the log branch at ``beta == -1``."""
    if beta == -1:
        return np.log(hi / lo)
    return (hi ** (beta + 1) - lo ** (beta + 1)) / (beta + 1)


def _drop_integral(lo, hi, p: float, alpha: float):
    """``int_lo^hi y**-alpha * p (hi - y)**(p-1) dy`` for arrays ``0 < lo <= hi``."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if float(p).is_integer():
        q = int(p) - 1
        total = np.zeros(np.broadcast(lo, hi).shape)
        for k in range(q + 1):
            total = total + math.comb(q, k) * (-1) ** k * hi ** (q - k) * _power_integral(lo, hi, k - alpha)
        return p * total
    # substitute s = (hi - y)**p to remove the endpoint singularity
    out = np.empty(np.broadcast(lo, hi).shape)
    for idx, (a, b) in enumerate(zip(np.broadcast_to(lo, out.shape).ravel(), np.broadcast_to(hi, out.shape).ravel())):
        if b <= a:
            out.flat[idx] = 0.0
            continue
        val, _ = integrate.quad(lambda s: (b - s ** (1 / p)) ** (-alpha), 0.0, (b - a) ** p, epsabs=1e-10, limit=200)
        out.flat[idx] = val
    return out


def _check(p, alpha):
    if not p > 0:
        raise ValueError("p must be positive")
    if not alpha >= 1:
        raise ValueError("alpha must be >= 1")


def rgp_estimates(seeds, obs1, obs2, p: float, alpha: float) -> np.ndarray:
    """Vectorised alpha-L* estimate of ``|v1 - v2|**p``.

    ``obs1``/``obs2`` hold the sampled values and NaN where the entry was not sampled.
    """
    _check(p, alpha)
    u = np.asarray(seeds, dtype=float)
    a = np.asarray(obs1, dtype=float)
    b = np.asarray(obs2, dtype=float)
    ia, ib = ~np.isnan(a), ~np.isnan(b)
    any_in = ia | ib
    out = np.zeros(u.shape)
    if not np.any(any_in):
        return out
    w_max = np.fmax(a, b)
    lo = np.where(ia & ib, np.fmin(a, b), u)
    sel = any_in
    J = _drop_integral(lo[sel], w_max[sel], p, alpha)
    out[sel] = alpha * u[sel] ** (alpha - 1) * J
    return np.maximum(out, 0.0)


def estimate_rgp_key(record: SampleRecord, p: float, alpha: float) -> float:
    """alpha-L* estimate of ``|v1 - v2|**p`` for one key from its sample only."""
    o1 = np.nan if record.values[0] is None else record.values[0]
    o2 = np.nan if record.values[1] is None else record.values[1]
    return float(rgp_estimates([record.seed], [o1], [o2], p, alpha)[0])


def rgp_estimate_at(v1: float, v2: float, u: float, p: float, alpha: float) -> float:
    """Estimate that key data ``(v1, v2)`` receives at seed ``u``."""
    o1 = v1 if v1 >= u else np.nan
    o2 = v2 if v2 >= u else np.nan
    return float(rgp_estimates([u], [o1], [o2], p, alpha)[0])


def _seeds(ds: KeyedDataset, salt: int) -> np.ndarray:
    return np.array([hash_seed(k, salt) for k in ds.keys])


def estimate_lpp(ds: KeyedDataset, salt: int, p: float, alpha: float) -> float:
    """Sum of per-key estimates; keys sampled in neither row contribute 0."""
    u = _seeds(ds, salt)
    o1 = np.where(ds.v1 >= u, ds.v1, np.nan)
    o2 = np.where(ds.v2 >= u, ds.v2, np.nan)
    return float(np.sum(rgp_estimates(u, o1, o2, p, alpha)))


@dataclass(frozen=True)
class BiasReport:
    truth: float
    mean: float
    stderr: float
    reps: int

    def to_dict(self) -> dict:
        return {"truth": self.truth, "mean": self.mean, "stderr": self.stderr, "reps": self.reps}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def empirical_bias(ds: KeyedDataset, p: float, alpha: float, reps: int, rng_seed: int) -> BiasReport:
    """Repeat :func:`estimate_lpp` with independent salts drawn from ``rng_seed``."""
    _check(p, alpha)
    if reps < 2:
        raise ValueError("reps must be >= 2 for a standard error")
    salts = np.random.default_rng(rng_seed).integers(0, 2**63 - 1, size=reps, dtype=np.int64)
    est = np.array([estimate_lpp(ds, int(s), p, alpha) for s in salts])
    return BiasReport(ds.truth(p), float(est.mean()), float(est.std(ddof=1) / math.sqrt(reps)), int(reps))


def load_dataset(path) -> KeyedDataset:
    """Read a ``key,v1,v2`` CSV (header required)."""
    try:
        with open(Path(path), newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ValueError(f"cannot read dataset {path}: {exc}") from exc
    if not rows or [c.strip() for c in rows[0]] != ["key", "v1", "v2"]:
        raise ValueError("dataset CSV needs the header key,v1,v2")
    keys, a, b = [], [], []
    for line_no, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ValueError(f"line {line_no}: expected 3 fields")
        try:
            a.append(float(row[1]))
            b.append(float(row[2]))
        except ValueError as exc:
            raise ValueError(f"line {line_no}: {exc}") from exc
        keys.append(row[0])
    return KeyedDataset(keys, a, b)


def save_dataset(ds: KeyedDataset, path) -> None:
    with open(Path(path), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["key", "v1", "v2"])
        for k, a, b in zip(ds.keys, ds.v1, ds.v2):
            w.writerow([k, repr(float(a)), repr(float(b))])
