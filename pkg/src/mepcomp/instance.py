"""Finite monotone estimation problems under threshold (PPS) sampling.

A datum ``v`` in ``[0, 1]`` is revealed by seed ``u`` iff ``u <= v``.  When it
is not revealed, the outcome only says ``v < u``, i.e. the consistent set is
every grid value strictly below the seed.  Seeds are uniform on ``(0, 1]`` and
every quantity here is a function on that interval, piecewise constant on the
left-open, right-closed seed intervals cut by the grid values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FAMILIES = ("one_minus_pow", "pow_one_minus")


class InstanceError(ValueError):
    """Raised for malformed instances."""


@dataclass(frozen=True)
class StepFn:
    """Piecewise-constant function on ``(t_0, t_K]``.

    ``values[k]`` holds on ``(boundaries[k], boundaries[k + 1]]``.  ``limit0``
    is the limit as the argument decreases to ``t_0``.
    """

    boundaries: np.ndarray
    values: np.ndarray
    limit0: float | None = None

    def __post_init__(self):
        b = np.asarray(self.boundaries, dtype=float)
        c = np.asarray(self.values, dtype=float)
        if b.ndim != 1 or c.ndim != 1 or len(b) != len(c) + 1:
            raise ValueError("need len(boundaries) == len(values) + 1")
        if np.any(np.diff(b) <= 0):
            raise ValueError("boundaries must be strictly increasing")
        object.__setattr__(self, "boundaries", b)
        object.__setattr__(self, "values", c)
        if self.limit0 is None:
            object.__setattr__(self, "limit0", float(c[0]))

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.boundaries)

    def piece_index(self, u) -> np.ndarray | int:
        """Index of the piece containing ``u`` (right-closed convention)."""
        idx = np.searchsorted(self.boundaries, u, side="left") - 1
        return np.clip(idx, 0, len(self.values) - 1)

    def __call__(self, u):
        u_arr = np.asarray(u, dtype=float)
        lo, hi = self.boundaries[0], self.boundaries[-1]
        if np.any(u_arr <= lo) or np.any(u_arr > hi):
            raise ValueError(f"argument outside ({lo}, {hi}]")
        out = self.values[self.piece_index(u_arr)]
        return float(out) if np.ndim(out) == 0 else out

    def integral(self, lo: float | None = None, hi: float | None = None) -> float:
        """Integral over ``(lo, hi]`` (defaults to the full support)."""
        b = self.boundaries
        lo = b[0] if lo is None else lo
        hi = b[-1] if hi is None else hi
        left = np.clip(b[:-1], lo, hi)
        right = np.clip(b[1:], lo, hi)
        return float(np.sum(self.values * (right - left)))

    def square_integral(self) -> float:
        return float(np.sum(self.values**2 * self.lengths))

    def is_nonincreasing(self) -> bool:
        return bool(np.all(np.diff(self.values) <= 0) and self.limit0 >= self.values[0])


@dataclass(frozen=True)
class SeedPartition:
    """Seed intervals ``(b_k, b_{k+1}]`` cut by the positive grid values."""

    boundaries: np.ndarray

    @property
    def lengths(self) -> np.ndarray:
        return np.diff(self.boundaries)

    @property
    def n_intervals(self) -> int:
        return len(self.boundaries) - 1

    def interval_of(self, u: float) -> int:
        k = int(np.searchsorted(self.boundaries, u, side="left")) - 1
        return min(max(k, 0), self.n_intervals - 1)


@dataclass(frozen=True)
class MepInstance:
    """Grid values ``v_0 < ... < v_m`` in ``[0, 1]`` with targets ``f(v_i) >= 0``."""

    values: np.ndarray
    f: np.ndarray
    family: str | None = None
    p: float | None = None
    n: int | None = None
    partition: SeedPartition = field(init=False, repr=False, compare=False)
    # boundary index of each grid value; prefix minimum of f at each boundary
    boundary_index: np.ndarray = field(init=False, repr=False, compare=False)
    prefix_min: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        f = np.asarray(self.f, dtype=float)
        if v.ndim != 1 or f.ndim != 1 or len(v) != len(f):
            raise InstanceError("values and f must be 1-d lists of equal length")
        if len(v) < 2:
            raise InstanceError("need at least two data points")
        if not np.all(np.isfinite(v)) or not np.all(np.isfinite(f)):
            raise InstanceError("values and f must be finite")
        if np.any(np.diff(v) <= 0):
            raise InstanceError("values must be strictly increasing (sorted, no duplicates)")
        if v[0] < 0 or v[-1] > 1:
            raise InstanceError("values must lie in [0, 1]")
        if np.any(f < 0):
            raise InstanceError("f must be nonnegative")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "f", f)

        inner = v[(v > 0) & (v < 1)]
        bounds = np.concatenate(([0.0], inner, [1.0]))
        object.__setattr__(self, "partition", SeedPartition(bounds))
        object.__setattr__(self, "boundary_index", np.searchsorted(bounds, v))
        # min{f(z): z <= b_k} for every boundary; inf where no grid value <= b_k
        pm = np.full(len(bounds), np.inf)
        for k, b in enumerate(bounds):
            mask = v <= b
            if mask.any():
                pm[k] = f[mask].min()
        object.__setattr__(self, "prefix_min", pm)

    @property
    def size(self) -> int:
        return len(self.values)

    @property
    def boundaries(self) -> np.ndarray:
        return self.partition.boundaries

    def consistent_indices(self, u: float) -> np.ndarray:
        """Indices of data not revealed at seed ``u`` (those with ``v < u``)."""
        return np.nonzero(self.values < u)[0]

    def to_dict(self) -> dict:
        d = {"values": self.values.tolist(), "f": self.f.tolist()}
        if self.family is not None:
            d.update(family=self.family, p=self.p, n=self.n)
        return d


def build_instance(values, f) -> MepInstance:
    return MepInstance(values, f)


def family_instance(family: str, p: float, n: int) -> MepInstance:
    """Uniform grid ``{i/n}`` with ``f = 1 - v**p`` or ``f = (1 - v)**p``."""
    if family not in FAMILIES:
        raise InstanceError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if int(n) != n or n < 1:
        raise InstanceError("n must be a positive integer")
    n = int(n)
    v = np.arange(n + 1) / n
    if family == "one_minus_pow":
        if not 0 < p <= 1:
            raise InstanceError("one_minus_pow requires p in (0, 1]")
        f = 1.0 - v**p
    else:
        if p < 1:
            raise InstanceError("pow_one_minus requires p >= 1")
        f = (1.0 - v) ** p
    return MepInstance(v, f, family=family, p=float(p), n=n)


def lower_bound_fn(inst: MepInstance, v_index: int) -> StepFn:
    """Infimum of f over the data consistent with the outcome, as a function of the seed."""
    if not 0 <= v_index < inst.size:
        raise IndexError(f"datum index {v_index} out of range")
    v = inst.values[v_index]
    fv = inst.f[v_index]
    b = inst.boundaries
    left = b[:-1]
    vals = np.where(left < v, fv, inst.prefix_min[:-1])
    return StepFn(b, vals, limit0=float(fv))


@dataclass(frozen=True)
class EstimabilityReport:
    value: float
    limit_ok: bool
    square_integral: float


def check_estimable(inst: MepInstance) -> list[EstimabilityReport]:
    """Per datum: limit condition at ``u -> 0+`` and the v-optimal square integral."""
    from .hull import opt_square

    out = []
    for i in range(inst.size):
        prof = lower_bound_fn(inst, i)
        ok = bool(prof.limit0 == inst.f[i] and prof.values[0] == inst.f[i])
        if not ok:
            raise AssertionError(f"limit condition violated at datum {i}; lower-bound construction is broken")
        out.append(EstimabilityReport(float(inst.values[i]), ok, opt_square(inst, i)))
    return out


def load_instance(path) -> MepInstance:
    """Read the JSON instance format: either explicit values/f or a family name with p and n."""
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InstanceError(f"cannot read instance file {path}: {exc}") from exc
    return instance_from_dict(data)


def instance_from_dict(data: dict) -> MepInstance:
    if "values" in data and "f" in data:
        inst = MepInstance(data["values"], data["f"])
        if "family" in data:
            object.__setattr__(inst, "family", data["family"])
            object.__setattr__(inst, "p", data.get("p"))
            object.__setattr__(inst, "n", data.get("n"))
        return inst
    if "family" in data:
        try:
            return family_instance(data["family"], float(data["p"]), int(data["n"]))
        except KeyError as exc:
            raise InstanceError(f"family instance missing field {exc}") from exc
    raise InstanceError("instance JSON needs 'values' and 'f', or 'family', 'p', 'n'")


def save_instance(inst: MepInstance, path) -> None:
    Path(path).write_text(json.dumps(inst.to_dict()))
