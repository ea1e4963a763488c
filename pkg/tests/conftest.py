import numpy as np
import pytest
from hypothesis import strategies as st

from mepcomp.instance import build_instance


@pytest.fixture
def three_point():
    """Domain {0, 0.5, 1} with f = (2, 1, 0)."""
    return build_instance([0.0, 0.5, 1.0], [2.0, 1.0, 0.0])


def random_instance(rng, max_points=7, grid=20, zero_prob=0.2, decreasing=False):
    m = int(rng.integers(2, max_points + 1))
    v = np.sort(rng.choice(np.arange(0, grid + 1), size=m, replace=False)) / grid
    f = rng.exponential(1.0, size=m) * (rng.random(m) > zero_prob)
    if decreasing:
        f = np.sort(f)[::-1]
    return build_instance(v, f)


def corpus(seed=0, count=200, **kw):
    rng = np.random.default_rng(seed)
    return [random_instance(rng, **kw) for _ in range(count)]


@st.composite
def instances(draw, max_points=6, grid=16):
    m = draw(st.integers(2, max_points))
    idx = draw(st.lists(st.integers(0, grid), min_size=m, max_size=m, unique=True))
    v = np.sort(np.array(idx)) / grid
    f = draw(st.lists(st.one_of(st.just(0.0), st.floats(0.0, 5.0)), min_size=m, max_size=m))
    return build_instance(v, np.array(f))


def _lattice_cost(inner, m_start, m_end, lengths, caps):
    full = np.concatenate((np.full((len(inner), 1), m_start), inner, np.full((len(inner), 1), m_end)), axis=1)
    d = full[:, :-1] - full[:, 1:]
    ok = np.all(d >= -1e-15, axis=1) & np.all(inner <= caps[1:] + 1e-15, axis=1)
    return np.where(ok, np.sum(d * d / lengths, axis=1), np.inf)


def quantized_min_square(caps, lengths, m_start, m_end, coarse=0.02, tol=1e-9):
    """Brute-force the least square of a nonnegative step estimate by grid search on masses.

    Piece ``k`` has length ``lengths[k]``; ``caps[k]`` bounds the mass committed from the
    left end of piece ``k`` rightwards.  The mass left of piece 0 is ``m_start`` and right
    of the last piece ``m_end``.  The free masses at inner boundaries are searched
    exhaustively on a coarse lattice, then on finer lattices around the incumbent
    (factor 8 per round) until the spacing drops below ``tol`` times the scale.  Cap
    values are always added as candidates so binding constraints are hit exactly.
    """
    lengths = np.asarray(lengths, dtype=float)
    caps = np.asarray(caps, dtype=float)
    k = len(lengths) - 1
    if k == 0:
        d = m_start - m_end
        return d * d / lengths[0] if d >= 0 else np.inf
    scale = max(m_start - m_end, 1e-12)
    extra = [c for c in caps[1:] if m_end <= c <= m_start]

    def search(axes):
        axes = [np.unique(np.concatenate((a, extra))) for a in axes]
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, k)
        c = _lattice_cost(pts, m_start, m_end, lengths, caps)
        i = int(np.argmin(c))
        return pts[i], float(c[i])

    step = coarse * scale
    best, best_val = search([np.linspace(m_end, m_start, int(round(1 / coarse)) + 1)] * k)
    while step > tol * scale:
        step /= 8
        offs = np.arange(-16, 17) * step
        cand, val = search([np.clip(b + offs, m_end, m_start) for b in best])
        if val <= best_val:
            best, best_val = cand, val
    return best_val
