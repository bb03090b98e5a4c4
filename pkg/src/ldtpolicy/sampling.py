"""Seeded cost-vector samplers over the unit ball restricted to a sign orthant."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .core import CostDomain, Sign


def _rng(seed: int) -> np.random.Generator:
    # PCG64 is named explicitly so streams do not depend on numpy's default
    return np.random.Generator(np.random.PCG64(seed))


def sample_ball(n: int, seed: int, count: int) -> np.ndarray:
    """Uniform points of the closed unit n-ball, before any sign folding."""
    if count < 1:
        raise ValueError("count must be at least 1")
    if n < 1:
        raise ValueError("dimension must be at least 1")
    rng = _rng(seed)
    g = rng.standard_normal((count, n))
    norms = np.linalg.norm(g, axis=1)
    while np.any(norms == 0):  # measure zero, but keep the directions well defined
        bad = norms == 0
        g[bad] = rng.standard_normal((int(bad.sum()), n))
        norms = np.linalg.norm(g, axis=1)
    r = rng.random(count) ** (1.0 / n)
    return g / norms[:, None] * r[:, None]


def fold(points: np.ndarray, domain: CostDomain) -> np.ndarray:
    out = points.copy()
    for i, s in enumerate(domain.signs):
        if s is Sign.POSITIVE:
            out[:, i] = np.abs(out[:, i])
        elif s is Sign.NEGATIVE:
            out[:, i] = -np.abs(out[:, i])
    return out


def sample_ball_orthant(n: int, domain: CostDomain, seed: int, count: int) -> np.ndarray:
    """``count`` cost vectors, uniform on the unit ball intersected with the domain.

    Vectors with an exact zero coordinate are redrawn, so every sample lies
    in the open domain.
    """
    if domain.dim != n:
        raise ValueError("domain dimension does not match n")
    pts = fold(sample_ball(n, seed, count), domain)
    bad = np.any(pts == 0, axis=1)
    extra_seed = seed
    while bad.any():
        extra_seed += 0x9E3779B9
        repl = fold(sample_ball(n, extra_seed, int(bad.sum())), domain)
        pts[bad] = repl
        bad = np.any(pts == 0, axis=1)
    return pts


def to_fractions(points) -> list:
    """Exact rational pre-image of each float vector (doubles are dyadic)."""
    return [tuple(Fraction(float(v)) for v in row) for row in points]


def orthant_counts(points: np.ndarray) -> np.ndarray:
    """Histogram of sign patterns, cell index = sum of 2^i over positive coords."""
    n = points.shape[1]
    bits = (points > 0).astype(np.int64)
    idx = bits @ (1 << np.arange(n, dtype=np.int64))
    return np.bincount(idx, minlength=1 << n)


def orthant_chi_square(points: np.ndarray):
    """Pearson statistic and degrees of freedom for equal orthant cell mass."""
    counts = orthant_counts(points).astype(float)
    expected = counts.sum() / counts.size
    stat = float(((counts - expected) ** 2 / expected).sum())
    return stat, counts.size - 1
