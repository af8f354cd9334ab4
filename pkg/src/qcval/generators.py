"""Seeded random bodies, stacks and compatible pairs for checks and tests."""
from __future__ import annotations

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .geometry import Box, Zonotope
from .measures import Spline, hat
from .qcf import SimpleQCF, lattice_min, make_simple


def random_box(rng: np.random.Generator, dim: int, side=(0.2, 2.0), spread: float = 2.0) -> Box:
    lo = rng.uniform(-spread, spread, dim)
    return Box(lo, lo + rng.uniform(*side, dim))


def random_zonotope(rng: np.random.Generator, dim: int, n_gens=None) -> Zonotope:
    m = n_gens if n_gens is not None else int(rng.integers(dim, dim + 3))
    gens = rng.normal(0.0, 0.7, (m, dim))
    return Zonotope(rng.uniform(-1, 1, dim), gens)


def random_thresholds(rng: np.random.Generator, m: int, lo: float = 0.1, hi: float = 4.0,
                      min_gap: float = 0.05) -> list[float]:
    while True:
        ts = np.sort(np.round(rng.uniform(lo, hi, m), 6))
        if m == 1 or np.min(np.diff(ts)) >= min_gap:
            return [float(t) for t in ts]


def _shrink_box(rng, b: Box) -> Box:
    cut = rng.uniform(0.0, 0.35, (2, b.dim)) * b.sides
    return Box(b.lo + cut[0], b.hi - cut[1])


def random_box_stack(rng: np.random.Generator, dim: int, max_levels: int = 4,
                     thresholds=None) -> SimpleQCF:
    """Nested box stack with 1..max_levels levels (thresholds drawn or given)."""
    if thresholds is None:
        thresholds = random_thresholds(rng, int(rng.integers(1, max_levels + 1)))
    body = random_box(rng, dim)
    levels = []
    for t in thresholds:
        levels.append((t, body))
        body = _shrink_box(rng, body)
    return make_simple(levels)


def grid_aligned_stack(rng: np.random.Generator, dim: int, grid, max_levels: int = 4) -> SimpleQCF:
    m = int(rng.integers(1, min(max_levels, len(grid)) + 1))
    ts = sorted(rng.choice(np.asarray(grid, dtype=float), size=m, replace=False))
    return random_box_stack(rng, dim, thresholds=[float(t) for t in ts])


def random_zonotope_stack(rng: np.random.Generator, dim: int, max_levels: int = 3,
                          centered: bool = False) -> SimpleQCF:
    """Zonotopes shrunk about their centre level by level; optionally centred at 0."""
    z = random_zonotope(rng, dim)
    if centered:
        z = Zonotope(-0.5 * z.generators.sum(axis=0), z.generators)
    c = z.center()
    levels = []
    for t in random_thresholds(rng, int(rng.integers(1, max_levels + 1))):
        levels.append((t, z))
        s = rng.uniform(0.5, 0.9)
        z = Zonotope(c + s * (z.base - c), s * z.generators)
    return make_simple(levels)


def _aligned_pair(rng, dim):
    """Two stacks whose level sets share a point on a common axis line.

    Mode "grid": both use one threshold grid with shrinking cross-sections.
    Mode "free": independent thresholds, cross-section fixed across levels.
    """
    axis = int(rng.integers(dim))
    others = [i for i in range(dim) if i != axis]
    x0 = rng.uniform(-1, 1)
    mode = rng.choice(["grid", "free"])

    def stack(ts, sections):
        reach = rng.uniform(0.3, 1.5, 2)
        levels = []
        for t, (slo, shi) in zip(ts, sections):
            lo, hi = np.empty(dim), np.empty(dim)
            lo[axis], hi[axis] = x0 - reach[0], x0 + reach[1]
            lo[others], hi[others] = slo, shi
            levels.append((t, Box(lo, hi)))
            reach = reach * rng.uniform(0.4, 1.0, 2)
        return make_simple(levels)

    if mode == "grid":
        grid = random_thresholds(rng, int(rng.integers(1, 5)))
        slo = rng.uniform(-1, 0, dim - 1)
        shi = slo + rng.uniform(0.5, 2.0, dim - 1)
        sections = []
        for _ in grid:
            sections.append((slo.copy(), shi.copy()))
            cut = rng.uniform(0, 0.3, (2, dim - 1)) * (shi - slo)
            slo, shi = slo + cut[0], shi - cut[1]
        mf, mg = (int(rng.integers(1, len(grid) + 1)) for _ in range(2))
        return stack(grid[:mf], sections[:mf]), stack(grid[:mg], sections[:mg])
    slo = rng.uniform(-1, 0, dim - 1)
    shi = slo + rng.uniform(0.5, 2.0, dim - 1)
    tf = random_thresholds(rng, int(rng.integers(1, 4)))
    tg = random_thresholds(rng, int(rng.integers(1, 4)))
    return (stack(tf, [(slo, shi)] * len(tf)), stack(tg, [(slo, shi)] * len(tg)))


def compatible_pair(rng: np.random.Generator, dim: int) -> tuple[SimpleQCF, SimpleQCF]:
    """A pair ``(f, g)`` of box stacks with ``f v g`` quasi-concave by construction."""
    kind = rng.choice(["aligned", "aligned", "below", "equal"])
    if kind == "aligned":
        f, g = _aligned_pair(rng, dim)
    elif kind == "below":
        f = random_box_stack(rng, dim)
        g = lattice_min(f, random_box_stack(rng, dim))
    else:
        f = random_box_stack(rng, dim)
        g = f
    return (f, g) if rng.random() < 0.5 else (g, f)


def random_spline(rng: np.random.Generator, lo: float = 0.05, hi: float = 4.5,
                  pieces: int = 3) -> Spline:
    """C^1 piecewise cubic on a random interval inside ``[lo, hi]``, vanishing at its ends."""
    a, b = np.sort(rng.uniform(lo, hi, 2))
    if b - a < 0.2:
        b = a + 0.2
    x = np.linspace(a, b, pieces + 1)
    y = np.concatenate([[0.0], rng.normal(0, 1, pieces - 1), [0.0]])
    dy = np.concatenate([[0.0], rng.normal(0, 2, pieces - 1), [0.0]])
    return Spline(CubicHermiteSpline(x, y, dy))


def random_test_function(rng: np.random.Generator, lo: float = 0.05, hi: float = 4.5):
    """Either a C^1 cubic spline or a hat, both compactly supported in ``(0, inf)``."""
    if rng.random() < 0.7:
        return random_spline(rng, lo, hi, pieces=int(rng.integers(1, 5)))
    a, p, b = np.sort(rng.uniform(lo, hi, 3))
    if p - a < 1e-3 or b - p < 1e-3:
        a, p, b = a, a + 0.1, a + 0.2
    return hat(a, p, b, height=rng.uniform(0.5, 2.0))
