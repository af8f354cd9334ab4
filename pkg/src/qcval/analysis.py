"""Homogeneous decomposition, density recovery and Klain functions.

A translation-invariant valuation ``mu`` splits as ``mu = mu_0 + ... + mu_N``
with ``mu_k(f o g_lam) = lam^k mu_k(f)``. Evaluating ``mu`` on the dilates
``f o g_j`` for ``j = 1..N+1`` gives a Vandermonde system whose inverse yields
each component.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .geometry import Box, Frame, embed, intrinsic_volume, point_body, unit_cube
from .measures import PiecewiseLinear, integrate, level_measure
from .qcf import SimpleQCF, indicator, make_simple, transform_qcf
from .valuations import ValuationOracle


@dataclass(frozen=True)
class VandermondeCoeffs:
    """Inverse of ``M[j-1][k] = j^k`` (``j = 1..N+1``, ``k = 0..N``).

    ``c[k][j-1]`` weights ``mu(f o g_j)`` in the degree-``k`` component.
    """

    n: int
    exact: tuple  # rows of Fractions
    c: np.ndarray


def _exact_inverse(m: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(m)
    aug = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


@lru_cache(maxsize=None)
def vandermonde_coeffs(n: int) -> VandermondeCoeffs:
    """Exact rational inverse of the dilation Vandermonde matrix, rounded once."""
    if n < 1:
        raise ValueError("dimension must be at least 1")
    m = [[Fraction(j) ** k for k in range(n + 1)] for j in range(1, n + 2)]
    inv = _exact_inverse(m)
    c = np.array([[float(x) for x in row] for row in inv])
    c.flags.writeable = False
    return VandermondeCoeffs(n, tuple(tuple(row) for row in inv), c)


def _dilate_values(mu: ValuationOracle, f: SimpleQCF) -> list[float]:
    if not mu.translation_invariant:
        raise ValueError("decomposition needs a translation-invariant valuation")
    return [mu(transform_qcf(f, float(j))) for j in range(1, mu.dim + 2)]


def homogeneous_components(mu: ValuationOracle, f: SimpleQCF) -> np.ndarray:
    """``(mu_0(f), ..., mu_N(f))`` from ``N + 1`` evaluations of ``mu``."""
    vals = _dilate_values(mu, f)
    c = vandermonde_coeffs(mu.dim).c
    return np.array([math.fsum(c[k, j] * v for j, v in enumerate(vals)) for k in range(mu.dim + 1)])


def homogeneous_component(mu: ValuationOracle, k: int, f: SimpleQCF) -> float:
    """``mu_k(f) = sum_j c[k][j] mu(f o g_j)``."""
    if not 0 <= k <= mu.dim:
        raise ValueError(f"degree k={k} out of range 0..{mu.dim}")
    return float(homogeneous_components(mu, f)[k])


def component_oracle(mu: ValuationOracle, k: int) -> ValuationOracle:
    """``mu_k`` wrapped as an oracle of declared degree ``k``."""
    return ValuationOracle(lambda f: homogeneous_component(mu, k, f), mu.dim,
                           translation_invariant=True, even=mu.even,
                           rotation_invariant=mu.rotation_invariant, degree=k,
                           name=f"{mu.name}[{k}]")


@dataclass
class DecompositionReport:
    components: np.ndarray
    value: float
    residual_sum: float
    residual_homog: dict = field(default_factory=dict)  # (k, lam) -> residual
    scale: float = 1.0

    def max_homog_residual(self) -> float:
        return max(self.residual_homog.values(), default=0.0)


def verify_decomposition(mu: ValuationOracle, f: SimpleQCF,
                         lambdas: Sequence[float] = (0.5, 3.0, 7.25)) -> DecompositionReport:
    """Residuals of ``mu = sum_k mu_k`` and of ``mu_k(f o g_lam) = lam^k mu_k(f)``.

    ``scale`` is the largest magnitude among the dilate values that enter the
    components, for use in relative tolerances.
    """
    vals = _dilate_values(mu, f)
    comps = homogeneous_components(mu, f)
    value = mu(f)
    report = DecompositionReport(comps, value, abs(value - math.fsum(comps)),
                                 scale=max([1.0] + [abs(v) for v in vals]))
    for lam in lambdas:
        comps_lam = homogeneous_components(mu, transform_qcf(f, float(lam)))
        for k in range(mu.dim + 1):
            report.residual_homog[(k, float(lam))] = abs(comps_lam[k] - lam ** k * comps[k])
    return report


def recover_density(mu: ValuationOracle, mode: str, t_grid: Sequence[float]) -> PiecewiseLinear:
    """Sample the density of an N- or 0-homogeneous valuation on ``t_grid``.

    ``mode="N"``: ``c(t) = mu(t I_{[0,1]^N})``, so ``mu = int c dS_N``.
    ``mode="0"``: ``phi(t) = mu(t I_{{0}})``, so ``mu(f) = phi(M(f))``.
    """
    ts = sorted(float(t) for t in t_grid)
    if not ts or ts[0] <= 0:
        raise ValueError("grid points must be positive")
    if mode in ("N", "N_homogeneous"):
        degree, body = mu.dim, unit_cube(mu.dim)
    elif mode in ("0", "zero_homogeneous"):
        degree, body = 0, point_body(mu.dim)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if mu.degree is not None and mu.degree != degree:
        raise ValueError(f"valuation declares degree {mu.degree}, mode needs {degree}")
    return PiecewiseLinear(tuple((t, mu(indicator(body, t))) for t in ts))


# ----------------------------------------------------------------------------
# Klain functions
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class KlainSample:
    t: float
    frame: Frame
    value: float


def klain_eval(mu: ValuationOracle, t: float, frame: Frame, offset=None,
               reference=None) -> KlainSample:
    """``Kl_mu(t, E) = mu(t I_Q) / Vol_k(Q)`` for a body ``Q`` in ``E = span(frame)``.

    ``reference`` is a k-dimensional box or zonotope in frame coordinates,
    the unit k-cube by default.
    """
    frame = frame if isinstance(frame, Frame) else Frame(frame)
    k = frame.k
    if frame.ambient_dim != mu.dim:
        raise ValueError("frame and valuation live in different dimensions")
    if mu.degree is not None and mu.degree != k:
        raise ValueError(f"frame size {k} does not match declared degree {mu.degree}")
    if t <= 0:
        raise ValueError("t must be positive")
    ref = unit_cube(k) if reference is None else reference
    vol = intrinsic_volume(ref, k)
    # ambient generators, so the frame enters the volume computation
    body = embed(ref, frame, offset).to_zonotope()
    return KlainSample(float(t), frame, mu(indicator(body, t)) / vol)


def grassmannian_frames(n: int, k: int, n_random: int = 0, seed: int = 0) -> list[Frame]:
    """Coordinate k-frames, Givens-rotated frames at pi/6, pi/4, pi/3, then seeded random ones."""
    frames = []
    eye = np.eye(n)
    for axes in itertools.combinations(range(n), k):
        frames.append(Frame(eye[list(axes)]))
    if k < n:
        a, b = k - 1, k
        for theta in (math.pi / 6, math.pi / 4, math.pi / 3):
            g = np.eye(n)
            g[[a, a, b, b], [a, b, a, b]] = [math.cos(theta), -math.sin(theta),
                                             math.sin(theta), math.cos(theta)]
            frames.append(Frame(eye[:k] @ g.T))
    rng = np.random.default_rng(seed)
    for _ in range(n_random):
        q, _ = np.linalg.qr(rng.standard_normal((n, k)))
        frames.append(Frame(q.T))
    return frames


def klain_test_functions(frame: Frame, thresholds: Sequence[float], count: int,
                         seed: int = 0, offset=None) -> list[SimpleQCF]:
    """Random nested box stacks in frame coordinates, embedded along ``frame``.

    Bodies are returned as ambient zonotopes.
    """
    rng = np.random.default_rng(seed)
    k = frame.k
    ts = sorted(thresholds)
    out = []
    for _ in range(count):
        m = int(rng.integers(1, min(4, len(ts)) + 1))
        chosen = sorted(rng.choice(len(ts), size=m, replace=False))
        lo = rng.uniform(-1, 0, k)
        hi = lo + rng.uniform(0.5, 2.0, k)
        levels = []
        for idx in chosen:
            levels.append((ts[idx], embed(Box(lo, hi), frame, offset).to_zonotope()))
            shrink = rng.uniform(0.05, 0.3, (2, k)) * (hi - lo)
            lo, hi = lo + shrink[0], hi - shrink[1]
        out.append(make_simple(levels))
    return out


@dataclass
class KlainReport:
    phi: PiecewiseLinear
    samples: list
    deviation: float
    spread: dict  # t -> max - min over frames

    def max_spread(self) -> float:
        return max(self.spread.values(), default=0.0)


def klain_reconstruct_check(mu: ValuationOracle, t_grid: Sequence[float], frames: Sequence[Frame],
                            n_test: int = 10, seed: int = 0) -> KlainReport:
    """Rebuild ``mu`` as ``int phi dS_k`` with ``phi = Kl_mu(., E_0)`` and measure the gap.

    Test functions live in each frame and use thresholds from ``t_grid``, where
    the piecewise-linear ``phi`` is exact.
    """
    ts = sorted(float(t) for t in t_grid)
    frames = [f if isinstance(f, Frame) else Frame(f) for f in frames]
    if not frames:
        raise ValueError("need at least one frame")
    k = frames[0].k
    samples = [klain_eval(mu, t, fr) for fr in frames for t in ts]
    phi = PiecewiseLinear(tuple((s.t, s.value) for s in samples[: len(ts)]))
    spread = {}
    for i, t in enumerate(ts):
        vals = [samples[j * len(ts) + i].value for j in range(len(frames))]
        spread[t] = max(vals) - min(vals)
    deviation = 0.0
    for j, fr in enumerate(frames):
        for f in klain_test_functions(fr, ts, n_test, seed=seed + j):
            rebuilt = integrate(level_measure(f, k), phi)
            deviation = max(deviation, abs(mu(f) - rebuilt))
    return KlainReport(phi, samples, deviation, spread)


def klain_separation(mu: ValuationOracle, sigma: ValuationOracle, t: float,
                     frames: Sequence[Frame]) -> float:
    """``max_E |Kl_mu(t, E) - Kl_sigma(t, E)|`` over ``frames``."""
    return max(abs(klain_eval(mu, t, fr).value - klain_eval(sigma, t, fr).value) for fr in frames)


__all__ = [
    "VandermondeCoeffs", "vandermonde_coeffs", "homogeneous_component", "homogeneous_components",
    "component_oracle", "DecompositionReport", "verify_decomposition", "recover_density",
    "KlainSample", "klain_eval", "grassmannian_frames", "klain_test_functions", "KlainReport",
    "klain_reconstruct_check", "klain_separation",
]
