"""Level profiles ``u_k(t) = V_k(L_t(f))`` and the level-set measures ``S_k(f; .)``.

For a simple function ``u_k`` is a left-continuous step function, so
``S_k(f; .)`` is a finite sum of point masses sitting at the thresholds.
Densities are closed-form piecewise polynomials, which lets the distributional
identity be checked exactly piece by piece.
"""
from __future__ import annotations

import bisect
import io
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy import integrate as spi
from scipy.interpolate import PPoly

from .geometry import ConvexBody, intrinsic_volume
from .qcf import SimpleQCF

INF = math.inf


# ----------------------------------------------------------------------------
# densities
# ----------------------------------------------------------------------------

class Density:
    """A continuous piecewise-polynomial function on ``[0, inf)``.

    Subclasses provide :meth:`pieces`, a list of ``(lo, hi, Polynomial)`` that
    tiles ``[0, inf)``; everything else is derived from it.
    """

    def pieces(self) -> list[tuple[float, float, Polynomial]]:
        raise NotImplementedError

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = np.zeros_like(t_arr)
        for lo, hi, p in self.pieces():
            mask = (t_arr >= lo) & (t_arr <= hi) if hi == INF else (t_arr >= lo) & (t_arr < hi)
            out = np.where(mask, p(t_arr), out)
        return float(out) if out.ndim == 0 else out

    def derivative_pieces(self) -> list[tuple[float, float, Polynomial]]:
        return [(lo, hi, p.deriv()) for lo, hi, p in self.pieces()]

    @property
    def breakpoints(self) -> list[float]:
        return sorted({lo for lo, _, _ in self.pieces()} - {0.0})

    @property
    def degree(self) -> int:
        return max(p.degree() for _, _, p in self.pieces())

    def support(self) -> tuple[float, float]:
        """Smallest ``[lo, hi]`` outside which the density vanishes identically."""
        nz = [(lo, hi) for lo, hi, p in self.pieces() if np.any(p.coef != 0)]
        if not nz:
            return (0.0, 0.0)
        return (min(lo for lo, _ in nz), max(hi for _, hi in nz))

    def vanishes_on(self, delta: float) -> bool:
        """True when the density is identically zero on ``[0, delta]``."""
        for lo, _, p in self.pieces():
            if lo < delta and np.any(p.coef != 0):
                return False
        return True


@dataclass(frozen=True)
class Zero(Density):
    def pieces(self):
        return [(0.0, INF, Polynomial([0.0]))]

    def to_json(self):
        return {"kind": "poly", "coeffs": [0.0]}


@dataclass(frozen=True)
class Hinge(Density):
    """``scale * max(0, t - a)``."""

    a: float
    scale: float = 1.0

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("hinge location must be nonnegative")

    def pieces(self):
        tail = Polynomial([-self.a * self.scale, self.scale])
        if self.a == 0:
            return [(0.0, INF, tail)]
        return [(0.0, self.a, Polynomial([0.0])), (self.a, INF, tail)]

    def to_json(self):
        d = {"kind": "hinge", "a": self.a}
        if self.scale != 1.0:
            d["scale"] = self.scale
        return d


@dataclass(frozen=True)
class Poly(Density):
    """``sum_i coeffs[i] * t**i``."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs) or (0.0,))

    def pieces(self):
        return [(0.0, INF, Polynomial(self.coeffs))]

    def to_json(self):
        return {"kind": "poly", "coeffs": list(self.coeffs)}


@dataclass(frozen=True)
class PiecewiseLinear(Density):
    """Linear interpolation through ``knots``, held constant outside them."""

    knots: tuple

    def __post_init__(self):
        knots = tuple((float(t), float(v)) for t, v in self.knots)
        if not knots:
            raise ValueError("piecewise-linear density needs at least one knot")
        ts = [t for t, _ in knots]
        if ts[0] < 0 or any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("knots must be nonnegative and strictly increasing")
        object.__setattr__(self, "knots", knots)

    def pieces(self):
        ts = [t for t, _ in self.knots]
        vs = [v for _, v in self.knots]
        out = []
        if ts[0] > 0:
            out.append((0.0, ts[0], Polynomial([vs[0]])))
        for (t0, v0), (t1, v1) in zip(self.knots, self.knots[1:]):
            slope = (v1 - v0) / (t1 - t0)
            out.append((t0, t1, Polynomial([v0 - slope * t0, slope])))
        out.append((ts[-1], INF, Polynomial([vs[-1]])))
        return out

    def __call__(self, t):
        ts = [k for k, _ in self.knots]
        vs = [v for _, v in self.knots]
        out = np.interp(np.asarray(t, dtype=float), ts, vs)
        return float(out) if np.ndim(out) == 0 else out

    def to_json(self):
        return {"kind": "pwl", "knots": [list(k) for k in self.knots]}


class Spline(Density):
    """A ``scipy.interpolate.PPoly`` on ``[x_0, x_n]``, zero outside.

    Continuity at ``x_0`` and ``x_n`` requires the spline to vanish there.
    """

    def __init__(self, ppoly: PPoly):
        self.ppoly = ppoly
        x = ppoly.x
        if x[0] <= 0:
            raise ValueError("spline support must start after 0")
        ends = ppoly(np.array([x[0], x[-1]]))
        if np.any(np.abs(ends) > 1e-12 * max(1.0, float(np.max(np.abs(ppoly.c))))):
            raise ValueError("spline must vanish at both ends of its support")

    def pieces(self):
        x, c = self.ppoly.x, self.ppoly.c
        k = c.shape[0] - 1
        out = [(0.0, float(x[0]), Polynomial([0.0]))]
        for i in range(len(x) - 1):
            # local coefficients in (t - x_i), highest power first
            local = Polynomial(c[::-1, i])
            shifted = local(Polynomial([-x[i], 1.0]))
            out.append((float(x[i]), float(x[i + 1]), Polynomial(shifted.coef[: k + 1])))
        out.append((float(x[-1]), INF, Polynomial([0.0])))
        return out

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        x = self.ppoly.x
        inside = (t_arr >= x[0]) & (t_arr <= x[-1])
        out = np.where(inside, self.ppoly(np.clip(t_arr, x[0], x[-1])), 0.0)
        return float(out) if out.ndim == 0 else out

    def to_json(self):
        return {"kind": "ppoly", "breaks": self.ppoly.x.tolist(), "coeffs": self.ppoly.c.tolist()}


def bump(a: float, b: float, height: float = 1.0) -> Spline:
    """``height * ((t - a)(b - t))^2 / ((b - a)/2)^4`` on ``[a, b]``: C^1, compactly supported."""
    w = b - a
    norm = height / (w / 2) ** 4
    c = norm * np.array([1.0, -2 * w, w * w, 0.0, 0.0])
    return Spline(PPoly(c[:, None], np.array([a, b])))


def hat(a: float, peak: float, b: float, height: float = 1.0) -> PiecewiseLinear:
    return PiecewiseLinear(((a, 0.0), (peak, height), (b, 0.0)))


# ----------------------------------------------------------------------------
# profiles and measures
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelProfile:
    """Step function equal to ``values[i]`` on ``(breakpoints[i-1], breakpoints[i]]``."""

    k: int
    breakpoints: tuple
    values: tuple

    def __call__(self, t: float) -> float:
        if t <= 0:
            raise ValueError("u_k is defined for t > 0")
        i = bisect.bisect_left(self.breakpoints, t)
        return self.values[i] if i < len(self.values) else 0.0


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite sum of point masses ``sum_i mass_i * delta_{t_i}`` on ``(0, inf)``."""

    atoms: tuple  # of (t, mass)

    def __post_init__(self):
        atoms = tuple((float(t), float(m)) for t, m in self.atoms)
        ts = [t for t, _ in atoms]
        if any(t <= 0 for t in ts) or any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("atom locations must be positive and strictly increasing")
        object.__setattr__(self, "atoms", atoms)

    @property
    def locations(self) -> np.ndarray:
        return np.array([t for t, _ in self.atoms])

    @property
    def masses(self) -> np.ndarray:
        return np.array([m for _, m in self.atoms])

    def total_mass(self) -> float:
        return math.fsum(m for _, m in self.atoms)

    def integrate(self, phi) -> float:
        return integrate(self, phi)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t,mass\n")
        for t, m in self.atoms:
            buf.write(f"{t:.17g},{m:.17g}\n")
        return buf.getvalue()


def _check_degree(f: SimpleQCF, k: int):
    if not 0 <= k <= f.dim:
        raise ValueError(f"degree k={k} out of range 0..{f.dim}")


def level_profile(f: SimpleQCF, k: int) -> LevelProfile:
    _check_degree(f, k)
    return LevelProfile(k, f.thresholds, tuple(intrinsic_volume(b, k) for b in f.bodies))


def level_measure(f: SimpleQCF, k: int) -> DiscreteMeasure:
    """``S_k(f; .)``: mass ``V_k(K_i) - V_k(K_{i+1})`` at ``t_i``, with ``V_k(K_{m+1}) = 0``.

    Atoms of exactly zero mass are left out, so ``S_0`` is the single unit
    atom at ``M(f)``.
    """
    _check_degree(f, k)
    vols = [intrinsic_volume(b, k) for b in f.bodies] + [0.0]
    atoms = [(t, vols[i] - vols[i + 1]) for i, t in enumerate(f.thresholds)]
    return DiscreteMeasure(tuple((t, m) for t, m in atoms if m != 0.0))


def integrate(m: DiscreteMeasure, phi) -> float:
    """``int phi dm = sum_i phi(t_i) * mass_i``."""
    return math.fsum(float(phi(t)) * mass for t, mass in m.atoms)


def _gauss_integral(pieces, lo, hi, step, profile):
    """``int_lo^hi p'(t) u(t) dt`` with ``u`` constant between its breakpoints."""
    cuts = {lo, hi}
    cuts.update(b for b in profile.breakpoints if lo < b < hi)
    for a, b, _ in pieces:
        cuts.update(x for x in (a, b) if lo < x < hi)
    cuts = sorted(cuts)
    total = []
    for a, b in zip(cuts, cuts[1:]):
        mid = 0.5 * (a + b)
        u = profile(mid)
        if u == 0.0:
            continue
        poly = next(p for pa, pb, p in pieces if pa <= mid < pb)
        deg = max(poly.degree(), 0)
        nodes, weights = np.polynomial.legendre.leggauss(deg // 2 + 1)
        n_sub = max(1, math.ceil((b - a) / step))
        edges = np.linspace(a, b, n_sub + 1)
        for s0, s1 in zip(edges, edges[1:]):
            half = 0.5 * (s1 - s0)
            x = 0.5 * (s0 + s1) + half * nodes
            total.append(half * float(weights @ poly(x)) * u)
    return math.fsum(total)


def distributional_check(f: SimpleQCF, k: int, psi: Density, quadrature_step: float = None) -> float:
    """``|int psi'(t) u_k(t) dt - int psi dS_k(f; t)|``.

    The left side integrates ``psi'`` by Gauss-Legendre rules that are exact
    on each polynomial piece; the right side is the atomic sum.
    """
    _check_degree(f, k)
    lo, hi = psi.support()
    if hi == INF:
        raise ValueError("test function must have bounded support")
    if hi > lo and lo <= 0:
        raise ValueError("test function support must stay away from 0")
    ts = (0.0,) + f.thresholds
    min_gap = min(b - a for a, b in zip(ts, ts[1:])) if f.thresholds else INF
    if quadrature_step is None:
        quadrature_step = min_gap / 10 if f.thresholds else 1.0
    elif quadrature_step > min_gap / 10:
        raise ValueError("quadrature_step must be at most a tenth of the smallest threshold gap")
    profile = level_profile(f, k)
    if hi <= lo or not f.thresholds:
        lhs = 0.0
    else:
        lhs = _gauss_integral(psi.derivative_pieces(), lo, hi, quadrature_step, profile)
    rhs = integrate(level_measure(f, k), psi)
    return abs(lhs - rhs)


# ----------------------------------------------------------------------------
# cone reference family
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class ConeMeasure:
    """``S_k`` of the cone ``L_t = (1 - t) K``: density ``k (1-t)^(k-1) V_k(K)`` on ``(0, 1)``."""

    k: int
    vk: float

    def density(self, t):
        t = np.asarray(t, dtype=float)
        return np.where((t > 0) & (t < 1), self.k * (1 - t) ** (self.k - 1) * self.vk, 0.0)

    def total_mass(self) -> float:
        return self.vk

    def integrate(self, phi: Density, tol: float = 1e-10) -> float:
        points = [b for b in getattr(phi, "breakpoints", []) if 0 < b < 1]
        val, _ = spi.quad(lambda t: float(phi(t)) * float(self.density(t)), 0.0, 1.0,
                          points=points or None, epsabs=tol, epsrel=tol, limit=200)
        return val


def cone_reference_measure(body: ConvexBody, k: int):
    """Analytic ``S_k`` for the cone over ``body``; ``k = 0`` gives the unit atom at 1."""
    if not 0 <= k <= body.dim:
        raise ValueError(f"degree k={k} out of range 0..{body.dim}")
    if k == 0:
        return DiscreteMeasure(((1.0, 1.0),))
    return ConeMeasure(k, intrinsic_volume(body, k))

