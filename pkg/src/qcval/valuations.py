"""Valuations on simple quasi-concave functions and probes of their axioms."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .geometry import Box
from .measures import Density, Zero, integrate, level_measure, level_profile
from .qcf import (NotQuasiConcaveError, SimpleQCF, indicator, lattice_max, lattice_min,
                  rotate_qcf, transform_qcf)


@dataclass(frozen=True)
class DensitySpec:
    """Densities ``(phi_0, ..., phi_N)`` of ``mu(f) = sum_k int phi_k dS_k(f; .)``.

    Every ``phi_k`` with ``k >= 1`` must vanish on ``[0, delta]``, and
    ``phi_0(0) = 0``.
    """

    phis: tuple
    delta: float

    def __post_init__(self):
        phis = tuple(self.phis)
        if len(phis) < 2:
            raise ValueError("need densities phi_0..phi_N with N >= 1")
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        for k, phi in enumerate(phis[1:], start=1):
            if not phi.vanishes_on(self.delta):
                raise ValueError(f"phi_{k} does not vanish on [0, {self.delta}]")
        if abs(phis[0](0.0)) > 0:
            raise ValueError("phi_0(0) must be 0")
        object.__setattr__(self, "phis", phis)

    @property
    def dim(self) -> int:
        return len(self.phis) - 1

    @classmethod
    def single(cls, dim: int, k: int, phi: Density, delta: float) -> "DensitySpec":
        """Spec with ``phi`` in slot ``k`` and zeros elsewhere."""
        phis = [Zero()] * (dim + 1)
        phis[k] = phi
        return cls(tuple(phis), delta)

    def to_json(self) -> dict:
        return {"delta": self.delta, "phis": [p.to_json() for p in self.phis]}


@dataclass(frozen=True)
class MonotoneSpec:
    """Discrete weights ``nu_k`` of ``mu(f) = sum_k int u_k dnu_k``.

    Point masses stand in for the non-atomic measures of the exact
    representation; since ``u_k`` is a step function those integrals are limits
    of such sums.
    """

    nus: tuple
    delta: float

    def __post_init__(self):
        nus = tuple(self.nus)
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        for k, nu in enumerate(nus):
            if np.any(nu.masses < 0):
                raise ValueError(f"nu_{k} has negative mass")
            if k >= 1 and nu.atoms and nu.locations.min() < self.delta:
                raise ValueError(f"nu_{k} charges (0, {self.delta})")
        object.__setattr__(self, "nus", nus)

    @property
    def dim(self) -> int:
        return len(self.nus) - 1

    def to_json(self) -> dict:
        return {"delta": self.delta, "nus": [[list(a) for a in nu.atoms] for nu in self.nus]}


@dataclass(frozen=True)
class ValuationOracle:
    """Black-box ``f -> mu(f)`` with declared invariances.

    Checks only assert what is declared. ``degree`` is the homogeneity degree
    when known. The evaluator must be pure.
    """

    evaluator: Callable[[SimpleQCF], float]
    dim: int
    translation_invariant: bool = True
    even: bool = False
    rotation_invariant: bool = False
    degree: Optional[int] = None
    name: str = "mu"

    def __call__(self, f: SimpleQCF) -> float:
        if f.is_zero():
            return 0.0
        return float(self.evaluator(f))

    def __add__(self, other: "ValuationOracle") -> "ValuationOracle":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        a, b = self.evaluator, other.evaluator
        return ValuationOracle(
            lambda f: a(f) + b(f), self.dim,
            translation_invariant=self.translation_invariant and other.translation_invariant,
            even=self.even and other.even,
            rotation_invariant=self.rotation_invariant and other.rotation_invariant,
            degree=self.degree if self.degree == other.degree else None,
            name=f"{self.name}+{other.name}")

    def scaled(self, c: float) -> "ValuationOracle":
        ev = self.evaluator
        return replace(self, evaluator=lambda f: c * ev(f), name=f"{c:g}*{self.name}")


# ----------------------------------------------------------------------------
# concrete valuations
# ----------------------------------------------------------------------------

def eval_integral(spec: DensitySpec, f: SimpleQCF) -> float:
    """``sum_k int phi_k dS_k(f; .)``."""
    if f.is_zero():
        return 0.0
    if f.dim != spec.dim:
        raise ValueError("function and spec dimensions differ")
    return math.fsum(integrate(level_measure(f, k), phi)
                     for k, phi in enumerate(spec.phis) if not isinstance(phi, Zero))


def eval_monotone(spec: MonotoneSpec, f: SimpleQCF) -> float:
    """``sum_k sum_atoms u_k(t) * mass``."""
    if f.is_zero():
        return 0.0
    if f.dim != spec.dim:
        raise ValueError("function and spec dimensions differ")
    terms = []
    for k, nu in enumerate(spec.nus):
        if not nu.atoms:
            continue
        u = level_profile(f, k)
        terms.extend(u(t) * m for t, m in nu.atoms)
    return math.fsum(terms)


def eval_max_type(phi0: Density, f: SimpleQCF) -> float:
    """``phi0(M(f))``; zero on the zero function."""
    return 0.0 if f.is_zero() else float(phi0(f.max_value))


def integral_valuation(spec: DensitySpec, name: str = "integral") -> ValuationOracle:
    nonzero = [k for k, phi in enumerate(spec.phis) if not isinstance(phi, Zero)]
    degree = nonzero[0] if len(nonzero) == 1 else None
    return ValuationOracle(lambda f: eval_integral(spec, f), spec.dim, translation_invariant=True,
                           even=True, rotation_invariant=True, degree=degree, name=name)


def monotone_valuation(spec: MonotoneSpec, name: str = "monotone") -> ValuationOracle:
    return ValuationOracle(lambda f: eval_monotone(spec, f), spec.dim, translation_invariant=True,
                           even=True, rotation_invariant=True, name=name)


def max_type_valuation(phi0: Density, dim: int, name: str = "max-type") -> ValuationOracle:
    if abs(phi0(0.0)) > 0:
        raise ValueError("phi_0(0) must be 0")
    return ValuationOracle(lambda f: eval_max_type(phi0, f), dim, translation_invariant=True,
                           even=True, rotation_invariant=True, degree=0, name=name)


# ----------------------------------------------------------------------------
# axiom probes
# ----------------------------------------------------------------------------

def check_valuation_identity(mu: ValuationOracle, f: SimpleQCF, g: SimpleQCF) -> Optional[float]:
    """``|mu(f) + mu(g) - mu(f v g) - mu(f ^ g)|``, or ``None`` if ``f v g`` is not quasi-concave."""
    try:
        join = lattice_max(f, g)
    except NotQuasiConcaveError:
        return None
    meet = lattice_min(f, g)
    return abs(math.fsum([mu(f), mu(g), -mu(join), -mu(meet)]))


def check_invariance(mu: ValuationOracle, f: SimpleQCF, v=None, reflect: bool = False,
                     rotation=None) -> float:
    """``|mu(f) - mu(f o T)|`` for a translation, reflection and/or rotation ``T``.

    Only invariances the oracle declares may be probed.
    """
    if v is not None and np.any(v) and not mu.translation_invariant:
        raise ValueError("oracle does not declare translation invariance")
    if reflect and not mu.even:
        raise ValueError("oracle does not declare evenness")
    if rotation is not None and not mu.rotation_invariant:
        raise ValueError("oracle does not declare rotation invariance")
    g = transform_qcf(f, 1.0, v, reflect)
    if rotation is not None:
        q = rotation.vectors if hasattr(rotation, "vectors") else np.asarray(rotation, dtype=float)
        if q.shape[0] != q.shape[1]:
            raise ValueError("rotation needs a full frame (square orthogonal matrix)")
        g = rotate_qcf(g, q)
    return abs(mu(f) - mu(g))


def shrinking_boxes(body: Box, js: Sequence[int]) -> list[Box]:
    """``K + 2^{-j} [-1, 1]^N`` for each ``j``."""
    return [Box(body.lo - 2.0 ** -j, body.hi + 2.0 ** -j) for j in js]


def continuity_probe(mu: ValuationOracle, body: Box, t: float = 1.0,
                     js: Sequence[int] = range(1, 13)) -> tuple[np.ndarray, float]:
    """Values ``mu(t I_{K_j})`` along a shrinking box sequence and the limit ``mu(t I_K)``."""
    vals = np.array([mu(indicator(k, t)) for k in shrinking_boxes(body, js)])
    return vals, mu(indicator(body, t))
