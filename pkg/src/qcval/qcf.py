"""Simple quasi-concave functions as nested stacks of level sets.

A simple function ``t_1 I_{K_1} v ... v t_m I_{K_m}`` is stored as its
thresholds and bodies. Its super-level set at ``t`` is ``K_i`` for
``t in (t_{i-1}, t_i]`` and empty above ``t_m``.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .geometry import (Box, ConvexBody, bodies_equal, box_intersect, box_union_if_convex,
                       contains_body, rotate_body, scale_body, transform_body)

THRESH_TOL = 1e-12


class NotQuasiConcaveError(ValueError):
    """Raised when ``f v g`` has a non-convex level set."""

    def __init__(self, threshold: float):
        super().__init__(f"f v g is not quasi-concave: level set at t={threshold!r} is not convex")
        self.threshold = threshold


def _same_threshold(a: float, b: float) -> bool:
    return abs(a - b) <= THRESH_TOL * max(1.0, abs(a), abs(b))


@dataclass(frozen=True, eq=False)
class SimpleQCF:
    """Canonical nested stack; build it with :func:`make_simple`."""

    thresholds: tuple
    bodies: tuple
    dim: int

    @property
    def levels(self):
        return list(zip(self.thresholds, self.bodies))

    @property
    def max_value(self) -> float:
        return self.thresholds[-1] if self.thresholds else 0.0

    def is_zero(self) -> bool:
        return not self.thresholds

    def __len__(self):
        return len(self.thresholds)

    def __call__(self, x) -> float:
        return evaluate(self, x)

    def to_json(self) -> dict:
        return {"levels": [{"t": t, "body": b.to_json()} for t, b in self.levels]}

    def __repr__(self):
        body = ", ".join(f"({t:g}, {type(b).__name__})" for t, b in self.levels)
        return f"SimpleQCF([{body}])"


def zero_function(dim: int) -> SimpleQCF:
    return SimpleQCF((), (), dim)


def make_simple(levels: Sequence[tuple], dim: Optional[int] = None) -> SimpleQCF:
    """Validate and canonicalize a list of ``(threshold, body)`` pairs.

    Levels are sorted by threshold; equal thresholds carrying equal bodies are
    merged, and a level whose body equals the next one is dropped.
    """
    levels = sorted(((float(t), b) for t, b in levels), key=lambda p: p[0])
    if not levels:
        if dim is None:
            raise ValueError("dimension is required for the zero function")
        return zero_function(dim)
    dims = {b.dim for _, b in levels}
    if len(dims) != 1 or (dim is not None and dims != {dim}):
        raise ValueError("all bodies must share one ambient dimension")
    dim = dims.pop()

    merged: list[tuple[float, ConvexBody]] = []
    for idx, (t, b) in enumerate(levels):
        if not np.isfinite(t) or t <= 0:
            raise ValueError(f"threshold at level {idx} must be positive, got {t}")
        if merged and _same_threshold(merged[-1][0], t):
            if not bodies_equal(merged[-1][1], b):
                raise ValueError(f"duplicate threshold {t} at levels {idx - 1} and {idx} "
                                 "with distinct bodies")
            continue
        merged.append((t, b))

    for i in range(len(merged) - 1):
        if not contains_body(merged[i][1], merged[i + 1][1]):
            raise ValueError(f"level {i + 1} (t={merged[i + 1][0]}) is not contained in "
                             f"level {i} (t={merged[i][0]})")

    canon = [merged[i] for i in range(len(merged) - 1)
             if not bodies_equal(merged[i][1], merged[i + 1][1])]
    canon.append(merged[-1])
    return SimpleQCF(tuple(t for t, _ in canon), tuple(b for _, b in canon), dim)


def indicator(body: ConvexBody, t: float = 1.0) -> SimpleQCF:
    """``t * I_K``."""
    return make_simple([(t, body)])


def evaluate(f: SimpleQCF, x) -> float:
    """``max{t_i : x in K_i}``, or 0 outside the support."""
    x = np.asarray(x, dtype=float)
    if f.thresholds and x.size != f.dim:
        raise ValueError("point dimension does not match function")
    # bodies are nested: scan from the top
    for t, b in zip(reversed(f.thresholds), reversed(f.bodies)):
        if b.contains(x):
            return t
    return 0.0


def level_set(f: SimpleQCF, t: float):
    """``L_t(f)``, right-closed on each threshold interval; ``None`` when empty."""
    if t <= 0:
        raise ValueError("level sets are defined for t > 0")
    ts = f.thresholds
    i = bisect.bisect_left(ts, t)
    # t within tolerance of a threshold counts as that threshold
    if i > 0 and _same_threshold(ts[i - 1], t):
        i -= 1
    return f.bodies[i] if i < len(ts) else None


def _merged_grid(f: SimpleQCF, g: SimpleQCF) -> list[float]:
    grid: list[float] = []
    for t in sorted(f.thresholds + g.thresholds):
        if not grid or not _same_threshold(grid[-1], t):
            grid.append(t)
    return grid


def _require_boxes(*fs: SimpleQCF):
    for f in fs:
        if not all(isinstance(b, Box) for b in f.bodies):
            raise TypeError("lattice operations are supported for box stacks only")


def lattice_min(f: SimpleQCF, g: SimpleQCF) -> SimpleQCF:
    """``f ^ g``: level sets intersect at every merged threshold."""
    _require_boxes(f, g)
    if f.dim != g.dim and f.thresholds and g.thresholds:
        raise ValueError("dimension mismatch")
    levels = []
    for t in _merged_grid(f, g):
        a, b = level_set(f, t), level_set(g, t)
        cut = box_intersect(a, b) if a is not None and b is not None else None
        if cut is None:
            break
        levels.append((t, cut))
    return make_simple(levels, dim=f.dim)


def lattice_max(f: SimpleQCF, g: SimpleQCF) -> SimpleQCF:
    """``f v g`` when every merged level set ``L_t(f) u L_t(g)`` is a box.

    Raises :class:`NotQuasiConcaveError` naming the first failing threshold.
    """
    _require_boxes(f, g)
    if f.dim != g.dim and f.thresholds and g.thresholds:
        raise ValueError("dimension mismatch")
    levels = []
    for t in _merged_grid(f, g):
        a, b = level_set(f, t), level_set(g, t)
        if a is None or b is None:
            union = a if b is None else b
        else:
            union = box_union_if_convex(a, b)
            if union is None:
                raise NotQuasiConcaveError(t)
        levels.append((t, union))
    return make_simple(levels, dim=f.dim)


def transform_qcf(f: SimpleQCF, lam: float = 1.0, v=None, reflect: bool = False) -> SimpleQCF:
    """``f o T^{-1}`` for ``T x = lam * (+-x) + v``: thresholds kept, bodies mapped by ``T``.

    With ``v = 0`` and no reflection this is ``f o g_lam`` where ``g_lam(x) = x / lam``.
    """
    bodies = tuple(transform_body(b, lam, v, reflect) for b in f.bodies)
    return SimpleQCF(f.thresholds, bodies, f.dim)


def rotate_qcf(f: SimpleQCF, q) -> SimpleQCF:
    return SimpleQCF(f.thresholds, tuple(rotate_body(b, q) for b in f.bodies), f.dim)


def functions_equal(f: SimpleQCF, g: SimpleQCF) -> bool:
    """Representation equality of canonical stacks."""
    return (len(f) == len(g)
            and all(_same_threshold(a, b) for a, b in zip(f.thresholds, g.thresholds))
            and all(bodies_equal(a, b) for a, b in zip(f.bodies, g.bodies)))


def dominated_by(f: SimpleQCF, g: SimpleQCF) -> bool:
    """``f <= g`` pointwise, checked level set by level set."""
    for t in _merged_grid(f, g):
        a = level_set(f, t)
        if a is None:
            continue
        b = level_set(g, t)
        if b is None or not contains_body(b, a):
            return False
    return True


# ----------------------------------------------------------------------------
# general quasi-concave functions given by their level sets
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class QCFOracle:
    """A quasi-concave function known through ``t -> L_t(f)`` on ``(0, max_value]``.

    ``value_fn`` is an optional closed form for pointwise evaluation; without it
    :meth:`value` bisects on level-set membership.
    """

    max_value: float
    level_set_fn: Callable[[float], Optional[ConvexBody]]
    value_fn: Optional[Callable[[np.ndarray], float]] = None

    def level_set(self, t: float):
        if t <= 0:
            raise ValueError("level sets are defined for t > 0")
        if t > self.max_value:
            return None
        return self.level_set_fn(t)

    def value(self, x, iters: int = 80) -> float:
        x = np.asarray(x, dtype=float)
        if self.value_fn is not None:
            return float(self.value_fn(x))
        top = self.level_set(self.max_value)
        if top is not None and top.contains(x):
            return self.max_value
        lo, hi = 0.0, self.max_value
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            body = self.level_set(mid)
            if body is not None and body.contains(x):
                lo = mid
            else:
                hi = mid
        return lo


def cone_oracle(body: ConvexBody) -> QCFOracle:
    """``L_t = (1 - t) * body`` for ``t in (0, 1]``; the body should contain the origin."""
    value_fn = None
    if isinstance(body, Box) and np.all(body.lo <= 0) and np.all(body.hi >= 0):
        lo, hi = body.lo, body.hi

        def value_fn(x):
            with np.errstate(divide="ignore", invalid="ignore"):
                gauge = np.where(x > 0, x / hi, np.where(x < 0, -x / -lo, 0.0))
            return max(0.0, 1.0 - float(np.max(gauge)))

    return QCFOracle(1.0, lambda t: scale_body(body, 1.0 - t), value_fn)


def dyadic_approx(f: QCFOracle, depth: int) -> SimpleQCF:
    """``v_j t_j I_{L_{t_j}(f)}`` on the grid ``t_j = j M(f) / 2^depth``, ``j = 1..2^depth``.

    The result lies below ``f`` and increases with ``depth``.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    n = 2 ** depth
    levels = []
    prev = None
    for j in range(1, n + 1):
        t = j * f.max_value / n
        body = f.level_set(t)
        if body is None:
            raise ValueError(f"oracle level set at t={t} is empty")
        if prev is not None and not contains_body(prev, body):
            raise ValueError(f"oracle is not antitone at t={t}")
        levels.append((t, body))
        prev = body
    return make_simple(levels)
