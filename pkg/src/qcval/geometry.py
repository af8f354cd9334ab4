"""Convex bodies with exact intrinsic volumes: boxes, zonotopes and embeddings.

Every body is an immutable value. The three families share a small duck-typed
surface (``dim``, ``support``, ``contains``, ``vertices``, ``intrinsic_volumes``)
and the module-level functions below dispatch on it.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull
from scipy.special import gamma

ORTHO_TOL = 1e-12
CONTAIN_TOL = 1e-12


def _vec(x, name="vector") -> np.ndarray:
    a = np.array(x, dtype=float).reshape(-1)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    a.flags.writeable = False
    return a


def _mat(rows, ncols, name="generators") -> np.ndarray:
    a = np.array(rows, dtype=float)
    if a.size == 0:
        a = np.zeros((0, ncols))
    a = a.reshape(-1, ncols)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    a.flags.writeable = False
    return a


def elementary_symmetric(values: Sequence[float]) -> np.ndarray:
    """Return ``(e_0, ..., e_n)`` of ``values`` by the product recurrence."""
    e = np.zeros(len(values) + 1)
    e[0] = 1.0
    for v in values:
        e[1:] = e[1:] + v * e[:-1]
    return e


def unit_ball_volume(j: int) -> float:
    """Volume of the ``j``-dimensional unit ball."""
    return math.pi ** (j / 2) / gamma(j / 2 + 1)


# ----------------------------------------------------------------------------
# body families
# ----------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Box:
    """Axis-aligned box ``[lo_1, hi_1] x ... x [lo_N, hi_N]``; sides may be zero."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo, hi = _vec(self.lo, "lo"), _vec(self.hi, "hi")
        if lo.shape != hi.shape or lo.size == 0:
            raise ValueError("lo and hi must be nonempty vectors of equal length")
        bad = np.nonzero(lo > hi)[0]
        if bad.size:
            raise ValueError(f"box has lo > hi on axis {int(bad[0])}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return self.lo.size

    @property
    def sides(self) -> np.ndarray:
        return self.hi - self.lo

    def volume(self) -> float:
        return float(np.prod(self.sides))

    def support(self, u) -> float:
        u = np.asarray(u, dtype=float)
        return float(np.sum(np.where(u > 0, u * self.hi, u * self.lo)))

    def contains(self, x, tol: float = CONTAIN_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        scale = tol * max(1.0, float(np.max(np.abs(np.concatenate([self.lo, self.hi])))))
        return bool(np.all(x >= self.lo - scale) and np.all(x <= self.hi + scale))

    def vertices(self) -> np.ndarray:
        corners = itertools.product(*[(a,) if a == b else (a, b) for a, b in zip(self.lo, self.hi)])
        return np.array(list(corners), dtype=float)

    def intrinsic_volumes(self) -> np.ndarray:
        return elementary_symmetric(self.sides)

    def distance(self, points: np.ndarray) -> np.ndarray:
        gap = np.maximum(np.maximum(self.lo - points, 0.0), points - self.hi)
        return np.sqrt(np.einsum("ij,ij->i", gap, gap))

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        return self.lo, self.hi

    def to_zonotope(self) -> "Zonotope":
        return Zonotope(self.lo, np.diag(self.sides)[self.sides > 0])

    def to_json(self) -> dict:
        return {"type": "box", "lo": self.lo.tolist(), "hi": self.hi.tolist()}


@dataclass(frozen=True, eq=False)
class Zonotope:
    """Minkowski sum ``base + [0, v_1] + ... + [0, v_m]``."""

    base: np.ndarray
    generators: np.ndarray

    def __post_init__(self):
        base = _vec(self.base, "base")
        if base.size == 0:
            raise ValueError("base must be a nonempty vector")
        gens = _mat(self.generators, base.size)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "generators", gens)

    @property
    def dim(self) -> int:
        return self.base.size

    def support(self, u) -> float:
        u = np.asarray(u, dtype=float)
        return float(self.base @ u + np.sum(np.maximum(0.0, self.generators @ u)))

    def center(self) -> np.ndarray:
        return self.base + 0.5 * self.generators.sum(axis=0)

    def contains(self, x, tol: float = CONTAIN_TOL) -> bool:
        return bool(_in_zonotope(self, np.asarray(x, dtype=float)[None, :], tol)[0])

    def vertices(self) -> np.ndarray:
        m = len(self.generators)
        if m == 0:
            return self.base[None, :].copy()
        signs = np.array(list(itertools.product((0.0, 1.0), repeat=m)))
        pts = self.base + signs @ self.generators
        return np.unique(np.round(pts, 14), axis=0)

    def intrinsic_volume(self, k: int) -> float:
        n = self.dim
        if not 0 <= k <= n:
            raise ValueError(f"degree k={k} out of range 0..{n}")
        if k == 0:
            return 1.0
        total = 0.0
        for subset in itertools.combinations(range(len(self.generators)), k):
            a = self.generators[list(subset)]
            det = np.linalg.det(a @ a.T)
            total += math.sqrt(max(det, 0.0))
        return total

    def intrinsic_volumes(self) -> np.ndarray:
        return np.array([self.intrinsic_volume(k) for k in range(self.dim + 1)])

    def distance(self, points: np.ndarray) -> np.ndarray:
        return polytope_distance(self.vertices(), points)

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        g = self.generators
        return self.base + np.minimum(g, 0).sum(axis=0), self.base + np.maximum(g, 0).sum(axis=0)

    def to_zonotope(self) -> "Zonotope":
        return self

    def to_json(self) -> dict:
        return {"type": "zonotope", "base": self.base.tolist(),
                "generators": self.generators.tolist()}


@dataclass(frozen=True, eq=False)
class Frame:
    """``k`` orthonormal vectors in R^N, stored as the rows of ``vectors``."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.array(self.vectors, dtype=float)
        if v.ndim != 2:
            raise ValueError("frame must be a list of vectors")
        gram = v @ v.T
        if not np.allclose(gram, np.eye(len(v)), rtol=0.0, atol=ORTHO_TOL):
            raise ValueError("frame vectors are not orthonormal")
        v.flags.writeable = False
        object.__setattr__(self, "vectors", v)

    @property
    def k(self) -> int:
        return self.vectors.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.vectors.shape[1]

    def to_json(self) -> list:
        return self.vectors.tolist()


@dataclass(frozen=True, eq=False)
class EmbeddedBody:
    """A box or zonotope living in frame coordinates of a k-flat ``offset + span(frame)``."""

    frame: Frame
    offset: np.ndarray
    body: Union[Box, Zonotope]

    def __post_init__(self):
        frame = self.frame if isinstance(self.frame, Frame) else Frame(self.frame)
        offset = _vec(self.offset, "offset")
        if offset.size != frame.ambient_dim:
            raise ValueError("offset dimension does not match frame")
        if self.body.dim != frame.k:
            raise ValueError(f"body dimension {self.body.dim} != frame size {frame.k}")
        object.__setattr__(self, "frame", frame)
        object.__setattr__(self, "offset", offset)

    @property
    def dim(self) -> int:
        return self.frame.ambient_dim

    def _local(self, u) -> np.ndarray:
        return self.frame.vectors @ np.asarray(u, dtype=float)

    def support(self, u) -> float:
        u = np.asarray(u, dtype=float)
        return float(self.offset @ u) + support_value(self.body, self._local(u), allow_zero=True)

    def contains(self, x, tol: float = CONTAIN_TOL) -> bool:
        d = np.asarray(x, dtype=float) - self.offset
        y = self.frame.vectors @ d
        perp = d - self.frame.vectors.T @ y
        if np.linalg.norm(perp) > tol * max(1.0, float(np.linalg.norm(d))):
            return False
        return self.body.contains(y, tol)

    def vertices(self) -> np.ndarray:
        return self.offset + self.body.vertices() @ self.frame.vectors

    def intrinsic_volumes(self) -> np.ndarray:
        out = np.zeros(self.dim + 1)
        out[: self.frame.k + 1] = intrinsic_volumes(self.body)
        return out

    def distance(self, points: np.ndarray) -> np.ndarray:
        return polytope_distance(self.vertices(), points)

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        v = self.vertices()
        return v.min(axis=0), v.max(axis=0)

    def to_zonotope(self) -> Zonotope:
        z = self.body.to_zonotope()
        return Zonotope(self.offset + z.base @ self.frame.vectors,
                        z.generators @ self.frame.vectors)

    def to_json(self) -> dict:
        return {"type": "embedded", "frame": self.frame.to_json(),
                "offset": self.offset.tolist(), "body": self.body.to_json()}


ConvexBody = Union[Box, Zonotope, EmbeddedBody]


def point_body(dim: int) -> Box:
    """The singleton ``{0}`` in R^dim."""
    return Box(np.zeros(dim), np.zeros(dim))


def unit_cube(dim: int) -> Box:
    return Box(np.zeros(dim), np.ones(dim))


# ----------------------------------------------------------------------------
# intrinsic volumes
# ----------------------------------------------------------------------------

def box_intrinsic_volumes(b: Box) -> np.ndarray:
    """``(V_0, ..., V_N)`` of a box: elementary symmetric polynomials of its sides."""
    return b.intrinsic_volumes()


def zonotope_intrinsic_volume(z: Zonotope, k: int) -> float:
    """``V_k`` of a zonotope as a sum of Gram-determinant roots over k-subsets."""
    return z.intrinsic_volume(k)


def intrinsic_volumes(body: ConvexBody) -> np.ndarray:
    return body.intrinsic_volumes()


def intrinsic_volume(body: ConvexBody, k: int) -> float:
    if not 0 <= k <= body.dim:
        raise ValueError(f"degree k={k} out of range 0..{body.dim}")
    return float(body.intrinsic_volumes()[k])


# ----------------------------------------------------------------------------
# support functions and Hausdorff distance
# ----------------------------------------------------------------------------

def support_value(body: ConvexBody, u, allow_zero: bool = False) -> float:
    """``h_K(u) = max_{x in K} <u, x>``."""
    u = np.asarray(u, dtype=float)
    if u.size != body.dim:
        raise ValueError(f"direction has dimension {u.size}, body has {body.dim}")
    if not allow_zero and not np.any(u):
        raise ValueError("support function needs a nonzero direction")
    return body.support(u)


def _direction_set(dim: int, n_dirs: int, seed: int) -> np.ndarray:
    axes = np.vstack([np.eye(dim), -np.eye(dim)])
    diag = np.array(list(itertools.product((-1.0, 1.0), repeat=dim))) / math.sqrt(dim)
    rng = np.random.default_rng(seed)
    rand = rng.standard_normal((n_dirs, dim))
    rand /= np.linalg.norm(rand, axis=1, keepdims=True)
    return np.vstack([axes, diag, rand])


def _box_witness_directions(a: Box, b: Box) -> list[np.ndarray]:
    # for polytopes the Hausdorff distance is attained at a vertex; the unit
    # vector from its nearest point realizes it as a support difference
    out = []
    for p, q in ((a, b), (b, a)):
        for v in p.vertices():
            w = v - np.clip(v, q.lo, q.hi)
            n = np.linalg.norm(w)
            if n > 0:
                out.append(w / n)
    return out


def hausdorff_distance(a: ConvexBody, b: ConvexBody, n_dirs: int = 256, seed: int = 0) -> float:
    """Max of ``|h_a - h_b|`` over a sampled direction set.

    The set always holds the coordinate axes and the sign diagonals; for two
    boxes it also holds the vertex-to-nearest-point witnesses, which makes the
    value exact. Otherwise it is a lower bound converging as ``n_dirs`` grows.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if n_dirs < 2 * a.dim:
        raise ValueError("n_dirs must be at least 2N")
    dirs = _direction_set(a.dim, n_dirs, seed)
    if isinstance(a, Box) and isinstance(b, Box):
        extra = _box_witness_directions(a, b)
        if extra:
            dirs = np.vstack([dirs, extra])
    return max(abs(a.support(u) - b.support(u)) for u in dirs)


def minkowski_sum(a: ConvexBody, b: ConvexBody) -> Zonotope:
    za, zb = a.to_zonotope(), b.to_zonotope()
    return Zonotope(za.base + zb.base, np.vstack([za.generators, zb.generators]))


# ----------------------------------------------------------------------------
# transforms
# ----------------------------------------------------------------------------

def transform_body(b: ConvexBody, lam: float = 1.0, v=None, reflect: bool = False) -> ConvexBody:
    """Image of ``b`` under ``x -> lam * (+-x) + v`` (reflection applied first)."""
    if lam <= 0:
        raise ValueError("scale factor must be positive")
    return _affine(b, lam, v, reflect)


def scale_body(b: ConvexBody, lam: float) -> ConvexBody:
    """``lam * b`` for ``lam >= 0``; ``lam = 0`` collapses the body to the origin."""
    if lam < 0:
        raise ValueError("scale factor must be nonnegative")
    return _affine(b, lam, None, False)


def _affine(b, lam, v, reflect):
    sign = -1.0 if reflect else 1.0
    shift = np.zeros(b.dim) if v is None else np.asarray(v, dtype=float)
    if isinstance(b, Box):
        lo, hi = sign * lam * b.lo, sign * lam * b.hi
        if reflect:
            lo, hi = hi, lo
        return Box(lo + shift, hi + shift)
    if isinstance(b, Zonotope):
        return Zonotope(sign * lam * b.base + shift, sign * lam * b.generators)
    if isinstance(b, EmbeddedBody):
        inner = _affine(b.body, lam, None, reflect)
        return EmbeddedBody(b.frame, sign * lam * b.offset + shift, inner)
    raise TypeError(f"unsupported body {type(b).__name__}")


def rotate_body(b: ConvexBody, q) -> ConvexBody:
    """Apply the orthogonal matrix ``q``; boxes are not closed under rotation."""
    q = np.asarray(q, dtype=float)
    if not np.allclose(q @ q.T, np.eye(len(q)), atol=1e-10):
        raise ValueError("rotation matrix is not orthogonal")
    if isinstance(b, Zonotope):
        return Zonotope(q @ b.base, b.generators @ q.T)
    if isinstance(b, EmbeddedBody):
        return EmbeddedBody(Frame(b.frame.vectors @ q.T), q @ b.offset, b.body)
    raise TypeError("rotation is only supported for zonotopes and embedded bodies")


def embed(body_k: Union[Box, Zonotope], frame, offset=None) -> EmbeddedBody:
    frame = frame if isinstance(frame, Frame) else Frame(frame)
    if offset is None:
        offset = np.zeros(frame.ambient_dim)
    return EmbeddedBody(frame, offset, body_k)


# ----------------------------------------------------------------------------
# box lattice
# ----------------------------------------------------------------------------

def box_intersect(a: Box, b: Box):
    """Intersection of two boxes, or ``None`` when it is empty."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    lo, hi = np.maximum(a.lo, b.lo), np.minimum(a.hi, b.hi)
    if np.any(lo > hi):
        return None
    return Box(lo, hi)


def box_contains(outer: Box, inner: Box, tol: float = CONTAIN_TOL) -> bool:
    s = tol * max(1.0, float(np.max(np.abs(np.concatenate([outer.lo, outer.hi])))))
    return bool(np.all(inner.lo >= outer.lo - s) and np.all(inner.hi <= outer.hi + s))


def box_union_if_convex(a: Box, b: Box, tol: float = 1e-12):
    """Bounding box of ``a`` and ``b`` if their union is convex, else ``None``.

    Degenerate boxes are compared in their affine hull (free axes plus the
    fixed coordinates); distinct hulls without containment are never convex.
    """
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    if box_contains(b, a):
        return b
    if box_contains(a, b):
        return a
    free_a, free_b = a.sides > 0, b.sides > 0
    if np.any(free_a != free_b) or not np.allclose(a.lo[~free_a], b.lo[~free_b], rtol=0, atol=tol):
        return None
    hull = Box(np.minimum(a.lo, b.lo), np.maximum(a.hi, b.hi))

    def vol(x):
        return float(np.prod(x.sides[free_a])) if x is not None else 0.0

    lhs = vol(a) + vol(b) - vol(box_intersect(a, b))
    rhs = vol(hull)
    if abs(lhs - rhs) <= tol * max(1.0, rhs):
        return hull
    return None


# ----------------------------------------------------------------------------
# containment and equality across families
# ----------------------------------------------------------------------------

def _in_zonotope(z: Zonotope, points: np.ndarray, tol: float) -> np.ndarray:
    g = z.generators
    out = np.empty(len(points), dtype=bool)
    if len(g) == 0:
        scale = tol * max(1.0, float(np.max(np.abs(z.base))))
        return np.all(np.abs(points - z.base) <= scale, axis=1)
    for i, p in enumerate(points):
        rhs = p - z.base
        # min slack s with |G^T lam - rhs| <= s, 0 <= lam <= 1
        m, n = len(g), z.dim
        c = np.zeros(m + 1)
        c[-1] = 1.0
        a_ub = np.block([[g.T, -np.ones((n, 1))], [-g.T, -np.ones((n, 1))]])
        b_ub = np.concatenate([rhs, -rhs])
        res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(0, 1)] * m + [(0, None)],
                      method="highs")
        scale = max(1.0, float(np.abs(g).sum()), float(np.max(np.abs(p))))
        out[i] = res.status == 0 and res.fun <= 1e-9 * scale
    return out


def contains_body(outer: ConvexBody, inner: ConvexBody, tol: float = CONTAIN_TOL) -> bool:
    """Exact containment test: every vertex of ``inner`` lies in ``outer``."""
    if outer.dim != inner.dim:
        raise ValueError("dimension mismatch")
    if isinstance(outer, Box) and isinstance(inner, Box):
        return box_contains(outer, inner, tol)
    verts = inner.vertices()
    if isinstance(outer, Box):
        return all(outer.contains(v, tol) for v in verts)
    if isinstance(outer, EmbeddedBody):
        return all(outer.contains(v, 1e-9) for v in verts)
    return bool(np.all(_in_zonotope(outer, verts, tol)))


def bodies_equal(a: ConvexBody, b: ConvexBody, tol: float = CONTAIN_TOL) -> bool:
    if type(a) is Box and type(b) is Box:
        s = tol * max(1.0, float(np.max(np.abs(np.concatenate([a.lo, a.hi])))))
        return bool(np.all(np.abs(a.lo - b.lo) <= s) and np.all(np.abs(a.hi - b.hi) <= s))
    return contains_body(a, b, tol) and contains_body(b, a, tol)


# ----------------------------------------------------------------------------
# point-to-polytope distance (used by the Monte-Carlo oracle)
# ----------------------------------------------------------------------------

def _segment_distance(points, a, b):
    ab = b - a
    denom = float(ab @ ab)
    t = np.clip((points - a) @ ab / denom, 0.0, 1.0) if denom > 0 else np.zeros(len(points))
    diff = points - (a + t[:, None] * ab)
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def _triangle_plane_distance(points, a, b, c):
    """Distance to the triangle's plane where the projection falls inside, else inf."""
    e0, e1 = b - a, c - a
    n = np.cross(e0, e1)
    nn = float(n @ n)
    w = points - a
    h = w @ n / nn
    proj = w - h[:, None] * n
    d00, d01, d11 = e0 @ e0, e0 @ e1, e1 @ e1
    p0, p1 = proj @ e0, proj @ e1
    det = d00 * d11 - d01 * d01
    s = (d11 * p0 - d01 * p1) / det
    t = (d00 * p1 - d01 * p0) / det
    inside = (s >= 0) & (t >= 0) & (s + t <= 1)
    return np.where(inside, np.abs(h) * math.sqrt(nn), np.inf)


def polytope_distance(vertices: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Euclidean distance from each point to ``conv(vertices)`` (affine dimension <= 3)."""
    vertices = np.asarray(vertices, dtype=float)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    center = vertices.mean(axis=0)
    _, sv, vt = np.linalg.svd(vertices - center, full_matrices=False)
    scale = max(1.0, float(sv[0]) if sv.size else 1.0)
    rank = int(np.sum(sv > 1e-12 * scale))
    basis = vt[:rank]
    rel = points - center
    local = rel @ basis.T
    perp2 = np.maximum(np.einsum("ij,ij->i", rel, rel) - np.einsum("ij,ij->i", local, local), 0.0)
    if rank == 0:
        return np.sqrt(perp2)
    lv = (vertices - center) @ basis.T
    if rank == 1:
        lo, hi = lv.min(), lv.max()
        gap = np.maximum(np.maximum(lo - local[:, 0], 0.0), local[:, 0] - hi)
        inplane = gap
    elif rank in (2, 3):
        hull = ConvexHull(lv)
        eq = hull.equations
        inside = np.all(local @ eq[:, :-1].T + eq[:, -1] <= 1e-12 * scale, axis=1)
        inplane = np.full(len(points), np.inf)
        edges = set()
        for simplex in hull.simplices:
            for i, j in itertools.combinations(sorted(simplex), 2):
                edges.add((i, j))
        for i, j in edges:
            inplane = np.minimum(inplane, _segment_distance(local, lv[i], lv[j]))
        if rank == 3:
            for tri in hull.simplices:
                inplane = np.minimum(inplane, _triangle_plane_distance(local, *lv[tri]))
        inplane = np.where(inside, 0.0, inplane)
    else:
        raise ValueError("point-to-polytope distance supports affine dimension <= 3")
    return np.sqrt(perp2 + inplane ** 2)


# ----------------------------------------------------------------------------
# Monte-Carlo Steiner oracle
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class SteinerEstimate:
    """Least-squares intrinsic volumes with standard errors from the count covariance."""

    values: np.ndarray
    stderr: np.ndarray
    radii: np.ndarray
    parallel_volumes: np.ndarray


BLOCK = 1 << 17


def _block_counts(body, lo, hi, radii, n, seq):
    rng = np.random.default_rng(seq)
    pts = lo + (hi - lo) * rng.random((n, body.dim))
    d = body.distance(pts)
    return np.array([np.count_nonzero(d <= r) for r in radii], dtype=np.int64)


def steiner_mc_volumes(body: ConvexBody, radii: Sequence[float], samples: int = 10 ** 6,
                       seed: int = 0, workers: int = 1) -> SteinerEstimate:
    """Estimate ``(V_0, ..., V_N)`` by fitting the Steiner polynomial to sampled parallel volumes.

    Points are drawn uniformly in the bounding box padded by the largest radius;
    one sample set serves every radius. The sample stream is split into fixed
    blocks with spawned seeds, so the result does not depend on ``workers``.
    """
    radii = np.asarray(radii, dtype=float)
    n = body.dim
    if len(np.unique(radii)) != len(radii) or len(radii) < n + 1:
        raise ValueError("need at least N+1 distinct radii")
    if np.any(radii <= 0):
        raise ValueError("radii must be positive")
    if samples < 10 ** 4:
        raise ValueError("samples must be at least 1e4")
    rmax = float(radii.max())
    blo, bhi = body.bbox()
    lo, hi = blo - rmax, bhi + rmax
    box_vol = float(np.prod(hi - lo))

    sizes = [BLOCK] * (samples // BLOCK)
    if samples % BLOCK:
        sizes.append(samples % BLOCK)
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = [(body, lo, hi, radii, s, q) for s, q in zip(sizes, seqs)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(lambda a: _block_counts(*a), jobs))
    else:
        parts = [_block_counts(*a) for a in jobs]
    counts = np.sum(parts, axis=0)

    p = counts / samples
    vols = box_vol * p
    # indicators {d <= r} are nested, so E[1_r 1_s] = min(p_r, p_s)
    pmin = np.minimum.outer(p, p)
    cov = box_vol ** 2 * (pmin - np.outer(p, p)) / samples

    design = np.column_stack([unit_ball_volume(n - k) * radii ** (n - k) for k in range(n + 1)])
    if np.linalg.matrix_rank(design) < n + 1 or np.linalg.cond(design) > 1e12:
        raise np.linalg.LinAlgError("Steiner fit matrix is singular for these radii")
    pinv = np.linalg.pinv(design)
    est = pinv @ vols
    se = np.sqrt(np.maximum(np.diag(pinv @ cov @ pinv.T), 0.0))
    return SteinerEstimate(est, se, radii, vols)
