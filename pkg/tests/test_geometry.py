import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcval import geometry as geo
from qcval.geometry import Box, Frame, Zonotope


def square(lo=0.0, hi=1.0):
    return Box([lo, lo], [hi, hi])


# --- intrinsic volumes -------------------------------------------------------

@pytest.mark.parametrize("body, expected", [
    (square(), (1, 2, 1)),
    (Box([0, 0], [1, 0]), (1, 1, 0)),
    (square(0, 2), (1, 4, 4)),
    (Box([0, 0, 0], [1, 2, 3]), (1, 6, 11, 6)),
])
def test_box_intrinsic_volumes(body, expected):
    np.testing.assert_allclose(geo.box_intrinsic_volumes(body), expected, rtol=0, atol=1e-15)


def test_zonotope_intrinsic_volumes_known_values():
    z2 = Zonotope([0, 0], [[1, 0], [0, 1]])
    assert geo.zonotope_intrinsic_volume(z2, 1) == pytest.approx(2, abs=1e-15)
    z3 = Zonotope([0, 0, 0], np.eye(3))
    assert geo.zonotope_intrinsic_volume(z3, 2) == pytest.approx(3, abs=1e-15)
    point = Zonotope([0.0, 0.0], np.zeros((0, 2)))
    assert geo.zonotope_intrinsic_volume(point, 0) == 1
    assert geo.zonotope_intrinsic_volume(point, 1) == 0


def test_zonotope_hexagon_area():
    # regular hexagon with unit side: area 3*sqrt(3)/2, perimeter 6
    gens = [[math.cos(a), math.sin(a)] for a in (0, math.pi / 3, 2 * math.pi / 3)]
    v = geo.intrinsic_volumes(Zonotope([0, 0], gens))
    np.testing.assert_allclose(v, [1, 3, 1.5 * math.sqrt(3)], rtol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 5), min_size=1, max_size=4), st.floats(0.1, 4))
def test_box_volumes_match_zonotope_and_scale(sides, lam):
    b = Box(np.zeros(len(sides)), np.array(sides))
    vb = geo.intrinsic_volumes(b)
    vz = geo.intrinsic_volumes(b.to_zonotope())
    np.testing.assert_allclose(vb, vz, rtol=1e-12, atol=1e-12)
    scaled = geo.intrinsic_volumes(geo.transform_body(b, lam))
    np.testing.assert_allclose(scaled, vb * lam ** np.arange(len(vb)), rtol=1e-12, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_zonotope_volumes_rigid_motion_invariant(seed):
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(1, 4))
    z = Zonotope(rng.normal(size=dim), rng.normal(size=(int(rng.integers(0, 5)), dim)))
    q, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    moved = geo.rotate_body(geo.transform_body(z, 1.0, rng.normal(size=dim), True), q)
    np.testing.assert_allclose(geo.intrinsic_volumes(moved), geo.intrinsic_volumes(z),
                               rtol=1e-10, atol=1e-12)


def test_intrinsic_volume_out_of_range():
    with pytest.raises(ValueError):
        geo.intrinsic_volume(square(), 3)


# --- Monte-Carlo Steiner fit -----------------------------------------------

RADII = np.linspace(0.1, 1.0, 10)


def test_steiner_mc_unit_square():
    est = geo.steiner_mc_volumes(square(), RADII, 10 ** 6, seed=0)
    np.testing.assert_allclose(est.values, [1, 2, 1], rtol=0.02)


def test_steiner_mc_point():
    est = geo.steiner_mc_volumes(geo.point_body(2), RADII, 10 ** 6, seed=0)
    assert est.values[0] == pytest.approx(1, rel=0.02)
    assert abs(est.values[1]) < 0.02 and abs(est.values[2]) < 0.02


def test_steiner_mc_unit_cube():
    est = geo.steiner_mc_volumes(geo.unit_cube(3), RADII, 10 ** 6, seed=0)
    np.testing.assert_allclose(est.values, [1, 3, 3, 1], rtol=0.03)


def test_steiner_mc_independent_of_workers():
    z = Zonotope([0, 0], [[1, 0.3], [0.2, 1]])
    a = geo.steiner_mc_volumes(z, RADII, 3 * 10 ** 5, seed=7, workers=1)
    b = geo.steiner_mc_volumes(z, RADII, 3 * 10 ** 5, seed=7, workers=3)
    np.testing.assert_array_equal(a.values, b.values)
    np.testing.assert_array_equal(a.stderr, b.stderr)


def test_polytope_distance_matches_box_distance():
    rng = np.random.default_rng(3)
    b = Box([0, -1, 0.5], [2, 1, 1.5])
    pts = rng.uniform(-3, 4, (500, 3))
    np.testing.assert_allclose(geo.polytope_distance(b.vertices(), pts), b.distance(pts),
                               atol=1e-12)


# --- support function and Hausdorff distance --------------------------------

def test_support_values():
    assert geo.support_value(square(), [1, 0]) == 1
    assert geo.support_value(square(), [1, 1], allow_zero=False) == 2
    z = Zonotope([0, 0], [[1, 0], [0, 1]])
    assert geo.support_value(z, [-1, 0]) == 0


def test_support_rejects_zero_direction():
    with pytest.raises(ValueError):
        geo.support_value(square(), [0, 0])


def test_hausdorff_examples():
    k = square()
    assert geo.hausdorff_distance(k, k) == 0
    assert geo.hausdorff_distance(k, geo.transform_body(k, 1.0, [2, 0])) == pytest.approx(2, abs=1e-12)
    # the farthest point of [0,2]^2 from [0,1]^2 is the corner (2,2), at distance sqrt(2)
    assert geo.hausdorff_distance(k, square(0, 2)) == pytest.approx(math.sqrt(2), abs=1e-12)


def test_hausdorff_box_pair_matches_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(20):
        a = Box(*np.sort(rng.uniform(-2, 2, (2, 2)), axis=0))
        b = Box(*np.sort(rng.uniform(-2, 2, (2, 2)), axis=0))
        brute = max(max(b.distance(a.vertices())), max(a.distance(b.vertices())))
        assert geo.hausdorff_distance(a, b) == pytest.approx(brute, abs=1e-12)


# --- transforms and box set operations ----------------------------------------

def test_transform_examples():
    b = geo.transform_body(square(), 2.0)
    assert isinstance(b, Box) and geo.intrinsic_volume(b, 2) == 4
    assert geo.bodies_equal(geo.transform_body(square(), 1.0), square())
    r = geo.transform_body(square(), 1.0, reflect=True)
    assert geo.bodies_equal(r, square(-1, 0))
    np.testing.assert_array_equal(geo.intrinsic_volumes(r), geo.intrinsic_volumes(square()))


def test_transform_rejects_nonpositive_scale():
    with pytest.raises(ValueError):
        geo.transform_body(square(), 0.0)


def test_box_intersect_examples():
    a, b = square(0, 2), Box([1, 0], [3, 2])
    assert geo.bodies_equal(geo.box_intersect(a, b), Box([1, 0], [2, 2]))
    assert geo.box_intersect(square(), Box([2, 2], [3, 3])) is None
    assert geo.bodies_equal(geo.box_intersect(a, a), a)


def test_box_union_examples():
    a = square(0, 2)
    assert geo.bodies_equal(geo.box_union_if_convex(a, Box([1, 0], [3, 2])), Box([0, 0], [3, 2]))
    assert geo.box_union_if_convex(a, Box([1, 0], [3, 1])) is None
    assert geo.bodies_equal(geo.box_union_if_convex(square(), a), a)


def test_box_union_touching_faces_is_convex():
    u = geo.box_union_if_convex(square(0, 1), Box([1, 0], [2, 1]))
    assert geo.bodies_equal(u, Box([0, 0], [2, 1]))


def test_box_union_degenerate_segments():
    u = geo.box_union_if_convex(Box([0, 0], [1, 0]), Box([0.5, 0], [2, 0]))
    assert geo.bodies_equal(u, Box([0, 0], [2, 0]))
    assert geo.box_union_if_convex(Box([0, 0], [1, 0]), Box([0, 0], [0, 1])) is None


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_box_union_agrees_with_grid_membership(seed):
    rng = np.random.default_rng(seed)
    a = Box(*np.sort(rng.integers(0, 4, (2, 2)), axis=0).astype(float))
    b = Box(*np.sort(rng.integers(0, 4, (2, 2)), axis=0).astype(float))
    u = geo.box_union_if_convex(a, b)
    # the union is convex exactly when it fills its bounding box
    lo, hi = np.minimum(a.lo, b.lo), np.maximum(a.hi, b.hi)
    axes = [np.linspace(l, h, 41) for l, h in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes), -1).reshape(-1, 2)
    fills = all(a.contains(p) or b.contains(p) for p in grid)
    assert (u is not None) == fills
    if u is not None:
        assert geo.bodies_equal(u, Box(lo, hi))


# --- frames and embedded bodies ------------------------------------------------

def test_embedded_examples():
    seg = Box([0.0], [1.0])
    e = geo.embed(seg, Frame([[1.0, 0.0]]))
    np.testing.assert_allclose(geo.intrinsic_volumes(e), [1, 1, 0])
    s = 1 / math.sqrt(2)
    d = geo.embed(seg, Frame([[s, s]]))
    assert geo.intrinsic_volume(d, 1) == pytest.approx(1, abs=1e-15)
    assert geo.support_value(d, [1, 1]) == pytest.approx(math.sqrt(2), abs=1e-15)
    sq = geo.embed(geo.unit_cube(2), Frame([[1, 0, 0], [0, 1, 0]]))
    v = geo.intrinsic_volumes(sq)
    assert v[2] == pytest.approx(1) and v[3] == 0


def test_embedded_to_zonotope_preserves_volumes():
    rng = np.random.default_rng(5)
    q, _ = np.linalg.qr(rng.normal(size=(3, 2)))
    e = geo.embed(Box([0, 0], [1, 2]), Frame(q.T), offset=[1, 2, 3])
    np.testing.assert_allclose(geo.intrinsic_volumes(e.to_zonotope()), geo.intrinsic_volumes(e),
                               rtol=1e-12)


def test_frame_rejects_non_orthonormal():
    with pytest.raises(ValueError):
        Frame([[1.0, 1.0]])


def test_box_rejects_inverted_bounds():
    with pytest.raises(ValueError):
        Box([0, 1], [1, 0])


def test_containment():
    assert geo.contains_body(square(0, 2), square())
    assert not geo.contains_body(square(), square(0, 2))
    z = Zonotope([0, 0], [[1, 1], [1, -1]])  # diamond with vertices (0,0),(1,1),(1,-1),(2,0)
    assert geo.contains_body(z, Box([0.5, -0.2], [1.5, 0.2]))
    assert not geo.contains_body(z, square())
