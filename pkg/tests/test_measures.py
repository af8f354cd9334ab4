import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcval import geometry as geo
from qcval.generators import random_box_stack, random_test_function, random_zonotope_stack
from qcval.geometry import Box
from qcval.measures import (ConeMeasure, DiscreteMeasure, Hinge, PiecewiseLinear, Poly, Zero, bump,
                            cone_reference_measure, distributional_check, hat, integrate,
                            level_measure, level_profile)
from qcval.qcf import cone_oracle, dyadic_approx, indicator, make_simple, transform_qcf

seeds = st.integers(0, 2 ** 32 - 1)


def sq(lo, hi):
    return Box([lo, lo], [hi, hi])


TWO_LEVEL = make_simple([(1, sq(0, 2)), (2, sq(0, 1))])


# --- densities -----------------------------------------------------------------

def test_hinge_values_and_support():
    h = Hinge(1.0)
    assert h(0.5) == 0 and h(1.0) == 0 and h(3.0) == 2
    assert h.vanishes_on(1.0) and not h.vanishes_on(1.5)
    assert Hinge(0.25, 2.0)(1.25) == 2.0


def test_piecewise_linear_holds_end_values():
    p = PiecewiseLinear(((1.0, 2.0), (3.0, 4.0)))
    assert p(2.0) == 3.0 and p(0.5) == 2.0 and p(10.0) == 4.0


def test_poly_and_bump():
    assert Poly((0.0, 0.0, 1.0))(3.0) == 9.0
    b = bump(1.0, 3.0, height=2.0)
    assert b(2.0) == pytest.approx(2.0) and b(0.5) == 0 and b(3.5) == 0
    assert b.support() == (1.0, 3.0)


def test_hat_shape():
    h = hat(1.0, 2.0, 4.0, height=3.0)
    assert h(2.0) == 3.0 and h(3.0) == 1.5 and h(0.5) == 0 and h(5.0) == 0


# --- level profiles and measures -------------------------------------------------

def test_level_profile_examples():
    f = indicator(sq(0, 2), 3.0)
    u2 = level_profile(f, 2)
    assert u2(0.1) == 4 and u2(3.0) == 4 and u2(3.0001) == 0
    u0 = level_profile(TWO_LEVEL, 0)
    assert u0(0.5) == 1 and u0(2.0) == 1 and u0(2.5) == 0
    assert level_measure(make_simple([], dim=2), 1).atoms == ()


def test_level_measure_examples():
    s = 2.5
    body = Box([0, 0, 0], [1, 2, 0.5])
    for k in range(4):
        m = level_measure(indicator(body, s), k)
        assert m.atoms == ((s, geo.intrinsic_volume(body, k)),)
    assert level_measure(TWO_LEVEL, 0).atoms == ((2.0, 1.0),)
    assert level_measure(TWO_LEVEL, 2).atoms == ((1.0, 3.0), (2.0, 1.0))


def test_integrate_examples():
    assert integrate(DiscreteMeasure(((3.0, 4.0),)), Hinge(1.0)) == 8
    assert integrate(level_measure(TWO_LEVEL, 2), Zero()) == 0
    assert integrate(DiscreteMeasure(((1.0, 3.0), (2.0, 1.0))), Poly((0, 0, 1))) == 7


def test_measure_csv():
    assert level_measure(TWO_LEVEL, 2).to_csv() == "t,mass\n1,3\n2,1\n"


def test_discrete_measure_validates_locations():
    with pytest.raises(ValueError):
        DiscreteMeasure(((2.0, 1.0), (1.0, 1.0)))
    with pytest.raises(ValueError):
        DiscreteMeasure(((0.0, 1.0),))


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_mass_bookkeeping_and_nonnegativity(seed):
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(1, 4))
    f = random_box_stack(rng, dim) if seed % 2 else random_zonotope_stack(rng, dim)
    for k in range(dim + 1):
        m = level_measure(f, k)
        assert np.all(m.masses >= -1e-12)
        assert m.total_mass() == pytest.approx(geo.intrinsic_volume(f.bodies[0], k), rel=1e-12,
                                               abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds, st.floats(0.1, 8.0))
def test_translation_invariance_and_scaling_covariance(seed, lam):
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(1, 4))
    f = random_box_stack(rng, dim) if seed % 2 else random_zonotope_stack(rng, dim)
    moved = transform_qcf(f, 1.0, rng.uniform(-5, 5, dim))
    scaled = transform_qcf(f, lam)
    for k in range(dim + 1):
        m = level_measure(f, k)
        mt = level_measure(moved, k)
        ms = level_measure(scaled, k)
        np.testing.assert_array_equal(mt.locations, m.locations)
        np.testing.assert_allclose(mt.masses, m.masses, rtol=1e-12, atol=1e-12)
        np.testing.assert_array_equal(ms.locations, m.locations)
        np.testing.assert_allclose(ms.masses, lam ** k * m.masses, rtol=1e-10, atol=1e-12)


# --- distributional identity ----------------------------------------------------------

def test_distributional_hat_straddling_threshold():
    assert distributional_check(TWO_LEVEL, 2, hat(0.5, 1.0, 1.5)) <= 1e-8
    assert distributional_check(TWO_LEVEL, 1, hat(1.7, 2.0, 2.6)) <= 1e-8


def test_distributional_support_beyond_top_level():
    assert distributional_check(TWO_LEVEL, 2, hat(2.5, 3.0, 3.5)) == 0


def test_distributional_smooth_psi_on_indicator():
    body = Box([0, 0], [1.5, 0.5])
    f = indicator(body, 2.0)
    psi = bump(1.0, 3.0)
    for k in range(3):
        assert distributional_check(f, k, psi) <= 1e-8
        assert integrate(level_measure(f, k), psi) == pytest.approx(
            psi(2.0) * geo.intrinsic_volume(body, k), rel=1e-14)


def test_distributional_rejects_bad_psi():
    with pytest.raises(ValueError):
        distributional_check(TWO_LEVEL, 1, Poly((1.0, 1.0)))
    with pytest.raises(ValueError):
        distributional_check(TWO_LEVEL, 1, hat(0.0, 0.5, 1.0))
    with pytest.raises(ValueError):
        distributional_check(TWO_LEVEL, 1, hat(0.5, 1.0, 1.5), quadrature_step=0.5)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_distributional_identity_random(seed):
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(1, 4))
    f = random_box_stack(rng, dim)
    k = int(rng.integers(0, dim + 1))
    assert distributional_check(f, k, random_test_function(rng)) <= 1e-8


# --- cone reference measure ----------------------------------------------------------------

def test_cone_measure_examples():
    m2 = cone_reference_measure(geo.unit_cube(2), 2)
    assert m2.density(0.25) == pytest.approx(1.5) and m2.total_mass() == 1
    m1 = cone_reference_measure(geo.unit_cube(2), 1)
    assert m1.density(0.7) == 2 and m1.total_mass() == 2
    assert m2.integrate(Hinge(0.25)) == pytest.approx(9 / 64, abs=1e-12)
    assert cone_reference_measure(geo.unit_cube(2), 0).atoms == ((1.0, 1.0),)


def test_cone_measure_integrates_density_to_mass():
    m = ConeMeasure(3, 2.0)
    assert m.integrate(Poly((1.0,))) == pytest.approx(2.0, abs=1e-10)


@pytest.mark.parametrize("k", [1, 2])
def test_dyadic_consistency_with_cone_measure(k):
    cone = cone_oracle(geo.unit_cube(2))
    phi = Hinge(0.25)
    exact = cone_reference_measure(geo.unit_cube(2), k).integrate(phi)
    errs = [abs(integrate(level_measure(dyadic_approx(cone, i), k), phi) - exact)
            for i in range(2, 9)]
    assert all(b <= a for a, b in zip(errs, errs[1:]))
    # Lipschitz density: error halves with each extra level, up to a constant
    for i, e in zip(range(2, 9), errs):
        assert e <= 2.0 * 2.0 ** -i


def test_max_value_atom_for_k0():
    rng = np.random.default_rng(2)
    for _ in range(10):
        f = random_box_stack(rng, 2)
        assert level_measure(f, 0).atoms == ((f.max_value, 1.0),)
    assert math.isclose(level_measure(TWO_LEVEL, 1).total_mass(), 4.0)  # V_1 is half the perimeter
