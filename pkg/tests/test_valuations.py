import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcval import geometry as geo
from qcval.checks import reference_specs
from qcval.generators import compatible_pair, random_box_stack, random_zonotope_stack
from qcval.geometry import Box
from qcval.measures import DiscreteMeasure, Hinge, Poly, Zero
from qcval.qcf import indicator, lattice_max, lattice_min, make_simple
from qcval.valuations import (DensitySpec, MonotoneSpec, ValuationOracle, check_invariance,
                              check_valuation_identity, continuity_probe, integral_valuation,
                              max_type_valuation, monotone_valuation)

seeds = st.integers(0, 2 ** 32 - 1)
F3 = indicator(Box([0, 0], [2, 2]), 3.0)
ZERO2 = make_simple([], dim=2)


def hinge_spec(k, a=1.0, dim=2):
    return integral_valuation(DensitySpec.single(dim, k, Hinge(a), a))


def test_integral_examples():
    assert hinge_spec(2)(F3) == 8
    assert hinge_spec(1)(F3) == 8
    assert hinge_spec(2)(ZERO2) == 0


def test_density_spec_validation():
    with pytest.raises(ValueError):
        DensitySpec((Zero(), Hinge(0.5), Zero()), delta=1.0)
    with pytest.raises(ValueError):
        DensitySpec((Poly((1.0,)), Zero(), Zero()), delta=1.0)
    spec = DensitySpec((Poly((0.0, 1.0)), Zero(), Hinge(1.0)), delta=1.0)
    assert spec.dim == 2


def test_monotone_examples():
    nu2 = DiscreteMeasure(((1.0, 1.0),))
    empty = DiscreteMeasure(())
    mu = monotone_valuation(MonotoneSpec((empty, empty, nu2), delta=0.5))
    assert mu(F3) == 4
    zero = monotone_valuation(MonotoneSpec((empty, empty, empty), delta=0.5))
    assert zero(F3) == 0
    with pytest.raises(ValueError):
        MonotoneSpec((empty, DiscreteMeasure(((0.2, 1.0),)), empty), delta=0.5)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_monotone_valuation_is_monotone(seed):
    rng = np.random.default_rng(seed)
    nus = tuple(DiscreteMeasure(tuple((float(t), float(m)) for t, m in
                                      zip(np.sort(rng.uniform(0.5, 4, 3)), rng.uniform(0, 2, 3))))
                for _ in range(3))
    mu = monotone_valuation(MonotoneSpec(nus, delta=0.5))
    f = random_box_stack(rng, 2)
    g = lattice_min(f, random_box_stack(rng, 2))
    assert mu(g) <= mu(f) + 1e-12


def test_max_type_examples():
    mu = max_type_valuation(Poly((0.0, 0.0, 1.0)), 2)
    assert mu(indicator(Box([0, 0], [1, 1]), 2.0)) == 4
    assert mu(ZERO2) == 0
    with pytest.raises(ValueError):
        max_type_valuation(Poly((1.0,)), 2)


def test_valuation_identity_examples():
    rng = np.random.default_rng(0)
    f = random_box_stack(rng, 2)
    assert check_valuation_identity(hinge_spec(2), f, f) == 0
    a = indicator(Box([0, 0], [2, 2]), 2.0)
    b = indicator(Box([1, 0], [3, 2]), 2.0)
    assert check_valuation_identity(hinge_spec(2), a, b) <= 1e-9
    bad = indicator(Box([1, 0], [3, 1]), 2.0)
    assert check_valuation_identity(hinge_spec(2), a, bad) is None


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_valuation_identity_on_compatible_pairs(seed):
    rng = np.random.default_rng(seed)
    f, g = compatible_pair(rng, 2)
    for name, (mu, _) in reference_specs(2).items():
        r = check_valuation_identity(mu, f, g)
        assert r is not None
        tol = 1e-12 if name == "max_phi0" else 1e-8 * (1 + abs(mu(f)) + abs(mu(g)))
        assert r <= tol


def test_max_type_identity_uses_maxima():
    rng = np.random.default_rng(4)
    mu = max_type_valuation(Poly((0.0, 0.0, 1.0)), 2)
    for _ in range(30):
        f, g = compatible_pair(rng, 2)
        assert lattice_max(f, g).max_value == max(f.max_value, g.max_value)
        assert check_valuation_identity(mu, f, g) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_invariances(seed):
    rng = np.random.default_rng(seed)
    mu = integral_valuation(DensitySpec((Zero(), Hinge(0.5), Hinge(1.0)), 0.5))
    f = random_box_stack(rng, 2)
    assert check_invariance(mu, f, v=[7.0, -3.0]) <= 1e-9 * max(1, abs(mu(f)))
    z = random_zonotope_stack(rng, 2, centered=True)
    assert check_invariance(mu, z, reflect=True) <= 1e-12 * max(1, abs(mu(z)))
    q, _ = np.linalg.qr(rng.normal(size=(2, 2)))
    assert check_invariance(mu, random_zonotope_stack(rng, 2), rotation=q) <= 1e-9 * max(1, abs(mu(z)))


def test_invariance_requires_declared_flags():
    plain = ValuationOracle(lambda f: f.max_value, 2, translation_invariant=False)
    f = indicator(Box([0, 0], [1, 1]))
    with pytest.raises(ValueError):
        check_invariance(plain, f, v=[1.0, 0.0])
    with pytest.raises(ValueError):
        check_invariance(plain, f, reflect=True)
    with pytest.raises(ValueError):
        check_invariance(plain, f, rotation=np.eye(2))


def test_oracle_algebra():
    a, b = hinge_spec(2), max_type_valuation(Poly((0.0, 1.0)), 2)
    s = a + b
    assert s(F3) == 8 + 3
    assert s.degree is None and a.degree == 2 and b.degree == 0
    assert a.scaled(2.0)(F3) == 16


@pytest.mark.parametrize("name", ["hinge_phi2", "hinge_phi1", "max_phi0"])
def test_continuity_probe_monotone_convergence(name):
    mu, _ = reference_specs(2)[name]
    vals, limit = continuity_probe(mu, geo.unit_cube(2), 1.0, range(1, 13))
    d = np.diff(vals)
    assert np.all(d <= 0) or np.all(d >= 0)
    assert abs(vals[-1] - limit) <= 1e-3
    assert abs(vals[-1] - limit) <= abs(vals[0] - limit)
