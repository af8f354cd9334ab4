"""The built-in check suite run by ``qcval check``.

Each ``check_*`` function returns :class:`ReportRow` entries; tolerances are
pinned here. Relative tolerances are taken against ``max(1, |reference|)``.
Randomness comes from ``default_rng([seed, criterion])`` so every criterion
is reproducible on its own.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .analysis import (grassmannian_frames, klain_reconstruct_check,
                       klain_separation, recover_density, verify_decomposition)
from .generators import (compatible_pair, grid_aligned_stack, random_box, random_box_stack,
                         random_test_function, random_zonotope, random_zonotope_stack)
from .measures import Hinge, Poly, distributional_check
from .qcf import cone_oracle, dyadic_approx, indicator
from .valuations import (DensitySpec, check_valuation_identity, continuity_probe,
                         integral_valuation, max_type_valuation)

EXACT_TOL = 1e-8
HINGE_A = 0.25
RADII = tuple(np.round(np.linspace(0.1, 1.0, 10), 12))


@dataclass(frozen=True)
class ReportRow:
    name: str
    expected: object  # float or "n/a"
    actual: float
    residual: float
    tol: float
    passed: bool

    def line(self) -> str:
        exp = self.expected if isinstance(self.expected, str) else f"{self.expected:.17g}"
        return (f"{self.name},{exp},{self.actual:.17g},{self.residual:.17g},"
                f"{self.tol:.17g},{'pass' if self.passed else 'FAIL'}")


def _row(name, expected, actual, residual, tol):
    return ReportRow(name, expected, float(actual), float(residual), float(tol),
                     bool(residual <= tol))


def _rel(actual, expected):
    return abs(actual - expected) / max(1.0, abs(expected))


def reference_specs(dim: int = 2) -> dict:
    """The three reference valuations: hinge on ``phi_2``, hinge on ``phi_1``, ``phi_0(t) = t^2``."""
    hinge = Hinge(HINGE_A)
    return {
        "hinge_phi2": (integral_valuation(DensitySpec.single(dim, 2, hinge, HINGE_A), "hinge_phi2"),
                       {2: hinge}),
        "hinge_phi1": (integral_valuation(DensitySpec.single(dim, 1, hinge, HINGE_A), "hinge_phi1"),
                       {1: hinge}),
        "max_phi0": (max_type_valuation(Poly((0.0, 0.0, 1.0)), dim, "max_phi0"),
                     {0: Poly((0.0, 0.0, 1.0))}),
    }


def check_intrinsic_volumes(seed: int = 0, samples: int = 10 ** 6, workers: int = 1):
    """Exact intrinsic volumes against the Monte-Carlo Steiner fit, in standard errors."""
    rng = np.random.default_rng([seed, 1])
    rows = []
    for i in range(20):
        dim = 1 + i % 3
        if i < 10:
            body, label = random_box(rng, dim, side=(0.3, 2.0)), "box"
        else:
            body, label = random_zonotope(rng, dim), "zonotope"
        exact = geo.intrinsic_volumes(body)
        est = geo.steiner_mc_volumes(body, RADII, samples, seed=seed * 1000 + i, workers=workers)
        z = np.abs(est.values - exact) / est.stderr
        worst = int(np.argmax(z))
        rows.append(_row(f"c1.volumes.{label}{i % 10}.N{dim}.V{worst}", exact[worst],
                         est.values[worst], z[worst], 3.0))
    return rows


def check_axioms(seed: int = 0, n_pairs: int = 500, tol: float = EXACT_TOL, dim: int = 2):
    rng = np.random.default_rng([seed, 2])
    pairs = [compatible_pair(rng, dim) for _ in range(n_pairs)]
    rows = []
    for name, (mu, _) in reference_specs(dim).items():
        worst = 0.0
        for f, g in pairs:
            r = check_valuation_identity(mu, f, g)
            if r is None:
                worst = math.inf
                break
            worst = max(worst, r / (1 + abs(mu(f)) + abs(mu(g))))
        rows.append(_row(f"c2.valuation_identity.{name}", 0.0, worst, worst, tol))
    return rows


def check_indicator_closed_form(seed: int = 0, n: int = 50, dim: int = 2):
    rng = np.random.default_rng([seed, 3])
    rows = []
    for name, (mu, phis) in reference_specs(dim).items():
        worst, worst_pair = 0.0, (0.0, 0.0)
        for i in range(n):
            body = random_box(rng, dim) if i % 2 == 0 else random_zonotope(rng, dim)
            s = float(rng.uniform(0.05, 4.0))
            vk = geo.intrinsic_volumes(body)
            expected = math.fsum(float(phi(s)) * vk[k] for k, phi in phis.items())
            actual = mu(indicator(body, s))
            err = abs(actual - expected) / abs(expected) if expected else abs(actual)
            if err >= worst:
                worst, worst_pair = err, (expected, actual)
        rows.append(_row(f"c3.indicator_closed_form.{name}", worst_pair[0], worst_pair[1],
                         worst, 1e-12))
    return rows


def check_distributional(seed: int = 0, n: int = 100, tol: float = EXACT_TOL):
    rng = np.random.default_rng([seed, 4])
    worst = 0.0
    for i in range(n):
        dim = int(rng.integers(1, 4))
        f = random_box_stack(rng, dim) if i % 4 else random_zonotope_stack(rng, dim)
        k = int(rng.integers(0, dim + 1))
        psi = random_test_function(rng)
        worst = max(worst, distributional_check(f, k, psi))
    return [_row("c4.distributional_identity", 0.0, worst, worst, tol)]


def mixed_oracle(dim: int = 2):
    specs = reference_specs(dim)
    parts = {0: specs["max_phi0"][0], 1: specs["hinge_phi1"][0], 2: specs["hinge_phi2"][0]}
    return parts[0] + parts[1] + parts[2], parts


def check_decomposition(seed: int = 0, n: int = 50, tol: float = EXACT_TOL,
                        lambdas=(0.5, 3.0, 7.25)):
    rng = np.random.default_rng([seed, 5])
    mu, parts = mixed_oracle(2)
    sum_res = homog_res = match_res = 0.0
    for _ in range(n):
        f = random_box_stack(rng, 2)
        rep = verify_decomposition(mu, f, lambdas)
        sum_res = max(sum_res, rep.residual_sum / rep.scale)
        for (k, lam), r in rep.residual_homog.items():
            homog_res = max(homog_res, r / max(1.0, abs(lam ** k * rep.components[k])))
        for k, part in parts.items():
            match_res = max(match_res, _rel(rep.components[k], part(f)))
    return [_row("c5.decomposition_sum", 0.0, sum_res, sum_res, 1e-10),
            _row("c5.component_homogeneity", 0.0, homog_res, homog_res, tol),
            _row("c5.component_matches_summand", 0.0, match_res, match_res, tol)]


RECOVERY_GRID = (0.25, 0.5, 1.0, 1.5, 2.0, 3.0)


def check_recovery(seed: int = 0, n: int = 20, tol: float = EXACT_TOL):
    rng = np.random.default_rng([seed, 6])
    mu, phis = reference_specs(2)["hinge_phi2"]
    c = recover_density(mu, "N", RECOVERY_GRID)
    grid_err = max(abs(c(t) - phis[2](t)) for t in RECOVERY_GRID)
    rebuilt = integral_valuation(DensitySpec.single(2, 2, c, HINGE_A))
    worst = 0.0
    for _ in range(n):
        f = grid_aligned_stack(rng, 2, RECOVERY_GRID)
        worst = max(worst, _rel(rebuilt(f), mu(f)))
    return [_row("c6.recovered_density_on_grid", 0.0, grid_err, grid_err, 1e-10),
            _row("c6.roundtrip_reevaluation", 0.0, worst, worst, tol)]


CONE_LIMIT = 9 / 64


def check_cone_convergence(seed: int = 0, depth: int = 7):
    mu = reference_specs(2)["hinge_phi2"][0]
    cone = cone_oracle(geo.unit_cube(2))
    vals = [mu(dyadic_approx(cone, i)) for i in range(1, depth + 1)]
    drop = max([0.0] + [a - b for a, b in zip(vals, vals[1:])])
    err = abs(vals[-1] - CONE_LIMIT)
    return [_row(f"c7.cone_error_at_depth{depth}", CONE_LIMIT, vals[-1], err, 0.01),
            _row("c7.cone_monotone_nondecreasing", 0.0, drop, drop, 0.0)]


KLAIN_GRID = (0.25, 0.5, 1.0, 1.5, 2.0, 3.0)


def check_klain(seed: int = 0, tol: float = EXACT_TOL):
    mu, phis = reference_specs(2)["hinge_phi1"]
    frames = grassmannian_frames(2, 1, n_random=3, seed=seed)
    rep = klain_reconstruct_check(mu, KLAIN_GRID, frames, n_test=10, seed=seed)
    phi_err = max(abs(s.value - phis[1](s.t)) for s in rep.samples)
    a = integral_valuation(DensitySpec.single(2, 1, Hinge(0.5), 0.5))
    b = integral_valuation(DensitySpec.single(2, 1, Hinge(1.0), 1.0))
    sep = klain_separation(a, b, 1.5, frames)
    return [_row(f"c8.klain_spread_{len(frames)}frames", 0.0, rep.max_spread(), rep.max_spread(), 1e-9),
            _row("c8.klain_equals_phi1", 0.0, phi_err, phi_err, 1e-9),
            _row("c8.klain_reconstruction", 0.0, rep.deviation, rep.deviation, tol),
            ReportRow("c8.injectivity_separation_t1.5", 0.5, sep, max(0.0, 0.49 - sep), 0.0,
                      sep >= 0.49)]


def check_continuity(seed: int = 0):
    rows = []
    for name, (mu, _) in reference_specs(2).items():
        vals, limit = continuity_probe(mu, geo.unit_cube(2), 1.0, range(1, 13))
        d = np.diff(vals)
        mono = min(np.sum(np.maximum(d, 0)), np.sum(np.maximum(-d, 0)))
        gap = abs(vals[-1] - limit)
        rows.append(_row(f"c9.continuity_gap_j12.{name}", limit, vals[-1], gap, 1e-3))
        rows.append(_row(f"c9.continuity_monotone.{name}", 0.0, mono, mono, 0.0))
    return rows


def run_suite(seed: int = 0, samples: int = 10 ** 6, tol: float = EXACT_TOL, workers: int = 1):
    rows = []
    rows += check_intrinsic_volumes(seed, samples, workers)
    rows += check_axioms(seed, tol=tol)
    rows += check_indicator_closed_form(seed)
    rows += check_distributional(seed, tol=tol)
    rows += check_decomposition(seed, tol=tol)
    rows += check_recovery(seed, tol=tol)
    rows += check_cone_convergence(seed)
    rows += check_klain(seed, tol=tol)
    rows += check_continuity(seed)
    return rows


def format_report(rows) -> str:
    buf = io.StringIO()
    buf.write("name,expected,actual,residual,tol,pass\n")
    for r in rows:
        buf.write(r.line() + "\n")
    n_pass = sum(r.passed for r in rows)
    buf.write(f"# {n_pass}/{len(rows)} checks passed\n")
    return buf.getvalue()
