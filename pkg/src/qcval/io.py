"""JSON readers for bodies, functions, densities and valuation specs.

Errors carry a JSON path so the CLI can report exactly where input broke.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from scipy.interpolate import PPoly

from .geometry import Box, EmbeddedBody, Frame, Zonotope, bodies_equal, contains_body
from .measures import DiscreteMeasure, Hinge, PiecewiseLinear, Poly, Spline, Zero
from .qcf import SimpleQCF, cone_oracle, make_simple
from .valuations import (DensitySpec, MonotoneSpec, ValuationOracle, integral_valuation,
                         max_type_valuation, monotone_valuation)


class InputError(ValueError):
    def __init__(self, code: str, path: str, detail: str):
        super().__init__(f"{code} at {path}: {detail}")
        self.code, self.path, self.detail = code, path, detail

    def to_json(self) -> dict:
        return {"error": self.code, "path": self.path, "detail": self.detail}


def load_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError("io", "$", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError("json", "$", f"{path}: {exc.msg} (line {exc.lineno})") from None


def _field(obj, key, path):
    if not isinstance(obj, dict):
        raise InputError("schema", path, "expected an object")
    if key not in obj:
        raise InputError("schema", f"{path}.{key}", "missing field")
    return obj[key]


def _numbers(value, path, ndim=1):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise InputError("schema", path, "expected numbers") from None
    if ndim == 2 and arr.size == 0:
        return arr
    if arr.ndim != ndim:
        raise InputError("schema", path, f"expected a {ndim}-d array of numbers")
    if not np.all(np.isfinite(arr)):
        raise InputError("schema", path, "non-finite number")
    return arr


def parse_body(obj, path: str = "$"):
    kind = _field(obj, "type", path)
    if kind == "box":
        lo = _numbers(_field(obj, "lo", path), f"{path}.lo")
        hi = _numbers(_field(obj, "hi", path), f"{path}.hi")
        if lo.shape != hi.shape:
            raise InputError("schema", path, "lo and hi differ in length")
        bad = np.nonzero(lo > hi)[0]
        if bad.size:
            i = int(bad[0])
            raise InputError("invariant", f"{path}.lo[{i}]", f"box has lo > hi on axis {i}")
        return Box(lo, hi)
    if kind == "zonotope":
        base = _numbers(_field(obj, "base", path), f"{path}.base")
        gens = _numbers(_field(obj, "generators", path), f"{path}.generators", ndim=2)
        if gens.size and gens.shape[1] != base.size:
            raise InputError("schema", f"{path}.generators", "generator dimension differs from base")
        return Zonotope(base, gens.reshape(-1, base.size))
    if kind == "embedded":
        frame = _numbers(_field(obj, "frame", path), f"{path}.frame", ndim=2)
        offset = _numbers(_field(obj, "offset", path), f"{path}.offset")
        inner = parse_body(_field(obj, "body", path), f"{path}.body")
        try:
            fr = Frame(frame)
        except ValueError as exc:
            raise InputError("invariant", f"{path}.frame", str(exc)) from None
        if fr.ambient_dim != offset.size:
            raise InputError("schema", f"{path}.offset", "offset dimension differs from frame")
        if inner.dim != fr.k:
            raise InputError("schema", f"{path}.body", "body dimension differs from frame size")
        return EmbeddedBody(fr, offset, inner)
    raise InputError("schema", f"{path}.type", f"unknown body type {kind!r}")


def parse_function(obj, path: str = "$") -> SimpleQCF:
    """``{"levels": [{"t": ..., "body": {...}}, ...]}``; the zero function needs ``"dim"``."""
    levels = _field(obj, "levels", path)
    if not isinstance(levels, list):
        raise InputError("schema", f"{path}.levels", "expected a list")
    parsed = []
    for i, lvl in enumerate(levels):
        p = f"{path}.levels[{i}]"
        t = _field(lvl, "t", p)
        try:
            t = float(t)
        except (TypeError, ValueError):
            raise InputError("schema", f"{p}.t", "threshold must be a number") from None
        if not t > 0:
            raise InputError("invariant", f"{p}.t", "threshold must be positive")
        parsed.append((i, t, parse_body(_field(lvl, "body", p), f"{p}.body")))
    if not parsed:
        if "dim" not in obj:
            raise InputError("schema", f"{path}.dim", "zero function needs a dimension")
        return make_simple([], dim=int(obj["dim"]))
    if len({b.dim for _, _, b in parsed}) != 1:
        raise InputError("invariant", f"{path}.levels", "bodies differ in dimension")
    parsed.sort(key=lambda r: r[1])
    for (i, s, a), (j, t, b) in zip(parsed, parsed[1:]):
        if s == t and not bodies_equal(a, b):
            lo, hi = sorted((i, j))
            raise InputError("invariant", f"{path}.levels[{hi}]",
                             f"levels {lo} and {hi} share threshold {t} with distinct bodies")
        if not contains_body(a, b):
            raise InputError("invariant", f"{path}.levels[{j}]",
                             f"level {j} (t={t}) is not contained in level {i} (t={s})")
    return make_simple([(t, b) for _, t, b in parsed])


def parse_density(obj, path: str = "$"):
    kind = _field(obj, "kind", path)
    try:
        if kind == "hinge":
            return Hinge(float(_field(obj, "a", path)), float(obj.get("scale", 1.0)))
        if kind == "poly":
            return Poly(tuple(_numbers(_field(obj, "coeffs", path), f"{path}.coeffs")))
        if kind == "zero":
            return Zero()
        if kind == "pwl":
            knots = _numbers(_field(obj, "knots", path), f"{path}.knots", ndim=2)
            return PiecewiseLinear(tuple(map(tuple, knots)))
        if kind == "ppoly":
            breaks = _numbers(_field(obj, "breaks", path), f"{path}.breaks")
            coeffs = _numbers(_field(obj, "coeffs", path), f"{path}.coeffs", ndim=2)
            return Spline(PPoly(coeffs, breaks))
    except InputError:
        raise
    except ValueError as exc:
        raise InputError("invariant", path, str(exc)) from None
    raise InputError("schema", f"{path}.kind", f"unknown density kind {kind!r}")


def parse_spec(obj, path: str = "$") -> ValuationOracle:
    """A density spec, a monotone spec or ``{"max_type": {...}, "dim": N}`` as an oracle."""
    if isinstance(obj, dict) and "phis" in obj:
        phis = obj["phis"]
        if not isinstance(phis, list):
            raise InputError("schema", f"{path}.phis", "expected a list")
        dens = tuple(parse_density(p, f"{path}.phis[{k}]") for k, p in enumerate(phis))
        try:
            return integral_valuation(DensitySpec(dens, float(_field(obj, "delta", path))))
        except ValueError as exc:
            raise InputError("invariant", path, str(exc)) from None
    if isinstance(obj, dict) and "nus" in obj:
        nus = []
        for k, atoms in enumerate(obj["nus"]):
            p = f"{path}.nus[{k}]"
            arr = _numbers(atoms, p, ndim=2)
            try:
                nus.append(DiscreteMeasure(tuple(map(tuple, arr.reshape(-1, 2)))))
            except ValueError as exc:
                raise InputError("invariant", p, str(exc)) from None
        try:
            return monotone_valuation(MonotoneSpec(tuple(nus), float(_field(obj, "delta", path))))
        except ValueError as exc:
            raise InputError("invariant", path, str(exc)) from None
    if isinstance(obj, dict) and "max_type" in obj:
        phi0 = parse_density(obj["max_type"], f"{path}.max_type")
        try:
            return max_type_valuation(phi0, int(_field(obj, "dim", path)))
        except ValueError as exc:
            raise InputError("invariant", path, str(exc)) from None
    raise InputError("schema", path, "expected a spec with 'phis', 'nus' or 'max_type'")


def parse_oracle(obj, path: str = "$"):
    """Built-in oracle families; currently ``{"cone": {"body": {...}}}``."""
    if isinstance(obj, dict) and "cone" in obj:
        return cone_oracle(parse_body(_field(obj["cone"], "body", f"{path}.cone"), f"{path}.cone.body"))
    raise InputError("schema", path, "unknown oracle family (expected 'cone')")
