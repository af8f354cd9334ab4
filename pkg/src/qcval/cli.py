"""Command-line front end.

Exit codes: 0 success (all checks pass), 1 check failures, 2 input errors.
Every flag default can be overridden by an environment variable ``QCVAL_<FLAG>``.
"""
from __future__ import annotations

import argparse
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import geometry as geo
from .analysis import grassmannian_frames, klain_eval, verify_decomposition
from .checks import EXACT_TOL, RADII, format_report, run_suite
from .io import InputError, load_json, parse_body, parse_function, parse_oracle, parse_spec
from .measures import level_measure
from .qcf import dyadic_approx

COMMANDS = ("volumes", "eval", "measure", "decompose", "klain", "approx", "check")


def _env(name, default, cast=str):
    raw = os.environ.get(f"QCVAL_{name.upper()}")
    return default if raw is None else cast(raw)


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qcval", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", default=_env("input", None), help="body, function or oracle JSON")
    p.add_argument("--spec", default=_env("spec", None), help="valuation spec JSON")
    p.add_argument("--k", type=int, default=_env("k", None, int), help="degree / frame size")
    p.add_argument("--seed", type=int, default=_env("seed", 0, int))
    p.add_argument("--tol", type=float, default=_env("tol", EXACT_TOL, float))
    p.add_argument("--samples", type=int, default=_env("samples", 10 ** 6, int))
    p.add_argument("--out", default=_env("out", None), help="output file (default stdout)")
    p.add_argument("--mc", action="store_true", help="volumes: add Monte-Carlo estimates")
    p.add_argument("--lambdas", type=_floats, default=_env("lambdas", [0.5, 3.0, 7.25], _floats))
    p.add_argument("--grid", type=_floats, default=_env("grid", [0.25, 0.5, 1.0, 1.5, 2.0, 3.0], _floats))
    p.add_argument("--random-frames", type=int, default=_env("random_frames", 3, int))
    p.add_argument("--depth", type=int, default=_env("depth", 8, int))
    p.add_argument("--workers", type=int, default=_env("workers", 1, int))
    return p


def _need(args, name):
    value = getattr(args, name)
    if value is None:
        raise InputError("usage", "$", f"--{name} is required for {args.command}")
    return value


def _g(x: float) -> str:
    return f"{x:.17g}"


def cmd_volumes(args, out):
    body = parse_body(load_json(_need(args, "input")))
    exact = geo.intrinsic_volumes(body)
    if not args.mc:
        out.write("k,V\n")
        for k, v in enumerate(exact):
            out.write(f"{k},{_g(v)}\n")
        return 0
    est = geo.steiner_mc_volumes(body, RADII, args.samples, args.seed, args.workers)
    out.write("k,V,mc_estimate,mc_stderr\n")
    for k, v in enumerate(exact):
        out.write(f"{k},{_g(v)},{_g(est.values[k])},{_g(est.stderr[k])}\n")
    return 0


def cmd_eval(args, out):
    mu = parse_spec(load_json(_need(args, "spec")))
    f = parse_function(load_json(_need(args, "input")))
    if f.dim != mu.dim:
        raise InputError("invariant", "$", "function and spec dimensions differ")
    out.write(_g(mu(f)) + "\n")
    return 0


def cmd_measure(args, out):
    f = parse_function(load_json(_need(args, "input")))
    k = _need(args, "k")
    if not 0 <= k <= f.dim:
        raise InputError("usage", "$", f"--k must lie in 0..{f.dim}")
    out.write(level_measure(f, k).to_csv())
    return 0


def cmd_decompose(args, out):
    mu = parse_spec(load_json(_need(args, "spec")))
    f = parse_function(load_json(_need(args, "input")))
    if f.dim != mu.dim:
        raise InputError("invariant", "$", "function and spec dimensions differ")
    rep = verify_decomposition(mu, f, args.lambdas)
    out.write("k,value,residual_sum," + ",".join(f"residual_homog_{lam:g}" for lam in args.lambdas) + "\n")
    for k, v in enumerate(rep.components):
        homog = ",".join(_g(rep.residual_homog[(k, float(lam))]) for lam in args.lambdas)
        out.write(f"{k},{_g(v)},{_g(rep.residual_sum)},{homog}\n")
    return 0


def cmd_klain(args, out):
    mu = parse_spec(load_json(_need(args, "spec")))
    k = args.k if args.k is not None else mu.degree
    if k is None or not 1 <= k <= mu.dim:
        raise InputError("usage", "$", "--k (frame size) is required unless the spec has one degree")
    frames = grassmannian_frames(mu.dim, k, args.random_frames, args.seed)
    out.write("t,frame_id,value\n")
    for t in args.grid:
        for i, fr in enumerate(frames):
            out.write(f"{_g(t)},{i},{_g(klain_eval(mu, t, fr).value)}\n")
    sidecar = Path(args.out + ".frames.json" if args.out else "klain.frames.json")
    sidecar.write_text(json.dumps({"frames": [fr.to_json() for fr in frames], "seed": args.seed},
                                  indent=1) + "\n")
    return 0


def cmd_approx(args, out):
    mu = parse_spec(load_json(_need(args, "spec")))
    oracle = parse_oracle(load_json(_need(args, "input")))
    out.write("depth,value\n")
    for i in range(1, args.depth + 1):
        out.write(f"{i},{_g(mu(dyadic_approx(oracle, i)))}\n")
    return 0


def cmd_check(args, out):
    rows = run_suite(args.seed, args.samples, args.tol, args.workers)
    out.write(format_report(rows))
    return 0 if all(r.passed for r in rows) else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    buf = io.StringIO()
    handler = globals()[f"cmd_{args.command}"]
    try:
        code = handler(args, buf)
    except InputError as exc:
        sys.stderr.write(json.dumps(exc.to_json()) + "\n")
        return 2
    except (ValueError, TypeError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(json.dumps({"error": "invalid", "path": "$", "detail": str(exc)}) + "\n")
        return 2
    # single writer after computation completes
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
