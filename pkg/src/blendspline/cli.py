"""Command line interface.

Exit codes: 0 success, 1 invalid input, 2 cut-locus (well-posedness)
failure, 3 failed check.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import blend
from .errors import InvalidInputError, WellPosednessError
from .manifold import ManifoldKind, make_manifold
from .serialize import (
    format_real,
    load_model,
    parse_lambda,
    read_data_csv,
    save_model,
    write_curve_csv,
    write_data_csv,
)
from .spline1d import KnotGrid, eval_spline, solve_smoothing_spline
from .testdata import noisy_samples

EXIT_OK, EXIT_INPUT, EXIT_WELLPOSED, EXIT_CHECK = 0, 1, 2, 3

CLOSURE_SAMPLES = 1000
POSITION_TOL = 1e-12
VELOCITY_TOL = 1e-3
EQUIVALENCE_TOL = 1e-9
CLOSURE_TOL = {ManifoldKind.SPHERE2: 1e-12, ManifoldKind.SO3: 1e-10}


class _Parser(argparse.ArgumentParser):
    # usage errors are invalid input (exit 1); 2 is reserved for cut-locus failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _manifold_from_args(args):
    kind = ManifoldKind(args.manifold)
    if kind is ManifoldKind.EUCLIDEAN:
        if args.dim is None:
            raise InvalidInputError("--dim is required for the euclidean manifold")
        return make_manifold(kind, args.dim)
    M = make_manifold(kind)
    if args.dim is not None and args.dim != M.ambient_dim:
        raise InvalidInputError(f"--dim {args.dim} does not match {kind.value} (ambient dimension {M.ambient_dim})")
    return M


def cmd_fit(args) -> int:
    M = _manifold_from_args(args)
    lam = parse_lambda(args.lam)
    times, points = read_data_csv(args.input, M)
    problem = blend.FitProblem(M, KnotGrid(times), tuple(points), args.intervals, lam)
    start = time.perf_counter()
    spline = blend.fit(problem)
    elapsed = time.perf_counter() - start
    save_model(spline, args.output)
    print(f"m = {len(points) - 1}")
    print(f"n = {spline.n}")
    print(f"lambda = {format_real(lam)}")
    print(f"fit_time_s = {elapsed:.6f}")
    print(f"misfit = {blend.misfit(spline, points):.6e}")
    return EXIT_OK


def _sample_times(spline, num):
    if num < 2:
        raise InvalidInputError("--num must be at least 2")
    return np.linspace(0.0, float(spline.n), num)


def cmd_sample(args) -> int:
    spline = load_model(args.model)
    ts = _sample_times(spline, args.num)
    rows = [np.concatenate([[t], blend.evaluate(spline, t).coords]) for t in ts]
    header = ["t"] + [f"c{j}" for j in range(spline.manifold.ambient_dim)]
    write_curve_csv(args.output, header, rows)
    return EXIT_OK


def cmd_speed(args) -> int:
    spline = load_model(args.model)
    if not args.h > 0.0:
        raise InvalidInputError("--h must be positive")
    ts = _sample_times(spline, args.num)
    rows = [(t, blend.speed(spline, t, args.h)) for t in ts]
    write_curve_csv(args.output, ["t", "speed"], rows)
    return EXIT_OK


def run_checks(spline, data=None):
    """Return ``[(name, passed, detail)]`` for a loaded model."""
    M = spline.manifold
    results = []
    ts = np.linspace(0.0, float(spline.n), CLOSURE_SAMPLES)
    samples = [blend.evaluate(spline, t) for t in ts]
    if M.kind is ManifoldKind.EUCLIDEAN:
        worst, ok = 0.0, all(np.all(np.isfinite(p.coords)) for p in samples)
    else:
        worst = max(M.membership_error(p.coords) for p in samples)
        ok = worst <= CLOSURE_TOL[M.kind]
    results.append(("closure", ok, f"max violation {worst:.3e} over {CLOSURE_SAMPLES} samples"))

    report = blend.junction_report(spline)
    pos = max((j.position_gap for j in report), default=0.0)
    results.append(("junction-position", pos <= POSITION_TOL, f"max gap {pos:.3e}"))
    bad = [j for j in report if j.velocity_gap > VELOCITY_TOL * max(1.0, j.speed)]
    vel = max((j.velocity_gap for j in report), default=0.0)
    results.append(("junction-velocity", not bad, f"max gap {vel:.3e}, {len(bad)} junction(s) over tolerance"))

    if data is not None:
        times, points = data
        if M.kind is ManifoldKind.EUCLIDEAN:
            coords = np.array([p.coords for p in points])
            s = solve_smoothing_spline(times, coords, spline.lam, domain=(0.0, float(spline.n)))
            err = max(float(np.max(np.abs(eval_spline(s, t) - p.coords))) for t, p in zip(ts, samples))
            results.append(("euclidean-equivalence", err <= EQUIVALENCE_TOL, f"max deviation {err:.3e}"))
        else:
            mis = blend.misfit(spline, points)
            results.append(("data-misfit", True, f"sum of squared distances {mis:.6e} (informational)"))
    return results


def cmd_check(args) -> int:
    spline = load_model(args.model)
    data = read_data_csv(args.data, spline.manifold) if args.data else None
    if data is not None and not np.array_equal(data[0], spline.times):
        raise InvalidInputError("data times do not match the model's times")
    results = run_checks(spline, data)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_CHECK


def cmd_gen_testdata(args) -> int:
    if args.num < 2 or not args.tmax > 0.0 or not args.noise >= 0.0:
        raise InvalidInputError("need --num >= 2, --tmax > 0 and --noise >= 0")
    times, coords = noisy_samples(args.manifold, args.num, args.tmax, args.noise, args.seed)
    write_data_csv(args.output, times, coords)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="blendspline", description="Blended smoothing splines on manifolds.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("fit", help="fit a model to a data CSV")
    f.add_argument("--manifold", required=True, choices=[k.value for k in ManifoldKind])
    f.add_argument("--dim", type=_positive_int)
    f.add_argument("--lambda", dest="lam", required=True, help="positive number or 'inf'")
    f.add_argument("--intervals", type=_positive_int, required=True)
    f.add_argument("--input", required=True)
    f.add_argument("--output", required=True)
    f.set_defaults(func=cmd_fit)

    s = sub.add_parser("sample", help="sample a fitted curve to CSV")
    s.add_argument("--model", required=True)
    s.add_argument("--num", type=_positive_int, default=200)
    s.add_argument("--output", required=True)
    s.set_defaults(func=cmd_sample)

    v = sub.add_parser("speed", help="write the speed profile to CSV")
    v.add_argument("--model", required=True)
    v.add_argument("--num", type=_positive_int, default=200)
    v.add_argument("--h", type=float, default=1e-5)
    v.add_argument("--output", required=True)
    v.set_defaults(func=cmd_speed)

    c = sub.add_parser("check", help="verify closure, C1 junctions and Euclidean equivalence")
    c.add_argument("--model", required=True)
    c.add_argument("--data")
    c.set_defaults(func=cmd_check)

    g = sub.add_parser("gen-testdata", help="write a noisy synthetic dataset")
    g.add_argument("--manifold", choices=["sphere2", "so3"], default="sphere2")
    g.add_argument("--num", type=_positive_int, default=100)
    g.add_argument("--tmax", type=float, default=4.0)
    g.add_argument("--noise", type=float, default=0.05)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", required=True)
    g.set_defaults(func=cmd_gen_testdata)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    try:
        return args.func(args)
    except WellPosednessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_WELLPOSED
    except (InvalidInputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
