"""Command-line entry point: ``weakkam <command> MODEL.json [options]``.

Exit status: 0 on success, 2 on invalid input, 3 when a hypothesis fails
(nondegeneracy or non-convergence).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import classical, experiments, limit, mather
from .classical import TOL_FP
from .discounted import solve_discounted
from .implicit import ConvergenceError
from .model import AssumptionError, ModelError, check_assumptions, load_model, normalize_critical

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_HYPOTHESIS = 3

COMMANDS = ("critical", "barrier", "mather", "check", "solve", "limit", "sweep", "uniqueness")


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _write_json(path, data):
    path.write_text(json.dumps(data, indent=2) + "\n")


def _write_potential(path, labels, columns):
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["state", *columns])
        for i, label in enumerate(labels):
            writer.writerow([label, *(_fmt(col[i]) for col in columns.values())])


def _measure_json(mu, labels):
    return {"description": mu.describe(labels), "weights": mu.weights.tolist()}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="weakkam", description="Discrete weak KAM and vanishing-discount computations.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("model", help="model JSON file")
    parser.add_argument("--lambda", dest="lam", type=float, help="discount parameter")
    parser.add_argument("--grid-start", type=float, default=0.5,
                        help="first grid point as a fraction of lambda_max")
    parser.add_argument("--grid-ratio", type=float, default=0.5)
    parser.add_argument("--grid-steps", type=int, default=20)
    parser.add_argument("--tol", type=float, default=TOL_FP, help="fixed-point tolerance")
    parser.add_argument("--out", default=".", help="output directory")
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    if args.command in ("solve", "uniqueness") and args.lam is None:
        print(f"error: --lambda is required for {args.command}", file=stderr)
        return EXIT_INVALID

    try:
        model = load_model(args.model)
    except OSError as exc:
        print(f"error: cannot read {args.model}: {exc}", file=stderr)
        return EXIT_INVALID
    except ModelError as exc:
        print(f"error: {args.model}: {exc}", file=stderr)
        return EXIT_INVALID

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        return _dispatch(args, model, out, stdout, stderr)
    except ValueError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID
    except (AssumptionError, ConvergenceError) as exc:
        print(f"hypothesis failure: {exc}", file=stderr)
        return EXIT_HYPOTHESIS


def _dispatch(args, model, out, stdout, stderr) -> int:
    labels = model.space.labels
    c0 = classical.critical_constant(model.l0)
    nm = normalize_critical(model, c0)

    if args.command == "critical":
        _write_json(out / "c0.json", {"c0": c0})
        print(f"c0 = {_fmt(c0)}", file=stdout)
        return EXIT_OK

    if args.command == "barrier":
        bt = classical.peierls_barrier(model.l0, c0)
        with (out / "h.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["from", *labels])
            for i, label in enumerate(labels):
                writer.writerow([label, *(_fmt(v) for v in bt.h[i])])
        _write_json(out / "aubry.json",
                    {"c0": c0, "aubry": [labels[a] for a in bt.aubry]})
        print(f"c0 = {_fmt(c0)}", file=stdout)
        print("Aubry set: " + ", ".join(labels[a] for a in bt.aubry), file=stdout)
        for i, label in enumerate(labels):
            print(f"h({label}, .) = " + " ".join(f"{v:.6g}" for v in bt.h[i]), file=stdout)
        return EXIT_OK

    if args.command == "mather":
        poly = mather.mather_vertices(model.l0)
        _write_json(out / "vertices.json",
                    {"vertices": [_measure_json(mu, labels) for mu in poly.vertices]})
        _write_json(out / "value.json", {"value": poly.value, "c0": c0})
        print(f"min integral of l0 = {_fmt(poly.value)}", file=stdout)
        for mu in poly.vertices:
            print("  " + mu.describe(labels), file=stdout)
        return EXIT_OK

    if args.command == "check":
        poly = mather.mather_vertices(nm.l0)
        report = check_assumptions(nm, poly.vertices)
        _write_json(out / "assumptions.json", {
            "c0": c0,
            "kappa_u": report.kappa_u,
            "kappa_v": report.kappa_v,
            "lambda_max": nm.lambda_max,
            "l2_ok": report.l2_ok,
            "l4_ok": report.l4_ok,
            "l4_values": list(report.l4_values),
            "vertices": [mu.describe(labels) for mu in poly.vertices],
            "messages": list(report.messages),
        })
        for mu, val in zip(poly.vertices, report.l4_values):
            print(f"{mu.describe(labels):30s} {val: .6g}", file=stdout)
        if not report.ok:
            for msg in report.messages:
                print(msg, file=stderr)
            return EXIT_HYPOTHESIS
        print("all hypotheses hold", file=stdout)
        return EXIT_OK

    if args.command == "solve":
        sol = solve_discounted(nm, args.lam, tol=args.tol)
        _write_potential(out / "u_lambda.csv", labels, {
            "u_lambda": sol.u, "residual": np.full(nm.n, sol.residual)})
        print(f"c0 = {_fmt(c0)}  lambda = {_fmt(args.lam)}", file=stdout)
        print(f"residual = {sol.residual:.3g}  iterations = {sol.iterations}", file=stdout)
        for label, val in zip(labels, sol.u):
            print(f"  {label}: {_fmt(val)}", file=stdout)
        if not sol.unique_in_sandwich:
            print("warning: iterations from below and above reached different fixed points",
                  file=stderr)
        return EXIT_OK

    if args.command == "limit":
        res = limit.vanishing_limit(model)
        _write_potential(out / "u0.csv", labels, {
            "u0": res.u0, "u0_sup": res.u_sup, "u0_mather": res.u_mather,
            "gap": np.full(nm.n, res.gap)})
        print(f"c0 = {_fmt(c0)}  formula gap = {res.gap:.3g}", file=stdout)
        for label, val in zip(labels, res.u0):
            print(f"  {label}: {_fmt(val)}", file=stdout)
        return EXIT_OK

    if args.command == "sweep":
        grid = experiments.default_grid(nm, args.grid_start, args.grid_ratio, args.grid_steps)
        report = experiments.vanishing_discount_sweep(model, grid)
        csv_path = experiments.write_sweep_csv(report, out / "sweep.csv")
        experiments.write_gnuplot_script(csv_path, out / "sweep.gp")
        print(f"{'lambda':>24s} {'sup_error':>24s} {'residual':>10s} {'iters':>6s}", file=stdout)
        for row in zip(report.lambdas, report.sup_errors, report.residuals, report.iterations):
            print(f"{row[0]:24.17g} {row[1]:24.17g} {row[2]:10.3g} {row[3]:6d}", file=stdout)
        print(f"converged: {report.converged}", file=stdout)
        return EXIT_OK if report.converged else EXIT_HYPOTHESIS

    if args.command == "uniqueness":
        rep = experiments.uniqueness_probe(model, args.lam, tol=args.tol)
        _write_json(out / "uniqueness.json", {
            "lambda": rep.lam,
            "starts": list(rep.starts),
            "fixed_points": [p.tolist() for p in rep.fixed_points],
            "residuals": list(rep.residuals),
            "max_pairwise_gap": rep.max_pairwise_gap,
            "unique": rep.unique,
            "failures": list(rep.failures),
        })
        print(f"max pairwise gap = {rep.max_pairwise_gap:.3g}  unique = {rep.unique}",
              file=stdout)
        for msg in rep.failures:
            print(msg, file=stderr)
        return EXIT_HYPOTHESIS if rep.failures else EXIT_OK

    raise AssertionError(args.command)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
