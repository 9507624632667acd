"""Command-line front end: parse instance files, run pipelines, emit data.

Instance files are JSON:

    {
      "n": 1,
      "A": [[1], [-1]],
      "c": ["1/3"],                    // "p/q" strings, numbers, or [re, im]
      "z": [[0.5, 0.0], [0.5, 0.0]],   // complex entries as [re, im]
      "options": {"seed": 1, "lambda_ladder": [20, 40, 80]}
    }

Exit codes: 0 full success, 2 partial (hypothesis-skipped stages),
1 parse or runtime error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from .admissibility import as_parameter
from .errors import AhyperError
from .lattice import PointConfiguration
from .report import AnalysisOptions, analyze


def _parse_complex(entry):
    if isinstance(entry, (list, tuple)):
        if len(entry) != 2:
            raise ValueError(f"complex entries are [re, im], got {entry!r}")
        return complex(float(entry[0]), float(entry[1]))
    return complex(entry)


def load_instance(path):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        n = int(raw["n"])
        config = PointConfiguration(n, tuple(tuple(int(x) for x in p)
                                             for p in raw["A"]))
        c = as_parameter(raw["c"])
        z = [_parse_complex(v) for v in raw["z"]]
        opts = AnalysisOptions.from_dict(raw.get("options"))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{path}: invalid instance: {exc}") from exc
    if len(z) != config.size:
        raise ValueError(f"{path}: z has {len(z)} entries for {config.size} points")
    return config, c, z, opts


def _apply_flag_overrides(opts, args):
    if args.seed is not None:
        opts.seed = args.seed
    if args.tol_quad is not None:
        opts.tol_quad = args.tol_quad
    if args.tol_morse is not None:
        opts.tol_morse = args.tol_morse
    if args.lambda_ladder:
        opts.lambda_ladder = tuple(float(x) for x in args.lambda_ladder.split(","))
    if args.sector_delta is not None:
        opts.sector_delta = args.sector_delta
    if args.force:
        opts.force = True
    if args.threads is not None:
        opts.threads = args.threads
    elif os.environ.get("THREADS"):
        opts.threads = int(os.environ["THREADS"])
    return opts


def cmd_analyze(args):
    config, c, z, opts = load_instance(args.instance)
    opts = _apply_flag_overrides(opts, args)
    report = analyze(config, c, z, opts)
    text = report.to_json(indent=args.json_indent)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0 if report.status == "full" else 2


def _write_cycle_csv(path, h, cyc):
    from .laurent import theta_gradient

    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        n = h.n
        head = ["s"]
        for k in range(1, n + 1):
            head += [f"re_x{k}", f"im_x{k}", f"re_l{k}", f"im_l{k}"]
        head += ["re_h", "im_h"]
        w.writerow(head)
        total = len(cyc.samples) - 1
        for i, p in enumerate(cyc.samples):
            hv = theta_gradient(h, p)[0]
            row = [i / max(total, 1)]
            for x, l in zip(p.coordinates, p.log_branch):
                row += [x.real, x.imag, l.real, l.imag]
            row += [hv.real, hv.imag]
            w.writerow(row)


def _write_thimble_csv(path, h, thimble):
    from .laurent import TorusPoint, theta_gradient

    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        n = h.n
        head = ["bundle", "s"]
        for k in range(1, n + 1):
            head += [f"re_x{k}", f"im_x{k}", f"re_l{k}", f"im_l{k}"]
        head += ["re_h", "im_h"]
        w.writerow(head)

        def rows(tag, us, taus):
            for tau, u in zip(taus, us):
                p = TorusPoint.from_logs(u)
                hv = theta_gradient(h, p)[0]
                row = [tag, tau]
                for x, l in zip(p.coordinates, p.log_branch):
                    row += [x.real, x.imag, l.real, l.imag]
                row += [hv.real, hv.imag]
                w.writerow(row)

        if thimble.loops is not None:
            for lv, (tau, loop) in enumerate(zip(thimble.loops.taus,
                                                 thimble.loops.loops)):
                rows(f"level{lv}", list(loop), [tau] * len(loop))
        else:
            for ray in thimble.rays:
                rows(f"ray{ray.psi:.3f}", list(ray.us), list(thimble.grid.taus))


def cmd_cycles(args):
    from .critical import solve_critical
    from .lattice import build_delta, origin_interior
    from .laurent import from_config
    from .thimbles import cycle_basis_1d, sectors_1d, thimble_basis

    config, c, z, opts = load_instance(args.instance)
    opts = _apply_flag_overrides(opts, args)
    h = from_config(config, z)
    P = build_delta(config)
    outdir = args.outdir or "."
    os.makedirs(outdir, exist_ok=True)
    base = os.path.splitext(os.path.basename(args.instance))[0]
    wrote = []
    if origin_interior(P) and config.n <= 2:
        points = solve_critical(h, seed=opts.seed)
        basis = thimble_basis(h, c, points, sphere_count=opts.sphere_count)
        for i, t in enumerate(basis):
            path = os.path.join(outdir, f"{base}_thimble{i}.csv")
            _write_thimble_csv(path, h, t)
            wrote.append(path)
    elif config.n == 1:
        basis = cycle_basis_1d(h, c)
        for i, cyc in enumerate(basis):
            path = os.path.join(outdir, f"{base}_cycle{i}.csv")
            _write_cycle_csv(path, h, cyc)
            wrote.append(path)
        secpath = os.path.join(outdir, f"{base}_sectors.csv")
        with open(secpath, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["divisor", "index", "theta_lo", "theta_hi"])
            for divisor in ("at-zero", "at-infinity"):
                try:
                    for s in sectors_1d(h, divisor):
                        w.writerow([s.divisor, s.index, s.theta_lo, s.theta_hi])
                except AhyperError:
                    pass
        wrote.append(secpath)
    else:
        print("no cycle route for this instance", file=sys.stderr)
        return 2
    for p in wrote:
        print(p)
    return 0


def cmd_stokes(args):
    from .asymptotics import dominance_order, stokes_lines
    from .critical import solve_critical
    from .errors import SolveIncomplete
    from .laurent import from_config

    config, c, z, opts = load_instance(args.instance)
    opts = _apply_flag_overrides(opts, args)
    h = from_config(config, z)
    try:
        points = solve_critical(h, seed=opts.seed)
    except SolveIncomplete as exc:
        points = exc.points
    lines, skipped = stokes_lines(points)
    out = args.out or "stokes.csv"
    with open(out, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["pair_i", "pair_j", "angle_1", "angle_2"])
        for l in lines:
            w.writerow([l.pair[0], l.pair[1], l.angles[0], l.angles[1]])
    sweep = args.sweep or "dominance_sweep.csv"
    with open(sweep, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["arg_lambda"] + [f"rank{i}" for i in range(len(points))]
                   + ["tied"])
        for k in range(360):
            theta = 2 * math.pi * k / 360
            order, ties = dominance_order(points, complex(math.cos(theta),
                                                          math.sin(theta)))
            w.writerow([theta] + order + [1 if ties else 0])
    print(out)
    print(sweep)
    return 0


def build_parser():
    ap = argparse.ArgumentParser(prog="ahyper",
                                 description="confluent A-hypergeometric toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("instance", help="instance JSON file")
        p.add_argument("--out", default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--tol-quad", type=float, default=None)
        p.add_argument("--tol-morse", type=float, default=None)
        p.add_argument("--lambda-ladder", default=None, metavar='"20,40,80"')
        p.add_argument("--sector-delta", type=float, default=None)
        p.add_argument("--force", action="store_true")
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--json-indent", type=int, default=2)

    pa = sub.add_parser("analyze", help="full pipeline, JSON report")
    common(pa)
    pa.set_defaults(func=cmd_analyze)

    pc = sub.add_parser("cycles", help="export cycle/thimble polylines as CSV")
    common(pc)
    pc.add_argument("--outdir", default=None)
    pc.set_defaults(func=cmd_cycles)

    ps = sub.add_parser("stokes", help="Stokes angles and dominance sweep")
    common(ps)
    ps.add_argument("--sweep", default=None)
    ps.set_defaults(func=cmd_stokes)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except AhyperError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
