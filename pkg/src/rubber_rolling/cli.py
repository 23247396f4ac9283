"""Command-line front end.

Exit codes: 0 success, 1 check failure, 2 configuration error, 3 integration failure.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import reduction
from .config import ConfigError, parse_config, with_overrides
from .dynamics import write_table
from .frames import frame_invariants, reconstruct_spherical_curve
from .runner import parse_grid, run, sweep, write_sweep_csv
from .so3 import IntegrationError
from .verification import HOLONOMY_THETAS, SCOPES, verify

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_INTEGRATION = 0, 1, 2, 3
HOLONOMY_TOLERANCE = 1e-6


def _load(args):
    if not args.config:
        raise ConfigError("--config", "a configuration file is required")
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("--config", str(exc)) from None
    cfg = parse_config(text)
    if args.seed is not None:
        cfg = with_overrides(cfg, {"seed": args.seed})
    return cfg


def cmd_run(args) -> int:
    cfg = _load(args)
    res = run(cfg)
    out = args.out or cfg.output
    if out:
        res.write_csv(out)
    for line in res.summary_lines():
        print(line)
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = 42 if args.seed is None else args.seed
    report = verify(args.scope, seed=seed, jobs=args.jobs)
    text = report.text()
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    return EXIT_OK if report.passed else EXIT_CHECK


def cmd_sweep(args) -> int:
    cfg = _load(args)
    grid = parse_grid(args.grid or [])
    run_dir = None
    if args.out and args.runs:
        run_dir = args.out.rsplit(".", 1)[0] + "_runs"
    rows = sweep(cfg, grid, jobs=args.jobs, out_dir=run_dir)
    if args.out:
        write_sweep_csv(args.out, rows)
    for row in rows:
        print(", ".join(f"{k}={v}" for k, v in row.items()))
    return EXIT_OK


def cmd_holonomy(args) -> int:
    a, b = args.a, args.b
    if args.config:
        cfg = _load(args)
        a, b = cfg.scene.a, cfg.scene.b
    if math.isinf(a):
        raise ConfigError("scene.a", "holonomy needs a finite fixed sphere")
    thetas = args.theta or list(HOLONOMY_THETAS)
    rows, ok = [], True
    for theta in thetas:
        if not 0 < theta < 0.5 * math.pi:
            raise ConfigError("--theta", "must lie in (0, pi/2)")
        exact = reduction.holonomy_circle(theta, a, b).holonomy
        numeric = reduction.holonomy_loop(theta, a, b).holonomy
        err = abs(numeric - exact)
        ok &= err <= HOLONOMY_TOLERANCE
        rows.append([theta, exact, numeric, err])
        print(f"theta = {theta:.17g}  closed = {exact:.17g}  loop = {numeric:.17g}  residual = {err:.3e}")
    if args.out:
        write_table(args.out, ["theta", "closed_form", "loop", "residual"], np.array(rows))
    return EXIT_OK if ok else EXIT_CHECK


def cmd_reconstruct(args) -> int:
    coeffs = [float(c) for c in args.kappa_g.split(",")]
    if args.radius <= 0:
        raise ConfigError("--radius", "must be positive")
    if args.length <= 0:
        raise ConfigError("--length", "must be positive")
    curve = reconstruct_spherical_curve(
        lambda s: float(np.polyval(coeffs[::-1], s)), args.radius, args.length,
        (0.0, 0.0, 1.0), (1.0, 0.0, 0.0), ds=args.ds,
    )
    if args.out:
        curve.to_csv(args.out)
    h = 2 * curve.fd_step()
    s = np.linspace(curve.s[0] + 2 * h, curve.s[-1] - 2 * h, 50)
    err = max(abs(frame_invariants(curve, si).kappa_g - np.polyval(coeffs[::-1], si)) for si in s)
    print(f"points = {len(curve.s)}")
    print(f"kappa_g_residual = {err:.17g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rubber-rolling", description="Rubber rolling of a ball over a sphere.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", metavar="PATH")
        sp.add_argument("--seed", type=int, metavar="N")
        sp.add_argument("--out", metavar="PATH")

    sp = sub.add_parser("run", help="integrate one configured model")
    common(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("verify", help="run the invariant check suite")
    common(sp, config=False)
    sp.add_argument("--scope", default="all", choices=("all",) + SCOPES)
    sp.add_argument("--jobs", type=int, default=1)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("sweep", help="one run per grid point plus an aggregate table")
    common(sp)
    sp.add_argument("--grid", action="append", metavar="KEY=V1;V2",
                    help="grid axis; scene.ratio (b/a) and scene.kappa are also accepted")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--runs", action="store_true", help="also write each point's trajectory")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("holonomy", help="loop holonomy against the closed form")
    common(sp)
    sp.add_argument("--a", type=float, default=1.0)
    sp.add_argument("--b", type=float, default=0.5)
    sp.add_argument("--theta", type=float, action="append")
    sp.set_defaults(func=cmd_holonomy)

    sp = sub.add_parser("reconstruct", help="spherical curve from a polynomial geodesic curvature")
    common(sp, config=False)
    sp.add_argument("--kappa-g", default="0.5", help="polynomial coefficients c0,c1,... in s")
    sp.add_argument("--radius", type=float, default=1.0)
    sp.add_argument("--length", type=float, default=2.0)
    sp.add_argument("--ds", type=float, default=1e-3)
    sp.set_defaults(func=cmd_reconstruct)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IntegrationError as exc:
        print(f"integration failure at t = {exc.t:.17g}: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION


if __name__ == "__main__":
    sys.exit(main())
