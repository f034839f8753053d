"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 domain or usage error,
3 geodesic escaped before ``--t-end``, 4 almost-Zoll pattern violated,
5 output path not writable.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, fields, replace
from typing import Optional, Sequence

import numpy as np

from .core import GeometryError, alpha_invariant, christoffel_at, nabla_ricci_at, ricci_at
from .geodesics import TangentState, Trajectory, closed_form_geodesic, geodesic_domain, integrate_geodesic
from .quotients import almost_zoll_sweep, make_quotient
from .surfaces import Kind, parse_surface_id

TOL_ENV = "AFFINEZOLL_TOL"

EXIT_OK, EXIT_VERIFY, EXIT_DOMAIN, EXIT_ESCAPED, EXIT_PATTERN, EXIT_WRITE = 0, 1, 2, 3, 4, 5

INTEGRATORS = {"dop853": "DOP853", "rk45": "RK45", "rk4": "rk4"}


@dataclass(frozen=True)
class RunConfig:
    surface: str = "Mc:0"
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    integrator: str = "dop853"
    seed: int = 0

    def validate(self) -> "RunConfig":
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"unknown integrator {self.integrator!r}; choose from {sorted(INTEGRATORS)}")
        parse_surface_id(self.surface)
        return self


def read_config_file(path: str) -> dict:
    """``key=value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{n}: expected key=value")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def build_config(args: argparse.Namespace, environ=os.environ) -> RunConfig:
    cfg = RunConfig()
    types = {f.name: f.type for f in fields(RunConfig)}
    casts = {"str": str, "float": float, "int": int}
    if environ.get(TOL_ENV):
        cfg = replace(cfg, abs_tol=float(environ[TOL_ENV]))
    if getattr(args, "config", None):
        for key, value in read_config_file(args.config).items():
            if key not in types:
                raise ValueError(f"unknown config key {key!r}")
            cfg = replace(cfg, **{key: casts[types[key]](value)})
    for key in types:
        value = getattr(args, key, None)
        if value is not None:
            cfg = replace(cfg, **{key: value})
    return cfg.validate()


def parse_pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected x,y but got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two numbers, got {text!r}") from None


def _g12(v: float) -> str:
    return f"{float(v) + 0.0:.12g}"


def format_tensor(a) -> str:
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        return _g12(a)
    return "[" + ",".join(format_tensor(x) for x in a) + "]"


def cmd_tensor(cfg: RunConfig, args, out) -> int:
    surface = parse_surface_id(cfg.surface)
    p = args.at
    if args.what == "christoffel":
        value = christoffel_at(surface.conn, p)
    elif args.what == "ricci":
        value = ricci_at(surface.conn, p)[0]
    elif args.what == "nabla-ricci":
        value = nabla_ricci_at(surface.conn, p)
    else:
        value = alpha_invariant(surface.conn, p)
    out.append(format_tensor(value))
    return EXIT_OK


def cmd_geodesic(cfg: RunConfig, args, out) -> int:
    surface = parse_surface_id(cfg.surface)
    s = TangentState.of(args.from_, args.dir)
    t_end = args.t_end
    mode = args.mode
    if mode in ("closed-form", "both") and surface.kind is not Kind.Mc:
        raise ValueError("closed-form geodesics are available for Mc surfaces only")

    if mode == "closed-form":
        g = closed_form_geodesic(surface.c, s)
        lo, hi = geodesic_domain(surface.c, s)
        if not lo < t_end < hi:
            raise ValueError(f"t_end={t_end} outside the geodesic domain ({lo}, {hi})")
        ts = np.linspace(0.0, t_end, args.samples + 1)
        traj = Trajectory(ts, np.array([np.concatenate([g.position(t), g.velocity(t)]) for t in ts]))
        out.append(traj.to_csv().rstrip("\n"))
        return EXIT_OK

    traj = integrate_geodesic(
        surface.conn, s, t_end, method=INTEGRATORS[cfg.integrator], rtol=cfg.rel_tol, atol=cfg.abs_tol,
        n_steps=args.samples,
    )
    if mode == "both":
        g = closed_form_geodesic(surface.c, s)
        cf = np.array([np.concatenate([g.position(t), g.velocity(t)]) for t in traj.t])
        dev = float(np.abs(cf[:, :2] - traj.y[:, :2]).max())
        out.append(traj.to_csv({"cf_x1": cf[:, 0], "cf_x2": cf[:, 1], "cf_dx1": cf[:, 2], "cf_dx2": cf[:, 3]}).rstrip("\n"))
        out.append(f"# max_deviation={dev:.17g}")
    else:
        out.append(traj.to_csv().rstrip("\n"))
    if traj.escaped:
        out.append(f"# escaped at t={traj.t[-1]:.17g}")
        return EXIT_ESCAPED
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, args, out) -> int:
    surface = parse_surface_id(cfg.surface)
    q = make_quotient(args.quotient, surface)
    report = almost_zoll_sweep(q, args.base, args.n)
    out.append(report.to_csv().rstrip("\n"))
    out.append(report.summary_line())
    return EXIT_OK if report.almost_zoll else EXIT_PATTERN


def cmd_figure(cfg: RunConfig, args, out) -> int:
    surface = parse_surface_id(cfg.surface)
    if surface.kind is not Kind.Mc or surface.c != 0:
        raise ValueError("figures are drawn for Mc:0; the M(c) picture is its image under (x1, x2) -> (exp(c x2) x1, x2)")
    if not args.bases:
        return EXIT_OK
    from .figures import render_figure

    try:
        render_figure(args.bases, args.out)
    except OSError as exc:
        out.append(f"error: cannot write {args.out}: {exc}")
        return EXIT_WRITE
    out.append(f"wrote {len(args.bases)} panel(s) to {args.out}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args, out) -> int:
    from .verify import run_suite

    surface = parse_surface_id(cfg.surface)
    checks = run_suite(surface, args.suite, seed=cfg.seed)
    out.append(json.dumps([c.as_dict() for c in checks], indent=1))
    return EXIT_OK if all(c.pass_ for c in checks) else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--surface", help="Mc:<c>, M0c:<c>, Z3 or flat")
    common.add_argument("--config", help="key=value file overriding defaults")
    common.add_argument("--abs-tol", dest="abs_tol", type=float)
    common.add_argument("--rel-tol", dest="rel_tol", type=float)
    common.add_argument("--integrator", choices=sorted(INTEGRATORS))
    common.add_argument("--seed", type=int)
    common.add_argument("--output", "-o", help="write output here instead of stdout")

    parser = argparse.ArgumentParser(prog="affinezoll", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tensor", parents=[common], help="evaluate a tensor at a point")
    p.add_argument("what", choices=["christoffel", "ricci", "nabla-ricci", "alpha"])
    p.add_argument("--at", type=parse_pair, required=True)
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("geodesic", parents=[common], help="integrate a geodesic and write CSV")
    p.add_argument("--from", dest="from_", type=parse_pair, required=True)
    p.add_argument("--dir", type=parse_pair, required=True)
    p.add_argument("--t-end", dest="t_end", type=float, required=True)
    p.add_argument("--mode", choices=["integrate", "closed-form", "both"], default="integrate")
    p.add_argument("--samples", type=int, default=200, help="grid size for closed-form and rk4 output")
    p.set_defaults(func=cmd_geodesic)

    p = sub.add_parser("sweep", parents=[common], help="almost-Zoll sweep on a quotient")
    p.add_argument("--quotient", choices=["cylinder", "moebius"], required=True)
    p.add_argument("--base", type=parse_pair, default=(0.0, 0.0))
    p.add_argument("--n", type=int, default=32)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure", parents=[common], help="SVG panels of geodesic fans")
    p.add_argument("--bases", type=parse_pair, nargs="*", default=[])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("verify", parents=[common], help="run invariant checks, print JSON")
    p.add_argument("--suite", choices=["core", "symmetry", "quotient", "all"], default="all")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    out: list[str] = []
    try:
        cfg = build_config(args)
        code = args.func(cfg, args, out)
    except (GeometryError, ValueError, NotImplementedError) as exc:
        stderr.write(f"error: {exc}\n")
        code = EXIT_DOMAIN
    text = "\n".join(out) + ("\n" if out else "")
    if args.output and text:
        try:
            with open(args.output, "w") as fh:
                fh.write(text)
        except OSError as exc:
            stderr.write(f"error: cannot write {args.output}: {exc}\n")
            return EXIT_WRITE
    else:
        stdout.write(text)
    return code


def run() -> None:
    sys.exit(main())
