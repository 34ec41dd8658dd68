"""Command-line entry point: ``selab <command> [options]``.

Exit codes: 0 success, 1 usage or parameter error, 2 computation failure
(touchdown, no solution in the bracket, no positive solution, failed audit).
Each run that writes files also writes ``<primary output>.manifest.json``.
"""

import argparse
import json
import math
import os
import sys
import tempfile
import time
from contextlib import nullcontext
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import SelabError

SCHEMA = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


# ---------------------------------------------------------------- output helpers

def atomic_write(path, text):
    """Write via a temporary file in the same directory, then rename."""
    path = os.path.abspath(path)
    d = os.path.dirname(path)
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _dumps(obj):
    return json.dumps(_clean(obj), sort_keys=True, indent=1) + "\n"


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_clean(v) for v in x]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


@dataclass
class RunManifest:
    command: str
    params: dict
    inputs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    version: str = __version__
    wall_time: float = 0.0
    status: str = "ok"
    exit_code: int = 0
    message: str = ""

    def to_dict(self):
        return {"schema": SCHEMA, "command": self.command, "params": self.params,
                "inputs": self.inputs, "outputs": self.outputs, "version": self.version,
                "wall_time": self.wall_time, "status": self.status, "exit_code": self.exit_code,
                "message": self.message}


class Run:
    """Collects outputs of one command and writes the manifest at the end."""

    def __init__(self, args):
        self.args = args
        self.message = ""
        self.t0 = time.perf_counter()
        params = {k: v for k, v in vars(args).items() if k not in ("func",)}
        self.manifest = RunManifest(args.command, _clean(params))
        if getattr(args, "config", None):
            self.manifest.inputs.append(os.path.abspath(args.config))
        if getattr(args, "input", None):
            self.manifest.inputs.append(os.path.abspath(args.input))

    def emit(self, text, path):
        """Write text to path (atomically) or to stdout when path is None."""
        if path is None:
            if not self.args.quiet:
                sys.stdout.write(text)
            return
        self.manifest.outputs.append(atomic_write(path, text))

    def say(self, msg):
        if not self.args.quiet:
            sys.stderr.write(msg + "\n")

    def finish(self, code, message=""):
        m = self.manifest
        m.exit_code = code
        m.status = "ok" if code == 0 else "failed"
        m.message = message or self.message
        m.wall_time = time.perf_counter() - self.t0
        primary = getattr(self.args, "out", None) or getattr(self.args, "report", None)
        if primary is None and m.outputs:
            primary = m.outputs[0]
        if primary is not None:
            atomic_write(os.path.abspath(primary) + ".manifest.json", _dumps(m.to_dict()))
        return code


# ---------------------------------------------------------------- argument helpers

def int_range(text):
    """'2..8' -> [2..8], '0,2,5' -> [0, 2, 5], '4' -> [4]."""
    text = text.strip()
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            lo, hi = int(a), int(b)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None


def _read_config(path):
    from .elliptic import parse_config

    try:
        with open(path) as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _apply_config(args, keys):
    """Fill unset flags from --config (flags win)."""
    if not args.config:
        return
    cfg = _read_config(args.config)
    for key, conv in keys.items():
        if key in cfg and getattr(args, key, None) is None:
            try:
                setattr(args, key, conv(cfg[key]))
            except ValueError:
                raise UsageError(f"bad config value for {key}: {cfg[key]!r}") from None


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


# ---------------------------------------------------------------- commands

def cmd_radial(args, run):
    from .core import ProblemSpec
    from .errors import NoSolutionInBracket, TouchdownDetected
    from .radial import ShootingConfig, shoot_radial, solve_radial_bvp

    _apply_config(args, {"n": int, "tau": float, "a": float, "rmax": float})
    _require(args, "n", "tau")
    if (args.a is None) == (args.bvp is None):
        raise UsageError("give exactly one of --a or --bvp R b")
    spec = ProblemSpec(args.n, args.tau)
    try:
        if args.a is not None:
            _require(args, "rmax")
            prof = shoot_radial(spec, ShootingConfig(a=args.a, r_max=args.rmax, num_points=args.points))
        else:
            R, b = args.bvp
            prof = solve_radial_bvp(spec, R, b, num_points=args.points)
    except (TouchdownDetected, NoSolutionInBracket) as exc:
        diag = {"schema": SCHEMA, "error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, TouchdownDetected):
            diag["r"] = exc.r
            partial = getattr(exc, "profile", None)
            if partial is not None and args.out:
                run.emit(partial.to_csv(), args.out)
        run.emit(_dumps(diag), args.report if args.report else
                 (args.out + ".diagnostic.json" if args.out else None))
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        run.message = f"{type(exc).__name__}: {exc}"
        return 2
    run.emit(prof.to_csv(), args.out)
    if args.report:
        res = np.abs(_profile_residual(prof))
        run.emit(_dumps({"schema": SCHEMA, "a": prof.a, "r_max": prof.r_max,
                         "u_end": float(prof.u[-1]), "max_residual": float(np.max(res))}), args.report)
    return 0


def _profile_residual(prof):
    from .core import pde_residual

    r = pde_residual(prof)
    return r[2:-2] if len(r) > 4 else r


def cmd_dirichlet(args, run):
    from .core import pde_residual
    from .elliptic import problem_from_config, solve_dirichlet

    cfg = _read_config(args.config) if args.config else {}
    flags = {"n": args.n, "tau": args.tau, "domain": args.domain, "R": args.R, "r0": args.r0,
             "boundary": args.boundary, "method": args.method, "tol": args.tol,
             "grid_points": args.grid_points}
    for k, v in flags.items():
        if v is not None:
            cfg[k] = str(v)
    if "n" not in cfg:
        raise UsageError("missing required option: --n (or n in --config)")
    try:
        spec, grid, opts = problem_from_config(cfg)
    except (KeyError, ValueError) as exc:
        if isinstance(exc, SelabError):
            raise
        raise UsageError(str(exc)) from None
    diag = {}
    sol = solve_dirichlet(spec, grid, opts, diagnostics=diag)
    res = pde_residual(sol, spec).values[sol.interior]
    out = {"schema": SCHEMA, "config": cfg, "field": sol.to_dict(),
           "min_u": float(np.min(sol.values[sol.active])),
           "max_residual": float(np.max(np.abs(res))) if res.size else 0.0,
           "diagnostics": {k: v for k, v in diag.items() if k != "history"}}
    run.emit(_dumps(out), args.out)
    if args.report:
        run.emit(_dumps({k: v for k, v in out.items() if k != "field"}), args.report)
    return 0


def _audit_call(name, u, rmax):
    from . import auditor as au

    Rs = [rmax / 8, rmax / 4, rmax / 2, rmax]
    if name == "gradient":
        return au.gradient_estimate_audit(u, Rs)
    if name == "l1":
        return au.l1_lower_bound_audit(u, Rs)
    if name == "growth":
        return au.growth_bound_audit(u)
    if name == "harnack":
        return au.harnack_bound_audit(u, au.CutoffSpec(rmax / 4, rmax / 2))
    if name == "pohozaev":
        return au.pohozaev_audit(u, float(u.radial_value(rmax / 2)))
    if name == "caccioppoli":
        return au.caccioppoli_audit(u, 1.0, rmax, rmax / 2)
    if name == "sup_bound":
        return au.sup_bound_audit(u, 2.0, 0.5, rmax)
    if name == "finite_index":
        return au.finite_index_growth_audit(u)
    raise UsageError(f"unknown check {name!r}")


def cmd_audit(args, run):
    from .auditor import CHECKS, AuditReport
    from .core import RadialProfile

    _apply_config(args, {"n": int, "tau": float})
    _require(args, "input", "n", "tau")
    names = [c.strip() for c in args.checks.split(",") if c.strip()]
    unknown = [c for c in names if c not in CHECKS]
    if unknown or not names:
        raise UsageError(f"unknown check(s) {', '.join(unknown) or '(none)'}; valid: {', '.join(CHECKS)}")
    try:
        prof = RadialProfile.from_csv(args.input, args.n, args.tau)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read profile: {exc}") from None
    reports = []
    for name in names:
        try:
            rep = _audit_call(name, prof, prof.r_max)
        except SelabError as exc:
            rep = AuditReport(name, {"error": type(exc).__name__}, math.nan, math.nan, -math.inf,
                              notes=str(exc))
        reports.append(rep)
        run.say(f"{name:14s} {'pass' if rep.passed else 'FAIL'}  empirical={rep.empirical:.6g}")
    text = _dumps({"schema": SCHEMA, "input": os.path.abspath(args.input),
                   "reports": [r.to_dict() for r in reports]})
    run.emit(text, args.report or args.out)
    return 0 if all(r.passed for r in reports) else 2


def cmd_spectrum(args, run):
    from .core import ProblemSpec, singular_solution
    from .spectral import morse_index

    _apply_config(args, {"n": int, "tau": float, "R": float, "r0": float})
    _require(args, "n", "tau", "R")
    if args.tau >= 0:
        raise UsageError("--tau must be negative")
    u = singular_solution(args.n, args.tau)
    spec = ProblemSpec(args.n, args.tau)
    rep = morse_index(u, spec, args.R, modes=args.modes, r0=args.r0 or 0.0, N=args.N)
    d = rep.to_dict()
    d["schema"] = SCHEMA
    d["solution"] = "singular"
    run.emit(_dumps(d), args.out or args.report)
    return 0


def _parse_h(text, n):
    kind, _, rest = text.partition(":")
    try:
        if kind == "const":
            c = float(rest)
            return lambda x: np.full(x.shape[:-1], c)
        if kind == "gauss":
            a, b = (float(t) for t in rest.split(","))
            return lambda x: a + b * np.exp(-np.sum(x**2, axis=-1))
    except ValueError:
        pass
    raise UsageError(f"bad --h {text!r}; use const:C or gauss:A,B (A + B exp(-|x|^2))")


def cmd_integral(args, run):
    from .core import EXTERIOR, INTERIOR, Ball, Box, GridField, make_grid
    from .potential import IntegralOptions, RieszKernelSpec, fixed_point_residual, solve_integral_equation

    _apply_config(args, {"n": int, "mu": float, "tau": float, "L": float, "points": int, "tol": float})
    _require(args, "n", "mu", "tau")
    if args.tau >= 0:
        raise UsageError("--tau must be negative")
    hfun = _parse_h(args.h, args.n)
    L = args.L or 1.0
    pts = args.points or 41
    kernel = RieszKernelSpec(args.n, args.mu)
    if args.domain == "ball":
        tmpl = make_grid(Ball(L), args.n, pts)
    else:
        tmpl = make_grid(Box((-L,) * args.n, (2 * L,) * args.n), args.n, pts)
    mask = np.where(tmpl.mask == EXTERIOR, EXTERIOR, INTERIOR)
    H = GridField(tmpl.dims, tmpl.h, tmpl.origin, hfun(tmpl.coords()), mask)
    diag = {}
    opts = IntegralOptions(tol=args.tol or 1e-9)
    u = solve_integral_equation(H, args.tau, kernel, opts, diagnostics=diag)
    act = u.active
    out = {"schema": SCHEMA, "n": args.n, "mu": args.mu, "tau": args.tau, "h": args.h,
           "iterations": diag["iterations"], "residual": fixed_point_residual(u, H, args.tau, kernel),
           "min_u": float(np.min(u.values[act])),
           "max_u_minus_h": float(np.max(u.values[act] - H.values[act])),
           "field": u.to_dict()}
    run.emit(_dumps(out), args.out or args.report)
    return 0


def thresholds_table(tau, ns, mu=1.0):
    from .core import liouville_coefficient, stability_threshold_dim
    from .potential import hls_exponents
    from .spectral import hardy_stability_check

    rows = []
    for n in ns:
        row = {"n": n}
        if n > 2:
            row["tau_star"] = -1.0 - 2.0 * n / (n - 2.0)
            row["liouville_coef"] = None if tau == -1 else float(liouville_coefficient(n, tau)[0])
        else:
            row["tau_star"] = None
            row["liouville_coef"] = None
        if n >= 2:
            lhs, rhs, stable = hardy_stability_check(n, tau)
            row.update(hardy_lhs=lhs, hardy_rhs=rhs, stable=stable)
        if 0 < mu < n:
            hx = hls_exponents(n, mu, tau)
            row.update(hls_beta=hx.beta, hls_threshold=hx.beta_threshold,
                       hls_feasible=hx.feasible["beta_condition"])
        rows.append(row)
    return {"schema": SCHEMA, "tau": tau, "mu": mu, "n_star": stability_threshold_dim(tau), "rows": rows}


def format_thresholds(table):
    def f(v, w=10):
        if v is None:
            return "-".rjust(w)
        if isinstance(v, bool):
            return ("yes" if v else "no").rjust(w)
        if isinstance(v, int):
            return str(v).rjust(w)
        return f"{v:.6g}".rjust(w)

    cols = ["n", "tau_star", "liouville_coef", "hardy_lhs", "hardy_rhs", "stable", "hls_beta",
            "hls_threshold", "hls_feasible"]
    widths = [max(10, len(c) + 1) for c in cols]
    lines = [f"tau = {table['tau']:g}   n* = {table['n_star']:.6f}   mu = {table['mu']:g}",
             "".join(c.rjust(w) for c, w in zip(cols, widths))]
    for row in table["rows"]:
        lines.append("".join(f(row.get(c), w) for c, w in zip(cols, widths)))
    return "\n".join(lines) + "\n"


def cmd_thresholds(args, run):
    _apply_config(args, {"tau": float, "mu": float})
    _require(args, "tau")
    if not args.tau < 0:
        raise UsageError("--tau must be < 0")
    ns = args.n or list(range(2, 11))
    if any(n < 2 for n in ns):
        raise UsageError("--n values must be >= 2")
    table = thresholds_table(args.tau, ns, args.mu if args.mu is not None else 1.0)
    text = format_thresholds(table)
    if args.out:
        run.emit(text, args.out)
    elif not args.quiet:
        sys.stdout.write(text)
    if args.report:
        run.emit(_dumps(table), args.report)
    return 0


# ---------------------------------------------------------------- parser

def build_parser():
    def global_flags(suppress):
        # subcommands must not reset flags already given before the command name
        kw = {"default": argparse.SUPPRESS} if suppress else {}
        g = argparse.ArgumentParser(add_help=False)
        g.add_argument("--config", metavar="PATH", help="key = value file; flags override it", **kw)
        g.add_argument("--out", metavar="PATH", help="primary output file (default: stdout)", **kw)
        g.add_argument("--report", metavar="PATH", help="JSON report file", **kw)
        g.add_argument("--quiet", action="store_true", help="suppress progress and stdout output", **kw)
        return g

    common = global_flags(True)
    p = _Parser(prog="selab", description="Numerics for Δu = u^tau, tau < 0.", parents=[global_flags(False)])
    p.add_argument("--version", action="version", version=f"selab {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    r = sub.add_parser("radial", parents=[common], help="shoot or solve a radial profile (CSV)")
    r.add_argument("--n", type=int)
    r.add_argument("--tau", type=float)
    r.add_argument("--a", type=float, help="centre value u(0)")
    r.add_argument("--bvp", type=float, nargs=2, metavar=("R", "B"), help="solve u(R) = B")
    r.add_argument("--rmax", type=float)
    r.add_argument("--points", type=int, default=2001)
    r.set_defaults(func=cmd_radial)

    d = sub.add_parser("dirichlet", parents=[common], help="grid Dirichlet solve (JSON)")
    d.add_argument("--n", type=int)
    d.add_argument("--tau", type=float)
    d.add_argument("--domain", choices=["ball", "annulus", "box"])
    d.add_argument("--R", type=float)
    d.add_argument("--r0", type=float)
    d.add_argument("--boundary", type=float)
    d.add_argument("--method", choices=["monotone", "newton", "energy"])
    d.add_argument("--tol", type=float)
    d.add_argument("--grid-points", type=int, dest="grid_points")
    d.set_defaults(func=cmd_dirichlet)

    a = sub.add_parser("audit", parents=[common], help="run estimate audits on a profile CSV")
    a.add_argument("--input", metavar="CSV")
    a.add_argument("--n", type=int)
    a.add_argument("--tau", type=float)
    a.add_argument("--checks", default="gradient,l1,growth")
    a.set_defaults(func=cmd_audit)

    s = sub.add_parser("spectrum", parents=[common], help="Morse index of the singular solution")
    s.add_argument("--n", type=int)
    s.add_argument("--tau", type=float)
    s.add_argument("--R", type=float)
    s.add_argument("--r0", type=float)
    s.add_argument("--modes", type=int_range, help="e.g. 0..4 (default: automatic)")
    s.add_argument("--N", type=int, default=2000)
    s.set_defaults(func=cmd_spectrum)

    i = sub.add_parser("integral", parents=[common], help="solve u = h - I_mu(u^tau) on a grid")
    i.add_argument("--n", type=int)
    i.add_argument("--mu", type=float)
    i.add_argument("--tau", type=float)
    i.add_argument("--h", default="const:10", help="const:C or gauss:A,B")
    i.add_argument("--L", type=float, help="half-width of the grid (default 1)")
    i.add_argument("--points", type=int, help="nodes per axis (default 41)")
    i.add_argument("--domain", choices=["box", "ball"], default="box")
    i.add_argument("--tol", type=float)
    i.set_defaults(func=cmd_integral)

    t = sub.add_parser("thresholds", parents=[common], help="Liouville, Hardy and HLS thresholds")
    t.add_argument("--tau", type=float)
    t.add_argument("--n", type=int_range, help="e.g. 2..8")
    t.add_argument("--mu", type=float, help="Riesz order for the HLS columns (default 1)")
    t.set_defaults(func=cmd_thresholds)
    return p


def _threads():
    v = os.environ.get("SELAB_THREADS")
    if not v:
        return nullcontext()
    import scipy.fft

    try:
        return scipy.fft.set_workers(max(1, int(v)))
    except ValueError:
        raise UsageError("SELAB_THREADS must be a positive integer") from None


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    run = Run(args)
    try:
        with _threads():
            code = args.func(args, run)
        return run.finish(code)
    except UsageError as exc:
        sys.stderr.write(f"selab {args.command}: error: {exc}\n")
        return 1
    except SelabError as exc:
        # parameter-type errors are usage errors; numerical failures exit 2
        code = 1 if isinstance(exc, ValueError) else 2
        sys.stderr.write(f"selab {args.command}: {type(exc).__name__}: {exc}\n")
        if code == 2:
            fail = {"schema": SCHEMA, "error": type(exc).__name__, "message": str(exc)}
            target = args.report or args.out
            if target:
                run.emit(_dumps(fail), target)
        return run.finish(code, f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    sys.exit(main())
