"""Finite-difference Dirichlet solvers for Δu = f(u) on masked tensor grids."""

import warnings
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg, splu

from .core import BOUNDARY, EXTERIOR, INTERIOR, Ball, GridField, ProblemSpec, make_grid
from .errors import (
    BracketStalled,
    BudgetExceeded,
    InvalidRange,
    LinearSolveFailed,
    MaskViolation,
    NewtonStalled,
    NonpositiveField,
    SingularExponent,
    TouchdownDetected,
)


@dataclass(frozen=True)
class SolveOptions:
    method: str = "newton"
    tol: float = 1e-9
    max_outer: int = 500
    linear_tol: float = 1e-12
    positivity_floor: Optional[float] = None
    omega: float = 1.0
    max_halvings: int = 30

    def __post_init__(self):
        if self.method not in ("monotone", "newton", "energy"):
            raise ValueError("method must be monotone, newton or energy")
        if not (self.tol > 0 and self.linear_tol > 0):
            raise InvalidRange("tolerances must be positive")
        if not 0 < self.omega <= 1:
            raise InvalidRange("damping must lie in (0, 1]")

    def floor_for(self, grid):
        bmin = float(np.min(grid.values[grid.boundary]))
        floor = 1e-10 * bmin if self.positivity_floor is None else self.positivity_floor
        if not 0 < floor < bmin:
            raise InvalidRange("positivity floor must lie in (0, min boundary value)")
        return floor


@dataclass(frozen=True, eq=False)
class ConstraintBox:
    """Order interval [lower, upper]; upper is a constant M or a field."""

    lower: Optional[GridField] = None
    upper: Union[float, GridField, None] = None

    def __post_init__(self):
        if self.lower is not None and np.any(self.lower.values[self.lower.active] <= 0):
            raise NonpositiveField("lower bound must be positive")
        if self.lower is not None and self.upper is not None:
            hi = self.upper_array(self.lower)
            act = self.lower.active
            if np.any(self.lower.values[act] > hi[act] + 1e-14 * np.abs(hi[act])):
                raise InvalidRange("lower bound exceeds upper bound")

    def upper_array(self, grid):
        if self.upper is None:
            return np.full(grid.dims, np.inf)
        if isinstance(self.upper, GridField):
            return self.upper.values
        return np.full(grid.dims, float(self.upper))

    def lower_array(self, grid):
        if self.lower is None:
            return np.full(grid.dims, -np.inf)
        return self.lower.values


# ---------------------------------------------------------------- discrete operator

class _System:
    """Five-point (2n+1-point) Laplacian split into interior and boundary columns."""

    def __init__(self, grid: GridField):
        dims = grid.dims
        mask = grid.mask.ravel()
        inner = np.flatnonzero(mask == INTERIOR)
        if len(inner) == 0:
            raise MaskViolation("grid has no interior nodes")
        if not np.any(mask == BOUNDARY):
            raise MaskViolation("grid has no Dirichlet nodes")
        multi = np.unravel_index(inner, dims)
        strides = np.cumprod((1,) + tuple(dims[::-1]))[:-1][::-1]
        rows, cols, vals = [], [], []
        m = len(inner)
        for ax in range(grid.n):
            if np.any(multi[ax] == 0) or np.any(multi[ax] == dims[ax] - 1):
                raise MaskViolation("interior node on the array edge along axis %d" % ax)
            for sgn in (-1, 1):
                nb = inner + sgn * strides[ax]
                if np.any(mask[nb] == EXTERIOR):
                    raise MaskViolation("interior stencil touches an exterior node")
                rows.append(np.arange(m))
                cols.append(nb)
                vals.append(np.ones(m))
        rows.append(np.arange(m))
        cols.append(inner)
        vals.append(np.full(m, -2.0 * grid.n))
        N = int(np.prod(dims))
        L = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                          shape=(m, N)) / grid.h**2
        self.grid = grid
        self.inner = inner
        self.L = L
        self.A = (-L[:, inner]).tocsc()
        outer = np.flatnonzero(mask != INTERIOR)
        self.outer = outer
        self.L_B = L[:, outer]
        self._lu = None

    def lap(self, values):
        return self.L @ np.asarray(values, dtype=float).ravel()

    def boundary_term(self, values):
        return self.L_B @ np.asarray(values, dtype=float).ravel()[self.outer]

    def factor(self):
        if self._lu is None:
            self._lu = splu(self.A)
        return self._lu

    def solve_poisson(self, rhs_inner, values, linear_tol=1e-12, method="direct", maxiter=None):
        """Interior values v with Δ_h v = rhs and v = values off the interior."""
        b = -np.asarray(rhs_inner, dtype=float) + self.boundary_term(values)
        if method == "direct":
            x = self.factor().solve(b)
        else:
            x, info = cg(self.A, b, rtol=linear_tol, atol=0.0, maxiter=maxiter or 20 * len(b))
            if info != 0:
                raise LinearSolveFailed("CG did not converge (info=%d)" % info)
        bnorm = np.linalg.norm(b)
        if np.linalg.norm(self.A @ x - b) > max(linear_tol, 1e3 * np.finfo(float).eps) * max(bnorm, 1e-300):
            raise LinearSolveFailed("linear residual above tolerance")
        return x

    def assemble(self, values, inner_values):
        full = np.array(values, dtype=float).ravel()
        full[self.inner] = inner_values
        return full.reshape(self.grid.dims)


def discrete_laplacian(field: GridField) -> GridField:
    """(sum over axes of u+ - 2u + u-)/h^2 at interior nodes, 0 elsewhere."""
    sysm = _System(field)
    out = np.zeros(int(np.prod(field.dims)))
    out[sysm.inner] = sysm.lap(field.values)
    return field.with_values(out.reshape(field.dims))


def _boundary_fill(grid, boundary):
    if boundary is None:
        return grid.values
    vals = np.array(grid.values, dtype=float)
    bnd = grid.boundary
    if isinstance(boundary, GridField):
        vals[bnd] = boundary.values[bnd]
    elif callable(boundary):
        vals[bnd] = boundary(grid.coords()[bnd])
    else:
        vals[bnd] = float(boundary)
    return vals


def solve_linear_poisson(grid: GridField, rhs, boundary=None, linear_tol=1e-12, method="cg",
                         maxiter=None) -> GridField:
    """Solve Δ_h u = rhs on interior nodes with Dirichlet data on boundary nodes.

    ``rhs`` is a scalar, an array shaped like the grid, or a GridField.
    ``boundary`` overrides the grid's boundary values (scalar, callable or field).
    """
    sysm = _System(grid)
    vals = _boundary_fill(grid, boundary)
    if isinstance(rhs, GridField):
        rhs = rhs.values
    rhs = np.broadcast_to(np.asarray(rhs, dtype=float), grid.dims).ravel()[sysm.inner]
    x = sysm.solve_poisson(rhs, vals, linear_tol, method=method, maxiter=maxiter)
    return grid.with_values(sysm.assemble(vals, x))


# ---------------------------------------------------------------- nonlinear solvers

def _residual(sysm, spec, full):
    u = full.ravel()
    return sysm.lap(u) - spec.f_eval(u[sysm.inner])


def monotone_iterate(spec: ProblemSpec, grid: GridField, box: Optional[ConstraintBox] = None,
                     options: SolveOptions = SolveOptions(method="monotone"), diagnostics=None) -> GridField:
    """Sub/super-solution iteration with T(u) = solve(Δv = f(u), v = boundary data).

    For decreasing f the map T is order preserving, so the sequence started
    at the sub-solution increases and the one started at the constant
    super-solution M decreases, with lower_k <= upper_k throughout. Without a
    lower bound only the upper sequence is run. Iteration stops when both
    sequences have settled (and, with two sequences, their gap is < tol).
    """
    sysm = _System(grid)
    floor = options.floor_for(grid)
    box = box or ConstraintBox()
    bvals = grid.values
    M = float(np.max(bvals[grid.boundary])) if box.upper is None else None
    up = np.array(bvals, dtype=float)
    up.ravel()[sysm.inner] = (M if M is not None else box.upper_array(grid).ravel()[sysm.inner])
    lo = None
    if box.lower is not None:
        lo = np.array(bvals, dtype=float)
        lo.ravel()[sysm.inner] = box.lower.values.ravel()[sysm.inner]
    w = options.omega
    hist = []
    eps = 1e-12

    def T(u):
        return sysm.solve_poisson(spec.f_eval(u.ravel()[sysm.inner]), bvals, options.linear_tol)

    for k in range(options.max_outer):
        seqs = [up] if lo is None else [lo, up]
        new = []
        for u in seqs:
            ui = u.ravel()[sysm.inner]
            v = (1 - w) * ui + w * T(u)
            if np.min(v) <= floor:
                raise TouchdownDetected("iterate reached the positivity floor at outer step %d" % k,
                                        r=None)
            new.append((ui, v))
        up_old, up_new = new[-1]
        if np.any(up_new > up_old + eps * np.abs(up_old)):
            raise BracketStalled("upper sequence failed to decrease", omega=w)
        change = float(np.max(np.abs(up_new - up_old)))
        gap = 0.0
        if lo is not None:
            lo_old, lo_new = new[0]
            if np.any(lo_new < lo_old - eps * np.abs(lo_old)):
                raise BracketStalled("lower sequence failed to increase", omega=w)
            if np.any(lo_new > up_new + eps * np.abs(up_new)):
                raise BracketStalled("lower iterate crossed the upper iterate", omega=w)
            lo = sysm.assemble(bvals, lo_new)
            gap = float(np.max(up_new - lo_new))
            change = max(change, float(np.max(np.abs(lo_new - lo_old))))
        up = sysm.assemble(bvals, up_new)
        mid = up if lo is None else 0.5 * (up + lo)
        res = float(np.max(np.abs(_residual(sysm, spec, mid))))
        hist.append((change, gap, res))
        if change < options.tol and gap < options.tol and res < options.tol:
            if diagnostics is not None:
                diagnostics.update(outer=k + 1, history=hist, residual=res)
            return grid.with_values(mid)
    if diagnostics is not None:
        diagnostics.update(outer=options.max_outer, history=hist)
    raise BracketStalled("bracket did not contract within %d steps" % options.max_outer, omega=w)


def newton_solve(spec: ProblemSpec, grid: GridField, init: GridField,
                 options: SolveOptions = SolveOptions(), diagnostics=None) -> GridField:
    """Damped Newton on F(u) = Δ_h u - f(u) with Jacobian Δ_h - diag(f'(u)).

    Steps are halved until the iterate stays above the positivity floor and
    the max-norm residual decreases.
    """
    sysm = _System(grid)
    floor = options.floor_for(grid)
    bvals = grid.values
    u = np.array(bvals, dtype=float)
    ui = np.asarray(init.values, dtype=float).ravel()[sysm.inner].copy()
    if np.min(ui) <= floor:
        raise TouchdownDetected("initial guess is below the positivity floor", r=None)
    u.ravel()[sysm.inner] = ui

    def F(ui):
        return sysm.lap(sysm.assemble(bvals, ui)) - spec.f_eval(ui)

    r = F(ui)
    norms = [float(np.max(np.abs(r)))]
    steps = 0
    while norms[-1] >= options.tol:
        if steps >= options.max_outer:
            raise NewtonStalled("no convergence in %d Newton steps" % options.max_outer)
        J = (-sysm.A - sp.diags(spec.fprime_eval(ui))).tocsc()
        try:
            d = splu(J).solve(-r)
        except RuntimeError as exc:
            raise NewtonStalled("singular Jacobian: %s" % exc) from exc
        lam = 1.0
        for _ in range(options.max_halvings):
            trial = ui + lam * d
            if np.min(trial) > floor:
                rt = F(trial)
                if np.max(np.abs(rt)) < norms[-1]:
                    break
            lam *= 0.5
        else:
            raise NewtonStalled("line search exhausted %d halvings" % options.max_halvings)
        ui, r = trial, rt
        norms.append(float(np.max(np.abs(r))))
        steps += 1
    if diagnostics is not None:
        diagnostics.update(steps=steps, residuals=norms)
    return grid.with_values(sysm.assemble(bvals, ui))


# ---------------------------------------------------------------- energy

def _check_energy_exponent(spec):
    if spec.source == "power":
        if spec.tau == -1:
            raise SingularExponent("the energy has a log term at tau = -1")
        if spec.tau < -1:
            warnings.warn("tau < -1: the energy functional may be unbounded below", RuntimeWarning)


def _edges(grid):
    """Index pairs of grid edges with at least one interior endpoint."""
    mask = grid.mask
    idx = np.arange(mask.size).reshape(grid.dims)
    pairs = []
    for ax in range(grid.n):
        a = np.take(idx, np.arange(grid.dims[ax] - 1), axis=ax).ravel()
        b = np.take(idx, np.arange(1, grid.dims[ax]), axis=ax).ravel()
        ma, mb = mask.ravel()[a], mask.ravel()[b]
        keep = ((ma == INTERIOR) | (mb == INTERIOR)) & (ma != EXTERIOR) & (mb != EXTERIOR)
        pairs.append((a[keep], b[keep]))
    return np.concatenate([p[0] for p in pairs]), np.concatenate([p[1] for p in pairs])


def energy_value(field: GridField, spec: ProblemSpec, part="total"):
    """J(u) = 1/2 sum |D u|^2 h^n + sum F(u) h^n (F' = f), forward differences.

    ``part`` selects "dirichlet", "potential" or the "total".
    """
    _check_energy_exponent(spec)
    u = field.values.ravel()
    if np.any(u[field.active.ravel()] <= 0):
        raise NonpositiveField("energy needs a positive field")
    vol = field.h**field.n
    a, b = _edges(field)
    dirichlet = 0.5 * np.sum(((u[b] - u[a]) / field.h) ** 2) * vol
    inner = field.interior.ravel()
    potential = np.sum(spec.primitive(u[inner])) * vol
    return {"dirichlet": dirichlet, "potential": potential}.get(part, dirichlet + potential)


def energy_gradient(field: GridField, spec: ProblemSpec, part="total") -> GridField:
    """Exact differential of ``energy_value`` w.r.t. interior values: h^n (-Δ_h u + f(u))."""
    _check_energy_exponent(spec)
    sysm = _System(field)
    u = field.values.ravel()
    vol = field.h**field.n
    g = np.zeros(u.size)
    if part in ("total", "dirichlet"):
        g[sysm.inner] -= sysm.lap(u) * vol
    if part in ("total", "potential"):
        g[sysm.inner] += spec.f_eval(u[sysm.inner]) * vol
    return field.with_values(g.reshape(field.dims))


def minimize_energy(spec: ProblemSpec, grid: GridField, box: Optional[ConstraintBox] = None,
                    options: SolveOptions = SolveOptions(method="energy"), init=None,
                    diagnostics=None) -> GridField:
    """Projected, Laplacian-preconditioned gradient descent on J over the box.

    The search direction is -(-Δ_h)^{-1} grad J, i.e. T(u) - u for the
    Picard map T; steps are backtracked until J decreases (Armijo) and then
    projected onto [lower, upper].
    """
    _check_energy_exponent(spec)
    sysm = _System(grid)
    floor = options.floor_for(grid)
    box = box or ConstraintBox()
    bvals = grid.values
    lo = np.maximum(box.lower_array(grid).ravel()[sysm.inner], floor)
    hi = box.upper_array(grid).ravel()[sysm.inner]
    if init is None:
        ui = np.full(len(sysm.inner), float(np.max(bvals[grid.boundary])))
        if box.lower is not None:
            ui = np.maximum(ui, box.lower.values.ravel()[sysm.inner])
    else:
        ui = np.asarray(init.values, dtype=float).ravel()[sysm.inner]
    ui = np.clip(ui, lo, hi)
    vol = grid.h**grid.n

    def J(ui):
        return energy_value(grid.with_values(sysm.assemble(bvals, ui)), spec)

    def G(ui):  # gradient per unit volume
        return -sysm.lap(sysm.assemble(bvals, ui)) + spec.f_eval(ui)

    def projected(ui, g):
        pg = g.copy()
        at_lo = ui <= lo
        at_hi = ui >= hi
        pg[at_lo] = np.minimum(g[at_lo], 0.0)
        pg[at_hi] = np.maximum(g[at_hi], 0.0)
        return pg

    energies = [J(ui)]
    best = ui
    for k in range(options.max_outer):
        g = G(ui)
        pg = projected(ui, g)
        pgn = float(np.max(np.abs(pg)))
        if pgn < options.tol:
            if diagnostics is not None:
                diagnostics.update(outer=k, energy=energies, projected_gradient=pgn)
            return grid.with_values(sysm.assemble(bvals, ui))
        d = -sysm.factor().solve(g)
        s = 1.0
        for _ in range(options.max_halvings):
            trial = np.clip(ui + s * d, lo, hi)
            Jt = J(trial)
            pred = vol * float(g @ (trial - ui))
            if Jt <= energies[-1] + 1e-4 * pred and Jt < energies[-1]:
                break
            # decrease below the resolution of J: accept if J did not rise beyond roundoff
            noise = 100 * np.finfo(float).eps * max(1.0, abs(energies[-1]))
            if -pred < noise and Jt <= energies[-1] + noise:
                break
            s *= 0.5
        else:
            break
        ui = trial
        best = ui
        energies.append(Jt)
    info = {"energy": energies, "projected_gradient": float(np.max(np.abs(projected(ui, G(ui)))))}
    if diagnostics is not None:
        diagnostics.update(info)
    raise BudgetExceeded("energy minimisation did not reach the tolerance",
                         best=grid.with_values(sysm.assemble(bvals, best)), info=info)


# ---------------------------------------------------------------- drivers

def solve_dirichlet(spec: ProblemSpec, grid: GridField, options: SolveOptions, box=None,
                    init=None, diagnostics=None) -> GridField:
    if options.method == "monotone":
        return monotone_iterate(spec, grid, box, options, diagnostics)
    if options.method == "energy":
        return minimize_energy(spec, grid, box, options, init, diagnostics)
    if init is None:
        init = grid
    return newton_solve(spec, grid, init, options, diagnostics)


def radial_subsolution(spec: ProblemSpec, grid: GridField, kappa=1.2, **bvp_kw):
    """Strict discrete sub-solution on a ball grid built from a radial solution.

    With U the radial solution taking the value b * kappa^(-1/(1-tau)) at R,
    psi = kappa^(1/(1-tau)) U satisfies Δpsi = kappa f(psi) >= f(psi) and
    psi <= b on the boundary nodes. The discrete inequality is checked.
    """
    from .radial import solve_radial_bvp

    if not isinstance(spec.domain, Ball):
        raise InvalidRange("radial sub-solutions need a ball domain")
    R = spec.domain.R
    b = float(spec.boundary)
    c = kappa ** (1.0 / (1.0 - spec.tau))
    prof = solve_radial_bvp(spec, R, b / c, num_points=4001)
    rr = grid.radii()
    vals = np.array(grid.values, dtype=float)
    act = grid.active
    vals[act] = c * prof.radial_value(np.minimum(rr[act], R))
    psi = grid.with_values(vals)
    sysm = _System(grid)
    lap = sysm.lap(vals)
    fpsi = spec.f_eval(vals.ravel()[sysm.inner])
    if np.any(lap < fpsi):
        raise InvalidRange("radial profile is not a discrete sub-solution at this resolution")
    return psi


def restrict_profile(profile, grid: GridField, boundary_from_profile=True) -> GridField:
    """Sample a radial profile at the grid node radii (active nodes only)."""
    rr = grid.radii()
    vals = np.array(grid.values, dtype=float)
    act = grid.active if boundary_from_profile else grid.interior
    vals[act] = profile.radial_value(rr[act])
    return grid.with_values(vals)


def touchdown_continuation(spec: ProblemSpec, grid: GridField, b_hi, b_lo, steps,
                           options: SolveOptions = SolveOptions()):
    """Follow the solution branch as constant boundary data b decreases geometrically.

    Each b is solved by Newton warm-started from the previous solution
    shifted by the change in b (the first b by the monotone iteration from
    M = b). Returns (rows, b_star) where rows are (b, min_u, status) and
    b_star is the smallest b that converged (None if none did).
    """
    if not (b_hi > b_lo > 0):
        raise InvalidRange("need b_hi > b_lo > 0")
    if steps < 2:
        raise InvalidRange("need at least two continuation steps")
    schedule = np.geomspace(b_hi, b_lo, steps)
    bnd = grid.boundary
    rows = []
    prev = None
    prev_b = None
    b_star = None
    for b in schedule:
        vals = np.array(grid.values, dtype=float)
        vals[bnd] = b
        g = grid.with_values(vals)
        try:
            if prev is None:
                sol = monotone_iterate(spec, g, None, replace(options, method="monotone"))
            else:
                start = np.array(prev.values) + (b - prev_b)
                start[bnd] = b
                sol = newton_solve(spec, g, g.with_values(start), options)
            u_min = float(np.min(sol.values[sol.active]))
            if u_min <= 0:
                rows.append((float(b), u_min, "nonpositive"))
                continue
            rows.append((float(b), u_min, "ok"))
            prev, prev_b, b_star = sol, b, float(b)
        except (NewtonStalled, TouchdownDetected, BracketStalled, LinearSolveFailed) as exc:
            rows.append((float(b), float("nan"), type(exc).__name__))
    return rows, b_star


def continuation_csv(rows):
    lines = ["b,min_u,status"]
    for b, m, s in rows:
        lines.append("%.17g,%.17g,%s" % (b, m, s))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- config

def parse_config(text):
    """``key = value`` lines (n, tau, domain, R, boundary, method, tol, grid_points)."""
    cfg = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError("bad config line: %r" % raw)
        key, val = (s.strip() for s in line.split("=", 1))
        cfg[key] = val
    return cfg


def problem_from_config(cfg):
    """Build (spec, grid, options) from a parsed config mapping."""
    from .core import Annulus, Box

    n = int(cfg["n"])
    tau = float(cfg.get("tau", -1.0))
    source = cfg.get("source", "power")
    kind = cfg.get("domain", "ball")
    R = float(cfg.get("R", 1.0))
    if kind == "ball":
        dom = Ball(R)
    elif kind == "annulus":
        dom = Annulus(float(cfg.get("r0", 0.5)), R)
    elif kind == "box":
        dom = Box((-R,) * n, (2 * R,) * n)
    else:
        raise ValueError("unknown domain %r" % kind)
    b = float(cfg.get("boundary", 1.0))
    spec = ProblemSpec(n, tau, source=source, domain=dom, boundary=b)
    opts = SolveOptions(method=cfg.get("method", "newton"), tol=float(cfg.get("tol", 1e-9)))
    points = int(cfg.get("grid_points", 41))
    grid = make_grid(dom, n, points, boundary=b)
    return spec, grid, opts


def max_principle_gap(field: GridField):
    """max over interior minus max over boundary (should be < 0 for subharmonic u)."""
    return float(np.max(field.values[field.interior]) - np.max(field.values[field.boundary]))


__all__ = [
    "SolveOptions", "ConstraintBox", "discrete_laplacian", "solve_linear_poisson",
    "monotone_iterate", "newton_solve", "energy_value", "energy_gradient", "minimize_energy",
    "solve_dirichlet", "radial_subsolution", "restrict_profile", "touchdown_continuation",
    "continuation_csv", "parse_config", "problem_from_config", "max_principle_gap",
]
