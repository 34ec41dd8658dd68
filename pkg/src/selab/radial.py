"""Radial ODE tools: shooting, the two-point problem, Emden-Fowler variables,
Euler-equation zeros and the periodic limit equation."""

import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import DOP853, solve_ivp
from scipy.optimize import brentq, minimize_scalar

from . import _numerics as num
from .core import ProblemSpec, RadialProfile
from .errors import (
    BudgetExceeded,
    CrossCheckFailed,
    InvalidRange,
    LogSingularity,
    NonOscillatory,
    NonpositiveField,
    NoSolutionInBracket,
    TouchdownDetected,
)

POSITIVITY_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class ShootingConfig:
    a: float
    r_max: float
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_steps: int = 500_000
    num_points: int = 2001
    r_eval: Optional[tuple] = None

    def __post_init__(self):
        if not self.a > 0:
            raise InvalidRange("centre value a must be positive")
        if not self.r_max > 0:
            raise InvalidRange("r_max must be positive")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise InvalidRange("tolerances must be positive")

    @property
    def h0(self):
        return max(1e-6, 1e-3 * self.rel_tol**0.25)

    def output_grid(self):
        if self.r_eval is not None:
            r = np.asarray(self.r_eval, dtype=float)
        elif self.r_max <= 20:
            r = np.linspace(0.0, self.r_max, self.num_points)
        else:
            head = np.linspace(0.0, 1.0, 201)
            r = np.concatenate([head, np.geomspace(1.0, self.r_max, self.num_points)[1:]])
        return r


def _taylor(spec, a, r):
    fa = float(spec.f_eval(a))
    try:
        fpa = float(spec.fprime_eval(a))
    except ValueError:
        fpa = 0.0
    n = spec.n
    c2 = fa / (2 * n)
    c4 = fpa * fa / (8 * n * (n + 2))
    return a + c2 * r**2 + c4 * r**4, 2 * c2 * r + 4 * c4 * r**3


def shoot_radial(spec: ProblemSpec, config: ShootingConfig) -> RadialProfile:
    """Integrate u'' + (n-1)u'/r = f(u), u(0) = a, u'(0) = 0 out to r_max.

    The removable 1/r singularity is stepped over with a fourth-order Taylor
    start on [0, h0]; DOP853 does the rest. Samples are taken from the dense
    output so the output grid does not constrain the step size.
    """
    n = spec.n
    r_out = config.output_grid()
    if r_out[0] < 0 or r_out[-1] > config.r_max * (1 + 1e-14) or np.any(np.diff(r_out) <= 0):
        raise InvalidRange("output radii must be increasing within [0, r_max]")
    # the Taylor start must also be short against the natural length sqrt(a/f(a))
    fa = abs(float(spec.f_eval(config.a)))
    h0 = min(config.h0, 0.5 * config.r_max)
    if fa > 0:
        h0 = min(h0, 1e-3 * math.sqrt(config.a / fa))
    floor = POSITIVITY_FLOOR * min(1.0, config.a)
    u_out = np.empty_like(r_out)
    du_out = np.empty_like(r_out)
    near = r_out <= h0
    u_out[near], du_out[near] = _taylor(spec, config.a, r_out[near])
    y0 = np.array(_taylor(spec, config.a, h0))

    def rhs(r, y):
        return np.array([y[1], float(spec.f_eval(y[0])) - (n - 1) * y[1] / r])

    solver = DOP853(rhs, h0, y0, config.r_max, rtol=config.rel_tol, atol=config.abs_tol)
    pending = np.flatnonzero(~near)
    k = 0
    steps = 0
    while solver.status == "running":
        if steps >= config.max_steps:
            raise BudgetExceeded("shooting exceeded %d steps at r=%g" % (config.max_steps, solver.t))
        t_old = solver.t
        msg = solver.step()
        steps += 1
        if solver.status == "failed":
            raise TouchdownDetected("integrator failed near r=%g: %s" % (solver.t, msg), r=solver.t)
        dense = solver.dense_output()
        if solver.y[0] < floor or not np.all(np.isfinite(solver.y)):
            r_td = brentq(lambda s: dense(s)[0] - floor, t_old, solver.t) \
                if np.isfinite(solver.y[0]) and dense(t_old)[0] > floor else solver.t
            err = TouchdownDetected("u reached the positivity floor at r=%g" % r_td, r=r_td)
            done = pending[:k]
            keep = np.concatenate([np.flatnonzero(near), done])
            if len(keep) >= 2:
                err.profile = RadialProfile(n, spec.tau, r_out[keep], u_out[keep], du_out[keep])
            raise err
        j = k
        while j < len(pending) and r_out[pending[j]] <= solver.t:
            j += 1
        if j > k:
            idx = pending[k:j]
            vals = dense(r_out[idx])
            u_out[idx], du_out[idx] = vals[0], vals[1]
            k = j
    if k < len(pending):
        idx = pending[k:]
        u_out[idx], du_out[idx] = solver.y[0], solver.y[1]
    return RadialProfile(n, spec.tau, r_out, u_out, du_out, a=config.a)


def _boundary_value(spec, a, R, rel_tol, max_steps):
    cfg = ShootingConfig(a=a, r_max=R, rel_tol=rel_tol, max_steps=max_steps, r_eval=(0.0, R))
    try:
        return float(shoot_radial(spec, cfg).u[-1])
    except TouchdownDetected:
        return 0.0


def solve_radial_bvp(spec: ProblemSpec, R, b, tol=1e-10, num_points=2001, rel_tol=1e-12,
                     scan=61, max_steps=500_000) -> RadialProfile:
    """Radial solution of Δu = f(u) on B_R with u(R) = b.

    u(R; a) need not be monotone in the centre value a (for singular sources
    it oscillates about the singular profile as a -> 0), so the bracket
    [1e-6 b, b] is first sampled on a log grid and the sign change with the
    largest a is refined with Brent's method.
    """
    if not (R > 0 and b > 0):
        raise InvalidRange("R and b must be positive")
    a_grid = np.geomspace(b * 1e-6, b, scan)
    g = np.array([_boundary_value(spec, a, R, rel_tol, max_steps) - b for a in a_grid])

    def gfun(a):
        return _boundary_value(spec, a, R, rel_tol, max_steps) - b

    hits = np.flatnonzero(g == 0)
    if len(hits):
        a_star = float(a_grid[hits[-1]])
    else:
        change = np.flatnonzero(np.sign(g[:-1]) != np.sign(g[1:]))
        if len(change):
            i = change[-1]
            lo, hi = a_grid[i], a_grid[i + 1]
        else:
            # no sampled sign change: look for a dip below b near the sampled minimum
            i = int(np.argmin(g))
            lo_i, hi_i = max(i - 1, 0), min(i + 1, scan - 1)
            res = minimize_scalar(lambda s: gfun(math.exp(s)), method="bounded",
                                  bounds=(math.log(a_grid[lo_i]), math.log(a_grid[hi_i])),
                                  options={"xatol": 1e-10})
            if res.fun >= 0:
                raise NoSolutionInBracket(
                    "u(R; a) > b for every a in [%g, %g]; min excess %.3g" % (a_grid[0], b, res.fun))
            lo, hi = math.exp(res.x), a_grid[hi_i]
        a_star = brentq(gfun, lo, hi, xtol=1e-15 * hi, rtol=4 * np.finfo(float).eps, maxiter=200)
    cfg = ShootingConfig(a=a_star, r_max=R, rel_tol=rel_tol, num_points=num_points, max_steps=max_steps)
    prof = shoot_radial(spec, cfg)
    if abs(prof.u[-1] - b) > tol * b:
        raise NoSolutionInBracket("bracket refinement stalled: |u(R) - b| = %.3g" % abs(prof.u[-1] - b))
    return prof


# ---------------------------------------------------------------- Emden-Fowler variables

def emden_fowler_amplitude(p):
    return ((p + 1.0) / 2.0) ** (2.0 / (p + 1.0))


@dataclass(frozen=True, eq=False)
class EmdenFowlerProfile:
    """v(t) = u(e^t) / (A_p e^{2t/(p+1)}) with its t-derivative dv."""

    p: float
    t: np.ndarray
    v: np.ndarray
    dv: np.ndarray
    A_p: float
    n: int = 2

    def __post_init__(self):
        t = np.array(self.t, dtype=float)
        v = np.array(self.v, dtype=float)
        dv = np.array(self.dv, dtype=float)
        if np.any(np.diff(t) <= 0):
            raise ValueError("t must be strictly increasing")
        if np.any(v <= 0):
            raise NonpositiveField("v must be positive")
        for name, arr in (("t", t), ("v", v), ("dv", dv)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def emden_fowler_forward(profile: RadialProfile, p) -> EmdenFowlerProfile:
    if not p > 0:
        raise InvalidRange("p must be positive")
    if profile.r[0] <= 0:
        raise LogSingularity("the profile has a sample at r = 0; drop it first")
    beta = 2.0 / (p + 1.0)
    A = emden_fowler_amplitude(p)
    r = profile.r
    scale = A * r**beta
    v = profile.u / scale
    dv = r * profile.du / scale - beta * v
    return EmdenFowlerProfile(p, np.log(r), v, dv, A, profile.n)


def emden_fowler_inverse(ef: EmdenFowlerProfile, n=None) -> RadialProfile:
    n = ef.n if n is None else n
    beta = 2.0 / (ef.p + 1.0)
    r = np.exp(ef.t)
    u = ef.A_p * r**beta * ef.v
    du = ef.A_p * r ** (beta - 1.0) * (ef.dv + beta * ef.v)
    return RadialProfile(n, -ef.p, r, u, du)


def veqn_residual(ef: EmdenFowlerProfile):
    """v_tt + (4/(p+1)) v_t + (4/(p+1)^2)(v - v^{-p}) at the samples (n = 2 radial)."""
    c = 2.0 / (ef.p + 1.0)
    vtt = num.derivative(ef.t, ef.dv)
    return vtt + 2 * c * ef.dv + c * c * (ef.v - ef.v ** (-ef.p))


def ef_infimum(ef: EmdenFowlerProfile, t_min=2.0):
    """Empirical inf of v over t > t_min (the lower bound is not quantified, only observed)."""
    sel = ef.t > t_min
    if not np.any(sel):
        raise InvalidRange("no samples beyond t_min")
    return float(np.min(ef.v[sel]))


# ---------------------------------------------------------------- Euler equation

def euler_ode_zeros(mu, r0, count, check=True, rtol=1e-8):
    """Zeros r_k = r0 exp(k pi / sqrt(mu)) of k(r) = sin(sqrt(mu) log(r/r0)).

    k solves -k'' - k'/r - (mu/r^2) k = 0. Each zero is confirmed by
    integrating that equation numerically from r0 with a zero-crossing event.
    """
    if not mu > 0:
        raise NonOscillatory("mu <= 0: the Euler equation has no oscillating solutions")
    if not r0 > 0:
        raise InvalidRange("r0 must be positive")
    if count < 1:
        raise InvalidRange("count must be >= 1")
    s = math.sqrt(mu)
    zeros = r0 * np.exp(np.arange(1, count + 1) * math.pi / s)
    if check:
        def rhs(r, y):
            return [y[1], -y[1] / r - mu * y[0] / r**2]

        def crossing(r, y):
            return y[0]

        sol = solve_ivp(rhs, (r0, zeros[-1] * (1 + 0.5 * (math.exp(math.pi / s) - 1))),
                        [0.0, s / r0], method="DOP853", rtol=1e-13, atol=1e-15,
                        events=crossing)
        found = [z for z in sol.t_events[0] if z > r0 * (1 + 1e-9)][:count]
        if len(found) < count:
            raise CrossCheckFailed("numerical integration found only %d zeros" % len(found))
        rel = np.abs(np.asarray(found) - zeros) / zeros
        if np.max(rel) > rtol:
            raise CrossCheckFailed("zero mismatch %.3g exceeds %.1g" % (np.max(rel), rtol))
    return zeros


# ---------------------------------------------------------------- periodic limit equation

LIMIT_CONVENTIONS = ("limit", "veqn", "pinney")


def limit_coefficients(p, convention):
    c = 4.0 / (p + 1.0) ** 2
    if convention == "limit":
        return c, 1.0
    if convention == "veqn":
        return c, c
    if convention == "pinney":
        return 1.0, 1.0
    raise ValueError("convention must be one of %s" % (LIMIT_CONVENTIONS,))


def constant_limit_solution(p, convention="limit"):
    """Constant v* with c1 v = c2 v^{-p}."""
    c1, c2 = limit_coefficients(p, convention)
    return (c2 / c1) ** (1.0 / (p + 1.0))


def pinney_solution(lam):
    """(lam cos^2 + sin^2 / lam)^(1/2), a solution of v'' + v = v^{-3}."""
    return lambda th: np.sqrt(lam * np.cos(th) ** 2 + np.sin(th) ** 2 / lam)


def read_theta_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    if [c.strip() for c in rows[0]] != ["theta", "v"]:
        raise ValueError("expected header theta,v")
    data = np.array([[float(x) for x in row] for row in rows[1:] if row])
    return data[:, 0], data[:, 1]


def limit_ode_residual(v_fn, p, convention="limit", num_samples=256):
    """max |v'' + c1 v - c2 v^{-p}| over a uniform periodic grid.

    ``v_fn`` may be a callable of theta, a (theta, v) pair on a uniform grid
    covering [0, 2 pi), or a path to a ``theta,v`` CSV. v'' comes from FFT
    differentiation, which is spectrally accurate for smooth periodic data.
    """
    c1, c2 = limit_coefficients(p, convention)
    if callable(v_fn):
        theta = np.linspace(0.0, 2 * np.pi, num_samples, endpoint=False)
        v = np.asarray(v_fn(theta), dtype=float) * np.ones_like(theta)
    else:
        if isinstance(v_fn, str):
            theta, v = read_theta_csv(v_fn)
        else:
            theta, v = (np.asarray(x, dtype=float) for x in v_fn)
        d = np.diff(theta)
        if np.ptp(d) > 1e-9 * d.mean() or abs(theta[0] + len(theta) * d.mean() - theta[0] - 2 * np.pi) > 1e-8:
            raise ValueError("samples must be uniform over one period [0, 2 pi)")
    if np.any(v <= 0):
        raise NonpositiveField("limit profile must be positive")
    m = len(v)
    k = np.fft.fftfreq(m, d=1.0 / m)
    vhat = np.fft.fft(v)
    if m % 2 == 0:
        vhat[m // 2] = 0.0
    vtt = np.real(np.fft.ifft(-(k**2) * vhat))
    return float(np.max(np.abs(vtt + c1 * v - c2 * v ** (-p))))
