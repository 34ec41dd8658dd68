"""Riesz potentials, the integral equation u = h - I_mu(u^tau), Kelvin inversion,
reflection identities and moving-plane symmetry measurements.

Fields live on uniform ``GridField`` grids. The integral runs over the active
nodes only: the problem on R^n is truncated to the grid, which is the one
rule that keeps the integral finite for constant h (|y|^(mu-n) is not
integrable at infinity when mu > 0).
"""

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.signal import fftconvolve

from . import _numerics as num
from .core import EXTERIOR, GridField
from .errors import BudgetExceeded, InvalidKernel, InvalidRange, NonpositiveField, NoPositiveSolution, OutOfDomain


@dataclass(frozen=True)
class RieszKernelSpec:
    """Kernel |x-y|^(mu-n) with midpoint quadrature and an equal-volume self cell."""

    n: int
    mu: float
    quadrature: str = "midpoint-self-cell"

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise InvalidKernel("dimension must be a positive integer")
        if not 0 < self.mu < self.n:
            raise InvalidKernel(f"need 0 < mu < n, got mu={self.mu}, n={self.n}")
        if self.quadrature != "midpoint-self-cell":
            raise InvalidKernel(f"unknown quadrature {self.quadrature!r}")

    def self_weight(self, h):
        """Integral of |z|^(mu-n) over the ball with the volume of one cell."""
        n, mu = self.n, self.mu
        rc = (h ** n / num.ball_volume(n)) ** (1.0 / n)
        return n * num.ball_volume(n) * rc ** mu / mu

    def weights(self, shape, h):
        """Quadrature weights on all lattice offsets, centred array of size 2*shape-1."""
        n, mu = self.n, self.mu
        if len(shape) != n:
            raise InvalidKernel("grid dimension does not match kernel dimension")
        offs = [h * np.arange(-(d - 1), d) for d in shape]
        r = np.linalg.norm(np.stack(np.meshgrid(*offs, indexing="ij"), axis=-1), axis=-1)
        w = np.empty_like(r)
        pos = r > 0
        w[pos] = r[pos] ** (mu - n) * h ** n
        w[~pos] = self.self_weight(h)
        return w


def _check_kernel(field_: GridField, kernel: RieszKernelSpec):
    if field_.n != kernel.n:
        raise InvalidKernel("field and kernel dimensions differ")


def _conv(arr, kernel, h):
    return fftconvolve(arr, kernel.weights(arr.shape, h), mode="same")


def riesz_apply(f: GridField, kernel: RieszKernelSpec) -> GridField:
    """Discrete Riesz potential sum_y w(x-y) f(y) over active nodes; zero at exterior nodes."""
    _check_kernel(f, kernel)
    act = f.active
    vals = np.where(act, f.values, 0.0)
    out = _conv(vals, kernel, f.h)
    return f.with_values(np.where(act, out, 0.0))


def riesz_matrix(grid: GridField, kernel: RieszKernelSpec):
    """Dense operator on the active nodes (row-major order); small grids only."""
    _check_kernel(grid, kernel)
    x = grid.coords()[grid.active]
    d = np.linalg.norm(x[:, None, :] - x[None, :, :], axis=-1)
    W = np.empty_like(d)
    off = d > 0
    W[off] = d[off] ** (kernel.mu - kernel.n) * grid.h ** kernel.n
    W[~off] = kernel.self_weight(grid.h)
    return W


def alpha_weight(n, mu, tau):
    """Weight exponent of the Kelvin-transformed equation, (n+mu) - (n-mu)tau."""
    RieszKernelSpec(n, mu)
    return (n + mu) - (n - mu) * tau


# ---------------------------------------------------------------- integral equation

@dataclass(frozen=True)
class IntegralOptions:
    tol: float = 1e-9
    max_iter: int = 5000
    omega: float = 0.5
    min_omega: float = 2.0 ** -10

    def __post_init__(self):
        if not self.tol > 0:
            raise InvalidRange("tolerance must be positive")
        if not 0 < self.min_omega <= self.omega <= 1:
            raise InvalidRange("need 0 < min_omega <= omega <= 1")


def _source_weight(grid: GridField, alpha):
    act = grid.active
    if alpha is None or alpha == 0:
        return np.where(act, 1.0, 0.0)
    r = grid.radii()
    if np.any(act & (r == 0)):
        raise OutOfDomain("weight |y|^-alpha is singular at an active node at the origin")
    w = np.zeros(grid.dims)
    w[act] = r[act] ** (-float(alpha))
    return w


def fixed_point_map(u: GridField, h: GridField, tau, kernel: RieszKernelSpec, alpha=None):
    """T(u) = h - I_mu(w u^tau) on the active nodes, with w = |y|^-alpha or 1."""
    _check_kernel(h, kernel)
    act = h.active
    if np.any(u.values[act] <= 0):
        raise NonpositiveField("T(u) needs u > 0 on active nodes")
    g = np.zeros(h.dims)
    g[act] = u.values[act] ** tau
    g *= _source_weight(h, alpha)
    Iu = _conv(g, kernel, h.h)
    return h.with_values(np.where(act, h.values - Iu, h.values))


def fixed_point_residual(u: GridField, h: GridField, tau, kernel, alpha=None):
    Tu = fixed_point_map(u, h, tau, kernel, alpha)
    act = h.active
    return float(np.max(np.abs(u.values[act] - Tu.values[act])))


def solve_integral_equation(h: GridField, tau, kernel: RieszKernelSpec,
                            options: IntegralOptions = IntegralOptions(), alpha=None,
                            diagnostics=None) -> GridField:
    """Damped Picard iteration u <- (1-w)u + w T(u) started from u = h.

    T is order preserving (u -> u^tau reverses order and the kernel is
    positive, so the two reversals cancel). Every positive solution lies
    below h, hence below each iterate, and below T of each iterate. So the
    first time T(u) fails to be positive somewhere, no positive solution of
    the truncated problem exists.
    """
    _check_kernel(h, kernel)
    if not tau < 0:
        raise InvalidRange("tau must be negative")
    act = h.active
    if not np.any(act):
        raise OutOfDomain("no active nodes")
    if np.any(h.values[act] <= 0):
        raise NonpositiveField("h must be positive")
    wgt = _source_weight(h, alpha)
    hv = h.values
    u = np.array(hv, dtype=float)
    omega = options.omega
    hist = []
    prev = math.inf
    for k in range(options.max_iter):
        g = np.zeros(h.dims)
        g[act] = u[act] ** tau
        Tu = hv - _conv(g * wgt, kernel, h.h)
        if np.any(Tu[act] <= 0):
            bad = int(np.count_nonzero(Tu[act] <= 0))
            raise NoPositiveSolution(
                f"T(u) is nonpositive at {bad} node(s) after {k} iterations; "
                "h is too small for the truncated domain")
        res = float(np.max(np.abs(u[act] - Tu[act])))
        hist.append({"iter": k, "residual": res, "omega": omega,
                     "min_u": float(np.min(u[act])), "max_u": float(np.max(u[act]))})
        if res < options.tol:
            out = np.where(act, u, hv)
            if diagnostics is not None:
                diagnostics.update(iterations=k, residual=res, history=hist, omega=omega)
            return h.with_values(out)
        if res > prev and omega > options.min_omega:
            omega = max(options.min_omega, 0.5 * omega)
        prev = res
        u[act] = (1.0 - omega) * u[act] + omega * Tu[act]
    if diagnostics is not None:
        diagnostics.update(iterations=options.max_iter, residual=prev, history=hist, omega=omega)
    raise BudgetExceeded(f"no convergence in {options.max_iter} iterations (residual {prev:.3e})",
                         best=h.with_values(np.where(act, u, hv)), info={"residual": prev})


# ---------------------------------------------------------------- interpolation

def _lagrange4(t):
    """Cubic Lagrange weights on nodes -1, 0, 1, 2 at local coordinate t in [0, 1)."""
    return np.stack([
        -t * (t - 1) * (t - 2) / 6.0,
        (t + 1) * (t - 1) * (t - 2) / 2.0,
        -(t + 1) * t * (t - 2) / 2.0,
        (t + 1) * t * (t - 1) / 6.0,
    ], axis=-1)


def sample(u: GridField, points):
    """Local tensor cubic interpolation of u at points, shape (m, n).

    Returns (values, ok); ok is False where the 4^n stencil leaves the grid
    or touches an exterior node. Points within 1e-9 spacings of a node take
    the node value exactly.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    m, n = pts.shape
    if n != u.n:
        raise InvalidRange("point dimension mismatch")
    s = (pts - np.asarray(u.origin)) / u.h
    snapped = np.abs(s - np.round(s)) < 1e-9
    s = np.where(snapped, np.round(s), s)
    base = np.floor(s).astype(int)
    t = s - base
    dims = np.asarray(u.dims)
    ok = np.all((base - 1 >= 0) & (base + 2 <= dims - 1), axis=1)
    on_node = np.all(snapped, axis=1)
    node_idx = np.round(s).astype(int)
    ok_node = on_node & np.all((node_idx >= 0) & (node_idx <= dims - 1), axis=1)
    vals = np.full(m, np.nan)
    active = u.active
    if np.any(ok_node):
        idx = tuple(node_idx[ok_node].T)
        good = active[idx]
        sel = np.flatnonzero(ok_node)
        vals[sel[good]] = u.values[idx][good]
        ok = ok.copy()
        ok[sel] = good
    rest = ok & ~on_node
    if np.any(rest):
        sel = np.flatnonzero(rest)
        W = _lagrange4(t[sel])            # (k, n, 4)
        acc = np.zeros(len(sel))
        good = np.ones(len(sel), dtype=bool)
        for combo in np.ndindex(*(4,) * n):
            idx = tuple(base[sel, ax] - 1 + combo[ax] for ax in range(n))
            w = np.ones(len(sel))
            for ax in range(n):
                w = w * W[:, ax, combo[ax]]
            acc += w * u.values[idx]
            good &= active[idx]
        vals[sel] = np.where(good, acc, np.nan)
        ok[sel] = good
    return vals, ok


# ---------------------------------------------------------------- Kelvin transform

def kelvin_transform(u: GridField, mu, target: Optional[GridField] = None, trim=False) -> GridField:
    """v(x) = |x|^(mu-n) u(x/|x|^2) on the active nodes of ``target`` (default: u's grid).

    Raises OutOfDomain when an active target node is the origin or its
    inverse cannot be interpolated from u; with ``trim`` such nodes become
    exterior instead.
    """
    n = u.n
    if not 0 < mu < n:
        raise InvalidKernel(f"need 0 < mu < n, got mu={mu}")
    tgt = u if target is None else target
    if tgt.n != n:
        raise InvalidRange("target dimension mismatch")
    x = tgt.coords()
    act = tgt.active
    xa = x[act]
    r = np.linalg.norm(xa, axis=1)
    bad = r == 0
    inv = np.zeros_like(xa)
    inv[~bad] = xa[~bad] / (r[~bad] ** 2)[:, None]
    vals, ok = sample(u, inv)
    ok &= ~bad
    if not trim and not np.all(ok):
        raise OutOfDomain(f"{int(np.count_nonzero(~ok))} target node(s) invert outside the source field")
    v = np.zeros(len(xa))
    v[ok] = r[ok] ** (mu - n) * vals[ok]
    out = np.zeros(tgt.dims)
    out[act] = v
    mask = np.array(tgt.mask)
    if trim:
        m_act = mask[act]
        m_act[~ok] = EXTERIOR
        mask[act] = m_act
        if not np.any(mask != EXTERIOR):
            raise OutOfDomain("no target node inverts inside the source field")
    return GridField(tgt.dims, tgt.h, tgt.origin, out, mask)


# ---------------------------------------------------------------- planes and reflections

@dataclass(frozen=True)
class Plane:
    """Hyperplane {x : x.normal = offset}; Sigma is the side x.normal >= offset."""

    normal: tuple
    offset: float = 0.0

    def __post_init__(self):
        nv = np.asarray(self.normal, dtype=float)
        nrm = np.linalg.norm(nv)
        if not nrm > 0:
            raise InvalidRange("plane normal must be nonzero")
        object.__setattr__(self, "normal", tuple(float(c) for c in nv / nrm))
        object.__setattr__(self, "offset", float(self.offset) / nrm)

    def reflect(self, x):
        nv = np.asarray(self.normal)
        d = x @ nv - self.offset
        return x - 2.0 * d[..., None] * nv

    def side(self, x):
        return np.asarray(x) @ np.asarray(self.normal) - self.offset


def _as_plane(plane, n):
    if isinstance(plane, Plane):
        if len(plane.normal) != n:
            raise InvalidRange("plane dimension mismatch")
        return plane
    normal, offset = plane
    return Plane(tuple(normal), offset)


def _reflected_pairs(u: GridField, plane: Plane, strict_side=False):
    x = u.coords()[u.active]
    s = plane.side(x)
    tol = 1e-12 * u.h
    keep = s > tol if strict_side else s >= -tol
    xs = x[keep]
    vr, ok = sample(u, plane.reflect(xs))
    vs = u.values[u.active][keep]
    return xs[ok], vs[ok], vr[ok]


def symmetry_defect(u: GridField, plane) -> float:
    """sup |u(x) - u(x^pi)| over active x on the Sigma side whose mirror image is interpolable."""
    p = _as_plane(plane, u.n)
    xs, v, vr = _reflected_pairs(u, p)
    if len(xs) == 0:
        raise OutOfDomain("reflected overlap is empty")
    return float(np.max(np.abs(v - vr)))


def moving_plane_sweep(u: GridField, direction, lambdas):
    """Defect and measure of Sigma_lambda^- = {x in Sigma_lambda : u(x) >= u_lambda(x)} per lambda.

    Nodes on the plane itself are left out of the measure (they always tie).
    Planes with an empty overlap are reported with NaN entries.
    """
    rows = []
    for lam in lambdas:
        p = Plane(tuple(direction), lam)
        xs, v, vr = _reflected_pairs(u, p, strict_side=True)
        if len(xs) == 0:
            rows.append({"lambda": float(lam), "defect": math.nan, "minus_measure": math.nan, "nodes": 0})
            continue
        rows.append({
            "lambda": float(lam),
            "defect": float(np.max(np.abs(v - vr))),
            "minus_measure": float(np.count_nonzero(v >= vr)) * u.h ** u.n,
            "nodes": int(len(xs)),
        })
    return rows


def _lattice_plane_index(u: GridField, axis, lam):
    """Plane x_axis = lam as twice the node index; must be a node or a midpoint."""
    p2 = 2.0 * (lam - u.origin[axis]) / u.h
    if abs(p2 - round(p2)) > 1e-9:
        raise InvalidRange("plane must pass through grid nodes or midpoints")
    p2 = int(round(p2))
    if not 0 <= p2 <= 2 * (u.dims[axis] - 1):
        raise OutOfDomain("plane lies outside the grid")
    return p2


def reflection_difference_check(u: GridField, lam, tau, kernel: RieszKernelSpec, h,
                                weighted=False, alpha=None, axis=0, diagnostics=None):
    """Max |LHS - RHS| of the reflection identity across the plane x_axis = lam.

    LHS = u_lam(x) - u(x) and
    RHS = H(x^lam) - H(x) - sum_{y in Sigma_lam} (w(x-y) - w(x^lam-y)) (g_lam(y) - g(y)) h^n
    with g = u^tau (unweighted) or |y|^-alpha u^tau (weighted). H is the field ``h``
    itself; for the Kelvin-transformed problem pass ``h`` as the constant c and
    H(x) = c|x|^(mu-n) is built here. The identity holds for any fixed point of the
    discrete map, so the residual is set by the solver tolerance.
    """
    _check_kernel(u, kernel)
    n, mu = kernel.n, kernel.mu
    if weighted:
        alpha = alpha_weight(n, mu, tau) if alpha is None else alpha
        if isinstance(h, GridField):
            raise InvalidRange("weighted form takes the constant h")
        r = u.radii()
        act = u.active
        if np.any(act & (r == 0)):
            raise OutOfDomain("weighted form needs the origin outside the active set")
        H = np.zeros(u.dims)
        H[act] = float(h) * r[act] ** (mu - n)
        wgt = _source_weight(u, alpha)
    else:
        H = h.values if isinstance(h, GridField) else np.full(u.dims, float(h))
        wgt = _source_weight(u, None)

    p2 = _lattice_plane_index(u, axis, lam)
    d = u.dims[axis]
    lo, hi = min(0, p2 - (d - 1)), max(d - 1, p2)
    L = hi - lo + 1

    def embed(arr, fill):
        shape = list(u.dims)
        shape[axis] = L
        out = np.full(shape, fill, dtype=float)
        sl = [slice(None)] * u.n
        sl[axis] = slice(-lo, -lo + d)
        out[tuple(sl)] = arr
        return out

    act = embed(u.active.astype(float), 0.0) > 0
    U = embed(u.values, np.nan)
    Hx = embed(H, np.nan)
    G = np.zeros(U.shape)
    G[act] = U[act] ** tau
    G *= embed(wgt, 0.0)

    idx = np.arange(lo, hi + 1)            # original node index along axis
    mirror = p2 - idx                       # index of the mirror node
    pos = mirror - lo
    valid = (pos >= 0) & (pos < L)
    take = np.clip(pos, 0, L - 1)

    def refl(arr, fill):
        out = np.take(arr, take, axis=axis)
        shp = [1] * u.n
        shp[axis] = L
        return np.where(valid.reshape(shp), out, fill)

    sigma = (2 * idx >= p2).reshape([L if ax == axis else 1 for ax in range(u.n)])
    G_l = refl(G, 0.0)
    D = np.where(sigma, G_l - G, 0.0)
    S = fftconvolve(D, kernel.weights(D.shape, u.h), mode="same")
    S_l = refl(S, np.nan)
    U_l = refl(U, np.nan)
    H_l = refl(Hx, np.nan)
    both = sigma & act & (refl(act.astype(float), 0.0) > 0)
    lhs = U_l - U
    rhs = H_l - Hx - (S - S_l)
    if not np.any(both):
        raise OutOfDomain("no active node pairs across the plane")
    diff = np.abs(lhs - rhs)[both]
    res = float(np.max(diff))
    if diagnostics is not None:
        diagnostics.update(pairs=int(np.count_nonzero(both)), lhs_max=float(np.max(np.abs(lhs[both]))),
                           rhs_max=float(np.max(np.abs(rhs[both]))))
    return res


# ---------------------------------------------------------------- exponent bookkeeping

@dataclass(frozen=True)
class HLSExponents:
    n: int
    mu: float
    tau: float
    beta: float
    beta_sup: float
    beta_threshold: float
    nu: float
    alpha: float
    p: Optional[float]
    q: Optional[float]
    feasible: dict = field(default_factory=dict)

    def to_dict(self):
        return {"schema": 1, "n": self.n, "mu": self.mu, "tau": self.tau, "beta": self.beta,
                "beta_sup": self.beta_sup, "beta_threshold": self.beta_threshold, "nu": self.nu,
                "alpha": self.alpha, "p": self.p, "q": self.q, "feasible": dict(self.feasible)}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def hls_exponents(n, mu, tau, q=None) -> HLSExponents:
    """Integrability exponent beta, HLS pair (p, q), Kelvin weight alpha and feasibility flags.

    q is a free parameter: the HLS relation 1/p + nu/n = 1 + 1/q fixes p from
    it, but nothing ties q to beta, so no default is assumed.
    """
    if int(n) != n or n < 1 or not 0 < mu < n:
        raise InvalidKernel(f"need integer n >= 1 and 0 < mu < n, got n={n}, mu={mu}")
    if not tau < 0:
        raise InvalidKernel("tau must be negative")
    beta = (tau - 1.0) / ((n - mu) / n * tau - 1.0)
    beta_sup = n / (n - mu)
    thr = 2.0 * n / (n - mu)
    nu = n - mu
    alpha = alpha_weight(n, mu, tau)
    beta = float(beta)
    feas = {"beta_gt_1": bool(beta > 1), "beta_condition": bool(beta > thr), "alpha_positive": bool(alpha > 0)}
    p = None
    if q is not None:
        if not q > 1:
            raise InvalidRange("q must exceed 1")
        inv_p = 1.0 / q + mu / n
        p = 1.0 / inv_p if inv_p < 1 else None
        feas["hls_pair"] = bool(p is not None and q > n / (n - mu))
        if p is not None:
            # Stein-Weiss with |y|^-alpha on the source side needs alpha < n/p'
            feas["stein_weiss_alpha"] = bool(alpha < n * (1.0 - 1.0 / p))
    return HLSExponents(int(n), float(mu), float(tau), beta, beta_sup, thr, nu, alpha,
                        p, None if q is None else float(q), feas)
