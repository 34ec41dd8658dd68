"""Second variation E(phi) = int |grad phi|^2 + f'(u) phi^2 around a positive solution.

Radial bases are handled mode by mode: spherical harmonics of degree l add
l(l+n-2)/r^2 to the potential and reduce the operator to a symmetric
tridiagonal finite-volume matrix on cells between staggered faces.
"""

import json
import math
import os
from dataclasses import dataclass, field
from math import comb
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.integrate import simpson
from scipy.linalg import eigh_tridiagonal
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from . import _numerics as num
from .core import Annulus, Ball, ClosedFormSolution, GridField, ProblemSpec, RadialProfile
from .errors import (
    EigenBudgetExceeded,
    InvalidRange,
    NonOscillatory,
    NonpositiveField,
    OutOfDomain,
    UnsupportedExponent,
)


def harmonic_multiplicity(ell, n):
    """Dimension of degree-l spherical harmonics on S^{n-1}."""
    if n == 1:
        return 1 if ell in (0, 1) else 0
    return comb(ell + n - 1, n - 1) - (comb(ell + n - 3, n - 1) if ell >= 2 else 0)


@dataclass(frozen=True, eq=False)
class LinearizedOperator:
    """Discrete -Δ + V with homogeneous Dirichlet data.

    Radial kind: ``diag``/``off`` hold the symmetric matrix M^{-1/2} K M^{-1/2}
    (K the finite-volume stiffness plus potential, M the cell masses) and
    ``index_diag``/``index_off`` the same K scaled by the r^{-2}-weighted
    masses, which has the same inertia but O(1) eigenvalues near the
    inverse-square threshold. Grid kind: ``matrix`` is the sparse operator.
    """

    kind: str
    n: int
    tau: float
    R: float
    r0: float = 0.0
    ell: int = 0
    nodes: Optional[np.ndarray] = None
    potential: Optional[np.ndarray] = None
    diag: Optional[np.ndarray] = None
    off: Optional[np.ndarray] = None
    index_diag: Optional[np.ndarray] = None
    index_off: Optional[np.ndarray] = None
    matrix: Optional[sp.spmatrix] = None
    meta: dict = field(default_factory=dict)

    @property
    def size(self):
        return len(self.diag) if self.kind == "radial" else self.matrix.shape[0]

    def dense(self):
        if self.kind == "radial":
            return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)
        return self.matrix.toarray()

    def norm_estimate(self, weighted=False):
        if self.kind == "radial":
            d, o = (self.index_diag, self.index_off) if weighted else (self.diag, self.off)
            rows = np.abs(d).copy()
            rows[:-1] += np.abs(o)
            rows[1:] += np.abs(o)
            return float(np.max(rows))
        return float(abs(self.matrix).sum(axis=1).max())

    def asymmetry(self):
        if self.kind == "radial":
            return 0.0  # stored as a symmetric tridiagonal pair
        d = self.matrix - self.matrix.T
        return float(abs(d).max()) if d.nnz else 0.0

    def shifted(self, c):
        """Operator with potential V + c (exact spectral shift)."""
        if self.kind == "radial":
            m = self.meta["mass"]
            return LinearizedOperator("radial", self.n, self.tau, self.R, self.r0, self.ell,
                                      self.nodes, self.potential + c, self.diag + c, self.off,
                                      self.index_diag + c * m / self.meta["index_mass"],
                                      self.index_off, None, dict(self.meta))
        I = sp.identity(self.matrix.shape[0], format="csr")
        return LinearizedOperator("grid", self.n, self.tau, self.R, matrix=(self.matrix + c * I).tocsr(),
                                  meta=dict(self.meta))


def radial_operator(V, n, R, r0=0.0, N=2000, ell=0, faces="auto", inner_dirichlet=None, tau=0.0):
    """Finite-volume -u'' - (n-1)u'/r + (V + l(l+n-2)/r^2) u on (r0, R), u(R) = 0.

    Nodes sit at cell midpoints, so the inverse-square singularity at r = 0
    is never sampled. The inner end is Dirichlet for annuli (r0 > 0, or
    ``inner_dirichlet``) and free for balls, where the face weight r^{n-1}
    vanishes. ``faces`` is "uniform", "geometric" (needs r0 > 0) or "auto".
    """
    if not R > r0 >= 0:
        raise InvalidRange("need 0 <= r0 < R")
    if faces == "auto":
        faces = "geometric" if r0 > 0 else "uniform"
    if faces == "geometric":
        if r0 <= 0:
            raise InvalidRange("geometric faces need r0 > 0")
        f = np.geomspace(r0, R, N + 1)
    else:
        f = np.linspace(r0, R, N + 1)
    if inner_dirichlet is None:
        inner_dirichlet = r0 > 0 or n == 1
    r = 0.5 * (f[1:] + f[:-1])
    h = np.diff(f)
    s = f ** (n - 1)
    w = r ** (n - 1)
    mass = w * h
    cond = s[1:-1] / np.diff(r)
    K = np.zeros(N)
    K[:-1] += cond
    K[1:] += cond
    K[-1] += s[-1] / (f[-1] - r[-1])
    if inner_dirichlet:
        K[0] += s[0] / (r[0] - f[0])
    Vr = np.asarray(V(r), dtype=float) * np.ones_like(r) + ell * (ell + n - 2) / r**2
    K = K + mass * Vr
    off = -cond
    imass = mass / r**2
    meta = {"N": N, "faces": faces, "mass": mass, "index_mass": imass,
            "inner_dirichlet": bool(inner_dirichlet)}
    return LinearizedOperator(
        "radial", n, tau, R, r0, ell, r, Vr,
        K / mass, off / np.sqrt(mass[:-1] * mass[1:]),
        K / imass, off / np.sqrt(imass[:-1] * imass[1:]),
        None, meta)


def _potential_fn(u, spec):
    if isinstance(u, (ClosedFormSolution, RadialProfile)):
        def V(r):
            v = np.asarray(u.radial_value(r), dtype=float)
            if np.any(v <= 0):
                raise NonpositiveField("base solution must be positive")
            return spec.fprime_eval(v)
        return V
    raise TypeError("radial operators need a closed form or a radial profile")


def assemble_linearized(u, spec: ProblemSpec, domain=None, ell=0, N=2000, faces="auto"):
    """Linearisation -Δ + f'(u) of Δu = f(u) about ``u`` with Dirichlet data.

    ``u`` is a radial closed form / profile (``domain`` a Ball or Annulus,
    reduced to angular mode ``ell``) or a GridField (full grid operator on
    its interior nodes).
    """
    if isinstance(u, GridField):
        from .elliptic import _System

        vals = u.values
        if np.any(vals[u.active] <= 0):
            raise NonpositiveField("base field must be positive")
        sysm = _System(u)
        pot = spec.fprime_eval(vals.ravel()[sysm.inner])
        A = (sysm.A + sp.diags(pot)).tocsr()
        A = 0.5 * (A + A.T)
        R = float(np.max(u.radii()[u.active]))
        return LinearizedOperator("grid", u.n, spec.tau, R, matrix=A.tocsr(),
                                  meta={"dims": list(u.dims), "h": u.h, "unknowns": int(A.shape[0])})
    domain = spec.domain if domain is None else domain
    if isinstance(domain, Ball):
        r0, R = 0.0, domain.R
    elif isinstance(domain, Annulus):
        r0, R = domain.r0, domain.R
    else:
        raise InvalidRange("radial operators need a ball or annulus")
    if isinstance(u, RadialProfile) and R > u.r_max * (1 + 1e-12):
        raise OutOfDomain("profile does not cover the domain")
    return radial_operator(_potential_fn(u, spec), spec.n, R, r0, N, ell, faces,
                           inner_dirichlet=r0 > 0, tau=spec.tau)


def _seed():
    return int(os.environ.get("SELAB_SEED", "0"))


def _check_residual(A_apply, vals, vecs, norm):
    tol = max(1e-8, 100 * np.finfo(float).eps * norm)
    for lam, v in zip(vals, vecs.T):
        res = np.linalg.norm(A_apply(v) - lam * v)
        if res > tol * np.linalg.norm(v):
            raise EigenBudgetExceeded("eigenpair residual %.3g above %.3g" % (res, tol))


def lowest_eigenvalues(op: LinearizedOperator, k=1, weighted=False, maxiter=None):
    """The k smallest eigenvalues (ascending), residual-checked.

    ``weighted`` selects the r^{-2}-weighted pencil of a radial operator.
    """
    if not 1 <= k <= op.size:
        raise InvalidRange("k must be between 1 and the operator size")
    if op.kind == "radial":
        d, o = (op.index_diag, op.index_off) if weighted else (op.diag, op.off)
        vals, vecs = eigh_tridiagonal(d, o, select="i", select_range=(0, k - 1))

        def apply(v):
            out = d * v
            out[:-1] += o * v[1:]
            out[1:] += o * v[:-1]
            return out

        _check_residual(apply, vals, vecs, op.norm_estimate(weighted))
        return vals
    A = op.matrix
    norm = op.norm_estimate()
    if k >= A.shape[0] - 1:
        vals = np.linalg.eigvalsh(A.toarray())[:k]
        return vals
    d = A.diagonal()
    radius = np.asarray(abs(A).sum(axis=1)).ravel() - np.abs(d)
    shift = float(np.min(d - radius)) - 1e-3 * max(norm, 1.0)
    rng = np.random.default_rng(_seed())
    v0 = rng.standard_normal(A.shape[0])
    try:
        vals, vecs = eigsh(A.tocsc(), k=k, sigma=shift, which="LM", v0=v0, maxiter=maxiter, tol=0)
    except ArpackNoConvergence as exc:
        raise EigenBudgetExceeded(str(exc)) from exc
    order = np.argsort(vals)
    vals, vecs = vals[order], vecs[:, order]
    _check_residual(lambda v: A @ v, vals, vecs, norm)
    return vals


def _negatives(op, tol_rel):
    """Eigenvalues of the weighted pencil below -tol (all of them) and the tol used."""
    norm = op.norm_estimate(weighted=True)
    tol = tol_rel * norm
    vals = eigh_tridiagonal(op.index_diag, op.index_off, eigvals_only=True,
                            select="v", select_range=(-2 * norm - 1.0, -tol))
    return np.sort(vals), tol


@dataclass(frozen=True)
class SpectrumReport:
    R: float
    eigenvalues: list
    morse_index: int
    tol_neg: float
    modes: list
    grid: dict
    r0: float = 0.0

    def __post_init__(self):
        ev = list(self.eigenvalues)
        if ev != sorted(ev):
            raise ValueError("eigenvalues must be ascending")

    def to_dict(self):
        return {"R": self.R, "r0": self.r0, "eigenvalues": [float(x) for x in self.eigenvalues],
                "morse_index": int(self.morse_index), "tol_neg": self.tol_neg,
                "modes": self.modes, "grid": self.grid}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def auto_modes(u, spec, R, r0=0.0, N=2000):
    """Modes 0..L where l(l+n-2) >= sup r^2 max(0, -V): higher modes are nonnegative."""
    V = _potential_fn(u, spec)
    r = np.linspace(r0, R, N + 1)[1:] if r0 == 0 else np.geomspace(r0, R, N + 1)
    r = r[r > 0]
    worst = float(np.max(r**2 * np.maximum(0.0, -V(r))))
    L = 0
    while L * (L + spec.n - 2) < worst:
        L += 1
    return list(range(L + 1))


def morse_index(u, spec: ProblemSpec, R=None, modes=None, r0=0.0, N=2000, tol_rel=1e-9, k_report=4):
    """Number of negative eigenvalues (with harmonic multiplicity) on B_R or the annulus (r0, R).

    For radial bases each mode is counted on the r^{-2}-weighted pencil
    (Sylvester: same inertia as the operator); ``eigenvalues`` lists the
    lowest L^2 eigenvalues of every mode. Grid bases count negative
    eigenvalues of the full sparse operator.
    """
    if isinstance(u, GridField):
        op = assemble_linearized(u, spec)
        tol = tol_rel * op.norm_estimate()
        k = min(8, op.size)
        while True:
            vals = lowest_eigenvalues(op, k)
            if vals[-1] >= -tol or k == op.size:
                break
            k = min(2 * k, op.size)
        idx = int(np.sum(vals < -tol))
        return SpectrumReport(op.R, sorted(vals.tolist()), idx, tol, [{"grid": True}], op.meta)
    if R is None:
        raise InvalidRange("radial bases need an outer radius R")
    domain = Annulus(r0, R) if r0 > 0 else Ball(R)
    if modes is None:
        modes = auto_modes(u, spec, R, r0, N)
    total = 0
    evs = []
    info = []
    tol_used = 0.0
    for ell in modes:
        op = assemble_linearized(u, spec, domain, ell=ell, N=N)
        neg, tol = _negatives(op, tol_rel)
        tol_used = max(tol_used, tol)
        mult = harmonic_multiplicity(ell, spec.n)
        low = lowest_eigenvalues(op, min(k_report, op.size))
        evs.extend(low.tolist())
        info.append({"ell": ell, "multiplicity": mult, "negative": int(len(neg)),
                     "lowest": float(low[0]), "index_eigenvalues": neg.tolist()})
        total += mult * len(neg)
    grid = {"N": N, "faces": "geometric" if r0 > 0 else "uniform"}
    return SpectrumReport(float(R), sorted(evs), int(total), tol_used, info, grid, float(r0))


# ---------------------------------------------------------------- Euler test functions

@dataclass(frozen=True)
class TestFunction:
    a: float
    b: float
    Q: float
    Q_identity: float
    hypothesis: bool
    mu: float
    r0: float

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        inside = (r >= self.a) & (r <= self.b)
        val = np.sin(math.sqrt(self.mu) * np.log(np.where(inside, r, self.a) / self.r0))
        return np.where(inside, val, 0.0)


def euler_test_functions(mu, profile, p, count, r0=1.0, n=None, num_nodes=4001):
    """h_i = sin(sqrt(mu) log(r/r0)) between consecutive zeros, and Q(h_i).

    Q(h) = int |grad h|^2 - p u^{-p-1} h^2 over the annulus support (radial
    quadrature in log r). ``hypothesis`` records whether p u^{-p-1} >= 2 mu/r^2
    on the support; ``Q_identity`` is int (mu/r^2 - p u^{-p-1}) h^2, which
    equals Q in two dimensions.
    """
    from .radial import euler_ode_zeros

    if not mu > 0:
        raise NonOscillatory("mu must be positive")
    if not p > 0:
        raise UnsupportedExponent("p = -tau must be positive")
    n = profile.n if n is None else n
    zeros = np.concatenate([[r0], euler_ode_zeros(mu, r0, count)])
    sq = math.sqrt(mu)
    area = num.sphere_area(n)
    out = []
    for a, b in zip(zeros[:-1], zeros[1:]):
        if isinstance(profile, RadialProfile) and (b > profile.r_max * (1 + 1e-12) or a < profile.r[0]):
            raise OutOfDomain("profile does not cover [%g, %g]" % (a, b))
        t = np.linspace(math.log(a), math.log(b), num_nodes)
        r = np.exp(t)
        arg = sq * np.log(r / r0)
        h = np.sin(arg)
        dh = sq * np.cos(arg) / r
        u = np.asarray(profile.radial_value(r), dtype=float)
        if np.any(u <= 0):
            raise NonpositiveField("profile must be positive")
        W = p * u ** (-p - 1.0)
        jac = r**n  # r^{n-1} dr = r^n dt
        Q = area * simpson((dh**2 - W * h**2) * jac, x=t)
        Qi = area * simpson((mu / r**2 - W) * h**2 * jac, x=t)
        hyp = bool(np.all(W * r**2 >= 2 * mu * (1 - 1e-12)))
        out.append(TestFunction(float(a), float(b), float(Q), float(Qi), hyp, float(mu), float(r0)))
    return out


# ---------------------------------------------------------------- scalar oracles

def hardy_stability_check(n, tau):
    """(p beta (beta+n-2), (n-2)^2/4, stable) for the singular solution."""
    if n < 2:
        raise InvalidRange("needs n >= 2")
    if tau >= 0:
        raise UnsupportedExponent("needs tau < 0")
    p = -tau
    beta = 2.0 / (1.0 + p)
    lhs = p * beta * (beta + n - 2)
    rhs = (n - 2) ** 2 / 4.0
    return lhs, rhs, bool(lhs <= rhs)


def log_cutoff_capacity(R, n=2, num_nodes=4001):
    """int over B_{R^2} minus B_R of |grad xi|^2, xi = 2 - log|x|/log R (2 pi / log R when n = 2)."""
    if not R > 1:
        raise InvalidRange("needs R > 1")
    L = math.log(R)
    return num.radial_integral(lambda r: 1.0 / (r * L) ** 2, R * R, n, num=num_nodes, grading=1.0, r0=R)
