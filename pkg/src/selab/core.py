"""Problem records, closed-form solution families, residuals and scalar thresholds.

Everything here concerns the equation  Δu = f(u)  with the model source
f(u) = u**tau, tau <= 0, on a ball, box or annulus in R^n.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline

from . import _numerics as num
from .errors import (
    InvalidCoefficients,
    InvalidRange,
    NonpositiveField,
    OutOfDomain,
    SingularExponent,
    UnsupportedDimension,
    UnsupportedExponent,
)

INTERIOR, BOUNDARY, EXTERIOR = 0, 1, 2


# ---------------------------------------------------------------- domains

@dataclass(frozen=True)
class Ball:
    R: float

    def __post_init__(self):
        if not self.R > 0:
            raise InvalidRange("ball radius must be positive")


@dataclass(frozen=True)
class Annulus:
    r0: float
    R: float

    def __post_init__(self):
        if not (0 <= self.r0 < self.R):
            raise InvalidRange("annulus needs 0 <= r0 < R")


@dataclass(frozen=True)
class Box:
    corner: tuple
    lengths: tuple

    def __post_init__(self):
        if len(self.corner) != len(self.lengths):
            raise InvalidRange("corner and lengths must have equal length")
        if any(not L > 0 for L in self.lengths):
            raise InvalidRange("box lengths must be positive")


Domain = Union[Ball, Annulus, Box]


# ---------------------------------------------------------------- problem

@dataclass(frozen=True)
class ProblemSpec:
    """Single configuration record for  Δu = f(u)  in a domain.

    ``source`` is ``"power"`` (f = u**tau), ``"unit"`` (f = 1) or
    ``"custom"`` (``f``/``fprime`` callables; ``c0`` is the stated lower
    bound for s**(tau/(tau-1)) f(s)**(1/(1-tau))).
    """

    n: int
    tau: float
    source: str = "power"
    domain: Optional[Domain] = None
    boundary: Union[float, Callable, None] = None
    f: Optional[Callable] = None
    fprime: Optional[Callable] = None
    c0: Optional[float] = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise UnsupportedDimension("dimension must be a positive integer")
        if self.tau > 0:
            raise UnsupportedExponent("only tau <= 0 is supported")
        if self.source not in ("power", "unit", "custom"):
            raise ValueError("unknown source %r" % self.source)
        if self.source == "custom" and self.f is None:
            raise ValueError("custom source needs f")
        if isinstance(self.boundary, (int, float)) and not self.boundary > 0:
            raise InvalidRange("boundary values must be positive")
        if isinstance(self.domain, Box) and len(self.domain.corner) != self.n:
            raise InvalidRange("box dimension does not match n")

    def f_eval(self, u):
        u = np.asarray(u, dtype=float)
        if self.source == "unit":
            return np.ones_like(u)
        if self.source == "custom":
            return np.asarray(self.f(u), dtype=float)
        return u**self.tau

    def fprime_eval(self, u):
        u = np.asarray(u, dtype=float)
        if self.source == "unit":
            return np.zeros_like(u)
        if self.source == "custom":
            if self.fprime is None:
                raise ValueError("custom source has no derivative")
            return np.asarray(self.fprime(u), dtype=float)
        return self.tau * u ** (self.tau - 1.0)

    def primitive(self, u):
        """Antiderivative F with F' = f, as used by the energy functional."""
        u = np.asarray(u, dtype=float)
        if self.source == "unit":
            return u.copy()
        if self.source == "custom":
            raise ValueError("custom sources have no built-in primitive")
        if self.tau == -1:
            raise SingularExponent("1/(1+tau) is undefined at tau = -1")
        return u ** (1.0 + self.tau) / (1.0 + self.tau)

    def boundary_values(self, x):
        """Boundary data at points ``x`` (shape (m, n))."""
        if self.boundary is None:
            raise ValueError("problem has no boundary data")
        if callable(self.boundary):
            return np.asarray(self.boundary(x), dtype=float)
        return np.full(len(x), float(self.boundary))


# ---------------------------------------------------------------- closed forms

@dataclass(frozen=True)
class ClosedFormSolution:
    """Analytic solution families.

    * ``singular_power``: A |x - c|**beta with beta = 2/(1 - tau)
    * ``quadratic``: a0 + sum_j a_j (x_j - c_j)**2 (solves Δu = 1)
    * ``custom``: radial u(|x|) given by callables
    """

    kind: str
    n: int
    tau: float
    amplitude: float = 1.0
    beta: float = 0.0
    a0: float = 0.0
    coeffs: tuple = ()
    center: Optional[tuple] = None
    value_fn: Optional[Callable] = field(default=None, compare=False)
    deriv_fn: Optional[Callable] = field(default=None, compare=False)
    second_fn: Optional[Callable] = field(default=None, compare=False)

    @property
    def centre(self):
        if self.center is None:
            return np.zeros(self.n)
        return np.asarray(self.center, dtype=float)

    @property
    def is_radial(self):
        if np.any(self.centre != 0):
            return False
        if self.kind == "quadratic":
            return len(set(self.coeffs)) == 1
        return True

    # --- radial evaluation (about the centre)
    def radial_value(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "singular_power":
            return self.amplitude * r**self.beta
        if self.kind == "quadratic":
            self._require_radial()
            return self.a0 + self.coeffs[0] * r**2
        return np.asarray(self.value_fn(r), dtype=float) * np.ones_like(r)

    def radial_deriv(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "singular_power":
            with np.errstate(divide="ignore"):
                return self.amplitude * self.beta * r ** (self.beta - 1.0)
        if self.kind == "quadratic":
            self._require_radial()
            return 2.0 * self.coeffs[0] * r
        return np.asarray(self.deriv_fn(r), dtype=float) * np.ones_like(r)

    def radial_second(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "singular_power":
            b = self.beta
            with np.errstate(divide="ignore"):
                return self.amplitude * b * (b - 1.0) * r ** (b - 2.0)
        if self.kind == "quadratic":
            self._require_radial()
            return np.full_like(r, 2.0 * self.coeffs[0])
        if self.second_fn is None:
            raise ValueError("custom closed form has no second derivative")
        return np.asarray(self.second_fn(r), dtype=float) * np.ones_like(r)

    def radial_laplacian(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "singular_power":
            b = self.beta
            return self.amplitude * b * (b + self.n - 2) * r ** (b - 2.0)
        if self.kind == "quadratic":
            return np.full_like(r, 2.0 * sum(self.coeffs))
        return self.radial_second(r) + (self.n - 1) * self.radial_deriv(r) / r

    def _require_radial(self):
        if not self.is_radial:
            raise ValueError("this closed form is not radially symmetric about 0")

    # --- Cartesian evaluation
    def value(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float)) - self.centre
        if self.kind == "quadratic":
            return self.a0 + (x**2) @ np.asarray(self.coeffs, dtype=float)
        return self.radial_value(np.linalg.norm(x, axis=-1))

    def gradient(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float)) - self.centre
        if self.kind == "quadratic":
            return 2.0 * x * np.asarray(self.coeffs, dtype=float)
        r = np.linalg.norm(x, axis=-1)
        return (self.radial_deriv(r) / r)[:, None] * x

    def laplacian(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float)) - self.centre
        if self.kind == "quadratic":
            return np.full(len(x), 2.0 * sum(self.coeffs))
        return self.radial_laplacian(np.linalg.norm(x, axis=-1))


def singular_solution(n, tau):
    """The scale-invariant solution A|x|**beta of Δu = u**tau.

    beta = 2/(1 - tau) and A is fixed by A**(1 - tau) * beta*(beta + n - 2) = 1,
    which is what substituting the power into the equation demands.
    """
    if tau > 0:
        raise UnsupportedExponent("the power solution needs tau <= 0")
    if n < 1:
        raise UnsupportedDimension("n must be >= 1")
    beta = 2.0 / (1.0 - tau)
    k = beta * (beta + n - 2)
    if k <= 0:
        raise UnsupportedDimension(
            "no positive power solution for n=%d, tau=%g (beta*(beta+n-2) <= 0)" % (n, tau))
    amp = k ** (-1.0 / (1.0 - tau))
    return ClosedFormSolution("singular_power", n, float(tau), amplitude=amp, beta=beta)


def printed_singular_amplitude(n, tau):
    """Reference amplitude [(1-tau)^2/(2(n+1)-2(n-1)tau)]^(1/(1-tau)).

    It fails the substitution check (it is the true amplitude for dimension
    n+1) and is kept only so reports can show the gap.
    """
    return ((1.0 - tau) ** 2 / (2.0 * (n + 1) - 2.0 * (n - 1) * tau)) ** (1.0 / (1.0 - tau))


def singular_constant_report(pairs, radii=(0.1, 1.0, 10.0)):
    """Compare the substituted and the printed amplitude at each (n, tau).

    The residual oracle is direct substitution of A r**beta into
    u'' + (n-1)u'/r - u**tau, with derivatives written out by hand (it does
    not reuse ``ClosedFormSolution.radial_laplacian``).
    """
    rows = []
    r = np.asarray(radii, dtype=float)
    for n, tau in pairs:
        beta = 2.0 / (1.0 - tau)

        def resid(A):
            upp = A * beta * (beta - 1) * r ** (beta - 2)
            up = A * beta * r ** (beta - 1)
            u = A * r**beta
            return np.max(np.abs(upp + (n - 1) * up / r - u**tau) / u**tau)

        sol = singular_solution(n, tau)
        printed = printed_singular_amplitude(n, tau)
        rows.append({
            "n": n,
            "tau": tau,
            "beta": beta,
            "A": sol.amplitude,
            "A_printed": printed,
            "residual": float(resid(sol.amplitude)),
            "residual_printed": float(resid(printed)),
        })
    return rows


def quadratic_solution(a0, a_vec, center=None, tol=1e-12):
    """a0 + sum_j a_j x_j**2 with a0 > 0, a_j >= 0, 2 sum a_j = 1 (Δu = 1)."""
    a = tuple(float(x) for x in a_vec)
    if not a0 > 0:
        raise InvalidCoefficients("a0 must be positive")
    if any(x < 0 for x in a):
        raise InvalidCoefficients("coefficients must be nonnegative")
    if abs(2.0 * sum(a) - 1.0) > tol:
        raise InvalidCoefficients("2*sum(a) = %g, must equal 1" % (2.0 * sum(a)))
    return ClosedFormSolution("quadratic", len(a), 0.0, a0=float(a0), coeffs=a,
                              center=None if center is None else tuple(center))


def constant_solution(c, n, tau=0.0):
    """u = c as a radial closed form (not a solution; used as an audit input)."""
    c = float(c)
    return ClosedFormSolution(
        "custom", n, tau,
        value_fn=lambda r: np.full_like(np.asarray(r, dtype=float), c),
        deriv_fn=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
        second_fn=lambda r: np.zeros_like(np.asarray(r, dtype=float)),
    )


# ---------------------------------------------------------------- radial profile

@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Sampled radial solution u(r) with derivative du(r)."""

    n: int
    tau: float
    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    a: Optional[float] = None

    def __post_init__(self):
        r = np.array(self.r, dtype=float)
        u = np.array(self.u, dtype=float)
        du = np.array(self.du, dtype=float)
        if not (r.shape == u.shape == du.shape) or r.ndim != 1:
            raise ValueError("r, u, du must be 1-D arrays of equal length")
        if np.any(np.diff(r) <= 0) or r[0] < 0:
            raise ValueError("r must be strictly increasing and nonnegative")
        if np.any(u <= 0):
            raise NonpositiveField("profile values must be positive")
        for name, arr in (("r", r), ("u", u), ("du", du)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if self.a is None and r[0] == 0:
            object.__setattr__(self, "a", float(u[0]))

    @property
    def r_max(self):
        return float(self.r[-1])

    def _splines(self):
        sp = self.__dict__.get("_sp")
        if sp is None:
            sp = (CubicHermiteSpline(self.r, self.u, self.du), CubicSpline(self.r, self.du))
            object.__setattr__(self, "_sp", sp)
        return sp

    def _check(self, r):
        r = np.asarray(r, dtype=float)
        span = self.r[-1] - self.r[0]
        if np.any(r < self.r[0] - 1e-12 * span) or np.any(r > self.r[-1] + 1e-12 * span):
            raise OutOfDomain("radius outside the sampled range [%g, %g]" % (self.r[0], self.r[-1]))
        return np.clip(r, self.r[0], self.r[-1])

    def radial_value(self, r):
        return self._splines()[0](self._check(r))

    def radial_deriv(self, r):
        return self._splines()[1](self._check(r))

    def drop_origin(self):
        keep = self.r > 0
        return RadialProfile(self.n, self.tau, self.r[keep], self.u[keep], self.du[keep], self.a)

    def to_csv(self, path=None):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "u", "du"])
        for row in zip(self.r, self.u, self.du):
            w.writerow(["%.17g" % v for v in row])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, source, n, tau):
        if "\n" in str(source):
            text = str(source)
        else:
            with open(source) as fh:
                text = fh.read()
        rows = list(csv.reader(io.StringIO(text)))
        if [c.strip() for c in rows[0]] != ["r", "u", "du"]:
            raise ValueError("expected header r,u,du")
        data = np.array([[float(v) for v in row] for row in rows[1:] if row], dtype=float)
        return cls(n, tau, data[:, 0], data[:, 1], data[:, 2])


# ---------------------------------------------------------------- grid field

@dataclass(frozen=True, eq=False)
class GridField:
    """Scalar field on a uniform tensor grid with an interior/boundary/exterior mask."""

    dims: tuple
    h: float
    origin: tuple
    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        vals = np.array(self.values, dtype=float).reshape(dims)
        mask = np.array(self.mask, dtype=np.int8).reshape(dims)
        if not self.h > 0:
            raise InvalidRange("grid spacing must be positive")
        if len(self.origin) != len(dims):
            raise InvalidRange("origin dimension mismatch")
        if not np.all(np.isin(mask, (INTERIOR, BOUNDARY, EXTERIOR))):
            raise ValueError("mask codes must be 0, 1 or 2")
        vals.setflags(write=False)
        mask.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "origin", tuple(float(o) for o in self.origin))
        object.__setattr__(self, "h", float(self.h))
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "mask", mask)

    @property
    def n(self):
        return len(self.dims)

    @property
    def interior(self):
        return self.mask == INTERIOR

    @property
    def boundary(self):
        return self.mask == BOUNDARY

    @property
    def active(self):
        return self.mask != EXTERIOR

    def axes(self):
        return [self.origin[i] + self.h * np.arange(d) for i, d in enumerate(self.dims)]

    def coords(self):
        """Node positions, shape dims + (n,)."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def radii(self):
        return np.linalg.norm(self.coords(), axis=-1)

    def with_values(self, values):
        return GridField(self.dims, self.h, self.origin, values, self.mask)

    def to_dict(self):
        return {
            "dims": list(self.dims),
            "h": self.h,
            "origin": list(self.origin),
            "values": [float(v) for v in self.values.ravel()],
            "mask": [int(m) for m in self.mask.ravel()],
        }

    def to_json(self, path=None):
        text = json.dumps(self.to_dict())
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["dims"]), d["h"], tuple(d["origin"]), d["values"], d["mask"])

    @classmethod
    def from_json(cls, source):
        if str(source).lstrip().startswith("{"):
            return cls.from_dict(json.loads(source))
        with open(source) as fh:
            return cls.from_dict(json.load(fh))


def make_grid(domain, n, points, boundary=1.0, fill=None):
    """Discretise a domain on a uniform grid and load Dirichlet data.

    ``points`` is the node count along the first axis (box) or across the
    diameter (ball/annulus, forced odd so the centre is a node). Ball and
    annulus boundaries are the inside nodes that lack a full stencil, with
    the data evaluated at those nodes.
    """
    if isinstance(domain, Box):
        h = domain.lengths[0] / (points - 1)
        dims = []
        for L in domain.lengths:
            m = L / h
            if abs(m - round(m)) > 1e-9 * max(1.0, m):
                raise InvalidRange("box lengths must be integer multiples of one spacing")
            dims.append(int(round(m)) + 1)
        origin = tuple(domain.corner)
        mask = np.full(dims, INTERIOR, dtype=np.int8)
        for ax in range(n):
            sl = [slice(None)] * n
            sl[ax] = 0
            mask[tuple(sl)] = BOUNDARY
            sl[ax] = -1
            mask[tuple(sl)] = BOUNDARY
    else:
        if points % 2 == 0:
            points += 1
        R = domain.R
        r0 = domain.r0 if isinstance(domain, Annulus) else 0.0
        h = 2.0 * R / (points - 1)
        dims = [points] * n
        origin = (-R,) * n
        axes = [origin[0] + h * np.arange(points)] * n
        rr = np.linalg.norm(np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1), axis=-1)
        eps = 1e-12 * R
        inside = (rr <= R + eps) & (rr >= r0 - eps)
        full = inside.copy()
        padded = np.pad(inside, 1, constant_values=False)
        for ax in range(n):
            for shift in (-1, 1):
                full &= np.roll(padded, shift, axis=ax)[tuple([slice(1, -1)] * n)]
        mask = np.full(dims, EXTERIOR, dtype=np.int8)
        mask[inside] = BOUNDARY
        mask[full] = INTERIOR
    tmpl = GridField(tuple(dims), h, origin, np.ones(dims), mask)
    x = tmpl.coords()
    vals = np.empty(dims)
    bnd = mask == BOUNDARY
    if callable(boundary):
        vals[bnd] = np.asarray(boundary(x[bnd]), dtype=float)
    else:
        vals[bnd] = float(boundary)
    if np.any(vals[bnd] <= 0):
        raise NonpositiveField("boundary data must be positive")
    vals[~bnd] = float(np.max(vals[bnd])) if fill is None else fill
    return tmpl.with_values(vals)


def grid_for(spec, points, fill=None):
    """Grid and boundary data for a ``ProblemSpec`` with a domain."""
    if spec.domain is None:
        raise ValueError("problem has no domain")
    bnd = spec.boundary if callable(spec.boundary) else float(spec.boundary)
    return make_grid(spec.domain, spec.n, points, boundary=bnd, fill=fill)


# ---------------------------------------------------------------- residuals

def _source_for(solution, spec):
    if spec is not None:
        return spec.f_eval
    if isinstance(solution, ClosedFormSolution) and solution.kind == "quadratic":
        return lambda u: np.ones_like(np.asarray(u, dtype=float))
    tau = solution.tau
    return lambda u: np.asarray(u, dtype=float) ** tau


def pde_residual(solution, spec=None, points=None):
    """Pointwise Δu - f(u).

    * ClosedFormSolution: analytic, at ``points`` (radii for radial kinds,
      (m, n) positions for quadratics).
    * RadialProfile: u'' + (n-1)u'/r - f(u) at the samples, u'' from a
      fourth-order difference of du; the r = 0 sample uses the limit n u''(0).
    * GridField: discrete Laplacian minus f at interior nodes (0 elsewhere).
    """
    f = _source_for(solution, spec)
    if isinstance(solution, ClosedFormSolution):
        if points is None:
            raise ValueError("closed forms need evaluation points")
        pts = np.asarray(points, dtype=float)
        if solution.kind == "quadratic" and pts.ndim == 2:
            u = solution.value(pts)
            lap = solution.laplacian(pts)
        else:
            u = solution.radial_value(pts)
            lap = solution.radial_laplacian(pts)
        if np.any(u <= 0):
            raise NonpositiveField("closed form is not positive at the requested points")
        return lap - f(u)
    if isinstance(solution, RadialProfile):
        r, u, du = solution.r, solution.u, solution.du
        upp = num.derivative(r, du)
        with np.errstate(divide="ignore", invalid="ignore"):
            first = np.where(r > 0, (solution.n - 1) * du / np.where(r > 0, r, 1.0),
                             (solution.n - 1) * upp)
        return upp + first - f(u)
    if isinstance(solution, GridField):
        from .elliptic import discrete_laplacian

        vals = solution.values
        if np.any(vals[solution.active] <= 0):
            raise NonpositiveField("grid field has nonpositive values")
        lap = discrete_laplacian(solution).values
        res = np.zeros(solution.dims)
        inner = solution.interior
        res[inner] = lap[inner] - f(vals[inner])
        return solution.with_values(res)
    raise TypeError("unsupported solution type %r" % type(solution).__name__)


# ---------------------------------------------------------------- scaling

def rescale_blowup(u, x0, lam, tau):
    """v(x) = lam**(-2/(1-tau)) * u(x0 + lam*x).

    Exact for every representation: closed forms get new parameters, radial
    profiles get rescaled samples (x0 must be the origin), grid fields get a
    new origin and spacing with scaled values.
    """
    if not lam > 0:
        raise InvalidRange("lambda must be positive")
    beta = 2.0 / (1.0 - tau)
    s = lam ** (-beta)
    if isinstance(u, ClosedFormSolution):
        x0 = np.zeros(u.n) if x0 is None else np.broadcast_to(np.asarray(x0, dtype=float), (u.n,))
        centre = tuple((u.centre - x0) / lam)
        if np.all(np.asarray(centre) == 0):
            centre = None
        if u.kind == "singular_power":
            return ClosedFormSolution("singular_power", u.n, u.tau, amplitude=u.amplitude * s * lam**u.beta,
                                      beta=u.beta, center=centre)
        if u.kind == "quadratic":
            return ClosedFormSolution("quadratic", u.n, u.tau, a0=u.a0 * s,
                                      coeffs=tuple(c * s * lam**2 for c in u.coeffs), center=centre)
        if np.any(x0 != 0):
            raise OutOfDomain("custom closed forms can only be rescaled about their centre")
        vf, df, sf = u.value_fn, u.deriv_fn, u.second_fn
        return ClosedFormSolution(
            "custom", u.n, u.tau,
            value_fn=lambda r: s * vf(lam * np.asarray(r)),
            deriv_fn=lambda r: s * lam * df(lam * np.asarray(r)),
            second_fn=None if sf is None else (lambda r: s * lam**2 * sf(lam * np.asarray(r))),
        )
    if isinstance(u, RadialProfile):
        if x0 is not None and np.any(np.asarray(x0) != 0):
            raise OutOfDomain("radial profiles can only be rescaled about the origin")
        a = None if u.a is None else u.a * s
        return RadialProfile(u.n, u.tau, u.r / lam, u.u * s, u.du * s * lam, a)
    if isinstance(u, GridField):
        x0 = np.zeros(u.n) if x0 is None else np.broadcast_to(np.asarray(x0, dtype=float), (u.n,))
        lo = np.asarray(u.origin)
        hi = lo + u.h * (np.asarray(u.dims) - 1)
        if np.any(x0 < lo) or np.any(x0 > hi):
            raise OutOfDomain("x0 lies outside the grid")
        origin = tuple((lo - x0) / lam)
        return GridField(u.dims, u.h / lam, origin, u.values * s, u.mask)
    raise TypeError("unsupported type %r" % type(u).__name__)


def dimensionless_moment(u, R, p, tau, num_nodes=4001):
    """R**(-n - 2p/(1-tau)) * integral of u**p over B_R, for a radial u."""
    n = u.n
    integral = num.radial_integral(lambda r: u.radial_value(r) ** p, R, n, num=num_nodes)
    return R ** (-n - 2.0 * p / (1.0 - tau)) * integral


# ---------------------------------------------------------------- thresholds

def _exact(x):
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def liouville_coefficient(n, tau):
    """Return ((n-2)/2 + n/(1+tau), tau_star) with tau_star = -1 - 2n/(n-2).

    Integer or Fraction input gives exact rational output. On tau < -1 the
    coefficient is >= 0 exactly when tau <= tau_star.
    """
    if n <= 2:
        raise UnsupportedDimension("needs n > 2")
    if tau == -1:
        raise SingularExponent("1 + tau = 0")
    if _exact(tau):
        t = Fraction(tau)
        return Fraction(n - 2, 2) + Fraction(n) / (1 + t), Fraction(-1) - Fraction(2 * n, n - 2)
    return (n - 2) / 2.0 + n / (1.0 + tau), -1.0 - 2.0 * n / (n - 2.0)


def stability_threshold_dim(tau):
    """n*(tau) = 2 + 4/(1 - tau) * (-tau + sqrt(tau**2 - tau))."""
    if tau >= 0:
        raise UnsupportedExponent("needs tau < 0")
    return 2.0 + 4.0 / (1.0 - tau) * (-tau + math.sqrt(tau * tau - tau))
