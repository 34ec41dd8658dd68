"""Numerical witnesses for the a-priori estimates satisfied by positive solutions.

Every audit takes a radial solution (a closed form or a sampled profile) and
returns an ``AuditReport``. Margins are oriented so that a nonnegative margin
means the estimate holds.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from . import _numerics as num
from .core import ClosedFormSolution, RadialProfile
from .errors import (
    EmptySublevelSet,
    HypothesisViolated,
    InvalidCutoff,
    InvalidRange,
    NonpositiveField,
    OutOfDomain,
    SingularExponent,
)


def _clean(x):
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


@dataclass(frozen=True)
class AuditReport:
    check: str
    params: dict
    empirical: float
    bound: float
    margin: float
    tol: float = 1e-9
    notes: str = ""
    passed: bool = field(init=False)

    def __post_init__(self):
        m = self.margin
        object.__setattr__(self, "passed", bool(m >= -self.tol))

    def to_dict(self):
        return _clean({
            "check": self.check,
            "params": self.params,
            "empirical": self.empirical,
            "bound": self.bound,
            "margin": self.margin,
            "pass": self.passed,
            "tol": self.tol,
            "notes": self.notes,
        })

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def reports_to_json(reports):
    return json.dumps([r.to_dict() for r in reports], sort_keys=True, indent=1)


# ---------------------------------------------------------------- cutoffs

@dataclass(frozen=True)
class CutoffSpec:
    """Radial cutoff about ``center`` * e1.

    ``smooth``: (1 - S(t))**2 with S the quintic smoothstep, t = (s - Ri)/(Ro - Ri);
    equal to 1 on B_Ri and 0 outside B_Ro, C^2, and |grad| / xi stays bounded.
    ``log``: 2 - log s / log Ri between Ri and Ro = Ri**2 (only Lipschitz).
    """

    R_inner: float
    R_outer: float
    kind: str = "smooth"
    center: float = 0.0

    def __post_init__(self):
        if not 0 < self.R_inner < self.R_outer:
            raise InvalidRange("need 0 < R_inner < R_outer")
        if self.kind not in ("smooth", "log"):
            raise InvalidCutoff("cutoff kind must be smooth or log")
        if self.kind == "log" and (self.R_inner <= 1 or
                                   abs(self.R_outer - self.R_inner**2) > 1e-12 * self.R_outer):
            raise InvalidCutoff("log cutoff needs R_inner > 1 and R_outer = R_inner**2")

    @property
    def is_c2(self):
        return self.kind == "smooth"

    def profile(self, s):
        """xi, xi', xi'' as functions of the distance s from the centre."""
        s = np.asarray(s, dtype=float)
        Ri, Ro = self.R_inner, self.R_outer
        if self.kind == "log":
            L = math.log(Ri)
            inside = (s > Ri) & (s < Ro)
            ss = np.where(inside, s, 1.0)
            xi = np.where(s <= Ri, 1.0, np.where(s >= Ro, 0.0, 2.0 - np.log(ss) / L))
            d1 = np.where(inside, -1.0 / (ss * L), 0.0)
            d2 = np.where(inside, 1.0 / (ss**2 * L), 0.0)
            return xi, d1, d2
        w = Ro - Ri
        t = np.clip((s - Ri) / w, 0.0, 1.0)
        S = t**3 * (10 - 15 * t + 6 * t**2)
        S1 = 30 * t**2 * (1 - t) ** 2 / w
        S2 = 60 * t * (1 - t) * (1 - 2 * t) / w**2
        xi = (1 - S) ** 2
        d1 = -2 * (1 - S) * S1
        d2 = 2 * S1**2 - 2 * (1 - S) * S2
        return xi, d1, d2

    def laplacian(self, s, n):
        s = np.asarray(s, dtype=float)
        _, d1, d2 = self.profile(s)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(s > 0, d2 + (n - 1) * d1 / np.where(s > 0, s, 1.0), n * d2)

    def bound_check(self, n, num_samples=20001):
        """Whether |grad xi| <= 4/(Ro-Ri) and |Δxi| <= 100/(Ro-Ri)^2 hold on a fine sample."""
        s = np.linspace(self.R_inner, self.R_outer, num_samples)
        _, d1, _ = self.profile(s)
        w = self.R_outer - self.R_inner
        return {
            "grad": bool(np.max(np.abs(d1)) <= 4 / w),
            "laplacian": bool(np.max(np.abs(self.laplacian(s, n))) <= 100 / w**2),
        }


# ---------------------------------------------------------------- radial access

class _Radial:
    """Uniform access to value and derivatives of a radial solution."""

    def __init__(self, u, n=None, tau=None):
        if isinstance(u, RadialProfile):
            self.kind = "profile"
            self.r_min, self.r_max = float(u.r[0]), float(u.r[-1])
            self._d2 = CubicSpline(u.r, u.du).derivative()
        elif isinstance(u, ClosedFormSolution):
            if not u.is_radial:
                raise ValueError("audits need a radially symmetric closed form")
            self.kind = "closed"
            self.r_min, self.r_max = 0.0, np.inf
        else:
            raise TypeError("expected a RadialProfile or ClosedFormSolution")
        self.u = u
        self.n = u.n if n is None else n
        self.tau = u.tau if tau is None else tau
        self.singular = isinstance(u, ClosedFormSolution) and u.kind == "singular_power"

    def require(self, R):
        if R > self.r_max * (1 + 1e-12):
            raise OutOfDomain("radius %g exceeds the sampled range %g" % (R, self.r_max))

    def value(self, r):
        return np.asarray(self.u.radial_value(r), dtype=float)

    def deriv(self, r):
        return np.asarray(self.u.radial_deriv(r), dtype=float)

    def second(self, r):
        if self.kind == "profile":
            return self._d2(np.asarray(r, dtype=float))
        return self.u.radial_second(r)

    def samples(self, R, r0=0.0, num_samples=4001):
        """Radii in [r0, R]: the profile's own samples, or a graded grid for closed forms."""
        self.require(R)
        if self.kind == "profile":
            r = self.u.r
            r = r[(r >= r0) & (r < R)]
            return np.unique(np.concatenate([[max(r0, self.r_min)], r, [R]]))
        s = np.linspace(0.0, 1.0, num_samples)
        r = r0 + (R - r0) * s**2
        if self.singular and r0 == 0:
            r = r[1:]
        return r

    def positive(self, r):
        v = self.value(r)
        if np.any(v <= 0):
            raise NonpositiveField("u is not positive on the audited set")
        return v

    def integral(self, g, R, r0=0.0, num_nodes=4001):
        """Ball/annulus integral of g(r, u, u') with graded Simpson quadrature."""
        self.require(R)

        def h(r):
            return g(r, self.value(r), self.deriv(r))

        with np.errstate(divide="ignore", invalid="ignore"):
            return num.radial_integral(h, R, self.n, num=num_nodes, r0=r0)


# ---------------------------------------------------------------- audits

def gradient_estimate_audit(u, R_list, n=None, tau=None, max_constant=1e8, tol=1e-12):
    """Empirical C(R) = sup_{B_R} max(0, |grad u|^2 - u^{1+tau}) / u^2.

    The estimate asserts only that C(R) is finite; the report passes when
    every C(R) is below ``max_constant``. For tau = -1 the special form
    |grad u|^2 <= C u^2 + 1 is checked with C = C(R_max).
    """
    ru = _Radial(u, n, tau)
    tau = ru.tau
    Cs = []
    for R in sorted(R_list):
        r = ru.samples(R)
        v = ru.positive(r)
        g2 = ru.deriv(r) ** 2
        Cs.append(float(np.max(np.maximum(0.0, g2 - v ** (1 + tau)) / v**2)))
    params = {"n": ru.n, "tau": tau, "R": sorted(R_list), "C_by_R": Cs,
              "nonincreasing": bool(np.all(np.diff(Cs) <= 1e-12)),
              "nondecreasing": bool(np.all(np.diff(Cs) >= -1e-12))}
    emp = max(Cs)
    if not math.isfinite(emp):
        margin = -np.inf
    else:
        margin = max_constant - emp
    if tau == -1:
        r = ru.samples(max(R_list))
        v = ru.value(r)
        slack = emp * v**2 + 1 - ru.deriv(r) ** 2
        params["tau_minus_one_slack"] = float(np.min(slack))
        margin = min(margin, float(np.min(slack)))
    return AuditReport("gradient", params, emp, max_constant, margin, tol,
                       "C(R) is empirical; the estimate only asserts finiteness")


def harnack_bound_audit(u, cutoff: CutoffSpec, n=None, tau=None, num_s=801, num_theta=181, tol=1e-9):
    """sup_{B_Ri(c)} |grad w|^2 against max(4n sup A(phi, F'), 2 sup F), w = log u.

    F = u^{tau-1}, F' = (tau - 1) F and
    A = 4n |grad phi|^2/phi - 2 phi F' - phi (Δphi - 2|grad phi|^2/phi).
    The cutoff ball may sit off the origin (centre c e1); by axial symmetry
    the suprema are taken over a half-disc in the (e1, e2) plane.
    """
    if not cutoff.is_c2:
        raise InvalidCutoff("the Harnack argument needs a C^2 cutoff")
    ru = _Radial(u, n, tau)
    n, tau = ru.n, ru.tau
    s = np.linspace(0.0, cutoff.R_outer, num_s)
    th = np.linspace(0.0, np.pi, num_theta)
    S, TH = np.meshgrid(s, th, indexing="ij")
    x1 = cutoff.center + S * np.cos(TH)
    x2 = S * np.sin(TH)
    r = np.hypot(x1, x2)
    ru.require(float(np.max(r)))
    if np.any(r == 0) and ru.singular:
        raise OutOfDomain("cutoff ball contains the singular point; move the centre")
    v = ru.positive(r)
    gw2 = (ru.deriv(r) / v) ** 2
    F = v ** (tau - 1.0)
    Fp = (tau - 1.0) * F
    phi, d1, _ = cutoff.profile(S)
    lap = cutoff.laplacian(S, n)
    support = S < cutoff.R_outer
    with np.errstate(divide="ignore", invalid="ignore"):
        g_over = np.where(phi > 0, d1**2 / np.where(phi > 0, phi, 1.0), 0.0)
    A = (4 * n + 2) * g_over - 2 * phi * Fp - phi * lap
    inner = S <= cutoff.R_inner
    lhs = float(np.max(gw2[inner]))
    bound = max(4 * n * float(np.max(A[support])), 2 * float(np.max(F[support])))
    params = {"n": n, "tau": tau, "R_inner": cutoff.R_inner, "R_outer": cutoff.R_outer,
              "center": cutoff.center, "sup_A": float(np.max(A[support])),
              "sup_F": float(np.max(F[support]))}
    return AuditReport("harnack", params, lhs, bound, bound - lhs, tol * max(1.0, bound))


def moment_integral(n, p, R):
    """Integral of |x|^{2/p} over B_R: n w_n p R^{n+2/p} / (n p + 2)."""
    return num.sphere_area(n) * p * R ** (n + 2.0 / p) / (n * p + 2.0)


def printed_moment_constant(n, p, R):
    """Reference moment constant p w_n/(2 + p(n-1)) R^{n+2/p}; disagrees with quadrature."""
    return p * num.ball_volume(n) / (2.0 + p * (n - 1)) * R ** (n + 2.0 / p)


def l1_ratios(u, R_list, n=None, tau=None, num_nodes=4001):
    ru = _Radial(u, n, tau)
    e = ru.n + 2.0 / (1.0 - ru.tau)
    return np.array([ru.integral(lambda r, v, dv: v, R, num_nodes=num_nodes) / R**e for R in R_list])


def l1_lower_bound_audit(u, R_list, n=None, tau=None, num_nodes=4001, tol=1e-12):
    """rho(R) = int_{B_R} u / R^{n+2/(1-tau)}; the estimate says inf rho > 0."""
    ru = _Radial(u, n, tau)
    R_list = sorted(R_list)
    for R in R_list:
        ru.require(R)
    rho = l1_ratios(u, R_list, n, tau, num_nodes)
    p = 1.0 - ru.tau
    Rm = R_list[-1]
    params = {"n": ru.n, "tau": ru.tau, "R": R_list, "rho": rho.tolist(),
              "moment_reference": moment_integral(ru.n, p, Rm),
              "moment_printed": printed_moment_constant(ru.n, p, Rm)}
    if len(rho) >= 2:
        params["last_doubling_drift"] = float(abs(rho[-1] / rho[-2] - 1.0))
        params["spread"] = float(np.ptp(rho) / np.mean(np.abs(rho)))
    emp = float(np.min(rho))
    return AuditReport("l1", params, emp, 0.0, emp, tol,
                       "margin is inf rho(R); reference moment uses n*w_n*p/(n*p+2)")


def growth_bound_audit(u, r_max=None, n=None, tau=None, drift=0.10, tol=1e-12):
    """sup u/(r^2+1) and sup |u'|/(r+1) on [0, r_max] versus [0, r_max/2]."""
    ru = _Radial(u, n, tau)
    if r_max is None:
        if not math.isfinite(ru.r_max):
            raise InvalidRange("closed forms need an explicit r_max")
        r_max = ru.r_max
    r = ru.samples(r_max)
    v = ru.positive(r)
    if np.any(v < 1.0 - 1e-14):
        raise HypothesisViolated("the growth estimate assumes u >= 1")
    a = v / (r**2 + 1)
    b = np.abs(ru.deriv(r)) / (r + 1)
    half = r <= 0.5 * r_max
    Cu, Cu2 = float(np.max(a)), float(np.max(a[half]))
    Cg, Cg2 = float(np.max(b)), float(np.max(b[half]))
    rel_u = abs(Cu / Cu2 - 1.0)
    rel_g = abs(Cg / Cg2 - 1.0) if Cg2 > 0 else (0.0 if Cg == 0 else np.inf)
    emp = max(rel_u, rel_g)
    params = {"n": ru.n, "tau": ru.tau, "r_max": r_max, "C_u": Cu, "C_u_half": Cu2,
              "C_grad": Cg, "C_grad_half": Cg2}
    return AuditReport("growth", params, emp, drift, drift - emp, tol,
                       "empirical is the larger relative drift of the two constants")


def _sublevel_radius(ru, k):
    if ru.singular:
        return (k / ru.u.amplitude) ** (1.0 / ru.u.beta)
    lo = ru.r_min
    u0 = float(ru.value(lo))
    if k < u0:
        raise EmptySublevelSet("k is below min u")
    if k == u0:
        raise EmptySublevelSet("sublevel set {u <= k} has empty interior")
    hi = ru.r_max
    if not math.isfinite(hi):
        hi = 1.0
        while ru.value(hi) < k:
            hi *= 2.0
    elif ru.value(hi) < k:
        raise OutOfDomain("u stays below k on the sampled range")
    return brentq(lambda r: float(ru.value(r)) - k, lo, hi, xtol=1e-15 * hi, rtol=1e-15)


def pohozaev_terms(u, k, tau=None, n=None, num_nodes=4001):
    """All integrals entering the energy and Pohozaev identities on {u <= k}."""
    ru = _Radial(u, n, tau)
    n, tau = ru.n, ru.tau
    if tau == -1:
        raise SingularExponent("G(u) involves 1/(1+tau)")
    if ru.singular and k <= 0:
        raise EmptySublevelSet("k must be positive")
    rho = _sublevel_radius(ru, k)
    grad2 = ru.integral(lambda r, v, dv: dv**2, rho, num_nodes=num_nodes)
    power = ru.integral(lambda r, v, dv: v ** (1 + tau), rho, num_nodes=num_nodes)
    area = num.sphere_area(n) * rho ** (n - 1)
    vol = num.ball_volume(n) * rho**n
    du = float(ru.deriv(rho))
    G = (k ** (1 + tau) * vol - power) / (1 + tau)
    return {
        "rho": rho, "grad2": grad2, "power": power, "G": G, "volume": vol,
        "bdry_energy": area * k * du,  # int u d_nu u
        "bdry_pohozaev": area * rho * du**2,  # int (x.nu) (d_nu u)^2
        "n": n, "tau": tau, "k": k,
    }


def pohozaev_audit(u, k, tau=None, n=None, num_nodes=4001, identity_tol=1e-6, tol=1e-12):
    """Energy and Pohozaev identities on the sublevel ball {u <= k}.

    Multiplying Δu = u^tau by u gives  int_bdry u u_nu - int |grad u|^2 = int u^{1+tau};
    multiplying by x.grad u gives  (n-2)/2 int |grad u|^2 - n int G + 1/2 int_bdry (x.nu) u_nu^2 = 0.
    Eliminating the gradient term,
        [n/(1+tau) - (n-2)/2] int u^{1+tau} - n k^{1+tau} |Omega|/(1+tau)
            = -(n-2)/2 int_bdry u u_nu - 1/2 int_bdry (x.nu) u_nu^2 < 0.
    The report also carries the combination with the opposite sign on the
    energy identity, [(n-2)/2 + n/(1+tau)] int u^{1+tau} - n k^{1+tau}|Omega|/(1+tau),
    kept as ``combination_printed`` for comparison.
    """
    t = pohozaev_terms(u, k, tau, n, num_nodes)
    n, tau = t["n"], t["tau"]
    e_scale = abs(t["bdry_energy"]) + t["grad2"] + abs(t["power"])
    res_e = (t["bdry_energy"] - t["grad2"] - t["power"]) / e_scale
    res_e_printed = (t["grad2"] - t["bdry_energy"] - t["power"]) / e_scale
    p_scale = abs((n - 2) / 2 * t["grad2"]) + abs(n * t["G"]) + 0.5 * t["bdry_pohozaev"]
    res_p = ((n - 2) / 2 * t["grad2"] - n * t["G"] + 0.5 * t["bdry_pohozaev"]) / p_scale
    kterm = n * k ** (1 + tau) * t["volume"] / (1 + tau)
    comb = (n / (1 + tau) - (n - 2) / 2) * t["power"] - kterm
    comb_printed = ((n - 2) / 2 + n / (1 + tau)) * t["power"] - kterm
    c_scale = abs(n / (1 + tau) - (n - 2) / 2) * abs(t["power"]) + abs(kterm)
    emp = max(abs(res_e), abs(res_p))
    margin = min(identity_tol - emp, -comb / c_scale)
    params = dict(t)
    params.update({
        "energy_residual": res_e, "energy_residual_printed_sign": res_e_printed,
        "pohozaev_residual": res_p, "combination": comb,
        "combination_boundary": -(n - 2) / 2 * t["bdry_energy"] - 0.5 * t["bdry_pohozaev"],
        "combination_printed": comb_printed,
        "liouville_coefficient": (n - 2) / 2 + n / (1 + tau),
    })
    notes = ("margin = min(identity tolerance - max relative residual, -combination/scale); "
             "energy identity used with boundary term minus gradient term")
    return AuditReport("pohozaev", params, emp, identity_tol, margin, tol, notes)


def caccioppoli_audit(u, sigma, R, rho, n=None, tau=None, num_nodes=4001, tol=1e-9):
    """sigma int_{B_rho} u^{sigma-1}|grad u|^2 + int_{B_rho} u^{sigma+tau}
    <= C / ((1+sigma)(R-rho)^2) int_{B_R minus B_rho} u^{1+sigma}.

    Testing the equation with xi u^sigma (xi the smooth cutoff, 1 on B_rho,
    0 off B_R) gives the inequality with C = (R-rho)^2 sup |Δxi|. sigma = 0
    is the limit form int u^tau <= C (R-rho)^{-2} int_T u.
    """
    if not (R > rho > 0) or sigma < 0:
        raise InvalidRange("need R > rho > 0 and sigma >= 0")
    ru = _Radial(u, n, tau)
    n, tau = ru.n, ru.tau
    cut = CutoffSpec(rho, R)
    s = np.linspace(rho, R, 20001)
    C = (R - rho) ** 2 * float(np.max(np.abs(cut.laplacian(s, n))))
    lhs = ru.integral(lambda r, v, dv: sigma * v ** (sigma - 1) * dv**2 + v ** (sigma + tau),
                      rho, num_nodes=num_nodes)
    ring = ru.integral(lambda r, v, dv: v ** (1 + sigma), R, r0=rho, num_nodes=num_nodes)
    rhs = C / ((1 + sigma) * (R - rho) ** 2) * ring
    emp = lhs * (1 + sigma) * (R - rho) ** 2 / ring
    params = {"n": n, "tau": tau, "sigma": sigma, "R": R, "rho": rho, "lhs": lhs, "rhs": rhs}
    return AuditReport("caccioppoli", params, emp, C, C - emp, tol * C,
                       "left side over B_rho; C = (R-rho)^2 sup|Δxi| for the smooth cutoff")


def sup_bound_constant(u, q, theta, R, n=None, tau=None, num_nodes=4001):
    ru = _Radial(u, n, tau)
    r = ru.samples(theta * R)
    sup = float(np.max(ru.positive(r)))
    Iq = ru.integral(lambda r, v, dv: v**q, R, num_nodes=num_nodes)
    return float(sup * ((1 - theta) * R) ** (ru.n / q) / Iq ** (1.0 / q))


def sup_bound_audit(u, q, theta, R, n=None, tau=None, max_constant=1e8, num_nodes=4001, tol=1e-12):
    """Empirical C = sup_{B_thetaR} u ((1-theta)R)^{n/q} / (int_{B_R} u^q)^{1/q}.

    ``R`` may be a list; the report then carries C for each R and the drift
    across consecutive radii.
    """
    if not 0 < theta < 1 or not q > 0:
        raise InvalidRange("need 0 < theta < 1 and q > 0")
    Rs = sorted(np.atleast_1d(R).tolist())
    Cs = [sup_bound_constant(u, q, theta, Ri, n, tau, num_nodes) for Ri in Rs]
    ru = _Radial(u, n, tau)
    params = {"n": ru.n, "tau": ru.tau, "q": q, "theta": theta, "R": Rs, "C_by_R": Cs}
    if len(Cs) > 1:
        params["max_drift"] = float(np.max(np.abs(np.array(Cs[1:]) / np.array(Cs[:-1]) - 1)))
    emp = max(Cs)
    return AuditReport("sup_bound", params, emp, max_constant, max_constant - emp, tol,
                       "the estimate asserts a finite C(q, n); empirical values only")


def finite_index_growth_audit(profile, tau=None, n=None, r_max=None, drift=0.10, tol=1e-12):
    """Constants in |Du| <= C |x|^{e_g} and u <= C (1 + |x|^{e_u}).

    e_g = -(tau+1)/(1-tau) and e_u = -2 tau/(1-tau). The singular solution
    grows like |x|^{2/(1-tau)}, so its gradient exponent is (1+tau)/(1-tau);
    the two gradient exponents agree only at tau = -1 (both 0), where the
    singular solution saturates both bounds.
    """
    ru = _Radial(profile, n, tau)
    tau = ru.tau
    if r_max is None:
        if not math.isfinite(ru.r_max):
            raise InvalidRange("closed forms need an explicit r_max")
        r_max = ru.r_max
    r = ru.samples(r_max)
    r = r[r > 0]
    e_g = -(tau + 1) / (1 - tau)
    e_u = -2 * tau / (1 - tau)
    v = ru.positive(r)
    cg = np.abs(ru.deriv(r)) / r**e_g
    cu = v / (1 + r**e_u)
    half = r <= 0.5 * r_max
    Cg, Cg2 = float(np.max(cg)), float(np.max(cg[half]))
    Cu, Cu2 = float(np.max(cu)), float(np.max(cu[half]))
    rel = max(abs(Cg / Cg2 - 1) if Cg2 > 0 else 0.0, abs(Cu / Cu2 - 1))
    params = {"n": ru.n, "tau": tau, "r_max": r_max, "exp_grad": e_g, "exp_u": e_u,
              "singular_grad_exp": (1 + tau) / (1 - tau), "singular_u_exp": 2 / (1 - tau),
              "C_grad": Cg, "C_grad_half": Cg2, "C_u": Cu, "C_u_half": Cu2}
    return AuditReport("finite_index_growth", params, rel, drift, drift - rel, tol,
                       "empirical is the larger relative drift between r_max/2 and r_max")


CHECKS = {
    "gradient": gradient_estimate_audit,
    "harnack": harnack_bound_audit,
    "l1": l1_lower_bound_audit,
    "growth": growth_bound_audit,
    "pohozaev": pohozaev_audit,
    "caccioppoli": caccioppoli_audit,
    "sup_bound": sup_bound_audit,
    "finite_index": finite_index_growth_audit,
}
