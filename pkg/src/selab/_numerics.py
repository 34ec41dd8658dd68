"""Small numerical helpers shared by several modules."""

import math

import numpy as np
from scipy.integrate import simpson


def ball_volume(n):
    """Volume of the unit ball in R^n."""
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def sphere_area(n):
    """Surface area of the unit sphere S^{n-1} (equals n * ball_volume(n))."""
    return n * ball_volume(n)


def fd_weights(x0, x, m):
    """Fornberg weights for the m-th derivative at x0 from stencil points x."""
    x = np.asarray(x, dtype=float)
    npts = len(x)
    c = np.zeros((npts, m + 1))
    c1 = 1.0
    c4 = x[0] - x0
    c[0, 0] = 1.0
    for i in range(1, npts):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def derivative(x, y, order=1, width=5):
    """Derivative of sampled data on an arbitrary increasing grid.

    Uses a sliding ``width``-point stencil (centred where possible), so the
    result is accurate to O(h^(width-order)).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    npts = len(x)
    if npts < width:
        raise ValueError("need at least %d samples" % width)
    half = width // 2
    out = np.empty(npts)
    for i in range(npts):
        lo = min(max(i - half, 0), npts - width)
        idx = slice(lo, lo + width)
        out[i] = fd_weights(x[i], x[idx], order) @ y[idx]
    return out


def graded_nodes(R, num=4001, grading=2.0, r0=0.0):
    """Nodes r = r0 + (R - r0) s**grading, s uniform on [0, 1].

    Returns the nodes and the Jacobian dr/ds so that
    ``simpson(g(r) * jac, x=s)`` integrates g over [r0, R]. Grading
    clusters nodes at r0, which tames integrable power singularities there.
    """
    if num % 2 == 0:
        num += 1
    s = np.linspace(0.0, 1.0, num)
    r = r0 + (R - r0) * s**grading
    jac = (R - r0) * grading * s ** (grading - 1.0)
    return s, r, jac


def radial_integral(g, R, n, num=4001, grading=2.0, r0=0.0):
    """Integral over the ball B_R (or annulus r0<|x|<R) of a radial function.

    ``g`` is called with an array of radii. Composite Simpson in the graded
    variable; the angular factor is the exact sphere area.
    """
    s, r, jac = graded_nodes(R, num, grading, r0)
    vals = np.zeros_like(r)
    mask = jac > 0
    vals[mask] = g(r[mask]) * r[mask] ** (n - 1) * jac[mask]
    return sphere_area(n) * simpson(vals, x=s)
