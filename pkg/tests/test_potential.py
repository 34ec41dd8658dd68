import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selab.core import Ball, Box, GridField, make_grid
from selab.errors import (
    BudgetExceeded,
    InvalidKernel,
    InvalidRange,
    NonpositiveField,
    NoPositiveSolution,
    OutOfDomain,
)
from selab.potential import (
    IntegralOptions,
    Plane,
    RieszKernelSpec,
    alpha_weight,
    fixed_point_map,
    fixed_point_residual,
    hls_exponents,
    kelvin_transform,
    moving_plane_sweep,
    reflection_difference_check,
    riesz_apply,
    riesz_matrix,
    sample,
    solve_integral_equation,
    symmetry_defect,
)


def _box(n=2, pts=21, L=1.0):
    return make_grid(Box((-L,) * n, (2 * L,) * n), n, pts)


def _free(g, vals):
    """Field with every node active (the integral sees the whole grid)."""
    return GridField(g.dims, g.h, g.origin, np.asarray(vals, dtype=float), np.zeros(g.dims, np.int8))


def test_kernel_validation():
    with pytest.raises(InvalidKernel):
        RieszKernelSpec(2, 2.0)
    with pytest.raises(InvalidKernel):
        RieszKernelSpec(2, 1.0, quadrature="gauss")
    with pytest.raises(InvalidKernel):
        RieszKernelSpec(2, 1.0).weights((5,), 0.1)


def test_one_dimensional_oracle():
    # int_{-1}^{1} |x - y|^(mu - 1) dy = ((1 + x)^mu + (1 - x)^mu) / mu, cell-centred nodes
    mu, N = 0.5, 200_000
    h = 2.0 / N
    x = -1 + h / 2 + h * np.arange(N)
    f = GridField((N,), h, (x[0],), np.ones(N), np.zeros(N, np.int8))
    got = riesz_apply(f, RieszKernelSpec(1, mu)).values
    exact = ((1 + x) ** mu + (1 - x) ** mu) / mu
    # the error of the self-cell rule scales like sqrt(h)
    assert np.max(np.abs(got - exact)) < 0.2 * math.sqrt(h)


def test_matrix_agrees_with_convolution():
    g = make_grid(Ball(1.0), 2, 11)
    k = RieszKernelSpec(2, 0.7)
    rng = np.random.default_rng(1)
    vals = rng.random(g.dims)
    W = riesz_matrix(g, k)
    assert np.allclose(W, W.T)
    fast = riesz_apply(g.with_values(vals), k).values[g.active]
    assert np.allclose(W @ vals[g.active], fast, rtol=1e-10)


@settings(max_examples=25)
@given(st.floats(1.0, 3.0), st.floats(0.0, 0.5))
def test_fixed_point_map_is_isotone(scale, bump):
    g = _box(pts=11)
    H = _free(g, 10.0 + np.zeros(g.dims))
    k = RieszKernelSpec(2, 1.0)
    lo = _free(g, scale * np.ones(g.dims))
    hi = _free(g, (scale + bump) * np.ones(g.dims) + 0.1 * np.exp(-g.radii() ** 2))
    assert np.all(fixed_point_map(hi, H, -1.0, k).values >= fixed_point_map(lo, H, -1.0, k).values - 1e-12)


def test_solver_converges_and_reports():
    g = _box(pts=21)
    H = _free(g, 10 + 2 * np.exp(-g.radii() ** 2))
    k = RieszKernelSpec(2, 1.0)
    diag = {}
    u = solve_integral_equation(H, -1.0, k, IntegralOptions(tol=1e-10), diagnostics=diag)
    assert fixed_point_residual(u, H, -1.0, k) < 1e-10
    assert diag["residual"] < 1e-10 and diag["history"]
    assert np.all(u.values < H.values) and np.all(u.values > 0)


def test_solver_failure_modes():
    g = _box(pts=11)
    k = RieszKernelSpec(2, 1.0)
    with pytest.raises(NoPositiveSolution):
        solve_integral_equation(_free(g, 1e-3 * np.ones(g.dims)), -1.0, k)
    H = _free(g, 10 + np.zeros(g.dims))
    with pytest.raises(BudgetExceeded) as exc:
        solve_integral_equation(H, -1.0, k, IntegralOptions(tol=1e-14, max_iter=3))
    assert exc.value.best is not None
    with pytest.raises(InvalidRange):
        solve_integral_equation(H, 0.5, k)
    with pytest.raises(NonpositiveField):
        solve_integral_equation(_free(g, -np.ones(g.dims)), -1.0, k)
    with pytest.raises(InvalidRange):
        IntegralOptions(omega=2.0)
    # a weighted source cannot sit on an active origin node
    with pytest.raises(OutOfDomain):
        solve_integral_equation(H, -1.0, k, alpha=4.0)


@settings(max_examples=20)
@given(st.lists(st.floats(-1.0, 1.0), min_size=4, max_size=4))
def test_sample_exact_on_cubics(c):
    g = _box(pts=21)
    x = g.coords()
    poly = lambda p: c[0] + c[1] * p[..., 0] ** 3 + c[2] * p[..., 0] * p[..., 1] ** 2 + c[3] * p[..., 1]
    f = _free(g, poly(x))
    pts = np.array([[0.123, -0.456], [0.5, 0.5], [-0.71, 0.33]])
    vals, ok = sample(f, pts)
    assert np.all(ok)
    assert np.allclose(vals, poly(pts), atol=1e-12)


def test_sample_flags_outside_points():
    g = _box(pts=11)
    f = _free(g, np.ones(g.dims))
    vals, ok = sample(f, [[0.95, 0.0], [2.0, 0.0], [0.0, 0.0]])
    assert list(ok) == [False, False, True] and vals[2] == 1.0


def test_kelvin_of_constant_is_power():
    bx = _box(pts=81, L=2.0)
    r = bx.radii()
    u = GridField(bx.dims, bx.h, bx.origin, np.ones(bx.dims), np.where(r < 0.4, 2, 0).astype(np.int8))
    tgt = GridField(bx.dims, bx.h, bx.origin, np.zeros(bx.dims),
                    np.where((r >= 0.6) & (r <= 1.8), 0, 2).astype(np.int8))
    v = kelvin_transform(u, 1.0, target=tgt)
    act = v.active
    assert np.allclose(v.values[act], 1.0 / r[act], rtol=1e-14)
    with pytest.raises(OutOfDomain):
        kelvin_transform(u, 1.0)
    trimmed = kelvin_transform(u, 1.0, trim=True)
    assert np.count_nonzero(trimmed.active) < np.count_nonzero(u.active)
    with pytest.raises(InvalidKernel):
        kelvin_transform(u, 3.0)


def test_plane_normalisation_and_reflection():
    p = Plane((3.0, 4.0), 5.0)
    assert np.allclose(p.normal, (0.6, 0.8)) and p.offset == pytest.approx(1.0)
    x = np.array([[0.0, 0.0]])
    assert np.allclose(p.reflect(p.reflect(x)), x)
    with pytest.raises(InvalidRange):
        Plane((0.0, 0.0), 0.0)


def test_symmetry_defect_of_asymmetric_field():
    g = _box(pts=21)
    x = g.coords()
    f = _free(g, 1 + x[..., 0] + 0 * x[..., 1])
    assert symmetry_defect(f, Plane((0.0, 1.0), 0.0)) < 1e-14
    assert symmetry_defect(f, ((1.0, 0.0), 0.0)) == pytest.approx(2.0, rel=1e-12)
    with pytest.raises(OutOfDomain):
        symmetry_defect(f, Plane((1.0, 0.0), 5.0))


def test_moving_plane_sweep_rows():
    g = _box(pts=21)
    f = _free(g, np.exp(-g.radii() ** 2))
    rows = moving_plane_sweep(f, (1.0, 0.0), [-0.5, 0.0, 5.0])
    assert rows[1]["defect"] < 1e-14
    # every node on the far side of x1 = -1/2 is nearer the peak than its mirror image
    assert rows[0]["minus_measure"] == pytest.approx(rows[0]["nodes"] * g.h**2)
    assert rows[2]["nodes"] == 0 and math.isnan(rows[2]["defect"])


def test_reflection_identity_plane_checks():
    g = _box(pts=21)
    H = _free(g, 10 + 2 * np.exp(-g.radii() ** 2))
    k = RieszKernelSpec(2, 1.0)
    u = solve_integral_equation(H, -1.0, k, IntegralOptions(tol=1e-10))
    diag = {}
    assert reflection_difference_check(u, 0.35, -1.0, k, H, diagnostics=diag) < 1e-9
    with pytest.raises(InvalidRange):
        reflection_difference_check(u, 0.33, -1.0, k, H)
    with pytest.raises(OutOfDomain):
        reflection_difference_check(u, 3.0, -1.0, k, H)


def test_alpha_weight():
    assert alpha_weight(2, 1.0, -1.0) == 4.0
    assert alpha_weight(3, 2.0, -1.0) == 6.0
    with pytest.raises(InvalidKernel):
        alpha_weight(2, 3.0, -1.0)


def test_hls_exponents_with_q():
    hx = hls_exponents(3, 2.0, -1.0, q=4.0)
    assert hx.beta == pytest.approx(1.5) and hx.beta_threshold == pytest.approx(6.0)
    assert hx.p == pytest.approx(1.0 / (0.25 + 2.0 / 3.0))
    assert hx.feasible["hls_pair"] is True
    d = json.loads(hx.to_json())
    assert d["schema"] == 1 and d["feasible"]["beta_condition"] is False
    assert hls_exponents(3, 2.0, -1.0, q=1.5).p is None
    with pytest.raises(InvalidRange):
        hls_exponents(3, 2.0, -1.0, q=1.0)
    with pytest.raises(InvalidKernel):
        hls_exponents(3, 2.0, 0.5)


@given(st.integers(1, 6), st.floats(0.05, 0.95), st.floats(-1e3, -1e-3))
def test_beta_never_reaches_threshold(n, frac, tau):
    hx = hls_exponents(n, frac * n, tau)
    assert 1 < hx.beta < hx.beta_sup < hx.beta_threshold
