import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selab.core import Ball, Box, ProblemSpec, make_grid, pde_residual, quadratic_solution
from selab.elliptic import (
    ConstraintBox,
    SolveOptions,
    continuation_csv,
    discrete_laplacian,
    energy_gradient,
    energy_value,
    max_principle_gap,
    minimize_energy,
    monotone_iterate,
    newton_solve,
    parse_config,
    problem_from_config,
    radial_subsolution,
    solve_dirichlet,
    solve_linear_poisson,
    touchdown_continuation,
)
from selab.errors import InvalidRange, NonpositiveField, SingularExponent


def _ball(b=2.0, tau=-1.0, pts=21):
    spec = ProblemSpec(2, tau, domain=Ball(1.0), boundary=b)
    return spec, make_grid(Ball(1.0), 2, pts, boundary=b)


@settings(max_examples=20)
@given(st.floats(0.1, 5.0), st.floats(0.0, 1.0))
def test_laplacian_exact_on_quadratics(a0, t):
    q = quadratic_solution(a0, (0.5 * t, 0.5 * (1 - t)))
    g = make_grid(Box((-1.0, -2.0), (2.0, 3.0)), 2, 9)
    field = g.with_values(q.value(g.coords().reshape(-1, 2)).reshape(g.dims))
    lap = discrete_laplacian(field)
    assert np.allclose(lap.values[g.interior], 1.0, atol=1e-11)
    assert np.all(lap.values[~g.interior] == 0)


@pytest.mark.parametrize("method", ["cg", "direct"])
def test_linear_poisson_recovers_quadratic(method):
    g = make_grid(Box((-1.0, -1.0, -1.0), (2.0, 2.0, 2.0)), 3, 9,
                  boundary=lambda x: 1 + np.sum(x**2, axis=1) / 6)
    u = solve_linear_poisson(g, 1.0, method=method)
    exact = 1 + np.sum(g.coords() ** 2, axis=-1) / 6
    assert np.max(np.abs(u.values - exact)) < 1e-9


@pytest.mark.parametrize("method", ["monotone", "newton", "energy"])
def test_three_solvers_agree(method):
    spec, g = _ball(tau=-0.5)
    ref = newton_solve(spec, g, g)
    sol = solve_dirichlet(spec, g, SolveOptions(method=method, tol=1e-10))
    assert np.max(np.abs(sol.values - ref.values)) < 1e-7
    res = pde_residual(sol, spec)
    assert np.max(np.abs(res.values)) < 1e-6


def test_solution_is_subharmonic_and_bounded():
    spec, g = _ball()
    u = newton_solve(spec, g, g)
    assert max_principle_gap(u) < 0
    assert np.all(u.values[u.active] > 0)


def test_monotone_diagnostics_and_box():
    spec, g = _ball()
    diag = {}
    sub = radial_subsolution(spec, g)
    u = monotone_iterate(spec, g, ConstraintBox(lower=sub, upper=2.0), diagnostics=diag)
    assert diag
    act = g.active
    assert np.all(u.values[act] >= sub.values[act] - 1e-12)
    assert np.all(u.values[act] <= 2.0 + 1e-12)


def test_constraint_box_validation():
    _, g = _ball()
    with pytest.raises(NonpositiveField):
        ConstraintBox(lower=g.with_values(-g.values))
    with pytest.raises(InvalidRange):
        ConstraintBox(lower=g, upper=0.5)


def test_energy_gradient_matches_finite_difference():
    spec, g = _ball(tau=-0.5, pts=9)
    rng = np.random.default_rng(0)
    vals = g.values + 0.1 * rng.random(g.dims) * g.interior
    f = g.with_values(vals)
    grad = energy_gradient(f, spec).values
    i = tuple(np.argwhere(g.interior)[3])
    eps = 1e-6
    vp, vm = vals.copy(), vals.copy()
    vp[i] += eps
    vm[i] -= eps
    fd = (energy_value(g.with_values(vp), spec) - energy_value(g.with_values(vm), spec)) / (2 * eps)
    assert grad[i] == pytest.approx(fd, rel=1e-6)


def test_energy_warns_below_minus_one():
    spec, g = _ball(tau=-2.0, pts=9)
    with pytest.warns(RuntimeWarning):
        energy_value(g, spec)


def test_energy_rejects_tau_minus_one():
    spec, g = _ball(tau=-1.0)
    with pytest.raises(SingularExponent):
        energy_value(g, spec)
    with pytest.raises(SingularExponent):
        minimize_energy(spec, g)


def test_options_validation():
    with pytest.raises(ValueError):
        SolveOptions(method="jacobi")
    with pytest.raises(InvalidRange):
        SolveOptions(omega=0.0)
    _, g = _ball()
    with pytest.raises(InvalidRange):
        SolveOptions(positivity_floor=5.0).floor_for(g)


def test_continuation_small_schedule():
    spec, g = _ball(pts=21)
    rows, b_star = touchdown_continuation(spec, g, 2.0, 1.5, 3)
    assert b_star == pytest.approx(1.5)
    assert all(s == "ok" for _, _, s in rows)
    text = continuation_csv(rows)
    assert text.startswith("b,min_u,status\n") and text.count("\n") == 4
    with pytest.raises(InvalidRange):
        touchdown_continuation(spec, g, 1.0, 2.0, 5)


def test_config_roundtrip():
    cfg = parse_config("n = 2\ntau = -1  # comment\nboundary = 2\ngrid_points = 11\n\nmethod = monotone\n")
    spec, grid, opts = problem_from_config(cfg)
    assert spec.n == 2 and spec.tau == -1.0 and grid.dims == (11, 11) and opts.method == "monotone"
    with pytest.raises(ValueError):
        parse_config("n 2")
    with pytest.raises(ValueError):
        problem_from_config({"n": "2", "domain": "torus"})
