import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selab.core import ProblemSpec, pde_residual, singular_solution
from selab.errors import (
    CrossCheckFailed,
    InvalidRange,
    LogSingularity,
    NonOscillatory,
    NonpositiveField,
    NoSolutionInBracket,
    TouchdownDetected,
)
from selab.radial import (
    ShootingConfig,
    constant_limit_solution,
    ef_infimum,
    emden_fowler_forward,
    emden_fowler_inverse,
    euler_ode_zeros,
    limit_ode_residual,
    pinney_solution,
    shoot_radial,
    solve_radial_bvp,
    veqn_residual,
)


def test_tau_zero_shot_matches_quadratic():
    prof = shoot_radial(ProblemSpec(3, 0.0), ShootingConfig(a=1.0, r_max=5.0))
    assert np.max(np.abs(prof.u - (1 + prof.r**2 / 6))) < 1e-10
    assert np.max(np.abs(prof.du - prof.r / 3)) < 1e-10


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 5), st.floats(-4.0, -0.2), st.floats(0.2, 5.0))
def test_shot_residual_small(n, tau, a):
    prof = shoot_radial(ProblemSpec(n, tau), ShootingConfig(a=a, r_max=10.0))
    res = pde_residual(prof)[5:-5]
    scale = prof.u[5:-5] ** tau
    # u'' comes from a difference stencil on the output samples, so this is its accuracy
    assert np.max(np.abs(res) / scale) < 1e-3
    assert np.all(np.diff(prof.u) > 0)


def test_shots_approach_singular_profile():
    prof = shoot_radial(ProblemSpec(2, -1.0), ShootingConfig(a=1.0, r_max=1e4))
    s = singular_solution(2, -1.0)
    assert prof.u[-1] / float(s.radial_value(prof.r[-1])) == pytest.approx(1.0, rel=0.05)


def test_shooting_config_validation():
    with pytest.raises(InvalidRange):
        ShootingConfig(a=0.0, r_max=1.0)
    with pytest.raises(InvalidRange):
        ShootingConfig(a=1.0, r_max=-1.0)
    with pytest.raises(InvalidRange):
        shoot_radial(ProblemSpec(2, -1.0), ShootingConfig(a=1.0, r_max=1.0, r_eval=(0.0, 2.0)))


def test_touchdown_for_decreasing_source():
    # -u^-1 pulls the solution down; it reaches zero in finite radius
    spec = ProblemSpec(2, -1.0, source="custom", f=lambda u: -1.0 / u, fprime=lambda u: 1.0 / u**2)
    with pytest.raises(TouchdownDetected) as exc:
        shoot_radial(spec, ShootingConfig(a=1.0, r_max=10.0))
    assert 0 < exc.value.r < 10


def test_bvp_hits_boundary_value():
    spec = ProblemSpec(2, -1.0)
    prof = solve_radial_bvp(spec, 1.0, 2.0)
    assert prof.u[-1] == pytest.approx(2.0, rel=1e-10)
    assert prof.u[0] < 2.0


def test_bvp_no_solution_below_fold():
    with pytest.raises(NoSolutionInBracket):
        solve_radial_bvp(ProblemSpec(3, -1.0), 1.0, 1e-6)
    with pytest.raises(InvalidRange):
        solve_radial_bvp(ProblemSpec(2, -1.0), 1.0, 0.0)


def test_emden_fowler_roundtrip_and_residual():
    prof = shoot_radial(ProblemSpec(2, -1.0), ShootingConfig(a=1.0, r_max=200.0)).drop_origin()
    ef = emden_fowler_forward(prof, 1.0)
    back = emden_fowler_inverse(ef)
    assert np.allclose(back.u, prof.u, rtol=1e-13) and np.allclose(back.du, prof.du, rtol=1e-12, atol=1e-14)
    far = ef.t > 0.0
    assert np.max(np.abs(veqn_residual(ef)[far][:-5])) < 1e-6
    assert 0 < ef_infimum(ef) <= 1.2


def test_emden_fowler_needs_positive_radius():
    prof = shoot_radial(ProblemSpec(2, -1.0), ShootingConfig(a=1.0, r_max=2.0))
    with pytest.raises(LogSingularity):
        emden_fowler_forward(prof, 1.0)


def test_euler_zeros():
    z = euler_ode_zeros(0.5, 1.0, 3)
    assert np.allclose(z, np.exp(np.arange(1, 4) * math.pi / math.sqrt(0.5)))
    with pytest.raises(NonOscillatory):
        euler_ode_zeros(0.0, 1.0, 2)
    with pytest.raises(CrossCheckFailed):
        euler_ode_zeros(0.5, 1.0, 3, rtol=1e-30)


@given(st.floats(0.2, 5.0))
def test_pinney_solves_limit_equation(lam):
    assert limit_ode_residual(pinney_solution(lam), 3.0, "pinney") < 1e-9


@pytest.mark.parametrize("conv", ["limit", "veqn", "pinney"])
def test_constant_limit_solution(conv):
    v = constant_limit_solution(2.0, conv)
    assert limit_ode_residual(lambda th: v + 0 * th, 2.0, conv) < 1e-12


def test_limit_residual_input_checks(tmp_path):
    th = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    path = tmp_path / "v.csv"
    path.write_text("theta,v\n" + "".join("%.17g,1\n" % t for t in th))
    assert limit_ode_residual(str(path), 1.0, "pinney") < 1e-12
    with pytest.raises(NonpositiveField):
        limit_ode_residual((th, -np.ones_like(th)), 1.0)
    with pytest.raises(ValueError):
        limit_ode_residual((th[:32], np.ones(32)), 1.0)
    with pytest.raises(ValueError):
        limit_ode_residual(lambda t: 1 + 0 * t, 1.0, "bogus")
