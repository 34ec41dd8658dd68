import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import jn_zeros

from selab.core import Annulus, Ball, Box, ProblemSpec, make_grid, singular_solution
from selab.errors import InvalidRange, NonOscillatory, OutOfDomain, UnsupportedExponent
from selab.radial import ShootingConfig, shoot_radial
from selab.spectral import (
    SpectrumReport,
    assemble_linearized,
    auto_modes,
    euler_test_functions,
    hardy_stability_check,
    harmonic_multiplicity,
    log_cutoff_capacity,
    lowest_eigenvalues,
    morse_index,
    radial_operator,
)


@pytest.mark.parametrize("n,ell,expected", [(2, 0, 1), (2, 3, 2), (3, 2, 5), (4, 1, 4), (5, 2, 14)])
def test_harmonic_multiplicity(n, ell, expected):
    assert harmonic_multiplicity(ell, n) == expected


@pytest.mark.parametrize("n,first", [(2, jn_zeros(0, 1)[0] ** 2), (3, math.pi**2)])
def test_free_ball_eigenvalue(n, first):
    op = radial_operator(lambda r: 0.0 * r, n, 1.0, N=2000)
    lam = lowest_eigenvalues(op, 1)[0]
    assert lam == pytest.approx(first, rel=1e-5)


def test_angular_mode_eigenvalue():
    op = radial_operator(lambda r: 0.0 * r, 2, 1.0, N=2000, ell=1)
    assert lowest_eigenvalues(op, 1)[0] == pytest.approx(jn_zeros(1, 1)[0] ** 2, rel=1e-5)


@given(st.floats(-50.0, 50.0))
def test_shift_moves_spectrum(c):
    op = radial_operator(lambda r: 1.0 + 0 * r, 3, 2.0, N=200)
    a = lowest_eigenvalues(op, 3)
    b = lowest_eigenvalues(op.shifted(c), 3)
    assert np.allclose(b - a, c, atol=1e-8 * max(1.0, abs(c)))


def test_grid_operator_matches_discrete_sine_spectrum():
    g = make_grid(Box((0.0, 0.0), (1.0, 1.0)), 2, 21)
    op = assemble_linearized(g, ProblemSpec(2, 0.0, source="unit"))
    assert op.asymmetry() == 0.0
    vals = lowest_eigenvalues(op, 3)
    h = g.h
    one = 4 / h**2 * math.sin(math.pi * h / 2) ** 2
    two = 4 / h**2 * math.sin(math.pi * h) ** 2
    assert np.allclose(vals, [2 * one, one + two, one + two], rtol=1e-10)


def test_annulus_index_and_report():
    spec = ProblemSpec(2, -1.0)
    u = singular_solution(2, -1.0)
    rad = morse_index(u, spec, math.exp(4.0), r0=1.0, N=2000)
    assert rad.morse_index == 1
    rep = json.loads(rad.to_json())
    assert rep["morse_index"] == 1 and rep["modes"][0]["ell"] == 0


def test_morse_index_grid_field():
    spec = ProblemSpec(2, -1.0)
    g = make_grid(Ball(1.0), 2, 21, boundary=2.0)
    rep = morse_index(g, spec)
    assert rep.morse_index == 0 and rep.eigenvalues[0] > 0
    with pytest.raises(InvalidRange):
        morse_index(singular_solution(2, -1.0), spec)


def test_auto_modes_cover_negative_potential():
    u = singular_solution(3, -1.0)
    modes = auto_modes(u, ProblemSpec(3, -1.0), 10.0)
    L = modes[-1]
    assert L * (L + 1) >= 1.0  # r^2 |V| = p beta (beta + 1) = 1 for the singular solution


def test_spectrum_report_needs_sorted_values():
    with pytest.raises(ValueError):
        SpectrumReport(1.0, [2.0, 1.0], 0, 0.0, [], {})


def test_profile_must_cover_domain():
    prof = shoot_radial(ProblemSpec(2, -1.0), ShootingConfig(a=1.0, r_max=2.0))
    with pytest.raises(OutOfDomain):
        assemble_linearized(prof, ProblemSpec(2, -1.0), Ball(5.0))
    with pytest.raises(InvalidRange):
        radial_operator(lambda r: r, 2, 1.0, r0=0.0, faces="geometric")


def test_euler_test_functions_identity_in_two_dimensions():
    u = singular_solution(2, -1.0)
    for tf in euler_test_functions(0.5, u, 1.0, 2):
        assert tf.Q == pytest.approx(tf.Q_identity, rel=1e-6)
        assert tf(tf.a) == pytest.approx(0.0, abs=1e-12) and tf(0.5 * tf.a) == 0.0
    with pytest.raises(NonOscillatory):
        euler_test_functions(0.0, u, 1.0, 2)
    with pytest.raises(UnsupportedExponent):
        euler_test_functions(0.5, u, 0.0, 2)
    prof = shoot_radial(ProblemSpec(2, -1.0), ShootingConfig(a=1.0, r_max=5.0))
    with pytest.raises(OutOfDomain):
        euler_test_functions(0.5, prof, 1.0, 3)


@given(st.integers(3, 12), st.floats(-30.0, -0.01))
def test_hardy_check_matches_threshold_dimension(n, tau):
    from selab.core import stability_threshold_dim

    lhs, rhs, stable = hardy_stability_check(n, tau)
    nstar = stability_threshold_dim(tau)
    if abs(n - nstar) > 1e-9:
        assert stable == (n > nstar)


def test_hardy_check_validation():
    with pytest.raises(UnsupportedExponent):
        hardy_stability_check(3, 0.0)
    with pytest.raises(InvalidRange):
        hardy_stability_check(1, -1.0)


@pytest.mark.parametrize("R", [2.0, 10.0, 100.0])
def test_log_cutoff_capacity(R):
    assert log_cutoff_capacity(R) == pytest.approx(2 * math.pi / math.log(R), rel=1e-8)


def test_annulus_domain_operator_size():
    op = assemble_linearized(singular_solution(2, -1.0), ProblemSpec(2, -1.0), Annulus(1.0, 3.0), N=100)
    assert op.size == 100 and op.meta["faces"] == "geometric"
