import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boussinesq_lab import kernels
from boussinesq_lab.core import Mode, ModeState, Params
from boussinesq_lab.errors import StepSizeUnderflow
from boussinesq_lab.modal import exact_omega_alpha0, exact_theta_alpha0
from boussinesq_lab.ode import (integrate_mode, integrate_second_order, linear_rhs,
                                theta_from_derivative)

BACKENDS = kernels.available()


def test_linear_rhs_examples():
    p = Params(beta=1.0)
    assert linear_rhs(p, 2.0, Mode(3, 1.0), ModeState(0.5, 2.0)) == ModeState(6j, 0j)
    p = Params(alpha=0.5, beta=1.0, nu_x=0.1, nu_y=9.0, eta_x=0.2, eta_y=9.0)
    mode = Mode(2, 4.0)
    r = linear_rhs(p, 2.0, mode, ModeState(1.0, 1.0))   # critical time xi/k
    assert r.omega_hat == pytest.approx(-0.1 * 4 + 2j)
    assert r.theta_hat == pytest.approx(-0.2 * 4 + 1j * 0.5 / 2)
    assert linear_rhs(p, 0.3, mode, ModeState(0, 0)) == ModeState(0, 0)


@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("use_if", [False, True])
def test_integrate_inviscid_couette(backend, use_if):
    tr = integrate_mode(Params(), Mode(1, 0.0), ModeState(1.0, 1.0), 0.0, 5.0, 1e-10,
                        integrating_factor=use_if, backend=backend)
    assert abs(tr.final.omega_hat - (1 + 5j)) < 1e-9
    assert abs(tr.final.theta_hat - 1) < 1e-9


@pytest.mark.parametrize("backend", BACKENDS)
def test_integrate_full_rotation(backend):
    tr = integrate_mode(Params(alpha=1.0, beta=0.0), Mode(1, 0.0), ModeState(1.0, 0.0),
                        0.0, 2 * math.pi, 1e-11, backend=backend)
    assert np.allclose(tr.final.as_array(), [1.0, 0.0], atol=1e-9)


@pytest.mark.parametrize("backend", BACKENDS)
def test_integrate_scalar_decay(backend):
    tr = integrate_mode(Params(nu_x=1.0, beta=1.0), Mode(1, 0.0), ModeState(2.0, 0.0),
                        0.0, 3.0, 1e-10, t_eval=np.linspace(0, 3, 7), backend=backend)
    assert np.allclose(np.abs(tr.omega), 2.0 * np.exp(-tr.times), rtol=1e-9)


def test_t_eval_lands_exactly():
    te = np.array([0.0, 0.25, 1.0, 3.5])
    tr = integrate_mode(Params(alpha=0.2), Mode(1, 1.0), ModeState(1, 1), 0.0, 3.5,
                        t_eval=te)
    assert np.array_equal(tr.times, te)


@settings(max_examples=15, deadline=None)
@given(st.floats(0, 0.3), st.floats(0, 0.3), st.floats(0, 0.3), st.floats(0, 0.3),
       st.integers(1, 3), st.floats(-3, 3), st.booleans())
def test_integrate_matches_closed_form(nx, ny, ex, ey, k, xi, use_if):
    p = Params(nu_x=nx, nu_y=ny, eta_x=ex, eta_y=ey)
    mode = Mode(k, xi)
    tr = integrate_mode(p, mode, ModeState(0.5, 1.0), 0.0, 4.0, 1e-11,
                        integrating_factor=use_if)
    w = exact_omega_alpha0(p, mode, 0.5, 1.0, 4.0)
    th = exact_theta_alpha0(p, mode, 1.0, 4.0)
    assert abs(tr.final.omega_hat - w) <= 1e-8 * max(1, abs(w))
    assert abs(tr.final.theta_hat - th) <= 1e-8


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernel not built")
@pytest.mark.parametrize("use_if", [False, True])
def test_backends_bit_identical(use_if):
    p = Params(alpha=0.4, beta=1.0, nu_x=0.05, nu_y=0.1, eta_x=0.02, eta_y=0.07)
    args = (p, Mode(2, 3.0), ModeState(1 - 1j, 0.5j), 0.0, 30.0, 1e-10)
    a = integrate_mode(*args, integrating_factor=use_if, backend="cython")
    b = integrate_mode(*args, integrating_factor=use_if, backend="python")
    assert np.array_equal(a.times, b.times)
    assert np.array_equal(a.states, b.states)


def test_second_order_free_particle():
    tr = integrate_second_order(0.0, 1.0, 7.0, 2.0, -0.5)
    assert tr.final.omega_hat == pytest.approx(2.0 - 0.5 * 6.0, abs=1e-10)


def test_second_order_growth_exponent():
    te = np.geomspace(1e2, 1e4, 41)
    tr = integrate_second_order(3 / 16, 0.0, 1e4, 0.0, 1.0, 1e-11, t_eval=np.r_[0.0, te])
    y = np.abs(tr.omega[1:])
    slope = np.polyfit(np.log(te), np.log(y), 1)[0]
    # the dominant time exponent is 2 * (1/4 + sqrt(1 - 4 alpha)/4)
    assert slope == pytest.approx(0.75, abs=0.02)


def test_second_order_even_symmetry():
    """The potential is even, so running from +T back to 0 mirrors the forward run."""
    T = 6.0
    fwd = integrate_second_order(0.3, 0.0, T, 1.0, 0.0, 1e-12)
    end = fwd.final
    # reflect tau -> -tau: y(-T) = y(T), y'(-T) = -y'(T); integrate from -T to 0
    back = integrate_second_order(0.3, -T, 0.0, end.omega_hat, -end.theta_hat, 1e-12)
    assert back.final.omega_hat == pytest.approx(1.0, abs=1e-9)
    assert back.final.theta_hat == pytest.approx(0.0, abs=1e-9)


def test_theta_from_derivative():
    assert theta_from_derivative(2j, 2) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        theta_from_derivative(1.0, 0)


def test_integrate_rejects_bad_span():
    with pytest.raises(ValueError):
        integrate_mode(Params(), Mode(1, 0), ModeState(1, 0), 2.0, 1.0)


def test_integrate_zero_span():
    tr = integrate_mode(Params(), Mode(1, 0), ModeState(1, 2), 1.0, 1.0)
    assert len(tr) == 1 and tr.final == ModeState(1, 2)


def test_step_size_underflow_error_type():
    assert issubclass(StepSizeUnderflow, RuntimeError)
