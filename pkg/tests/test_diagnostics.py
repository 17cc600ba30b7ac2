import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boussinesq_lab.core import Mode, ModeState, Params
from boussinesq_lab.diagnostics import (MIN_SAMPLES, default_window, envelope_check,
                                        fit_algebraic_exponent, fit_exponential_rate)
from boussinesq_lab.errors import NonPositiveValues, WindowTooSmall
from boussinesq_lab.modal import exact_theta_alpha0, inviscid_couette_mode
from boussinesq_lab.multiplier import energy_sheared
from boussinesq_lab.ode import integrate_mode, integrate_second_order


def test_exponential_synthetic():
    t = np.linspace(0, 20, 201)
    fit = fit_exponential_rate(t, np.exp(-2 * t))
    assert fit.rate_or_exponent == pytest.approx(2.0, abs=1e-9)
    assert fit.residual < 1e-12
    assert fit.window == (5.0, 20.0) and fit.kind == "exponential"


def test_exponential_closed_form_theta():
    p = Params(eta_x=1.0)
    t = np.linspace(0, 15, 151)
    vals = np.abs([exact_theta_alpha0(p, Mode(1, 0.0), 1.0, ti) for ti in t])
    assert fit_exponential_rate(t, vals).rate_or_exponent == pytest.approx(1.0, abs=1e-9)


def test_algebraic_synthetic():
    t = np.geomspace(1, 1e3, 50)
    fit = fit_algebraic_exponent(t, t ** 1.0)
    assert fit.rate_or_exponent == pytest.approx(1.0, abs=1e-9)


def test_algebraic_inviscid_couette():
    t = np.linspace(10, 1000, 100)
    vals = [abs(inviscid_couette_mode(1.0, Mode(2, 1.0), ModeState(0.3, 1.0), ti).omega_hat)
            for ti in t]
    fit = fit_algebraic_exponent(t, vals, window=(100, 1000))
    assert fit.rate_or_exponent == pytest.approx(1.0, abs=1e-3)


def test_algebraic_second_order_growth():
    te = np.geomspace(1e2, 1e4, 41)
    tr = integrate_second_order(3 / 16, 0.0, 1e4, 0.0, 1.0, 1e-11, t_eval=np.r_[0.0, te])
    fit = fit_algebraic_exponent(tr.times[1:], np.abs(tr.omega[1:]), window=(1e2, 1e4))
    assert fit.rate_or_exponent == pytest.approx(0.75, abs=0.02)


@settings(max_examples=50)
@given(st.floats(0.01, 5), st.floats(1e-6, 1e6))
def test_exponential_fit_scale_invariant(rate, scale):
    t = np.linspace(0, 30, 121)
    v = np.exp(-rate * t)
    a = fit_exponential_rate(t, v).rate_or_exponent
    b = fit_exponential_rate(t, scale * v).rate_or_exponent
    assert a == pytest.approx(rate, rel=1e-9) and b == pytest.approx(a, rel=1e-8)


@settings(max_examples=50)
@given(st.floats(-3, 3), st.floats(1e-6, 1e6))
def test_algebraic_fit_scale_invariant(p, scale):
    t = np.geomspace(1, 100, 60)
    assert fit_algebraic_exponent(t, scale * t ** p, window=(1, 100)).rate_or_exponent \
        == pytest.approx(p, abs=1e-9)


def test_fit_errors():
    t = np.linspace(0, 10, 20)
    with pytest.raises(WindowTooSmall):
        fit_exponential_rate(t, np.exp(-t), window=(9, 10))
    v = np.exp(-t)
    v[15] = 0.0
    with pytest.raises(NonPositiveValues):
        fit_exponential_rate(t, v)
    with pytest.raises(NonPositiveValues):
        fit_algebraic_exponent(t, np.ones_like(t), window=(0, 10))
    with pytest.raises(ValueError):
        fit_exponential_rate(t, v[:-1])
    assert MIN_SAMPLES == 8


def test_default_window():
    assert default_window([0, 100]) == (20.0, 100.0)
    assert default_window([0, 10]) == (5.0, 10.0)


def test_fit_as_dict():
    t = np.linspace(0, 20, 41)
    d = fit_exponential_rate(t, np.exp(-t)).as_dict()
    assert set(d) == {"kind", "rate_or_exponent", "residual", "window", "samples"}


def test_envelope_identical_margin_one():
    t = np.linspace(0, 5, 11)
    rep = envelope_check(t, np.exp(-t), lambda s: np.exp(-s), 1.0)
    assert rep.margin == pytest.approx(1.0, rel=1e-15) and rep.passed


def test_envelope_log_space_and_worst_time():
    t = np.linspace(0, 5, 11)
    v = -t.copy()
    v[4] += math.log(3.0)
    rep = envelope_check(t, v, lambda s: -s, 2.0, log_space=True)
    assert rep.margin == pytest.approx(3.0) and not rep.passed and rep.worst_time == t[4]
    with pytest.raises(ValueError):
        envelope_check(t, np.ones_like(t), lambda s: 0 * s, 1.0)


def test_envelope_sheared_energy_random_draws(rng):
    """Weighted linear energy stays below ``10 (1+t^2) exp(...) E(0)``."""
    t = np.linspace(0, 10, 41)
    for _ in range(20):
        nx, ny, ex, ey = rng.uniform(0.01, 0.3, 4)
        p = Params(alpha=0.0, beta=1.0, nu_x=nx, nu_y=ny, eta_x=ex, eta_y=ey)
        mode = Mode(int(rng.integers(1, 4)), float(rng.uniform(-4, 4)))
        s0 = ModeState(complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2)))
        tr = integrate_mode(p, mode, s0, 0.0, 10.0, 1e-10, t_eval=t, integrating_factor=True)
        e = [energy_sheared({mode: s}, p.replace(alpha=1.0), ti).value("sheared")
             for ti, s in zip(tr.times, tr.mode_states())]
        lam_y, lam_x = min(ny, ey), min(nx, ex)

        def env(s):
            return (1 + s ** 2) * np.exp(-lam_y * mode.k ** 2 * s ** 3 / 12 - lam_x * mode.k ** 2 * s) * e[0]

        assert envelope_check(t, e, env, 10.0).passed


def test_envelope_theta_per_mode_exact():
    p = Params(eta_x=0.3, eta_y=0.2)
    t = np.linspace(0, 8, 33)
    vals = [abs(exact_theta_alpha0(p, Mode(1, 0.5 * 1), 1.0, ti)) for ti in t]
    # optimal vertical frequency over the window gives exp(-eta_x t - eta_y t^3/12)
    rep = envelope_check(t, vals, lambda s: np.exp(-0.3 * s - 0.2 * s ** 3 / 12), 1 + 1e-8)
    assert rep.passed
