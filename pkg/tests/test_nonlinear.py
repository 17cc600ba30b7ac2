import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boussinesq_lab.checks import direct_advection
from boussinesq_lab.core import Mode, ModeState, Params, SpectralField
from boussinesq_lab.errors import CflViolation
from boussinesq_lab.nonlinear import (GridSpec, ICSpec, SimConfig, SimState, cfl_limit,
                                      heat_factors, initial_state, nonlinear_term,
                                      run_simulation, step, to_physical, to_spectral,
                                      velocity_from_vorticity, with_params)
from boussinesq_lab.ode import integrate_mode


def _single(nx, ny, i, j, value=1.0, t=0.0, dxi=1.0):
    f = SpectralField.zeros(nx, ny, dxi=dxi, frame_time=t)
    d = f.data.copy()
    d[i % nx, j % ny] = value
    d[-i % nx, -j % ny] = np.conj(value)
    return f.with_data(d)


def _random_state(n=16, eps=1.0, seed=0, t=0.0, k_max=3, xi_max=4):
    cfg = SimConfig(Params(), GridSpec(n, n), ic=ICSpec("random", eps, eps, seed=seed,
                                                        k_max=k_max, xi_max=xi_max))
    s = initial_state(cfg)
    return SimState(s.omega.with_data(s.omega.data, t), s.theta.with_data(s.theta.data, t), t)


# ---------------------------------------------------------------- transforms

def test_transform_roundtrip(rng):
    vals = rng.standard_normal((16, 12))
    assert np.allclose(to_physical(to_spectral(vals)), vals, atol=1e-14)


def test_physical_mean_square_matches_coefficients():
    s = _random_state()
    u = to_physical(s.omega.data)
    assert np.mean(u ** 2) == pytest.approx(np.sum(np.abs(s.omega.data) ** 2), rel=1e-13)


# ---------------------------------------------------------------- velocity

def test_velocity_unit_frequency():
    om = _single(8, 8, 1, 0, 2.0)
    v1, v2 = velocity_from_vorticity(om, 0.0, 1.0)
    assert v1[1, 0] == 0.0
    assert v2[1, 0] == pytest.approx(1j * 2.0)


def test_velocity_sheared_denominator():
    om = _single(8, 8, 1, 0, 2.0, t=1.0)
    v1, v2 = velocity_from_vorticity(om, 1.0, 1.0)
    # physical frequency (1, -1): denominator 2
    assert v2[1, 0] == pytest.approx(1j * 1 * 2.0 / 2)
    assert v1[1, 0] == pytest.approx(-1j * (-1) * 2.0 / 2)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 1000), st.floats(0, 5), st.floats(-2, 2))
def test_velocity_divergence_free(seed, t, beta):
    s = _random_state(seed=seed, t=t)
    v1, v2 = velocity_from_vorticity(s.omega, t, beta)
    k, xi = s.omega.wavenumbers()
    div = k * v1 + (xi - beta * k * t) * v2
    assert np.max(np.abs(div)) <= 1e-14 * max(1.0, np.max(np.abs(s.omega.data)))


def _pad(data, n):
    """Embed band-limited coefficients into an ``n x n`` FFT grid."""
    m = data.shape[0]
    idx = np.fft.fftfreq(m, 1.0 / m).astype(int)
    out = np.zeros((n, n), dtype=complex)
    out[np.ix_(idx % n, idx % n)] = data
    return out


def test_velocity_finite_difference_divergence():
    """Physical-space divergence ``d_x v1 + (d_y - beta t d_x) v2`` by central
    differences vanishes at second order under grid refinement."""
    t, beta = 1.0, 1.0
    s = _random_state(n=16, t=t)
    v1h, v2h = velocity_from_vorticity(s.omega, t, beta)
    errs = []
    for n in (64, 128):
        v1, v2 = to_physical(_pad(v1h, n)), to_physical(_pad(v2h, n))
        h = 2 * np.pi / n
        dx = lambda u: (np.roll(u, -1, 0) - np.roll(u, 1, 0)) / (2 * h)
        dy = lambda u: (np.roll(u, -1, 1) - np.roll(u, 1, 1)) / (2 * h)
        errs.append(np.max(np.abs(dx(v1) + dy(v2) - beta * t * dx(v2))))
    assert math.log2(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.05)


# ---------------------------------------------------------------- nonlinear term

def test_shear_flow_does_not_self_advect():
    om = SpectralField.zeros(16, 16)
    d = om.data.copy()
    d[0, 2], d[0, -2] = 0.5 - 0.1j, 0.5 + 0.1j
    d[0, 3], d[0, -3] = 0.2j, -0.2j
    s = SimState(om.with_data(d), SpectralField.zeros(16, 16), 0.7)
    n_om, n_th = nonlinear_term(s, Params(beta=1.0))
    assert np.max(np.abs(n_om)) <= 1e-16
    assert np.max(np.abs(n_th)) == 0.0


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 1000), st.floats(0, 3))
def test_advection_skew_symmetry(seed, t):
    s = _random_state(n=32, seed=seed, t=t)
    p = Params(alpha=0.0, beta=1.0)
    n_om, n_th = nonlinear_term(s, p)
    k, _ = s.omega.wavenumbers()
    adv_om = n_om - 1j * k * s.theta.data
    # sum over modes of conj(f) N(f) equals the grid mean of f (v . grad f)
    assert abs(np.sum(np.conj(s.omega.data) * adv_om).real) <= 1e-10
    assert abs(np.sum(np.conj(s.theta.data) * n_th).real) <= 1e-10


@pytest.mark.parametrize("t", [0.0, 0.45])
def test_convolution_oracle(t):
    s = _random_state(n=8, seed=21, t=t, k_max=2, xi_max=2)
    p = Params(alpha=0.0, beta=1.0)
    n_om, n_th = nonlinear_term(s, p)
    k, _ = s.omega.wavenumbers()
    d_om, d_th = direct_advection(s.omega, s.theta, t, 1.0)
    assert np.max(np.abs(n_om - 1j * k * s.theta.data - d_om)) <= 1e-14
    assert np.max(np.abs(n_th - d_th)) <= 1e-14


def test_two_mode_product_frequencies():
    """Advection of one theta mode by one vorticity mode lands on sums and differences."""
    om = _single(8, 8, 1, 0, 1.0)
    th = _single(8, 8, 0, 1, 1.0)
    s = SimState(om, th, 0.0)
    _, n_th = nonlinear_term(s, Params(beta=0.0))
    nz = {(int(i), int(j)) for i, j in zip(*np.nonzero(np.abs(n_th) > 1e-14))}
    assert nz == {(1, 1), (7, 7), (1, 7), (7, 1)}


def test_couplings_match_linear_matrix():
    p = Params(alpha=0.7, beta=1.0)
    s = _random_state(t=0.8)
    n_om, n_th = nonlinear_term(s, p, advection=False)
    k, xi = s.omega.wavenumbers()
    xp = xi - k * 0.8
    q = k * k + xp * xp
    inv = np.where(q > 0, 1 / np.where(q > 0, q, 1), 0)
    assert np.allclose(n_om, 1j * k * s.theta.data)
    assert np.allclose(n_th, 0.7j * k * inv * s.omega.data)


def test_heat_factors_at_most_one():
    f = SpectralField.zeros(16, 16)
    eo, et = heat_factors(f, Params.isotropic(0.1, 0.2), 1.0, 1.5)
    assert np.all(eo <= 1) and np.all(et <= 1) and eo[0, 0] == 1.0


# ---------------------------------------------------------------- stepping

def test_zero_state_stays_zero():
    cfg = SimConfig(Params.isotropic(0.1, 0.1, alpha=0.5), GridSpec(16, 16), dt=0.1,
                    t_end=1.0, ic=ICSpec("zero"))
    res = run_simulation(cfg)
    assert np.all(res.final.omega.data == 0) and np.all(res.final.theta.data == 0)
    assert np.all(res.hn_norm == 0)
    assert res.E_omega == 0.0 and res.E_theta == 0.0


def test_linear_regime_matches_modal_engine():
    p = Params(alpha=0.5, beta=1.0, nu_x=0.05, nu_y=0.02, eta_x=0.1, eta_y=0.03)
    cfg = SimConfig(p, GridSpec(16, 16), dt=0.005, t_end=5.0,
                    ic=ICSpec("random", 1e-12, 1e-12, seed=3, k_max=2, xi_max=3))
    s0 = initial_state(cfg)
    s = s0
    for _ in range(cfg.nsteps):
        s = step(s, cfg)
    k, xi = s.omega.wavenumbers()
    worst = 0.0
    for i, j in zip(*np.nonzero((np.abs(s0.omega.data) > 0) | (np.abs(s0.theta.data) > 0))):
        ref = integrate_mode(p, Mode(int(k[i, 0]), float(xi[0, j])),
                             ModeState(s0.omega.data[i, j], s0.theta.data[i, j]),
                             0.0, 5.0, 1e-12).final.as_array()
        got = np.array([s.omega.data[i, j], s.theta.data[i, j]])
        worst = max(worst, np.max(np.abs(got - ref)) / np.max(np.abs(ref)))
    assert worst <= 1e-10


def test_inviscid_transport_conserves_theta_l2():
    cfg = SimConfig(Params(alpha=0.0, beta=1.0), GridSpec(32, 32), dt=0.005, t_end=1.0,
                    ic=ICSpec("random", 0.5, 0.5, seed=12, k_max=3, xi_max=4))
    s = initial_state(cfg)
    l0 = math.sqrt(s.theta.sobolev_norm_sq(0))
    for _ in range(cfg.nsteps):
        s = step(s, cfg)
    assert abs(math.sqrt(s.theta.sobolev_norm_sq(0)) - l0) / l0 <= 1e-8


def test_mean_modes_conserved_inviscid():
    cfg = SimConfig(Params(alpha=0.3, beta=1.0), GridSpec(16, 16), dt=0.01, t_end=0.5,
                    ic=ICSpec("random", 0.3, 0.3, seed=5, k_max=3, xi_max=4))
    s = initial_state(cfg)
    d = s.theta.data.copy()
    d[0, 0] = 0.25
    s = SimState(s.omega, s.theta.with_data(d), 0.0)
    for _ in range(cfg.nsteps):
        s = step(s, cfg)
    assert s.theta.data[0, 0] == pytest.approx(0.25, abs=1e-15)
    assert s.omega.data[0, 0] == pytest.approx(0.0, abs=1e-15)


def test_step_preserves_hermitian_symmetry_and_band():
    cfg = SimConfig(Params.isotropic(0.01, 0.01, alpha=0.4), GridSpec(16, 16), dt=0.02,
                    t_end=0.2, ic=ICSpec("random", 0.5, 0.5, seed=9, k_max=4, xi_max=5))
    s = initial_state(cfg)
    for _ in range(10):
        s = step(s, cfg)
        assert s.omega.hermitian_defect() == 0.0 and s.theta.hermitian_defect() == 0.0
        assert np.all(s.omega.data[~s.omega.band_mask()] == 0)


def test_cfl_violation_raised():
    cfg = SimConfig(Params(), GridSpec(16, 16), dt=10.0, t_end=10.0,
                    ic=ICSpec("random", 5.0, 5.0, seed=1))
    s = initial_state(cfg)
    assert cfl_limit(s, cfg) < 10.0
    with pytest.raises(CflViolation):
        step(s, cfg)


# ---------------------------------------------------------------- initial data

def test_initial_norms_exact():
    p = Params(sobolev_n=3)
    cfg = SimConfig(p, GridSpec(32, 32), ic=ICSpec("random", 2e-3, 1e-6, seed=4))
    s = initial_state(cfg)
    assert math.sqrt(s.omega.sobolev_norm_sq(3)) == pytest.approx(2e-3, rel=1e-14)
    assert math.sqrt(s.theta.sobolev_norm_sq(3)) == pytest.approx(1e-6, rel=1e-14)
    assert s.omega.is_hermitian(0.0)
    k, _ = s.omega.wavenumbers()
    assert np.all(s.omega.data[np.broadcast_to(k == 0, s.omega.shape)] == 0)


def test_initial_largealpha_split():
    p = Params(alpha=2.0, sobolev_n=1)
    cfg = SimConfig(p, GridSpec(32, 32), ic=ICSpec("random-largealpha", 0.01, 0.0, seed=2))
    s = initial_state(cfg)
    k, xi = s.theta.wavenumbers()
    w = (1 + k * k + xi * xi)
    grad = float(np.sum(w * (k * k + xi * xi) * np.abs(s.theta.data) ** 2))
    assert 2.0 * s.omega.sobolev_norm_sq(1) == pytest.approx(0.5e-4, rel=1e-13)
    assert grad == pytest.approx(0.5e-4, rel=1e-13)


def test_initial_state_reproducible():
    cfg = SimConfig(Params(), GridSpec(16, 16), ic=ICSpec("random", 1.0, 1.0, seed=7))
    a, b = initial_state(cfg), initial_state(cfg)
    assert np.array_equal(a.omega.data, b.omega.data)
    c = initial_state(SimConfig(Params(), GridSpec(16, 16), ic=ICSpec("random", 1.0, 1.0, seed=8)))
    assert not np.array_equal(a.omega.data, c.omega.data)


def test_config_validation():
    with pytest.raises(ValueError):
        GridSpec(15, 16)
    with pytest.raises(ValueError):
        ICSpec("gaussian")
    with pytest.raises(ValueError):
        SimConfig(Params(), dt=0.0)


# ---------------------------------------------------------------- driver

def test_run_simulation_sampling_and_times():
    cfg = SimConfig(Params.isotropic(0.05, 0.05, alpha=0.1), GridSpec(16, 16), dt=0.1,
                    t_end=1.0, snapshot_every=5,
                    ic=ICSpec("random", 1e-3, 1e-5, seed=0), keep_snapshots=True)
    res = run_simulation(cfg)
    assert np.allclose(res.times, [0.0, 0.5, 1.0])
    assert res.final.t == pytest.approx(1.0, abs=1e-15)
    assert len(res.snapshots) == 3 and len(res.reports) == 3
    assert res.bootstrap_exceeded == {"omega": None, "theta": None}
    assert res.E_omega <= 8 * 1e-6
    # totals include the integrated dissipation, so they dominate the functional
    assert np.all(res.largealpha_total >= res.largealpha - 1e-18)


def test_run_simulation_continues_from_state():
    cfg = SimConfig(Params.isotropic(0.05, 0.05), GridSpec(16, 16), dt=0.1, t_end=0.5,
                    ic=ICSpec("random", 1e-3, 1e-5, seed=0))
    first = run_simulation(cfg)
    second = run_simulation(cfg, state=first.final)
    assert second.times[0] == pytest.approx(0.5)
    assert second.final.t == pytest.approx(1.0)
    full = run_simulation(SimConfig(cfg.params, cfg.grid, 0.1, 1.0, cfg.ic))
    assert np.allclose(second.final.omega.data, full.final.omega.data, rtol=0, atol=1e-18)


def test_with_params():
    cfg = SimConfig(Params(alpha=1.0))
    assert with_params(cfg, alpha=0.5).params.alpha == 0.5
    assert cfg.params.alpha == 1.0
