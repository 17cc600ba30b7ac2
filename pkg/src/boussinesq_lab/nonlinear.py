"""Dealiased pseudospectral solver for the nonlinear sheared-frame system.

Unknowns are the vorticity and temperature perturbations on ``T x [0, L)``
(``L = 2 pi / dxi``), stored as sheared-frame Fourier coefficients with label
frequencies ``(k, xi)``; the physical vertical frequency is
``xi_p = xi - beta k t``.  The evolution is

    d_t omega + v . grad_t omega = nu Delta_t omega + d_x theta
    d_t theta + v . grad_t theta = eta Delta_t theta + alpha d_x (-Delta_t)^{-1} omega

with ``v_hat = i (-xi_p, k) omega_hat / (k^2 + xi_p^2)``.  The heat flow is
removed exactly by per-mode integrating factors (Lawson RK4); advection and
the couplings are explicit.  Labels never leave the retained band, so the
sheared frame needs no remapping.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .core import EnergyReport, Params, SpectralField, retained_halfwidth, validate
from .errors import CflViolation
from .modal import phase_integral
from .multiplier import (BootstrapAccumulator, energy_largealpha, largealpha_dissipation,
                         mdot_M, weight_A)

__all__ = [
    "GridSpec",
    "ICSpec",
    "SimConfig",
    "SimState",
    "SimResult",
    "to_physical",
    "to_spectral",
    "velocity_from_vorticity",
    "nonlinear_term",
    "heat_factors",
    "cfl_limit",
    "step",
    "initial_state",
    "run_simulation",
]


@dataclass(frozen=True)
class GridSpec:
    """FFT grid ``nx x ny`` and vertical frequency spacing ``dxi = 2 pi / L``."""

    nx: int = 128
    ny: int = 128
    dxi: float = 1.0
    dealias_fraction: float = 2.0 / 3.0

    def __post_init__(self):
        if self.nx < 4 or self.ny < 4 or self.nx % 2 or self.ny % 2:
            raise ValueError("grid sizes must be even and >= 4")
        if not self.dxi > 0:
            raise ValueError("dxi must be positive")
        retained_halfwidth(self.nx, self.dealias_fraction)

    @property
    def K(self):
        return retained_halfwidth(self.nx, self.dealias_fraction)

    @property
    def Xi(self):
        return retained_halfwidth(self.ny, self.dealias_fraction)

    @property
    def spacing(self):
        return 2 * math.pi / self.nx, 2 * math.pi / (self.dxi * self.ny)

    def zeros(self, t=0.0) -> SpectralField:
        return SpectralField.zeros(self.nx, self.ny, self.dxi, self.dealias_fraction, t)


@dataclass(frozen=True)
class ICSpec:
    """Initial-condition descriptor.

    ``profile`` is one of

    * ``"random"``: Hermitian random coefficients on ``1 <= |k| <= k_max``,
      ``|xi| <= xi_max`` with independent Gaussian parts, rescaled so that
      ``||omega_0||_{H^N} = eps1`` and ``||theta_0||_{H^N} = eps2`` exactly;
    * ``"random-largealpha"``: the same fields rescaled so that
      ``alpha ||omega_0||^2_{H^N} = ||grad theta_0||^2_{H^N} = eps1^2 / 2``;
    * ``"mode"``: a single conjugate pair at label ``(k_max, xi_max)``
      with amplitudes ``eps1`` and ``eps2``;
    * ``"zero"``.

    Randomness comes from ``numpy.random.default_rng(seed)`` (PCG64).
    """

    profile: str = "random"
    eps1: float = 0.0
    eps2: float = 0.0
    seed: int = 0
    k_max: int = 4
    xi_max: float = 8.0

    def __post_init__(self):
        if self.profile not in ("random", "random-largealpha", "mode", "zero"):
            raise ValueError(f"unknown initial-condition profile {self.profile!r}")
        if self.eps1 < 0 or self.eps2 < 0:
            raise ValueError("eps1 and eps2 must be non-negative")


@dataclass(frozen=True)
class SimConfig:
    """Everything :func:`run_simulation` needs; numerics depend on nothing else."""

    params: Params
    grid: GridSpec = GridSpec()
    dt: float = 0.02
    t_end: float = 1.0
    ic: ICSpec = ICSpec()
    snapshot_every: int = 10
    nonlinear: bool = True
    check_cfl: bool = True
    enforce_drift_horizon: bool = False
    keep_snapshots: bool = False

    def __post_init__(self):
        validate(self.params)
        if not self.dt > 0 or not self.t_end >= 0:
            raise ValueError("need dt > 0 and t_end >= 0")
        if int(self.snapshot_every) != self.snapshot_every or self.snapshot_every < 1:
            raise ValueError("snapshot_every must be an integer >= 1")

    @property
    def nsteps(self):
        return int(round(self.t_end / self.dt))

    @property
    def drift_horizon(self):
        """``Xi dxi / (beta K)``: time for the band edge of a stored physical
        frequency to drift by one band width.  Irrelevant with label storage
        and reported only."""
        kb = abs(self.params.beta) * self.grid.K
        return math.inf if kb == 0 else self.grid.Xi * self.grid.dxi / kb


@dataclass
class SimState:
    """Vorticity and temperature fields at frame time ``t``."""

    omega: SpectralField
    theta: SpectralField
    t: float = 0.0

    def copy(self):
        return SimState(self.omega.with_data(self.omega.data.copy()),
                        self.theta.with_data(self.theta.data.copy()), self.t)


@dataclass
class SimResult:
    """Sampled diagnostics of one run.

    ``reports`` holds an EnergyReport every ``snapshot_every`` steps; the
    bootstrap energies are accumulated every step.
    """

    config: SimConfig
    times: np.ndarray
    reports: list
    hn_norm: np.ndarray
    largealpha: np.ndarray
    largealpha_total: np.ndarray
    largealpha_total_squared: np.ndarray
    E_omega: float
    E_theta: float
    bootstrap_exceeded: dict
    final: SimState
    snapshots: list = field(default_factory=list)
    max_hermitian_defect: float = 0.0


# --------------------------------------------------------------------------
# transforms
# --------------------------------------------------------------------------

def to_physical(data: np.ndarray) -> np.ndarray:
    """Real grid values of normalised Hermitian coefficients."""
    nx, ny = data.shape
    return np.fft.irfft2(data[:, : ny // 2 + 1], s=(nx, ny)) * (nx * ny)


def to_spectral(values: np.ndarray) -> np.ndarray:
    """Normalised full coefficient array of real grid values."""
    nx, ny = values.shape
    half = np.fft.rfft2(values) / (nx * ny)
    out = np.empty((nx, ny), dtype=complex)
    h = ny // 2 + 1
    out[:, :h] = half
    # columns beyond ny/2 from the conjugate partner (-k, -xi)
    ik = (-np.arange(nx)) % nx
    jj = ny - np.arange(h, ny)
    out[:, h:] = np.conj(half[ik][:, jj])
    return out


def _symmetrize(data):
    partner = np.conj(np.roll(data[::-1, ::-1], 1, axis=(0, 1)))
    return 0.5 * (data + partner)


def _physical_wavenumbers(f: SpectralField, t, beta):
    k, xi = f.wavenumbers()
    return k, xi - beta * k * t


# --------------------------------------------------------------------------
# right-hand side
# --------------------------------------------------------------------------

def velocity_from_vorticity(omega: SpectralField, t, beta):
    """Spectral velocity ``i (-xi_p, k) omega_hat / (k^2 + xi_p^2)``.

    The mode with ``k = xi_p = 0`` gets zero velocity.  Returns two arrays.
    """
    k, xp = _physical_wavenumbers(omega, t, beta)
    k = np.broadcast_to(k, omega.shape)
    q = k * k + xp * xp
    inv = np.divide(1.0, q, out=np.zeros(q.shape), where=q != 0)
    c = 1j * omega.data * inv
    return -xp * c, k * c


def _advection(v1, v2, f: SpectralField, k, xp, mask):
    """Dealiased spectral ``-(v . grad_t f)`` from physical velocity components."""
    fx = to_physical(1j * k * f.data)
    fy = to_physical(1j * xp * f.data)
    return -to_spectral(v1 * fx + v2 * fy) * mask


def nonlinear_term(state: SimState, params: Params, *, advection=True):
    """``(N_omega, N_theta)``: advection plus the linear couplings.

    ``N_omega = -(v . grad_t omega) + d_x theta`` and
    ``N_theta = -(v . grad_t theta) + alpha d_x (-Delta_t)^{-1} omega``,
    products formed on the grid and truncated to the retained band (the 2/3
    rule removes all aliasing of quadratic terms).
    """
    om, th, t = state.omega, state.theta, state.t
    k, xp = _physical_wavenumbers(om, t, params.beta)
    q = k * k + xp * xp
    inv = np.divide(1.0, q, out=np.zeros(q.shape), where=q != 0)
    n_om = 1j * k * th.data
    n_th = params.alpha * 1j * k * inv * om.data
    if advection:
        mask = om.band_mask()
        v1h, v2h = velocity_from_vorticity(om, t, params.beta)
        v1 = to_physical(v1h)
        v2 = to_physical(v2h)
        n_om = n_om + _advection(v1, v2, om, k, xp, mask)
        n_th = n_th + _advection(v1, v2, th, k, xp, mask)
    return n_om, n_th


def heat_factors(field_: SpectralField, params: Params, t0, t1):
    """Exact diagonal heat factors ``exp(-c_x k^2 (t1-t0) - c_y int (xi - beta k tau)^2)``.

    Returns ``(E_omega, E_theta)`` on the label grid.
    """
    k, xi = field_.wavenumbers()
    ph = phase_integral(k, xi, t0, t1, params.beta)
    k2dt = k * k * (t1 - t0)
    return (np.exp(-params.nu_x * k2dt - params.nu_y * ph),
            np.exp(-params.eta_x * k2dt - params.eta_y * ph))


def cfl_limit(state: SimState, config: SimConfig) -> float:
    """Largest dt with ``dt * max|u| <= 0.5 * min grid spacing``.

    ``u = (v_1 - beta t v_2, v_2)`` is the velocity in sheared-frame
    coordinates.
    """
    v1h, v2h = velocity_from_vorticity(state.omega, state.t, config.params.beta)
    v1 = to_physical(v1h)
    v2 = to_physical(v2h)
    umax = max(float(np.max(np.abs(v1 - config.params.beta * state.t * v2))),
               float(np.max(np.abs(v2))))
    if umax == 0.0:
        return math.inf
    return 0.5 * min(config.grid.spacing) / umax


def step(state: SimState, config: SimConfig) -> SimState:
    """Advance by ``config.dt`` with Lawson (integrating-factor) RK4.

    The heat flow over each substep is applied with the exact factor of the
    time-dependent physical frequency, so only advection and the couplings are
    discretised.  The result is projected onto Hermitian symmetry.
    """
    p = config.params
    h = config.dt
    if config.check_cfl:
        lim = cfl_limit(state, config)
        if h > lim:
            raise CflViolation(f"dt = {h} exceeds the CFL bound {lim:.3e} at t = {state.t}")
    t = state.t
    tm = t + 0.5 * h
    tn = t + h
    adv = config.nonlinear
    eo1, et1 = heat_factors(state.omega, p, t, tm)
    eo2, et2 = heat_factors(state.omega, p, tm, tn)
    eo, et = eo1 * eo2, et1 * et2
    w0, q0 = state.omega.data, state.theta.data

    def rhs(tt, w, q):
        s = SimState(state.omega.with_data(w, tt), state.theta.with_data(q, tt), tt)
        return nonlinear_term(s, p, advection=adv)

    a1, b1 = rhs(t, w0, q0)
    a2, b2 = rhs(tm, eo1 * (w0 + 0.5 * h * a1), et1 * (q0 + 0.5 * h * b1))
    a3, b3 = rhs(tm, eo1 * w0 + 0.5 * h * a2, et1 * q0 + 0.5 * h * b2)
    a4, b4 = rhs(tn, eo * w0 + h * eo2 * a3, et * q0 + h * et2 * b3)
    w = eo * w0 + (h / 6.0) * (eo * a1 + 2.0 * eo2 * (a2 + a3) + a4)
    q = et * q0 + (h / 6.0) * (et * b1 + 2.0 * et2 * (b2 + b3) + b4)
    mask = state.omega.band_mask()
    w = _symmetrize(w * mask)
    q = _symmetrize(q * mask)
    return SimState(state.omega.with_data(w, tn), state.theta.with_data(q, tn), tn)


# --------------------------------------------------------------------------
# initial data
# --------------------------------------------------------------------------

def _random_field(grid: GridSpec, ic: ICSpec, rng) -> np.ndarray:
    f = grid.zeros()
    k, xi = f.wavenumbers()
    support = (np.abs(k) >= 1) & (np.abs(k) <= min(ic.k_max, grid.K)) \
        & (np.abs(xi) <= min(ic.xi_max, grid.Xi * grid.dxi))
    data = (rng.standard_normal(f.shape) + 1j * rng.standard_normal(f.shape)) * support
    return _symmetrize(data)


def _scaled(data, weight_sq, target):
    norm = math.sqrt(float(np.sum(weight_sq * np.abs(data) ** 2)))
    if target == 0.0 or norm == 0.0:
        return np.zeros_like(data)
    return data * (target / norm)


def initial_state(config: SimConfig) -> SimState:
    """Build the initial fields described by ``config.ic``."""
    grid, ic, p = config.grid, config.ic, config.params
    om = grid.zeros()
    th = grid.zeros()
    k, xi = om.wavenumbers()
    w2 = (1.0 + k * k + xi * xi) ** p.sobolev_n
    if ic.profile == "zero":
        return SimState(om, th, 0.0)
    if ic.profile == "mode":
        w = np.zeros(om.shape, dtype=complex)
        i = int(ic.k_max) % grid.nx
        j = int(round(ic.xi_max / grid.dxi)) % grid.ny
        w[i, j] = 1.0
        w = _symmetrize(w)
        return SimState(om.with_data(ic.eps1 * w / np.max(np.abs(w))),
                        th.with_data(ic.eps2 * w / np.max(np.abs(w))), 0.0)
    rng = np.random.default_rng(ic.seed)
    wd = _random_field(grid, ic, rng)
    td = _random_field(grid, ic, rng)
    if ic.profile == "random":
        wd = _scaled(wd, w2, ic.eps1)
        td = _scaled(td, w2, ic.eps2)
    else:
        half = ic.eps1 / math.sqrt(2.0)
        wd = _scaled(wd, w2, half / math.sqrt(p.alpha)) if p.alpha > 0 else np.zeros_like(wd)
        td = _scaled(td, w2 * (k * k + xi * xi), half)
    return SimState(om.with_data(wd), th.with_data(td), 0.0)


# --------------------------------------------------------------------------
# driver
# --------------------------------------------------------------------------

def _report(state: SimState, p: Params) -> EnergyReport:
    om, th, t = state.omega, state.theta, state.t
    k, xi = om.wavenumbers()
    xp = xi - p.beta * k * t
    k2, x2 = k * k, xp * xp
    a2 = weight_A(t, p.sobolev_n, k=k, xi=xi) ** 2
    mm = mdot_M(t, k=k, xi=xi) * (1.0 + k2 + xi * xi) ** p.sobolev_n
    ew = np.abs(om.data) ** 2
    et = np.abs(th.data) ** 2
    la = energy_largealpha((om, th), p, t)
    ld = largealpha_dissipation((om, th), p, t)
    entries = {
        "A_omega": (float(np.sum(a2 * ew)),
                    float(np.sum(((p.nu_x * k2 + p.nu_y * x2) * a2 + mm) * ew))),
        "A_theta": (float(np.sum(a2 * et)),
                    float(np.sum(((p.eta_x * k2 + p.eta_y * x2) * a2 + mm) * et))),
        "HN_omega": (om.sobolev_norm_sq(p.sobolev_n), 0.0),
        "HN_theta": (th.sobolev_norm_sq(p.sobolev_n), 0.0),
        "largealpha": (la, ld["omega"] + ld["theta_gradient"]),
        "largealpha_squared": (la, ld["omega"] + ld["theta_squared"]),
    }
    return EnergyReport(float(t), entries)


def run_simulation(config: SimConfig, *, state: Optional[SimState] = None,
                   callback: Optional[Callable] = None) -> SimResult:
    """Integrate to ``t_end`` and collect the energy diagnostics.

    Bootstrap energies ``E_omega``, ``E_theta`` are accumulated at every step;
    ``bootstrap_exceeded`` records the first time they pass ``8 eps1^2`` and
    ``8 eps2^2`` (``None`` if never).  ``largealpha_total`` is the functional
    plus the time-integrated dissipation (gradient form of the thermal term),
    ``largealpha_total_squared`` the same with the squared-operator form.
    """
    p = config.params
    nsteps = config.nsteps
    if config.enforce_drift_horizon and nsteps * config.dt > config.drift_horizon:
        nsteps = int(math.floor(config.drift_horizon / config.dt))
    st = initial_state(config) if state is None else state.copy()
    acc = BootstrapAccumulator(p)
    thr = (8.0 * config.ic.eps1 ** 2, 8.0 * config.ic.eps2 ** 2)
    exceeded = {"omega": None, "theta": None}
    times, reports, hn, la, lat, las = [], [], [], [], [], []
    snaps = []
    integ = [0.0, 0.0]
    prev = None
    defect = 0.0

    def sample(s, n):
        nonlocal prev
        acc.add(s.omega, s.theta, s.t)
        for i, name in enumerate(("omega", "theta")):
            if exceeded[name] is None and acc.values[i] > thr[i] and thr[i] > 0:
                exceeded[name] = s.t
        rep = _report(s, p)
        d = (rep.dissipation("largealpha"), rep.dissipation("largealpha_squared"))
        if prev is not None:
            for i in range(2):
                integ[i] += 0.5 * (s.t - prev[0]) * (d[i] + prev[1][i])
        prev = (s.t, d)
        if n % config.snapshot_every == 0 or n == nsteps:
            times.append(s.t)
            reports.append(rep)
            hn.append(math.sqrt(rep.value("HN_omega")) + math.sqrt(rep.value("HN_theta")))
            la.append(rep.value("largealpha"))
            lat.append(rep.value("largealpha") + integ[0])
            las.append(rep.value("largealpha") + integ[1])
            if config.keep_snapshots:
                snaps.append(s.copy())
            if callback is not None:
                callback(s, rep)

    t0 = st.t
    sample(st, 0)
    for n in range(1, nsteps + 1):
        st = step(st, config)
        # exact step count in time avoids drift from repeated addition
        tn = t0 + n * config.dt
        st = SimState(st.omega.with_data(st.omega.data, tn),
                      st.theta.with_data(st.theta.data, tn), tn)
        defect = max(defect, st.omega.hermitian_defect(), st.theta.hermitian_defect())
        sample(st, n)
    return SimResult(config, np.array(times), reports, np.array(hn), np.array(la),
                     np.array(lat), np.array(las), acc.values[0], acc.values[1],
                     exceeded, st, snaps, defect)


def with_params(config: SimConfig, **changes) -> SimConfig:
    """Copy of ``config`` with ``params`` fields replaced."""
    return replace(config, params=config.params.replace(**changes))
