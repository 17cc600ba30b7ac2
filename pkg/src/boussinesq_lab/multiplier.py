"""The mixing multiplier ``M`` and the energy functionals built on it.

``M(t, k, xi) = exp(-(1/|k|) [arctan(t - xi/k) + arctan(xi/k)])`` solves
``-dM/dt / M = |k| / (k^2 + (xi - k t)^2)`` with ``M(0) = 1``; the weight is
``A = M <D>^N``.  Modal sums use label frequencies ``(k, xi)`` for ``<D>`` and
the physical frequency ``xi - beta k t`` for ``grad_t``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .core import EnergyReport, Mode, ModeState, Params, SpectralField, sobolev_weight
from .errors import ZeroK

__all__ = [
    "MultiplierParams",
    "FLOOR_C",
    "multiplier_M",
    "mdot_ratio",
    "mdot_M",
    "weight_A",
    "energy_no_shear",
    "energy_sheared",
    "BootstrapAccumulator",
    "energy_bootstrap",
    "energy_largealpha",
    "largealpha_dissipation",
]

FLOOR_C = math.exp(-math.pi)


@dataclass(frozen=True)
class MultiplierParams:
    """Lower bound ``c`` of ``M`` and the construction tag."""

    floor_c: float = FLOOR_C
    construction: str = "exact-integral"

    def __post_init__(self):
        if not 0 < self.floor_c <= 1:
            raise ValueError("floor_c must lie in (0, 1]")
        if self.construction != "exact-integral":
            raise ValueError("only the exact-integral construction is implemented")


def _kx(mode, k, xi):
    if mode is not None:
        return mode.k, mode.xi
    return k, xi


def multiplier_M(t, mode: Mode | None = None, *, k=None, xi=None):
    """Multiplier ``M(t, k, xi)``; broadcasts and accepts complex ``t``.

    Equals one at ``t = 0`` and on ``k = 0``, and stays in ``[e^{-pi}, 1]``
    for ``t >= 0``.
    """
    k, xi = _kx(mode, k, xi)
    k = np.asarray(k, dtype=float)
    xi = np.asarray(xi, dtype=float)
    t = np.asarray(t)
    nz = k != 0
    ks = np.where(nz, k, 1.0)
    r = xi / ks
    expo = -(np.arctan(t - r) + np.arctan(r)) / np.abs(ks)
    out = np.where(nz, np.exp(expo), 1.0 + 0.0 * t)
    return out if out.ndim else out[()]


def mdot_ratio(t, mode: Mode | None = None, *, k=None, xi=None):
    """``-dM/dt / M = |k|/(k^2 + (xi - k t)^2)``; requires ``k != 0``."""
    k, xi = _kx(mode, k, xi)
    k = np.asarray(k, dtype=float)
    if np.any(k == 0):
        raise ZeroK("mdot_ratio is defined for k != 0 only")
    xp = np.asarray(xi, dtype=float) - k * np.asarray(t)
    out = np.abs(k) / (k * k + xp * xp)
    return out if np.ndim(out) else out[()]


def mdot_M(t, *, k, xi):
    """``-dM/dt * M`` on label arrays; zero on the x-average channel."""
    k = np.asarray(k, dtype=float)
    xi = np.asarray(xi, dtype=float)
    m = multiplier_M(t, k=k, xi=xi)
    nz = k != 0
    ks = np.where(nz, k, 1.0)
    xp = xi - ks * t
    ratio = np.where(nz, np.abs(ks) / (ks * ks + xp * xp), 0.0)
    return m * m * ratio


def weight_A(t, n, *, k, xi):
    """``A = M <D>^N`` on label arrays."""
    return multiplier_M(t, k=k, xi=xi) * sobolev_weight(n, k=k, xi=xi)


# --------------------------------------------------------------------------
# per-mode energies
# --------------------------------------------------------------------------

def _modal_arrays(states: Mapping[Mode, ModeState]):
    modes = list(states)
    k = np.array([m.k for m in modes], dtype=float)
    xi = np.array([m.xi for m in modes], dtype=float)
    w = np.array([states[m].omega_hat for m in modes], dtype=complex)
    th = np.array([states[m].theta_hat for m in modes], dtype=complex)
    return k, xi, w, th


def _linear_energy(k, xi_grad, xi_label, w, th, params: Params):
    ws = sobolev_weight(params.sobolev_n, k=k, xi=xi_label) ** 2
    k2, x2 = k * k, xi_grad * xi_grad
    aw = np.abs(w) ** 2
    at = np.abs(th) ** 2
    value = float(np.sum(ws * (params.alpha * aw + (k2 + x2) * at)))
    diss = 2.0 * float(np.sum(ws * (params.alpha * (params.nu_x * k2 + params.nu_y * x2) * aw
                                    + (params.eta_x * k2 + params.eta_y * x2) * (k2 + x2) * at)))
    return value, diss


def energy_no_shear(states: Mapping[Mode, ModeState], params: Params, t=0.0) -> EnergyReport:
    """``alpha ||omega||_{H^N}^2 + ||grad theta||_{H^N}^2`` and its exact dissipation.

    The dissipation entry is minus the time derivative of the value along the
    unsheared linear flow:
    ``2 sum <D>^{2N} [alpha (nu_x k^2 + nu_y xi^2)|omega|^2
    + (eta_x k^2 + eta_y xi^2)(k^2 + xi^2)|theta|^2]``; the coupling terms cancel.
    """
    if params.beta != 0:
        raise ValueError("energy_no_shear requires beta == 0")
    k, xi, w, th = _modal_arrays(states)
    value, diss = _linear_energy(k, xi, xi, w, th, params)
    return EnergyReport(float(t), {"no_shear": (value, diss)})


def energy_sheared(states: Mapping[Mode, ModeState], params: Params, t, *,
                   comoving=False) -> EnergyReport:
    """``alpha ||omega||^2 + ||d_x theta||^2 + ||(d_y - t beta d_x) theta||^2`` in H^N.

    With label storage (default) the moving-frame derivative has frequency
    ``xi - beta k t``; with ``comoving=True`` the stored ``xi`` is taken to be
    that physical frequency already.  The dissipation entry holds the
    diffusive part ``2 sum <D>^{2N}[alpha(nu.|kappa|^2)|omega|^2
    + (eta.|kappa|^2)|kappa|^2 |theta|^2]``; the shear adds a further
    indefinite term not included here.
    """
    k, xi, w, th = _modal_arrays(states)
    xg = xi if comoving else xi - params.beta * k * t
    value, diss = _linear_energy(k, xg, xi, w, th, params)
    return EnergyReport(float(t), {"sheared": (value, diss)})


# --------------------------------------------------------------------------
# field energies
# --------------------------------------------------------------------------

def _field_weights(field: SpectralField, params: Params, t):
    k, xi = field.wavenumbers()
    xp = xi - params.beta * k * t
    a2 = weight_A(t, params.sobolev_n, k=k, xi=xi) ** 2
    mm = mdot_M(t, k=k, xi=xi) * sobolev_weight(params.sobolev_n, k=k, xi=xi) ** 2
    return k * k, xp * xp, a2, mm


class BootstrapAccumulator:
    """Running ``E_omega``, ``E_theta`` over a uniformly sampled series.

    ``E = ||A f||^2_{L^inf L^2} + ||grad_t A f||^2_{L^2 L^2, diff}
    + ||sqrt(-dM/dt M) <D>^N f||^2_{L^2 L^2}``, the diffusive term weighted by
    ``(c_x k^2 + c_y (xi - beta k t)^2)``.  The supremum is a running max and
    the time integrals use the trapezoidal rule.
    """

    def __init__(self, params: Params):
        self.params = params
        self.sup = [0.0, 0.0]
        self.integral = [0.0, 0.0]
        self._last = None
        self._last_t = None
        self.count = 0

    def _densities(self, omega: SpectralField, theta: SpectralField, t):
        p = self.params
        k2, x2, a2, mm = _field_weights(omega, p, t)
        out = []
        for f, cx, cy in ((omega, p.nu_x, p.nu_y), (theta, p.eta_x, p.eta_y)):
            e = np.abs(f.data) ** 2
            sup = float(np.sum(a2 * e))
            rate = float(np.sum(((cx * k2 + cy * x2) * a2 + mm) * e))
            out.append((sup, rate))
        return out

    def add(self, omega: SpectralField, theta: SpectralField, t):
        dens = self._densities(omega, theta, t)
        for i, (sup, rate) in enumerate(dens):
            self.sup[i] = max(self.sup[i], sup)
            if self._last is not None:
                self.integral[i] += 0.5 * (t - self._last_t) * (rate + self._last[i][1])
        self._last = dens
        self._last_t = t
        self.count += 1

    @property
    def values(self):
        return (self.sup[0] + self.integral[0], self.sup[1] + self.integral[1])


def energy_bootstrap(series: Iterable, params: Params, dt) -> tuple:
    """``(E_omega, E_theta)`` of a series of ``(omega, theta)`` SpectralField pairs.

    Sample ``j`` is taken at time ``t0 + j*dt`` where ``t0`` is the first
    field's ``frame_time``.
    """
    acc = BootstrapAccumulator(params)
    t0 = None
    for j, (omega, theta) in enumerate(series):
        if t0 is None:
            t0 = omega.frame_time
        acc.add(omega, theta, t0 + j * dt)
    return acc.values


def energy_largealpha(fields, params: Params, t) -> float:
    """``alpha ||A omega||^2 + <A theta, -Delta_t A theta>``.

    ``fields`` is an ``(omega, theta)`` pair of SpectralFields.
    """
    omega, theta = fields
    k2, x2, a2, _ = _field_weights(omega, params, t)
    return float(np.sum(a2 * (params.alpha * np.abs(omega.data) ** 2
                              + (k2 + x2) * np.abs(theta.data) ** 2)))


def largealpha_dissipation(fields, params: Params, t) -> dict:
    """Dissipation densities accompanying :func:`energy_largealpha`.

    Returns ``omega``: ``alpha sum (nu_x k^2 + nu_y xi_p^2)|A omega|^2``,
    ``theta_gradient``: ``sum (eta_x k^2 + eta_y xi_p^2)|A theta|^2`` and
    ``theta_squared``: ``sum (eta_x k^2 + eta_y xi_p^2)|kappa|^2 |A theta|^2``,
    i.e. the gradient and squared-operator weightings of the thermal term.
    """
    omega, theta = fields
    k2, x2, a2, _ = _field_weights(omega, params, t)
    ew = np.abs(omega.data) ** 2
    et = np.abs(theta.data) ** 2
    p = params
    return {
        "omega": float(p.alpha * np.sum((p.nu_x * k2 + p.nu_y * x2) * a2 * ew)),
        "theta_gradient": float(np.sum((p.eta_x * k2 + p.eta_y * x2) * a2 * et)),
        "theta_squared": float(np.sum((p.eta_x * k2 + p.eta_y * x2) * (k2 + x2) * a2 * et)),
    }
