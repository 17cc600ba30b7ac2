"""Adaptive integration of the per-mode linear systems.

The stepping itself lives in :mod:`boussinesq_lab.kernels` (compiled or pure
Python); this module validates inputs, chooses a first step and packages the
result as a :class:`Trajectory`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import Mode, ModeState, Params
from .errors import BoussinesqLabError, StepSizeUnderflow
from .modal import no_shear_matrix

__all__ = [
    "Trajectory",
    "StepBudgetExceeded",
    "linear_rhs",
    "integrate_mode",
    "integrate_second_order",
    "theta_from_derivative",
    "UNDERFLOW_FLOOR",
]

# Absolute tolerance floor: keeps the norm-wise controller away from
# subnormal arithmetic once a dissipative mode has decayed to nothing.
UNDERFLOW_FLOOR = 1e-250


class StepBudgetExceeded(BoussinesqLabError, RuntimeError):
    """The integrator used its whole step budget before reaching t1."""


@dataclass(frozen=True)
class Trajectory:
    """Accepted (or requested) output times and complex two-component states.

    ``states[:, 0]`` is the vorticity amplitude (or ``y``) and ``states[:, 1]``
    the temperature amplitude (or ``y'`` for second-order runs).
    """

    times: np.ndarray
    states: np.ndarray
    tol_used: float
    nsteps: int = 0
    nrejected: int = 0

    def __post_init__(self):
        if self.times.ndim != 1 or self.states.shape != (self.times.size, 2):
            raise ValueError("times and states must have matching lengths")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")

    def __len__(self):
        return self.times.size

    @property
    def omega(self):
        return self.states[:, 0]

    @property
    def theta(self):
        return self.states[:, 1]

    @property
    def final(self) -> ModeState:
        return ModeState.from_array(self.states[-1])

    def mode_states(self):
        return [ModeState.from_array(row) for row in self.states]


def linear_rhs(params: Params, t, mode: Mode, state: ModeState) -> ModeState:
    """Right-hand side of the sheared modal system at time ``t``.

    Matrix entries ``-nu_x k^2 - nu_y (xi - beta k t)^2``, ``i k``,
    ``i k alpha/(k^2 + (xi - beta k t)^2)`` and the temperature diagonal; the
    coupling is zero on the x-average channel.
    """
    return ModeState.from_array(no_shear_matrix(params, mode, t) @ state.as_array())


def _check_span(t0, t1, tol):
    if not (math.isfinite(t0) and math.isfinite(t1)) or t1 < t0:
        raise ValueError(f"need finite t0 <= t1, got [{t0}, {t1}]")
    if not tol > 0:
        raise ValueError("tol must be positive")


def _check_eval(t_eval, t0, t1):
    if t_eval is None:
        return None
    arr = np.ascontiguousarray(t_eval, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("t_eval must be a non-empty 1D array")
    if np.any(np.diff(arr) <= 0) or arr[0] < t0 or arr[-1] > t1:
        raise ValueError("t_eval must be strictly increasing inside [t0, t1]")
    return arr


def _first_step(y, f, span, tol):
    """Crude initial step from the state and its derivative norms."""
    d0 = float(np.linalg.norm(y))
    d1 = float(np.linalg.norm(f))
    if d0 < 1e-5 or d1 < 1e-5:
        h = 1e-6
    else:
        h = 0.01 * d0 / d1
    h *= min(1.0, (tol / 1e-6) ** 0.2)
    return max(min(h, span), 1e-12 * max(span, 1.0))


def _finish(out, tol, t_eval):
    times, states, nsteps, nrej, status = out
    if status == 1:
        raise StepSizeUnderflow(
            f"step size fell below 1e-14 of the span at t = {times[-1] if len(times) else 'start'}")
    if status == 2:
        raise StepBudgetExceeded(f"step budget exhausted after {nsteps} accepted steps")
    return Trajectory(times, states, tol, int(nsteps), int(nrej))


def integrate_mode(params: Params, mode: Mode, state0: ModeState, t0, t1, tol=1e-10, *,
                   atol=UNDERFLOW_FLOOR, integrating_factor=False, t_eval=None,
                   first_step=None, max_steps=2_000_000, backend=None) -> Trajectory:
    """Integrate one sheared mode with Dormand-Prince 5(4).

    Parameters
    ----------
    params, mode, state0
        Physical constants, the ``(k, xi)`` label and the initial amplitudes.
    t0, t1 : float
        Time span, ``t0 <= t1``.
    tol : float
        Norm-wise relative tolerance of each step's local error estimate.
    atol : float
        Absolute tolerance added to the error scale.
    integrating_factor : bool
        Multiply out the exact diagonal heat factors (Lawson scheme); removes
        the stiffness of the dissipation at late times.
    t_eval : array_like, optional
        Output times.  Steps are shortened to land on each of them exactly;
        without it every accepted step is returned.
    backend : {None, "cython", "python"}
        Kernel override; ``None`` uses the import-time selection.
    """
    _check_span(t0, t1, tol)
    t_eval = _check_eval(t_eval, t0, t1)
    y0 = state0.as_array()
    p = np.array([params.alpha, params.beta, params.nu_x, params.nu_y,
                  params.eta_x, params.eta_y, float(mode.k), float(mode.xi)])
    if first_step is None:
        first_step = _first_step(y0, linear_rhs(params, t0, mode, state0).as_array(),
                                 t1 - t0, tol)
    if t1 == t0:
        return Trajectory(np.array([float(t0)]), y0[None, :].copy(), tol)
    impl = kernels.load(backend)
    out = impl.integrate_linear(p, y0, float(t0), float(t1), float(tol), float(atol),
                                float(first_step), bool(integrating_factor), t_eval,
                                int(max_steps))
    return _finish(out, tol, t_eval)


def integrate_second_order(alpha, t0, t1, y0, yp0, tol=1e-10, *, beta=1.0,
                           atol=UNDERFLOW_FLOOR, t_eval=None, first_step=None,
                           max_steps=2_000_000, backend=None) -> Trajectory:
    """Integrate ``y'' + alpha beta^2/(1 + tau^2) y = 0`` in the shifted time ``tau``.

    ``tau = 0`` is the critical time ``t = xi/k`` of the underlying mode.  The
    returned states hold ``(y, y')``; see :func:`theta_from_derivative`.
    """
    _check_span(t0, t1, tol)
    t_eval = _check_eval(t_eval, t0, t1)
    c = float(alpha) * float(beta) ** 2
    y = np.array([complex(y0), complex(yp0)])
    if first_step is None:
        f = np.array([y[1], -c / (1.0 + t0 * t0) * y[0]])
        first_step = _first_step(y, f, t1 - t0, tol)
    if t1 == t0:
        return Trajectory(np.array([float(t0)]), y[None, :].copy(), tol)
    impl = kernels.load(backend)
    out = impl.integrate_osc(c, y, float(t0), float(t1), float(tol), float(atol),
                             float(first_step), t_eval, int(max_steps))
    return _finish(out, tol, t_eval)


def theta_from_derivative(yp, k):
    """Temperature amplitude ``theta = (1/(i k)) d omega/dt`` of the inviscid system."""
    if k == 0:
        raise ValueError("k must be non-zero")
    return np.asarray(yp) / (1j * k)
