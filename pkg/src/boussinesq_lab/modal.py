"""Closed-form per-mode solutions of the linearised Boussinesq system.

Every function acts on a single Fourier mode ``(k, xi)`` in the sheared
frame, where the physical vertical frequency at time ``t`` is
``xi - beta*k*t``.  The homogeneous-background (``alpha = 0``) formulas are
exact up to one adaptive quadrature; the unsheared (``beta = 0``) system is
solved through its 2x2 eigen-decomposition.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .core import Mode, ModeState, Params
from .errors import AlphaNotZero, OutOfBranch, QuadratureFailure, ZeroK

__all__ = [
    "phase_integral",
    "heat_factor",
    "heat_channel",
    "exact_theta_alpha0",
    "exact_omega_alpha0",
    "duhamel_alpha0",
    "Omega1Case",
    "omega1_case",
    "omega1_profile",
    "log_abs_omega1",
    "omega1_remainder",
    "log_abs_omega1_remainder",
    "EigenReport",
    "no_shear_matrix",
    "eigen_no_shear",
    "no_shear_propagator",
    "exact_rotation_inviscid",
    "inviscid_couette_mode",
    "growth_exponent_theory",
    "growth_exponent_in_time",
]

DEFAULT_QUAD_TOL = 1e-10
_QUAD_LIMIT = 400
_QUAD_RTOL = 1e-12


def phase_integral(k, xi, s, t, beta=1.0):
    """``int_s^t (xi - beta*k*tau)^2 dtau``, evaluated without cancellation.

    Uses ``(t-s)(a^2 + a b + b^2)/3`` with ``a = xi - beta k s`` and
    ``b = xi - beta k t``; this equals ``(a^3 - b^3)/(3 beta k)`` for
    ``beta k != 0`` and ``xi^2 (t-s)`` otherwise.  Broadcasts over arrays.
    """
    kb = np.multiply(beta, k, dtype=float)
    a = xi - kb * s
    b = xi - kb * t
    out = (np.subtract(t, s, dtype=float)) * (a * a + a * b + b * b) / 3.0
    return out if np.ndim(out) else float(out)


def _log_heat(cx, cy, k, xi, s, t, beta):
    return -cx * np.square(k, dtype=float) * np.subtract(t, s, dtype=float) \
        - cy * phase_integral(k, xi, s, t, beta)


def heat_factor(cx, cy, k, xi, s, t, beta=1.0):
    """Exact decay factor of a sheared mode over ``[s, t]``.

    ``exp(-cx k^2 (t-s) - cy * phase_integral(k, xi, s, t))``; lies in (0, 1]
    for ``s <= t`` and non-negative coefficients.
    """
    out = np.exp(_log_heat(cx, cy, k, xi, s, t, beta))
    return out if np.ndim(out) else float(out)


def heat_channel(params: Params, xi, state0: ModeState, t) -> ModeState:
    """The x-average (k = 0) channel: two decoupled 1D heat flows."""
    return ModeState(math.exp(-params.nu_y * xi * xi * t) * state0.omega_hat,
                     math.exp(-params.eta_y * xi * xi * t) * state0.theta_hat)


def _require_alpha0(params):
    if params.alpha != 0:
        raise AlphaNotZero(f"closed form requires alpha == 0, got {params.alpha}")


def exact_theta_alpha0(params: Params, mode: Mode, theta0, t):
    """Temperature amplitude for ``alpha = 0``: pure heat factor times ``theta0``."""
    _require_alpha0(params)
    return heat_factor(params.eta_x, params.eta_y, mode.k, mode.xi, 0.0, t,
                       params.beta) * theta0


# --------------------------------------------------------------------------
# Omega1 case split and the Duhamel integral
# --------------------------------------------------------------------------

class Omega1Case(enum.Enum):
    """Ordering of the vorticity/temperature diffusivities.

    ``mixed-x-le`` means ``nu_x < eta_x`` and ``nu_y > eta_y``;
    ``mixed-x-ge`` means ``nu_x > eta_x`` and ``nu_y < eta_y``.
    """

    EQUAL = "equal-coefficients"
    NU_LE_ETA = "nu_le_eta_both"
    NU_GE_ETA = "nu_ge_eta_both"
    MIXED_X_LE = "mixed-x-le"
    MIXED_X_GE = "mixed-x-ge"

    @property
    def mixed(self):
        return self in (Omega1Case.MIXED_X_LE, Omega1Case.MIXED_X_GE)


def omega1_case(params: Params) -> Omega1Case:
    dx = params.eta_x - params.nu_x
    dy = params.eta_y - params.nu_y
    if dx == 0 and dy == 0:
        return Omega1Case.EQUAL
    if dx >= 0 and dy >= 0:
        return Omega1Case.NU_LE_ETA
    if dx <= 0 and dy <= 0:
        return Omega1Case.NU_GE_ETA
    return Omega1Case.MIXED_X_LE if dx > 0 else Omega1Case.MIXED_X_GE


def _quad(g, a, b, tol, points=None):
    """Adaptive Gauss-Kronrod on ``[a, b]``: error <= max(tol, 1e-12 |value|)."""
    if b <= a:
        return 0.0
    val, err = integrate.quad(g, a, b, epsabs=tol, epsrel=_QUAD_RTOL, limit=_QUAD_LIMIT,
                              points=points)
    if not np.isfinite(val) or err > max(tol, _QUAD_RTOL * abs(val)):
        raise QuadratureFailure(
            f"quadrature on [{a}, {b}] reached error {err:.3e} > tol {tol:.3e}")
    return val


def _critical_points(k, xi, beta, lo, hi, t=None, forward=True):
    """Where the physical frequency vanishes, mapped to the quadrature variable."""
    if k == 0 or beta == 0:
        return None
    tc = xi / (beta * k)
    p = tc if forward else t - tc
    return [p] if lo < p < hi else None


def _log_duhamel(params: Params, mode: Mode, t, quad_tol):
    """``(log_pre, inner)`` with ``Duhamel(t) = exp(log_pre) * inner``.

    The prefactor carries the smaller coefficient of each pair, so the
    remaining kernel never exceeds one and the integral cannot overflow.
    """
    k, xi, beta = mode.k, mode.xi, params.beta
    mx = min(params.nu_x, params.eta_x)
    my = min(params.nu_y, params.eta_y)
    log_pre = float(_log_heat(mx, my, k, xi, 0.0, t, beta))
    if t <= 0:
        return log_pre, 0.0
    if omega1_case(params) is Omega1Case.EQUAL:
        return log_pre, float(t)
    k2 = float(k) * float(k)
    ax, bx = params.nu_x - mx, params.eta_x - mx
    ay, by = params.nu_y - my, params.eta_y - my

    def g(s):
        return math.exp(-ax * k2 * (t - s) - bx * k2 * s
                        - ay * phase_integral(k, xi, s, t, beta)
                        - by * phase_integral(k, xi, 0.0, s, beta))

    return log_pre, _quad(g, 0.0, t, quad_tol, _critical_points(k, xi, beta, 0.0, t))


def duhamel_alpha0(params: Params, mode: Mode, t, quad_tol=DEFAULT_QUAD_TOL):
    """``int_0^t H_nu(s,t) H_eta(0,s) ds``: the Duhamel integral of the vorticity.

    Multiplied by ``i k theta0`` this is the temperature-forced part of the
    vorticity (called ``f2`` here).  Exact (``t`` times the common heat
    factor) when both diffusivity pairs coincide.
    """
    log_pre, inner = _log_duhamel(params, mode, t, quad_tol)
    return math.exp(log_pre) * inner


def exact_omega_alpha0(params: Params, mode: Mode, omega0, theta0, t,
                       quad_tol=DEFAULT_QUAD_TOL):
    """Vorticity amplitude for ``alpha = 0``: ``f1(t) + i k theta0 * Duhamel(t)``."""
    _require_alpha0(params)
    k, xi = mode.k, mode.xi
    f1 = heat_factor(params.nu_x, params.nu_y, k, xi, 0.0, t, params.beta) * omega0
    if k == 0 or theta0 == 0:
        return complex(f1)
    return complex(f1 + 1j * k * theta0 * duhamel_alpha0(params, mode, t, quad_tol))


@dataclass(frozen=True)
class _Anchor:
    """Improper-integral form ``omega1 = i k theta0 e^{log_pre(t)} int_0^inf K``.

    Forward anchoring integrates over the source time ``s`` with the phase
    ``[0, s]``; backward anchoring over the lag ``sigma = t - s`` with the
    phase ``[t - sigma, t]`` (so the inner integral depends on ``t``).
    """

    rate_x: float
    rate_y: float
    forward: bool
    pre_x: float
    pre_y: float


def _anchor(params: Params, case: Omega1Case) -> _Anchor:
    nx, ny, ex, ey = params.nu_x, params.nu_y, params.eta_x, params.eta_y
    # the y-rate must be non-negative for the kernel to decay as s -> inf
    if ey >= ny:
        return _Anchor(ex - nx, ey - ny, True, nx, ny)
    return _Anchor(nx - ex, ny - ey, False, ex, ey)


def _log_kernel(an: _Anchor, k, xi, beta, t, s):
    k2 = float(k) * float(k)
    if an.forward:
        return -an.rate_x * k2 * s - an.rate_y * phase_integral(k, xi, 0.0, s, beta)
    return -an.rate_x * k2 * s - an.rate_y * phase_integral(k, xi, t - s, t, beta)


def _tail_length(an: _Anchor, k, beta, tol):
    """Upper limit S with ``int_S^inf kernel < tol/10`` from the explicit envelope.

    The kernel is bounded by ``exp(-rx k^2 s - ry k^2 s^3/12)`` because every
    phase integral over an interval of length ``s`` exceeds ``k^2 s^3/12``.
    """
    k2 = float(k * k)
    rx, ry = an.rate_x * k2, an.rate_y * k2 * beta * beta

    def tail_bound(s):
        slope = rx + 0.25 * ry * s * s
        if slope <= 0:
            return math.inf
        return math.exp(-rx * s - ry * s ** 3 / 12.0) / slope

    s = 1.0
    while tail_bound(s) >= tol / 10.0:
        s *= 1.5
        if s > 1e8:
            raise QuadratureFailure("improper integral does not converge")
    return s


def _check_omega1(params, mode, mixed):
    _require_alpha0(params)
    if mode.k == 0:
        raise ZeroK("omega1 is defined for k != 0 only")
    if mixed not in ("duhamel", "anchored"):
        raise ValueError(f"mixed must be 'duhamel' or 'anchored', got {mixed!r}")


def _uses_duhamel(case, mixed):
    return case is Omega1Case.EQUAL or (case.mixed and mixed == "duhamel")


def _omega1_log_parts(params: Params, mode: Mode, t, quad_tol, mixed):
    """``(log prefactor, inner integral)`` with ``omega1 = i k theta0 e^{log_pre} inner``."""
    case = omega1_case(params)
    if _uses_duhamel(case, mixed):
        return _log_duhamel(params, mode, t, quad_tol)
    k, xi, beta = mode.k, mode.xi, params.beta
    an = _anchor(params, case)
    log_pre = float(_log_heat(an.pre_x, an.pre_y, k, xi, 0.0, t, beta))
    upper = _tail_length(an, k, beta, quad_tol)

    def g(s):
        return math.exp(_log_kernel(an, k, xi, beta, t, s))

    inner = _quad(g, 0.0, upper, quad_tol,
                  _critical_points(k, xi, beta, 0.0, upper, t, an.forward))
    return log_pre, inner


def omega1_profile(params: Params, mode: Mode, theta0, t, quad_tol=DEFAULT_QUAD_TOL, *,
                   mixed="duhamel"):
    """Slowly decaying part ``omega1(t)`` of the temperature-forced vorticity.

    When both diffusivity pairs are ordered the same way, the finite Duhamel
    kernel is extended to an improper integral: anchored at ``s = 0`` if the
    temperature diffusivities dominate, at ``s = t`` (lag variable) if the
    viscosities dominate.  Then ``f2 - omega1`` decays with the larger
    coefficient of each pair.  In the equal case ``omega1 = f2``.

    Mixed orderings: the two ends of the Duhamel integral decay at
    (larger x, smaller y) and (smaller x, larger y) rates, so no one-sided
    extension removes both; ``mixed="duhamel"`` (default) sets
    ``omega1 = f2``, while ``mixed="anchored"`` applies the improper
    extension anchored by the vertical ordering.

    Improper upper limits are truncated where the kernel envelope drops below
    ``quad_tol/10``.  Vectorised over ``t``.
    """
    _check_omega1(params, mode, mixed)
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    amp = 1j * mode.k * theta0
    out = np.empty(ts.shape, dtype=complex)
    for i, ti in enumerate(ts):
        log_pre, inner = _omega1_log_parts(params, mode, ti, quad_tol, mixed)
        out[i] = amp * math.exp(log_pre) * inner
    return out if np.ndim(t) else complex(out[0])


def log_abs_omega1(params: Params, mode: Mode, theta0, t, quad_tol=DEFAULT_QUAD_TOL, *,
                   mixed="duhamel"):
    """``log |omega1(t)|`` without forming the (possibly underflowing) product."""
    _check_omega1(params, mode, mixed)
    if theta0 == 0:
        return -math.inf
    log_pre, inner = _omega1_log_parts(params, mode, t, quad_tol, mixed)
    if inner <= 0:
        return -math.inf
    return math.log(abs(mode.k * theta0)) + log_pre + math.log(inner)


def _log_remainder(params: Params, mode: Mode, t, rtol, mixed):
    """``log |f2 - omega1| - log |k theta0|`` as a kernel tail beyond ``t``.

    The tail is integrated after shifting by the kernel's maximum, so the
    result keeps full relative accuracy far below any absolute tolerance.
    """
    case = omega1_case(params)
    if _uses_duhamel(case, mixed):
        return -math.inf
    k, xi, beta = mode.k, mode.xi, params.beta
    an = _anchor(params, case)
    log_pre = float(_log_heat(an.pre_x, an.pre_y, k, xi, 0.0, t, beta))

    def lk(s):
        return _log_kernel(an, k, xi, beta, t, s)

    # bracket the tail until the kernel is decreasing and 60 e-folds below its peak
    span = 1.0
    while True:
        vals = [lk(s) for s in np.linspace(t, t + span, 257)]
        shift = max(vals)
        if vals[-1] < shift - 60.0 and vals[-1] < vals[-2]:
            break
        span *= 2.0
        if span > 1e8:
            raise QuadratureFailure("remainder tail does not decay")
    pts = _critical_points(k, xi, beta, t, t + span, t, an.forward)
    val, err = integrate.quad(lambda s: math.exp(lk(s) - shift), t, t + span, epsabs=0.0,
                              epsrel=rtol, limit=_QUAD_LIMIT, points=pts)
    if not (val > 0 and err <= max(rtol, 1e-8) * val):
        raise QuadratureFailure(f"remainder quadrature error {err:.3e} on value {val:.3e}")
    return log_pre + shift + math.log(val)


def omega1_remainder(params: Params, mode: Mode, theta0, t, rtol=1e-10, *, mixed="duhamel"):
    """``f2(t) - omega1(t)`` computed directly as minus the kernel tail beyond ``t``."""
    _check_omega1(params, mode, mixed)
    lr = _log_remainder(params, mode, t, rtol, mixed)
    if lr == -math.inf:
        return 0j
    return -1j * mode.k * theta0 * math.exp(lr)


def log_abs_omega1_remainder(params: Params, mode: Mode, theta0, t, rtol=1e-10, *,
                             mixed="duhamel"):
    """``log |f2(t) - omega1(t)|``; ``-inf`` whenever ``omega1 = f2``."""
    _check_omega1(params, mode, mixed)
    if theta0 == 0:
        return -math.inf
    return math.log(abs(mode.k * theta0)) + _log_remainder(params, mode, t, rtol, mixed)


# --------------------------------------------------------------------------
# Unsheared system: eigen-decomposition and matrix exponential
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EigenReport:
    """Eigenvalues of the frozen-coefficient 2x2 matrix at one mode."""

    lambda1: complex
    lambda2: complex
    alpha_star: float
    classification: str   # "real-distinct" | "complex-pair" | "degenerate"


def no_shear_matrix(params: Params, mode: Mode, t=0.0) -> np.ndarray:
    """Coefficient matrix of the modal system at time ``t``.

    Uses the physical frequency ``xi - beta k t``; with ``beta = 0`` this is
    the constant-coefficient matrix of the unsheared problem.
    """
    k = float(mode.k)
    xp = mode.xi - params.beta * k * t
    k2 = k * k
    coupling = 1j * k * params.alpha / (k2 + xp * xp) if k != 0 else 0.0
    return np.array([
        [-params.nu_x * k2 - params.nu_y * xp * xp, 1j * k],
        [coupling, -params.eta_x * k2 - params.eta_y * xp * xp],
    ], dtype=complex)


def _half_gap(params, k, xi):
    return 0.5 * (params.eta_x - params.nu_x) * k * k + 0.5 * (params.eta_y - params.nu_y) * xi * xi


def eigen_no_shear(params: Params, mode: Mode) -> EigenReport:
    """Eigenvalues and threshold ``alpha*`` of the unsheared modal matrix.

    ``lambda = tr/2 +- sqrt(D^2 - alpha k^2/(k^2+xi^2))`` with ``D`` half the
    diagonal gap.  The real pair is formed as ``tr/2 - r`` and ``det/(tr/2 - r)``
    so that both the trace and the determinant are reproduced to rounding.
    """
    if params.beta != 0:
        raise ValueError("eigen_no_shear requires beta == 0")
    k, xi = float(mode.k), float(mode.xi)
    if k == 0:
        raise ZeroK("the x-average decouples into heat flow; use heat_channel")
    k2, x2 = k * k, xi * xi
    a = -params.nu_x * k2 - params.nu_y * x2
    d = -params.eta_x * k2 - params.eta_y * x2
    gap = _half_gap(params, k, xi)
    c = params.alpha * k2 / (k2 + x2)
    half_tr = 0.5 * (a + d)
    det = a * d + c
    alpha_star = (k2 + x2) / k2 * gap * gap
    if params.alpha > alpha_star:
        s = math.sqrt(c - gap * gap)
        lam1, lam2 = complex(half_tr, s), complex(half_tr, -s)
        label = "complex-pair"
    elif params.alpha < alpha_star:
        r = math.sqrt(gap * gap - c)
        lam1 = half_tr - r
        lam2 = det / lam1 if lam1 != 0 else half_tr + r
        lam1, lam2 = complex(lam2), complex(lam1)   # lambda1 carries the + root
        label = "real-distinct"
    else:
        lam1 = lam2 = complex(half_tr)
        label = "degenerate"
    return EigenReport(lam1, lam2, alpha_star, label)


def no_shear_propagator(params: Params, mode: Mode, t) -> np.ndarray:
    """``exp(t M)`` of the unsheared modal matrix.

    Eigenvector reconstruction with ``v_j = (i k, lambda_j - M_00)`` in the
    non-degenerate case; the Jordan form ``e^{lambda t}(I + t(M - lambda I))``
    at ``alpha = alpha*``.
    """
    m = no_shear_matrix(params.replace(beta=0.0), mode)
    rep = eigen_no_shear(params.replace(beta=0.0), mode)
    if rep.classification == "degenerate":
        lam = rep.lambda1
        return np.exp(lam * t) * (np.eye(2) + t * (m - lam * np.eye(2)))
    v = np.array([[m[0, 1], m[0, 1]],
                  [rep.lambda1 - m[0, 0], rep.lambda2 - m[0, 0]]], dtype=complex)
    e = np.diag(np.exp(np.array([rep.lambda1, rep.lambda2]) * t))
    return v @ e @ np.linalg.inv(v)


def exact_rotation_inviscid(alpha, mode: Mode, state0: ModeState, t) -> ModeState:
    """Inviscid, unsheared evolution: rotation with frequency ``k sqrt(alpha)/|(k, xi)|``.

    Conserves ``alpha |omega|^2 + (k^2 + xi^2) |theta|^2``.
    """
    if mode.k == 0:
        raise ZeroK("rotation solution requires k != 0")
    if alpha <= 0:
        raise ValueError("exact_rotation_inviscid requires alpha > 0")
    mag = math.hypot(mode.k, mode.xi)
    ra = math.sqrt(alpha)
    phase = mode.k * ra / mag * t
    c, s = math.cos(phase), math.sin(phase)
    w0, th0 = state0.omega_hat, state0.theta_hat
    return ModeState(c * w0 + 1j * mag / ra * s * th0,
                     1j * ra / mag * s * w0 + c * th0)


def inviscid_couette_mode(beta, mode: Mode, state0: ModeState, t) -> ModeState:
    """``alpha = 0`` inviscid solution: ``(omega0 + i k t theta0, theta0)``.

    In the sheared frame the shear rate drops out entirely.
    """
    del beta
    return ModeState(state0.omega_hat + 1j * mode.k * t * state0.theta_hat,
                     state0.theta_hat)


def growth_exponent_theory(alpha) -> float:
    """``1/4 + sqrt(1 - 4 alpha)/4``, the exponent of ``|z|`` with ``z = -t^2``.

    This is the leading hypergeometric asymptotic exponent in the variable
    ``z``.  For ``alpha > 1/4`` the square root turns imaginary and
    :class:`OutOfBranch` is raised carrying the real part 1/4.
    """
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if alpha > 0.25:
        raise OutOfBranch(alpha, 0.25)
    return 0.25 + 0.25 * math.sqrt(1.0 - 4.0 * alpha)


def growth_exponent_in_time(alpha) -> float:
    """Growth exponent of ``|omega(t)|`` in ``t`` itself: twice the ``|z|`` exponent.

    Solves ``p(p - 1) + alpha = 0`` for the dominant root, i.e. the large-time
    behaviour of ``y'' + alpha/(1+t^2) y = 0``; tends to 1 as alpha -> 0.
    """
    return 2.0 * growth_exponent_theory(alpha)
