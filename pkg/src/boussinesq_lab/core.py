"""Parameters, mode indexing and spectral storage shared by every solver.

All spectral data lives in the sheared frame ``(x + beta*t*y, y)``.  A stored
vertical frequency ``xi`` is the Lagrangian label of a Fourier mode; the
physical vertical frequency at frame time ``t`` is ``xi - beta*k*t``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import NegativeCoefficient

__all__ = [
    "Params",
    "Mode",
    "ModeState",
    "SpectralField",
    "EnergyReport",
    "validate",
    "sobolev_weight",
    "retained_halfwidth",
]


@dataclass(frozen=True)
class Params:
    """Physical constants of the linearised/nonlinear Boussinesq problem.

    ``alpha`` is the hydrostatic slope, ``beta`` the Couette shear rate, and
    the four diffusivities act on ``d_xx`` and ``d_yy`` of vorticity (nu) and
    temperature (eta).  ``sobolev_n`` is the index ``N`` of the H^N norms.
    """

    alpha: float = 0.0
    beta: float = 1.0
    nu_x: float = 0.0
    nu_y: float = 0.0
    eta_x: float = 0.0
    eta_y: float = 0.0
    sobolev_n: int = 0

    @classmethod
    def isotropic(cls, nu, eta, alpha=0.0, beta=1.0, sobolev_n=0):
        return cls(alpha=alpha, beta=beta, nu_x=nu, nu_y=nu, eta_x=eta,
                   eta_y=eta, sobolev_n=sobolev_n)

    @property
    def dissipation(self):
        return (self.nu_x, self.nu_y, self.eta_x, self.eta_y)

    @property
    def inviscid(self):
        return not any(self.dissipation)

    def replace(self, **changes) -> "Params":
        values = {**self.__dict__, **changes}
        return Params(**values)

    def as_dict(self):
        return dict(self.__dict__)


@dataclass(frozen=True)
class Mode:
    """One Fourier frequency: integer ``k`` on the torus, real ``xi`` on the line."""

    k: int
    xi: float

    def __post_init__(self):
        if not math.isfinite(self.xi):
            raise ValueError(f"non-finite xi: {self.xi!r}")


@dataclass(frozen=True)
class ModeState:
    """Complex vorticity/temperature amplitudes of a single sheared-frame mode."""

    omega_hat: complex
    theta_hat: complex

    def __post_init__(self):
        if not (np.isfinite(self.omega_hat) and np.isfinite(self.theta_hat)):
            raise ValueError("ModeState components must be finite")

    @classmethod
    def from_array(cls, arr) -> "ModeState":
        return cls(complex(arr[0]), complex(arr[1]))

    def as_array(self) -> np.ndarray:
        return np.array([self.omega_hat, self.theta_hat], dtype=complex)

    def __mul__(self, c):
        return ModeState(self.omega_hat * c, self.theta_hat * c)

    __rmul__ = __mul__


def validate(params: Params) -> Params:
    """Return ``params`` unchanged, or raise NegativeCoefficient."""
    for name in ("alpha", "nu_x", "nu_y", "eta_x", "eta_y"):
        value = getattr(params, name)
        if not math.isfinite(value):
            raise NegativeCoefficient(f"{name} must be finite, got {value!r}")
        if value < 0:
            raise NegativeCoefficient(f"{name} must be >= 0, got {value!r}")
    if not math.isfinite(params.beta):
        raise ValueError(f"beta must be finite, got {params.beta!r}")
    if int(params.sobolev_n) != params.sobolev_n or params.sobolev_n < 0:
        raise ValueError(f"sobolev_n must be a non-negative integer, got {params.sobolev_n!r}")
    return params


def sobolev_weight(n, mode=None, *, k=None, xi=None):
    """Bessel-potential weight ``(1 + k^2 + xi^2)^(n/2)``.

    Either pass a :class:`Mode` or keyword arrays ``k`` and ``xi``; the array
    form broadcasts.
    """
    if n < 0:
        raise ValueError("Sobolev index must be non-negative")
    if mode is not None:
        k, xi = mode.k, mode.xi
    base = 1.0 + np.square(k, dtype=float) + np.square(xi, dtype=float)
    if n == 0:
        return np.ones_like(base) if np.ndim(base) else 1.0
    out = base ** (0.5 * n)
    return out if np.ndim(out) else float(out)


def retained_halfwidth(n_points, dealias_fraction):
    """Largest retained |index| on an ``n_points`` FFT axis.

    With ``dealias_fraction = 2/3`` this is the Orszag cut ``3K < n``; the
    Nyquist index is always dropped so that real fields stay conjugate-paired.
    """
    if not 0 < dealias_fraction <= 1:
        raise ValueError("dealias_fraction must lie in (0, 1]")
    return max(0, math.ceil(dealias_fraction * n_points / 2) - 1)


@dataclass(frozen=True)
class SpectralField:
    """Fourier coefficients of one scalar on the doubly periodic truncation.

    ``data[i, j]`` holds the coefficient of ``exp(i(k x + xi y))`` with
    ``k = fftfreq(nx)*nx`` and ``xi = dxi * fftfreq(ny)*ny`` (numpy FFT
    ordering); coefficients are normalised so that the mean-square of the
    physical field equals ``sum |data|^2``.  Only ``|k| <= grid_k`` and
    ``|xi/dxi| <= grid_xi`` may be non-zero.
    """

    data: np.ndarray
    grid_k: int
    grid_xi: int
    dxi: float
    frame_time: float = 0.0

    def __post_init__(self):
        if self.data.ndim != 2:
            raise ValueError("SpectralField data must be two-dimensional")
        nx, ny = self.data.shape
        if 2 * self.grid_k + 1 > nx or 2 * self.grid_xi + 1 > ny:
            raise ValueError("retained band does not fit inside the FFT grid")

    @classmethod
    def zeros(cls, nx, ny, dxi=1.0, dealias_fraction=2.0 / 3.0, frame_time=0.0):
        return cls(np.zeros((nx, ny), dtype=complex),
                   retained_halfwidth(nx, dealias_fraction),
                   retained_halfwidth(ny, dealias_fraction), dxi, frame_time)

    @property
    def shape(self):
        return self.data.shape

    def wavenumbers(self):
        """Broadcastable ``(k, xi)`` label arrays of shape (nx, 1) and (1, ny)."""
        nx, ny = self.data.shape
        k = np.fft.fftfreq(nx, 1.0 / nx)[:, None]
        xi = self.dxi * np.fft.fftfreq(ny, 1.0 / ny)[None, :]
        return k, xi

    def band_mask(self):
        nx, ny = self.data.shape
        ik = np.abs(np.fft.fftfreq(nx, 1.0 / nx))[:, None]
        ixi = np.abs(np.fft.fftfreq(ny, 1.0 / ny))[None, :]
        return (ik <= self.grid_k) & (ixi <= self.grid_xi)

    def with_data(self, data, frame_time=None) -> "SpectralField":
        t = self.frame_time if frame_time is None else frame_time
        return SpectralField(data, self.grid_k, self.grid_xi, self.dxi, t)

    def conjugate_partner(self) -> np.ndarray:
        """``conj(data(-k, -xi))`` laid out on the same index grid."""
        return np.conj(np.roll(self.data[::-1, ::-1], 1, axis=(0, 1)))

    def hermitian_defect(self) -> float:
        """max |data(-k,-xi) - conj data(k,xi)|, relative to max |data|."""
        scale = np.max(np.abs(self.data))
        if scale == 0:
            return 0.0
        return float(np.max(np.abs(self.data - self.conjugate_partner())) / scale)

    def is_hermitian(self, tol=1e-13) -> bool:
        return self.hermitian_defect() <= tol

    def sobolev_norm_sq(self, n) -> float:
        k, xi = self.wavenumbers()
        w = sobolev_weight(n, k=k, xi=xi)
        return float(np.sum(w * w * np.abs(self.data) ** 2))


@dataclass(frozen=True)
class EnergyReport:
    """Energy functionals at one time: ``entries[name] = (value, dissipation)``."""

    time: float
    entries: Mapping[str, tuple] = field(default_factory=dict)

    def __post_init__(self):
        for name, (value, diss) in self.entries.items():
            if value < 0 or diss < 0:
                raise ValueError(f"energy entry {name!r} must be non-negative")

    def value(self, name):
        return self.entries[name][0]

    def dissipation(self, name):
        return self.entries[name][1]
