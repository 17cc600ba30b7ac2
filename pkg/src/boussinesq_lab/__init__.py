"""Spectral laboratory for the 2D Boussinesq equations near Couette flow.

Per-mode closed forms (:mod:`.modal`), an adaptive modal integrator
(:mod:`.ode`), multiplier-weighted energies (:mod:`.multiplier`), a dealiased
pseudospectral solver (:mod:`.nonlinear`), log-space fitting
(:mod:`.diagnostics`) and a scenario runner (:mod:`.cli`).
"""
from .core import EnergyReport, Mode, ModeState, Params, SpectralField, sobolev_weight, validate
from .errors import BoussinesqLabError
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoussinesqLabError",
    "EnergyReport",
    "Mode",
    "ModeState",
    "Params",
    "SpectralField",
    "sobolev_weight",
    "validate",
]
