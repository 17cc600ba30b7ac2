"""Log-space fits and envelope checks on sampled time series."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import NonPositiveValues, WindowTooSmall

__all__ = [
    "DecayFit",
    "EnvelopeReport",
    "MIN_SAMPLES",
    "default_window",
    "fit_exponential_rate",
    "fit_algebraic_exponent",
    "envelope_check",
]

MIN_SAMPLES = 8


@dataclass(frozen=True)
class DecayFit:
    """Least-squares slope in log space.

    ``rate_or_exponent`` is the positive decay rate for ``kind ==
    "exponential"`` and the signed power for ``kind == "algebraic"``;
    ``residual`` is the RMS of the log-space fit errors inside ``window``.
    """

    kind: str
    rate_or_exponent: float
    residual: float
    window: tuple
    samples: int = 0

    def as_dict(self):
        return {"kind": self.kind, "rate_or_exponent": self.rate_or_exponent,
                "residual": self.residual, "window": list(self.window),
                "samples": self.samples}


@dataclass(frozen=True)
class EnvelopeReport:
    """``margin = max values/envelope`` over the samples; ``passed`` iff ``<= slack``."""

    margin: float
    slack: float
    passed: bool
    worst_time: float


def default_window(times):
    """Later of ``t = 5`` and 20% of the series, up to the last sample."""
    times = np.asarray(times, dtype=float)
    t0, t1 = float(times[0]), float(times[-1])
    return (max(5.0, t0 + 0.2 * (t1 - t0)), t1)


def _select(times, values, window):
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape or times.ndim != 1:
        raise ValueError("times and values must be 1D arrays of equal length")
    if window is None:
        window = default_window(times)
    lo, hi = float(window[0]), float(window[1])
    sel = (times >= lo) & (times <= hi)
    n = int(np.count_nonzero(sel))
    if n < MIN_SAMPLES:
        raise WindowTooSmall(f"{n} samples in window [{lo}, {hi}], need {MIN_SAMPLES}")
    v = values[sel]
    if np.any(~(v > 0)):
        raise NonPositiveValues(f"non-positive values inside window [{lo}, {hi}]")
    return times[sel], v, (lo, hi)


def _line(x, y):
    a = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    resid = y - a @ coef
    return float(coef[0]), float(math.sqrt(np.mean(resid ** 2)))


def fit_exponential_rate(times, values, window=None) -> DecayFit:
    """Decay rate ``r`` of ``values ~ C exp(-r t)`` by least squares on ``ln values``."""
    t, v, win = _select(times, values, window)
    slope, res = _line(t, np.log(v))
    return DecayFit("exponential", -slope, res, win, t.size)


def fit_algebraic_exponent(times, values, window=None) -> DecayFit:
    """Exponent ``p`` of ``values ~ C t^p`` by least squares on ``ln values`` vs ``ln t``."""
    t, v, win = _select(times, values, window)
    if np.any(t <= 0):
        raise NonPositiveValues("algebraic fits need positive times")
    slope, res = _line(np.log(t), np.log(v))
    return DecayFit("algebraic", slope, res, win, t.size)


def envelope_check(times, values, envelope: Callable, slack_C: float,
                   *, log_space: bool = False) -> EnvelopeReport:
    """Maximum of ``values / envelope(times)``.

    With ``log_space=True`` both ``values`` and ``envelope`` are natural
    logarithms, which keeps deeply decayed series representable.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    env = np.asarray(envelope(times), dtype=float)
    if log_space:
        ratio = values - env
        i = int(np.argmax(ratio))
        margin = float(math.exp(min(ratio[i], 700.0)))
    else:
        if np.any(env <= 0):
            raise ValueError("envelope must be positive on all samples")
        ratio = values / env
        i = int(np.argmax(ratio))
        margin = float(ratio[i])
    return EnvelopeReport(margin, float(slack_C), margin <= slack_C, float(times[i]))
