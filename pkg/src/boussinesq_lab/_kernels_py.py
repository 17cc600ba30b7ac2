"""Pure-Python adaptive Dormand-Prince kernels.

Reference implementation of the compiled ``_kernels`` extension; both follow
the same operation order so their results agree to rounding.  Systems:

* ``integrate_linear``: the 2x2 sheared modal system for one ``(k, xi)``,
  optionally with a Lawson integrating factor that removes the diagonal
  heat flow exactly.
* ``integrate_osc``: ``y'' + c/(1 + tau^2) y = 0`` as a first-order pair.

Status codes: 0 ok, 1 step-size underflow, 2 step budget exhausted.
"""
import math

import numpy as np

BACKEND = "python"

# Dormand-Prince 5(4) tableau
C2, C3, C4, C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
A21 = 1.0 / 5.0
A31, A32 = 3.0 / 40.0, 9.0 / 40.0
A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
A51, A52, A53, A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
A61, A62, A63, A64, A65 = (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0,
                           49.0 / 176.0, -5103.0 / 18656.0)
B1, B3, B4, B5, B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
E1, E3, E4, E5, E6, E7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                          -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

SAFETY = 0.9
EXPO1 = 0.17
EXPO2 = 0.04
FAC_MIN = 0.2
FAC_MAX = 10.0


def _phase(kb, xi, s, t):
    a = xi - kb * s
    b = xi - kb * t
    return (t - s) * (a * a + a * b + b * b) / 3.0


class _Linear:
    __slots__ = ("alpha", "kb", "k", "k2", "xi", "nux", "nuy", "etax", "etay",
                 "use_if", "anchor")

    def __init__(self, p, use_if):
        self.alpha, beta, self.nux, self.nuy, self.etax, self.etay, k, self.xi = (float(v) for v in p)
        self.k = k
        self.k2 = k * k
        self.kb = k * beta
        self.use_if = use_if
        self.anchor = 0.0

    def rhs(self, t, y0, y1):
        xp = self.xi - self.kb * t
        q = xp * xp
        c21 = 0.0
        if self.k != 0.0:
            c21 = self.alpha * self.k / (self.k2 + q)
        if self.use_if:
            dt = t - self.anchor
            lr = (-(self.etax - self.nux) * self.k2 * dt
                  - (self.etay - self.nuy) * _phase(self.kb, self.xi, self.anchor, t))
            try:
                r = math.exp(lr)
            except OverflowError:
                # libm returns inf here; the step is then rejected
                r = math.inf
            return 1j * self.k * r * y1, 1j * c21 / r * y0
        return ((-self.nux * self.k2 - self.nuy * q) * y0 + 1j * self.k * y1,
                1j * c21 * y0 + (-self.etax * self.k2 - self.etay * q) * y1)

    def factors(self, t0, t1):
        dt = t1 - t0
        ph = _phase(self.kb, self.xi, t0, t1)
        return (math.exp(-self.nux * self.k2 * dt - self.nuy * ph),
                math.exp(-self.etax * self.k2 * dt - self.etay * ph))


class _Osc:
    __slots__ = ("c", "use_if", "anchor")

    def __init__(self, c):
        self.c = float(c)
        self.use_if = False
        self.anchor = 0.0

    def rhs(self, t, y0, y1):
        return y1, -self.c / (1.0 + t * t) * y0


def _drive(sys, y0, t0, t1, rtol, atol, h0, t_eval, max_steps):
    ya, yb = complex(y0[0]), complex(y0[1])
    t = float(t0)
    t1 = float(t1)
    span = t1 - t
    hmin = 1e-14 * span
    h = float(h0)
    times = []
    states = []
    if t_eval is None:
        targets = [t1]
        times.append(t)
        states.append((ya, yb))
    else:
        targets = [float(v) for v in t_eval]
    it = 0
    while it < len(targets) and targets[it] <= t:
        times.append(t)
        states.append((ya, yb))
        it += 1
    errold = 1e-4
    rejected = False
    nsteps = 0
    nrej = 0
    status = 0
    fsal = False
    k1a = k1b = 0j
    while it < len(targets):
        if nsteps + nrej >= max_steps:
            status = 2
            break
        target = targets[it]
        land = False
        hs = h
        if t + hs >= target - 1e-12 * abs(target):
            hs = target - t
            land = True
        if sys.use_if:
            sys.anchor = t
            fsal = False
        if not fsal:
            k1a, k1b = sys.rhs(t, ya, yb)
        k2a, k2b = sys.rhs(t + C2 * hs, ya + hs * (A21 * k1a), yb + hs * (A21 * k1b))
        k3a, k3b = sys.rhs(t + C3 * hs, ya + hs * (A31 * k1a + A32 * k2a),
                           yb + hs * (A31 * k1b + A32 * k2b))
        k4a, k4b = sys.rhs(t + C4 * hs, ya + hs * (A41 * k1a + A42 * k2a + A43 * k3a),
                           yb + hs * (A41 * k1b + A42 * k2b + A43 * k3b))
        k5a, k5b = sys.rhs(t + C5 * hs,
                           ya + hs * (A51 * k1a + A52 * k2a + A53 * k3a + A54 * k4a),
                           yb + hs * (A51 * k1b + A52 * k2b + A53 * k3b + A54 * k4b))
        k6a, k6b = sys.rhs(t + hs,
                           ya + hs * (A61 * k1a + A62 * k2a + A63 * k3a + A64 * k4a + A65 * k5a),
                           yb + hs * (A61 * k1b + A62 * k2b + A63 * k3b + A64 * k4b + A65 * k5b))
        za = ya + hs * (B1 * k1a + B3 * k3a + B4 * k4a + B5 * k5a + B6 * k6a)
        zb = yb + hs * (B1 * k1b + B3 * k3b + B4 * k4b + B5 * k5b + B6 * k6b)
        tn = target if land else t + hs
        k7a, k7b = sys.rhs(tn, za, zb)
        ea = hs * (E1 * k1a + E3 * k3a + E4 * k4a + E5 * k5a + E6 * k6a + E7 * k7a)
        eb = hs * (E1 * k1b + E3 * k3b + E4 * k4b + E5 * k5b + E6 * k6b + E7 * k7b)
        if sys.use_if:
            fa, fb = sys.factors(t, tn)
            za = fa * za
            zb = fb * zb
            ea = fa * ea
            eb = fb * eb
        # abs(complex) is libm hypot; nesting avoids squaring tiny amplitudes
        ny = abs(complex(abs(ya), abs(yb)))
        nz = abs(complex(abs(za), abs(zb)))
        ne = abs(complex(abs(ea), abs(eb)))
        scale = atol + rtol * max(ny, nz)
        if ne == 0.0:
            err = 0.0
        elif scale > 0.0:
            err = ne / scale
        else:
            err = math.inf
        if not math.isfinite(err) or not (math.isfinite(nz)):
            err = math.inf
        if err <= 1.0:
            nsteps += 1
            t = tn
            ya, yb = za, zb
            k1a, k1b = k7a, k7b
            fsal = True
            if err == 0.0:
                fac = FAC_MAX
            else:
                fac = SAFETY * err ** (-EXPO1) * errold ** EXPO2
                fac = min(FAC_MAX, max(FAC_MIN, fac))
            if rejected:
                fac = min(1.0, fac)
            errold = max(err, 1e-4)
            rejected = False
            if not land or hs >= h:
                h = hs * fac
            if t_eval is None:
                times.append(t)
                states.append((ya, yb))
            while it < len(targets) and targets[it] <= t:
                if t_eval is not None:
                    times.append(t)
                    states.append((ya, yb))
                it += 1
        else:
            nrej += 1
            if math.isfinite(err):
                fac = max(FAC_MIN, SAFETY * err ** (-0.2))
            else:
                fac = FAC_MIN
            h = hs * fac
            rejected = True
            if h < hmin:
                status = 1
                break
    out_t = np.asarray(times, dtype=float)
    out_y = np.asarray(states, dtype=complex).reshape(len(times), 2)
    return out_t, out_y, nsteps, nrej, status


def integrate_linear(p, y0, t0, t1, rtol, atol, h0, use_if, t_eval, max_steps):
    """Adaptive DP5(4) on the modal system; ``p = (alpha, beta, nu_x, nu_y, eta_x, eta_y, k, xi)``."""
    return _drive(_Linear(p, bool(use_if)), y0, t0, t1, rtol, atol, h0, t_eval, max_steps)


def integrate_osc(c, y0, t0, t1, rtol, atol, h0, t_eval, max_steps):
    """Adaptive DP5(4) on ``(y, y')`` for ``y'' + c/(1+tau^2) y = 0``."""
    return _drive(_Osc(c), y0, t0, t1, rtol, atol, h0, t_eval, max_steps)
