# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled adaptive Dormand-Prince kernels.

Mirrors ``_kernels_py`` operation for operation; the stepping loop runs
without the GIL so distinct modes can be integrated from several threads.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, sqrt, hypot, pow, isfinite, fabs, INFINITY
from libc.stdlib cimport malloc, realloc, free

cnp.import_array()

BACKEND = "cython"

cdef double C2 = 1.0 / 5.0, C3 = 3.0 / 10.0, C4 = 4.0 / 5.0, C5 = 8.0 / 9.0
cdef double A21 = 1.0 / 5.0
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0, A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0

cdef double SAFETY = 0.9
cdef double EXPO1 = 0.17
cdef double EXPO2 = 0.04
cdef double FAC_MIN = 0.2
cdef double FAC_MAX = 10.0

cdef double complex IU = 1j


cdef struct System:
    int kind            # 0 linear mode, 1 oscillator
    int use_if
    double alpha, kb, k, k2, xi, nux, nuy, etax, etay, c, anchor


cdef inline double _phase(double kb, double xi, double s, double t) noexcept nogil:
    cdef double a = xi - kb * s
    cdef double b = xi - kb * t
    return (t - s) * (a * a + a * b + b * b) / 3.0


cdef inline void _rhs(System* sys, double t, double complex y0, double complex y1,
                      double complex* f0, double complex* f1) noexcept nogil:
    cdef double xp, q, c21, lr, r, dt
    if sys.kind == 1:
        f0[0] = y1
        f1[0] = (-sys.c / (1.0 + t * t)) * y0
        return
    xp = sys.xi - sys.kb * t
    q = xp * xp
    c21 = 0.0
    if sys.k != 0.0:
        c21 = sys.alpha * sys.k / (sys.k2 + q)
    if sys.use_if:
        dt = t - sys.anchor
        lr = (-(sys.etax - sys.nux) * sys.k2 * dt
              - (sys.etay - sys.nuy) * _phase(sys.kb, sys.xi, sys.anchor, t))
        r = exp(lr)
        f0[0] = (IU * sys.k * r) * y1
        f1[0] = (IU * c21 / r) * y0
        return
    f0[0] = (-sys.nux * sys.k2 - sys.nuy * q) * y0 + (IU * sys.k) * y1
    f1[0] = (IU * c21) * y0 + (-sys.etax * sys.k2 - sys.etay * q) * y1


cdef inline double _norm2(double complex a, double complex b) noexcept nogil:
    return hypot(hypot(a.real, a.imag), hypot(b.real, b.imag))


cdef struct Buffer:
    Py_ssize_t n, cap
    double* t
    double complex* y


cdef int _push(Buffer* buf, double t, double complex a, double complex b) noexcept nogil:
    cdef Py_ssize_t newcap
    cdef double* nt
    cdef double complex* ny
    if buf.n == buf.cap:
        newcap = 2 * buf.cap + 16
        nt = <double*> realloc(buf.t, newcap * sizeof(double))
        if nt == NULL:
            return -1
        buf.t = nt
        ny = <double complex*> realloc(buf.y, 2 * newcap * sizeof(double complex))
        if ny == NULL:
            return -1
        buf.y = ny
        buf.cap = newcap
    buf.t[buf.n] = t
    buf.y[2 * buf.n] = a
    buf.y[2 * buf.n + 1] = b
    buf.n += 1
    return 0


cdef int _drive(System* sys, double complex ya, double complex yb, double t, double t1,
                double rtol, double atol, double h, const double* targets, Py_ssize_t ntarget,
                bint record_all, long max_steps, Buffer* buf,
                long* nsteps_out, long* nrej_out) noexcept nogil:
    cdef double span = t1 - t
    cdef double hmin = 1e-14 * span
    cdef Py_ssize_t it = 0
    cdef double errold = 1e-4, err, fac, hs, tn, target, ny, nz, ne, scale, fa, fb, dtf, ph
    cdef bint rejected = False, fsal = False, land
    cdef long nsteps = 0, nrej = 0
    cdef int status = 0
    cdef double complex k1a = 0, k1b = 0, k2a, k2b, k3a, k3b, k4a, k4b, k5a, k5b
    cdef double complex k6a, k6b, k7a, k7b, za, zb, ea, eb
    if record_all:
        if _push(buf, t, ya, yb) != 0:
            return 3
    while it < ntarget and targets[it] <= t:
        if _push(buf, t, ya, yb) != 0:
            return 3
        it += 1
    while it < ntarget:
        if nsteps + nrej >= max_steps:
            status = 2
            break
        target = targets[it]
        land = False
        hs = h
        if t + hs >= target - 1e-12 * fabs(target):
            hs = target - t
            land = True
        if sys.use_if:
            sys.anchor = t
            fsal = False
        if not fsal:
            _rhs(sys, t, ya, yb, &k1a, &k1b)
        _rhs(sys, t + C2 * hs, ya + hs * (A21 * k1a), yb + hs * (A21 * k1b), &k2a, &k2b)
        _rhs(sys, t + C3 * hs, ya + hs * (A31 * k1a + A32 * k2a),
             yb + hs * (A31 * k1b + A32 * k2b), &k3a, &k3b)
        _rhs(sys, t + C4 * hs, ya + hs * (A41 * k1a + A42 * k2a + A43 * k3a),
             yb + hs * (A41 * k1b + A42 * k2b + A43 * k3b), &k4a, &k4b)
        _rhs(sys, t + C5 * hs,
             ya + hs * (A51 * k1a + A52 * k2a + A53 * k3a + A54 * k4a),
             yb + hs * (A51 * k1b + A52 * k2b + A53 * k3b + A54 * k4b), &k5a, &k5b)
        _rhs(sys, t + hs,
             ya + hs * (A61 * k1a + A62 * k2a + A63 * k3a + A64 * k4a + A65 * k5a),
             yb + hs * (A61 * k1b + A62 * k2b + A63 * k3b + A64 * k4b + A65 * k5b), &k6a, &k6b)
        za = ya + hs * (B1 * k1a + B3 * k3a + B4 * k4a + B5 * k5a + B6 * k6a)
        zb = yb + hs * (B1 * k1b + B3 * k3b + B4 * k4b + B5 * k5b + B6 * k6b)
        tn = target if land else t + hs
        _rhs(sys, tn, za, zb, &k7a, &k7b)
        ea = hs * (E1 * k1a + E3 * k3a + E4 * k4a + E5 * k5a + E6 * k6a + E7 * k7a)
        eb = hs * (E1 * k1b + E3 * k3b + E4 * k4b + E5 * k5b + E6 * k6b + E7 * k7b)
        if sys.use_if:
            dtf = tn - t
            ph = _phase(sys.kb, sys.xi, t, tn)
            fa = exp(-sys.nux * sys.k2 * dtf - sys.nuy * ph)
            fb = exp(-sys.etax * sys.k2 * dtf - sys.etay * ph)
            za = fa * za
            zb = fb * zb
            ea = fa * ea
            eb = fb * eb
        ny = _norm2(ya, yb)
        nz = _norm2(za, zb)
        ne = _norm2(ea, eb)
        scale = atol + rtol * (ny if ny > nz else nz)
        if ne == 0.0:
            err = 0.0
        elif scale > 0.0:
            err = ne / scale
        else:
            err = INFINITY
        if not isfinite(err) or not isfinite(nz):
            err = INFINITY
        if err <= 1.0:
            nsteps += 1
            t = tn
            ya = za
            yb = zb
            k1a = k7a
            k1b = k7b
            fsal = True
            if err == 0.0:
                fac = FAC_MAX
            else:
                fac = SAFETY * pow(err, -EXPO1) * pow(errold, EXPO2)
                fac = FAC_MAX if fac > FAC_MAX else (FAC_MIN if fac < FAC_MIN else fac)
            if rejected and fac > 1.0:
                fac = 1.0
            errold = err if err > 1e-4 else 1e-4
            rejected = False
            if not land or hs >= h:
                h = hs * fac
            if record_all:
                if _push(buf, t, ya, yb) != 0:
                    return 3
            while it < ntarget and targets[it] <= t:
                if not record_all:
                    if _push(buf, t, ya, yb) != 0:
                        return 3
                it += 1
        else:
            nrej += 1
            if isfinite(err):
                fac = SAFETY * pow(err, -0.2)
                if fac < FAC_MIN:
                    fac = FAC_MIN
            else:
                fac = FAC_MIN
            h = hs * fac
            rejected = True
            if h < hmin:
                status = 1
                break
    nsteps_out[0] = nsteps
    nrej_out[0] = nrej
    return status


cdef object _run(System* sys, y0, double t0, double t1, double rtol, double atol, double h0,
                 t_eval, long max_steps):
    cdef double complex ya = complex(y0[0]), yb = complex(y0[1])
    cdef cnp.ndarray[cnp.float64_t, ndim=1] targets
    cdef bint record_all = t_eval is None
    if record_all:
        targets = np.array([t1], dtype=np.float64)
    else:
        targets = np.ascontiguousarray(t_eval, dtype=np.float64)
    cdef const double* tp = <const double*> targets.data
    cdef Py_ssize_t nt = targets.shape[0]
    cdef Buffer buf
    buf.n = 0
    buf.cap = 0
    buf.t = NULL
    buf.y = NULL
    cdef long nsteps = 0, nrej = 0
    cdef int status
    try:
        with nogil:
            status = _drive(sys, ya, yb, t0, t1, rtol, atol, h0, tp, nt, record_all,
                            max_steps, &buf, &nsteps, &nrej)
        if status == 3:
            raise MemoryError("trajectory buffer allocation failed")
        out_t = np.empty(buf.n, dtype=np.float64)
        out_y = np.empty((buf.n, 2), dtype=np.complex128)
        for i in range(buf.n):
            out_t[i] = buf.t[i]
            out_y[i, 0] = buf.y[2 * i]
            out_y[i, 1] = buf.y[2 * i + 1]
    finally:
        free(buf.t)
        free(buf.y)
    return out_t, out_y, nsteps, nrej, status


def integrate_linear(p, y0, double t0, double t1, double rtol, double atol, double h0,
                     use_if, t_eval, long max_steps):
    """Adaptive DP5(4) on the modal system; ``p = (alpha, beta, nu_x, nu_y, eta_x, eta_y, k, xi)``."""
    cdef System sys
    sys.kind = 0
    sys.use_if = 1 if use_if else 0
    sys.alpha = p[0]
    sys.nux = p[2]
    sys.nuy = p[3]
    sys.etax = p[4]
    sys.etay = p[5]
    sys.k = p[6]
    sys.k2 = sys.k * sys.k
    sys.kb = sys.k * <double> p[1]
    sys.xi = p[7]
    sys.c = 0.0
    sys.anchor = 0.0
    return _run(&sys, y0, t0, t1, rtol, atol, h0, t_eval, max_steps)


def integrate_osc(double c, y0, double t0, double t1, double rtol, double atol, double h0,
                  t_eval, long max_steps):
    """Adaptive DP5(4) on ``(y, y')`` for ``y'' + c/(1+tau^2) y = 0``."""
    cdef System sys
    sys.kind = 1
    sys.use_if = 0
    sys.alpha = sys.kb = sys.k = sys.k2 = sys.xi = 0.0
    sys.nux = sys.nuy = sys.etax = sys.etay = 0.0
    sys.c = c
    sys.anchor = 0.0
    return _run(&sys, y0, t0, t1, rtol, atol, h0, t_eval, max_steps)
