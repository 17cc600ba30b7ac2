"""Compare the compiled and pure-Python modal kernels.

Usage::

    python3 benchmarks/bench_kernels.py [--modes 20] [--repeat 3]

Integrates the same set of sheared modes with both backends, reports wall
time per backend, accepted steps and the largest difference between the two
final states (the kernels share one operation order, so it should be zero
or a few ulps).  Also times one 128x128 nonlinear step for reference.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from boussinesq_lab import kernels
from boussinesq_lab.core import Mode, ModeState, Params
from boussinesq_lab.nonlinear import GridSpec, ICSpec, SimConfig, initial_state, step
from boussinesq_lab.ode import integrate_mode


def _cases(n, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        d = rng.uniform(0.0, 0.2, 4)
        p = Params(alpha=float(rng.uniform(0.0, 1.0)), beta=1.0, nu_x=d[0], nu_y=d[1],
                   eta_x=d[2], eta_y=d[3])
        mode = Mode(int(rng.integers(1, 4)), float(rng.uniform(-5, 5)))
        s0 = ModeState(complex(rng.standard_normal()), complex(rng.standard_normal()))
        out.append((p, mode, s0))
    return out


def _run(cases, backend, use_if):
    t0 = time.perf_counter()
    finals, steps = [], 0
    for p, mode, s0 in cases:
        tr = integrate_mode(p, mode, s0, 0.0, 20.0, 1e-10, integrating_factor=use_if,
                            backend=backend)
        finals.append(tr.final.as_array())
        steps += tr.nsteps
    return time.perf_counter() - t0, steps, np.array(finals)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--modes", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    cases = _cases(args.modes)
    backends = kernels.available()
    print(f"backends available: {', '.join(backends)} (default {kernels.BACKEND})")
    for use_if in (False, True):
        results = {}
        for b in backends:
            best = min((_run(cases, b, use_if) for _ in range(args.repeat)),
                       key=lambda r: r[0])
            results[b] = best
            print(f"  integrating_factor={use_if!s:5} {b:7}: {best[0] * 1e3:9.1f} ms, "
                  f"{best[1]} steps")
        if len(results) == 2:
            a, c = results["python"], results["cython"]
            diff = float(np.max(np.abs(a[2] - c[2])))
            print(f"  speed-up {a[0] / c[0]:.1f}x, max |difference| {diff:.3e}")
    cfg = SimConfig(Params.isotropic(0.05, 0.05, sobolev_n=5), GridSpec(128, 128), dt=0.05,
                    ic=ICSpec("random", 2e-3, 1e-6, seed=0))
    st = initial_state(cfg)
    step(st, cfg)
    t0 = time.perf_counter()
    for _ in range(10):
        st = step(st, cfg)
    print(f"nonlinear 128x128 step: {(time.perf_counter() - t0) * 100:.1f} ms")


if __name__ == "__main__":
    main()
