"""Command-line runner: ``boussinesq-lab run <config> [--output-dir D] [--threads N]``.

Every run writes ``series.csv`` (17 significant digits), ``fits.json`` and
``summary.json`` into the output directory; nonlinear runs add one binary
snapshot of the final state per seed.  Files contain no timestamps or
timings, so identical inputs give identical bytes.  Exit status: 0 when all
checks in the summary pass, 1 when one fails, 2 on invalid input, 3 on I/O
errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import modal
from .checks import run_check
from .config import SCHEMA_VERSION, Scenario, load_config
from .core import ModeState
from .diagnostics import envelope_check, fit_algebraic_exponent, fit_exponential_rate
from .errors import BoussinesqLabError, ParseError, ValidationError
from .multiplier import energy_sheared
from .nonlinear import run_simulation
from .ode import integrate_mode, integrate_second_order
from .snapshot import write_snapshot

__all__ = ["main", "run_scenario", "RunOutput"]

log = logging.getLogger("boussinesq_lab")


class RunOutput:
    """Columns of ``series.csv`` plus fit records and summary checks."""

    def __init__(self):
        self.columns: list[str] = []
        self.rows: list[list] = []
        self.fits: list[dict] = []
        self.checks: list[dict] = []
        self.extra: dict = {}

    def check(self, name, passed, value, limit, relation="<="):
        self.checks.append({"name": name, "passed": bool(passed), "value": _num(value),
                            "limit": _num(limit), "relation": relation})


def _num(x):
    if isinstance(x, (np.floating, np.integer)):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    return _num(obj)


def _fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _map(fn, items, threads):
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _label(x):
    return format(float(x), ".12g")


def _tag(m):
    return f"k={m.k},xi={_label(m.xi)}"


# --------------------------------------------------------------------------
# kinds
# --------------------------------------------------------------------------

def _modal_exact(sc: Scenario, out: RunOutput, threads):
    o, p = sc.options, sc.params
    ts = np.asarray(o["times"])
    s0: ModeState = o["state0"]

    def one(mode):
        if p.alpha == 0:
            th = np.array([modal.exact_theta_alpha0(p, mode, s0.theta_hat, t) for t in ts])
            om = np.array([modal.exact_omega_alpha0(p, mode, s0.omega_hat, s0.theta_hat, t,
                                                    o["quad_tol"]) for t in ts])
        else:
            st = np.array([modal.no_shear_propagator(p, mode, t) @ s0.as_array() for t in ts])
            om, th = st[:, 0], st[:, 1]
        return om, th

    res = _map(one, o["modes"], threads)
    out.columns = ["t"]
    cols = [ts]
    for mode, (om, th) in zip(o["modes"], res):
        tag = _tag(mode)
        out.columns += [f"omega_re[{tag}]", f"omega_im[{tag}]", f"theta_re[{tag}]",
                        f"theta_im[{tag}]"]
        cols += [om.real, om.imag, th.real, th.imag]
        if p.alpha == 0 and mode.k != 0 and s0.theta_hat != 0:
            env = lambda t, m=mode: (-p.eta_x * m.k ** 2 * t
                                     - p.eta_y * modal.phase_integral(m.k, m.xi, 0.0, t, p.beta)
                                     + math.log(abs(s0.theta_hat)))
            with np.errstate(divide="ignore"):
                rep = envelope_check(ts, np.log(np.abs(th)), env, 1 + 1e-8, log_space=True)
            out.check(f"theta_heat_envelope[{tag}]", rep.passed, rep.margin, rep.slack)
            try:
                fit = fit_exponential_rate(ts, np.abs(th))
                out.fits.append({"series": f"abs_theta[{tag}]", **fit.as_dict()})
            except BoussinesqLabError as exc:
                out.fits.append({"series": f"abs_theta[{tag}]", "error": str(exc)})
    out.rows = np.column_stack(cols).tolist()


def _modal_ode(sc: Scenario, out: RunOutput, threads):
    o, p = sc.options, sc.params
    ts = np.asarray(o["times"])
    s0: ModeState = o["state0"]

    def one(mode):
        tr = integrate_mode(p, mode, s0, 0.0, float(ts[-1]), o["tol"],
                            integrating_factor=o["integrating_factor"],
                            t_eval=ts)
        e = np.array([energy_sheared({mode: s}, p, t).value("sheared")
                      for s, t in zip(tr.mode_states(), tr.times)])
        return tr, e

    res = _map(one, o["modes"], threads)
    out.columns = ["t"]
    cols = [ts]
    mx, my = min(p.nu_x, p.eta_x), min(p.nu_y, p.eta_y)
    for mode, (tr, e) in zip(o["modes"], res):
        tag = _tag(mode)
        out.columns += [f"omega_re[{tag}]", f"omega_im[{tag}]", f"theta_re[{tag}]",
                        f"theta_im[{tag}]", f"energy_sheared[{tag}]"]
        cols += [tr.omega.real, tr.omega.imag, tr.theta.real, tr.theta.imag, e]
        out.extra.setdefault("steps", {})[tag] = tr.nsteps
        if p.alpha > 0 and p.beta != 0 and (mx > 0 or my > 0) and e[0] > 0:
            env = lambda t: (math.log(e[0]) + np.log1p(t * t) - mx * t - my * t ** 3 / 12.0)
            with np.errstate(divide="ignore"):
                rep = envelope_check(tr.times, np.log(e), env, o["envelope_slack"],
                                     log_space=True)
            out.check(f"energy_envelope[{tag}]", rep.passed, rep.margin, rep.slack)
    out.rows = np.column_stack(cols).tolist()


def _eigen_sweep(sc: Scenario, out: RunOutput, threads):
    plan = sc.plan()

    def one(item):
        a, mode = item
        p = sc.params.replace(alpha=a)
        rep = modal.eigen_no_shear(p, mode)
        m = modal.no_shear_matrix(p, mode)
        scale = max(abs(np.trace(m)), abs(m[0, 0]) + abs(m[1, 1]), 1e-300)
        err = abs(rep.lambda1 + rep.lambda2 - np.trace(m)) / scale
        return rep, err

    res = _map(one, plan, threads)
    out.columns = ["alpha", "k", "xi", "lambda1_re", "lambda1_im", "lambda2_re",
                   "lambda2_im", "alpha_star", "classification"]
    worst = 0.0
    for (a, mode), (rep, err) in zip(plan, res):
        out.rows.append([a, mode.k, mode.xi, rep.lambda1.real, rep.lambda1.imag,
                         rep.lambda2.real, rep.lambda2.imag, rep.alpha_star,
                         rep.classification])
        worst = max(worst, err)
    out.extra["points"] = len(plan)
    out.check("trace_consistency", worst <= 1e-12, worst, 1e-12)


def _inviscid_growth(sc: Scenario, out: RunOutput, threads):
    o = sc.options
    ts = np.geomspace(o["t_start"], o["t_end"], o["samples"])

    def one(a):
        tr = integrate_second_order(a, 0.0, o["t_end"], o["y0"], o["yp0"], o["tol"],
                                    beta=sc.params.beta, t_eval=ts)
        return np.abs(tr.omega)

    res = _map(one, o["alphas"], threads)
    out.columns = ["t"] + [f"abs_omega[alpha={_label(a)}]" for a in o["alphas"]]
    out.rows = np.column_stack([ts] + res).tolist()
    for a, y in zip(o["alphas"], res):
        fit = fit_algebraic_exponent(ts, y, (o["t_start"], o["t_end"]))
        out.fits.append({"series": f"abs_omega[alpha={_label(a)}]", **fit.as_dict()})
        e = fit.rate_or_exponent
        try:
            g = modal.growth_exponent_theory(a)
        except BoussinesqLabError as exc:
            out.extra.setdefault("skipped", []).append(f"alpha={a}: {exc}")
            continue
        out.check(f"exponent_vs_gamma[alpha={_label(a)}]", abs(e - g) <= 0.02, abs(e - g), 0.02)
        g2 = modal.growth_exponent_in_time(a)
        out.check(f"exponent_vs_two_gamma[alpha={_label(a)}]", abs(e - g2) <= 0.02,
                  abs(e - g2), 0.02)


def _nonlinear_run(sc: Scenario, out: RunOutput, threads, outdir: Path):
    o, p = sc.options, sc.params
    seeds = sc.plan()
    runs = _map(lambda s: run_simulation(sc.sim_config(s)), seeds, threads)
    out.columns = ["t"]
    cols = [runs[0].times]
    nu, eta = min(p.nu_x, p.nu_y), min(p.eta_x, p.eta_y)
    for seed, r in zip(seeds, runs):
        tag = f"seed={seed}"
        out.columns += [f"A_omega[{tag}]", f"A_theta[{tag}]", f"HN_norm_sum[{tag}]",
                        f"largealpha[{tag}]", f"largealpha_total[{tag}]"]
        cols += [np.array([rep.value("A_omega") for rep in r.reports]),
                 np.array([rep.value("A_theta") for rep in r.reports]),
                 r.hn_norm, r.largealpha, r.largealpha_total]
        if o["profile"] == "random-largealpha":
            eps2 = o["largealpha_eps"] ** 2
            worst = float(np.max(r.largealpha_total))
            out.check(f"largealpha_total[{tag}]", worst <= eps2, worst, eps2)
        elif o["eps1"] > 0:
            t1, t2 = 8 * o["eps1"] ** 2, 8 * o["eps2"] ** 2
            out.check(f"E_omega[{tag}]", r.E_omega <= t1, r.E_omega, t1)
            if t2 > 0:
                out.check(f"E_theta[{tag}]", r.E_theta <= t2, r.E_theta, t2)
        try:
            fit = fit_exponential_rate(r.times, r.hn_norm)
            out.fits.append({"series": f"HN_norm_sum[{tag}]", **fit.as_dict()})
            if min(nu, eta) > 0:
                floor = min(nu, eta) ** (1.0 / 3.0) / 10.0
                kmin = min(1.0, o["dxi"])
                out.check(f"decay_rate[{tag}]", fit.rate_or_exponent >= floor
                          and fit.rate_or_exponent > min(nu, eta) * kmin ** 2,
                          fit.rate_or_exponent, max(floor, min(nu, eta) * kmin ** 2), ">")
        except BoussinesqLabError as exc:
            out.fits.append({"series": f"HN_norm_sum[{tag}]", "error": str(exc)})
        out.extra.setdefault("E_omega", {})[tag] = r.E_omega
        out.extra.setdefault("E_theta", {})[tag] = r.E_theta
        out.extra.setdefault("hermitian_defect", {})[tag] = r.max_hermitian_defect
        if o["write_snapshot"]:
            write_snapshot(outdir / f"final_seed{seed}.bqsnap", r.final.omega, r.final.theta, p)
    out.extra["drift_horizon"] = runs[0].config.drift_horizon
    out.rows = np.column_stack(cols).tolist()


def _envelope_suite(sc: Scenario, out: RunOutput, threads):
    nums = sc.options["checks"]
    res = _map(run_check, nums, threads)
    out.columns = ["criterion", "passed", "value", "limit"]
    for r in res:
        log.info(r.line())
        out.rows.append([r.number, r.passed, r.value, r.limit])
        out.check(f"criterion_{r.number:02d}[{r.name}]", r.passed, r.value, r.limit, r.relation)
        out.extra[f"criterion_{r.number:02d}"] = r.detail
        if r.number == 5:
            for key, d in r.detail.items():
                out.fits.append({"series": f"abs_omega[{key}]", "kind": "algebraic",
                                 "rate_or_exponent": d["fitted"]})
        if r.number == 10:
            for key, d in r.detail.items():
                if isinstance(d, dict):
                    out.fits.append({"series": f"HN_norm_sum[{key}]", "kind": "exponential",
                                     "rate_or_exponent": d["rate"], "residual": d["residual"],
                                     "window": d["window"]})


# --------------------------------------------------------------------------
# driver
# --------------------------------------------------------------------------

def run_scenario(scenario: Scenario, output_dir=None, *, threads: int = 1) -> int:
    """Run ``scenario`` and write its artifacts; returns the exit status."""
    outdir = Path(output_dir or scenario.output_dir or Path("out") / scenario.name)
    outdir.mkdir(parents=True, exist_ok=True)
    out = RunOutput()
    kind = scenario.kind
    if kind == "modal-exact":
        _modal_exact(scenario, out, threads)
    elif kind == "modal-ode":
        _modal_ode(scenario, out, threads)
    elif kind == "eigen-sweep":
        _eigen_sweep(scenario, out, threads)
    elif kind == "inviscid-growth":
        _inviscid_growth(scenario, out, threads)
    elif kind == "nonlinear-run":
        _nonlinear_run(scenario, out, threads, outdir)
    else:
        _envelope_suite(scenario, out, threads)
    with open(outdir / "series.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(out.columns)
        for row in out.rows:
            w.writerow([_fmt(x) for x in row])
    fits = {"schema_version": SCHEMA_VERSION, "scenario": scenario.name, "fits": out.fits}
    passed = all(c["passed"] for c in out.checks)
    summary = {"schema_version": SCHEMA_VERSION, "scenario": scenario.name,
               "kind": kind, "params": scenario.params.as_dict(), "seed": scenario.seed,
               "passed": passed, "checks": out.checks, "info": out.extra}
    for name, obj in (("fits.json", fits), ("summary.json", summary)):
        (outdir / name).write_text(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n",
                                   encoding="utf-8")
    for c in out.checks:
        log.info("%s %s: %s %s %s", "PASS" if c["passed"] else "FAIL", c["name"],
                 c["value"], c["relation"], c["limit"])
    return 0 if passed else 1


def _parser():
    ap = argparse.ArgumentParser(prog="boussinesq-lab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("config", help="scenario file (TOML)")
    run.add_argument("--output-dir", help="directory for series.csv, fits.json, summary.json")
    run.add_argument("--threads", type=int, default=1,
                     help="worker threads across modes, seeds or checks (default 1)")
    run.add_argument("--verbose", "-v", action="store_true", help="log progress and checks")
    val = sub.add_parser("validate", help="parse and validate a scenario file only")
    val.add_argument("config")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(message)s")
    try:
        sc = load_config(args.config)
    except (ParseError, ValidationError) as exc:
        field = getattr(exc, "field", None)
        print(f"error: {exc}" + (f" [field: {field}]" if field else ""), file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: cannot read {args.config}: {exc}", file=sys.stderr)
        return 3
    if args.command == "validate":
        print(f"{sc.name}: {sc.kind}, {len(sc.plan())} work items")
        return 0
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        status = run_scenario(sc, args.output_dir, threads=args.threads)
    except OSError as exc:
        print(f"error: I/O failure: {exc}", file=sys.stderr)
        return 3
    print(f"{sc.name}: {'all checks passed' if status == 0 else 'some checks failed'}")
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
