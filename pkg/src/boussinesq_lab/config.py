"""Scenario files: TOML text to a validated :class:`Scenario`.

See ``docs/config.md`` for the grammar.  Every kind has documented defaults;
unknown keys are rejected so that typos do not silently fall back to them.
"""
from __future__ import annotations

import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .core import Mode, ModeState, Params, validate
from .errors import NegativeCoefficient, ParseError, ValidationError
from .nonlinear import GridSpec, ICSpec, SimConfig

__all__ = ["SCHEMA_VERSION", "KINDS", "Scenario", "parse_config", "load_config", "DEFAULTS"]

SCHEMA_VERSION = 1
KINDS = ("modal-exact", "modal-ode", "eigen-sweep", "inviscid-growth", "nonlinear-run",
         "envelope-suite")

DEFAULTS = {
    "modal-exact": {"quad_tol": 1e-10, "mixed": "duhamel", "omega0": [0.0, 0.0],
                    "theta0": [1.0, 0.0], "times": None},
    "modal-ode": {"tol": 1e-10, "integrating_factor": True, "omega0": [1.0, 0.0],
                  "theta0": [1.0, 0.0], "times": None, "envelope_slack": 10.0},
    "eigen-sweep": {},
    "inviscid-growth": {"alphas": [3.0 / 16.0], "t_start": 100.0, "t_end": 1.0e4,
                        "samples": 81, "tol": 1e-11, "y0": 0.0, "yp0": 1.0},
    "nonlinear-run": {"nx": 128, "ny": 128, "dxi": 1.0, "dealias_fraction": 2.0 / 3.0,
                      "dt": 0.05, "t_end": 50.0, "snapshot_every": 10, "profile": "random",
                      "eps1": None, "eps2": None, "seeds": None, "k_max": 4, "xi_max": 8.0,
                      "nonlinear": True, "write_snapshot": True, "largealpha_eps": None},
    "envelope-suite": {"checks": list(range(1, 13))},
}

_PARAM_KEYS = ("alpha", "beta", "nu_x", "nu_y", "eta_x", "eta_y", "sobolev_n")


@dataclass
class Scenario:
    """Validated scenario: common header plus kind-specific ``options``."""

    name: str
    kind: str
    params: Params
    options: dict = field(default_factory=dict)
    output_dir: Path | None = None
    seed: int = 0

    def plan(self) -> list:
        """Work items, in output order, for the sweep-like kinds."""
        o = self.options
        if self.kind == "eigen-sweep":
            return [(a, m) for a in o["alphas"] for m in o["modes"]]
        if self.kind in ("modal-exact", "modal-ode"):
            return list(o["modes"])
        if self.kind == "inviscid-growth":
            return list(o["alphas"])
        if self.kind == "nonlinear-run":
            return list(o["seeds"])
        return list(o["checks"])

    def sim_config(self, seed) -> SimConfig:
        o = self.options
        grid = GridSpec(o["nx"], o["ny"], o["dxi"], o["dealias_fraction"])
        ic = ICSpec(o["profile"], o["eps1"], o["eps2"], int(seed), o["k_max"], o["xi_max"])
        return SimConfig(self.params, grid, o["dt"], o["t_end"], ic, o["snapshot_every"],
                         nonlinear=o["nonlinear"])


def _parse_toml(text):
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        col = getattr(exc, "colno", None)
        msg = getattr(exc, "msg", str(exc))
        if line is None:
            m = re.search(r"line (\d+), column (\d+)", str(exc))
            if m:
                line, col = int(m.group(1)), int(m.group(2))
            msg = re.sub(r"\s*\(at line.*\)$", "", str(exc))
        raise ParseError(msg, line, col) from None


def _number(v, name, *, integer=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(f"{name} must be a number, got {v!r}", name)
    if integer and int(v) != v:
        raise ValidationError(f"{name} must be an integer, got {v!r}", name)
    if not math.isfinite(v):
        raise ValidationError(f"{name} must be finite", name)
    return int(v) if integer else float(v)


def _complex(v, name):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(float(v))
    if isinstance(v, list) and len(v) == 2:
        return complex(_number(v[0], name), _number(v[1], name))
    raise ValidationError(f"{name} must be a number or a [re, im] pair", name)


def _grid(v, name, *, positive=False):
    """A list of numbers, or a table ``{start, stop, num, spacing}``."""
    if isinstance(v, list):
        out = [_number(x, name) for x in v]
    elif isinstance(v, dict):
        for key in ("start", "stop", "num"):
            if key not in v:
                raise ValidationError(f"{name}.{key} is required", f"{name}.{key}")
        extra = set(v) - {"start", "stop", "num", "spacing"}
        if extra:
            raise ValidationError(f"unknown key {sorted(extra)[0]!r} in {name}", name)
        a, b = _number(v["start"], name), _number(v["stop"], name)
        n = _number(v["num"], f"{name}.num", integer=True)
        if n < 1:
            raise ValidationError(f"{name}.num must be >= 1", f"{name}.num")
        sp = v.get("spacing", "linear")
        if sp == "linear":
            out = [float(x) for x in np.linspace(a, b, n)]
        elif sp == "log":
            if a <= 0 or b <= 0:
                raise ValidationError(f"{name}: log spacing needs positive ends", name)
            out = [float(x) for x in np.geomspace(a, b, n)]
        else:
            raise ValidationError(f"{name}.spacing must be 'linear' or 'log'", f"{name}.spacing")
    else:
        raise ValidationError(f"{name} must be a list or a range table", name)
    if not out:
        raise ValidationError(f"{name} must not be empty", name)
    if positive and min(out) <= 0:
        raise ValidationError(f"{name} entries must be positive", name)
    return out


def _modes(v, name="options.modes"):
    if not isinstance(v, list) or not v:
        raise ValidationError(f"{name} must be a non-empty list of [k, xi] pairs", name)
    out = []
    for item in v:
        if not (isinstance(item, list) and len(item) == 2):
            raise ValidationError(f"{name} entries must be [k, xi] pairs", name)
        out.append(Mode(_number(item[0], name, integer=True), _number(item[1], name)))
    return out


def _params(tab):
    if not isinstance(tab, dict):
        raise ValidationError("[params] must be a table", "params")
    extra = set(tab) - set(_PARAM_KEYS)
    if extra:
        key = sorted(extra)[0]
        raise ValidationError(f"unknown parameter {key!r}", f"params.{key}")
    vals = {}
    for key in _PARAM_KEYS:
        if key in tab:
            vals[key] = _number(tab[key], f"params.{key}", integer=key == "sobolev_n")
    p = Params(**vals)
    try:
        validate(p)
    except NegativeCoefficient as exc:
        bad = next((k for k in ("alpha", "nu_x", "nu_y", "eta_x", "eta_y")
                    if getattr(p, k) < 0), None)
        raise ValidationError(f"NegativeCoefficient: {exc}", f"params.{bad}",
                              "NegativeCoefficient") from exc
    except ValueError as exc:
        raise ValidationError(str(exc), "params") from exc
    return p


def _options(kind, tab, params):
    if not isinstance(tab, dict):
        raise ValidationError("[options] must be a table", "options")
    base = dict(DEFAULTS[kind])
    known = set(base) | {"modal-exact": {"modes"}, "modal-ode": {"modes"},
                         "eigen-sweep": {"alphas", "modes"}}.get(kind, set())
    extra = set(tab) - known
    if extra:
        key = sorted(extra)[0]
        raise ValidationError(f"unknown option {key!r} for kind {kind!r}", f"options.{key}")
    o = {**base, **tab}
    need = {"modal-exact": ("modes", "times"), "modal-ode": ("modes", "times"),
            "eigen-sweep": ("alphas", "modes")}.get(kind, ())
    for key in need:
        if tab.get(key) is None:
            raise ValidationError(f"options.{key} is required for kind {kind!r}",
                                  f"options.{key}")
    if kind in ("modal-exact", "modal-ode"):
        o["modes"] = _modes(o["modes"])
        o["times"] = _grid(o["times"], "options.times")
        if any(t < 0 for t in o["times"]) or np.any(np.diff(o["times"]) <= 0):
            raise ValidationError("options.times must be non-negative and increasing",
                                  "options.times")
        o["state0"] = ModeState(_complex(o.pop("omega0"), "options.omega0"),
                                _complex(o.pop("theta0"), "options.theta0"))
        if kind == "modal-exact":
            if params.alpha != 0 and params.beta != 0:
                raise ValidationError("modal-exact needs alpha = 0 or beta = 0", "params.alpha")
            if o["mixed"] not in ("duhamel", "anchored"):
                raise ValidationError("options.mixed must be 'duhamel' or 'anchored'",
                                      "options.mixed")
            o["quad_tol"] = _number(o["quad_tol"], "options.quad_tol")
        else:
            o["tol"] = _number(o["tol"], "options.tol")
            o["envelope_slack"] = _number(o["envelope_slack"], "options.envelope_slack")
            if not isinstance(o["integrating_factor"], bool):
                raise ValidationError("options.integrating_factor must be a boolean",
                                      "options.integrating_factor")
    elif kind == "eigen-sweep":
        if params.beta != 0:
            raise ValidationError("eigen-sweep needs beta = 0", "params.beta")
        o["alphas"] = _grid(o["alphas"], "options.alphas")
        o["modes"] = _modes(o["modes"])
        if any(m.k == 0 for m in o["modes"]):
            raise ValidationError("eigen-sweep modes need k != 0", "options.modes")
    elif kind == "inviscid-growth":
        o["alphas"] = _grid(o["alphas"], "options.alphas")
        for key in ("t_start", "t_end", "tol", "y0", "yp0"):
            o[key] = _number(o[key], f"options.{key}")
        o["samples"] = _number(o["samples"], "options.samples", integer=True)
        if not 0 < o["t_start"] < o["t_end"]:
            raise ValidationError("need 0 < t_start < t_end", "options.t_start")
    elif kind == "nonlinear-run":
        for key in ("nx", "ny", "snapshot_every", "k_max"):
            o[key] = _number(o[key], f"options.{key}", integer=True)
        for key in ("dxi", "dealias_fraction", "dt", "t_end", "xi_max"):
            o[key] = _number(o[key], f"options.{key}")
        if o["profile"] not in ("random", "random-largealpha", "mode", "zero"):
            raise ValidationError("options.profile is not a known profile", "options.profile")
        if o["profile"] == "random-largealpha":
            if o["largealpha_eps"] is None:
                raise ValidationError("options.largealpha_eps is required for this profile",
                                      "options.largealpha_eps")
            o["largealpha_eps"] = _number(o["largealpha_eps"], "options.largealpha_eps")
            o["eps1"], o["eps2"] = o["largealpha_eps"] / 10.0, 0.0
        for key in ("eps1", "eps2"):
            if o[key] is None:
                raise ValidationError(f"options.{key} is required", f"options.{key}")
            o[key] = _number(o[key], f"options.{key}")
        try:
            GridSpec(o["nx"], o["ny"], o["dxi"], o["dealias_fraction"])
            ICSpec(o["profile"], o["eps1"], o["eps2"], 0, o["k_max"], o["xi_max"])
        except ValueError as exc:
            raise ValidationError(str(exc), "options") from exc
        if o["dt"] <= 0 or o["t_end"] < 0:
            raise ValidationError("need dt > 0 and t_end >= 0", "options.dt")
    elif kind == "envelope-suite":
        checks = o["checks"]
        if not isinstance(checks, list) or not checks or any(
                isinstance(c, bool) or not isinstance(c, int) or not 1 <= c <= 12 for c in checks):
            raise ValidationError("options.checks must list criterion numbers 1..12",
                                  "options.checks")
    return o


def parse_config(text: str) -> Scenario:
    """Parse and validate scenario text.

    Raises ParseError (with line and column) on malformed TOML and
    ValidationError (naming the offending field) on semantic problems.
    """
    doc = _parse_toml(text)
    extra = set(doc) - {"schema_version", "scenario", "params", "options"}
    if extra:
        key = sorted(extra)[0]
        raise ValidationError(f"unknown top-level key {key!r}", key)
    if "schema_version" not in doc:
        raise ValidationError("schema_version is required", "schema_version")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ValidationError(f"unsupported schema_version {doc['schema_version']!r}",
                              "schema_version")
    head = doc.get("scenario")
    if not isinstance(head, dict):
        raise ValidationError("[scenario] table is required", "scenario")
    for key in ("name", "kind"):
        if key not in head:
            raise ValidationError(f"scenario.{key} is required", f"scenario.{key}")
    extra = set(head) - {"name", "kind", "output_dir", "seed"}
    if extra:
        key = sorted(extra)[0]
        raise ValidationError(f"unknown key {key!r} in [scenario]", f"scenario.{key}")
    kind = head["kind"]
    if kind not in KINDS:
        raise ValidationError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}",
                              "scenario.kind")
    name = head["name"]
    if not isinstance(name, str) or not name:
        raise ValidationError("scenario.name must be a non-empty string", "scenario.name")
    seed = _number(head.get("seed", 0), "scenario.seed", integer=True)
    if not 0 <= seed < 2 ** 64:
        raise ValidationError("scenario.seed must be a 64-bit unsigned integer", "scenario.seed")
    params = _params(doc.get("params", {}))
    opts = _options(kind, doc.get("options", {}), params)
    if kind == "nonlinear-run" and opts["seeds"] is None:
        opts["seeds"] = [seed]
    elif kind == "nonlinear-run":
        opts["seeds"] = [_number(s, "options.seeds", integer=True) for s in opts["seeds"]]
    out = head.get("output_dir")
    return Scenario(name, kind, params, opts, Path(out) if out else None, seed)


def load_config(path) -> Scenario:
    return parse_config(Path(path).read_text(encoding="utf-8"))

