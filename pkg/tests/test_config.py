from pathlib import Path

import pytest

from boussinesq_lab.config import DEFAULTS, load_config, parse_config
from boussinesq_lab.errors import ParseError, ValidationError

SCENARIOS = sorted((Path(__file__).resolve().parents[1] / "scenarios").glob("*.toml"))

MINIMAL = """
schema_version = 1
[scenario]
name = "m"
kind = "modal-exact"
[options]
modes = [[1, 0.0]]
times = [0.0, 1.0]
"""


def test_minimal_modal_exact_defaults():
    sc = parse_config(MINIMAL)
    assert sc.kind == "modal-exact" and sc.seed == 0
    assert sc.options["quad_tol"] == DEFAULTS["modal-exact"]["quad_tol"] == 1e-10
    assert sc.options["mixed"] == "duhamel"
    assert sc.options["state0"].theta_hat == 1.0
    assert sc.params.beta == 1.0 and sc.params.alpha == 0.0


def test_negative_coefficient():
    with pytest.raises(ValidationError) as exc:
        parse_config(MINIMAL + "[params]\nnu_x = -1.0\n")
    assert exc.value.field == "params.nu_x"
    assert exc.value.reason == "NegativeCoefficient"


def test_eigen_sweep_plan_has_40_points():
    sc = load_config(Path(__file__).resolve().parents[1] / "scenarios" / "eigen-sweep.toml")
    plan = sc.plan()
    assert len(plan) == 40
    assert plan[0][0] == pytest.approx(0.01) and plan[-1][0] == pytest.approx(1.0)


def test_parse_error_location():
    with pytest.raises(ParseError) as exc:
        parse_config("schema_version = 1\n[scenario]\nname = \n")
    assert exc.value.line == 3 and exc.value.column is not None


@pytest.mark.parametrize("text, field", [
    (MINIMAL.replace("kind = \"modal-exact\"", "kind = \"bogus\""), "scenario.kind"),
    (MINIMAL + "[params]\nnu = 1.0\n", "params.nu"),
    (MINIMAL.replace("times = [0.0, 1.0]", "times = [0.0, 1.0]\nspeed = 2"), "options.speed"),
    (MINIMAL.replace("modes = [[1, 0.0]]\n", ""), "options.modes"),
    (MINIMAL.replace("schema_version = 1", "schema_version = 2"), "schema_version"),
    (MINIMAL.replace("times = [0.0, 1.0]", "times = [1.0, 0.5]"), "options.times"),
    (MINIMAL + "[params]\nalpha = 1.0\n", "params.alpha"),
    (MINIMAL.replace("times = [0.0, 1.0]",
                     "times = { start = 0.0, stop = 1.0, num = 3, spacing = \"cubic\" }"),
     "options.times.spacing"),
])
def test_validation_fields(text, field):
    with pytest.raises(ValidationError) as exc:
        parse_config(text)
    assert exc.value.field == field


def test_range_table_grid():
    sc = parse_config(MINIMAL.replace("times = [0.0, 1.0]",
                                      "times = { start = 0.0, stop = 2.0, num = 5 }"))
    assert sc.options["times"] == [0.0, 0.5, 1.0, 1.5, 2.0]


def test_nonlinear_seeds_default_and_largealpha():
    text = """
schema_version = 1
[scenario]
name = "n"
kind = "nonlinear-run"
seed = 7
[params]
alpha = 1.0
[options]
profile = "random-largealpha"
largealpha_eps = 0.01
"""
    sc = parse_config(text)
    assert sc.plan() == [7]
    assert sc.options["eps1"] == pytest.approx(1e-3)
    cfg = sc.sim_config(7)
    assert cfg.ic.seed == 7 and cfg.grid.nx == 128


def test_envelope_suite_checks_range():
    text = """
schema_version = 1
[scenario]
name = "e"
kind = "envelope-suite"
[options]
checks = [0, 13]
"""
    with pytest.raises(ValidationError):
        parse_config(text)


@pytest.mark.parametrize("path", SCENARIOS, ids=[p.stem for p in SCENARIOS])
def test_shipped_scenarios_validate(path):
    load_config(path)
