import json
from pathlib import Path

import pytest

from boussinesq_lab.cli import main

ROOT = Path(__file__).resolve().parents[1]


def _write(tmp_path, text, name="s.toml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


EXACT = """
schema_version = 1
[scenario]
name = "exact"
kind = "modal-exact"
[params]
nu_x = 0.1
nu_y = 0.05
eta_x = 1.0
[options]
modes = [[1, 0.0], [2, 1.5]]
times = { start = 0.0, stop = 5.0, num = 11 }
"""


def test_validate_ok(tmp_path, capsys):
    assert main(["validate", str(_write(tmp_path, EXACT))]) == 0
    assert "2 work items" in capsys.readouterr().out


def test_exit_codes_invalid_and_io(tmp_path, capsys):
    bad = _write(tmp_path, EXACT.replace("nu_x = 0.1", "nu_x = -0.1"))
    assert main(["run", str(bad), "--output-dir", str(tmp_path / "o")]) == 2
    assert "params.nu_x" in capsys.readouterr().err
    assert main(["run", str(_write(tmp_path, "[[["))]) == 2
    assert main(["run", str(tmp_path / "missing.toml")]) == 3
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["run", str(_write(tmp_path, EXACT)), "--output-dir", str(blocker / "o")]) == 3


def test_modal_exact_outputs(tmp_path):
    out = tmp_path / "o"
    assert main(["run", str(_write(tmp_path, EXACT)), "--output-dir", str(out)]) == 0
    raw = (out / "series.csv").read_bytes()
    assert b"\r\n" in raw
    header = raw.split(b"\r\n")[0].decode().split(",")
    assert header[0] == "t"
    assert len(raw.split(b"\r\n")) - 2 == 11
    summary = json.loads((out / "summary.json").read_text())
    assert summary["schema_version"] == 1 and summary["passed"] is True
    fits = json.loads((out / "fits.json").read_text())
    assert fits["schema_version"] == 1


def test_reruns_byte_identical_and_thread_independent(tmp_path):
    cfg = _write(tmp_path, EXACT)
    outs = []
    for i, threads in enumerate(("1", "1", "3")):
        out = tmp_path / f"o{i}"
        assert main(["run", str(cfg), "--output-dir", str(out), "--threads", threads]) == 0
        outs.append({n: (out / n).read_bytes()
                     for n in ("series.csv", "fits.json", "summary.json")})
    assert outs[0] == outs[1] == outs[2]


def test_eigen_sweep_csv(tmp_path):
    out = tmp_path / "o"
    assert main(["run", str(ROOT / "scenarios" / "eigen-sweep.toml"),
                 "--output-dir", str(out)]) == 0
    lines = (out / "series.csv").read_text().splitlines()
    header = lines[0].split(",")
    assert header[0] == "alpha"
    for col in ("lambda1_re", "lambda1_im", "lambda2_re", "lambda2_im", "alpha_star",
                "classification"):
        assert any(h.startswith(col) for h in header), col
    assert len(lines) == 41


def test_inviscid_growth_reports_both_exponents(tmp_path):
    """The fitted time exponent matches twice the closed-form value; the comparison
    with the closed-form value itself is reported and fails."""
    out = tmp_path / "o"
    cfg = _write(tmp_path, """
schema_version = 1
[scenario]
name = "g"
kind = "inviscid-growth"
[options]
alphas = [0.1875]
""")
    assert main(["run", str(cfg), "--output-dir", str(out)]) == 1
    fits = json.loads((out / "fits.json").read_text())["fits"]
    assert fits[0]["rate_or_exponent"] == pytest.approx(0.75, abs=0.02)
    checks = {c["name"]: c for c in json.loads((out / "summary.json").read_text())["checks"]}
    assert checks["exponent_vs_two_gamma[alpha=0.1875]"]["passed"]
    assert not checks["exponent_vs_gamma[alpha=0.1875]"]["passed"]


def test_nonlinear_run_small(tmp_path):
    out = tmp_path / "o"
    cfg = _write(tmp_path, """
schema_version = 1
[scenario]
name = "nl"
kind = "nonlinear-run"
[params]
alpha = 0.0001
nu_x = 0.05
nu_y = 0.05
eta_x = 0.05
eta_y = 0.05
sobolev_n = 2
[options]
nx = 16
ny = 16
dt = 0.1
t_end = 2.0
eps1 = 1e-3
eps2 = 1e-6
seeds = [0, 1]
""")
    assert main(["run", str(cfg), "--output-dir", str(out), "--threads", "2"]) == 0
    summary = json.loads((out / "summary.json").read_text())
    names = [c["name"] for c in summary["checks"]]
    assert any(n.startswith("E_omega[") for n in names)
    assert any(n.startswith("E_theta[") for n in names)
    assert summary["passed"] is True
    assert (out / "final_seed0.bqsnap").exists() and (out / "final_seed1.bqsnap").exists()


def test_envelope_suite_single_check(tmp_path):
    out = tmp_path / "o"
    assert main(["run", str(ROOT / "scenarios" / "criterion-01.toml"),
                 "--output-dir", str(out)]) == 0
    lines = (out / "series.csv").read_text().splitlines()
    assert lines[0].split(",")[0] == "criterion"
