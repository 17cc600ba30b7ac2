"""Acceptance criteria, each at its stated tolerance.

Every test prints one ``[PASS]``/``[FAIL]`` line; the lines are collected in the
terminal summary under "acceptance criteria".  Criterion 5 compares the fitted
growth exponent of ``|omega(t)|`` with the closed-form exponent as stated; the
fitted exponent is in fact twice that value (the closed form is an exponent in
``|z| = t^2``), so this test fails.  The companion test checks the exponent
against twice the closed form.
"""
import pytest

from boussinesq_lab.checks import CheckResult, check_growth_exponent, run_check


def _run(number, report_line):
    r = run_check(number)
    report_line(r.line())
    return r


@pytest.mark.parametrize("number", [1, 2, 3, 4])
def test_criterion_closed_forms(number, report_line):
    r = _run(number, report_line)
    assert r.passed, r.detail


def test_criterion_05_growth_exponent(report_line):
    r = _run(5, report_line)
    assert r.passed, r.detail


def test_criterion_05_companion_time_exponent(report_line):
    import time
    t0 = time.perf_counter()
    ok, value, limit, rel, detail = check_growth_exponent("two_gamma")
    r = CheckResult(5, "algebraic instability exponent, time exponent 2*gamma", ok, value,
                    limit, rel, detail, time.perf_counter() - t0)
    report_line(r.line())
    assert r.passed, r.detail


@pytest.mark.parametrize("number", [6, 7, 8])
def test_criterion_linear_envelopes(number, report_line):
    r = _run(number, report_line)
    assert r.passed, r.detail


@pytest.mark.slow
@pytest.mark.parametrize("number", [9, 10, 11])
def test_criterion_nonlinear(number, report_line):
    r = _run(number, report_line)
    assert r.passed, r.detail


def test_criterion_12_solver_hygiene(report_line):
    r = _run(12, report_line)
    assert r.passed, r.detail
