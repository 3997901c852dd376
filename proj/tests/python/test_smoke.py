import math

import pytest

import mvscheme as mv


def test_laplacian_quadratic_is_exact():
    op = mv.OperatorSpec("laplacian", 0.01, dim=2)
    phi = mv.test_function({"kind": "norm_squared"}, 2)
    # A(x, |x|^2, |x|^2(x)) = -lap = -4 exactly
    assert mv.eval_scheme(op, [0.3, -0.2], phi, phi([0.3, -0.2])) == pytest.approx(-4.0, abs=1e-9)


def test_python_callable_field():
    op = mv.OperatorSpec("laplacian", 0.01)
    assert mv.eval_mean(op, [0.4], lambda x: 2.0 * x[0] + 1.0) == pytest.approx(1.8, abs=1e-13)


def test_constants():
    assert mv.frac_laplacian_constant(1, 0.5) == pytest.approx(1.0 / math.pi)
    assert mv.implicit_p_moment_constant(1, 4.0) == pytest.approx(10.0)


def test_fit_rate():
    r = mv.fit_rate([(x, 3.0 * x * x) for x in (0.1, 0.05, 0.025)])
    assert r["slope"] == pytest.approx(2.0)


def test_validation_errors():
    with pytest.raises(mv.ConfigError):
        mv.OperatorSpec("p_laplacian", 0.01, p=1.5)
    with pytest.raises(ValueError):
        mv.run({"command": "consistency", "family": "laplacian", "bogus": 1})


def test_run_consistency():
    cfg = {
        "command": "consistency",
        "family": "laplacian",
        "domain": {"kind": "interval", "lower": 0, "upper": 1},
        "rho": [0.1, 0.05, 0.025, 0.0125],
        "test_function": {"kind": "trig", "k": [1.0]},
    }
    status, report, csv = mv.run(cfg)
    assert status == 0
    lines = csv.strip().split("\n")
    assert lines[0] == "rho,sup_lambda"
    assert len(lines) == 5
    assert report["results"]["slope"] == pytest.approx(1.0, abs=0.1)
    assert report["config"]["params"]["p"] == 2.0
