import json
import math

import pytest

import _latsym


def test_list_schemes():
    ids = _latsym.list_schemes()
    assert "heat_galilei" in ids
    assert "lorentz" in ids


def test_run_cli_find_json():
    code, out, err = _latsym.run_cli(["find", "--scheme", "heat_fixed", "--json"])
    assert code == 0, err
    report = json.loads(out)["deterministic"]
    assert report["command"] == "find"


def test_run_cli_usage_error():
    code, _, err = _latsym.run_cli(["find", "--scheme", "no_such_scheme"])
    assert code == 2
    assert "heat_fixed" in err


def test_limit_heat_fixed():
    fit = _latsym.leading_order_coefficients("heat_fixed")
    for term, value in fit["expected"].items():
        assert fit["coefficients"][term] == pytest.approx(value, abs=1e-6)
    assert fit["order"] > 0.9


def test_change_of_variables():
    good = _latsym.verify_change_of_variables(0.5)
    assert good["max_relative_residual"] < 1e-8
    assert _latsym.verify_change_of_variables(0.5, k=2.0)["max_relative_residual"] > 1e-2
    assert _latsym.verify_change_of_variables(0.5, printed=True)["max_relative_residual"] > 1e-2


def test_flow_dilation():
    p, err = _latsym.flow_point("xi = x; tau = 2*t; phi = 0", [1.0, 1.0, 3.0], 0.3)
    assert p[0] == pytest.approx(math.exp(0.3), rel=1e-10)
    assert p[1] == pytest.approx(math.exp(0.6), rel=1e-10)
    assert p[2] == 3.0
    assert err < 1e-10


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        _latsym.leading_order_coefficients("heat_exponential")
