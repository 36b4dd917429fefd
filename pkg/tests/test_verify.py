import pytest

from fi_closure.equivariant import Component, EquivariantMap, factor_model_preset
from fi_closure.errors import PushforwardError
from fi_closure.poly import MATRIX_X, Polynomial
from fi_closure.verify import run_verify


def linear_map():
    image = Polynomial.from_terms(MATRIX_X, [(1, [((1, 1), 1)]), (1, [((1, 2), 1)])])
    return EquivariantMap(1, (Component(2, image),))


def test_factor_model_passes():
    report = run_verify(factor_model_preset(1), 5, 25, 42)
    assert report.ok and report.failures == []
    assert report.to_json() == {"trials": 25, "seed": 42, "width": 5, "ok": True, "failures": []}


def test_two_term_linear_map_passes():
    report = run_verify(linear_map(), 6, 25, 42)
    assert report.ok


def test_factor_model_two_factors():
    assert run_verify(factor_model_preset(2), 5, 5, 7).ok


def test_negative_control_fails():
    report = run_verify(factor_model_preset(1), 5, 25, 42, corrupt=True)
    assert not report.ok
    assert {stage for _, stage, _ in report.failures} >= {"completion"}


def test_modular_membership():
    assert run_verify(factor_model_preset(1), 5, 10, 3, modulus=2_147_483_647).ok


def test_report_is_deterministic():
    a = run_verify(factor_model_preset(1), 5, 5, 9, corrupt=True).to_json()
    b = run_verify(factor_model_preset(1), 5, 5, 9, corrupt=True).to_json()
    assert a == b


def test_timings_are_opt_in():
    report = run_verify(factor_model_preset(1), 5, 2, 1)
    assert "timings" not in report.to_json()
    assert set(report.to_json(with_timings=True)["timings"]) == {
        "sample", "pushforward", "membership", "completion", "equivariance"
    }


def test_width_too_small():
    with pytest.raises(PushforwardError):
        run_verify(factor_model_preset(1), 1, 1, 1)
