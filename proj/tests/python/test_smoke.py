import math

import pytest

import radshock


def test_shock_speed_burgers():
    assert radshock.shock_speed("burgers", 1.0, -1.0) == pytest.approx(0.0)
    assert radshock.shock_speed("u^2/2", 2.0, 0.0) == pytest.approx(1.0)


def test_admissibility_flags():
    rep = radshock.admissibility("burgers", 1.0, -1.0)
    assert rep["oleinik_strict"]
    assert rep["lax_strict"]
    assert rep["oleinik_margin"] > 0.0
    assert rep["branch_pairs"] == 1

    with pytest.raises(Exception):
        radshock.admissibility("cubic", 1.0, -1.0)


def test_profile_small_shock_is_continuous():
    prof = radshock.profile("burgers", 0.5, -0.5, eps=1.0)
    assert prof["jumps"] == []
    assert prof["u"][0] == pytest.approx(0.5, abs=1e-4)
    assert prof["u"][-1] == pytest.approx(-0.5, abs=1e-4)
    assert all(a >= b - 1e-9 for a, b in zip(prof["u"], prof["u"][1:]))


def test_profile_large_shock_has_jump():
    prof = radshock.profile("burgers", 1.0, -1.0, eps=1.0)
    assert len(prof["jumps"]) == 1
    jump = prof["jumps"][0]
    assert jump["rh_residual"] < 1e-8
    assert jump["oleinik_margin"] > 0.0


def test_regularity_thresholds():
    rep = radshock.regularity("burgers", 0.65, -0.65, nmax=5)
    assert rep["eps_n"][0] == pytest.approx(math.sqrt(2.0), abs=1e-12)
    assert rep["predicted_class"] == 2
    assert all(a > b for a, b in zip(rep["eps_n"], rep["eps_n"][1:]))


def test_verify_traveling_wave():
    rep = radshock.verify_traveling_wave(
        "burgers", 0.5, -0.5, 1.0, -30.0, 30.0, 512, 1.0
    )
    assert rep["l1_drift"] < 0.05
    assert abs(rep["recovered_speed"]) < 0.05
