import math

import pytest

from monotest.schedule import PRACTICAL_CONSTANTS, build_schedule


def test_lambda_formula_eps_01():
    # independent recomputation of eps^2 / (36 ln(12/eps)) at eps = 0.1
    sched = build_schedule(1024, 0.1)
    expected = 0.1 ** 2 / (36.0 * math.log(12.0 / 0.1))
    assert sched.lam == pytest.approx(expected, rel=1e-12)
    assert sched.lam == pytest.approx(5.8023e-5, rel=1e-4)


def test_tau_formula_n1024():
    sched = build_schedule(1024, 0.1)
    assert sched.log2n == 10.0
    assert sched.tau_raw == pytest.approx(sched.lam * 0.1 / 100.0, rel=1e-12)
    assert sched.tau_raw == pytest.approx(5.8023e-8, rel=1e-4)


def test_eps_clamp_warns():
    with pytest.warns(UserWarning):
        sched = build_schedule(64, 0.9)
    assert sched.eps == 0.5
    assert sched.eps_requested == 0.9


def test_input_validation():
    with pytest.raises(ValueError):
        build_schedule(1, 0.1)
    with pytest.raises(ValueError):
        build_schedule(64, 0.0)
    with pytest.raises(ValueError):
        build_schedule(64, 0.1, profile="fancy")


def test_floors_only_raise():
    sched = build_schedule(4096, 0.05)
    assert sched.tau >= sched.tau_raw
    assert sched.rb_tau_prime >= sched.rb_tau_prime_raw
    assert sched.rb_delta >= sched.rb_delta_raw
    assert sched.m_tau_prime >= sched.m_tau_prime_raw
    assert sched.eps_prime >= sched.eps_prime_raw
    assert sched.tau == PRACTICAL_CONSTANTS.tau_floor  # raw is ~1e-9 here
    assert sched.rb_tau_prime == PRACTICAL_CONSTANTS.influence_floor


def test_theoretical_profile_is_literal():
    sched = build_schedule(4096, 0.05, profile="theoretical")
    assert sched.tau == sched.tau_raw
    assert sched.rb_tau_prime == sched.rb_tau_prime_raw
    assert sched.eps_prime == sched.eps_prime_raw
    assert sched.constants.c_rb == 100.0
    assert sched.expected_infeasible


def test_derived_relations():
    sched = build_schedule(256, 0.2)
    c = sched.constants
    assert sched.rb_tau_prime_raw == pytest.approx(
        sched.tau_raw ** 2 * 0.2 ** 3 / c.c_rb)
    assert sched.rb_rounds == math.ceil(c.c_rb / 0.2)
    assert sched.stage_cap == 4 * 8
    assert sched.star_floor == pytest.approx(1.0 / sched.tau ** 2)
    assert sched.rb_regular_threshold == pytest.approx(
        math.sqrt(12 * sched.rb_tau_prime / 0.2))
    assert sched.m_tau_star == pytest.approx(
        sched.m_tau_prime / math.sqrt(sched.lam))
    assert sched.m_cfr_threshold == pytest.approx(
        math.sqrt(c.c_m * sched.m_tau_star))
    assert sched.eps_prime_raw == pytest.approx(
        0.2 ** 3 / (c.c_eps * math.log(1 / 0.2)))
    assert sched.fbr_delta_raw == pytest.approx(
        0.2 ** 3 / (200.0 * c.c_br * 64.0))


def test_round_caps_apply():
    sched = build_schedule(4096, 0.05)
    assert sched.fbr_rounds == PRACTICAL_CONSTANTS.round_cap
    assert sched.m_rounds == PRACTICAL_CONSTANTS.round_cap
    theo = build_schedule(4096, 0.05, profile="theoretical")
    assert theo.fbr_rounds == math.ceil(100.0 * 12 / 0.05 ** 3)


def test_schedule_serializable():
    d = build_schedule(128, 0.1).to_dict()
    assert d["profile"] == "practical"
    assert d["constants"]["c_rb"] == 2.0
    import json
    json.dumps(d)  # must be plain data


def test_schedule_deterministic():
    a = build_schedule(512, 0.17)
    b = build_schedule(512, 0.17)
    assert a == b
