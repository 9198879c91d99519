import math

import numpy as np
import pytest

from numrange.bloch import (BlochInputs, a_of_s, bloch_case_analysis, bloch_inputs, bloch_propA1,
                            bloch_report, maximize_rho, q_of_s, r_star, r_star_details, rho, rho_s,
                            rho_theta0, s_star)
from numrange.errors import DomainError, NoRoot, PreconditionError, ValidationError

from conftest import poly1

EX = BlochInputs.stylized(math.pi / 3, 0.0, 1.0)
S_STAR = 2 - math.sqrt(3)


def test_rho_closed_form_for_worked_data():
    r = np.linspace(0.01, 0.99, 50)
    np.testing.assert_allclose(rho(EX, r), r * (1 - 2 * r) / (1 - r * r), atol=1e-14)


def test_rho_without_delta_is_linear():
    inp = BlochInputs.stylized(0.7, 0.5, 0.0)
    np.testing.assert_allclose(rho(inp, [0.2, 0.9]), [0.1, 0.45])
    assert maximize_rho(inp) == pytest.approx((1.0, 0.5))


def test_rho_slope_at_origin():
    inp = BlochInputs.stylized(0.4, 0.3, 0.8)
    assert rho(inp, 1e-9) / 1e-9 == pytest.approx(0.7, rel=1e-6)


def test_r_star_of_worked_data():
    d = r_star_details(EX)
    assert d.value == 0.5
    assert d.branch == "degenerate"
    assert d.bisection == pytest.approx(0.5, abs=1e-10)
    assert math.cos(EX.theta) == pytest.approx(0.5)


def test_r_star_absent_at_theta_zero():
    inp = BlochInputs(0.0, 1.0, 0.0, 0.0, 0.0)
    assert r_star(inp) == 1.0
    with pytest.raises(NoRoot):
        r_star(inp, strict=True)


def test_r_star_theta_zero_with_large_sup():
    inp = BlochInputs(0.0, 1.5, 0.2, 0.2, 0.2)
    rs = r_star(inp)
    assert rs == pytest.approx((1 - 0.2) / (2 * 1.5 - 0.2 - 1))
    assert rho_theta0(1.5, 0.2, rs) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("seed", range(10))
def test_r_star_closed_form_and_bisection(seed):
    rng = np.random.default_rng(seed)
    th = rng.uniform(0.1, 1.4) * rng.choice([-1, 1])
    inp = BlochInputs.stylized(th, rng.uniform(-1, 0.9), rng.uniform(0.1, 3))
    d = r_star_details(inp)
    assert d.root
    assert d.bisection == pytest.approx(d.closed_form, abs=1e-8)
    assert rho(inp, d.value) == pytest.approx(0.0, abs=1e-9)
    assert np.all(rho(inp, np.linspace(d.value / 100, d.value * 0.99, 50)) > 0)
    s = s_star(inp)
    assert s.bisection == pytest.approx(s.closed_form, abs=1e-8)
    assert 0 < s.value < d.value < 1


def test_q_and_a_of_worked_data():
    for s in (0.1, 0.3, 0.45):
        assert q_of_s(EX, s) == pytest.approx(s * (2 - s) / (1 - s * s), rel=1e-13)
        assert a_of_s(EX, s) == pytest.approx((s * s - 4 * s + 1) / (1 - s * s), rel=1e-12)


def test_rho_s_agrees_at_s_and_vanishes_at_origin():
    for s in (0.1, 0.3, 0.45):
        assert rho_s(EX, s, s) == pytest.approx(rho(EX, s), abs=1e-12)
        assert rho_s(EX, s, 0.0) == 0.0


def test_rho_s_domain():
    with pytest.raises(DomainError):
        rho_s(EX, 0.6, 0.1)
    with pytest.raises(DomainError):
        rho_s(EX, 0.3, 0.4)


def test_s_star_of_worked_data():
    s = s_star(EX)
    assert s.value == pytest.approx(S_STAR, abs=1e-10)
    assert s.rho_value == pytest.approx(S_STAR / 2, abs=1e-10)


def test_case_b_below_s_star():
    for s in (0.05, 0.15, 0.25):
        res = bloch_case_analysis(EX, s)
        assert res.branch == "b"
        assert res.max_value == pytest.approx(s * (1 - 2 * s) / (1 - s * s), abs=1e-12)
        assert res.numeric_argmax == pytest.approx(s, abs=1e-6)


def test_case_a_at_s_star():
    res = bloch_case_analysis(EX, S_STAR)
    assert res.branch == "a"
    assert res.max_value == pytest.approx(S_STAR / 2, abs=1e-10)


def test_case_c_interior_maximiser():
    # Q(s) > 2/3 here, so the maximiser lies strictly inside (0, s)
    res = bloch_case_analysis(EX, 0.45)
    assert res.branch == "c"
    assert res.Q > 2 / 3
    assert res.argmax < 0.45
    assert res.argmax == pytest.approx(res.numeric_argmax, abs=1e-6)
    assert res.max_value >= rho(EX, 0.45)


def test_case_c_endpoint_maximiser():
    # s_* < s < 3 - sqrt(7), where Q(s) <= 2/3
    res = bloch_case_analysis(EX, 0.3)
    assert res.branch == "c"
    assert res.argmax == 0.3
    assert res.numeric_argmax == pytest.approx(0.3, abs=1e-6)
    assert res.max_value >= 0.3 / 3


def test_global_maximiser_of_worked_data():
    r0, v0 = maximize_rho(EX)
    assert r0 == pytest.approx(S_STAR, abs=1e-8)
    assert v0 == pytest.approx(S_STAR / 2, abs=1e-12)


def test_pointwise_domination_of_rho_s():
    rng = np.random.default_rng(4)
    for _ in range(200):
        inp = BlochInputs.stylized(rng.uniform(-1.4, 1.4), rng.uniform(-1, 0.9), rng.uniform(0, 3))
        rs = r_star(inp)
        s = rng.uniform(0.01, 0.99) * rs
        r = np.linspace(0, s, 40)
        assert np.all(rho_s(inp, s, r, check=False)[1:] <= rho(inp, r[1:]) + 1e-12)


@pytest.mark.xfail(strict=True, reason="past the maximiser of rho_s, rho(s) sits below rho_s(r) for some r < s")
def test_rho_at_s_dominates_rho_s_on_grid():
    s = 0.45
    r = np.linspace(0, s, 200)
    assert np.all(rho_s(EX, s, r) <= rho(EX, s) + 1e-12)


def test_rho_is_concave():
    for inp in (EX, BlochInputs.stylized(-0.8, 0.2, 0.6)):
        r = np.linspace(0.01, 0.98, 300)
        v = rho(inp, r)
        assert np.all(v[:-2] - 2 * v[1:-1] + v[2:] < 0)


def test_theta_zero_maximisers():
    r0, v0 = bloch_propA1(1.0, 0.0)
    assert r0 == pytest.approx(math.sqrt(2) - 1)
    assert v0 == pytest.approx((math.sqrt(2) - 1) ** 2)
    assert bloch_propA1(0.4, 0.0) == pytest.approx((1.0, 0.6))
    for N, L in ((1.0, 0.0), (0.9, -0.5), (2.0, 0.3)):
        inp = BlochInputs(0.0, N, L, L, L)
        assert maximize_rho(inp)[0] == pytest.approx(bloch_propA1(N, L)[0], abs=1e-6)


def test_theta_zero_rho_uses_L_only():
    inp = BlochInputs(0.0, 1.0, 0.0, 0.0, -0.7)
    assert inp.delta == 1.0
    np.testing.assert_allclose(rho(inp, [0.3]), rho_theta0(1.0, 0.0, 0.3))


def test_input_validation():
    with pytest.raises(ValidationError):
        BlochInputs.stylized(0.3, 1.0, 0.5)
    with pytest.raises(ValidationError):
        BlochInputs.stylized(0.3, 0.0, -0.5)
    with pytest.raises(PreconditionError):
        bloch_propA1(0.0, 1.2)


def test_inputs_from_map():
    h = poly1([0, 0.2, 0.3])
    inp = bloch_inputs(h, 0.5)
    assert inp.L == pytest.approx(0.2)
    assert inp.l_theta == pytest.approx(0.2 * math.cos(0.5))
    assert inp.delta >= 0
    with pytest.raises(PreconditionError):
        bloch_inputs(poly1([0.1, 0.2]), 0.5)
    with pytest.raises(PreconditionError):
        bloch_inputs(poly1([0, 0.2], R=2.0), 0.5)


def test_report_is_serialisable():
    import json
    rep = bloch_report(EX, grid=8)
    doc = rep.to_dict()
    json.dumps(doc)
    assert doc["s_star"]["value"] == pytest.approx(S_STAR, abs=1e-10)
