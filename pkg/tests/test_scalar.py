import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from numrange.errors import DomainError, ValidationError
from numrange.maps import BallDomain, BuiltinMap
from numrange.scalar import (GridPlan, ScalarPoly, boundprime, check_b02, check_boundprime, check_hbc,
                             check_km, check_mazyac, check_ref1, km_factor, lifted_bound_b02,
                             lifted_bound_mazyac, lifted_bound_ref1, littlewood_lower,
                             random_scalar_poly, restrict, run_scalar_suite, sup_re,
                             sup_re_conj_product)

SMALL = GridPlan(24, 24)


def test_km_factor_values():
    assert km_factor(0.0, 0.5, 1.0) == pytest.approx(2 / 3)
    assert km_factor(1.1, 0.0, 1.0) == 0.0
    r = 1 - 1e-9
    assert km_factor(0.0, r, 1.0) == pytest.approx(2 * r / (1 + r), rel=1e-12)
    assert km_factor(0.0, r, 1.0) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(DomainError):
        km_factor(0.0, 1.0, 1.0)


def test_hbc_constant_is_equality():
    v = check_hbc(ScalarPoly((0.3 + 0.2j,)), SMALL)
    assert v.ok
    assert v.max_violation == pytest.approx(0.0, abs=1e-15)


def test_hbc_identity_on_real_axis():
    # r <= 2r/(1+r) for 0 < r <= 1
    v = check_hbc(ScalarPoly((0, 1)), SMALL)
    assert v.ok
    assert v.max_violation <= 0


@pytest.mark.parametrize("seed", range(5))
def test_hbc_square_under_rotation(seed):
    rot = np.exp(2j * math.pi * np.random.default_rng(seed).random())
    assert check_hbc(ScalarPoly((0, 0, rot)), GridPlan(100, 100)).ok


@pytest.mark.parametrize("side", ["upper", "lower"])
def test_km_on_random_sextic(side):
    rng = np.random.default_rng(6)
    c = rng.uniform(-1, 1, 7) + 1j * rng.uniform(-1, 1, 7)
    assert check_km(ScalarPoly(tuple(c)), math.pi / 3, side, GridPlan(100, 100)).ok


def test_km_constant_both_sides_zero():
    v = check_km(ScalarPoly((2.0,)), 0.4, "upper", SMALL)
    assert v.max_violation == pytest.approx(0.0, abs=1e-14)


def test_lifted_bounds_vanish_for_zero_function():
    f = ScalarPoly((0,))
    z = 0.5 * np.exp(1j * np.linspace(0, 6, 7))
    np.testing.assert_allclose(lifted_bound_ref1(f, 1.0, 0.5, z), 0.0, atol=1e-15)
    np.testing.assert_allclose(lifted_bound_mazyac(f, 1.0, 0.5, 0.3, z), 0.0, atol=1e-15)
    np.testing.assert_allclose(lifted_bound_b02(f, 1.0, 0.5, 0.3, z), 0.0, atol=1e-15)


def test_b02_identity_is_equality():
    f = ScalarPoly((0.2, 1.0))
    r = 0.6
    z = r * np.exp(1j * np.linspace(0, 6, 9))
    lhs = np.real((f(z) - f.value_at_zero()) * np.conj(z))
    np.testing.assert_allclose(lifted_bound_b02(f, 1.0, r, 0.0, z), lhs, atol=1e-12)


def test_b02_constant_is_zero():
    z = 0.5 * np.exp(1j * np.linspace(0, 6, 5))
    np.testing.assert_allclose(lifted_bound_b02(ScalarPoly((3 - 1j,)), 1.0, 0.5, 0.7, z), 0.0)


@pytest.mark.parametrize("seed", range(4))
def test_lifted_bounds_random_cubics(seed):
    rng = np.random.default_rng(100 + seed)
    c = rng.uniform(-1, 1, 4) + 1j * rng.uniform(-1, 1, 4)
    f = ScalarPoly(tuple(c))
    assert check_ref1(f, SMALL).ok
    assert check_mazyac(f, math.pi / 4, SMALL).ok
    assert check_b02(f, math.pi / 4, SMALL).ok
    assert check_boundprime(f).ok


def test_lifted_bounds_reject_points_off_the_circle():
    with pytest.raises(DomainError):
        lifted_bound_ref1(ScalarPoly((0, 1)), 1.0, 0.5, np.array([0.4]))


def test_boundprime_pair():
    a, b = boundprime(ScalarPoly((0, 1 + 2j, 0.5)))
    assert a == pytest.approx(1.0)
    assert b >= a


def test_sup_helpers():
    f = ScalarPoly((1, 1))
    assert sup_re(f) == pytest.approx(2.0, abs=1e-9)
    assert sup_re(f, "inf") == pytest.approx(0.0, abs=1e-9)
    assert sup_re_conj_product(ScalarPoly((0, -1))) == pytest.approx(0.0, abs=1e-12)


def test_littlewood_limits():
    rep = littlewood_lower(0.7, 0.7, 1.0, 0.4)
    assert rep.p == pytest.approx(0.7)
    small = littlewood_lower(0.7, 2.0, 1.0, 1e-6)
    assert small.p == pytest.approx(0.7, abs=1e-5)
    assert small.lower == pytest.approx(0.0, abs=1e-11)


def test_two_sided_upper_needs_scaling():
    # f(z) = -z: L = -1, M_R = 0 and M_r = -r^2.  The unscaled upper form drops below M_r.
    r = 0.5
    rep = littlewood_lower(-1.0, 0.0, 1.0, r)
    M_r = -r * r
    assert rep.sandwich_lower <= M_r + 1e-15 <= rep.sandwich_upper + 2e-15
    assert rep.sandwich_upper_unscaled < M_r


def test_scalar_poly_validation():
    with pytest.raises(ValidationError):
        ScalarPoly((math.nan,))
    with pytest.raises(ValidationError):
        ScalarPoly((1,), R=0)


def test_gfun_matches_definition():
    f = ScalarPoly((0.3 - 0.1j, 2, 1j), R=2.0)
    g = f.gfun()
    z = np.array([0.7 + 0.2j, -1.1j])
    np.testing.assert_allclose(g(z), (f(z) - f(0)) / z + np.conj(f(0)) * z / 4, rtol=1e-13)


def test_restriction_of_builtin():
    f = restrict(BuiltinMap(BallDomain(1, 1.0), "cayley_i"), [1.0])
    assert f.derivative_at_zero() == pytest.approx(1j, abs=1e-9)
    assert f.R == pytest.approx(0.99)


def test_small_corpus_has_no_violations():
    res = run_scalar_suite(seed=7, trials=10, plan=GridPlan(32, 32))
    assert res.ok, {k: v.max_violation for k, v in res.worst.items()}


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(-math.pi, math.pi))
def test_km_property(seed, theta):
    f = random_scalar_poly(np.random.default_rng(seed), 6)
    assert check_km(f, theta, "upper", SMALL).ok
    assert check_km(f, theta, "lower", SMALL).ok


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_hbc_property_on_g(seed):
    f = random_scalar_poly(np.random.default_rng(seed), 6)
    assert check_hbc(f.gfun(), SMALL).ok
