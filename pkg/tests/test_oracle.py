import math

import numpy as np
import pytest

from numrange.errors import DomainError
from numrange.maps import PolyMap, identity_map
from numrange.oracle import (ball_extremum, check_dissipative, deriv_bounds, estimate_NR,
                             hermitian_extremes, numerical_radius, range_stats, sphere_points,
                             sup_re_pairing)

from conftest import poly1


def test_identity_sup_on_sphere():
    assert sup_re_pairing(identity_map(1), 0.5) == pytest.approx(0.25, abs=1e-12)


def test_cayley_sup_near_zero_at_right_angle(cayley):
    # Re(e^{i pi/2} h(x) conj x) = -r^2 Re((1+x)/(1-x)); on |x| = r its sup is -r^2 (1-r)/(1+r)
    r = 0.9
    expected = -r * r * (1 - r) / (1 + r)
    got = sup_re_pairing(cayley, r, math.pi / 2)
    assert got == pytest.approx(expected, abs=1e-9)
    assert abs(got) < 5e-2


def test_diagonal_map_in_two_dimensions():
    h = PolyMap.affine(np.diag([1, 2j]))
    assert sup_re_pairing(h, 1.0) == pytest.approx(1.0, abs=1e-9)


def test_cayley_finite_and_infinite_split(cayley):
    assert estimate_NR(cayley, 0.0) == math.inf
    assert estimate_NR(cayley, math.pi / 2) == pytest.approx(0.0, abs=1e-3)


def test_minus_identity_ball_sup_is_zero():
    res = ball_extremum(poly1([0, -1]))
    assert not res.infinite
    assert res.value == pytest.approx(0.0, abs=1e-12)


def test_ball_sup_of_polynomial_includes_boundary():
    # polynomials extend past the ball, so the ladder ends on the sphere |x| = R
    res = ball_extremum(poly1([0, 1]))
    assert res.value == pytest.approx(1.0, abs=1e-12)
    assert res.rungs[-1][0] == 1.0


@pytest.mark.parametrize("theta", [0.0, 0.3, 1.2, -2.0])
def test_deriv_bounds_of_identity_are_cos_theta(theta):
    d = deriv_bounds(identity_map(3), theta)
    assert d.L_theta == pytest.approx(math.cos(theta), abs=1e-14)
    assert d.l_theta == pytest.approx(math.cos(theta), abs=1e-14)


def test_deriv_bounds_of_reflection():
    d = deriv_bounds(PolyMap.affine(np.diag([1.0, -1.0])), 0.0)
    assert (d.L_theta, d.l_theta) == pytest.approx((1.0, -1.0))


def test_hermitian_extremes_against_sphere_sampling(rng):
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    hi, lo = hermitian_extremes(A, 0.4)
    pts = sphere_points(3, 1.0, 20000, 1)
    vals = np.real(np.exp(0.4j) * np.einsum("ij,kj,ki->k", A, pts, pts.conj()))
    assert vals.max() <= hi + 1e-12
    assert vals.min() >= lo - 1e-12
    assert vals.max() > hi - 0.1


def test_dissipative_checks():
    assert check_dissipative(poly1([0, -1]), 0.0, 0.0, 0.5).dissipative
    v = check_dissipative(poly1([0, 1]), 0.0, 0.0, 0.5)
    assert not v.dissipative
    assert np.linalg.norm(v.witness) > 0.99


def test_dissipative_rejects_bad_annulus():
    with pytest.raises(DomainError):
        check_dissipative(poly1([0, -1]), eps=2.0)


def test_numerical_radius_and_range_stats():
    h = poly1([0, 1j])
    assert numerical_radius(h, 0.5) == pytest.approx(0.25)
    st = range_stats(poly1([0.1, 1]), 0.5)
    assert st.N_r == pytest.approx(0.25 + 0.05, abs=1e-9)
    assert st.M_r == pytest.approx(0.25, abs=1e-9)
    assert st.m_r == pytest.approx(0.25, abs=1e-9)
    assert st.W_r == pytest.approx(0.6, abs=1e-9)


def test_oracle_is_deterministic_under_seed(rng):
    from numrange.maps import random_polymap
    h = random_polymap(rng, 2, 3)
    assert estimate_NR(h, 0.2, seed=5) == estimate_NR(h, 0.2, seed=5)


def test_radius_outside_ball_rejected():
    with pytest.raises(DomainError):
        sup_re_pairing(identity_map(1), 1.5)
