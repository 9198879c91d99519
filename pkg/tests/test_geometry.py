import cmath
import math

import numpy as np
import pytest

from numrange.errors import DomainError, PreconditionError
from numrange.geometry import (extract_generator, spiral_phi, spiral_radius, spiral_radius_bisect,
                               spiral_ref_generator, starlike_phi, starlike_radius,
                               verify_spirallike_on_ball)
from numrange.maps import BallDomain, BuiltinMap, FunctionMap, identity_map

from conftest import poly1


def test_starlike_radius_values():
    assert starlike_radius(math.pi / 4) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert starlike_radius(0.0) == 1.0
    thetas = np.linspace(-1.5, 1.5, 301)
    vals = [starlike_radius(t) for t in thetas]
    assert min(vals) >= starlike_radius(math.pi / 4) - 1e-15


def test_starlike_phi_vanishes_at_radius():
    for t in (0.2, 0.7, 1.2):
        assert starlike_phi(starlike_radius(t), t) == pytest.approx(0.0, abs=1e-12)


def test_spiral_radius_values():
    assert spiral_radius(0.0) == 1.0
    assert spiral_radius(math.pi / 4) == pytest.approx(math.sqrt(2) - 1, abs=1e-14)
    assert spiral_radius(math.pi / 2 - 1e-6) < 1e-6


@pytest.mark.parametrize("theta", np.linspace(-1.5, 1.5, 21))
def test_radii_are_even_and_match_bisection(theta):
    assert starlike_radius(theta) == starlike_radius(-theta)
    assert spiral_radius(theta) == spiral_radius(-theta)
    assert spiral_radius(theta) == pytest.approx(spiral_radius_bisect(theta), abs=1e-10)
    assert spiral_phi(spiral_radius(theta), theta) == pytest.approx(0.0, abs=1e-12)


def test_spiral_radius_decreases():
    vals = [spiral_radius(t) for t in np.linspace(0, 1.55, 200)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_angle_domain():
    for f in (starlike_radius, spiral_radius):
        with pytest.raises(DomainError):
            f(math.pi / 2)


def test_identity_generator():
    h = extract_generator(identity_map(2))
    x = np.array([0.3, -0.2j])
    np.testing.assert_allclose(h(x), x, atol=1e-12)


def test_koebe_generator():
    koebe = FunctionMap(BallDomain(1, 1.0), lambda p: p / (1 - p) ** 2,
                        jac=lambda p: ((1 + p) / (1 - p) ** 3)[:, :, None])
    h = extract_generator(koebe)
    z = 0.8 * np.exp(2j * np.pi * np.arange(100) / 100)[:, None] * np.linspace(0.1, 1, 100)[:, None]
    np.testing.assert_allclose(h(z), z * (1 - z) / (1 + z), atol=1e-12)


@pytest.mark.parametrize("theta", [0.0, 0.5, -1.0])
def test_reference_map_generator(theta):
    f = BuiltinMap(BallDomain(2, 1.0), "spiral_ref", theta)
    mu = cmath.exp(1j * theta)
    h = extract_generator(f, mu)
    assert np.linalg.norm(h.value_at_zero()) < 1e-12
    np.testing.assert_allclose(h.derivative_at_zero(), mu * np.eye(2), atol=1e-8)
    x = np.array([0.3 + 0.1j, -0.4j])
    np.testing.assert_allclose(extract_generator(f)(x), spiral_ref_generator(theta, 2)(x), atol=1e-9)


def test_generator_preconditions():
    with pytest.raises(PreconditionError):
        extract_generator(poly1([0.1, 1]))
    with pytest.raises(PreconditionError):
        extract_generator(poly1([0, 0, 1]))


@pytest.mark.parametrize("theta", [math.pi / 6, -math.pi / 3])
def test_reference_map_spirallike_on_whole_ball(theta):
    f = BuiltinMap(BallDomain(2, 1.0), "spiral_ref", theta)
    v = verify_spirallike_on_ball(f, cmath.exp(1j * theta), 1.0, samples=2000,
                                  generator=spiral_ref_generator(theta, 2))
    assert v.ok


@pytest.mark.parametrize("theta", [math.pi / 6, math.pi / 4])
def test_starlike_radius_is_sharp(theta):
    f = BuiltinMap(BallDomain(1, 1.0), "spiral_ref", theta)
    g = spiral_ref_generator(theta, 1)
    rs = starlike_radius(theta)
    assert verify_spirallike_on_ball(f, 1.0, 0.99 * rs, generator=g).ok
    assert not verify_spirallike_on_ball(f, 1.0, min(1.01 * rs, 1.0), generator=g).ok


@pytest.mark.parametrize("theta", [math.pi / 6, math.pi / 3])
def test_spiral_radius_is_sharp(theta):
    f = BuiltinMap(BallDomain(1, 1.0), "spiral_ref", 0.0)
    g = spiral_ref_generator(0.0, 1)
    mu = cmath.exp(1j * theta)
    rs = spiral_radius(theta)
    assert verify_spirallike_on_ball(f, mu, 0.99 * rs, generator=g).ok
    assert not verify_spirallike_on_ball(f, mu, 1.01 * rs, generator=g).ok


def test_extracted_and_closed_generators_give_same_verdict():
    f = BuiltinMap(BallDomain(1, 1.0), "spiral_ref", 0.5)
    a = verify_spirallike_on_ball(f, 1.0, 0.6, samples=512)
    b = verify_spirallike_on_ball(f, 1.0, 0.6, samples=512, generator=spiral_ref_generator(0.5, 1))
    assert a.worst_margin == pytest.approx(b.worst_margin, abs=1e-8)


def test_spirallike_preconditions():
    f = identity_map(1)
    with pytest.raises(PreconditionError):
        verify_spirallike_on_ball(f, -1.0, 0.5)
    with pytest.raises(DomainError):
        verify_spirallike_on_ball(f, 1.0, 1.5)
