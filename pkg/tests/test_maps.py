import json
import math

import numpy as np
import pytest

from numrange.errors import DimensionMismatch, ParseError, SingularPoint, ValidationError
from numrange.maps import (BallDomain, BuiltinMap, FunctionMap, PolyMap, dumps_map, identity_map,
                           load_map, load_map_file, minus_identity, pairing, random_polymap,
                           serialize_map)

from conftest import poly1


def test_identity_evaluates_to_its_argument():
    h = poly1([0, 1])
    assert h(np.array([0.5]))[0] == pytest.approx(0.5)


def test_cayley_vanishes_at_origin(cayley):
    assert abs(cayley(np.array([0.0]))[0]) == 0


def test_spiral_ref_theta_zero_scales_by_four():
    f = BuiltinMap(BallDomain(2, 1.0), "spiral_ref", 0.0)
    np.testing.assert_allclose(f(np.array([0.5, 0.0])), [2.0, 0.0], atol=1e-14)
    # independent scalar evaluation of x / (1 - x1)^2 on a generic point
    x = np.array([0.3 + 0.1j, -0.2j])
    np.testing.assert_allclose(f(x), x / (1 - x[0]) ** 2, rtol=1e-13)


def test_spiral_ref_general_theta_matches_power():
    th = 0.7
    f = BuiltinMap(BallDomain(2, 1.0), "spiral_ref", th)
    x = np.array([0.4 - 0.2j, 0.1 + 0.3j])
    expected = x * (1 - x[0]) ** (-(1 + np.exp(2j * th)))
    np.testing.assert_allclose(f(x), expected, rtol=1e-12)


@pytest.mark.parametrize("coeffs, expected", [([0, 0, 1], 0.0), ([0, 2, 1], 2.0)])
def test_derivative_at_zero_of_polynomials(coeffs, expected):
    assert poly1(coeffs).derivative_at_zero()[0, 0] == pytest.approx(expected)


def test_cayley_derivative_at_zero_is_i(cayley):
    assert cayley.derivative_at_zero()[0, 0] == pytest.approx(1j, abs=1e-12)


def test_jacobian_matches_finite_difference():
    h = random_polymap(np.random.default_rng(3), 3, 3, radius=1.0)
    x = np.array([0.1 + 0.2j, -0.3j, 0.05])
    J = h.jacobian(x)
    eps = 1e-7
    for j in range(3):
        e = np.zeros(3, complex)
        e[j] = eps
        np.testing.assert_allclose((h(x + e) - h(x - e)) / (2 * eps), J[:, j], atol=1e-7)


def test_builtin_jacobian_uses_cauchy_rule(cayley):
    x = np.array([0.3 + 0.1j])
    exact = 1j * (1 + 2 * x - x * x) / (1 - x) ** 2
    assert cayley.jacobian(x)[0, 0] == pytest.approx(exact[0], abs=1e-10)


def test_pairing_is_linear_in_first_slot():
    u = np.array([1 + 1j, 2.0])
    v = np.array([1j, 1.0])
    assert pairing(u, v) == pytest.approx((1 + 1j) * -1j + 2)
    assert pairing(2j * u, v) == pytest.approx(2j * pairing(u, v))


def test_load_identity_document():
    h = load_map('{"dim":1,"R":1,"poly":[[{"idx":[1],"re":1,"im":0}]]}')
    assert isinstance(h, PolyMap)
    assert h(np.array([0.25j]))[0] == pytest.approx(0.25j)


def test_load_builtins():
    h = load_map({"dim": 1, "R": 1, "builtin": "cayley_i"})
    x = np.array([0.2])
    assert h(x)[0] == pytest.approx(1j * 0.2 * 1.2 / 0.8)
    f = load_map({"dim": 2, "R": 1, "builtin": "spiral_ref", "theta": 0.0})
    assert f.dim == 2


@pytest.mark.parametrize("doc, path", [
    ({"R": 1, "poly": [[]]}, "dim"),
    ({"dim": 1, "poly": [[]]}, "R"),
    ({"dim": 1, "R": 1}, ""),
    ({"dim": 1, "R": 1, "poly": [[]], "builtin": "cayley_i"}, ""),
    ({"dim": 1, "R": -1, "poly": [[]]}, "R"),
    ({"dim": 1, "R": 1, "poly": [[{"idx": [1, 0], "re": 1}]]}, "poly[0][0]"),
    ({"dim": 1, "R": 1, "poly": [[{"idx": [-1], "re": 1}]]}, "poly[0][0]"),
    ({"dim": 1, "R": 1, "poly": [[{"idx": [1], "re": "x"}]]}, "poly[0][0].re"),
    ({"dim": 1, "R": 1, "builtin": "nope"}, "builtin"),
    ({"dim": 2, "R": 1, "builtin": "cayley_i"}, "dim"),
    ({"dim": 1, "R": 1, "poly": [[]], "extra": 1}, "extra"),
])
def test_malformed_documents_are_rejected(doc, path):
    with pytest.raises(ValidationError) as info:
        load_map(doc)
    assert info.value.path.startswith(path)


def test_parse_errors():
    with pytest.raises(ParseError):
        load_map("{not json")
    with pytest.raises(ParseError):
        load_map('{"dim":1,"R":NaN,"poly":[[]]}')


def test_poly_component_count_must_match_dim():
    with pytest.raises((ValidationError, DimensionMismatch)):
        load_map({"dim": 2, "R": 1, "poly": [[{"idx": [1, 0], "re": 1}]]})


def test_wrong_point_dimension():
    with pytest.raises(DimensionMismatch):
        identity_map(2)(np.zeros(3))


def test_singular_point_of_cayley_is_reported(cayley):
    with pytest.raises(SingularPoint):
        cayley(np.array([1.0]))


def test_serialize_round_trip(rng):
    h = random_polymap(rng, 2, 3, radius=1.5, constant=True)
    again = load_map(dumps_map(h))
    x = np.array([0.3 + 0.2j, -0.4])
    np.testing.assert_allclose(again(x), h(x), rtol=1e-14)
    assert serialize_map(again) == serialize_map(h)
    assert json.loads(dumps_map(h)) == serialize_map(h)


def test_builtin_serialize_round_trip():
    f = BuiltinMap(BallDomain(2, 1.0), "spiral_ref", 0.3)
    g = load_map(serialize_map(f))
    x = np.array([0.1, 0.2j])
    np.testing.assert_allclose(g(x), f(x))


def test_sample_maps_load(maps_dir):
    files = sorted(maps_dir.glob("*.json"))
    assert files
    for p in files:
        h = load_map_file(p)
        assert np.all(np.isfinite(h(np.zeros(h.dim))))


def test_minus_identity_and_function_map():
    h = poly1([0.1, 0.5])
    g = minus_identity(h)
    assert g(np.array([0.2]))[0] == pytest.approx(0.1 + 0.1 - 0.2)
    fm = FunctionMap(BallDomain(1, 1.0), lambda p: p ** 3)
    assert fm.jacobian(np.array([0.5]))[0, 0] == pytest.approx(0.75, abs=1e-9)


def test_affine_constructor():
    A = np.array([[1, 2j], [0, -1]])
    h = PolyMap.affine(A, [0.5, 0])
    x = np.array([0.1, 0.2])
    np.testing.assert_allclose(h(x), A @ x + [0.5, 0])
    np.testing.assert_allclose(h.derivative_at_zero(), A)


def test_domain_validation():
    with pytest.raises(ValidationError):
        BallDomain(0, 1.0)
    with pytest.raises(ValidationError):
        BallDomain(1, math.inf)
