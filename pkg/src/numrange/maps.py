"""Holomorphic maps on balls of C^n: representation, evaluation, derivatives, I/O.

Two concrete bodies exist: sparse polynomial maps (:class:`PolyMap`) and the
registered analytic maps (:class:`BuiltinMap`).  :class:`FunctionMap` wraps an
arbitrary vectorised callable and is used for derived maps (``F - I``,
generators extracted from spirallike maps, ...).

All maps accept either a single point of shape ``(n,)`` or a batch of shape
``(k, n)`` and return an array of the same shape.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .errors import DimensionMismatch, ParseError, SingularPoint, ValidationError

MAX_DEGREE = 64
SINGULAR_TOL = 1e-14
ZERO_NODES = 256
POINT_NODES = 64

BUILTIN_TAGS = ("cayley_i", "spiral_ref", "moebius_auto", "linear")


@dataclass(frozen=True)
class BallDomain:
    """Open ball of radius ``radius`` centred at the origin of C^dim."""

    dim: int
    radius: float = 1.0

    def __post_init__(self):
        if isinstance(self.dim, bool) or int(self.dim) != self.dim or self.dim < 1:
            raise ValidationError("dim", f"must be a positive integer, got {self.dim!r}")
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValidationError("R", f"must be positive and finite, got {self.radius!r}")


def pairing(u, v) -> np.ndarray | complex:
    """Hermitian pairing <u, v> = sum u_i conj(v_i) along the last axis."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    out = np.sum(u * np.conj(v), axis=-1)
    return complex(out) if out.ndim == 0 else out


def _as_points(x, dim: int) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=complex)
    single = arr.ndim == 1
    if arr.ndim not in (1, 2) or arr.shape[-1] != dim:
        raise DimensionMismatch(f"expected points of dimension {dim}, got shape {arr.shape}")
    return (arr[None, :] if single else arr), single


def cauchy_jacobian(fn: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
                    rho: np.ndarray, nodes: int) -> np.ndarray:
    """Jacobians of a vectorised holomorphic ``fn`` at the rows of ``x``.

    Column j is d/dz fn(x + z e_j) at z = 0, from the trapezoid rule on the
    circle |z| = rho (one radius per row).  Returns shape ``(k, n_out, n)``.
    """
    k, n = x.shape
    w = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    eye = np.eye(n)
    pts = x[:, None, None, :] + (rho[:, None, None, None] * w[None, :, None, None]) * eye[None, None, :, :]
    vals = np.asarray(fn(pts.reshape(-1, n)))
    vals = vals.reshape(k, nodes, n, -1)
    jac = np.einsum("kmjo,m->koj", vals, np.conj(w)) / (nodes * rho[:, None, None])
    return jac


class HoloMap:
    """Base class: a holomorphic map from the ball ``domain`` into C^n."""

    domain: BallDomain

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def radius(self) -> float:
        return self.domain.radius

    def _eval(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x) -> np.ndarray:
        pts, single = _as_points(x, self.dim)
        out = self._eval(pts)
        return out[0] if single else out

    def jacobian(self, x) -> np.ndarray:
        """h'(x) as an n x n matrix (or a stack of them for a batch)."""
        pts, single = _as_points(x, self.dim)
        norms = np.linalg.norm(pts, axis=1)
        rho = np.where(norms == 0.0, self.radius / 2, (self.radius - norms) / 2)
        nodes = ZERO_NODES if single and norms[0] == 0.0 else POINT_NODES
        jac = cauchy_jacobian(self._eval, pts, rho, nodes)
        return jac[0] if single else jac

    def derivative_at_zero(self) -> np.ndarray:
        pts = np.zeros((1, self.dim), dtype=complex)
        return cauchy_jacobian(self._eval, pts, np.array([self.radius / 2]), ZERO_NODES)[0]

    def value_at_zero(self) -> np.ndarray:
        return self(np.zeros(self.dim, dtype=complex))


# -- polynomial maps ---------------------------------------------------------

Monomial = tuple[tuple[int, ...], complex]


@dataclass(frozen=True)
class PolyMap(HoloMap):
    """Sparse polynomial map; ``components[k]`` lists the monomials of h_k."""

    domain: BallDomain
    components: tuple[tuple[Monomial, ...], ...]

    def __post_init__(self):
        n = self.domain.dim
        comps = tuple(
            tuple((tuple(int(e) for e in idx), complex(c)) for idx, c in comp)
            for comp in self.components
        )
        object.__setattr__(self, "components", comps)
        if len(comps) != n:
            raise ValidationError("poly", f"expected {n} components, got {len(comps)}")
        exps: dict[tuple[int, ...], int] = {}
        for k, comp in enumerate(comps):
            for m, (idx, c) in enumerate(comp):
                where = f"poly[{k}][{m}]"
                if len(idx) != n:
                    raise ValidationError(f"{where}.idx", f"expected {n} entries, got {len(idx)}")
                if any(e < 0 for e in idx):
                    raise ValidationError(f"{where}.idx", "exponents must be >= 0")
                if sum(idx) > MAX_DEGREE:
                    raise ValidationError(f"{where}.idx", f"degree {sum(idx)} exceeds cap {MAX_DEGREE}")
                if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                    raise ValidationError(where, "coefficient must be finite")
                exps.setdefault(idx, len(exps))
        table = np.zeros((max(len(exps), 1), n), dtype=int)
        coef = np.zeros((max(len(exps), 1), n), dtype=complex)
        for idx, row in exps.items():
            table[row] = idx
        for k, comp in enumerate(comps):
            for idx, c in comp:
                coef[exps[idx], k] += c
        object.__setattr__(self, "_exponents", table)
        object.__setattr__(self, "_coef", coef)

    @classmethod
    def from_terms(cls, dim: int, terms: Sequence[Sequence[tuple[Sequence[int], complex]]],
                   radius: float = 1.0) -> PolyMap:
        return cls(BallDomain(dim, radius), tuple(tuple((tuple(i), c) for i, c in comp) for comp in terms))

    @classmethod
    def affine(cls, matrix, offset=None, radius: float = 1.0) -> PolyMap:
        """h(x) = matrix @ x + offset."""
        a = np.atleast_2d(np.asarray(matrix, dtype=complex))
        n = a.shape[0]
        b = np.zeros(n, dtype=complex) if offset is None else np.asarray(offset, dtype=complex).reshape(n)
        eye = np.eye(n, dtype=int)
        comps = []
        for k in range(n):
            comp = []
            if b[k] != 0:
                comp.append(((0,) * n, complex(b[k])))
            for j in range(n):
                if a[k, j] != 0:
                    comp.append((tuple(eye[j]), complex(a[k, j])))
            comps.append(tuple(comp))
        return cls(BallDomain(n, radius), tuple(comps))

    @property
    def degree(self) -> int:
        return max((sum(idx) for comp in self.components for idx, _ in comp), default=0)

    def _eval(self, pts: np.ndarray) -> np.ndarray:
        powers = np.prod(pts[:, None, :] ** self._exponents[None, :, :], axis=2)
        return powers @ self._coef

    def jacobian(self, x) -> np.ndarray:
        pts, single = _as_points(x, self.dim)
        e = self._exponents
        n = self.dim
        jac = np.zeros((pts.shape[0], n, n), dtype=complex)
        for j in range(n):
            d = e.copy()
            scale = d[:, j].astype(float)
            d[:, j] = np.maximum(d[:, j] - 1, 0)
            mono = np.prod(pts[:, None, :] ** d[None, :, :], axis=2) * scale
            jac[:, :, j] = mono @ self._coef
        return jac[0] if single else jac

    def derivative_at_zero(self) -> np.ndarray:
        n = self.dim
        a = np.zeros((n, n), dtype=complex)
        for k, comp in enumerate(self.components):
            for idx, c in comp:
                if sum(idx) == 1:
                    a[k, idx.index(1)] += c
        return a

    def homogeneous_part(self, degree: int) -> list[list[Monomial]]:
        return [[(idx, c) for idx, c in comp if sum(idx) == degree] for comp in self.components]

    def nonlinear_size(self) -> float:
        """Largest |coefficient| among monomials of degree >= 2."""
        return max((abs(c) for comp in self.components for idx, c in comp if sum(idx) >= 2), default=0.0)

    def minus_identity(self) -> PolyMap:
        eye = np.eye(self.dim, dtype=int)
        comps = [list(comp) + [(tuple(eye[k]), -1.0 + 0j)] for k, comp in enumerate(self.components)]
        return PolyMap(self.domain, tuple(tuple(c) for c in comps))


# -- registered analytic maps -------------------------------------------------


def _freeze(value):
    if isinstance(value, Mapping):
        return tuple(sorted((k, _freeze(v)) for k, v in value.items()))
    if isinstance(value, (list, tuple)):
        return tuple(_freeze(v) for v in value)
    return value


def _thaw(value):
    if isinstance(value, tuple) and value and all(isinstance(v, tuple) and len(v) == 2
                                                  and isinstance(v[0], str) for v in value):
        return {k: _thaw(v) for k, v in value}
    if isinstance(value, tuple):
        return [_thaw(v) for v in value]
    return value


@dataclass(frozen=True)
class BuiltinMap(HoloMap):
    """One of the registered analytic maps (see ``BUILTIN_TAGS``)."""

    domain: BallDomain
    tag: str
    theta: float = 0.0
    params: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "params", _freeze(self.params) if not isinstance(self.params, tuple) else self.params)
        if self.tag not in BUILTIN_TAGS:
            raise ValidationError("builtin", f"unknown builtin {self.tag!r}; expected one of {BUILTIN_TAGS}")
        if not math.isfinite(self.theta):
            raise ValidationError("theta", "must be finite")
        p = self.param_dict
        if self.tag in ("cayley_i", "moebius_auto") and self.domain.dim != 1:
            raise ValidationError("dim", f"{self.tag} is defined on C^1 only")
        if self.tag == "moebius_auto":
            a = complex(p.get("a_re", 0.0), p.get("a_im", 0.0))
            if abs(a) >= 1:
                raise ValidationError("params.a_re", "moebius_auto needs |a| < 1")
            object.__setattr__(self, "_moebius", (a, complex(np.exp(1j * p.get("psi", 0.0)))))
        if self.tag == "linear":
            if "re" not in p:
                raise ValidationError("params.re", "linear builtin needs a matrix under params.re")
            re = np.asarray(p["re"], dtype=float)
            im = np.asarray(p.get("im", np.zeros_like(re)), dtype=float)
            n = self.domain.dim
            if re.shape != (n, n) or im.shape != (n, n):
                raise ValidationError("params.re", f"matrix must be {n}x{n}")
            object.__setattr__(self, "_matrix", re + 1j * im)

    @property
    def param_dict(self) -> dict:
        return _thaw(self.params) if self.params else {}

    def _eval(self, pts: np.ndarray) -> np.ndarray:
        if self.tag == "cayley_i":
            x = pts[:, 0]
            den = 1 - x
            _check_denominator(den)
            return (1j * x * (1 + x) / den)[:, None]
        if self.tag == "spiral_ref":
            base = 1 - pts[:, 0]
            _check_denominator(base)
            expo = -(1 + np.exp(2j * self.theta))
            return pts * np.exp(expo * np.log(base))[:, None]
        if self.tag == "moebius_auto":
            a, rot = self._moebius
            x = pts[:, 0]
            den = 1 - np.conj(a) * x
            _check_denominator(den)
            return (rot * (x - a) / den)[:, None]
        return pts @ self._matrix.T

    def derivative_at_zero(self) -> np.ndarray:
        if self.tag == "linear":
            return self._matrix.copy()
        return super().derivative_at_zero()


def _check_denominator(den: np.ndarray) -> None:
    if np.any(np.abs(den) < SINGULAR_TOL):
        raise SingularPoint("denominator vanishes within 1e-14")


class FunctionMap(HoloMap):
    """Map defined by a vectorised callable ``fn(points (k, n)) -> (k, n)``."""

    def __init__(self, domain: BallDomain, fn: Callable[[np.ndarray], np.ndarray],
                 jac: Callable[[np.ndarray], np.ndarray] | None = None, name: str = "function"):
        self.domain = domain
        self._fn = fn
        self._jac = jac
        self.name = name

    def _eval(self, pts: np.ndarray) -> np.ndarray:
        return np.asarray(self._fn(pts), dtype=complex)

    def jacobian(self, x) -> np.ndarray:
        if self._jac is None:
            return super().jacobian(x)
        pts, single = _as_points(x, self.dim)
        jac = np.asarray(self._jac(pts), dtype=complex)
        return jac[0] if single else jac

    def __repr__(self):
        return f"FunctionMap({self.name!r}, dim={self.dim}, R={self.radius})"


def minus_identity(h: HoloMap) -> HoloMap:
    """The map x -> h(x) - x."""
    if isinstance(h, PolyMap):
        return h.minus_identity()
    eye = np.eye(h.dim)
    return FunctionMap(h.domain, lambda p: h._eval(p) - p,
                       jac=lambda p: h.jacobian(p) - eye, name="minus_identity")


def nonlinear_defect(h: HoloMap, samples: int = 64) -> float:
    """max ||h(x) - h(0) - h'(0)x|| over a few points at half the radius."""
    if isinstance(h, PolyMap):
        return h.nonlinear_size()
    rng = np.random.default_rng(0)
    z = rng.standard_normal((samples, h.dim)) + 1j * rng.standard_normal((samples, h.dim))
    z *= (h.radius / 2) / np.linalg.norm(z, axis=1, keepdims=True)
    resid = h(z) - h.value_at_zero() - z @ h.derivative_at_zero().T
    return float(np.max(np.linalg.norm(resid, axis=1)))


# -- JSON map documents -------------------------------------------------------


def _reject_constant(name: str):
    raise ParseError(f"non-finite literal {name} is not allowed")


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(path, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ValidationError(path, "must be finite")
    return float(value)


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(path, f"expected an integer, got {value!r}")
    return value


def load_map(doc: str | bytes | Mapping[str, Any]) -> HoloMap:
    """Build a validated map from a map-spec JSON document (text or parsed)."""
    if isinstance(doc, (str, bytes)):
        try:
            data = json.loads(doc, parse_constant=_reject_constant)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc)) from exc
    else:
        data = doc
    if not isinstance(data, Mapping):
        raise ValidationError("", "map document must be a JSON object")
    if "dim" not in data:
        raise ValidationError("dim", "missing")
    if "R" not in data:
        raise ValidationError("R", "missing")
    dim = _integer(data["dim"], "dim")
    domain = BallDomain(dim, _number(data["R"], "R"))
    has_poly, has_builtin = "poly" in data, "builtin" in data
    if has_poly == has_builtin:
        raise ValidationError("", "exactly one of 'poly' or 'builtin' is required")
    allowed = {"dim", "R", "poly"} if has_poly else {"dim", "R", "builtin", "theta", "params"}
    extra = sorted(set(data) - allowed)
    if extra:
        raise ValidationError(extra[0], "unexpected field")

    if has_poly:
        poly = data["poly"]
        if not isinstance(poly, list):
            raise ValidationError("poly", "expected a list of components")
        comps = []
        for k, comp in enumerate(poly):
            if not isinstance(comp, list):
                raise ValidationError(f"poly[{k}]", "expected a list of monomials")
            terms = []
            for m, mono in enumerate(comp):
                where = f"poly[{k}][{m}]"
                if not isinstance(mono, Mapping) or "idx" not in mono:
                    raise ValidationError(where, "monomial needs 'idx', 're', 'im'")
                idx = mono["idx"]
                if not isinstance(idx, list):
                    raise ValidationError(f"{where}.idx", "expected a list of integers")
                idx = tuple(_integer(e, f"{where}.idx[{i}]") for i, e in enumerate(idx))
                re = _number(mono.get("re", 0.0), f"{where}.re")
                im = _number(mono.get("im", 0.0), f"{where}.im")
                terms.append((idx, complex(re, im)))
            comps.append(tuple(terms))
        hmap: HoloMap = PolyMap(domain, tuple(comps))
    else:
        tag = data["builtin"]
        if not isinstance(tag, str):
            raise ValidationError("builtin", "expected a string")
        theta = _number(data.get("theta", 0.0), "theta")
        params = data.get("params", {})
        if not isinstance(params, Mapping):
            raise ValidationError("params", "expected an object")
        hmap = BuiltinMap(domain, tag, theta, _freeze(dict(params)))
    _check_finite_samples(hmap)
    return hmap


def load_map_file(path: str | Path) -> HoloMap:
    text = Path(path).read_text(encoding="utf-8")
    return load_map(text)


def _check_finite_samples(h: HoloMap) -> None:
    n = h.dim
    ang = np.arange(8) * (2 * np.pi / 8)
    pts = np.zeros((8 * n + 1, n), dtype=complex)
    for j in range(n):
        pts[1 + 8 * j:1 + 8 * (j + 1), j] = 0.5 * h.radius * np.exp(1j * (ang + 0.1))
    vals = h(pts)
    if not np.all(np.isfinite(vals)):
        raise ValidationError("", "map evaluates to a non-finite value inside the ball")


def serialize_map(h: HoloMap) -> dict:
    """Inverse of :func:`load_map` (bit-exact for polynomial coefficients)."""
    head = {"dim": h.dim, "R": h.radius}
    if isinstance(h, PolyMap):
        head["poly"] = [[{"idx": list(idx), "re": c.real, "im": c.imag} for idx, c in comp]
                        for comp in h.components]
        return head
    if isinstance(h, BuiltinMap):
        head["builtin"] = h.tag
        head["theta"] = h.theta
        if h.params:
            head["params"] = h.param_dict
        return head
    raise TypeError(f"cannot serialize {type(h).__name__}")


def dumps_map(h: HoloMap) -> str:
    return json.dumps(serialize_map(h), sort_keys=True)


def identity_map(dim: int = 1, radius: float = 1.0) -> PolyMap:
    return PolyMap.affine(np.eye(dim), radius=radius)


def random_polymap(rng: np.random.Generator, dim: int, degree: int, terms: int = 3,
                   scale: float = 1.0, radius: float = 1.0, constant: bool = True,
                   linear: bool = True) -> PolyMap:
    """Seeded random polynomial map; coefficients uniform in the complex square."""
    comps = []
    for _ in range(dim):
        comp = []
        if constant:
            comp.append(((0,) * dim, complex(*rng.uniform(-1, 1, 2)) * scale))
        if linear:
            for j in range(dim):
                idx = [0] * dim
                idx[j] = 1
                comp.append((tuple(idx), complex(*rng.uniform(-1, 1, 2)) * scale))
        for _ in range(terms):
            d = int(rng.integers(2, degree + 1)) if degree >= 2 else 0
            if d < 2:
                break
            idx = np.zeros(dim, dtype=int)
            for j in rng.integers(0, dim, d):
                idx[j] += 1
            comp.append((tuple(int(e) for e in idx), complex(*rng.uniform(-1, 1, 2)) * scale))
        comps.append(tuple(comp))
    return PolyMap(BallDomain(dim, radius), tuple(comps))
