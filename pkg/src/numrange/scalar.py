"""One-variable inequality kernel: Hadamard-Borel-Caratheodory, Kresin-Maz'ya and their lifts.

Every vector bound in :mod:`numrange.growth` reduces to one of these applied to
f(zeta) = <h(zeta u), u> on a disc of radius R.  Each inequality is exposed as a
right-hand side (``lifted_bound_*``) or as a grid check returning the worst
violation (``check_*``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, ValidationError
from .maps import HoloMap, cauchy_jacobian, pairing
from .oracle import golden_max

MAX_DEGREE = 64
VIOLATION_TOL = 1e-9
CIRCLE_SAMPLES = 4096
BUILTIN_SHRINK = 0.99


# -- scalar functions ----------------------------------------------------------


@dataclass(frozen=True)
class ScalarPoly:
    """f(zeta) = sum_k coeffs[k] zeta^k on the disc |zeta| < R."""

    coeffs: tuple
    R: float = 1.0

    def __post_init__(self):
        c = tuple(complex(a) for a in self.coeffs) or (0j,)
        if len(c) - 1 > MAX_DEGREE:
            raise ValidationError("coeffs", f"degree {len(c) - 1} exceeds {MAX_DEGREE}")
        if not all(math.isfinite(a.real) and math.isfinite(a.imag) for a in c):
            raise ValidationError("coeffs", "coefficients must be finite")
        if not (math.isfinite(self.R) and self.R > 0):
            raise ValidationError("R", "must be positive and finite")
        object.__setattr__(self, "coeffs", c)

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), self.coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def value_at_zero(self) -> complex:
        return self.coeffs[0]

    def derivative_at_zero(self) -> complex:
        return self.coeffs[1] if len(self.coeffs) > 1 else 0j

    def gfun(self) -> ScalarPoly:
        """g(zeta) = (f(zeta) - f(0))/zeta + conj(f(0)) zeta / R^2, as a polynomial."""
        c = list(self.coeffs[1:]) or [0j]
        if len(c) < 2:
            c.append(0j)
        c[1] += np.conj(self.coeffs[0]) / self.R ** 2
        return ScalarPoly(tuple(c), self.R)

    def quotient(self, theta: float = 0.0) -> ScalarPoly:
        """e^{i theta}(f(zeta) - f(0))/zeta."""
        c = [np.exp(1j * theta) * a for a in self.coeffs[1:]] or [0j]
        return ScalarPoly(tuple(c), self.R)


class ScalarFn:
    """A vectorised holomorphic callable on |zeta| < R.

    Used for maps restricted to a complex line.  Sups are taken on the slightly
    smaller disc of radius ``R`` given here, so analytic maps with boundary
    singularities stay finite.
    """

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], R: float, name: str = "scalar"):
        self._fn = fn
        self.R = float(R)
        self.name = name

    def __call__(self, z):
        return np.asarray(self._fn(np.asarray(z, dtype=complex)), dtype=complex)

    def value_at_zero(self) -> complex:
        return complex(self(np.zeros(1))[0])

    def derivative_at_zero(self) -> complex:
        def vec(p):
            return self(p[:, 0])[:, None]
        jac = cauchy_jacobian(vec, np.zeros((1, 1), dtype=complex), np.array([self.R / 2]), 256)
        return complex(jac[0, 0, 0])

    def gfun(self) -> ScalarFn:
        f0 = self.value_at_zero()
        d0 = self.derivative_at_zero()
        R = self.R

        def g(z):
            z = np.asarray(z, dtype=complex)
            safe = np.where(z == 0, 1.0, z)
            out = (self(z) - f0) / safe + np.conj(f0) * z / R ** 2
            return np.where(z == 0, d0, out)

        return ScalarFn(g, R, f"gfun({self.name})")

    def quotient(self, theta: float = 0.0) -> ScalarFn:
        f0 = self.value_at_zero()
        d0 = self.derivative_at_zero()
        rot = np.exp(1j * theta)

        def g(z):
            z = np.asarray(z, dtype=complex)
            safe = np.where(z == 0, 1.0, z)
            return rot * np.where(z == 0, d0, (self(z) - f0) / safe)

        return ScalarFn(g, self.R, f"quotient({self.name})")


Scalar = ScalarPoly | ScalarFn


def restrict(h: HoloMap, u, shrink: float = BUILTIN_SHRINK) -> ScalarFn:
    """f(zeta) = <h(zeta u), u> for a unit vector u, on the disc of radius shrink*R."""
    u = np.asarray(u, dtype=complex)
    u = u / np.linalg.norm(u)

    def f(z):
        z = np.atleast_1d(z)
        return pairing(h(z[:, None] * u[None, :]), u)

    return ScalarFn(f, shrink * h.radius, "restrict")


def random_scalar_poly(rng: np.random.Generator, max_degree: int = 8, R: float = 1.0) -> ScalarPoly:
    """Degree uniform in 1..max_degree, coefficients uniform in the complex unit square."""
    d = int(rng.integers(1, max_degree + 1))
    c = rng.uniform(-1, 1, d + 1) + 1j * rng.uniform(-1, 1, d + 1)
    return ScalarPoly(tuple(c), R)


# -- extremes over circles and discs ---------------------------------------------


def circle_extremum(q: Callable[[np.ndarray], np.ndarray], radius: float, mode: str = "sup",
                    samples: int = CIRCLE_SAMPLES, seeds: int = 4) -> float:
    """sup (inf) of a real function q(zeta) over |zeta| = radius."""
    sign = 1.0 if mode == "sup" else -1.0
    t = 2 * np.pi * np.arange(samples) / samples
    vals = sign * q(radius * np.exp(1j * t))
    top = np.argpartition(-vals, seeds - 1)[:seeds]
    w = 2 * np.pi / samples

    def along(s):
        return sign * q(radius * np.exp(1j * s))

    _, best, _ = golden_max(along, t[top] - w, t[top] + w, 1e-12, 200)
    return sign * float(max(vals.max(), best.max()))


def disk_extremum(q: Callable[[np.ndarray], np.ndarray], radius: float, mode: str = "sup",
                  n_radii: int = 64, n_angles: int = 1024, seeds: int = 4) -> float:
    """sup (inf) of a real, not necessarily harmonic, q over the closed disc |zeta| <= radius."""
    sign = 1.0 if mode == "sup" else -1.0
    k = np.arange(n_radii)
    rad = np.concatenate([[0.0], radius * (1 - np.cos(np.pi * (k + 0.5) / (2 * n_radii))), [radius]])
    ang = 2 * np.pi * np.arange(n_angles) / n_angles
    z = rad[:, None] * np.exp(1j * ang)[None, :]
    vals = sign * q(z.ravel())
    top = np.argpartition(-vals, seeds - 1)[:seeds]
    rho = rad[top // n_angles].astype(float)
    phi = ang[top % n_angles].astype(float)
    cur = vals[top]
    w_phi = 2 * np.pi / n_angles
    w_rho = radius / n_radii

    def at(rr, pp):
        return sign * q(rr * np.exp(1j * pp))

    for sweep in range(30):
        before = cur.copy()
        p_new, f_new, _ = golden_max(lambda s: at(rho, s), phi - w_phi, phi + w_phi, 1e-9, 200)
        better = f_new > cur
        phi, cur = np.where(better, p_new, phi), np.where(better, f_new, cur)
        lo, hi = np.maximum(rho - w_rho, 0.0), np.minimum(rho + w_rho, radius)
        r_new, f_new, _ = golden_max(lambda s: at(s, phi), lo, hi, 1e-10, 200)
        better = f_new > cur
        rho, cur = np.where(better, r_new, rho), np.where(better, f_new, cur)
        for edge in (0.0, radius):
            f_edge = at(np.full_like(rho, edge), phi)
            better = f_edge > cur
            rho, cur = np.where(better, edge, rho), np.where(better, f_edge, cur)
        w_phi, w_rho = max(w_phi / 2, 1e-9), max(w_rho / 2, 1e-10)
        if np.max(cur - before) <= 1e-15 * (1 + np.max(np.abs(cur))) and sweep >= 1:
            break
    return sign * float(max(vals.max(), cur.max()))


def sup_re(g: Scalar, mode: str = "sup") -> float:
    """sup (inf) of the harmonic Re g over |xi| < R, read off the circle |xi| = R."""
    return circle_extremum(lambda z: np.real(g(z)), g.R, mode)


def sup_re_conj_product(f: Scalar, theta: float = 0.0, subtract_f0: bool = False) -> float:
    """sup over |xi| < R of Re(e^{i theta}(f(xi) - [f(0)]) conj(xi)); never below 0 (xi = 0)."""
    f0 = f.value_at_zero() if subtract_f0 else 0.0
    rot = np.exp(1j * theta)
    return max(0.0, disk_extremum(lambda z: np.real(rot * (f(z) - f0) * np.conj(z)), f.R))


# -- the inequalities -------------------------------------------------------------------


def km_factor(theta: float, r: float, R: float) -> float:
    """The Kresin-Maz'ya factor 2r(R - r cos theta)/(R^2 - r^2)."""
    if not 0 <= r < R:
        raise DomainError(f"km_factor needs 0 <= r < R, got r={r}, R={R}")
    return 2 * r * (R - r * math.cos(theta)) / ((R - r) * (R + r))


@dataclass
class GridPlan:
    """Chebyshev-spaced radii in (0, R) times uniform angles."""

    n_radii: int = 64
    n_angles: int = 64

    def radii(self, R: float) -> np.ndarray:
        k = np.arange(self.n_radii)
        return (R / 2) * (1 - np.cos(np.pi * (2 * k + 1) / (2 * self.n_radii)))

    def points(self, R: float) -> tuple[np.ndarray, np.ndarray]:
        r = self.radii(R)
        t = 2 * np.pi * np.arange(self.n_angles) / self.n_angles
        zeta = (r[:, None] * np.exp(1j * t)[None, :]).ravel()
        return zeta, np.repeat(r, self.n_angles)


@dataclass
class Violation:
    """Worst excess of left over right side of an inequality on a grid."""

    name: str
    max_violation: float
    worst_zeta: complex | None
    n_points: int
    tol: float = VIOLATION_TOL

    @property
    def ok(self) -> bool:
        return self.max_violation <= self.tol


def _violation(name: str, excess: np.ndarray, zeta: np.ndarray, tol: float) -> Violation:
    i = int(np.argmax(excess))
    return Violation(name, float(excess[i]), complex(zeta[i]), int(excess.size), tol)


def _kmf(theta: float, r: np.ndarray, R: float) -> np.ndarray:
    return 2 * r * (R - r * np.cos(theta)) / (R * R - r * r)


def check_hbc(g: Scalar, plan: GridPlan | None = None, tol: float = VIOLATION_TOL) -> Violation:
    """Re g(zeta) <= ((R-r)/(R+r)) Re g(0) + (2r/(R+r)) sup Re g on the grid."""
    plan = plan or GridPlan()
    R = g.R
    zeta, r = plan.points(R)
    s = sup_re(g)
    rhs = (R - r) / (R + r) * np.real(g.value_at_zero()) + 2 * r / (R + r) * s
    return _violation("hbc", np.real(g(zeta)) - rhs, zeta, tol)


def check_km(g: Scalar, theta: float, side: str = "upper", plan: GridPlan | None = None,
             tol: float = VIOLATION_TOL, extreme: float | None = None) -> Violation:
    """Kresin-Maz'ya: upper uses sup Re g, lower uses inf Re g."""
    if side not in ("upper", "lower"):
        raise ValueError("side must be 'upper' or 'lower'")
    plan = plan or GridPlan()
    R = g.R
    zeta, r = plan.points(R)
    g0 = g.value_at_zero()
    lhs = np.real(np.exp(1j * theta) * (g(zeta) - g0))
    ext = sup_re(g, "sup" if side == "upper" else "inf") if extreme is None else extreme
    rhs = _kmf(theta, r, R) * (ext - np.real(g0))
    excess = lhs - rhs if side == "upper" else rhs - lhs
    return _violation(f"km_{side}", excess, zeta, tol)


def _check_zeta(zeta, r: float, R: float) -> np.ndarray:
    if not 0 < r < R:
        raise DomainError(f"need 0 < r < R, got r={r}, R={R}")
    z = np.asarray(zeta, dtype=complex)
    if np.any(np.abs(np.abs(z) - r) > 1e-9 * max(1.0, r)):
        raise DomainError("zeta must lie on the circle |zeta| = r")
    return z


def lifted_bound_ref1(f: Scalar, R: float, r: float, zeta, sup_value: float | None = None):
    """Right side bounding Re(conj(zeta) f(zeta)) for |zeta| = r.

    (1 - r^2/R^2) Re(conj(zeta) f(0))
      + r^2 [Re f'(0) (R-r)/(R+r) + 2r/(R^2 (R+r)) sup Re(conj(xi) f(xi))]
    """
    z = _check_zeta(zeta, r, R)
    s = sup_re_conj_product(f) if sup_value is None else sup_value
    f0, d0 = f.value_at_zero(), f.derivative_at_zero()
    return ((1 - r * r / (R * R)) * np.real(np.conj(z) * f0)
            + r * r * (np.real(d0) * (R - r) / (R + r) + 2 * r / (R * R * (R + r)) * s))


def lifted_bound_mazyac(f: Scalar, R: float, r: float, theta: float, zeta,
                        sup_value: float | None = None):
    """Right side bounding Re(e^{i theta} f(zeta) conj(zeta)) for |zeta| = r.

    Derived by applying Kresin-Maz'ya to g(zeta) = (f - f(0))/zeta + conj(f(0)) zeta/R^2
    and multiplying through by |zeta|^2.  The f(0) term carries conj(zeta) and
    zeta factors:  Re e^{i theta}(f(0) conj(zeta) - (r^2/R^2) conj(f(0)) zeta).
    """
    z = _check_zeta(zeta, r, R)
    s = sup_re_conj_product(f) if sup_value is None else sup_value
    f0, d0 = f.value_at_zero(), f.derivative_at_zero()
    kmf = km_factor(theta, r, R)
    rot = np.exp(1j * theta)
    head = np.real(rot * (f0 * np.conj(z) - (r * r / (R * R)) * np.conj(f0) * z))
    return head + r * r * (np.real(d0 * (rot - kmf)) + kmf * s / (R * R))


def lifted_bound_b02(f: Scalar, R: float, r: float, theta: float, zeta,
                     sup_value: float | None = None):
    """Right side bounding Re((f(zeta) - f(0)) conj(zeta)) for |zeta| = r.

    r^2 ( L(theta, r)/R^2 sup Re(e^{i theta}(f(xi) - f(0)) conj(xi))
          + Re[(e^{-i theta} - L(theta, r)) e^{i theta} f'(0)] )
    """
    _check_zeta(zeta, r, R)
    s = sup_re_conj_product(f, theta, subtract_f0=True) if sup_value is None else sup_value
    d0 = f.derivative_at_zero()
    kmf = km_factor(theta, r, R)
    value = r * r * (kmf * s / (R * R) + np.real((np.exp(-1j * theta) - kmf) * np.exp(1j * theta) * d0))
    return np.broadcast_to(value, np.shape(zeta)).copy() if np.ndim(zeta) else float(value)


def boundprime(f: Scalar) -> tuple[float, float]:
    """(Re f'(0), sup_{|xi|<R} Re(f(xi) conj(xi)) / R^2); the first never exceeds the second."""
    return float(np.real(f.derivative_at_zero())), sup_re_conj_product(f) / f.R ** 2


def _check_lifted(name, f: Scalar, lhs_fn, rhs_fn, plan: GridPlan, tol: float) -> Violation:
    R = f.R
    zeta, rr = plan.points(R)
    excess = np.empty(zeta.size)
    for r in np.unique(rr):
        sel = rr == r
        z = zeta[sel]
        z = r * z / np.abs(z)
        excess[sel] = lhs_fn(z) - rhs_fn(r, z)
    return _violation(name, excess, zeta, tol)


def check_ref1(f: Scalar, plan: GridPlan | None = None, tol: float = VIOLATION_TOL,
               sup_value: float | None = None) -> Violation:
    s = sup_re_conj_product(f) if sup_value is None else sup_value
    return _check_lifted("ref1", f, lambda z: np.real(np.conj(z) * f(z)),
                         lambda r, z: lifted_bound_ref1(f, f.R, r, z, s), plan or GridPlan(), tol)


def check_mazyac(f: Scalar, theta: float, plan: GridPlan | None = None,
                 tol: float = VIOLATION_TOL, sup_value: float | None = None) -> Violation:
    s = sup_re_conj_product(f) if sup_value is None else sup_value
    rot = np.exp(1j * theta)
    return _check_lifted("mazyac", f, lambda z: np.real(rot * f(z) * np.conj(z)),
                         lambda r, z: lifted_bound_mazyac(f, f.R, r, theta, z, s), plan or GridPlan(), tol)


def check_b02(f: Scalar, theta: float, plan: GridPlan | None = None,
              tol: float = VIOLATION_TOL) -> Violation:
    s = sup_re_conj_product(f, theta, subtract_f0=True)
    f0 = f.value_at_zero()
    return _check_lifted("b02", f, lambda z: np.real((f(z) - f0) * np.conj(z)),
                         lambda r, z: lifted_bound_b02(f, f.R, r, theta, z, s), plan or GridPlan(), tol)


def check_boundprime(f: Scalar, tol: float = VIOLATION_TOL, sup_value: float | None = None) -> Violation:
    lhs = float(np.real(f.derivative_at_zero()))
    rhs = (sup_re_conj_product(f) if sup_value is None else sup_value) / f.R ** 2
    return Violation("boundprime", lhs - rhs, None, 1, tol)


@dataclass(frozen=True)
class LittlewoodReport:
    """Lower bounds for M_r and the two-sided comparison bounds."""

    p: float
    lower: float
    sandwich_lower: float
    sandwich_upper: float
    sandwich_upper_unscaled: float


def littlewood_lower(L: float, M_R: float, R: float, r: float) -> LittlewoodReport:
    """r^2 p(r) with p(r) = ((R+r)/(R-r)) L - (2r/(R-r)) M_R/R^2, plus the sandwich on M_r.

    ``sandwich_upper`` is r^2[((R-r)/(R+r)) L + (2r/(R+r)) M_R/R^2], the form that
    follows from Hadamard-Borel-Caratheodory applied to g.  The unscaled
    ``sandwich_upper_unscaled`` = ((R-r)/(R+r)) L + (2r/(R+r)) M_R is kept for comparison
    only: it fails for h(x) = -x.
    """
    if not 0 < r < R:
        raise DomainError(f"need 0 < r < R, got r={r}, R={R}")
    p = (R + r) / (R - r) * L - 2 * r / (R - r) * M_R / (R * R)
    upper = r * r * ((R - r) / (R + r) * L + 2 * r / (R + r) * M_R / (R * R))
    unscaled = (R - r) / (R + r) * L + 2 * r / (R + r) * M_R
    return LittlewoodReport(p, r * r * p, r * r * L, upper, unscaled)


# -- corpus suite ----------------------------------------------------------------------

SUITE_THETAS = (0.0, math.pi / 6, math.pi / 3, math.pi / 2, 2 * math.pi / 3, math.pi, -math.pi / 4)


@dataclass
class ScalarSuiteResult:
    trials: int
    worst: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.worst.values())

    def record(self, v: Violation) -> None:
        cur = self.worst.get(v.name)
        if cur is None or v.max_violation > cur.max_violation:
            self.worst[v.name] = v


def run_scalar_suite(seed: int = 42, trials: int = 200, max_degree: int = 8,
                     plan: GridPlan | None = None, thetas=SUITE_THETAS,
                     tol: float = VIOLATION_TOL) -> ScalarSuiteResult:
    """All scalar inequalities on a seeded corpus of random polynomials."""
    rng = np.random.default_rng(seed)
    plan = plan or GridPlan()
    out = ScalarSuiteResult(trials)
    for _ in range(trials):
        f = random_scalar_poly(rng, max_degree)
        theta = float(rng.uniform(-math.pi, math.pi))
        g = f.gfun()
        s = sup_re_conj_product(f)
        out.record(check_hbc(f, plan, tol))
        out.record(check_hbc(g, plan, tol))
        out.record(check_ref1(f, plan, tol, s))
        out.record(check_boundprime(f, tol, s))
        hi, lo = sup_re(f), sup_re(f, "inf")
        for th in (*thetas, theta):
            out.record(check_km(f, th, "upper", plan, tol, hi))
            out.record(check_km(f, th, "lower", plan, tol, lo))
        for th in (0.0, math.pi / 4, theta):
            out.record(check_mazyac(f, th, plan, tol, s))
            out.record(check_b02(f, th, plan, tol))
    return out
