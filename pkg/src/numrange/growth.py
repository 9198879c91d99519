"""Growth estimates for Re <h(x), x> on spheres, the two-sided bounds, and rigidity."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError, InfiniteInput, PreconditionError, ValidationError
from .maps import HoloMap, PolyMap, nonlinear_defect, pairing
from .oracle import (DEFAULT_SEED, deriv_bounds, estimate_mR, estimate_MR, estimate_NR,
                     sphere_extremum, sphere_pairing_multi)
from .scalar import km_factor

DOMINATION_TOL = 1e-6
RIGIDITY_TOL = 1e-9


@dataclass(frozen=True)
class BoundInputs:
    """Oracle (or hand-supplied) quantities feeding the closed-form bounds.

    ``L``/``l`` are the extremes of Re <h'(0)u, u> at angle 0; ``L_theta``/``l_theta``
    the same at ``theta``.  ``N_R`` may be ``math.inf``.
    """

    R: float
    N_R: float
    N_R_theta: float
    theta: float
    h0_norm: float
    L: float
    l_theta: float
    L_theta: float
    m_R_theta: float = -math.inf
    M_R_theta: float = math.inf
    l: float | None = None
    h0_vec: tuple = ()

    def __post_init__(self):
        if not (math.isfinite(self.R) and self.R > 0):
            raise ValidationError("R", "must be positive and finite")
        if self.l_theta > self.L_theta + 1e-9 * max(1.0, abs(self.L_theta)):
            raise ValidationError("l_theta", "must not exceed L_theta")
        if math.isfinite(self.N_R) and self.L > self.N_R / self.R ** 2 + 1e-6 * max(1.0, abs(self.L)):
            raise ValidationError("L", "must not exceed N_R / R^2")
        if self.l is None:
            object.__setattr__(self, "l", self.L)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["h0_vec"] = [[c.real, c.imag] for c in self.h0_vec]
        return d


def bound_inputs(h: HoloMap, theta: float = 0.0, samples: int | None = None,
                 seed: int = DEFAULT_SEED) -> BoundInputs:
    """Collect every input of the bounds from the brute-force oracle."""
    d0 = deriv_bounds(h, 0.0)
    dt = deriv_bounds(h, theta)
    h0 = h.value_at_zero()
    return BoundInputs(
        R=h.radius,
        N_R=estimate_NR(h, 0.0, samples, seed),
        N_R_theta=estimate_NR(h, theta, samples, seed),
        theta=theta,
        h0_norm=float(np.linalg.norm(h0)),
        L=d0.L_theta,
        l_theta=dt.l_theta,
        L_theta=dt.L_theta,
        m_R_theta=estimate_mR(h, theta, samples, seed),
        M_R_theta=estimate_MR(h, theta, samples, seed),
        l=d0.l_theta,
        h0_vec=tuple(complex(c) for c in h0),
    )


def _check_r(r: float, R: float, closed: bool = False) -> None:
    if not (0 < r < R or (closed and r == R)):
        raise DomainError(f"radius {r} outside (0, {R}{']' if closed else ')'}")


def bound_F(inputs: BoundInputs, r: float) -> float:
    """F(r) = r||h(0)||(1 - r^2/R^2) + r^2/(R+r) [(R-r)L + 2r N_R/R^2].

    r = R is accepted and returns N_R, the limit of F at the boundary.
    """
    R = inputs.R
    _check_r(r, R, closed=True)
    if not math.isfinite(inputs.N_R):
        raise InfiniteInput("N_R is unbounded; use bound_F1 with theta != 0")
    return (r * inputs.h0_norm * (1 - r * r / (R * R))
            + r * r / (R + r) * ((R - r) * inputs.L + 2 * r * inputs.N_R / (R * R)))


def f1_head(inputs: BoundInputs, r: float, form: str = "double") -> float:
    """sup over ||x|| = r of Re(<h0, x> - (r^2/R^2) w conj<h0, x>) in closed form.

    <h0, x> sweeps the disc (circle when n = 1) of radius r||h0||, so the sup is
    r||h0|| |1 - (r^2/R^2) w|, with w = e^{2i theta} for the ``double`` form and
    e^{i theta} for the ``single`` one.
    """
    k = {"double": 2.0, "single": 1.0}[form]
    c = r * r / inputs.R ** 2
    return r * inputs.h0_norm * abs(1 - c * complex(math.cos(k * inputs.theta), math.sin(k * inputs.theta)))


def f1_head_sampled(h0_vec, R: float, r: float, theta: float, form: str = "double",
                    samples: int | None = None, seed: int = DEFAULT_SEED) -> float:
    """The same sup as :func:`f1_head`, by the sphere sampler on the constant field h0."""
    h0 = np.asarray(h0_vec, dtype=complex)
    w = np.exp(-1j * (2.0 if form == "double" else 1.0) * theta)
    c = r * r / R ** 2

    def obj(pts):
        a = pairing(np.broadcast_to(h0, pts.shape), pts)
        return np.real(a - c * w * np.conj(a))

    return sphere_extremum(obj, h0.size, r, "sup", samples, seed).value


def bound_F1(inputs: BoundInputs, r: float, form: str = "double") -> float:
    """F1(r, theta) = head + r^2 [L + L(theta, r)(N_R(theta)/R^2 - l(theta))].

    ``form`` selects the f(0) term (see :func:`f1_head`).  ``double`` is the
    default: it is what the Kresin-Maz'ya argument produces.
    """
    R = inputs.R
    _check_r(r, R)
    if not math.isfinite(inputs.N_R_theta):
        raise InfiniteInput(f"N_R(theta={inputs.theta}) is unbounded")
    kmf = km_factor(inputs.theta, r, R)
    return f1_head(inputs, r, form) + r * r * (inputs.L + kmf * (inputs.N_R_theta / R ** 2 - inputs.l_theta))


def bound_F1_loose(inputs: BoundInputs, r: float) -> float:
    """F1 with the head replaced by the majorant r||h0||(1 + r^2/R^2)."""
    R = inputs.R
    _check_r(r, R)
    if not math.isfinite(inputs.N_R_theta):
        raise InfiniteInput(f"N_R(theta={inputs.theta}) is unbounded")
    kmf = km_factor(inputs.theta, r, R)
    head = r * inputs.h0_norm * (1 + r * r / R ** 2)
    return head + r * r * (inputs.L + kmf * (inputs.N_R_theta / R ** 2 - inputs.l_theta))


def two_sided_46a(inputs: BoundInputs, r: float) -> tuple[float, float]:
    """(lower, upper) bounds for Re <h(x) - h(0), x> on ||x|| = r."""
    R = inputs.R
    _check_r(r, R)
    kmf = km_factor(inputs.theta, r, R)
    lower = r * r * (inputs.l + kmf * (inputs.m_R_theta / R ** 2 - inputs.L_theta))
    upper = r * r * (kmf * (inputs.M_R_theta / R ** 2 - inputs.l_theta) + inputs.L)
    return lower, upper


def remark_lem_bound(inputs: BoundInputs, x_pairing_h10x: float | complex, r: float) -> float:
    """Re[<h'(0)x, x>(1 - L(0, r))] + (r^2/R^2) L(0, r) N_R, for h(0) = 0 and ||x|| = r."""
    if inputs.h0_norm > 1e-12:
        raise PreconditionError("remark_lem_bound needs h(0) = 0")
    if not math.isfinite(inputs.N_R):
        raise InfiniteInput("N_R is unbounded")
    R = inputs.R
    _check_r(r, R)
    kmf = km_factor(0.0, r, R)
    return float(np.real(x_pairing_h10x * (1 - kmf))) + r * r / R ** 2 * kmf * inputs.N_R


def corollary_bounds(inputs: BoundInputs, V_R_abs: float, r: float) -> tuple[float, float]:
    """(numerical-radius bound, norm bound) for h(0) = 0 as stated.

    The first, r^2/(R+r)[(R-r)L + 2r N_R/R^2], controls Re <h(x), x> but not
    |<h(x), x>|: for h(x) = ix it is 0 while |<h(x), x>| = r^2.
    """
    if inputs.h0_norm > 1e-12:
        raise PreconditionError("corollary_bounds needs h(0) = 0")
    if not math.isfinite(inputs.N_R):
        raise InfiniteInput("N_R is unbounded")
    R = inputs.R
    _check_r(r, R)
    vr = r * r / (R + r) * ((R - r) * inputs.L + 2 * r * inputs.N_R / R ** 2)
    wr = 2 * R * R / (R - r) ** 2 * V_R_abs
    return vr, wr


@dataclass(frozen=True)
class ProfileRow:
    r: float
    F_r: float | None
    F1_r_theta: float | None
    lower_two_sided: float
    upper_two_sided: float
    remark_lem_bound: float | None
    Vr_bound: float | None
    Wr_bound: float | None


def bound_profile(inputs: BoundInputs, radii, V_R_abs: float | None = None) -> list[ProfileRow]:
    """Every bound over a radius grid; entries that do not apply are ``None``."""
    rows = []
    for r in radii:
        r = float(r)
        F = bound_F(inputs, r) if math.isfinite(inputs.N_R) else None
        F1 = bound_F1(inputs, r) if math.isfinite(inputs.N_R_theta) else None
        lo, up = two_sided_46a(inputs, r)
        lem = vr = wr = None
        if inputs.h0_norm <= 1e-12 and math.isfinite(inputs.N_R):
            kmf = km_factor(0.0, r, inputs.R)
            worst = inputs.L if kmf <= 1 else inputs.l
            lem = remark_lem_bound(inputs, r * r * worst, r)
            if V_R_abs is not None:
                vr, wr = corollary_bounds(inputs, V_R_abs, r)
        rows.append(ProfileRow(r, F, F1, lo, up, lem, vr, wr))
    return rows


@dataclass(frozen=True)
class RigidityVerdict:
    rigid: bool
    theta: float
    upper_gap: float
    lower_gap: float
    nonlinear_size: float
    consistent: bool

    @property
    def label(self) -> str:
        return "affine-rigid" if self.rigid else "non-rigid"


def detect_rigidity(h: HoloMap, theta: float = 0.0, tol: float = RIGIDITY_TOL,
                    samples: int | None = None, seed: int = DEFAULT_SEED) -> RigidityVerdict:
    """Compare M_R(theta) with R^2 l(theta) and m_R(theta) with R^2 L(theta).

    Equality in either forces h to be affine; when it is detected the size of
    the nonlinear part is checked against ``tol`` as a consistency test.
    """
    R2 = h.radius ** 2
    db = deriv_bounds(h, theta)
    M = estimate_MR(h, theta, samples, seed)
    m = estimate_mR(h, theta, samples, seed)
    up = M - R2 * db.l_theta
    lo = R2 * db.L_theta - m
    rigid = abs(up) <= tol or abs(lo) <= tol
    nl = nonlinear_defect(h)
    consistent = (nl <= tol) if rigid else True
    return RigidityVerdict(rigid, theta, float(up), float(lo), float(nl), consistent)


def oracle_N_r(h: HoloMap, radii, theta: float = 0.0, samples: int | None = None,
               seed: int = DEFAULT_SEED) -> np.ndarray:
    """Sphere sups of Re <e^{i theta} h(x), x> for several radii at once."""
    return np.array([res.value for res in sphere_pairing_multi(h, list(radii), theta, False, "sup",
                                                                 samples, seed)])


def is_affine(h: HoloMap) -> bool:
    return isinstance(h, PolyMap) and h.degree <= 1
