"""Radii of starlikeness and spirallikeness, and a numerical check of the generator condition."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, PreconditionError
from .maps import BallDomain, FunctionMap, HoloMap, pairing
from .oracle import DEFAULT_SEED, LADDER_RUNGS, sphere_extremum_multi

MARGIN_TOL = 1e-6


def _check_theta(theta: float) -> None:
    if not abs(theta) < math.pi / 2:
        raise DomainError(f"need |theta| < pi/2, got {theta}")


def starlike_radius(theta: float) -> float:
    """1 / (sqrt(2) cos(|theta| - pi/4)), at most 1 on |theta| < pi/2."""
    _check_theta(theta)
    # sqrt(2) cos(t - pi/4) = cos t + sin t, which keeps theta = 0 exact
    t = abs(theta)
    return 1.0 / (math.cos(t) + math.sin(t))


def starlike_phi(r: float, theta: float) -> float:
    """1 - 2r(1 - r cos theta) cos theta / (1 - r^2); nonnegative exactly up to the starlike radius."""
    return 1 - 2 * r * (1 - r * math.cos(theta)) * math.cos(theta) / (1 - r * r)


def spiral_phi(r: float, theta: float) -> float:
    """2r(1 - r cos theta) - cos theta (1 - r^2)."""
    c = math.cos(theta)
    return 2 * r * (1 - r * c) - c * (1 - r * r)


def spiral_radius(theta: float) -> float:
    """(1 - |sin theta|)/cos theta."""
    _check_theta(theta)
    return (1 - abs(math.sin(theta))) / math.cos(theta)


def spiral_radius_bisect(theta: float) -> float:
    """Zero of spiral_phi in (0, 1], found by bisection."""
    _check_theta(theta)
    return brentq(spiral_phi, 0.0, 1.0, args=(theta,), xtol=1e-15, rtol=4 * np.finfo(float).eps)


def spiral_ref_generator(theta: float, dim: int = 1) -> FunctionMap:
    """Closed form f'(x)^{-1} f(x) = x(1 - x_1)/(1 + e^{2i theta} x_1) for the reference map."""
    w = cmath.exp(2j * theta)

    def fn(pts):
        x1 = pts[:, :1]
        return pts * (1 - x1) / (1 + w * x1)

    return FunctionMap(BallDomain(dim, 1.0), fn, name=f"spiral_ref_generator({theta})")


def extract_generator(f: HoloMap, mu: complex = 1.0, tol: float = 1e-8) -> FunctionMap:
    """h(x) = mu f'(x)^{-1} f(x), so that mu f = f' h; checks h(0) = 0 and h'(0) = mu I."""
    mu = complex(mu)
    if np.linalg.norm(f.value_at_zero()) > tol:
        raise PreconditionError("generator extraction needs f(0) = 0")
    a0 = f.derivative_at_zero()
    if abs(np.linalg.det(a0)) < 1e-12:
        raise PreconditionError("f'(0) is not invertible")
    n = f.dim

    def fn(pts):
        jac = f.jacobian(pts)
        vals = f(pts)
        return mu * np.linalg.solve(jac, vals[..., None])[..., 0]

    h = FunctionMap(f.domain, fn, name=f"generator(mu={mu})")
    if np.linalg.norm(h.value_at_zero()) > tol:
        raise PreconditionError("extracted generator has h(0) != 0")
    if np.max(np.abs(h.derivative_at_zero() - mu * np.eye(n))) > tol:
        raise PreconditionError("extracted generator has h'(0) != mu I")
    return h


@dataclass(frozen=True)
class SpiralVerdict:
    ok: bool
    mu: complex
    r: float
    worst_margin: float
    worst_radius: float


def verify_spirallike_on_ball(f: HoloMap, mu: complex, r: float, samples: int | None = None,
                              seed: int = DEFAULT_SEED, rungs: int = LADDER_RUNGS,
                              generator: HoloMap | None = None,
                              margin: float = MARGIN_TOL) -> SpiralVerdict:
    """Check inf Re <h(x), x> >= -margin on spheres r(1 - 2^-k), with h = (mu/|mu|) f'^{-1} f.

    Starlikeness is the case mu = 1.  ``generator`` may supply f'^{-1} f in closed form.
    """
    mu = complex(mu)
    if mu.real <= 0:
        raise PreconditionError("need Re mu > 0")
    unit = mu / abs(mu)
    if not 0 < r <= f.radius:
        raise DomainError(f"radius {r} outside (0, {f.radius}]")
    base = generator if generator is not None else extract_generator(f, 1.0)

    def objective(pts):
        return np.real(unit * pairing(base(pts), pts))

    radii = [r * (1 - 2.0 ** -k) for k in range(1, rungs + 1)]
    if r < f.radius:
        radii.append(r)
    res = sphere_extremum_multi(objective, f.dim, radii, "inf", samples, seed)
    k = int(np.argmin([x.value for x in res]))
    worst, where = res[k].value, radii[k]
    return SpiralVerdict(worst >= -margin, mu, r, float(worst), float(where))
