"""Nonlinear resolvents: the mu(r) calculus, semi-completeness radii, solvers and the key domain."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import (ConditionFailed, DomainError, InfiniteInput, JacobianSingular, NoConvergence,
                     PreconditionError)
from .growth import BoundInputs
from .maps import HoloMap, minus_identity
from .oracle import DEFAULT_SEED, deriv_bounds, sphere_points

log = logging.getLogger(__name__)

ROOT_AGREEMENT = 1e-8
SOLVE_TOL = 1e-10
MAX_NEWTON = 500
COND_LIMIT = 1e12
PHI_TOL = 1e-12
MAX_OUTER = 10_000
INNER_TOL = 1e-14


# -- omega and mu ------------------------------------------------------------


def omega_of_r(inputs: BoundInputs, r: float) -> float:
    """omega(r) = ||h(0)||(1 - r^2/R^2) + r/(R+r)[(R-r)L + 2r N_R/R^2]  (= F(r)/r)."""
    R = inputs.R
    if not 0 < r < R:
        raise DomainError(f"radius {r} outside (0, {R})")
    if not math.isfinite(inputs.N_R):
        raise InfiniteInput("N_R is unbounded")
    return (inputs.h0_norm * (1 - r * r / (R * R))
            + r / (R + r) * ((R - r) * inputs.L + 2 * r * inputs.N_R / (R * R)))


def mu_value(R: float, L: float, b: float, c: float, r):
    """mu(r) = ((R-r)/(R+r))L + (2r/(R+r))b + (c/r)(1 - r^2/R^2)."""
    r = np.asarray(r, dtype=float)
    return (R - r) / (R + r) * L + 2 * r / (R + r) * b + c / r * (1 - r * r / (R * R))


def mu_prime(R: float, L: float, b: float, c: float, r):
    r = np.asarray(r, dtype=float)
    return 2 * R * (b - L) / (R + r) ** 2 - c * (r * r + R * R) / (R * R * r * r)


def cubic_coefficients(R: float, L: float, b: float, c: float) -> tuple[float, float, float]:
    """(m, p, q) of the monic cubic r^3 + m r^2 + p r + q equivalent to mu(r) = 0.

    From r(R+r)R^2 mu(r) = -c r^3 + R^2(2b - L - c/R) r^2 + R^2(RL + c) r + c R^3,
    divided by -c.
    """
    m = R * (R * L - 2 * R * b + c) / c
    p = -(L * R ** 3 + c * R * R) / c
    q = -R ** 3
    return m, p, q


def trig_roots(R: float, L: float, b: float, c: float) -> dict:
    """Closed-form (trigonometric) roots of the cubic.

    ``r1_trig``/``r2_trig`` are the branches at phi and phi - 2 pi/3, the labelling
    that puts them at the two zeros of mu when both lie in (0, R);
    ``all`` holds the three real roots in increasing order.
    """
    m = R * (R * L - 2 * R * b + c) / c
    Q = (c * m * m + 3 * L * R ** 3 + 3 * c * R * R) / (9 * c)
    A = (2 * c * m ** 3 + 9 * m * (L * R ** 3 + c * R * R) - 27 * c * R ** 3) / (54 * c)
    if Q <= 0 or A * A > Q ** 3 * (1 + 1e-12):
        # one real root: the trigonometric form does not apply
        return {"Q": Q, "A": A, "m": m, "all": [], "r1_trig": math.nan, "r2_trig": math.nan}
    arg = max(-1.0, min(1.0, A / math.sqrt(Q ** 3)))
    phi = math.acos(arg) / 3
    s = 2 * math.sqrt(Q)
    roots = sorted(-s * math.cos(phi + 2 * math.pi * k / 3) - m / 3 for k in range(3))
    return {
        "Q": Q, "A": A, "m": m, "phi": phi, "all": roots,
        "r1_trig": -s * math.cos(phi) - m / 3,
        "r2_trig": -s * math.cos(phi - 2 * math.pi / 3) - m / 3,
    }


def _closed_r1(R: float, L: float, b: float, c: float) -> float:
    """Smallest positive real root of the cubic, for when the trigonometric form does not apply."""
    m, p, q = cubic_coefficients(R, L, b, c)
    real = [z.real for z in np.roots([1.0, m, p, q]) if abs(z.imag) < 1e-9 * max(1.0, abs(z))]
    pos = sorted(x for x in real if x > 0)
    return pos[0] if pos else math.nan


@dataclass
class MuProfile:
    R: float
    L: float
    b: float
    c: float
    branch: str
    beta: float | None = None
    r_star: float | None = None
    mu_min: float | None = None
    roots: tuple[float, float] | None = None
    roots_closed: tuple[float, float] | None = None
    r3: float | None = None
    discrepancy: float | None = None
    notes: list = field(default_factory=list)


def _bisect(fn, a: float, b: float) -> float:
    return brentq(fn, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def mu_profile_params(R: float, L: float, b: float, c: float) -> MuProfile:
    """Classify mu(r) on (0, R) and locate its minimum and zeros."""
    if not all(math.isfinite(v) for v in (R, L, b, c)):
        raise InfiniteInput("mu profile needs finite R, L, b, c")
    if c == 0:
        if b == L:
            return MuProfile(R, L, b, c, "c_zero_constant", mu_min=L)
        return MuProfile(R, L, b, c, "c_zero_increasing", mu_min=L)
    beta = (math.sqrt(c * c + 2 * R * (b - L) * c) - c) / c if c * c + 2 * R * (b - L) * c >= 0 else math.nan
    if not beta > 2:
        return MuProfile(R, L, b, c, "no_interior_min", beta=beta)
    r_star = R * (beta - math.sqrt(beta * beta - 4)) / 2
    mu_min = float(mu_value(R, L, b, c, r_star))
    prof = MuProfile(R, L, b, c, "interior_min", beta=beta, r_star=r_star, mu_min=mu_min)
    if mu_min < 0:
        f = lambda r: float(mu_value(R, L, b, c, r))  # noqa: E731
        lo = r_star
        while f(lo) < 0 and lo > 1e-300:
            lo /= 2
        r1 = _bisect(f, lo, r_star)
        r2 = _bisect(f, r_star, R) if f(R) > 0 else R
        prof.roots = (r1, r2)
        tr = trig_roots(R, L, b, c)
        if tr["all"]:
            prof.roots_closed = (tr["r1_trig"], tr["r2_trig"])
            prof.r3 = tr["all"][-1]
        if r2 == R:
            prof.notes.append("mu < 0 up to the boundary (N_R <= 0); upper end clamped at R")
        if prof.roots_closed is None:
            gap = math.inf if r2 < R else abs(_closed_r1(R, L, b, c) - r1)
        elif r2 == R:
            # the branch labels assume both zeros inside (0, R); match r1 to the nearest root
            gap = min(abs(x - r1) for x in tr["all"])
        else:
            gap = abs(prof.roots_closed[0] - r1)
            if r2 < R:
                gap = max(gap, abs(prof.roots_closed[1] - r2))
        prof.discrepancy = gap
        if gap > ROOT_AGREEMENT:
            msg = (f"closed-form roots {prof.roots_closed} differ from bisection {prof.roots} "
                   f"by {gap:.3e}; bisection kept")
            prof.notes.append(msg)
            log.info(msg)
    return prof


def mu_profile(inputs: BoundInputs) -> MuProfile:
    if not math.isfinite(inputs.N_R):
        raise InfiniteInput("N_R is unbounded")
    return mu_profile_params(inputs.R, inputs.L, inputs.N_R / inputs.R ** 2, inputs.h0_norm)


def semi_complete_interval(inputs: BoundInputs) -> tuple[float, float] | None:
    """Radii r for which -h is semi-complete on B_r, or None."""
    if not math.isfinite(inputs.N_R):
        raise InfiniteInput("N_R is unbounded")
    R, L, N = inputs.R, inputs.L, inputs.N_R
    if inputs.h0_norm == 0:
        if L < min(0.0, N / R ** 2):
            den = 2 * N - L * R * R
            # den <= 0 means mu < 0 on all of (0, R)
            return 0.0, R if den <= 0 else min(R, -R ** 3 * L / den)
        return None
    if R * (N / R ** 2 - L) <= 4 * inputs.h0_norm:
        return None
    prof = mu_profile(inputs)
    if prof.roots is None:
        return None
    return prof.roots


def nullp_radius(h0_norm: float, L: float) -> float | None:
    """Smaller root of ||h(0)||(1+r)^2 + L r = 0, when L + 4||h(0)|| < 0.

    Uses the product-of-roots form 2c / (-(2c+L) + sqrt(L(L+4c))), which is
    well conditioned and gives 0 at c = 0.
    """
    c = h0_norm
    if not L + 4 * c < 0:
        return None
    r1 = 2 * c / (-(2 * c + L) + math.sqrt(L * (L + 4 * c)))
    textbook = nullp_radius_quadratic(c, L)
    if textbook is not None and abs(textbook - r1) > 1e-12 * max(1.0, r1):
        log.info("quadratic-formula null-point radius %.17g loses digits; stable value %.17g used", textbook, r1)
    return r1


def nullp_radius_quadratic(h0_norm: float, L: float) -> float | None:
    """The same root by the plain quadratic formula; cancels badly for small c."""
    c = h0_norm
    if not L + 4 * c < 0 or c == 0:
        return None
    return (-(2 * c + L) - math.sqrt((L + 4 * c) * L)) / (2 * c)


# -- the resolvent equation --------------------------------------------------------


@dataclass
class SolveTrace:
    lam: complex
    z: np.ndarray
    solution: np.ndarray
    iterations: int
    residual: float
    converged: bool
    method: str
    certified: bool | None = None
    residuals: list = field(default_factory=list)


def certification_holds(omega_r: float, lam: complex, z, r: float) -> bool:
    """||z|| + omega(r) < r Re(lambda): the sufficient condition for a unique solution in B_r."""
    return float(np.linalg.norm(z)) + omega_r < r * complex(lam).real


def solve_resolvent(h: HoloMap, lam: complex, z, r_cap: float | None = None,
                    omega_r: float | None = None, tol: float = SOLVE_TOL,
                    max_iter: int = MAX_NEWTON, x0=None) -> SolveTrace:
    """Solve lambda x - h(x) = z by damped Newton with a fixed-point fallback.

    ``omega_r`` (omega at ``r_cap``) enables the certification flag; the solver
    runs either way.  The returned trace has ``converged=False`` on failure.
    """
    lam = complex(lam)
    n = h.dim
    z = np.asarray(z, dtype=complex).reshape(n)
    R = h.radius
    r_cap = R if r_cap is None else r_cap
    certified = None if omega_r is None else certification_holds(omega_r, lam, z, r_cap)
    target = tol * (1 + np.linalg.norm(z))
    eye = np.eye(n)

    def resid(x):
        return lam * x - h(x) - z

    if x0 is not None:
        x = np.asarray(x0, dtype=complex).reshape(n)
    else:
        x = z / lam if lam != 0 else np.zeros(n, dtype=complex)
    if np.linalg.norm(x) >= R:
        x = x * (0.5 * R / np.linalg.norm(x))
    F = resid(x)
    res = float(np.linalg.norm(F))
    history = [res]
    method = "newton"
    fallback_stalls = 0
    for it in range(1, max_iter + 1):
        if res <= target and np.linalg.norm(x) <= r_cap + tol:
            return SolveTrace(lam, z, x, it - 1, res, True, method, certified, history)
        J = lam * eye - h.jacobian(x)
        if np.linalg.cond(J) > COND_LIMIT:
            if lam == 0:
                raise JacobianSingular("Jacobian singular and no fixed-point form at lambda = 0")
            method = "fixed_point"
            step = (z + h(x)) / lam - x
        else:
            step = -np.linalg.solve(J, F)
        t = 1.0
        while True:
            cand = x + t * step
            if np.linalg.norm(cand) < R:
                try:
                    Fc = resid(cand)
                except Exception:  # singular points of builtins
                    Fc = None
                if Fc is not None and np.all(np.isfinite(Fc)):
                    rc = float(np.linalg.norm(Fc))
                    if rc < res or t < 1e-12:
                        break
            t *= 0.5
            if t < 1e-12:
                cand, Fc, rc = x, F, res
                break
        if rc >= res and method == "fixed_point":
            fallback_stalls += 1
            if fallback_stalls > 20:
                raise JacobianSingular("fixed-point fallback stalled")
        x, F, res = cand, Fc, rc
        history.append(res)
        if t < 1e-12 and res > target:
            break
    conv = res <= target and np.linalg.norm(x) <= r_cap + tol
    return SolveTrace(lam, z, x, len(history) - 1, res, bool(conv), method, certified, history)


# -- null points and fixed points ---------------------------------------------------


@dataclass
class PhiTrace:
    lam: float
    limit: np.ndarray
    iterations: int
    steps: list
    null_residual: float
    converged: bool
    limit_2lam: np.ndarray | None = None
    lambda_gap: float | None = None
    nullp_bound: float | None = None


def _phi_limit(h: HoloMap, lam: float, y0, r_cap, tol, max_outer):
    y = np.asarray(y0, dtype=complex).reshape(h.dim)
    steps = []
    for k in range(1, max_outer + 1):
        tr = solve_resolvent(h, lam, lam * y, r_cap=r_cap, x0=y, tol=INNER_TOL)
        # rounding can keep the residual above INNER_TOL; the standard tolerance still suffices
        loose = tr.residual <= SOLVE_TOL * (1 + np.linalg.norm(lam * y))
        if not (tr.converged or loose):
            raise NoConvergence(f"inner resolvent solve failed at outer step {k}")
        d = float(np.linalg.norm(tr.solution - y))
        steps.append(d)
        y = tr.solution
        if d <= tol:
            return y, k, steps
    raise NoConvergence(f"Phi iteration did not settle in {max_outer} steps")


def iterate_phi(h: HoloMap, lam: float = 1.0, y0=None, r_cap: float | None = None,
                tol: float = PHI_TOL, max_outer: int = MAX_OUTER, check_f1: bool = True,
                check_lambda: bool = True) -> PhiTrace:
    """Iterate Phi_lambda = (lambda I - h)^{-1}(lambda .) to the null point of h."""
    if lam <= 0:
        raise DomainError("lambda must be positive")
    c = float(np.linalg.norm(h.value_at_zero()))
    L = deriv_bounds(h, 0.0).L_theta
    bound = nullp_radius(c, L)
    if check_f1 and bound is None:
        raise PreconditionError(f"condition L + 4||h(0)|| < 0 fails (L={L:.6g}, ||h(0)||={c:.6g})")
    y0 = np.zeros(h.dim, dtype=complex) if y0 is None else y0
    x0, k, steps = _phi_limit(h, lam, y0, r_cap, tol, max_outer)
    res = float(np.linalg.norm(h(x0)))
    if res > 1e-9:
        raise NoConvergence(f"limit is not a null point: ||h(x0)|| = {res:.3e}")
    if bound is not None and np.linalg.norm(x0) > bound + 1e-6:
        raise NoConvergence(f"null point norm {np.linalg.norm(x0):.6g} exceeds radius bound {bound:.6g}")
    out = PhiTrace(lam, x0, k, steps, res, True, nullp_bound=bound)
    if check_lambda:
        x2, _, _ = _phi_limit(h, 2 * lam, y0, r_cap, tol, max_outer)
        out.limit_2lam = x2
        out.lambda_gap = float(np.linalg.norm(x2 - x0))
    return out


@dataclass
class FixedPointResult:
    point: np.ndarray
    residual: float
    r1: float
    r1_nullp: float
    L_F: float
    trace: PhiTrace


def fixed_point_selfmap(F: HoloMap, lam: float = 1.0, samples: int = 1000,
                        seed: int = DEFAULT_SEED) -> FixedPointResult | None:
    """Fixed point of a self-map F of the unit ball under L_F < 1 - 4||F(0)||; else None.

    r1 solves ||F(0)||(1+r)^2 + r L_F = r.  This is the null-point quadratic for
    h = F - I (L_h = L_F - 1), so both readings give the same number.
    """
    pts = sphere_points(F.dim, 0.999 * F.radius, samples, seed)
    if np.max(np.linalg.norm(F(pts), axis=1)) >= F.radius:
        raise PreconditionError("F does not map the sampled sphere of radius 0.999 into the ball")
    c = float(np.linalg.norm(F.value_at_zero()))
    L_F = deriv_bounds(F, 0.0).L_theta
    if not L_F < 1 - 4 * c:
        log.info("fixed-point condition L_F < 1 - 4||F(0)|| fails: L_F=%g, ||F(0)||=%g", L_F, c)
        return None
    r1 = nullp_radius(c, L_F - 1)
    phi = lambda r: c * (1 + r) ** 2 + r * L_F - r  # noqa: E731
    r1_direct = 0.0 if c == 0 else _bisect(phi, 0.0, 1.0) if phi(1.0) < 0 else r1
    h = minus_identity(F)
    trace = iterate_phi(h, lam, check_f1=False)
    x0 = trace.limit
    res = float(np.linalg.norm(F(x0) - x0))
    if res > 1e-9 or np.linalg.norm(x0) > r1_direct + 1e-6:
        raise NoConvergence(f"fixed point check failed: residual {res:.3e}, norm {np.linalg.norm(x0):.6g}")
    return FixedPointResult(x0, res, r1_direct, r1, L_F, trace)


def fixed_point_or_raise(F: HoloMap, **kw) -> FixedPointResult:
    res = fixed_point_selfmap(F, **kw)
    if res is None:
        raise ConditionFailed("L_F < 1 - 4||F(0)|| does not hold")
    return res


# -- key domain and spectrum ------------------------------------------------------


@dataclass(frozen=True)
class KeyDomain:
    r: float
    disc_radius: float
    sector_half_angle: float

    def contains(self, lam: complex) -> bool:
        lam = complex(lam)
        if abs(lam) < self.disc_radius:
            return True
        return lam != 0 and abs(np.angle(lam)) < self.sector_half_angle


def key_domain(r: float) -> KeyDomain:
    """Disc |lambda| < (1/2)(1-r)/(1+r) union sector |arg lambda| < arcsin((1-r^2)/(1+r^2))."""
    if not 0 < r < 1:
        raise DomainError(f"key domain needs 0 < r < 1, got {r}")
    return KeyDomain(r, 0.5 * (1 - r) / (1 + r), math.asin((1 - r * r) / (1 + r * r)))


def key_domain_lambdas(kd: KeyDomain, count: int = 64, inset: float = 0.01) -> np.ndarray:
    """Lambda samples on the inset boundary and in the interior of the key domain."""
    q = max(count // 4, 1)
    t = 2 * np.pi * (np.arange(q) + 0.5) / q
    disc_edge = (1 - inset) * kd.disc_radius * np.exp(1j * t)
    disc_in = 0.5 * kd.disc_radius * np.exp(1j * t)
    mods = np.logspace(-2, 2, q)
    sgn = np.where(np.arange(q) % 2 == 0, 1.0, -1.0)
    sector_edge = mods * np.exp(1j * sgn * (1 - inset) * kd.sector_half_angle)
    sector_in = mods[::-1] * np.exp(1j * sgn * 0.5 * kd.sector_half_angle)
    lam = np.concatenate([disc_edge, disc_in, sector_edge, sector_in])
    return lam[:count]


@dataclass
class KeyDomainReport:
    r: float
    domain: KeyDomain
    lambdas: int
    points: int
    max_norm: float
    failures: int
    ok: bool


def verify_key_domain(h: HoloMap, r: float, lambda_samples: int = 64, y_samples: int = 16,
                      tol: float = 1e-8, seed: int = DEFAULT_SEED) -> KeyDomainReport:
    """Check ||Phi_lambda(y)|| <= r for ||y|| = r over lambda samples in the key domain."""
    if np.linalg.norm(h.value_at_zero()) > 1e-10:
        raise PreconditionError("key domain check needs h(0) = 0")
    if np.max(np.abs(h.derivative_at_zero() + np.eye(h.dim))) > 1e-8:
        raise PreconditionError("key domain check needs h'(0) = -I")
    kd = key_domain(r)
    ys = sphere_points(h.dim, r, y_samples, seed)
    worst, fails = 0.0, 0
    for lam in key_domain_lambdas(kd, lambda_samples):
        for y in ys:
            tr = solve_resolvent(h, lam, lam * y, r_cap=r + tol, x0=y)
            nx = float(np.linalg.norm(tr.solution))
            worst = max(worst, nx)
            if not tr.converged or nx > r + tol:
                fails += 1
    return KeyDomainReport(r, kd, lambda_samples, y_samples, worst, fails, fails == 0)


def spectrum_check(h: HoloMap, lam: complex, tol: float = 1e-10) -> bool:
    """True iff lambda lies in the resolvent set, i.e. is not an eigenvalue of h'(0)."""
    ev = np.linalg.eigvals(h.derivative_at_zero())
    return bool(np.min(np.abs(ev - complex(lam))) > tol)
