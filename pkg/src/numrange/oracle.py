"""Brute-force numerical-range quantities by sampling spheres of C^n.

Every sup/inf here is a two-phase estimate: a deterministic quasi-uniform
sample of the sphere, then coordinate-wise golden-section refinement of the
best few samples on an angular chart.  A sampled sup is a lower bound on the
true sup (and a sampled inf an upper bound on the true inf).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.stats import norm, qmc

from .errors import DomainError
from .maps import BuiltinMap, HoloMap, PolyMap, pairing

DEFAULT_SEED = 42
SAMPLES_PER_DIM = 4096
LADDER_RUNGS = 12
INF_THRESHOLD = 1e8
GROWTH_TOL = 1e-3
REFINE_TOL = 1e-10
MAX_GOLDEN = 200
MAX_SWEEPS = 40
N_SEEDS = 4

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

Objective = Callable[[np.ndarray], np.ndarray]


@dataclass
class SphereResult:
    value: float
    point: np.ndarray
    samples: int
    refine_iters: int


# -- sphere charts ------------------------------------------------------------


def _angles_to_points(phi: np.ndarray, dim: int, r) -> np.ndarray:
    r = np.asarray(r, dtype=float).reshape(-1, 1) if np.ndim(r) else r
    if dim == 1:
        return r * np.exp(1j * phi[:, :1])
    k, m1 = phi.shape
    v = np.ones((k, m1 + 1))
    s = np.ones(k)
    for j in range(m1):
        v[:, j] = s * np.cos(phi[:, j])
        s = s * np.sin(phi[:, j])
    v[:, m1] = s
    return r * (v[:, :dim] + 1j * v[:, dim:])


def _points_to_angles(x: np.ndarray, dim: int) -> np.ndarray:
    if dim == 1:
        return np.angle(x[:, :1])
    v = np.concatenate([x.real, x.imag], axis=1)
    v = v / np.linalg.norm(v, axis=1, keepdims=True)
    m = v.shape[1]
    phi = np.zeros((v.shape[0], m - 1))
    tail = np.sqrt(np.cumsum(v[:, ::-1] ** 2, axis=1)[:, ::-1])
    for j in range(m - 2):
        phi[:, j] = np.arctan2(tail[:, j + 1], v[:, j])
    phi[:, m - 2] = np.arctan2(v[:, m - 1], v[:, m - 2])
    return phi


def sphere_points(dim: int, r: float, samples: int, seed: int = DEFAULT_SEED) -> np.ndarray:
    """Deterministic quasi-uniform points on the sphere ||x|| = r of C^dim.

    For dim = 1 a uniform angle grid; otherwise scrambled Sobol points pushed
    through the Gaussian quantile and normalised.  Both are prefix-stable: the
    first m points of a 2m-point set are the m-point set (up to grid order).
    """
    if dim == 1:
        t = 2 * np.pi * np.arange(samples) / samples
        return r * np.exp(1j * t)[:, None]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        u = qmc.Sobol(d=2 * dim, scramble=True, seed=seed).random(samples)
    g = norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return r * (g[:, :dim] + 1j * g[:, dim:])


# -- refinement -----------------------------------------------------------------


def golden_max(fun, lo, hi, tol, maxiter):
    """Vectorised golden-section maximisation on brackets [lo, hi] (arrays)."""
    a, b = lo.copy(), hi.copy()
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = fun(c), fun(d)
    it = 0
    while it < maxiter and np.max(b - a) > tol:
        left = fc > fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        p = np.where(left, b - _INVPHI * (b - a), a + _INVPHI * (b - a))
        fp = fun(p)
        c, d = np.where(left, p, d), np.where(left, c, p)
        fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
        it += 1
    take_c = fc >= fd
    return np.where(take_c, c, d), np.where(take_c, fc, fd), it


def _refine(objective, phi, vals, dim, radii, width):
    """Coordinate-wise golden-section ascent on the angular chart, all rows in lockstep."""
    iters = 0
    m1 = phi.shape[1]
    for sweep in range(MAX_SWEEPS):
        w = max(width * 0.5 ** sweep, 1e-7)
        tol = max(REFINE_TOL, 1e-3 * w)
        before = vals.copy()
        for j in range(m1):
            def along(t, j=j):
                trial = phi.copy()
                trial[:, j] = t
                return objective(_angles_to_points(trial, dim, radii))
            t_best, f_best, it = golden_max(along, phi[:, j] - w, phi[:, j] + w, tol, MAX_GOLDEN)
            iters += it
            better = f_best > vals
            phi[:, j] = np.where(better, t_best, phi[:, j])
            vals = np.where(better, f_best, vals)
        gain = np.max(vals - before)
        if gain <= 1e-15 * (1.0 + np.max(np.abs(vals))) and (w <= 1e-6 or m1 == 1 or sweep >= 2):
            break
    return phi, vals, iters


def sphere_extremum_multi(objective: Objective, dim: int, radii, mode: str = "sup",
                          samples: int | None = None, seed: int = DEFAULT_SEED,
                          n_seeds: int = N_SEEDS, refine: bool = True) -> list[SphereResult]:
    """sup (or inf) of a pointwise real objective over several spheres at once.

    The same phase-1 point set (scaled) is used for every radius; phase-2
    refinement runs on all radii together so the Python overhead is shared.
    """
    if mode not in ("sup", "inf"):
        raise ValueError(f"mode must be 'sup' or 'inf', got {mode!r}")
    sign = 1.0 if mode == "sup" else -1.0
    samples = samples or SAMPLES_PER_DIM * dim
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    nr = radii.size

    def f(pts):
        return sign * np.asarray(objective(pts), dtype=float)

    unit = sphere_points(dim, 1.0, samples, seed)
    pts = (radii[:, None, None] * unit[None, :, :]).reshape(-1, dim)
    vals = f(pts).reshape(nr, samples)
    best = np.argmax(vals, axis=1)
    best_val = vals[np.arange(nr), best]
    best_pts = radii[:, None] * unit[best]
    if not refine:
        return [SphereResult(sign * float(best_val[i]), best_pts[i], samples, 0) for i in range(nr)]
    k = min(n_seeds, samples)
    top = np.argpartition(-vals, k - 1, axis=1)[:, :k]
    phi = _points_to_angles(unit[top.ravel()], dim)
    row_r = np.repeat(radii, k)
    seed_vals = np.take_along_axis(vals, top, axis=1).ravel()
    width = 2 * np.pi * samples ** (-1.0 / max(2 * dim - 1, 1))
    phi, refined, iters = _refine(f, phi, seed_vals.copy(), dim, row_r, width)
    refined = refined.reshape(nr, k)
    out = []
    for i in range(nr):
        j = int(np.argmax(refined[i]))
        if refined[i, j] >= best_val[i]:
            row = i * k + j
            point = _angles_to_points(phi[row:row + 1], dim, radii[i])[0]
            out.append(SphereResult(sign * float(refined[i, j]), point, samples, iters))
        else:
            out.append(SphereResult(sign * float(best_val[i]), best_pts[i], samples, iters))
    return out


def sphere_extremum(objective: Objective, dim: int, r: float, mode: str = "sup",
                    samples: int | None = None, seed: int = DEFAULT_SEED,
                    n_seeds: int = N_SEEDS, refine: bool = True) -> SphereResult:
    """Estimate sup (or inf) of a real objective over the sphere ||x|| = r."""
    return sphere_extremum_multi(objective, dim, [r], mode, samples, seed, n_seeds, refine)[0]


# -- numerical-range objectives ---------------------------------------------------


def _bounded_on_closure(h: HoloMap) -> bool:
    if isinstance(h, PolyMap):
        return True
    return isinstance(h, BuiltinMap) and h.tag in ("linear", "moebius_auto")


def _check_radius(h: HoloMap, r: float) -> None:
    if not (0 < r < h.radius or (r == h.radius and _bounded_on_closure(h))):
        raise DomainError(f"radius {r} outside (0, {h.radius})")


def pairing_objective(h: HoloMap, theta: float = 0.0, subtract_h0: bool = False) -> Objective:
    """x -> Re <e^{i theta}(h(x) - [h(0)]), x>."""
    rot = np.exp(1j * theta)
    h0 = h.value_at_zero() if subtract_h0 else None

    def objective(pts):
        vals = h(pts)
        if h0 is not None:
            vals = vals - h0
        return np.real(rot * pairing(vals, pts))

    return objective


def sphere_pairing(h: HoloMap, r: float, theta: float = 0.0, subtract_h0: bool = False,
                   mode: str = "sup", samples: int | None = None,
                   seed: int = DEFAULT_SEED) -> SphereResult:
    _check_radius(h, r)
    return sphere_extremum(pairing_objective(h, theta, subtract_h0), h.dim, r, mode, samples, seed)


def sphere_pairing_multi(h: HoloMap, radii, theta: float = 0.0, subtract_h0: bool = False,
                         mode: str = "sup", samples: int | None = None,
                         seed: int = DEFAULT_SEED) -> list[SphereResult]:
    for r in radii:
        _check_radius(h, r)
    return sphere_extremum_multi(pairing_objective(h, theta, subtract_h0), h.dim, radii, mode,
                                 samples, seed)


def sup_re_pairing(h: HoloMap, r: float, theta: float = 0.0, subtract_h0: bool = False,
                   mode: str = "sup", samples: int | None = None, seed: int = DEFAULT_SEED) -> float:
    """sup (or inf) over ||x|| = r of Re <e^{i theta}(h(x) - [h(0)]), x>."""
    return sphere_pairing(h, r, theta, subtract_h0, mode, samples, seed).value


@dataclass
class LadderResult:
    """Extremum over the open ball, as the best value over a radius ladder."""

    value: float
    infinite: bool
    rungs: list = field(default_factory=list)
    point: np.ndarray | None = None


def ladder_radii(radius: float, rungs: int = LADDER_RUNGS) -> list[float]:
    return [radius * (1 - 2.0 ** -k) for k in range(1, rungs + 1)]


def ball_extremum(h: HoloMap, theta: float = 0.0, subtract_h0: bool = False, mode: str = "sup",
                  samples: int | None = None, seed: int = DEFAULT_SEED,
                  rungs: int = LADDER_RUNGS) -> LadderResult:
    """sup (inf) over ||x|| < R of Re <e^{i theta}(h(x) - [h(0)]), x>.

    The origin contributes the value 0.  Maps continuous on the closed ball get
    an extra rung at r = R.  Others are flagged infinite when the ladder is
    still moving at its last rung (relative change above ``GROWTH_TOL``) or has
    passed ``INF_THRESHOLD``.
    """
    sign = 1.0 if mode == "sup" else -1.0
    radii = ladder_radii(h.radius, rungs)
    closed = _bounded_on_closure(h)
    if closed:
        radii.append(h.radius)
    best, point = 0.0, np.zeros(h.dim, dtype=complex)
    table = []
    for r, res in zip(radii, sphere_pairing_multi(h, radii, theta, subtract_h0, mode, samples, seed)):
        table.append((r, res.value))
        if sign * res.value > sign * best:
            best, point = res.value, res.point
    infinite = False
    if not closed:
        last, prev = sign * table[-1][1], sign * table[-2][1]
        growing = last - prev > GROWTH_TOL * max(1.0, abs(prev))
        infinite = sign * best > INF_THRESHOLD or growing
    value = sign * math.inf if infinite else best
    return LadderResult(value, infinite, table, point)


def estimate_NR(h: HoloMap, theta: float = 0.0, samples: int | None = None,
                seed: int = DEFAULT_SEED) -> float:
    """sup over the ball of Re <e^{i theta} h(x), x>; ``math.inf`` when flagged unbounded."""
    return ball_extremum(h, theta, False, "sup", samples, seed).value


def estimate_MR(h: HoloMap, theta: float = 0.0, samples: int | None = None,
                seed: int = DEFAULT_SEED) -> float:
    return ball_extremum(h, theta, True, "sup", samples, seed).value


def estimate_mR(h: HoloMap, theta: float = 0.0, samples: int | None = None,
                seed: int = DEFAULT_SEED) -> float:
    return ball_extremum(h, theta, True, "inf", samples, seed).value


@dataclass(frozen=True)
class DerivBounds:
    theta: float
    L_theta: float
    l_theta: float


def hermitian_extremes(matrix, theta: float = 0.0) -> tuple[float, float]:
    """(max, min) of Re <e^{i theta} A u, u> over unit vectors u."""
    a = np.exp(1j * theta) * np.atleast_2d(np.asarray(matrix, dtype=complex))
    herm = (a + a.conj().T) / 2
    ev = np.linalg.eigvalsh(herm)
    return float(ev[-1]), float(ev[0])


def deriv_bounds(h: HoloMap, theta: float = 0.0) -> DerivBounds:
    """L(theta), l(theta): extremes of Re <e^{i theta} h'(0)u, u> on the unit sphere."""
    a = h.derivative_at_zero()
    if h.dim == 1:
        v = float(np.real(np.exp(1j * theta) * a[0, 0]))
        return DerivBounds(theta, v, v)
    hi, lo = hermitian_extremes(a, theta)
    return DerivBounds(theta, hi, lo)


def numerical_radius(h: HoloMap, r: float, samples: int | None = None,
                     seed: int = DEFAULT_SEED) -> float:
    """sup over ||x|| = r of |<h(x), x>|."""
    _check_radius(h, r)
    return sphere_extremum(lambda p: np.abs(pairing(h(p), p)), h.dim, r, "sup", samples, seed).value


def sup_norm(h: HoloMap, r: float, samples: int | None = None, seed: int = DEFAULT_SEED) -> float:
    """sup over ||x|| <= r of ||h(x)|| (attained on the sphere: ||h|| is plurisubharmonic)."""
    _check_radius(h, r)
    return sphere_extremum(lambda p: np.linalg.norm(h(p), axis=1), h.dim, r, "sup", samples, seed).value


@dataclass
class RangeStats:
    r: float
    theta: float
    N_r: float
    M_r: float
    m_r: float
    V_abs: float
    W_r: float
    samples: int
    refine_iters: int


def range_stats(h: HoloMap, r: float, theta: float = 0.0, samples: int | None = None,
                seed: int = DEFAULT_SEED) -> RangeStats:
    n_res = sphere_pairing(h, r, theta, False, "sup", samples, seed)
    big = sphere_pairing(h, r, theta, True, "sup", samples, seed)
    small = sphere_pairing(h, r, theta, True, "inf", samples, seed)
    return RangeStats(
        r=r, theta=theta, N_r=n_res.value, M_r=big.value, m_r=small.value,
        V_abs=numerical_radius(h, r, samples, seed), W_r=sup_norm(h, r, samples, seed),
        samples=n_res.samples,
        refine_iters=n_res.refine_iters + big.refine_iters + small.refine_iters,
    )


@dataclass
class DissipativeVerdict:
    dissipative: bool
    value: float
    witness: np.ndarray | None


def check_dissipative(h: HoloMap, omega: float = 0.0, theta: float = 0.0, eps: float | None = None,
                      samples: int | None = None, seed: int = DEFAULT_SEED,
                      rungs: int = LADDER_RUNGS) -> DissipativeVerdict:
    """Is Re <e^{i theta} h(x), x> <= omega on the annulus R - eps < ||x|| < R?"""
    R = h.radius
    eps = R if eps is None else eps
    if not 0 < eps <= R:
        raise DomainError(f"eps must lie in (0, {R}], got {eps}")
    radii = [R - eps * 2.0 ** -k for k in range(1, rungs + 1)]
    if eps < R:
        radii.insert(0, R - eps * 0.999)
    worst, witness = -math.inf, None
    for res in sphere_pairing_multi(h, radii, theta, False, "sup", samples, seed):
        if res.value > worst:
            worst, witness = res.value, res.point
    ok = worst <= omega + 1e-9
    return DissipativeVerdict(ok, worst, None if ok else witness)
