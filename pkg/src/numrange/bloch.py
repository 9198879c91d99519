"""Bloch radii for F = I - h: rho(r), r_*, rho_s(r), s_*, the case analysis and the theta = 0 forms."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NoRoot, PreconditionError, ValidationError
from .maps import HoloMap
from .oracle import DEFAULT_SEED, deriv_bounds, estimate_NR, golden_max
from .scalar import km_factor

log = logging.getLogger(__name__)

DEGENERATE_TOL = 1e-12
AGREEMENT = 1e-8


@dataclass(frozen=True)
class BlochInputs:
    """Inputs of the Bloch-radius formulas for h with h(0) = 0 on the unit ball.

    At theta = 0 the sharper estimate needs only L, so the effective delta is
    N - L rather than N - l(0).
    """

    theta: float
    N_theta: float
    L: float
    L_theta: float
    l_theta: float
    delta: float | None = None

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.theta, self.N_theta, self.L, self.L_theta, self.l_theta)):
            raise ValidationError("bloch", "inputs must be finite")
        if not self.L < 1:
            raise ValidationError("L", "radius formulas need L < 1")
        if self.delta is None:
            d = self.N_theta - (self.L if self.theta == 0 else self.l_theta)
            object.__setattr__(self, "delta", max(d, 0.0) if d > -1e-9 else d)
        if self.delta < 0:
            raise ValidationError("delta", f"delta = N(theta) - l(theta) must be >= 0, got {self.delta}")

    @classmethod
    def stylized(cls, theta: float, L: float, delta: float) -> BlochInputs:
        """Hand-specified (theta, L, delta); the remaining fields are placeholders."""
        return cls(theta=theta, N_theta=L + delta, L=L, L_theta=L, l_theta=L, delta=delta)

    def to_dict(self) -> dict:
        return asdict(self)


def bloch_inputs(h: HoloMap, theta: float, samples: int | None = None,
                 seed: int = DEFAULT_SEED) -> BlochInputs:
    if h.radius != 1.0:
        raise PreconditionError("Bloch radii are computed on the unit ball")
    if np.linalg.norm(h.value_at_zero()) > 1e-12:
        raise PreconditionError("Bloch radii need h(0) = 0")
    d0 = deriv_bounds(h, 0.0)
    dt = deriv_bounds(h, theta)
    return BlochInputs(theta=theta, N_theta=estimate_NR(h, theta, samples, seed), L=d0.L_theta,
                       L_theta=dt.L_theta, l_theta=dt.l_theta)


def _a(inp: BlochInputs) -> float:
    return 1.0 - inp.L


def _rho_expr(inp: BlochInputs, r):
    if inp.delta == 0:
        return _a(inp) * r
    return r / (1 - r * r) * (_a(inp) * (1 - r * r) - 2 * inp.delta * r * (1 - r * math.cos(inp.theta)))


def rho(inp: BlochInputs, r):
    """rho(r) = r/(1-r^2) [(1-L)(1-r^2) - 2 delta r (1 - r cos theta)]."""
    r = np.asarray(r, dtype=float)
    if np.any((r <= 0) | (r >= 1)):
        if not (inp.delta == 0 and np.all((r > 0) & (r <= 1))):
            raise DomainError("rho needs 0 < r < 1")
    return _rho_expr(inp, r)


def _gmax(f, lo: float, hi: float, tol: float = 1e-13) -> tuple[float, float]:
    arg, val, _ = golden_max(f, np.array([lo]), np.array([hi]), tol, 200)
    return float(arg[0]), float(val[0])


def _polish_max(f, lo: float, hi: float) -> float | None:
    """Zero of the complex-step derivative of an analytic f in [lo, hi], if bracketed."""
    d = lambda r: float(np.imag(f(complex(r, 1e-20))) / 1e-20)  # noqa: E731
    if d(lo) > 0 > d(hi):
        return _brent(d, lo, hi)
    return None


def rho_theta0(N: float, L: float, r):
    """(r/(1+r))((1-L)(1+r) - 2(N-L)r), the theta = 0 form; defined on (0, 1]."""
    r = np.asarray(r, dtype=float)
    return r / (1 + r) * ((1 - L) * (1 + r) - 2 * (N - L) * r)


def rstar_equation(inp: BlochInputs, r):
    """r^2(2 delta cos theta - (1-L)) - 2 delta r + 1 - L; same sign as rho on (0, 1)."""
    d, a, c = inp.delta, _a(inp), math.cos(inp.theta)
    return r * r * (2 * d * c - a) - 2 * d * r + a


@dataclass(frozen=True)
class RStar:
    value: float
    branch: str
    closed_form: float
    bisection: float | None
    root: bool


def _brent(fn, a, b):
    return brentq(fn, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def r_star_details(inp: BlochInputs) -> RStar:
    """Zero of rho in (0, 1) with its branch; value 1.0 with ``root=False`` when rho > 0 throughout."""
    a, d, th = _a(inp), inp.delta, inp.theta
    if d == 0:
        return RStar(1.0, "delta_zero", 1.0, None, False)
    c = math.cos(th)
    if th == 0:
        N = inp.N_theta
        if N <= 1:
            log.info("theta = 0 and N = %g <= 1: rho has no zero in (0, 1)", N)
            return RStar(1.0, "theta_zero", 1.0, None, False)
        closed = a / (2 * N - inp.L - 1)
        bis = _brent(lambda r: float(rho_theta0(N, inp.L, r)), 1e-300, 1.0)
        return _agree(RStar(closed, "theta_zero", closed, bis, True))
    den = 2 * d * c - a
    if abs(den) <= DEGENERATE_TOL:
        closed = a / (2 * d)
        branch = "degenerate"
    else:
        closed = (d - math.sqrt(d * d + (a - 2 * d * c) * a)) / den
        branch = "generic"
    bis = _brent(lambda r: float(rstar_equation(inp, r)), 0.0, 1.0)
    return _agree(RStar(closed, branch, closed, bis, True))


def _agree(res: RStar) -> RStar:
    if res.bisection is not None and abs(res.closed_form - res.bisection) > AGREEMENT:
        log.info("r_* closed form %.17g vs bisection %.17g; bisection kept", res.closed_form, res.bisection)
        return RStar(res.bisection, res.branch, res.closed_form, res.bisection, res.root)
    return res


def r_star(inp: BlochInputs, strict: bool = False) -> float:
    """Smallest zero of rho in (0, 1); 1.0 (or NoRoot when ``strict``) if there is none."""
    res = r_star_details(inp)
    if strict and not res.root:
        raise NoRoot("rho stays positive on (0, 1)")
    return res.value


def q_of_s(inp: BlochInputs, s: float) -> float:
    """Q = L(theta, s) delta with the unit-ball Kresin-Maz'ya factor."""
    return km_factor(inp.theta, s, 1.0) * inp.delta


def a_of_s(inp: BlochInputs, s: float) -> float:
    return _a(inp) - 2 * q_of_s(inp, s)


def rho_s(inp: BlochInputs, s: float, r, check: bool = True):
    """rho_s(r) = (A r^2 + B r)/(s + r), A = 1 - L - 2Q(s), B = s(1 - L)."""
    rs = r_star(inp)
    if not 0 < s < rs or (inp.delta == 0 and not 0 < s <= 1):
        raise DomainError(f"s = {s} outside (0, r_*) = (0, {rs})")
    r = np.asarray(r, dtype=float)
    if np.any((r < 0) | (r > s)):
        raise DomainError("rho_s needs 0 <= r <= s")
    A, B = a_of_s(inp, s), s * _a(inp)
    val = (A * r * r + B * r) / (s + r)
    if check:
        # pointwise rho(r) >= rho_s(r); rho(s) >= rho_s(r) fails when the maximiser r^0 < s
        ref = _rho_expr(inp, r[r > 0])
        if np.any(val[r > 0] > ref + 1e-12 * np.maximum(1.0, np.abs(ref))):
            raise AssertionError("rho(r) >= rho_s(r) violated")
        if abs(float((A * s + B) / 2) - float(_rho_expr(inp, s))) > 1e-12:
            raise AssertionError("rho_s(s) = rho(s) violated")
    return val


@dataclass(frozen=True)
class SStar:
    value: float
    closed_form: float
    bisection: float
    rho_value: float


def s_star(inp: BlochInputs) -> SStar:
    """Smallest zero of A(s) in (0, r_*), by the closed form and by bisection."""
    a, d, c = _a(inp), inp.delta, math.cos(inp.theta)
    if d == 0:
        raise NoRoot("A(s) = 1 - L > 0 when delta = 0")
    rs = r_star(inp)
    den = 4 * d * c - a
    if abs(den) <= DEGENERATE_TOL:
        closed = a / (4 * d)
    else:
        closed = (2 * d - math.sqrt(4 * d * d - den * a)) / den
    # numerator of A(s); A(0) = 1 - L > 0 and A(r_*) < 0
    num = lambda s: den * s * s - 4 * d * s + a  # noqa: E731
    hi = min(rs, 1.0 - 1e-15)
    if num(hi) >= 0:
        raise NoRoot("A(s) > 0 on (0, r_*)")
    bis = _brent(num, 0.0, hi)
    value = closed
    if abs(closed - bis) > AGREEMENT or not 0 < closed < rs:
        log.info("s_* closed form %.17g vs bisection %.17g; bisection kept", closed, bis)
        value = bis
    rv = float(rho(inp, value))
    if abs(rv - a * value / 2) > 1e-10:
        raise AssertionError(f"rho(s_*) = {rv} differs from (1-L)s_*/2 = {a * value / 2}")
    return SStar(value, closed, bis, rv)


@dataclass(frozen=True)
class CaseResult:
    s: float
    argmax: float
    max_value: float
    branch: str
    Q: float
    numeric_argmax: float
    epsilon: tuple = ()


def bloch_case_analysis(inp: BlochInputs, s: float, eps_points: int = 5) -> CaseResult:
    """Maximiser of rho_s over (0, s] following branches (a), (b) and (c)."""
    rs = r_star(inp)
    if not 0 < s < rs:
        raise DomainError(f"s = {s} outside (0, r_*) = (0, {rs})")
    a = _a(inp)
    Q = q_of_s(inp, s)
    ss = s_star(inp).value if inp.delta > 0 else math.inf
    eps: tuple = ()
    if abs(s - ss) <= 1e-12:
        branch, arg, val = "a", ss, a * ss / 2
        grid = np.linspace(ss / eps_points, ss, eps_points)
        eps = tuple((float(r), float((ss + r) / (ss * a))) for r in grid)
    elif s < ss:
        branch, arg, val = "b", s, float(rho(inp, s))
    elif Q > 2 * a / 3:
        branch = "c"
        arg = (math.sqrt(2 * Q / (2 * Q - a)) - 1) * s
        val = float(rho_s(inp, s, arg))
    else:
        branch, arg, val = "c", s, float(rho(inp, s))
        if val < s * a / 3 - 1e-12:
            raise AssertionError("branch (c) guarantee rho(s) >= (s/3)(1-L) violated")
    num_arg, _ = _gmax(lambda r: rho_s(inp, s, np.clip(r, 0.0, s), check=False), 0.0, s)
    return CaseResult(s, float(arg), float(val), branch, Q, float(num_arg), eps)


def bloch_propA1(N: float, L: float) -> tuple[float, float]:
    """(r_0, rho_0) for theta = 0 from N = sup over the ball and L = L(0)."""
    if not L < 1:
        raise PreconditionError("need L < 1")
    if not N >= L - 1e-12:
        raise PreconditionError("need N >= L")
    if N >= (2 + L) / 3:
        r0 = math.sqrt(2 * (L - N) / (1 + L - 2 * N)) - 1
        return r0, float(rho_theta0(N, L, r0))
    return 1.0, 1.0 - N


def maximize_rho(inp: BlochInputs) -> tuple[float, float]:
    """Numeric argmax of rho over (0, r_*] (over (0, 1] at theta = 0 or delta = 0)."""
    if inp.delta == 0:
        return 1.0, _a(inp)
    if inp.theta == 0:
        f = lambda r: r / (1 + r) * ((1 - inp.L) * (1 + r) - 2 * (inp.N_theta - inp.L) * r)  # noqa: E731
        hi = 1.0
    else:
        f = lambda r: _rho_expr(inp, r)  # noqa: E731
        hi = r_star(inp)
    grid = np.linspace(hi / 4096, hi * (1 - 1e-12) if inp.theta != 0 else hi, 4096)
    vals = f(grid)
    k = int(np.argmax(vals))
    if k == grid.size - 1:
        return float(grid[k]), float(vals[k])
    lo_b, hi_b = grid[max(k - 1, 0)], grid[k + 1]
    arg, val = _gmax(f, lo_b, hi_b)
    pol = _polish_max(f, lo_b, hi_b)
    if pol is not None:
        arg, val = pol, float(np.real(f(pol)))
    return float(arg), float(val)


@dataclass
class BlochReport:
    inputs: BlochInputs
    r_star: RStar
    s_star: SStar | None
    case_branch: str
    maximizer: tuple[float, float]
    rho_table: list = field(default_factory=list)
    per_s: list = field(default_factory=list)
    theta0_maximizer: tuple[float, float] | None = None

    def to_dict(self) -> dict:
        return {
            "inputs": self.inputs.to_dict(),
            "r_star": asdict(self.r_star),
            "s_star": None if self.s_star is None else asdict(self.s_star),
            "case_branch": self.case_branch,
            "maximizer": list(self.maximizer),
            "rho_table": [list(p) for p in self.rho_table],
            "per_s": [asdict(c) for c in self.per_s],
            "theta0_maximizer": None if self.theta0_maximizer is None else list(self.theta0_maximizer),
        }


def bloch_report(inp: BlochInputs, grid: int = 16, s_values=None) -> BlochReport:
    rs = r_star_details(inp)
    if inp.delta == 0:
        branch = "delta_zero"
    elif rs.branch == "degenerate":
        branch = "degenerate"
    else:
        branch = "generic"
    ss = None
    if inp.delta > 0 and inp.theta != 0:
        ss = s_star(inp)
    top = rs.value
    rr = np.linspace(top / grid, top * (1 - 1e-9) if rs.root else top, grid)
    if inp.theta == 0:
        table = [(float(r), float(rho_theta0(inp.N_theta, inp.L, r))) for r in rr]
    else:
        table = [(float(r), float(rho(inp, r))) for r in rr]
    per_s = []
    if ss is not None:
        svals = s_values if s_values is not None else sorted(
            {ss.value / 2, ss.value, (ss.value + rs.value) / 2, ss.value + 0.9 * (rs.value - ss.value)})
        per_s = [bloch_case_analysis(inp, float(s)) for s in svals]
    pa = bloch_propA1(inp.N_theta, inp.L) if inp.theta == 0 else None
    return BlochReport(inp, rs, ss, branch, maximize_rho(inp), table, per_s, pa)
