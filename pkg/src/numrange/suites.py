"""Seeded verification suites; each returns a ``SuiteResult`` with per-check details."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import bloch as bl
from . import geometry as geo
from .growth import BoundInputs, bound_F, bound_F1, detect_rigidity
from .maps import BallDomain, BuiltinMap, PolyMap, random_polymap
from .oracle import (DEFAULT_SEED, ball_extremum, check_dissipative, deriv_bounds, estimate_NR,
                     ladder_radii, sphere_pairing_multi)
from .resolvent import (ROOT_AGREEMENT, iterate_phi, mu_profile_params, mu_value, nullp_radius,
                        omega_of_r, solve_resolvent, verify_key_domain)
from .scalar import run_scalar_suite

log = logging.getLogger(__name__)

DOMINATION_TOL = 1e-6
BOUNDARY_LIMIT_TOL = 1e-2
SUITE_THETAS = (0.0, math.pi / 6, -math.pi / 6, math.pi / 3, -math.pi / 3)


@dataclass
class SuiteResult:
    name: str
    ok: bool
    details: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    elapsed: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}"


def _timed(name: str, fn) -> SuiteResult:
    t0 = time.perf_counter()
    res = fn()
    res.name = name
    res.elapsed = time.perf_counter() - t0
    return res


# -- 1: the worked Bloch example -------------------------------------------------


def bloch_example() -> SuiteResult:
    inp = bl.BlochInputs.stylized(math.pi / 3, 0.0, 1.0)
    rs = bl.r_star_details(inp)
    ss = bl.s_star(inp)
    r0, rho0 = bl.maximize_rho(inp)
    target = 2 - math.sqrt(3)
    checks = {
        "r_star_closed": rs.closed_form == 0.5,
        "r_star_bisection": abs(rs.bisection - 0.5) <= 1e-10,
        "s_star": abs(ss.value - target) <= 1e-10,
        "rho_s_star": abs(ss.rho_value - target / 2) <= 1e-10,
        "argmax": abs(r0 - target) <= 1e-8,
    }
    details = {"r_star": rs.value, "r_star_bisection": rs.bisection, "s_star": ss.value,
               "rho_s_star": ss.rho_value, "r0": r0, "rho0": rho0, "checks": checks}
    return SuiteResult("bloch_example", all(checks.values()), details,
                       [k for k, v in checks.items() if not v])


# -- 2, 3: geometric radii and sharpness ---------------------------------------------


def geometric_radii(n_theta: int = 50) -> SuiteResult:
    thetas = np.linspace(-1.5, 1.5, n_theta)
    gaps = [abs(geo.spiral_radius(t) - geo.spiral_radius_bisect(t)) for t in thetas]
    checks = {
        "starlike_pi4": abs(geo.starlike_radius(math.pi / 4) - 1 / math.sqrt(2)) <= 1e-12,
        "starlike_0": abs(geo.starlike_radius(0.0) - 1.0) <= 1e-15,
        "spiral_0": geo.spiral_radius(0.0) == 1.0,
        "spiral_bisection": max(gaps) <= 1e-10,
    }
    return SuiteResult("geometric_radii", all(checks.values()),
                       {"max_bisection_gap": max(gaps), "checks": checks},
                       [k for k, v in checks.items() if not v])


def sharpness(thetas=(math.pi / 6, math.pi / 4, math.pi / 3), dim: int = 1,
              samples: int | None = None, seed: int = DEFAULT_SEED) -> SuiteResult:
    rows, fails = [], []
    dom = BallDomain(dim, 1.0)
    f0 = BuiltinMap(dom, "spiral_ref", 0.0)
    for th in thetas:
        f = BuiltinMap(dom, "spiral_ref", th)
        rs = geo.starlike_radius(th)
        below = geo.verify_spirallike_on_ball(f, 1.0, 0.99 * rs, samples, seed)
        above = geo.verify_spirallike_on_ball(f, 1.0, 1.01 * rs, samples, seed)
        mu = complex(math.cos(th), math.sin(th))
        rsp = geo.spiral_radius(th)
        sp_below = geo.verify_spirallike_on_ball(f0, mu, 0.99 * rsp, samples, seed)
        sp_above = geo.verify_spirallike_on_ball(f0, mu, 1.01 * rsp, samples, seed)
        ok = below.ok and not above.ok and sp_below.ok and not sp_above.ok
        rows.append({"theta": th, "starlike_radius": rs, "margin_below": below.worst_margin,
                     "margin_above": above.worst_margin, "spiral_radius": rsp,
                     "spiral_margin_below": sp_below.worst_margin,
                     "spiral_margin_above": sp_above.worst_margin, "ok": ok})
        if not ok:
            fails.append(th)
    return SuiteResult("sharpness", not fails, {"rows": rows}, fails)


# -- 4: scalar corpus --------------------------------------------------------------


def scalar_corpus(seed: int = DEFAULT_SEED, trials: int = 200) -> SuiteResult:
    res = run_scalar_suite(seed=seed, trials=trials)
    worst = {k: {"max_violation": v.max_violation, "n_points": v.n_points} for k, v in sorted(res.worst.items())}
    fails = [k for k, v in res.worst.items() if not v.ok]
    return SuiteResult("scalar_corpus", res.ok, {"trials": trials, "worst": worst}, fails)


# -- 5: vector bound domination --------------------------------------------------------


def domination_map(rng: np.random.Generator, dim: int) -> PolyMap:
    degree = int(rng.integers(2, 5))
    return random_polymap(rng, dim, degree, terms=3, scale=float(rng.uniform(0.2, 1.0)))


def domination(seed: int = DEFAULT_SEED, count: int = 100, grid: int = 8,
               samples: int | None = None, thetas=SUITE_THETAS,
               tol: float = DOMINATION_TOL) -> SuiteResult:
    rng = np.random.default_rng(seed)
    radii = [float(r) for r in (1 + np.cos(np.pi * (np.arange(grid) + 0.5) / grid)[::-1]) / 2]
    r_k = 1 - 2.0 ** -12
    worst_F = worst_F1 = worst_boundary_gap = -math.inf
    fails = []
    for i in range(count):
        dim = int(rng.integers(1, 4))
        h = domination_map(rng, dim)
        all_r = radii + ladder_radii(1.0) + [1.0]
        res0 = sphere_pairing_multi(h, all_r, 0.0, False, "sup", samples, DEFAULT_SEED)
        vals = [x.value for x in res0]
        N_r = vals[:grid]
        N_R = max(0.0, max(vals))
        d0 = deriv_bounds(h, 0.0)
        h0 = float(np.linalg.norm(h.value_at_zero()))
        base = BoundInputs(R=1.0, N_R=N_R, N_R_theta=N_R, theta=0.0, h0_norm=h0, L=d0.L_theta,
                           l_theta=d0.l_theta, L_theta=d0.L_theta)
        gF = max(n - bound_F(base, r) for n, r in zip(N_r, radii))
        gF1 = -math.inf
        for th in thetas:
            if th == 0.0:
                inp = base
            else:
                dt = deriv_bounds(h, th)
                inp = BoundInputs(R=1.0, N_R=N_R, N_R_theta=estimate_NR(h, th, samples), theta=th,
                                  h0_norm=h0, L=d0.L_theta, l_theta=dt.l_theta, L_theta=dt.L_theta)
            gF1 = max(gF1, max(n - bound_F1(inp, r) for n, r in zip(N_r, radii)))
        gel = abs(bound_F(base, r_k) - N_R) / max(1.0, abs(N_R))
        worst_F, worst_F1, worst_boundary_gap = max(worst_F, gF), max(worst_F1, gF1), max(worst_boundary_gap, gel)
        if gF > tol or gF1 > tol or gel > BOUNDARY_LIMIT_TOL:
            fails.append({"map": i, "dim": dim, "gap_F": gF, "gap_F1": gF1, "boundary_gap": gel})
    details = {"count": count, "grid": radii, "worst_gap_F": worst_F, "worst_gap_F1": worst_F1,
               "worst_boundary_gap": worst_boundary_gap}
    return SuiteResult("domination", not fails, details, fails)


def rigidity_examples(samples: int | None = None) -> SuiteResult:
    one = BallDomain(1, 1.0)
    rigid = PolyMap(one, ((((1,), 1.0), ((2,), 1e-12)),))
    loose = PolyMap(one, ((((1,), 1.0), ((2,), 0.5)),))
    a = detect_rigidity(rigid, samples=samples)
    b = detect_rigidity(loose, samples=samples)
    ok = a.rigid and a.consistent and not b.rigid
    return SuiteResult("rigidity", ok, {"near_affine": a.label, "quadratic": b.label})


# -- 6: null points and certified solves ---------------------------------------------------


def dissipative_map(rng: np.random.Generator, dim: int) -> PolyMap:
    """c + (-alpha I + i S) x + small quadratic, scaled so that L + 4||c|| < 0 and h is dissipative."""
    alpha = float(rng.uniform(0.5, 1.5))
    s = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    herm = (s + s.conj().T) / 2
    a = -alpha * np.eye(dim) + 1j * 0.3 * herm
    c = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    c *= float(rng.uniform(0.02, 0.2)) * alpha / np.linalg.norm(c)
    eps = float(rng.uniform(0.0, 0.2)) * alpha / dim
    comps = []
    for k in range(dim):
        comp = [((0,) * dim, complex(c[k]))]
        for j in range(dim):
            idx = [0] * dim
            idx[j] = 1
            comp.append((tuple(idx), complex(a[k, j])))
        idx = [0] * dim
        idx[int(rng.integers(dim))] += 1
        idx[int(rng.integers(dim))] += 1
        comp.append((tuple(idx), complex(*rng.uniform(-1, 1, 2)) * eps))
        comps.append(tuple(comp))
    return PolyMap(BallDomain(dim, 1.0), tuple(comps))


def null_points(seed: int = DEFAULT_SEED, count: int = 20, solves_per_map: int = 5,
                samples: int | None = None) -> SuiteResult:
    rng = np.random.default_rng(seed)
    rows, fails = [], []
    cert_total = cert_fail = 0
    made = 0
    while made < count:
        dim = int(rng.integers(1, 4))
        h = dissipative_map(rng, dim)
        c = float(np.linalg.norm(h.value_at_zero()))
        L = deriv_bounds(h, 0.0).L_theta
        if not L + 4 * c < 0 or not check_dissipative(h, 0.0, samples=samples).dissipative:
            continue
        made += 1
        bound = nullp_radius(c, L)
        row = {"map": made, "dim": dim, "h0_norm": c, "L": L, "nullp_radius": bound}
        try:
            tr = iterate_phi(h, 1.0)
            row.update(norm=float(np.linalg.norm(tr.limit)), residual=tr.null_residual,
                       lambda_gap=tr.lambda_gap, iterations=tr.iterations)
            ok = (tr.null_residual <= 1e-9 and row["norm"] <= bound + 1e-6 and tr.lambda_gap <= 1e-8)
        except Exception as exc:  # a failed map is reported, not raised
            row["error"] = repr(exc)
            ok = False
        # certified solves ||z|| + omega(r) < r Re(lambda)
        N_R = estimate_NR(h, 0.0, samples)
        d0 = deriv_bounds(h, 0.0)
        inp = BoundInputs(R=1.0, N_R=N_R, N_R_theta=N_R, theta=0.0, h0_norm=c, L=L,
                          l_theta=d0.l_theta, L_theta=L)
        for _ in range(solves_per_map):
            lam = complex(rng.uniform(0.2, 3.0), rng.uniform(-2, 2))
            r = float(rng.uniform(0.1, 0.95))
            slack = r * lam.real - omega_of_r(inp, r)
            if slack <= 0:
                continue
            z = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
            z *= 0.95 * float(rng.uniform(0, 1)) * slack / np.linalg.norm(z)
            st = solve_resolvent(h, lam, z, r_cap=r, omega_r=omega_of_r(inp, r))
            cert_total += 1
            if not (st.converged and st.certified and np.linalg.norm(st.solution) < r):
                cert_fail += 1
                ok = False
        row["ok"] = ok
        rows.append(row)
        if not ok:
            fails.append(made)
    # the worked example
    w = iterate_phi(PolyMap.affine([[-1.0]], [0.05]), 1.0)
    worked = (abs(w.limit[0] - 0.05) <= 1e-10 and abs(nullp_radius(0.05, -1.0) - (9 - math.sqrt(80))) <= 1e-12)
    if not worked:
        fails.append("worked_example")
    details = {"maps": rows, "certified_solves": cert_total, "certified_failures": cert_fail,
               "worked_example": {"x0": float(w.limit[0].real), "r1": nullp_radius(0.05, -1.0)}}
    return SuiteResult("null_points", not fails, details, fails)


# -- 7: cubic root formulas ------------------------------------------------------------


def admissible_tuple(rng: np.random.Generator) -> tuple[float, float, float, float]:
    """(R, L, b, c) with R(b - L) > 4c, mu(r_*) < 0 and both zeros of mu inside (0, R)."""
    while True:
        R = float(rng.uniform(0.5, 2.0))
        L = float(rng.uniform(-2.0, 0.5))
        b = float(rng.uniform(max(L, 0.0), max(L, 0.0) + 5.0))
        c = float(rng.uniform(0.0, 1.0)) * R * (b - L) / 4
        if c <= 0:
            continue
        p = mu_profile_params(R, L, b, c)
        if p.roots is not None and p.roots[1] < R:
            return R, L, b, c


def root_formulas(seed: int = DEFAULT_SEED, count: int = 50) -> SuiteResult:
    rng = np.random.default_rng(seed)
    rows, fails = [], []
    logged = 0
    for _ in range(count):
        R, L, b, c = admissible_tuple(rng)
        p = mu_profile_params(R, L, b, c)
        resid = max(abs(float(mu_value(R, L, b, c, r))) for r in p.roots)
        agree = p.discrepancy <= ROOT_AGREEMENT
        if not agree:
            logged += 1
            log.info("root discrepancy %.3e at R=%g L=%g b=%g c=%g", p.discrepancy, R, L, b, c)
        ok = agree or (bool(p.notes) and resid <= 1e-10)
        rows.append({"R": R, "L": L, "b": b, "c": c, "roots": list(p.roots),
                     "closed": list(p.roots_closed) if p.roots_closed else None,
                     "discrepancy": p.discrepancy, "mu_residual": resid, "ok": ok})
        if not ok:
            fails.append(rows[-1])
    return SuiteResult("root_formulas", not fails, {"tuples": rows, "logged_discrepancies": logged}, fails)


# -- 8: Bloch pairs ---------------------------------------------------------------------


def bloch_map(rng: np.random.Generator) -> PolyMap:
    """h(z) = a1 z + a2 z^2 + a3 z^3 on the unit disc with Re a1 < 1."""
    a1 = complex(rng.uniform(-1.0, 0.5), rng.uniform(-1, 1))
    a2, a3 = (complex(*rng.uniform(-1, 1, 2)) * 0.5 for _ in range(2))
    return PolyMap(BallDomain(1, 1.0), ((((1,), a1), ((2,), a2), ((3,), a3)),))


def bloch_pairs(seed: int = DEFAULT_SEED, count: int = 20, targets: int = 100,
                samples: int | None = None) -> SuiteResult:
    rng = np.random.default_rng(seed)
    rows, fails = [], []
    for i in range(count):
        h = bloch_map(rng)
        theta = float(rng.uniform(math.pi / 8, 3 * math.pi / 8)) * float(rng.choice([-1, 1]))
        inp = bl.bloch_inputs(h, theta, samples)
        rs = bl.r_star(inp)
        if inp.delta > 0:
            s = float(rng.uniform(0.1, 0.9)) * rs
            case = bl.bloch_case_analysis(inp, s)
            r, rad = case.argmax, float(bl.rho_s(inp, s, case.argmax))
        else:
            r, rad = 0.9, 0.9 * (1 - inp.L)
        hits = misses = 0
        worst_res = 0.0
        for _ in range(targets):
            z = rad * math.sqrt(rng.uniform()) * complex(math.cos(a := rng.uniform(0, 2 * math.pi)), math.sin(a))
            z *= 1 - 1e-9
            tr = solve_resolvent(h, 1.0, [z], r_cap=r, tol=1e-10 / (1 + abs(z)))
            x = tr.solution[0]
            worst_res = max(worst_res, tr.residual)
            if tr.converged and abs(x) < r and tr.residual <= 1e-10:
                hits += 1
            else:
                misses += 1
        rows.append({"map": i, "theta": theta, "delta": inp.delta, "r_star": rs, "r": r, "rho": rad,
                     "hits": hits, "misses": misses, "worst_residual": worst_res})
        if misses:
            fails.append(i)
    return SuiteResult("bloch_pairs", not fails, {"maps": rows}, fails)


# -- 9: key domain ------------------------------------------------------------------------


def key_domain_check(radii=(0.3, 0.6, 0.9), lambdas: int = 64) -> SuiteResult:
    h = PolyMap(BallDomain(1, 1.0), ((((1,), -1.0), ((2,), 0.25)),))
    rows, fails = [], []
    for r in radii:
        rep = verify_key_domain(h, r, lambdas)
        rows.append({"r": r, "disc_radius": rep.domain.disc_radius,
                     "sector_half_angle": rep.domain.sector_half_angle,
                     "max_norm": rep.max_norm, "failures": rep.failures})
        if not rep.ok:
            fails.append(r)
    return SuiteResult("key_domain", not fails, {"rows": rows}, fails)


# -- registry ---------------------------------------------------------------------------------


ACCEPTANCE = {
    1: ("bloch_example", bloch_example),
    2: ("geometric_radii", geometric_radii),
    3: ("sharpness", sharpness),
    4: ("scalar_corpus", scalar_corpus),
    5: ("domination", domination),
    6: ("null_points", null_points),
    7: ("root_formulas", root_formulas),
    8: ("bloch_pairs", bloch_pairs),
    9: ("key_domain", key_domain_check),
}

GROUPS = {
    "scalar": (4,),
    "growth": (5,),
    "resolvent": (6, 7, 9),
    "bloch": (1, 8),
    "geom": (2, 3),
}


def run_acceptance(number: int, **kw) -> SuiteResult:
    name, fn = ACCEPTANCE[number]
    return _timed(name, lambda: fn(**kw))


def run_group(group: str, seed: int = DEFAULT_SEED, domination_tol: float | None = None) -> list[SuiteResult]:
    out = []
    for k in GROUPS[group]:
        name, fn = ACCEPTANCE[k]
        kw = {"seed": seed} if "seed" in fn.__code__.co_varnames else {}
        if fn is domination and domination_tol is not None:
            kw["tol"] = domination_tol
        out.append(_timed(name, lambda fn=fn, kw=kw: fn(**kw)))
    if group == "growth":
        out.append(_timed("rigidity", rigidity_examples))
    return out
