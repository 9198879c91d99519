"""Command-line front end: ``numrange {range,bounds,resolvent,bloch,geom,verify}``.

Every command writes a JSON envelope (schema ``numrange/1``) or a CSV table.
Exit codes: 0 success, 1 usage, 2 input/IO, 3 numeric failure or failed verification.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from dataclasses import asdict, is_dataclass

import numpy as np

from . import __version__
from . import bloch as bl
from . import geometry as geo
from . import suites
from .errors import NumRangeError, ParseError, ValidationError
from .growth import bound_inputs, bound_profile, detect_rigidity
from .maps import load_map_file, serialize_map
from .oracle import (DEFAULT_SEED, SAMPLES_PER_DIM, ball_extremum, deriv_bounds, numerical_radius,
                     range_stats)
from .resolvent import (fixed_point_selfmap, iterate_phi, mu_profile, nullp_radius,
                        semi_complete_interval, solve_resolvent, spectrum_check)

SCHEMA = "numrange/1"
EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 1, 2, 3
TOL_KEYS = {"solve", "phi", "margin", "domination"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- JSON encoding ----------------------------------------------------------------


def jsonable(obj):
    """Plain JSON types; non-finite floats become "inf", "-inf" or "nan"; complex becomes [re, im]."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(float(obj.real)), jsonable(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps(envelope: dict) -> str:
    return json.dumps(jsonable(envelope), sort_keys=True, indent=2, allow_nan=False) + "\n"


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    keys = list(rows[0])
    writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(row.get(k)) for k in keys})
    return buf.getvalue()


def _csv_cell(v):
    v = jsonable(v)
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return "" if v is None else v


# -- argument parsing helpers ---------------------------------------------------------


def parse_thetas(text: str | None, default=(0.0,)) -> list[float]:
    """Comma-separated angles; ``pi`` is accepted, e.g. ``0,pi/6,-pi/3``."""
    if text is None:
        return list(default)
    out = []
    for tok in text.split(","):
        tok = tok.strip().replace(" ", "")
        if not tok:
            continue
        try:
            out.append(float(eval(tok, {"__builtins__": {}}, {"pi": math.pi})))  # noqa: S307
        except Exception as exc:
            raise UsageError(f"bad angle {tok!r}") from exc
    if not out:
        raise UsageError("empty --theta list")
    return out


def parse_grid(text: str, R: float) -> list[float]:
    """``n,spacing`` with spacing cheb (Chebyshev nodes in (0, R)), log (R(1 - 2^-k)) or lin."""
    try:
        n_txt, kind = (text.split(",") + ["cheb"])[:2]
        n = int(n_txt)
    except ValueError as exc:
        raise UsageError(f"bad --r-grid {text!r}") from exc
    if n < 1:
        raise UsageError("--r-grid needs at least one radius")
    k = np.arange(n)
    if kind == "cheb":
        r = R * (1 + np.cos(np.pi * (k + 0.5) / n)[::-1]) / 2
    elif kind == "log":
        r = R * (1 - 2.0 ** -(k + 1))
    elif kind == "lin":
        r = R * (k + 1) / (n + 1)
    else:
        raise UsageError(f"unknown grid spacing {kind!r}; use cheb, log or lin")
    return [float(x) for x in r]


def parse_complex_vector(text: str) -> list[complex]:
    try:
        return [complex(t.strip().replace(" ", "")) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"bad complex vector {text!r}") from exc


def parse_tols(items) -> dict:
    out = {}
    for item in items or []:
        key, _, val = item.partition("=")
        if key not in TOL_KEYS:
            raise UsageError(f"unknown tolerance {key!r}; known: {sorted(TOL_KEYS)}")
        try:
            out[key] = float(val)
        except ValueError as exc:
            raise UsageError(f"bad tolerance value {item!r}") from exc
        if not (math.isfinite(out[key]) and out[key] > 0):
            raise UsageError(f"tolerance {key} must be positive and finite")
    return out


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="numrange", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, need_map=False):
        sp.add_argument("--map", required=need_map, help="map spec (JSON)")
        sp.add_argument("--theta", help="comma-separated angles, e.g. 0,pi/6")
        sp.add_argument("--r-grid", default="8,cheb", help="n,spacing with spacing cheb|log|lin")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--samples", type=int, default=None, help="sphere samples (default 4096*n)")
        sp.add_argument("--out", help="output path (default stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--tol", action="append", metavar="KEY=VAL", help="tolerance override")

    common(sub.add_parser("range", help="numerical-range statistics over a radius grid"), True)
    common(sub.add_parser("bounds", help="growth bounds, rigidity and semi-completeness"), True)
    rs = sub.add_parser("resolvent", help="solve lambda x - h(x) = z, null and fixed points")
    common(rs, True)
    rs.add_argument("--lambda", dest="lam", default="1", help="complex lambda")
    rs.add_argument("--z", help="comma-separated complex vector")
    rs.add_argument("--r-cap", type=float, default=None)
    rs.add_argument("--null-point", action="store_true", help="iterate Phi_lambda to the null point")
    rs.add_argument("--fixed-point", action="store_true", help="treat the map as a self-map F")
    rs.add_argument("--profile", action="store_true", help="add the mu(r) profile from the oracle")
    b = sub.add_parser("bloch", help="Bloch radii for F = I - h")
    common(b)
    b.add_argument("--stylized", help="theta,L,delta given by hand instead of --map")
    g = sub.add_parser("geom", help="starlike and spirallike radii")
    common(g)
    g.add_argument("--sweep", type=int, default=16, help="number of angles in [0, pi/2)")
    g.add_argument("--r", type=float, help="check the map on B_r")
    g.add_argument("--mu", default="1", help="complex mu for the check")
    v = sub.add_parser("verify", help="run verification suites")
    common(v)
    v.add_argument("suites", nargs="*", default=["all"],
                   help=f"suite groups: {', '.join(suites.GROUPS)} or all")
    return p


# -- commands ---------------------------------------------------------------------------


def _load(args):
    if not args.map:
        raise UsageError("--map is required")
    return load_map_file(args.map)


def _tol_kw(args, key: str, param: str = "tol") -> dict:
    """Keyword for a --tol override, or nothing so the module default applies."""
    val = getattr(args, "tolerances", {}).get(key)
    return {} if val is None else {param: val}


def _oracle_meta(h, args) -> dict:
    return {"samples": args.samples or SAMPLES_PER_DIM * h.dim, "seed": args.seed}


def cmd_range(args):
    h = _load(args)
    thetas = parse_thetas(args.theta)
    grid = parse_grid(args.r_grid, h.radius)
    rows, refine = [], 0
    for th in thetas:
        db = deriv_bounds(h, th)
        for r in grid:
            st = range_stats(h, r, th, args.samples, args.seed)
            refine += st.refine_iters
            rows.append({"theta": th, "r": r, "N_r": st.N_r, "M_r": st.M_r, "m_r": st.m_r,
                         "V_abs": st.V_abs, "W_r": st.W_r, "L_theta": db.L_theta, "l_theta": db.l_theta})
    ball = []
    for th in thetas:
        lad = ball_extremum(h, th, False, "sup", args.samples, args.seed)
        ball.append({"theta": th, "N_R": lad.value, "infinite": lad.infinite,
                     "ladder": [list(t) for t in lad.rungs]})
    meta = _oracle_meta(h, args) | {"refine_iters": refine}
    return {"table": rows, "ball": ball}, rows, meta, None


def cmd_bounds(args):
    h = _load(args)
    thetas = parse_thetas(args.theta)
    grid = parse_grid(args.r_grid, h.radius)
    per_theta, rows = [], []
    v_abs = None
    if np.linalg.norm(h.value_at_zero()) <= 1e-12:
        try:
            v_abs = numerical_radius(h, h.radius, args.samples, args.seed)
        except NumRangeError:
            v_abs = None
    for th in thetas:
        inp = bound_inputs(h, th, args.samples, args.seed)
        prof = bound_profile(inp, grid, v_abs)
        for row in prof:
            rows.append({"theta": th} | asdict(row))
        rig = detect_rigidity(h, th, samples=args.samples, seed=args.seed)
        entry = {"theta": th, "inputs": inp.to_dict(), "rigidity": asdict(rig) | {"label": rig.label}}
        if math.isfinite(inp.N_R):
            entry["semi_complete_interval"] = semi_complete_interval(inp)
            entry["mu_profile"] = mu_profile(inp)
        per_theta.append(entry)
    return {"per_theta": per_theta, "profile": rows}, rows, _oracle_meta(h, args), None


def cmd_resolvent(args):
    h = _load(args)
    try:
        lam = complex(args.lam.replace(" ", ""))
    except ValueError as exc:
        raise UsageError(f"bad --lambda {args.lam!r}") from exc
    out: dict = {"lambda": lam, "in_resolvent_set": spectrum_check(h, lam)}
    rows = []
    if args.fixed_point:
        fp = fixed_point_selfmap(h)
        out["fixed_point"] = None if fp is None else {
            "point": fp.point, "residual": fp.residual, "r1": fp.r1, "r1_nullp": fp.r1_nullp,
            "L_F": fp.L_F, "iterations": fp.trace.iterations}
        if fp is None:
            out["fixed_point_condition"] = "failed"
    elif args.null_point:
        if lam.imag != 0 or lam.real <= 0:
            raise UsageError("--null-point needs a positive real --lambda")
        tr = iterate_phi(h, lam.real, **_tol_kw(args, "phi"))
        c = float(np.linalg.norm(h.value_at_zero()))
        out["null_point"] = {"point": tr.limit, "iterations": tr.iterations, "residual": tr.null_residual,
                             "lambda_gap": tr.lambda_gap, "nullp_radius": nullp_radius(c, deriv_bounds(h).L_theta)}
        rows = [{"step": i + 1, "increment": d} for i, d in enumerate(tr.steps)]
    else:
        if args.z is None:
            raise UsageError("--z is required unless --null-point or --fixed-point is given")
        z = parse_complex_vector(args.z)
        if len(z) != h.dim:
            raise UsageError(f"--z has {len(z)} entries, map dimension is {h.dim}")
        omega_r = None
        if args.profile and args.r_cap is not None:
            from .resolvent import omega_of_r
            omega_r = omega_of_r(bound_inputs(h, 0.0, args.samples, args.seed), args.r_cap)
        tr = solve_resolvent(h, lam, z, r_cap=args.r_cap, omega_r=omega_r, **_tol_kw(args, "solve"))
        out["trace"] = {"solution": tr.solution, "iterations": tr.iterations, "residual": tr.residual,
                        "converged": tr.converged, "method": tr.method, "certified": tr.certified,
                        "residuals": tr.residuals}
        rows = [{"iteration": i, "residual": v} for i, v in enumerate(tr.residuals)]
    if args.profile:
        inp = bound_inputs(h, 0.0, args.samples, args.seed)
        if math.isfinite(inp.N_R):
            out["mu_profile"] = mu_profile(inp)
            out["semi_complete_interval"] = semi_complete_interval(inp)
    failed = None
    if "trace" in out and not out["trace"]["converged"]:
        failed = "resolvent solve did not converge"
    return out, rows, _oracle_meta(h, args), failed


def cmd_bloch(args):
    if args.stylized:
        vals = parse_thetas(args.stylized)
        if len(vals) != 3:
            raise UsageError("--stylized needs theta,L,delta")
        inp = bl.BlochInputs.stylized(*vals)
        meta = {"inputs": "stylized"}
    else:
        h = _load(args)
        inp = bl.bloch_inputs(h, parse_thetas(args.theta)[0], args.samples, args.seed)
        meta = _oracle_meta(h, args)
    n = parse_grid(args.r_grid, 1.0)
    rep = bl.bloch_report(inp, grid=max(len(n), 2))
    series = [{"r": r, "rho": v} for r, v in rep.rho_table]
    return rep.to_dict() | {"series": series}, series, meta, None


def cmd_geom(args):
    thetas = parse_thetas(args.theta, default=[float(t) for t in np.linspace(0, math.pi / 2, args.sweep,
                                                                                endpoint=False)])
    rows = []
    for th in thetas:
        rows.append({"theta": th, "starlike_radius": geo.starlike_radius(th),
                     "spiral_radius": geo.spiral_radius(th), "spiral_bisection": geo.spiral_radius_bisect(th)})
    out: dict = {"series": rows}
    if args.map:
        if args.r is None:
            raise UsageError("--r is required with --map")
        f = _load(args)
        try:
            mu = complex(args.mu.replace(" ", ""))
        except ValueError as exc:
            raise UsageError(f"bad --mu {args.mu!r}") from exc
        verdict = geo.verify_spirallike_on_ball(f, mu, args.r, args.samples, args.seed,
                                                **_tol_kw(args, "margin", "margin"))
        out["check"] = verdict
    return out, rows, {}, None


def cmd_verify(args):
    names = args.suites
    if names == ["all"]:
        names = list(suites.GROUPS)
    bad = [n for n in names if n not in suites.GROUPS]
    if bad:
        raise UsageError(f"unknown suite(s) {bad}; known: {list(suites.GROUPS)}")
    results = []
    for name in names:
        for res in suites.run_group(name, seed=args.seed, domination_tol=args.tolerances.get("domination")):
            print(f"{res.line()} ({res.elapsed:.1f}s)", file=sys.stderr)
            results.append({"group": name, "name": res.name, "ok": res.ok, "details": res.details,
                            "failures": res.failures})
    summary = {"passed": sum(r["ok"] for r in results), "total": len(results),
               "ok": all(r["ok"] for r in results)}
    rows = [{"group": r["group"], "name": r["name"], "ok": r["ok"]} for r in results]
    failed = None if summary["ok"] else "verification failed"
    return {"suites": results, "summary": summary}, rows, {}, failed


COMMANDS = {"range": cmd_range, "bounds": cmd_bounds, "resolvent": cmd_resolvent,
            "bloch": cmd_bloch, "geom": cmd_geom, "verify": cmd_verify}


def _config_echo(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("out",)}
    if getattr(args, "map", None):
        cfg["map_spec"] = serialize_map(load_map_file(args.map))
    return cfg


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("NUMRANGE_LOG", "WARNING"))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        env_seed = os.environ.get("NUMRANGE_SEED")
        if env_seed is not None:
            try:
                args.seed = int(env_seed)
            except ValueError as exc:
                raise UsageError(f"NUMRANGE_SEED must be an integer, got {env_seed!r}") from exc
        if args.seed is None:
            args.seed = DEFAULT_SEED
        args.tolerances = parse_tols(args.tol)
        payload, rows, meta, failed = COMMANDS[args.command](args)
        envelope = {"schema": SCHEMA, "tool_version": __version__, "command": args.command,
                    "config": _config_echo(args), "results": payload, "oracle": meta}
        if args.command == "verify":
            envelope["summary"] = payload["summary"]
        text = dumps(envelope) if args.format == "json" else to_csv(rows)
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        if failed:
            print(f"numrange: {failed}", file=sys.stderr)
            return EXIT_NUMERIC
        return 0
    except UsageError as exc:
        print(f"numrange: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ParseError, ValidationError) as exc:
        print(f"numrange: input error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumRangeError as exc:
        print(f"numrange: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
