"""Command-line interface: every subcommand prints one JSON report on stdout.

Exit status is 0 on success, 1 on a domain error (the report then carries
an "error" object) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
from importlib import resources

import numpy as np

from . import bloch, gluing, irrep, reconstruct, relations, solver, triangulation, variety
from .errors import InvalidCocycle, PtolemyError

SCHEMA = 1


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _jsonable(x):
    if isinstance(x, (complex, np.complexfloating)):
        return [_jsonable(x.real), _jsonable(x.imag)]
    if isinstance(x, (np.floating, float)):
        x = float(x) + 0.0  # drop negative zero
        if not math.isfinite(x):
            return str(x)
        return x
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _resolve_path(path):
    if os.path.exists(path):
        return path
    bundled = resources.files("ptolemy") / "data" / os.path.basename(path)
    if bundled.is_file():
        return str(bundled)
    return path


def _load(args):
    path = _resolve_path(args.file)
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    args._digest.update(text.encode())
    return triangulation.parse_triangulation(text)


def _sigma(tri, choice):
    if choice is None or choice == "trivial":
        return triangulation.Z2Cocycle.trivial(tri)
    if "," in choice:
        return triangulation.Z2Cocycle(tuple(int(v) for v in choice.split(",")))
    reps = triangulation.enumerate_h2(tri)
    try:
        k = int(choice)
    except ValueError:
        raise _UsageError(f"--sigma expects an index, 'trivial' or comma-separated signs, not {choice!r}")
    if not 0 <= k < len(reps):
        raise InvalidCocycle(f"sigma index {k} out of range (H^2 has {len(reps)} classes)")
    return reps[k]


def _system(args, tri, n=None):
    system = variety.generate_relations(tri, n or args.n, _sigma(tri, args.sigma))
    gauge = getattr(args, "gauge", "auto")
    if gauge == "auto":
        variety.choose_gauge(system)
    elif gauge and gauge != "none":
        variety.set_gauge(system, gauge.split(","))
    return system


def _seed(args):
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("PTOLEMY_SEED", "0"))


def _solutions(args, system):
    """Solutions from --solutions JSON when given, otherwise by multistart Newton."""
    warnings = []
    if getattr(args, "solutions", None):
        with open(args.solutions, encoding="utf-8") as fh:
            raw = fh.read()
        args._digest.update(raw.encode())
        data = json.loads(raw)
        if "outputs" in data:
            data = data["outputs"]
        out = []
        for entry in data["solutions"]:
            named = {k: complex(*v) for k, v in entry["variables"].items()}
            rep = solver.verify_solution(system, named)
            values = [named.get(nm, 1) for nm in system.names()]
            out.append(solver.PtolemySolution(tuple(system.names()), tuple(values), rep["max_residual"], "file"))
        return out, {"source": "file"}, warnings
    config = solver.SolverConfig(starts=args.starts, seed=_seed(args), tol=args.tol)
    result = solver.solve_newton_multistart(system, config)
    return list(result), result.statistics(), list(result.warnings)


def _solution_payload(sol):
    return {"variables": {n: v for n, v in zip(sol.names, sol.values)}, "residual": sol.residual}


# --- commands -----------------------------------------------------------------

def cmd_parse(args):
    tri = _load(args)
    return {
        "name": tri.name,
        "simplices": tri.simplex_count,
        "gluings": [list(map(list, row)) for row in tri.gluings],
        "signs": list(tri.signs),
        "curves": [{"label": c.label, "terms": [list(t) for t in c.terms]} for c in tri.curves],
    }, []


def cmd_classes(args):
    tri = _load(args)
    cc = tri.classes
    return {
        "counts": cc.counts(),
        "vertices": [[list(m) for m in c] for c in cc.vertex_classes],
        "edges": [[[s, list(e)] for s, e in c] for c in cc.edge_classes],
        "faces": [[list(m) for m in c] for c in cc.face_classes],
        "edge_parity": list(triangulation.check_edge_parity(tri)),
    }, []


def cmd_h2(args):
    tri = _load(args)
    reps = triangulation.enumerate_h2(tri, args.cap)
    return {"count": len(reps), "representatives": [list(r.values) for r in reps]}, []


def cmd_variety(args):
    tri = _load(args)
    args.gauge = args.gauge or "none"
    system = _system(args, tri)
    out = {
        "n": system.n,
        "sigma": list(system.sigma.values),
        "variables": system.names(),
        "gauge": system.gauge_names(),
        "relations": len(system.relations),
        "action_rank": variety.action_rank(system),
    }
    if args.export:
        fmt = {"ideal": "text"}.get(args.export, args.export)
        text = variety.export_ideal(system, fmt)
        out["format"] = fmt
        out["export"] = json.loads(text) if fmt in ("json", "structured-json") else text
    return out, []


def cmd_solve(args):
    tri = _load(args)
    system = _system(args, tri)
    sols, stats, warnings = _solutions(args, system)
    return {
        "n": system.n,
        "sigma": list(system.sigma.values),
        "gauge": system.gauge_names(),
        "statistics": stats,
        "solutions": [_solution_payload(s) for s in sols],
    }, warnings


def cmd_volumes(args):
    tri = _load(args)
    system = _system(args, tri)
    sols, stats, warnings = _solutions(args, system)
    psl = True if args.psl else None
    rows = []
    for sol in sols:
        el = bloch.lambda_element(system, list(sol.values), psl=psl)
        cv = bloch.complex_volume(el)
        rows.append({"complex_volume": cv.value, "modulus": cv.modulus})
    return {"n": system.n, "sigma": list(system.sigma.values), "statistics": stats, "volumes": rows}, warnings


def cmd_reconstruct(args):
    tri = _load(args)
    system = _system(args, tri)
    sols, stats, warnings = _solutions(args, system)
    rows = []
    for sol in sols:
        per_simplex = []
        for s in range(tri.simplex_count):
            c = reconstruct.simplex_coordinates(system, list(sol.values), s)
            _, rep = reconstruct.reconstruct_and_verify(c, system.n, system.sigma.on_simplex(tri, s))
            per_simplex.append({
                "simplex": s,
                "round_trip_error": rep["round_trip_error"],
                "max_face_error": max(rep["face_errors"].values()),
            })
        rows.append(per_simplex)
    return {"n": system.n, "statistics": stats, "reconstructions": rows}, warnings


def cmd_phin(args):
    tri = _load(args)
    system = _system(args, tri, n=2)
    sols, stats, warnings = _solutions(args, system)
    rows = []
    for sol in sols:
        rep = irrep.scaling_check(system, list(sol.values), args.n)
        rows.append({k: v for k, v in rep.items() if k not in ("values", "system")})
    return {"n": args.n, "statistics": stats, "results": rows}, warnings


def cmd_gluing(args):
    tri = _load(args)
    system = _system(args, tri, n=2)
    sols, stats, warnings = _solutions(args, system)
    edge_eqs = gluing.edge_equations(tri)
    rows = []
    for sol in sols:
        shapes = gluing.cross_ratios(system, list(sol.values))
        ev = gluing.evaluate_equations(edge_eqs, shapes, tri.signs)
        cusp = {c.label: gluing.cusp_equation_eval(tri, c.label, shapes) for c in tri.curves}
        rows.append({"shapes": list(shapes.shapes), "edge_products": ev["products"],
                     "edge_passed": ev["passed"], "cusp_products": cusp})
    return {"statistics": stats, "equations": [list(map(list, e.terms)) for e in edge_eqs],
            "results": rows}, warnings


def _complex_arg(text):
    parts = text.split(",")
    if len(parts) == 1:
        return (parts[0].strip(), "0")
    if len(parts) == 2:
        return (parts[0].strip(), parts[1].strip())
    raise _UsageError(f"expected 're' or 're,im', not {text!r}")


def cmd_relation(args):
    target = _complex_arg(args.target)
    basis = [_complex_arg(b) for b in args.basis]
    args._digest.update(json.dumps([target, basis]).encode())
    scale = int(float(args.scale))
    if args.real_only:
        q = relations.RelationQuery(target[0], tuple(b[0] for b in basis), args.bound, scale)
        coeffs = relations.find_integer_relation(q)
        return {"coefficients": list(coeffs) if coeffs else None}, []
    rel = relations.find_complex_relation(
        target, basis, args.bound, scale, modulus=args.modulus * math.pi**2, tol=args.imag_tol
    )
    if rel is None:
        return {"coefficients": None}, []
    return {
        "coefficients": list(rel.coefficients),
        "pi2_fraction": [rel.pi2_numerator, rel.pi2_denominator],
        "real_residual": rel.real_residual,
        "imag_residual": rel.imag_residual,
        "description": rel.describe(),
    }, []


def cmd_check(args):
    tri = _load(args)
    system = _system(args, tri)
    sols, stats, warnings = _solutions(args, system)
    rows = []
    edge_eqs = gluing.edge_equations(tri) if system.n == 2 else None
    for sol in sols:
        values = list(sol.values)
        rep = solver.verify_solution(system, values)
        sums = bloch.edge_log_sums(system, values)
        row = {
            "max_residual": rep["max_residual"],
            "relations_passed": rep["passed"],
            "max_edge_log_sum": max((abs(v) for _, v in sums), default=0.0),
            "lift_spread": bloch.lift_perturbation_spread(system, values, seed=_seed(args)),
        }
        worst = 0.0
        for s in range(tri.simplex_count):
            c = reconstruct.simplex_coordinates(system, values, s)
            _, r = reconstruct.reconstruct_and_verify(c, system.n, system.sigma.on_simplex(tri, s))
            worst = max(worst, r["round_trip_error"], *r["face_errors"].values())
        row["reconstruction_error"] = worst
        if edge_eqs is not None:
            shapes = gluing.cross_ratios(system, values)
            row["gluing_max_error"] = max(gluing.evaluate_equations(edge_eqs, shapes, tri.signs)["errors"],
                                          default=0.0)
        row["passed"] = bool(
            row["relations_passed"]
            and row["max_edge_log_sum"] < 1e-10
            and row["lift_spread"] < 1e-9
            and row.get("gluing_max_error", 0.0) < 1e-9
        )
        rows.append(row)
    return {"statistics": stats, "results": rows, "passed": all(r["passed"] for r in rows)}, warnings


# --- parser -------------------------------------------------------------------

def _solve_flags(p, n_default=2):
    p.add_argument("file")
    p.add_argument("--n", type=int, default=n_default)
    p.add_argument("--sigma", default="trivial")
    p.add_argument("--gauge", default="auto", help="auto, none, or comma-separated variable names")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--starts", type=int, default=2000)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--solutions", help="solution JSON written by 'solve'")


def build_parser():
    parser = _Parser(prog="ptolemy", description="Ptolemy varieties and complex volumes")
    parser.add_argument("--timing", action="store_true", help="include wall-clock timing in the report")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    for name, fn in (("parse", cmd_parse), ("classes", cmd_classes)):
        p = sub.add_parser(name)
        p.add_argument("file")
        p.set_defaults(func=fn)
    p = sub.add_parser("h2")
    p.add_argument("file")
    p.add_argument("--cap", type=int, default=triangulation.DEFAULT_H2_CAP)
    p.set_defaults(func=cmd_h2)

    p = sub.add_parser("variety")
    p.add_argument("file")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--sigma", default="trivial")
    p.add_argument("--gauge", default=None, help="none (default), auto, or comma-separated names")
    p.add_argument("--export", default=None)
    p.set_defaults(func=cmd_variety)

    for name, fn in (("solve", cmd_solve), ("reconstruct", cmd_reconstruct), ("check", cmd_check)):
        p = sub.add_parser(name)
        _solve_flags(p)
        p.set_defaults(func=fn)
    p = sub.add_parser("volumes")
    _solve_flags(p)
    p.add_argument("--psl", action="store_true", help="reduce modulo pi^2 even for trivial sigma")
    p.set_defaults(func=cmd_volumes)
    p = sub.add_parser("phin")
    _solve_flags(p, n_default=3)
    p.set_defaults(func=cmd_phin)
    p = sub.add_parser("gluing")
    _solve_flags(p)
    p.set_defaults(func=cmd_gluing)

    p = sub.add_parser("relation")
    p.add_argument("--target", required=True, help="re or re,im")
    p.add_argument("--basis", required=True, action="append", help="re or re,im (repeatable)")
    p.add_argument("--bound", type=int, default=1000)
    p.add_argument("--scale", default="1e8")
    p.add_argument("--modulus", type=float, default=4.0, help="imaginary period in units of pi^2")
    p.add_argument("--imag-tol", type=float, default=1e-7)
    p.add_argument("--real-only", action="store_true")
    p.set_defaults(func=cmd_relation)
    return parser


def _emit(report, stream):
    stream.write(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n")


def run(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise _UsageError("missing subcommand")
    except _UsageError as exc:
        sys.stderr.write(f"{parser.prog}: error: {exc}\n")
        return 2
    args._digest = hashlib.sha256(" ".join(argv if argv is not None else sys.argv[1:]).encode())
    report = {"schema": SCHEMA, "command": args.command}
    start = time.perf_counter()
    try:
        outputs, warnings = args.func(args)
    except _UsageError as exc:
        sys.stderr.write(f"{parser.prog}: error: {exc}\n")
        return 2
    except PtolemyError as exc:
        report["inputs_digest"] = args._digest.hexdigest()
        report["error"] = exc.to_dict()
        _emit(report, stdout)
        return 1
    except (OSError, ValueError) as exc:
        report["inputs_digest"] = args._digest.hexdigest()
        report["error"] = {"type": type(exc).__name__, "code": "bad_input", "message": str(exc)}
        _emit(report, stdout)
        return 1
    report["inputs_digest"] = args._digest.hexdigest()
    report["outputs"] = outputs
    report["warnings"] = warnings
    if args.timing:
        report["timing"] = {"seconds": time.perf_counter() - start}
    _emit(report, stdout)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
