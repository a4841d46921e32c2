"""Command-line front end: ``period-engine <command> ...``.

Exit status is 0 on success, 2 for malformed input, 3 when a mathematical
precondition fails and 1 for anything unexpected; errors are also written to
stderr as a JSON object.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import MathError, SchemaError

MIN_ORDER = 4
MIN_PRECISION = 16


# ---------------------------------------------------------------------------
# input helpers


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise SchemaError(f"no such file: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from exc


def _operator(ref: str):
    from .diffop import ThetaOperator
    from .fixtures import OPERATORS, load_operator

    if not os.path.exists(ref) and ref in OPERATORS:
        return load_operator(ref)
    return ThetaOperator.from_dict(_load_json(ref))


def _polytope(ref: str):
    from .fixtures import POLYTOPES, load_polytope
    from .toric2d import LatticePolytope2D

    if not os.path.exists(ref) and ref in POLYTOPES:
        return load_polytope(ref)
    return LatticePolytope2D.from_dict(_load_json(ref))


def _point_arg(text: str):
    from .diffop import INFINITY
    from .series import as_rational

    if text in ("infinity", "inf", "oo"):
        return INFINITY
    return as_rational(text)


def _substitution(text: str):
    from .diffop import Substitution

    kind, _, rest = text.partition(":")
    params = [p for p in rest.split(",") if p.strip()] if rest else []
    if kind == "reciprocal" and not params:
        return Substitution.reciprocal()
    if kind == "affine" and len(params) == 2:
        return Substitution.affine(*params)
    if kind == "polynomial" and params:
        return Substitution.polynomial(params)
    raise SchemaError(f"bad substitution {text!r}; use affine:a,b | reciprocal | polynomial:c0,c1,...")


def _order(args) -> int:
    if args.order < MIN_ORDER:
        raise SchemaError(f"--order must be at least {MIN_ORDER}")
    return args.order


def _precision(args) -> int:
    from .continuation import default_digits

    digits = args.precision if args.precision is not None else default_digits()
    if digits < MIN_PRECISION:
        raise SchemaError(f"precision must be at least {MIN_PRECISION} digits")
    return digits


def _gauge(args, default=1):
    from .series import as_rational

    if args.gauge_shift is None:
        return default
    g = as_rational(args.gauge_shift)
    if g <= 0:
        raise SchemaError("--gauge-shift must be positive")
    return g


# ---------------------------------------------------------------------------
# commands


def cmd_frobenius(args):
    from .frobenius import frobenius_basis

    L = _operator(args.op)
    basis = frobenius_basis(L, _point_arg(args.point), _order(args))
    return {
        "point": str(basis.point),
        "indicial_roots": [[str(r), m] for r, m in basis.groups],
        "solutions": basis.to_list(),
    }


def cmd_mirror_map(args):
    from .mirror import mirror_map

    return mirror_map(_operator(args.op), _order(args), _gauge(args)).to_dict()


def cmd_yukawa(args):
    from .mirror import yukawa_flat

    L = _operator(args.op)
    y = yukawa_flat(L, _order(args), _gauge(args))
    return {"algebraic": y.algebraic.to_dict(), "flat": y.flat.to_dict(),
            "expression": y.algebraic.render(L.var)}


def cmd_prepotential(args):
    from .mirror import prepotential_from_yukawa
    from .series import TruncatedSeries, as_rational

    data = _load_json(args.input)
    if isinstance(data, dict) and "flat" in data:
        data = data["flat"]
    C = TruncatedSeries.from_dict(data)
    kappa = as_rational(args.kappa) if args.kappa is not None else C.coefficient(0)
    return prepotential_from_yukawa(C, kappa).to_dict()


def cmd_symsq(args):
    from .diffop import is_symmetric_square, symmetric_square

    L = _operator(args.op)
    if args.construct:
        return symmetric_square(L.to_deriv()).to_theta(L.var).to_dict()
    witness = is_symmetric_square(L)
    if witness is None:
        return {"symmetric_square": False}
    return {"symmetric_square": True, "witness": witness.to_theta(L.var).to_dict()}


def cmd_pullback(args):
    from .diffop import pullback

    L = _operator(args.op)
    return pullback(L, _substitution(args.subst)).to_dict()


def _path(args, digits):
    from .continuation import PathPolyline

    data = _load_json(args.input)
    if isinstance(data, dict) and "precision_digits" not in data:
        data = dict(data, precision_digits=digits)
    path = PathPolyline.from_dict(data)
    if args.precision is not None and path.precision_digits != digits:
        path = PathPolyline(path.vertices, digits, path.clearance)
    return path


def cmd_monodromy(args):
    from .continuation import Monodromy, expected_determinant, loop_around, make_context, monodromy

    digits = _precision(args)
    L = _operator(args.op)
    point = _point_arg(args.point)
    if args.input:
        loop = _path(args, digits)
    else:
        loop = loop_around(L, point if args.around is None else _point_arg(args.around), digits=digits)
    m = monodromy(L, loop, point)
    if args.around is not None:
        ctx = make_context(digits)
        m = Monodromy(m.matrix, m.point, m.digits, expected_determinant(L, _point_arg(args.around), ctx))
    out = m.to_dict()
    out["loop"] = loop.to_dict()
    return out


def cmd_fricke_check(args):
    import mpmath

    from .continuation import fricke_residual
    from .mirror import integral_scale, mirror_map
    from .series import as_rational

    digits = _precision(args)
    L = _operator(args.op)
    gauge = _gauge(args, None)
    if gauge is None:
        gauge = integral_scale(mirror_map(L, 20).holomorphic_period)
    alphas = [as_rational(a) for a in (args.alpha or ["1/5", "1/3", "2/5"])]
    product = as_rational(args.product)
    rows = []
    for a in alphas:
        r = fricke_residual(L, a, digits, gauge, product)
        rows.append({"alpha": str(a), "residual": mpmath.nstr(r, 5)})
    return {"gauge_shift": str(gauge), "product": str(product), "precision_digits": digits, "checks": rows}


def cmd_cayley(args):
    from .continuation import PathPolyline, cayley_fixed_point
    from .identities import CAYLEY_PATHS
    from .mirror import integral_scale, mirror_map

    digits = _precision(args)
    L = _operator(args.op)
    path = _path(args, digits) if args.input else PathPolyline(CAYLEY_PATHS[0], digits)
    gauge = _gauge(args, None)
    if gauge is None:
        gauge = integral_scale(mirror_map(L, 20).holomorphic_period)
    c = cayley_fixed_point(L, path, gauge)
    out = c.to_dict()
    out["gauge_shift"] = str(gauge)
    out["path"] = path.to_dict()
    return out


def cmd_toric(args):
    from .toric2d import anticanonical_sections, polar_dual

    P = _polytope(args.input)
    if args.action == "polar":
        return polar_dual(P).to_dict()
    if args.action == "points":
        pts = P.lattice_points()
        return {"count": len(pts), "points": [list(p) for p in pts]}
    rays = None
    if args.rays:
        try:
            rays = [tuple(r) for r in json.loads(args.rays)]
        except (json.JSONDecodeError, TypeError) as exc:
            raise SchemaError(f"--rays must be a JSON list of pairs: {exc}") from exc
    secs = anticanonical_sections(P, rays)
    return {"count": len(secs), "sections": [s.to_dict() for s in secs]}


def cmd_identity_suite(args):
    from .identities import CHECKS, run

    names = args.name or list(CHECKS)
    for n in names:
        if n not in CHECKS:
            raise SchemaError(f"unknown identity {n!r}; choose from {', '.join(CHECKS)}")
    results = run(names)
    return {"results": [r.to_dict() for r in results], "passed": sum(r.passed for r in results),
            "total": len(results), "_lines": [r.line() for r in results]}


# ---------------------------------------------------------------------------
# output


def _flatten(prefix: str, value, rows: list):
    if isinstance(value, dict):
        for k, v in value.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, rows)
    elif isinstance(value, list) and value and all(isinstance(v, (str, int)) for v in value):
        rows.append((prefix, ",".join(str(v) for v in value)))
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _flatten(f"{prefix}.{i}", v, rows)
    else:
        rows.append((prefix, "" if value is None else str(value).lower() if isinstance(value, bool) else str(value)))


def render(result: dict, fmt: str) -> str:
    result = {k: v for k, v in result.items() if not k.startswith("_")}
    if fmt == "json":
        return json.dumps(result, indent=2) + "\n"
    rows: list = []
    _flatten("", result, rows)
    return "".join(f"{k}\t{v}\n" for k, v in rows)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="period-engine", description="Exact period computations for one-parameter families.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, op=True, inp=False, order=False, precision=False, gauge=False):
        if op:
            sp.add_argument("--op", required=True, help="operator JSON file or bundled name (lpf, lk3, ltri, lelliptic, le8)")
        if inp:
            sp.add_argument("--in", dest="input", required=inp == "required", help="input JSON file")
        if order:
            sp.add_argument("--order", type=int, default=20, help="series order (default 20)")
        if precision:
            sp.add_argument("--precision", type=int, default=None, help="working digits (default $PERIOD_ENGINE_PRECISION or 50)")
        if gauge:
            sp.add_argument("--gauge-shift", default=None, help="rescale q -> q / k")
        sp.add_argument("--out", default=None, help="write output here instead of stdout")
        sp.add_argument("--format", choices=("json", "tsv"), default="json")

    sp = sub.add_parser("frobenius", help="local Frobenius basis")
    common(sp, order=True)
    sp.add_argument("--point", default="0", help="expansion point: rational or 'infinity'")
    sp.set_defaults(func=cmd_frobenius)

    sp = sub.add_parser("mirror-map", help="q(z) and z(q)")
    common(sp, order=True, gauge=True)
    sp.set_defaults(func=cmd_mirror_map)

    sp = sub.add_parser("yukawa", help="algebraic and flat Yukawa couplings")
    common(sp, order=True, gauge=True)
    sp.set_defaults(func=cmd_yukawa)

    sp = sub.add_parser("prepotential", help="instanton part from a flat Yukawa series")
    common(sp, op=False, inp="required")
    sp.add_argument("--kappa", default=None, help="classical coupling (default: constant term)")
    sp.set_defaults(func=cmd_prepotential)

    sp = sub.add_parser("symsq", help="construct or detect a symmetric square")
    common(sp)
    mode = sp.add_mutually_exclusive_group(required=True)
    mode.add_argument("--construct", action="store_true")
    mode.add_argument("--detect", action="store_true")
    sp.set_defaults(func=cmd_symsq)

    sp = sub.add_parser("pullback", help="change of variable")
    common(sp)
    sp.add_argument("--subst", required=True, help="affine:a,b | reciprocal | polynomial:c0,c1,...")
    sp.set_defaults(func=cmd_pullback)

    sp = sub.add_parser("monodromy", help="monodromy of the Frobenius basis along a loop")
    common(sp, inp=True, precision=True)
    sp.add_argument("--point", default="0", help="where the Frobenius basis is taken")
    sp.add_argument("--around", default=None, help="build a circle around this singular point")
    sp.set_defaults(func=cmd_monodromy)

    sp = sub.add_parser("fricke-check", help="tau(1 - a) tau(a) against a constant")
    common(sp, precision=True, gauge=True)
    sp.add_argument("--alpha", action="append", help="sample point (repeatable)")
    sp.add_argument("--product", default="-1/3")
    sp.set_defaults(func=cmd_fricke_check)

    sp = sub.add_parser("cayley", help="image of infinity under the normalized period")
    common(sp, inp=True, precision=True, gauge=True)
    sp.set_defaults(func=cmd_cayley)

    sp = sub.add_parser("toric", help="polar dual, lattice points, anticanonical sections")
    sp.add_argument("action", choices=("polar", "points", "sections"))
    common(sp, op=False, inp="required")
    sp.add_argument("--rays", default=None, help="JSON list of ray generators")
    sp.set_defaults(func=cmd_toric)

    sp = sub.add_parser("identity-suite", help="run named acceptance identities")
    sp.add_argument("--name", action="append", help="identity to run (repeatable; default all)")
    sp.add_argument("--out", default=None)
    sp.add_argument("--format", choices=("json", "tsv", "text"), default="text")
    sp.set_defaults(func=cmd_identity_suite)
    return p


def _fail(kind: str, exc: BaseException, code: int) -> int:
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "kind": kind, "message": str(exc)}) + "\n")
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
        if args.format == "text":
            text = "".join(line + "\n" for line in result["_lines"])
            text += f"{result['passed']}/{result['total']} passed\n"
        else:
            text = render(result, args.format)
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        if args.command == "identity-suite" and result["passed"] != result["total"]:
            return 3
        return 0
    except SchemaError as exc:
        return _fail("schema", exc, 2)
    except MathError as exc:
        return _fail("math", exc, 3)
    except Exception as exc:  # noqa: BLE001
        return _fail("internal", exc, 1)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
