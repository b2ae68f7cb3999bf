"""Command-line front end.

Subcommands evaluate the curved laws, sample geodesic flow bundles, run the
finite-N triangulation, reconstruct metrics, sample immersions and execute
the validation suites.  Output is CSV (17 significant digits, a config-hash
comment line and a header row) or JSON, and is byte-identical for identical
inputs.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .curvature_field import FIELD_NAMES, make_field
from .curved_trig import ExpansionInputs, expand, law_c, law_sc
from .embeddings import ProfileCache, flat_relation, immerse, lambert_relation
from .errors import BranchError, ConvergenceError, DegenerateTriangleError, DomainError
from .fnc import gauss_from_metric, metric_from_solution
from .fundamental_solution import TriangleSpec, fundamental_solution, geodesic_sample
from .integration import QuadratureConfig
from .suites import SUITES, run_suite
from .triangulation import curvature_samples, delta_residual, rib_lines, slice_geometry, triangulate

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_SUITE = 0, 2, 3, 4
CONVERGENCE_N = (32, 64, 128, 256)


class InputError(Exception):
    """Invalid command-line input."""


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def _floats(text: str) -> List[float]:
    try:
        return [float(eval_angle(t)) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def eval_angle(text: str) -> float:
    """Parse a number that may be written with ``pi``, e.g. ``pi/6`` or ``2*pi/3``."""
    t = text.strip().lower().replace(" ", "")
    if "pi" not in t:
        return float(t)
    num, _, den = t.partition("/")
    num = num.replace("*pi", "").replace("pi", "")
    factor = float(num) if num not in ("", "+", "-") else (-1.0 if num == "-" else 1.0)
    return factor * math.pi / (float(den) if den else 1.0)


def _angle(text: str) -> float:
    try:
        return eval_angle(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat JSON object of option values; flags take precedence")
    common.add_argument("--field", default="constant", choices=FIELD_NAMES)
    common.add_argument("--field-param", action="append", default=[], metavar="K=V")
    common.add_argument("--a", type=float, default=0.5)
    common.add_argument("--c", type=float, default=1.0)
    common.add_argument("--beta", type=_angle, default=math.pi / 3)
    common.add_argument("--base-l", type=_floats, default=[0.3])
    common.add_argument("--base-phi", type=_angle, default=0.0)
    common.add_argument("--n", type=int, default=13)
    common.add_argument("--tol", type=float, default=1e-10)
    common.add_argument("--out")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--allow-unsafe-beta", action="store_true")

    p = argparse.ArgumentParser(prog="geoflow", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    laws = sub.add_parser("laws", parents=[common], help="curved cosine and sine laws")
    laws.add_argument("--K", type=float, default=1.0)
    laws.add_argument("--gamma", type=_angle, default=math.pi / 2)
    laws.add_argument("--b", type=float, default=1.0)
    laws.add_argument("--branch", choices=("principal", "side"), default="principal")

    flow = sub.add_parser("flow", parents=[common], help="sample a geodesic flow bundle")
    flow.add_argument("--betas", type=_floats, default=[0.0, math.pi / 6, math.pi / 3])
    flow.add_argument("--lambdas", type=_floats, default=[0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3])

    tri = sub.add_parser("triangulate", parents=[common], help="finite-N triangulation")
    tri.add_argument("--convergence", action="store_true", help="add the table over N = 32..256")
    tri.add_argument("--lambda-term", action="store_true", help="use the harmonic top-line coefficient")

    sub.add_parser("metric", parents=[common], help="reconstruct g_phiphi and K along --base-l")

    imm = sub.add_parser("immerse", parents=[common], help="sample a surface of revolution")
    imm.add_argument("--relation", choices=("lambert", "flat"), default="lambert")
    imm.add_argument("--r-max", type=float, default=2.0)
    imm.add_argument("--nr", type=int, default=21)
    imm.add_argument("--nphi", type=int, default=16)

    val = sub.add_parser("validate", parents=[common], help="run validation suites")
    val.add_argument("--suite", choices=tuple(SUITES) + ("all",), default="all")
    return p


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config file: {exc}") from None
        if not isinstance(cfg, dict):
            raise InputError("config file must hold a flat JSON object")
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sub._actions}
        defaults = {}
        for key, value in cfg.items():
            dest = key.replace("-", "_")
            if dest not in known or dest in ("command", "config", "help"):
                raise InputError(f"unknown config key {key!r}")
            action = known[dest]
            if isinstance(value, str) and action.type is not None:
                value = action.type(value)
            elif dest in ("base_l", "betas", "lambdas") and not isinstance(value, list):
                value = [float(value)]
            defaults[dest] = value
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def _field(args):
    params = {}
    for item in args.field_param:
        key, sep, value = item.partition("=")
        if not sep:
            raise InputError(f"--field-param expects K=V, got {item!r}")
        try:
            params[key.strip()] = float(value)
        except ValueError:
            raise InputError(f"--field-param {key}: not a number") from None
    return make_field(args.field, **params)


def _quad_cfg(args) -> QuadratureConfig:
    if not args.tol > 0:
        raise InputError("--tol must be positive")
    return QuadratureConfig(abs_tol=args.tol, rel_tol=args.tol)


def _spec(args) -> TriangleSpec:
    return TriangleSpec(args.a, args.c, args.beta, args.base_phi, args.allow_unsafe_beta)


def config_hash(args) -> str:
    """Hash of every option value, stable across runs."""
    d = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "config")}
    blob = json.dumps(d, sort_keys=True, default=repr).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return format(float(v) + 0.0, ".17g")
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def render(args, columns: Sequence[str], rows: Iterable[Sequence], report: Optional[dict] = None) -> str:
    rows = list(rows)
    if args.format == "json":
        doc = {"config_hash": config_hash(args), "columns": list(columns),
               "rows": [list(r) for r in rows]}
        if report is not None:
            doc["report"] = report
        return json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# config-hash: {config_hash(args)}\n")
    if report is not None:
        for key in sorted(report):
            if not isinstance(report[key], (dict, list)):
                buf.write(f"# {key}: {_fmt(report[key])}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_laws(args) -> int:
    a, b, g, K = args.a, args.b, args.gamma, args.K
    if a <= 0 or b <= 0:
        raise InputError("side lengths a and b must be positive")
    if not 0.0 < g < math.pi:
        raise InputError("gamma must lie in (0, pi) for the sine law")
    c = law_c(K, g, a, b)
    alpha = law_sc(K, g, a, b, args.branch)
    c_flat = law_c(0.0, g, a, b)
    alpha_flat = law_sc(0.0, g, a, b, args.branch)
    e = expand(ExpansionInputs((a, 0.0, 0.0), (b, 0.0, 0.0), g, (0.0, 0.0), K), args.branch)
    cols = ["quantity", "value", "flat", "c1", "c2", "c3", "alpha0", "alpha1", "alpha2"]
    series = list(e.c_coeffs) + list(e.alpha_coeffs)
    rows = [["c", c, c_flat] + series, ["alpha", alpha, alpha_flat] + series]
    emit(args, render(args, cols, rows))
    return EXIT_OK


def cmd_flow(args) -> int:
    fld = _field(args)
    cfg = _quad_cfg(args)
    rows = []
    for l_p in args.base_l:
        if l_p <= 0:
            raise InputError("--base-l values must be positive")
        for beta in args.betas:
            for lam in args.lambdas:
                if lam < 0:
                    raise InputError("--lambdas must be non-negative")
                l, phi = geodesic_sample(fld, (l_p, args.base_phi), beta, lam, cfg, args.allow_unsafe_beta)
                rows.append([l_p, args.base_phi, beta, lam, l, phi, l * math.cos(phi), l * math.sin(phi)])
    emit(args, render(args, ["base_l", "base_phi", "beta", "lambda", "l", "phi", "x", "y"], rows))
    return EXIT_OK


def _residual_max(fld, spec: TriangleSpec, N: int) -> float:
    Ks = curvature_samples(fld, N, spec.a, spec.c, spec.beta, spec.base_point_phi)
    worst = 0.0
    for j in (1, (N + 1) // 2, N):
        state = {"a": spec.a, "c": spec.c, "beta": spec.beta, "K_samples": Ks[:, j],
                 "a3": rib_lines(N, j, spec.a, spec.c, spec.beta, Ks[:, j])}
        for i in range(2, N):
            worst = max(worst, abs(delta_residual(N, j, i, state)))
    return worst


def cmd_triangulate(args) -> int:
    if args.n <= 3:
        raise InputError("--n must exceed 3")
    fld = _field(args)
    spec = _spec(args)
    cfg = _quad_cfg(args)
    fin = triangulate(fld, spec, args.n, args.lambda_term)
    lim = fundamental_solution(fld, spec, cfg)
    report = {
        "N": args.n,
        "b0": fin.b0, "gamma0": fin.gamma0, "alpha0": fin.alpha0,
        "b2_finite": fin.b2, "gamma2_finite": fin.gamma2, "alpha2_finite": fin.alpha2,
        "b2_limit": lim.b2, "gamma2_limit": lim.gamma2, "alpha2_limit": lim.alpha2,
        "b2_diff": fin.b2 - lim.b2, "gamma2_diff": fin.gamma2 - lim.gamma2,
        "alpha2_diff": fin.alpha2 - lim.alpha2,
        "delta_residual_max": _residual_max(fld, spec, args.n),
    }
    if args.convergence:
        table = []
        for N in CONVERGENCE_N:
            r = triangulate(fld, spec, N, args.lambda_term)
            table.append({"N": N, "b2_err": r.b2 - lim.b2, "gamma2_err": r.gamma2 - lim.gamma2,
                          "alpha2_err": r.alpha2 - lim.alpha2})
        report["convergence"] = table
    cols = ["kind", "i", "l", "phi", "x", "y"]
    rows = []
    if fld.constant is not None:
        geo = slice_geometry(args.n, spec.a, spec.c, spec.beta, fld.constant)
        for kind in ("base", "top", "ribs"):
            for i in sorted(geo[kind]):
                l, phi = geo[kind][i]
                rows.append([kind, i, l, phi, l * math.cos(phi), l * math.sin(phi)])
    else:
        report["geometry"] = "segment vertices are emitted for constant fields only"
    if args.format == "csv" and "convergence" in report:
        # the table goes into comment lines to keep one CSV block
        conv = report.pop("convergence")
        for row in conv:
            report[f"convergence_N{row['N']}"] = " ".join(
                f"{k}={_fmt(row[k])}" for k in ("b2_err", "gamma2_err", "alpha2_err"))
    emit(args, render(args, cols, rows, report))
    return EXIT_OK


def cmd_metric(args) -> int:
    fld = _field(args)
    cfg = _quad_cfg(args)
    rows = []
    for l in args.base_l:
        if l <= 0:
            raise InputError("--base-l values must be positive")
        g = metric_from_solution(fld, (l, args.base_phi), cfg).g_phiphi
        prof = lambda x: metric_from_solution(fld, (x, args.base_phi), cfg).g_phiphi
        # exact laws are smooth to round-off; the series carries quadrature noise
        h = min(1e-3 if fld.constant is not None else 1e-2, 0.5 * l)
        K_rec = gauss_from_metric(prof, l, h)
        K_field = float(fld.evaluate(l, args.base_phi))
        rows.append([l, g, math.sqrt(g), K_rec, K_field])
    emit(args, render(args, ["l", "g_phiphi", "r", "K_from_metric", "K_field"], rows))
    return EXIT_OK


def cmd_immerse(args) -> int:
    if args.r_max <= 0 or args.nr < 2 or args.nphi < 1:
        raise InputError("--r-max must be positive, --nr at least 2 and --nphi at least 1")
    rel = lambert_relation() if args.relation == "lambert" else flat_relation()
    cache = ProfileCache(rel, args.r_max)
    rows = []
    for r in np.linspace(0.0, args.r_max, args.nr):
        for phi in np.arange(args.nphi) * (2.0 * math.pi / args.nphi):
            x, y, z = immerse(rel, float(r), float(phi), cache=cache)
            rows.append([float(r), float(phi), float(rel.l_of_r(r)), x, y, z])
    emit(args, render(args, ["r", "phi", "l", "x", "y", "z"], rows))
    return EXIT_OK


def cmd_validate(args) -> int:
    summary = run_suite(args.suite)
    text = json.dumps(_jsonable(summary), sort_keys=True, indent=2) + "\n"
    emit(args, text)
    return EXIT_OK if summary["passed"] else EXIT_SUITE


COMMANDS = {
    "laws": cmd_laws,
    "flow": cmd_flow,
    "triangulate": cmd_triangulate,
    "metric": cmd_metric,
    "immerse": cmd_immerse,
    "validate": cmd_validate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (InputError, argparse.ArgumentTypeError, ValueError) as exc:
        print(f"geoflow: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return COMMANDS[args.command](args)
    except (DegenerateTriangleError, ConvergenceError, FloatingPointError, ZeroDivisionError) as exc:
        print(f"geoflow: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, DomainError, BranchError) as exc:
        print(f"geoflow: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
