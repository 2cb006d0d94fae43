"""Command-line front end.

Subcommands: build, polygon, scan, amoeba, scale, encircle.  Data outputs are
JSON (always carrying "schema": 1) or CSV with a documented header; SVG plots
are optional.  Exit codes: 0 success, 2 input or parse error, 3 precondition
violation, 4 numerical failure.  All invocations are deterministic under a
fixed seed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from .expr import ParseError, format_poly, parse_expression
from .models import (
    EPSILON,
    OMEGA,
    builtin_model,
    char_poly,
    generic_perturbation,
    model_from_dict,
    perturbation_matrix,
)
from .newton import (
    directions_to_list,
    ep_orders,
    lower_hull,
    newton_points,
    polygon_to_dict,
    report_to_dict,
    tentacle_directions,
)
from .numerics import NumericalError, amoeba_sample, as_complex_matrix, encircle, scaling_sweep
from .poly import GaussRational
from .scan import Classification, classify, scan_parameter
from . import svgplot

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_NUMERICAL = 4


class InputError(Exception):
    """Bad command-line input (maps to exit code 2)."""


# -- argument handling -------------------------------------------------------


def _parse_binding(text: str) -> tuple[str, Fraction]:
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise InputError(f"binding {text!r} is not of the form name=value")
    try:
        return name.strip(), Fraction(value.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"binding {text!r}: {exc}") from None


def _parse_scalar(text: str) -> GaussRational:
    p = parse_expression(text, ())
    return p.constant_value()


def _load_model(ref: str):
    try:
        return builtin_model(ref)
    except ValueError:
        pass
    try:
        with open(ref, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read model {ref!r}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"model file {ref!r} is not valid JSON: {exc}") from None
    try:
        return model_from_dict(data)
    except (ValueError, TypeError) as exc:  # covers ParseError with offsets
        raise InputError(f"model file {ref!r}: {exc}") from None


def _bindings_map(bundle, pairs) -> dict[str, Fraction]:
    out: dict[str, Fraction] = {}
    for text in pairs or ():
        name, value = _parse_binding(text)
        if name not in bundle.spec.params:
            raise InputError(
                f"unknown parameter {name!r}; model has {list(bundle.spec.params)}"
            )
        out[name] = value
    return out


def _require_all_bound(bundle, bindings) -> None:
    missing = [p for p in bundle.spec.params if p not in bindings]
    if missing:
        raise ValueError(f"unbound parameters: {missing}; bind them with --bind")


def _omega0(args) -> GaussRational:
    if args.omega0 is None:
        raise InputError("--omega0 is required for this subcommand")
    w0 = _parse_scalar(args.omega0)
    if getattr(args, "shift_sign", "plus") == "minus":
        w0 = GaussRational(-w0.re, -w0.im)
    return w0


def _perturbation(bundle, bindings, args):
    choice = args.perturb or "generic"
    size = bundle.spec.dim**2
    if choice == "generic":
        return generic_perturbation(bundle.variables, size, args.seed), "generic"
    if choice not in bundle.spec.params:
        raise InputError(
            f"--perturb must be 'generic' or one of {list(bundle.spec.params)}"
        )
    l1 = perturbation_matrix(bundle.l_eff, choice).substitute(bindings)
    return l1, choice


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _svg_path(args, default: str) -> str:
    if args.out:
        base = args.out.rsplit(".", 1)[0] if "." in args.out.rsplit("/", 1)[-1] else args.out
        return base + ".svg"
    return default


def _gr_str(v: GaussRational) -> str:
    if v.im == 0:
        return str(v.re)
    im = f"{abs(v.im)}*i" if abs(v.im) != 1 else "i"
    if v.re == 0:
        return im if v.im > 0 else f"-{im}"
    sign = "+" if v.im > 0 else "-"
    return f"{v.re}{sign}{im}"


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _classification_dict(c: Classification) -> dict:
    label = {"ep": f"EP({c.order})", "diabolic": "diabolic"}.get(c.kind, "inconclusive")
    return {
        "kind": c.kind,
        "label": label,
        "order": c.order,
        "alg_mult": c.alg_mult,
        "geom_mult": c.geom_mult,
        "valuations": report_to_dict(c.report)["valuations"],
        "polygon": polygon_to_dict(c.polygon),
        "seeds": list(c.seeds),
        "notes": list(c.notes),
    }


# -- subcommands ----------------------------------------------------------------


def cmd_build(args) -> int:
    bundle = _load_model(args.model)
    bindings = _bindings_map(bundle, args.bind)
    matrix = bundle.l_eff.matrix
    if bindings:
        matrix = matrix.substitute(bindings)
    payload = {
        "schema": 1,
        "model": bundle.name,
        "dim": bundle.spec.dim**2,
        "params": list(bundle.spec.params),
        "bound": {k: str(v) for k, v in bindings.items()},
        "entries": [[format_poly(e) for e in row] for row in matrix.rows],
    }
    _emit(_dumps(payload), args.out)
    return EXIT_OK


def cmd_polygon(args) -> int:
    bundle = _load_model(args.model)
    bindings = _bindings_map(bundle, args.bind)
    _require_all_bound(bundle, bindings)
    w0 = _omega0(args)
    bound = bundle.l_eff.matrix.substitute(bindings)
    l1, pname = _perturbation(bundle, bindings, args)
    classification = classify(bound, w0, seed=args.seed)  # also checks w0 exactly
    f = char_poly(bound, l1, shift=w0)
    polygon = lower_hull(newton_points(f))
    report = ep_orders(polygon)
    payload = {
        "schema": 1,
        "model": bundle.name,
        "omega0": _gr_str(w0),
        "perturbation": pname,
        "seed": args.seed,
        "polygon": polygon_to_dict(polygon),
        "valuations": report_to_dict(report)["valuations"],
        "tentacle_directions": directions_to_list(tentacle_directions(polygon)),
        "classification": _classification_dict(classification),
    }
    _emit(_dumps(payload), args.out)
    if args.svg:
        pts = [(p.i, p.j) for p in polygon.points]
        verts = [(p.i, p.j) for p in polygon.vertices]
        svg = svgplot.polygon_svg(pts, verts, f"Newton polygon ({bundle.name})")
        with open(_svg_path(args, "polygon.svg"), "w", encoding="utf-8") as fh:
            fh.write(svg)
    return EXIT_OK


def cmd_scan(args) -> int:
    bundle = _load_model(args.model)
    bindings = _bindings_map(bundle, args.bind)
    free = [p for p in bundle.spec.params if p not in bindings]
    if len(free) != 1:
        raise ValueError(
            f"scan needs exactly one unbound parameter as the target; free: {free}"
        )
    target = free[0]
    result = scan_parameter(
        bundle.l_eff.matrix, target, bindings, bundle.rate_params, seed=args.seed
    )
    candidates = []
    for cand in result.candidates:
        entry = {
            "value": _gr_str(cand.value),
            "exact": cand.exact,
            "omega0": [_gr_str(w) for w in cand.omega0_values],
            "flags": list(cand.flags),
            "classifications": [
                {"omega0": _gr_str(w), **_classification_dict(c)}
                for w, c in cand.classifications
            ],
        }
        candidates.append(entry)
    payload = {
        "schema": 1,
        "model": bundle.name,
        "target": target,
        "bindings": {k: str(v) for k, v in result.bindings.items()},
        "continuum": result.continuum,
        "candidates": candidates,
    }
    _emit(_dumps(payload), args.out)
    return EXIT_OK


def _bound_charpoly(args):
    bundle = _load_model(args.model)
    bindings = _bindings_map(bundle, args.bind)
    _require_all_bound(bundle, bindings)
    w0 = _omega0(args)
    bound = bundle.l_eff.matrix.substitute(bindings)
    l1, pname = _perturbation(bundle, bindings, args)
    base = char_poly(bound, None, shift=w0)
    if not base.coefficient_list(OMEGA)[0].is_zero():
        raise ValueError(f"omega0 = {_gr_str(w0)} is not an exact eigenvalue")
    return bundle, bound, l1, pname, w0


def cmd_amoeba(args) -> int:
    bundle, bound, l1, pname, w0 = _bound_charpoly(args)
    f = char_poly(bound, l1, shift=w0)
    cloud = amoeba_sample(
        f,
        modulus_range=(args.eps_min, args.eps_max),
        moduli=args.eps_points,
        phases=args.phases,
    )
    lines = [
        f"# amoeba model={bundle.name} perturbation={pname} omega0={_gr_str(w0)} "
        f"grid={cloud.moduli}x{cloud.phases} skips={cloud.skips}",
        "logeps,logmag",
    ]
    for le, lm in cloud.points:
        lines.append(f"{float(le)!r},{float(lm)!r}")
    _emit("\n".join(lines) + "\n", args.out)
    if args.svg:
        svg = svgplot.scatter_svg(
            [(lm, le) for le, lm in cloud.points],
            f"Amoeba ({bundle.name}, {pname})",
            "log10 |omega - omega0|",
            "log10 |epsilon|",
        )
        with open(_svg_path(args, "amoeba.svg"), "w", encoding="utf-8") as fh:
            fh.write(svg)
    return EXIT_OK


def cmd_scale(args) -> int:
    bundle, bound, l1, pname, w0 = _bound_charpoly(args)
    eps_values = np.geomspace(args.eps_min, args.eps_max, args.eps_points)
    fit = scaling_sweep(
        as_complex_matrix(bound), as_complex_matrix(l1), complex(w0), eps_values
    )
    lines = [
        f"# scale model={bundle.name} perturbation={pname} omega0={_gr_str(w0)} "
        f"slope={fit.slope!r} intercept={fit.intercept!r} r_squared={fit.r_squared!r} "
        f"npoints={fit.npoints}",
        "epsilon,re,im,logeps,logmag",
    ]
    w0c = complex(w0)
    for eps, lam in fit.samples:
        d = abs(lam - w0c)
        logmag = repr(math.log10(d)) if d > 0 else "-inf"
        lines.append(f"{eps!r},{lam.real!r},{lam.imag!r},{math.log10(eps)!r},{logmag}")
    _emit("\n".join(lines) + "\n", args.out)
    if args.svg:
        pts = [
            (math.log10(eps), math.log10(abs(lam - w0c)))
            for eps, lam in fit.samples
            if abs(lam - w0c) > 0
        ]
        fig = svgplot.Figure(
            f"Perturbation scaling ({bundle.name}, {pname})",
            "log10 epsilon",
            "log10 |omega - omega0|",
        )
        fig.add_points(pts)
        if pts:
            xs = [p[0] for p in pts]
            fig.add_line(
                [
                    (min(xs), fit.slope * min(xs) + fit.intercept),
                    (max(xs), fit.slope * max(xs) + fit.intercept),
                ]
            )
        with open(_svg_path(args, "scale.svg"), "w", encoding="utf-8") as fh:
            fh.write(fig.render())
    return EXIT_OK


def cmd_encircle(args) -> int:
    bundle = _load_model(args.model)
    bindings = _bindings_map(bundle, args.bind)
    _require_all_bound(bundle, bindings)
    bound = bundle.l_eff.matrix.substitute(bindings)
    l1, pname = _perturbation(bundle, bindings, args)
    report = encircle(
        as_complex_matrix(bound),
        as_complex_matrix(l1),
        radius=args.radius,
        steps=args.steps,
    )
    cyc = ",".join(str(c) for c in report.cycles)
    perm = ",".join(str(p) for p in report.permutation)
    lines = [
        f"# encircle model={bundle.name} perturbation={pname} radius={args.radius!r} "
        f"steps={args.steps} cycles=[{cyc}] permutation=[{perm}] "
        f"residual={report.tracking_residual!r} min_gap={report.min_gap!r}",
        "t,index,re,im",
    ]
    for step, t in enumerate(report.ts):
        for idx, z in enumerate(report.trace[step]):
            lines.append(f"{t!r},{idx},{z.real!r},{z.imag!r}")
    _emit("\n".join(lines) + "\n", args.out)
    if args.svg:
        nslots = len(report.trace[0])
        traces = [
            [(report.trace[s][k].real, report.trace[s][k].imag) for s in range(len(report.ts))]
            for k in range(nslots)
        ]
        svg = svgplot.traces_svg(
            traces, f"Eigenvalue loops ({bundle.name}, {pname})", "Re omega", "Im omega"
        )
        with open(_svg_path(args, "encircle.svg"), "w", encoding="utf-8") as fh:
            fh.write(svg)
    return EXIT_OK


# -- parser -----------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, *, omega0=False, perturb=False, eps=False):
    p.add_argument("--model", required=True, help="builtin name (spin_half, qubit) or JSON path")
    p.add_argument("--bind", action="append", metavar="NAME=RATIONAL", default=[])
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--seed", type=int, default=42)
    if omega0:
        p.add_argument("--omega0", default=None, help="exact shift, e.g. -1/2")
        p.add_argument(
            "--shift-sign",
            choices=("plus", "minus"),
            default="plus",
            help="minus negates omega0 on input (opposite shift convention)",
        )
    if perturb:
        p.add_argument("--perturb", default="generic", metavar="PARAM|generic")
        p.add_argument("--svg", action="store_true")
    if eps:
        p.add_argument("--eps-min", type=float, default=1e-6)
        p.add_argument("--eps-max", type=float, default=1e-2)
        p.add_argument("--eps-points", type=int, default=25)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liouville-ep",
        description="Exact Liouvillian exceptional point toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="dump the exact superoperator")
    _add_common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("polygon", help="Newton polygon, valuations, classification")
    _add_common(p, omega0=True, perturb=True)
    p.set_defaults(func=cmd_polygon)

    p = sub.add_parser("scan", help="resultant scan over one free parameter")
    _add_common(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("amoeba", help="sample the amoeba point cloud (CSV)")
    _add_common(p, omega0=True, perturb=True, eps=True)
    p.set_defaults(eps_points=40)
    p.add_argument("--phases", type=int, default=64)
    p.set_defaults(func=cmd_amoeba)

    p = sub.add_parser("scale", help="perturbation scaling sweep (CSV)")
    _add_common(p, omega0=True, perturb=True, eps=True)
    p.set_defaults(func=cmd_scale)

    p = sub.add_parser("encircle", help="eigenvalue tracking around a loop (CSV)")
    _add_common(p, perturb=True)
    p.add_argument("--radius", type=float, default=0.01)
    p.add_argument("--steps", type=int, default=400)
    p.set_defaults(func=cmd_encircle)
    return parser


def _preprocess(argv: list[str]) -> list[str]:
    # argparse mistakes a leading '-' on a value ("--omega0 -1/2") for a flag;
    # fold such pairs into the --flag=value form it accepts
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok == "--omega0" and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(_preprocess(list(sys.argv[1:] if argv is None else argv)))
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except AssertionError as exc:
        print(f"internal cross-check failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
