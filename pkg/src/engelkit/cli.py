"""Command-line front end: parse inputs, run verifications, emit reports."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .certify import CertifyOptions, INCONCLUSIVE, REFUTED, VERIFIED
from .report import INPUT_ERROR, Report


def _rational(text: str) -> Fraction:
    try:
        if "/" in text:
            p, q = text.split("/", 1)
            return Fraction(int(p), int(q))
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from e


def _slope(text: str):
    p, q = text.split("/", 1)
    return (int(p), int(q))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="engelkit",
                                 description="Engel/contact structure verification toolkit")
    ap.add_argument("--out", help="write the JSON report to this file")
    ap.add_argument("--max-depth", type=int, default=12,
                    help="bisection rounds for certificates (default 12)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse an input file and certify its forms")
    p.add_argument("path")

    p = sub.add_parser("verify-catalog", help="verify a model handle")
    p.add_argument("--model", required=True, choices=["R0", "R1", "R2", "R3", "D2"])
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--eps", type=_rational, default=None)
    p.add_argument("--a", type=int, default=None, help="R2 transversality scale")
    p.add_argument("--n", type=int, default=0, help="R2 disc-circle count")
    p.add_argument("--r0sq", type=_rational, default=None, help="R0/R3 squared radius")
    p.add_argument("--no-rotations", action="store_true")

    p = sub.add_parser("rotation", help="rotation number along a model check curve")
    p.add_argument("--model", required=True, choices=["R1", "R2", "D2"])
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--eps", type=_rational, default=None)
    p.add_argument("--a", type=int, default=None)
    p.add_argument("--curve", required=True,
                   help="gamma+ | gamma- | z-circle | divide")

    p = sub.add_parser("twist", help="twisting number along a closed fiber")
    p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("gray-flow", help="Gray flow residual for the boundary family")
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--samples", type=int, default=20)

    p = sub.add_parser("bypass-plan", help="normalize a torus dividing set")
    p.add_argument("--input", required=True, help="dividing-set JSON file")
    p.add_argument("--slope", type=_slope, required=True, help="target slope p/q")

    p = sub.add_parser("framing-solve", help="round-1-handle framing feasibility")
    p.add_argument("--nplus", type=int, required=True)
    p.add_argument("--nminus", type=int, required=True)
    p.add_argument("--rotplus", type=int, required=True)
    p.add_argument("--rotminus", type=int, required=True)

    p = sub.add_parser("divset-eval", help="evaluate a dividing set")
    p.add_argument("--input", required=True)
    return ap


def cmd_check(args, report: Report, opts) -> None:
    from .structures import is_contact, is_even_contact
    from .textio import parse_file

    decls = parse_file(args.path)
    for kind, name in decls.order:
        if kind == "chart":
            ch = decls.charts[name]
            report.add(f"chart {name}", {"coords": list(ch.coords)}, "ok")
        elif kind == "form":
            form = decls.forms[name]
            if form.degree == 1 and form.chart.dim == 3:
                cert = is_contact(form, opts=opts)
                report.add(f"form {name}: contact", cert.to_jsonable(), cert.verdict)
            elif form.degree == 1 and form.chart.dim == 4:
                cert = is_even_contact(form, opts=opts)
                report.add(f"form {name}: even-contact", cert.to_jsonable(), cert.verdict)
            else:
                report.add(f"form {name}", {"degree": form.degree}, "ok")
        elif kind == "field":
            report.add(f"field {name}", {"ok": True}, "ok")
        elif kind == "curve":
            cert = decls.curves[name].immersion_check()
            report.add(f"curve {name}: immersed", cert.to_jsonable(), cert.verdict)
        elif kind == "param":
            report.add(f"param {name}", {"value": str(decls.params[name])}, "ok")


def _build_handle(args):
    from .prolong import build_model

    kwargs = {}
    if args.model in ("R0", "R1", "R2", "R3"):
        kwargs["k"] = args.k
    if args.eps is not None:
        kwargs["eps"] = args.eps
    if args.model == "R2":
        kwargs["n"] = getattr(args, "n", 0)
        if args.a is not None:
            kwargs["a"] = args.a
    if args.model in ("R0", "R3") and getattr(args, "r0sq", None) is not None:
        kwargs["r0sq"] = args.r0sq
    return build_model(args.model, **kwargs)


def cmd_verify_catalog(args, report: Report, opts) -> None:
    from .prolong import verify_model

    handle = _build_handle(args)
    rep = verify_model(handle, opts=opts, with_rotations=not args.no_rotations)
    report.add(f"model {args.model}", rep.to_jsonable(),
               "verified" if rep.passed else "refuted")


def cmd_rotation(args, report: Report, opts) -> None:
    from .prolong import model_rotation

    handle = _build_handle(args)
    rot = model_rotation(handle, args.curve)
    report.add(f"rotation {args.model} {args.curve}", {"rotation": rot}, "ok")


def cmd_twist(args, report: Report, opts) -> None:
    from .prolong import build_r1, piece_fields, lift_field
    from .curves import twisting_number
    import math

    handle = build_r1(k=args.k, eps=Fraction(0))
    piece = handle.pieces[0]
    chart4, w, x, beta = piece_fields(piece, Fraction(0), args.k)
    f1 = lift_field(piece.c1, chart4)
    f2 = lift_field(piece.c2, chart4)
    res = twisting_number(w, x, (f1, f2),
                          {"x": 0.0, "y1": 0.0, "y2": 0.0, "t": 0.0},
                          2 * math.pi, closed=True)
    report.add(f"twist k={args.k}",
               {"degree": res.closed_degree, "half_turns": res.half_turns}, "ok")


def cmd_gray_flow(args, report: Report, opts) -> None:
    import math
    from .fixtures import boundary_family_form, boundary_family_points
    from .structures import gray_flow

    form = boundary_family_form()
    pts = boundary_family_points(args.samples)
    res = gray_flow(form, args.steps, pts)
    res2 = gray_flow(form, 2 * args.steps, pts)
    report.add(
        "gray-flow",
        {
            "steps": args.steps,
            "max_residual": res.max_residual,
            "max_residual_half_step": res2.max_residual,
            "improvement": (res.max_residual / res2.max_residual
                            if res2.max_residual else float("inf")),
        },
        "ok",
    )


def cmd_bypass_plan(args, report: Report, opts) -> None:
    from .divset import divset_from_jsonable, plan_to_jsonable, torus_normalize

    with open(args.input, "r", encoding="utf-8") as fh:
        g = divset_from_jsonable(json.load(fh))
    plan = torus_normalize(g, args.slope)
    report.add("bypass-plan", {"moves": plan_to_jsonable(plan)}, "ok")


def cmd_framing_solve(args, report: Report, opts) -> None:
    from .framing import FramingProblem, parity_feasible, solve_stabilization

    p = FramingProblem(args.nplus, args.nminus, args.rotplus, args.rotminus)
    sol = solve_stabilization(p)
    if sol is None:
        report.add("framing-solve",
                   {"feasible": False, "parity_feasible": parity_feasible(p)},
                   "refuted")
    else:
        report.add("framing-solve",
                   {"feasible": True, "solution": sol.to_jsonable()},
                   "ok")


def cmd_divset_eval(args, report: Report, opts) -> None:
    from .divset import (DISC, TORUS, SPHERE, divset_from_jsonable,
                         euler_class_pairing, is_tight_neighborhood,
                         tb_rot_from_divset)

    with open(args.input, "r", encoding="utf-8") as fh:
        g = divset_from_jsonable(json.load(fh))
    violations = g.validate()
    payload = {"violations": violations}
    if not violations:
        payload["tight_neighborhood"] = is_tight_neighborhood(g)
        if g.surface in (TORUS, SPHERE):
            payload["euler_pairing"] = euler_class_pairing(g)
        if g.surface == DISC and g.chords:
            tb, rot = tb_rot_from_divset(g)
            payload["tb"] = tb
            payload["rot"] = rot
    report.add("divset-eval", payload, "ok" if not violations else "refuted")


COMMANDS = {
    "check": cmd_check,
    "verify-catalog": cmd_verify_catalog,
    "rotation": cmd_rotation,
    "twist": cmd_twist,
    "gray-flow": cmd_gray_flow,
    "bypass-plan": cmd_bypass_plan,
    "framing-solve": cmd_framing_solve,
    "divset-eval": cmd_divset_eval,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return INPUT_ERROR if e.code not in (0,) else 0
    report = Report(command=["engelkit"] + argv)
    opts = CertifyOptions(max_depth=args.max_depth)
    try:
        COMMANDS[args.command](args, report, opts)
    except FileNotFoundError as e:
        report.add("error", {"message": str(e)}, "error")
    except Exception as e:  # input and model errors map to exit 3
        from .divset import DivSetError
        from .prolong import ModelError
        from .scalar import ExprError
        from .textio import ParseError

        if isinstance(e, (ParseError, ModelError, DivSetError, ExprError, ValueError)):
            report.add("error", {"message": str(e)}, "error")
        else:
            raise
    text = report.dumps()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return report.exit_code()


if __name__ == "__main__":
    sys.exit(main())
