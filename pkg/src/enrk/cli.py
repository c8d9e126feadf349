"""Command line interface: ``enrk thresholds|integrate|converge|radius|order``.

Exit codes: 0 success, 2 precondition error, 3 divergence.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import denominator as den
from .errors import DivergenceError, PreconditionError
from .harness import (
    REFERENCE_STEP,
    convergence_table,
    threshold_report,
    write_convergence_csv,
)
from .integrator import integrate
from .models import MODELS, get_model
from .positivity import format_threshold
from .tableau import REGISTRY, order_residuals, positivity_radius, registry_get, verify_order

EXIT_OK = 0
EXIT_PRECONDITION = 2
EXIT_DIVERGENCE = 3

_FAMILY_INDEX = {"phi1": 0, "phi2": 1, "phi3": 2}


def _param(text: str) -> tuple[str, float]:
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    try:
        return key.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad numeric value in {text!r}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def split_specs(text: str) -> list[str]:
    """Split ``"h,phi2(tau2=0.1,m=4)"`` on the commas outside parentheses."""
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append(text[start:i])
            start = i + 1
    parts.append(text[start:])
    return [p.strip() for p in parts if p.strip()]


def _model(args):
    return get_model(args.model, **dict(args.param or []))


def _resolve_spec(text, t, m, args):
    key = text.strip().lower()
    if key == "auto":
        key = "phi3"
    if key in _FAMILY_INDEX:
        report = threshold_report(t, m, getattr(args, "m", None), getattr(args, "k", None))
        if len(report.recommended) < 3:
            raise PreconditionError(f"no finite threshold for {t.name} on {m.name}")
        return den.parse(report.recommended[_FAMILY_INDEX[key]])
    return den.parse(text)


def cmd_thresholds(args) -> int:
    t = registry_get(args.method)
    report = threshold_report(t, _model(args), args.m, args.k)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
        return EXIT_OK
    rows = [
        ("method", f"{report.label} ({report.method}, s={report.s}, p={report.p})"),
        ("model", report.model),
        ("phi*", format_threshold(report.phi_star)),
        ("R(A,b)", format_threshold(report.radius, 5)),
        ("alpha", f"{report.alpha:g}"),
        ("H", format_threshold(report.H)),
        ("tau*", format_threshold(report.tau_star) + ("  (stability only)" if report.stability_only else "")),
    ]
    if report.tau1_opt is not None:
        rows += [
            ("tau1_opt", f"{report.tau1_opt:.4g}"),
            (f"tau2_opt (m={report.m})", f"{report.tau2_opt:.5g}"),
        ]
    rows.append(("recommended", ", ".join(report.recommended)))
    if report.conditional:
        rows.append(("note", "conditional on numerically located equilibria"))
    width = max(len(k) for k, _ in rows)
    for key, value in rows:
        print(f"{key:<{width}}  {value}")
    return EXIT_OK


def cmd_integrate(args) -> int:
    t = registry_get(args.method)
    m = _model(args)
    spec = _resolve_spec(args.denominator, t, m, args)
    y0 = args.y0 if args.y0 is not None else m.default_y0
    if len(y0) != m.dim:
        raise PreconditionError(f"y0 has {len(y0)} components, model {m.name!r} has {m.dim}")
    traj = integrate(t, spec, m.f, y0, args.h, args.steps)
    traj.to_csv(args.out)
    final = ", ".join(f"{v:.10g}" for v in traj.final)
    print(f"{spec}: phi({args.h:g}) = {traj.phi:.10g}; t = {traj.t_end:g}; y = ({final})")
    print(f"wrote {traj.steps + 1} rows to {args.out}")
    return EXIT_OK


def cmd_converge(args) -> int:
    t = registry_get(args.method)
    m = _model(args)
    specs = [_resolve_spec(text, t, m, args) for text in split_specs(args.denominators)]
    rows = convergence_table(t, m, specs, args.hs, args.T, args.y0, args.h_ref)
    write_convergence_csv(rows, args.out)
    keys = list(rows[0].errors)
    print("h".ljust(10) + "".join(f"{key[:30]:>34}" for key in keys))
    for row in rows:
        cells = []
        for key in keys:
            err, rate = row.errors[key], row.rates.get(key)
            cell = "diverged" if err is None else f"{err:.4e}"
            cell += "" if rate is None else f" ({rate:.4f})"
            cells.append(f"{cell:>34}")
        print(f"{row.h:<10g}" + "".join(cells))
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def cmd_radius(args) -> int:
    r = positivity_radius(registry_get(args.method))
    print(f"{r:.6f}" if math.isfinite(r) else "inf")
    return EXIT_OK


def cmd_order(args) -> int:
    t = registry_get(args.method)
    highest = 0
    for p in range(1, 5):
        if not verify_order(t, p):
            break
        highest = p
    worst = max(abs(r) for r in order_residuals(t, t.p))
    print(f"{t.name}: s={t.s}, claimed p={t.p}, verified order {highest} (max residual {worst:.2e})")
    return EXIT_OK if highest >= t.p else EXIT_PRECONDITION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="enrk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def method_arg(p):
        p.add_argument("--method", required=True, choices=sorted(REGISTRY))

    def model_args(p):
        p.add_argument("--model", required=True, choices=sorted(MODELS))
        p.add_argument("--param", action="append", type=_param, metavar="KEY=VALUE",
                       help="model parameter override (repeatable)")
        p.add_argument("--y0", type=_floats, help="initial state, comma-separated")

    def exponent_args(p):
        p.add_argument("--m", type=int, help="phi2 exponent used by auto-selection")
        p.add_argument("--k", type=int, help="phi3 theta exponent used by auto-selection")

    p = sub.add_parser("thresholds", help="stability, positivity and PES thresholds")
    method_arg(p)
    model_args(p)
    exponent_args(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("integrate", help="fixed-step ENRK run written as CSV")
    method_arg(p)
    model_args(p)
    exponent_args(p)
    p.add_argument("--denominator", default="h",
                   help="spec string, or auto/phi1/phi2/phi3 for the recommended one")
    p.add_argument("--h", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("converge", help="error and rate table against a fine reference")
    method_arg(p)
    model_args(p)
    exponent_args(p)
    p.add_argument("--denominators", required=True, help="comma-separated spec strings")
    p.add_argument("--hs", type=_floats, default=[0.2, 0.1, 0.05, 0.01])
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--h-ref", type=float, default=REFERENCE_STEP)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("radius", help="positivity radius R(A,b)")
    method_arg(p)
    p.set_defaults(func=cmd_radius)

    p = sub.add_parser("order", help="verify the classical order conditions")
    method_arg(p)
    p.set_defaults(func=cmd_order)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DivergenceError as exc:
        print(f"enrk: divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (PreconditionError, ValueError, KeyError, OSError) as exc:
        print(f"enrk: error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
