"""Command-line interface.

Subcommands: test, ci, region, diagnose, power, size, sweep.  Output is
deterministic: identical requests render byte-identical JSON (fixed field
order, reals at 10 significant digits).  Exit codes: 0 success, 2
validation error, 3 compute-budget error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from ._backend import backend_name
from .core import (
    Alternative,
    BudgetExceededError,
    DomainError,
    Measure,
    TwoByTwoData,
    UnsupportedCombinationError,
)
from .catalog import make_method
from . import opchar, triples


def _round_sig(x, digits=10):
    if isinstance(x, bool) or not isinstance(x, (int, float, np.integer, np.floating)):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(format(x, f".{digits}g"))


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    return _round_sig(obj)


def _flatten(node, prefix=""):
    items = []
    for k, v in node.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            items.extend(_flatten(v, f"{key}."))
        else:
            if isinstance(v, list):
                v = ";".join(str(u) for u in v)
            items.append((key, v))
    return items


def _emit(report: dict, fmt: str) -> str:
    report = _clean(report)
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    if fmt == "text":
        return "\n".join(f"{k}: {v}" for k, v in _flatten(report)) + "\n"
    if fmt == "csv":
        lines = ["key,value"] + [f"{k},{v}" for k, v in _flatten(report)]
        return "\n".join(lines) + "\n"
    raise DomainError(f"unknown output format {fmt!r}")


def _add_table_args(p):
    p.add_argument("--x1", type=int, required=True)
    p.add_argument("--n1", type=int, required=True)
    p.add_argument("--x2", type=int, required=True)
    p.add_argument("--n2", type=int, required=True)


def _add_method_args(p):
    p.add_argument("--method", required=True)
    p.add_argument("--measure", default="difference",
                   choices=[m.value for m in Measure])
    p.add_argument("--midp", action="store_true")
    p.add_argument("--berger-boos", type=float, default=None, metavar="GAMMA")
    p.add_argument("--em", action="store_true")
    p.add_argument("--variant", default=None)
    p.add_argument("--grid-points", type=int, default=1001)


def _add_common(p):
    p.add_argument("--format", default="json", choices=["json", "text", "csv"])


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="twobinom",
        description="Exact inference for two independent binomial samples",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="p-value for one table at a null value")
    _add_table_args(t)
    _add_method_args(t)
    t.add_argument("--null", type=float, default=None, dest="beta0")
    t.add_argument("--alternative", default=None,
                   choices=[a.value for a in Alternative])
    _add_common(t)

    c = sub.add_parser("ci", help="confidence interval for one table")
    _add_table_args(c)
    _add_method_args(c)
    c.add_argument("--level", type=float, default=0.95)
    _add_common(c)

    r = sub.add_parser("region", help="confidence region by p-value inversion")
    _add_table_args(r)
    _add_method_args(r)
    r.add_argument("--level", type=float, default=0.95)
    r.add_argument("--beta-min", type=float, default=None)
    r.add_argument("--beta-max", type=float, default=None)
    r.add_argument("--grid-size", type=int, default=2001)
    _add_common(r)

    d = sub.add_parser("diagnose", help="triple diagnostics for one table")
    _add_table_args(d)
    _add_method_args(d)
    d.add_argument("--levels", type=float, nargs="+", default=[0.9, 0.95, 0.99])
    d.add_argument("--alternative", default=None,
                   choices=[a.value for a in Alternative])
    d.add_argument("--grid-size", type=int, default=201)
    _add_common(d)

    pw = sub.add_parser("power", help="exact power at one parameter point")
    _add_method_args(pw)
    pw.add_argument("--n1", type=int, required=True)
    pw.add_argument("--n2", type=int, required=True)
    pw.add_argument("--theta1", type=float, required=True)
    pw.add_argument("--theta2", type=float, required=True)
    pw.add_argument("--alpha", type=float, default=0.05)
    pw.add_argument("--null", type=float, default=None, dest="beta0")
    pw.add_argument("--alternative", default=None,
                    choices=[a.value for a in Alternative])
    _add_common(pw)

    sz = sub.add_parser("size", help="exact size over the null boundary")
    _add_method_args(sz)
    sz.add_argument("--n1", type=int, required=True)
    sz.add_argument("--n2", type=int, required=True)
    sz.add_argument("--alpha", type=float, default=0.05)
    sz.add_argument("--null", type=float, default=None, dest="beta0")
    sz.add_argument("--alternative", default=None,
                    choices=[a.value for a in Alternative])
    sz.add_argument("--boundary-points", type=int, default=201)
    _add_common(sz)

    sw = sub.add_parser("sweep", help="power-difference grid for two methods")
    sw.add_argument("--method-a", required=True)
    sw.add_argument("--method-b", required=True)
    sw.add_argument("--measure", default="difference",
                    choices=[m.value for m in Measure])
    sw.add_argument("--n1", type=int, required=True)
    sw.add_argument("--n2", type=int, required=True)
    sw.add_argument("--alpha", type=float, default=0.05)
    sw.add_argument("--alternative", default="two_sided_central",
                    choices=[a.value for a in Alternative])
    sw.add_argument("--grid-size", type=int, default=25)
    sw.add_argument("--theta-min", type=float, default=0.02)
    sw.add_argument("--theta-max", type=float, default=0.98)
    sw.add_argument("--format", default="csv", choices=["json", "csv"])
    return ap


def _method_from_args(args, method_attr="method"):
    return make_method(
        getattr(args, method_attr),
        Measure(args.measure),
        midp=getattr(args, "midp", False),
        berger_boos=getattr(args, "berger_boos", None),
        em=getattr(args, "em", False),
        variant=getattr(args, "variant", None),
        grid_points=getattr(args, "grid_points", 1001),
    )


def _data_from_args(args) -> TwoByTwoData:
    return TwoByTwoData(args.x1, args.n1, args.x2, args.n2)


def _base_report(args, command):
    inputs = {}
    for key in ("x1", "n1", "x2", "n2", "measure", "method", "method_a",
                "method_b", "beta0", "alternative", "level", "levels",
                "alpha", "theta1", "theta2", "midp", "berger_boos", "em",
                "variant", "grid_points", "grid_size", "beta_min",
                "beta_max", "boundary_points", "theta_min", "theta_max"):
        if hasattr(args, key) and getattr(args, key) is not None:
            inputs[key] = getattr(args, key)
    return {
        "command": command,
        "inputs": inputs,
        "results": {},
        "metadata": {"package": "twobinom", "version": __version__,
                     "backend": backend_name()},
    }


def _cmd_test(args) -> tuple[str, int]:
    data = _data_from_args(args)
    method = _method_from_args(args)
    beta0 = method.default_beta0() if args.beta0 is None else args.beta0
    report = _base_report(args, "test")
    report["inputs"]["beta0"] = beta0
    p = method.pvalue(data, beta0, args.alternative)
    report["results"]["p_value"] = p
    est = data.estimate(method.measure)
    report["results"]["estimate"] = est
    if method.central:
        try:
            p_less = method.pvalue(data, beta0, Alternative.LESS)
            p_greater = method.pvalue(data, beta0, Alternative.GREATER)
            report["results"]["p_less"] = p_less
            report["results"]["p_greater"] = p_greater
        except DomainError:
            pass
    return _emit(report, args.format), 0


def _cmd_ci(args) -> tuple[str, int]:
    data = _data_from_args(args)
    method = _method_from_args(args)
    report = _base_report(args, "ci")
    ci, region = method.ci_with_region(data, args.level)
    report["results"]["lower"] = ci.lower
    report["results"]["upper"] = ci.upper
    report["results"]["level"] = ci.level
    report["results"]["central"] = ci.central
    report["results"]["holes_filled"] = ci.holes_filled
    est, clamped = triples.clamp_estimate(data.estimate(method.measure), ci)
    report["results"]["estimate"] = est
    report["results"]["estimate_clamped"] = clamped
    if region is not None:
        report["results"]["region"] = [[a, b] for a, b in region.intervals]
    return _emit(report, args.format), 0


def _region_grid_from_args(args, data, measure):
    if args.beta_min is not None and args.beta_max is not None:
        if measure.log_scale:
            return np.geomspace(args.beta_min, args.beta_max, args.grid_size)
        return np.linspace(args.beta_min, args.beta_max, args.grid_size)
    from .unconditional import _default_beta_grid

    return _default_beta_grid(data, measure, args.grid_size)


def _cmd_region(args) -> tuple[str, int]:
    data = _data_from_args(args)
    method = _method_from_args(args)
    report = _base_report(args, "region")
    grid = _region_grid_from_args(args, data, method.measure)
    region = triples.confidence_region(
        lambda d, b: method.pvalue(d, b), data, args.level, grid
    )
    ci = triples.matching_ci(region) if region.intervals else None
    report["results"]["intervals"] = [[a, b] for a, b in region.intervals]
    report["results"]["grid_resolution"] = region.grid_resolution
    if ci is not None:
        report["results"]["matching_lower"] = ci.lower
        report["results"]["matching_upper"] = ci.upper
        report["results"]["holes_filled"] = ci.holes_filled
    return _emit(report, args.format), 0


def _cmd_diagnose(args) -> tuple[str, int]:
    data = _data_from_args(args)
    method = _method_from_args(args)
    report = _base_report(args, "diagnose")
    grid = _region_grid_from_args_diag(args, data, method.measure)
    compat = triples.check_compatibility(method, data, args.levels, grid)
    nested = triples.check_nestedness(method, data, args.levels)
    alt = args.alternative or "two_sided"
    if alt in ("two_sided_central", "two_sided_minlike", "two_sided_blaker"):
        alt = "two_sided"
    coher = triples.check_coherence(
        lambda d, b: method.pvalue(d, b, args.alternative), data, grid, alt
    )
    report["results"]["compatible"] = compat.compatible
    report["results"]["compatibility_violations"] = [
        {"alpha": v.alpha, "beta0": v.beta0, "p_value": v.p_value,
         "in_interval": v.in_interval}
        for v in compat.violations[:20]
    ]
    report["results"]["nested"] = nested.nested
    report["results"]["coherent"] = coher.coherent
    report["results"]["coherence_violations"] = [
        {"beta0_from": v.beta0_from, "beta0_to": v.beta0_to,
         "p_from": v.p_from, "p_to": v.p_to}
        for v in coher.violations[:20]
    ]
    return _emit(report, args.format), 0


def _region_grid_from_args_diag(args, data, measure):
    from .unconditional import _default_beta_grid

    return _default_beta_grid(data, measure, args.grid_size)


def _cmd_power(args) -> tuple[str, int]:
    method = _method_from_args(args)
    report = _base_report(args, "power")
    value = opchar.exact_power(
        method, args.n1, args.n2, args.theta1, args.theta2, args.alpha,
        args.alternative, args.beta0,
    )
    report["results"]["power"] = value
    return _emit(report, args.format), 0


def _cmd_size(args) -> tuple[str, int]:
    method = _method_from_args(args)
    report = _base_report(args, "size")
    res = opchar.exact_size(
        method, args.n1, args.n2, args.alpha, args.beta0,
        args.alternative or "greater", method.measure,
        boundary_points=args.boundary_points,
    )
    report["results"]["size"] = res.size
    report["results"]["theta_at_max"] = res.theta_at
    report["results"]["grid_modulus"] = res.grid_modulus
    report["results"]["valid_at_alpha"] = res.size <= args.alpha + 2e-4
    return _emit(report, args.format), 0


def _cmd_sweep(args) -> tuple[str, int]:
    ma = make_method(args.method_a, Measure(args.measure))
    mb = make_method(args.method_b, Measure(args.measure))
    grid = np.linspace(args.theta_min, args.theta_max, args.grid_size)
    og = opchar.power_grid(
        (ma, mb), args.n1, args.n2, args.alpha, grid, args.alternative
    )
    if args.format == "csv":
        return og.to_csv(), 0
    report = _base_report(args, "sweep")
    report["results"] = opchar.band_summary(og)
    return _emit(report, args.format), 0


_DISPATCH = {
    "test": _cmd_test,
    "ci": _cmd_ci,
    "region": _cmd_region,
    "diagnose": _cmd_diagnose,
    "power": _cmd_power,
    "size": _cmd_size,
    "sweep": _cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors, 0 on --help
        return int(e.code) if e.code else 0
    try:
        out, code = _DISPATCH[args.command](args)
    except BudgetExceededError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (DomainError, UnsupportedCombinationError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
