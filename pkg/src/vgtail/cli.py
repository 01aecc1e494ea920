"""
Command-line front end.

    vgtail constants  --model vg --nu 1 --theta 0 --rho 0
    vgtail tail-curve --model vg --nu 1 --u-max 1e-2 --u-min 1e-12 --points 11
    vgtail fit        --model vg --nu 1
    vgtail sample     --model vg --nu 1 --n 1000 --seed 7 --out sample.csv
    vgtail verify     --model vg --nu 2 --theta 0.5 --rho -0.4

Exit codes: 0 success, 1 verification failure, 2 parameter error,
3 numerical failure.
"""

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .dependence import CURVE_COLUMNS, empirical_copula_diag, lambda_L_curve, tail_order_fit
from .gig import GIGParams, ParameterError, gig_log_pdf, gig_mean
from .numerics import BracketError, QuadratureError, RootFindingError, integrate, integrate_log
from .skew_gh import (
    EquiSkewGHParams,
    joint_log_cdf_diagonal,
    log_skew_normal_cdf,
    marginal_log_cdf,
    marginal_log_pdf,
    marginal_quantile,
    sample_bivariate,
    xstar_log_cdf,
)
from .tail_asymptotics import (
    InvariantViolation,
    boundary_laplace_log_integral,
    boundary_laplace_log_leading,
    compute_constants,
    joint_log_cdf_diagonal_asymptotic,
    marginal_log_cdf_asymptotic,
    svf_exponent,
)

EXIT_OK, EXIT_VERIFY, EXIT_PARAM, EXIT_NUMERIC = 0, 1, 2, 3
NUMERIC_ERRORS = (QuadratureError, BracketError, RootFindingError, InvariantViolation)

# built-in defaults; per-command grid defaults are filled in separately
DEFAULTS = {
    "model": "vg",
    "p": None,
    "a": None,
    "b": None,
    "nu": None,
    "theta": 0.0,
    "rho": 0.0,
    "u_max": None,
    "u_min": None,
    "points": None,
    "include_half": False,
    "y": None,
    "n": 1000,
    "seed": 0,
    "format": None,
    "out": None,
}
GRID_DEFAULTS = {
    "tail-curve": (1e-2, 1e-12, 11),
    "fit": (1e-4, 1e-16, 13),
}


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    pass


def _fmt(x):
    """Shortest round-trip text for a float."""
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return "nan"
    return repr(x)


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--config", help="JSON file of defaults; flags take precedence")
    g.add_argument("--model", choices=("gh", "vg"), default=None)
    g.add_argument("--p", type=float, default=None)
    g.add_argument("--a", type=float, default=None)
    g.add_argument("--b", type=float, default=None)
    g.add_argument("--nu", type=float, default=None)
    g.add_argument("--theta", type=float, default=None)
    g.add_argument("--rho", type=float, default=None)
    g.add_argument("--format", choices=("csv", "json"), default=None)
    g.add_argument("--out", default=None, help="output path (default: stdout)")

    grid = argparse.ArgumentParser(add_help=False)
    gg = grid.add_argument_group("u grid (log spaced)")
    gg.add_argument("--u-max", dest="u_max", type=float, default=None)
    gg.add_argument("--u-min", dest="u_min", type=float, default=None)
    gg.add_argument("--points", type=int, default=None)
    gg.add_argument("--include-half", dest="include_half", action="store_true", default=None,
                    help="prepend u = 0.5 to the grid")

    parser = argparse.ArgumentParser(prog="vgtail", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("constants", parents=[common], help="closed-form tail constants")
    sub.add_parser("tail-curve", parents=[common, grid], help="exact vs asymptotic C(u,u) on a u grid")
    sub.add_parser("fit", parents=[common, grid], help="tail-order regression on the exact pipeline")
    sp = sub.add_parser("sample", parents=[common], help="seeded Monte Carlo pairs")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    vp = sub.add_parser("verify", parents=[common], help="invariant checks at the given parameters")
    vp.add_argument("--y", type=float, nargs="+", default=None,
                    help="levels for the reduction-identity check (default -2 -5)")
    return parser


def resolve_config(args):
    """Merge built-in defaults < config file < command-line flags."""
    cfg = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file {args.config}: {exc}") from exc
        unknown = set(file_cfg) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update({k.replace("-", "_"): v for k, v in file_cfg.items()})
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    cfg["command"] = args.command
    if args.command in GRID_DEFAULTS:
        u_max, u_min, points = GRID_DEFAULTS[args.command]
        cfg["u_max"] = u_max if cfg["u_max"] is None else cfg["u_max"]
        cfg["u_min"] = u_min if cfg["u_min"] is None else cfg["u_min"]
        cfg["points"] = points if cfg["points"] is None else cfg["points"]
    if args.command == "verify" and cfg["y"] is None:
        cfg["y"] = [-2.0, -5.0]
    return cfg


def params_from_config(cfg) -> EquiSkewGHParams:
    theta, rho = cfg["theta"], cfg["rho"]
    if cfg["model"] == "vg":
        if cfg["nu"] is None:
            raise ParameterError("--model vg requires --nu")
        extra = [k for k in ("p", "a", "b") if cfg[k] is not None]
        if extra:
            raise ParameterError(f"--model vg fixes p, a, b from nu; drop {extra}")
        return EquiSkewGHParams.vg(cfg["nu"], theta, rho)
    missing = [k for k in ("p", "a", "b") if cfg[k] is None]
    if missing:
        raise ParameterError(f"--model gh requires --p, --a and --b (missing {missing})")
    return EquiSkewGHParams.gh(cfg["p"], cfg["a"], cfg["b"], theta, rho)


def u_grid_from_config(cfg):
    u_max, u_min, points = cfg["u_max"], cfg["u_min"], cfg["points"]
    if not (0.0 < u_min < u_max <= 0.5):
        raise ParameterError(f"u grid needs 0 < u_min < u_max <= 0.5 (got {u_min}, {u_max})")
    if points < 2:
        raise ParameterError("--points must be at least 2")
    grid = list(np.geomspace(u_max, u_min, points))
    if cfg["include_half"] and u_max < 0.5:
        grid = [0.5] + grid
    return [float(u) for u in grid]


def _metadata(cfg):
    return {"package": "vgtail", "version": __version__, "command": cfg["command"]}


def _render_table(cfg, columns, rows):
    fmt = cfg["format"] or "csv"
    if fmt == "json":
        doc = {
            "config": cfg,
            "results": [dict(zip(columns, r)) for r in rows],
            "metadata": _metadata(cfg),
        }
        return json.dumps(_json_safe(doc), indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_fmt(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _emit(cfg, text):
    if cfg["out"]:
        with open(cfg["out"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


CONSTANT_KEYS = ("alpha", "beta", "phi_alpha", "theta_tilde_0", "A", "gamma", "delta", "tau", "C1", "C2")


def cmd_constants(cfg):
    params = params_from_config(cfg)
    consts = compute_constants(params)
    values = {k: getattr(consts, k) for k in CONSTANT_KEYS}
    values["svf_exponent"] = svf_exponent(consts, params)
    fmt = cfg["format"]
    if fmt is None:
        text = "".join(f"{k} = {v:.13g}\n" for k, v in values.items())
    elif fmt == "csv":
        text = _render_table(cfg, ("name", "value"), [(k, float(v)) for k, v in values.items()])
    else:
        doc = {"config": cfg, "results": values, "metadata": _metadata(cfg)}
        text = json.dumps(_json_safe(doc), indent=2, allow_nan=False) + "\n"
    _emit(cfg, text)
    return EXIT_OK


def _curve(cfg, params):
    grid = u_grid_from_config(cfg)
    rows = []
    for u in grid:
        try:
            (pt,) = lambda_L_curve([u], params)
        except NUMERIC_ERRORS as exc:
            raise NumericalFailure(f"numerical failure at u={u!r}: {exc}") from exc
        rows.append(pt)
    return rows


def cmd_tail_curve(cfg):
    params = params_from_config(cfg)
    pts = _curve(cfg, params)
    rows = [tuple(getattr(pt, c) for c in CURVE_COLUMNS) for pt in pts]
    _emit(cfg, _render_table(cfg, CURVE_COLUMNS, rows))
    return EXIT_OK


def cmd_fit(cfg):
    params = params_from_config(cfg)
    pts = _curve(cfg, params)
    fit = tail_order_fit(pts, params.p)
    consts = compute_constants(params)
    result = {
        "tau_hat": fit.tau_hat,
        "tau": consts.tau,
        "tau_rel_error": abs(fit.tau_hat / consts.tau - 1.0),
        "svf_exponent_hat": fit.svf_exponent_hat,
        "svf_exponent": svf_exponent(consts, params),
        "intercept": fit.intercept,
        "residual_max": fit.residual_max,
        "points": len(fit.grid),
    }
    if (cfg["format"] or "json") == "json":
        doc = {"config": cfg, "results": result, "metadata": _metadata(cfg)}
        text = json.dumps(_json_safe(doc), indent=2, allow_nan=False) + "\n"
    else:
        text = _render_table(cfg, ("name", "value"), [(k, float(v)) for k, v in result.items()])
    _emit(cfg, text)
    return EXIT_OK


def cmd_sample(cfg):
    params = params_from_config(cfg)
    n, seed = int(cfg["n"]), int(cfg["seed"])
    if n < 1:
        raise ParameterError("--n must be at least 1")
    batch = sample_bivariate(params, n, seed)
    x = batch.pairs
    summary = {
        "n": n,
        "seed": seed,
        "mean_x1": float(x[:, 0].mean()),
        "mean_x2": float(x[:, 1].mean()),
        "theoretical_mean": params.theta * gig_mean(params.gig),
        "corr": float(np.corrcoef(x[:, 0], x[:, 1])[0, 1]) if n > 2 else math.nan,
        "empirical_C_half": empirical_copula_diag(batch, 0.5) if n >= 40 else math.nan,
    }
    if (cfg["format"] or "csv") == "json":
        doc = {"config": cfg, "results": [{"x1": a, "x2": b} for a, b in x.tolist()],
               "metadata": dict(_metadata(cfg), summary=summary)}
        text = json.dumps(_json_safe(doc), allow_nan=False) + "\n"
    else:
        text = "x1,x2\n" + "".join(f"{a!r},{b!r}\n" for a, b in x.tolist())
    _emit(cfg, text)
    summary_text = json.dumps(_json_safe(summary), indent=2) + "\n"
    (sys.stdout if cfg["out"] else sys.stderr).write(summary_text)
    return EXIT_OK


def _improves(errors):
    return all(b < a for a, b in zip(errors, errors[1:]))


def verification_checks(params: EquiSkewGHParams, y_levels=(-2.0, -5.0)):
    """Yield ``(name, passed, detail)`` for the invariant suite."""
    try:
        consts = compute_constants(params)
    except InvariantViolation as exc:
        yield "constants", False, str(exc)
        return
    th = params.theta
    yield ("phi_alpha > |theta|, phi_alpha + theta > 0",
           consts.phi_alpha > abs(th) and consts.phi_alpha + th > 0,
           f"phi_alpha={consts.phi_alpha:.6g}")
    yield "tau > 1", consts.tau > 1.0, f"tau={consts.tau:.12g}"

    total = math.exp(integrate_log(lambda w: gig_log_pdf(w, params.gig), (0.0, np.inf)))
    yield "GIG density integrates to 1", abs(total - 1) < 1e-8, f"{total!r}"
    pts = [0.0]
    total = integrate(lambda x: np.exp(marginal_log_pdf(x, params)), (-np.inf, np.inf), points=pts)
    yield "marginal density integrates to 1", abs(total - 1) < 1e-8, f"{total!r}"

    for y in y_levels:
        lj = joint_log_cdf_diagonal(y, params)
        lx = xstar_log_cdf(y, params)
        rel = abs(math.expm1(lx - lj))
        yield f"reduction identity at y={y:g}", rel < 1e-7, f"rel diff {rel:.3g}"

    xs = (-20.0, -40.0, -80.0)
    errs = [abs(math.expm1(marginal_log_cdf_asymptotic(x, consts, params) - marginal_log_cdf(x, params)))
            for x in xs]
    ok = _improves(errs) and all(e <= 10 / abs(x) for e, x in zip(errs, xs))
    yield "marginal tail law", ok, " ".join(f"{e:.3g}" for e in errs)

    errs = [abs(math.expm1(joint_log_cdf_diagonal_asymptotic(y, consts, params) - joint_log_cdf_diagonal(y, params)))
            for y in xs]
    ok = _improves(errs) and all(e <= 10 / abs(y) for e, y in zip(errs, xs))
    yield "joint diagonal tail law", ok, " ".join(f"{e:.3g}" for e in errs)

    errs = [abs(math.expm1(boundary_laplace_log_integral(-x, params)
                           - boundary_laplace_log_leading(-x, consts, params))) for x in xs]
    ok = _improves(errs) and all(e <= 10 / abs(x) for e, x in zip(errs, xs))
    yield "boundary Laplace asymptotic", ok, " ".join(f"{e:.3g}" for e in errs)

    u = 1e-6
    q = marginal_quantile(u, params)
    back = math.exp(marginal_log_cdf(q, params))
    yield "quantile round trip at u=1e-6", abs(back / u - 1) < 1e-8, f"{back!r}"

    ok = True
    for uu in (0.5, 1e-2, 1e-4):
        c = math.exp(joint_log_cdf_diagonal(marginal_quantile(uu, params), params))
        ok &= max(2 * uu - 1, 0.0) - 1e-12 <= c <= uu * (1 + 1e-9)
    yield "Frechet-Hoeffding bounds on C(u,u)", ok, ""

    t = np.linspace(-8, 8, 33)
    al = params.alpha
    s = np.exp(log_skew_normal_cdf(t, al)) + np.exp(log_skew_normal_cdf(-t, -al))
    dev = float(np.max(np.abs(s - 1)))
    yield "F_SN(t; alpha) + F_SN(-t; -alpha) = 1", dev < 1e-14, f"max dev {dev:.2g}"


def cmd_verify(cfg):
    params = params_from_config(cfg)
    failures = 0
    lines = []
    for name, ok, detail in verification_checks(params, cfg["y"]):
        failures += not ok
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  [{detail}]" if detail else "") + "\n")
    lines.append(f"{'all checks passed' if not failures else f'{failures} check(s) failed'}\n")
    _emit(cfg, "".join(lines))
    return EXIT_OK if not failures else EXIT_VERIFY


COMMANDS = {
    "constants": cmd_constants,
    "tail-curve": cmd_tail_curve,
    "fit": cmd_fit,
    "sample": cmd_sample,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg)
    except (ParameterError, UsageError) as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except NumericalFailure as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NUMERIC
    except NUMERIC_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
