"""Command-line surface: evaluation, quartile tables, fitting, sampling,
EVI estimation, tail expansion, and simulation experiments.

Exit codes: 0 success, 2 validation error, 3 numerical non-convergence,
4 I/O error.  Numbers are printed in shortest round-trip decimal form, so
CSV -> JSON -> CSV round trips preserve values bit-for-bit.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .distribution import PlAptParams, Sample, quantile, sample as draw_sample
from . import distribution
from .exceptions import DomainError, NumericalError, PlaptError
from .extremes import WeightSpec, double_hill_components, evi_asymptotic_test, extremal_quantile
from .inference import fit_mle, fit_mle_profile
from .montecarlo import ExperimentConfig, ExperimentKind, run_experiment

SEED_ENV_VAR = "PLAPT_SEED"

_EXIT_OK = 0
_EXIT_VALIDATION = 2
_EXIT_NUMERICAL = 3
_EXIT_IO = 4

# Parameter grids reproduced by the bare `table` subcommand.
_DEFAULT_THETAS = (0.6, 1.5, 3.0, 5.2)
_DEFAULT_PAIRS = ((0.5, 1.1), (1.5, 1.5), (2.0, 2.5), (1.0, 1.1), (1.0, 1.5), (1.0, 2.5))
_DEFAULT_US = (0.25, 0.5, 0.75)


def _fmt(value: float, digits: int | None) -> str:
    if digits is None:
        return repr(float(value))
    return f"{value:.{digits}g}"


def read_numeric_csv(path: str) -> np.ndarray:
    """Read a single-column numeric CSV (optional header, LF or CRLF).

    Raises DomainError naming the offending 1-based line for negative
    values, extra columns, or unparseable data rows.
    """
    values: list[float] = []
    header_allowed = True
    with open(path, "r", encoding="utf-8-sig", newline=None) as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text:
                continue
            if "," in text:
                raise DomainError(f"line {lineno}: expected a single numeric column")
            try:
                v = float(text)
            except ValueError:
                if header_allowed:
                    header_allowed = False
                    continue
                raise DomainError(f"line {lineno}: not a number: {text!r}") from None
            header_allowed = False
            if not math.isfinite(v):
                raise DomainError(f"line {lineno}: non-finite value {text!r}")
            if v < 0.0:
                raise DomainError(f"line {lineno}: negative value {text!r}")
            values.append(v)
    if not values:
        raise DomainError(f"{path}: no numeric data rows")
    return np.asarray(values, dtype=float)


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")


def _params_from(args) -> PlAptParams:
    return PlAptParams(alpha=args.alpha, beta=args.beta, theta=args.theta)


def _seed_from(args) -> int:
    if args.seed is not None:
        return int(args.seed)
    return int(os.environ.get(SEED_ENV_VAR, "0"))


def _weight_from(args) -> WeightSpec:
    if getattr(args, "tau", None) is not None:
        return WeightSpec.power(args.tau, s=args.s)
    return WeightSpec.hill(s=args.s)


def _cmd_eval(args) -> int:
    p = _params_from(args)
    fn = {
        "pdf": distribution.pdf,
        "cdf": distribution.cdf,
        "hazard": distribution.hazard,
        "quantile": distribution.quantile,
    }[args.command]
    points = args.u if args.command == "quantile" else args.x
    col = "u" if args.command == "quantile" else "x"
    lines = [f"{col},{args.command}"]
    for pt in points:
        lines.append(f"{_fmt(pt, args.digits)},{_fmt(fn(p, pt), args.digits)}")
    _emit("\n".join(lines), args.output)
    return _EXIT_OK


def _cmd_table(args) -> int:
    pairs = []
    for token in args.pairs:
        try:
            a, b = token.split(":")
            pairs.append((float(a), float(b)))
        except ValueError:
            raise DomainError(f"bad alpha:beta pair {token!r}") from None
    us = [float(u) for u in args.u]
    header = ["theta", "alpha", "beta"] + [f"q{i + 1}" for i in range(len(us))]
    lines = [",".join(header)]
    for theta in args.thetas:
        for alpha, beta in pairs:
            p = PlAptParams(alpha=alpha, beta=beta, theta=theta)
            qs = [quantile(p, u) for u in us]
            row = [_fmt(theta, args.digits), _fmt(alpha, args.digits), _fmt(beta, args.digits)]
            row += [_fmt(q, args.digits) for q in qs]
            lines.append(",".join(row))
    _emit("\n".join(lines), args.output)
    return _EXIT_OK


def _cmd_sample(args) -> int:
    p = _params_from(args)
    s = draw_sample(p, args.n, _seed_from(args))
    lines = ["x"] + [repr(float(v)) for v in s.values]
    _emit("\n".join(lines), args.output)
    return _EXIT_OK


def _cmd_fit(args) -> int:
    data = Sample(read_numeric_csv(args.input))
    init = None
    if args.theta0 is not None or args.beta0 is not None:
        if args.theta0 is None or args.beta0 is None:
            raise DomainError("provide both --theta0 and --beta0 or neither")
        init = (args.theta0, args.beta0)
    if args.alpha_grid is not None:
        fit, _ = fit_mle_profile(args.alpha_grid, data, init=init)
        n_free = 3
    else:
        fit = fit_mle(args.alpha, data, init=init)
        n_free = 2
    payload = {
        "n": data.n,
        "alpha": fit.params.alpha,
        "theta": fit.params.theta,
        "beta": fit.params.beta,
        "stderr_theta": fit.stderr_theta,
        "stderr_beta": fit.stderr_beta,
        "loglik": fit.loglik,
        "aic": 2.0 * n_free - 2.0 * fit.loglik,
        "bic": n_free * math.log(data.n) - 2.0 * fit.loglik,
        "convergence": {
            "converged": fit.converged,
            "iterations": fit.iterations,
            "score_norm": fit.score_norm,
        },
    }
    _emit(json.dumps(payload, indent=2, sort_keys=True), args.output)
    return _EXIT_OK if fit.converged else _EXIT_NUMERICAL


def _cmd_evi(args) -> int:
    data = Sample(read_numeric_csv(args.input))
    w = _weight_from(args)
    report = double_hill_components(data, w, args.k, target=args.target)
    payload = {
        "n": data.n,
        "k": report.k,
        "weight": {"kind": w.kind, "s": w.s, "tau": w.tau},
        "t_n": report.t_n,
        "a_n": report.a_n,
        "s_n": report.s_n,
        "b_n": report.b_n,
        "m_n": report.m_n,
        "an_sn_ratio": report.an_sn_ratio,
        "z_stat": report.z_stat,
        "ci_low": report.ci_low,
        "ci_high": report.ci_high,
    }
    if args.target is not None:
        test = evi_asymptotic_test(data, w, args.k, args.target)
        payload["test"] = {
            "target": args.target,
            "z_stat": test.z_stat,
            "p_value": test.p_value,
            "lindeberg_warning": test.lindeberg_warning,
        }
    _emit(json.dumps(payload, indent=2, sort_keys=True), args.output)
    return _EXIT_OK


def _cmd_expansion(args) -> int:
    p = _params_from(args)
    rows = []
    for u in args.u:
        e = extremal_quantile(p, u)
        rows.append(
            {"u": u, "value": e.value, "c_ab": e.c_ab, "c0": e.c0, "components": e.components}
        )
    _emit(json.dumps(rows, indent=2, sort_keys=True), args.output)
    return _EXIT_OK


def _cmd_experiment(args) -> int:
    truth = None
    if args.alpha is not None:
        if args.beta is None or args.theta is None:
            raise DomainError("truth requires --alpha, --beta and --theta together")
        truth = PlAptParams(alpha=args.alpha, beta=args.beta, theta=args.theta)
    cfg = ExperimentConfig(
        kind=ExperimentKind(args.kind.replace("-", "_")),
        n=args.n,
        reps=args.reps,
        seed=_seed_from(args),
        truth=truth,
        weight=_weight_from(args),
        k_exponent=args.k_exponent,
        pareto_gamma=args.pareto_gamma,
        alpha_grid=tuple(args.alpha_grid) if args.alpha_grid is not None else None,
    )
    report = run_experiment(cfg, workers=args.workers)
    _emit(report.to_json(), args.output)
    return _EXIT_OK


def _add_param_flags(sub, require: bool = True) -> None:
    sub.add_argument("--alpha", type=float, required=require)
    sub.add_argument("--beta", type=float, required=require)
    sub.add_argument("--theta", type=float, required=require)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plapt",
        description="Alpha-power transformed Pseudo-Lindley distribution toolkit",
    )
    parser.add_argument("--version", action="version", version=f"plapt {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    for name in ("pdf", "cdf", "hazard", "quantile"):
        sub = subs.add_parser(name, help=f"evaluate the {name} at given points")
        _add_param_flags(sub)
        if name == "quantile":
            sub.add_argument("--u", type=float, nargs="+", required=True)
        else:
            sub.add_argument("--x", type=float, nargs="+", required=True)
        sub.add_argument("--digits", type=int, default=None)
        sub.add_argument("--output", default=None)
        sub.set_defaults(func=_cmd_eval)

    table = subs.add_parser("table", help="CSV table of quartiles over a parameter grid")
    table.add_argument("--thetas", type=float, nargs="+", default=list(_DEFAULT_THETAS))
    table.add_argument(
        "--pairs",
        nargs="+",
        default=[f"{a}:{b}" for a, b in _DEFAULT_PAIRS],
        help="alpha:beta pairs, e.g. 0.5:1.1 2:2.5",
    )
    table.add_argument("--u", type=float, nargs="+", default=list(_DEFAULT_US))
    table.add_argument("--digits", type=int, default=None, help="7 matches the reference tables")
    table.add_argument("--output", default=None)
    table.set_defaults(func=_cmd_table)

    smp = subs.add_parser("sample", help="draw a CSV sample by inverse transform")
    _add_param_flags(smp)
    smp.add_argument("--n", type=int, required=True)
    smp.add_argument("--seed", type=int, default=None, help=f"default from ${SEED_ENV_VAR} or 0")
    smp.add_argument("--output", default=None)
    smp.set_defaults(func=_cmd_sample)

    fit = subs.add_parser("fit", help="maximum-likelihood fit of (theta, beta)")
    fit.add_argument("--input", required=True)
    group = fit.add_mutually_exclusive_group(required=True)
    group.add_argument("--alpha", type=float, default=None)
    group.add_argument("--alpha-grid", type=float, nargs="+", default=None)
    fit.add_argument("--theta0", type=float, default=None)
    fit.add_argument("--beta0", type=float, default=None)
    fit.add_argument("--output", default=None)
    fit.set_defaults(func=_cmd_fit)

    evi = subs.add_parser("evi", help="double-Hill extreme-value-index report")
    evi.add_argument("--input", required=True)
    evi.add_argument("--k", type=int, required=True)
    evi.add_argument("--s", type=float, default=1.0)
    evi.add_argument("--tau", type=float, default=None, help="power weights j**tau (default Hill)")
    evi.add_argument("--target", type=float, default=None)
    evi.add_argument("--output", default=None)
    evi.set_defaults(func=_cmd_evi)

    expn = subs.add_parser("expansion", help="asymptotic upper-tail quantile with breakdown")
    _add_param_flags(expn)
    expn.add_argument("--u", type=float, nargs="+", required=True)
    expn.add_argument("--output", default=None)
    expn.set_defaults(func=_cmd_expansion)

    exp = subs.add_parser("experiment", help="run a seeded simulation experiment")
    exp.add_argument(
        "--kind",
        required=True,
        choices=["recovery", "model-compare", "evi-coverage", "maxima-gumbel"],
    )
    _add_param_flags(exp, require=False)
    exp.add_argument("--n", type=int, required=True)
    exp.add_argument("--reps", type=int, required=True)
    exp.add_argument("--seed", type=int, default=None, help=f"default from ${SEED_ENV_VAR} or 0")
    exp.add_argument("--k-exponent", type=float, default=0.6)
    exp.add_argument("--s", type=float, default=1.0)
    exp.add_argument("--tau", type=float, default=None)
    exp.add_argument("--pareto-gamma", type=float, default=None)
    exp.add_argument("--alpha-grid", type=float, nargs="+", default=None)
    exp.add_argument("--workers", type=int, default=1)
    exp.add_argument("--output", default=None)
    exp.set_defaults(func=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return _EXIT_NUMERICAL
    except PlaptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return _EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
