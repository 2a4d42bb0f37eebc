"""Command-line interface: sieve, weight checks, bounds, estimates, scans.

Subcommands accept a TOML config file (``--config``) whose keys mirror
:class:`dirpoly.experiment.ExperimentConfig`; the common flags ``--seed``,
``--replicas``, ``--budget`` and ``--output`` override the corresponding
config entries.  All structured output is JSON (one document, or JSON
lines for scan records).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Mapping

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from . import bounds as bounds_mod
from .arith import (
    dickman_rho,
    mertens_prime_sum,
    sieve_primes,
    smooth_harmonic_asymptotic_check,
    smooth_stats,
)
from .errors import DirpolyError
from .estimate import khintchine_lower, mc_esup
from .experiment import (
    FORMAT_VERSION,
    ExperimentConfig,
    emit_csv,
    fit_growth_exponent,
    resolve_tau,
    run_scan,
)
from .weights import CONDITIONS, check_condition, parse_weight

_CONFIG_KEYS = ("weight", "sigma", "N_list", "tau_rule", "noise_kind",
                "replicas", "budget", "master_seed", "output_path")


def _json_safe(node):
    """Make a structure strictly JSON-serializable (inf/nan to strings)."""
    if isinstance(node, float):
        if math.isinf(node):
            return "inf" if node > 0 else "-inf"
        if math.isnan(node):
            return "nan"
        return node
    if isinstance(node, Mapping):
        return {str(k): _json_safe(v) for k, v in node.items()}
    if isinstance(node, (list, tuple)):
        return [_json_safe(v) for v in node]
    return node


def _emit(doc, stream=None) -> None:
    print(json.dumps(_json_safe(doc), sort_keys=True, indent=2),
          file=stream or sys.stdout)


def _load_config_file(path: str) -> dict:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _merged_config(args) -> ExperimentConfig:
    doc = _load_config_file(args.config) if args.config else {}
    for key in _CONFIG_KEYS:
        flag = {
            "master_seed": "seed",
            "output_path": "output",
        }.get(key, key)
        value = getattr(args, flag, None)
        if value is not None:
            doc[key] = value
    return ExperimentConfig.from_mapping(doc)


def _add_common_overrides(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="TOML config file")
    parser.add_argument("--seed", type=int, help="override master_seed")
    parser.add_argument("--replicas", type=int, help="override replicas")
    parser.add_argument("--budget", type=int, help="override search budget")
    parser.add_argument("--output", help="override output path")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_sieve(args) -> int:
    table = sieve_primes(args.limit)
    doc = {
        "format_version": FORMAT_VERSION,
        "limit": args.limit,
        "pi": table.pi,
        "largest_prime": int(table.primes[-1]) if table.pi else None,
    }
    if args.show_primes:
        doc["primes"] = table.primes.tolist()
    _emit(doc)
    return 0


def _cmd_check_weight(args) -> int:
    spec = parse_weight(args.weight)
    table = sieve_primes(max(args.limit, 4))
    wanted = args.condition or sorted(CONDITIONS)
    out = {}
    ok = True
    for cond in wanted:
        report = check_condition(spec, cond, args.limit, table)
        ok = ok and report.holds
        out[cond] = {
            "holds": report.holds,
            "fitted_constants": dict(report.fitted_constants),
            "witness_count": report.witness_count,
            "first_witnesses": [list(w) for w in report.witnesses[:5]],
        }
    _emit({
        "format_version": FORMAT_VERSION,
        "weight": spec.text(),
        "limit": args.limit,
        "conditions": out,
    })
    return 0 if ok else 3


def _cmd_bounds(args) -> int:
    spec = parse_weight(args.weight)
    table = sieve_primes(max(args.N, 4))
    tau = resolve_tau(args.tau_rule, args.N, table)
    doc: dict = {
        "format_version": FORMAT_VERSION,
        "N": args.N,
        "sigma": args.sigma,
        "tau": tau,
        "weight": spec.text(),
        "envelopes": {},
    }
    if args.N >= 16:
        regime = bounds_mod.classify_regime(args.N, tau, table)
        doc["regime"] = regime.case_id
        doc["boundaries"] = [regime.b_low, regime.b_high]
    env = bounds_mod.envelope_baseline(args.N, args.sigma, spec, table)
    doc["envelopes"]["baseline"] = json.loads(env.to_json())
    try:
        env = bounds_mod.envelope_by_tau(args.N, args.sigma, tau, spec, table)
        doc["envelopes"]["by_tau"] = json.loads(env.to_json())
    except DirpolyError as exc:
        doc["envelopes"]["by_tau"] = {"error": str(exc)}
    try:
        lower, upper = bounds_mod.envelope_small_tau(tau, args.sigma, table)
        doc["envelopes"]["small_tau"] = {
            "lower": json.loads(lower.to_json()),
            "upper": json.loads(upper.to_json()),
        }
    except DirpolyError as exc:
        doc["envelopes"]["small_tau"] = {"error": str(exc)}
    _emit(doc)
    return 0


def _cmd_estimate(args) -> int:
    spec = parse_weight(args.weight)
    table = sieve_primes(max(args.N, 4))
    tau = resolve_tau(args.tau_rule, args.N, table)
    result = mc_esup(
        spec, args.N, args.sigma, tau, args.noise_kind,
        args.replicas if args.replicas is not None else 8,
        args.budget if args.budget is not None else 4096,
        args.seed if args.seed is not None else 0,
        table,
    )
    doc = json.loads(result.to_json())
    doc["format_version"] = FORMAT_VERSION
    doc["tau"] = tau
    if tau >= 2 and args.N >= 2:
        doc["khintchine_lower"] = khintchine_lower(
            spec, args.N, args.sigma, tau, table)
    if args.output:
        with open(args.output, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(_json_safe(doc), sort_keys=True) + "\n")
    _emit(doc)
    return 0


def _cmd_scan(args) -> int:
    config = _merged_config(args)
    records = run_scan(config)
    errors = 0
    for record in records:
        if record["status"] == "ok":
            print(
                f"N={record['N']} tau={record['tau']} "
                f"mean={record['mc']['mean']:.6g} "
                f"stderr={record['mc']['stderr']:.3g}"
            )
        else:
            errors += 1
            print(f"N={record['N']} ERROR {record['error']}", file=sys.stderr)
    if not config.output_path:
        for record in records:
            print(json.dumps(_json_safe(record), sort_keys=True))
    if args.csv:
        emit_csv(records, args.csv_columns.split(","), args.csv)
    return 0 if errors == 0 else 3


def _cmd_fit(args) -> int:
    with open(args.records, "r", encoding="utf-8") as fh:
        records = [json.loads(line) for line in fh if line.strip()]
    fit = fit_growth_exponent(records, args.selector, detrend=args.detrend)
    _emit({
        "format_version": FORMAT_VERSION,
        "selector": args.selector,
        "detrend": fit.detrend,
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r2": fit.r2,
        "raw_slope": fit.raw_slope,
        "detrended_slope": fit.detrended_slope,
        "points": [list(p) for p in fit.points],
    })
    return 0


def _cmd_smooth(args) -> int:
    table = sieve_primes(max(int(args.x), 4))
    stats = smooth_stats(args.x, args.y, [args.beta], table)
    u = math.log(args.x) / math.log(args.y)
    doc = {
        "format_version": FORMAT_VERSION,
        "x": args.x,
        "y": args.y,
        "count": stats.count,
        "harmonic_sum": stats.harmonic_sums[args.beta],
        "u": u,
        "dickman_rho": dickman_rho(u),
        "mertens": None,
    }
    if args.x >= 2:
        chk = mertens_prime_sum(args.x, table)
        doc["mertens"] = {
            "value": chk.value,
            "reference": chk.reference,
            "tolerance": chk.tolerance,
            "within": chk.within,
        }
    if args.beta == 1.0:
        chk = smooth_harmonic_asymptotic_check(args.x, args.y, table)
        doc["asymptotic_check"] = {
            "lhs": chk.lhs, "rhs": chk.rhs, "u": chk.u,
            "residual": chk.residual, "residual_over_u": chk.residual_over_u,
        }
    _emit(doc)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dirpoly",
        description="Numerical experiments with random Dirichlet polynomials",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sieve", help="sieve primes and report pi(limit)")
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--show-primes", action="store_true")
    p.set_defaults(func=_cmd_sieve)

    p = sub.add_parser("check-weight", help="run growth-condition checks")
    p.add_argument("--weight", required=True)
    p.add_argument("--limit", type=int, default=1000)
    p.add_argument("--condition", action="append",
                   choices=sorted(CONDITIONS),
                   help="repeatable; default: all conditions")
    p.set_defaults(func=_cmd_check_weight)

    p = sub.add_parser("bounds", help="print growth envelopes")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--tau-rule", default="full_pi_N",
                   help="full_pi_N, nu_optimal, or fixed:<k>")
    p.add_argument("--weight", default="one")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("estimate", help="one Monte-Carlo E sup estimate")
    p.add_argument("--weight", default="one")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--tau-rule", default="full_pi_N")
    p.add_argument("--noise-kind", default="rademacher",
                   choices=["rademacher", "gaussian"])
    p.add_argument("--seed", type=int)
    p.add_argument("--replicas", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--output")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("scan", help="run a config-driven scan")
    _add_common_overrides(p)
    p.add_argument("--weight")
    p.add_argument("--sigma", type=float)
    p.add_argument("--N-list", dest="N_list", type=int, nargs="+")
    p.add_argument("--tau-rule", dest="tau_rule")
    p.add_argument("--noise-kind", dest="noise_kind",
                   choices=["rademacher", "gaussian"])
    p.add_argument("--csv", help="also emit a CSV file here")
    p.add_argument("--csv-columns", default="N,tau,mc.mean,mc.stderr")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("fit", help="fit a growth exponent over scan records")
    p.add_argument("--records", required=True, help="JSON-lines file")
    p.add_argument("--selector", default="mc.mean")
    p.add_argument("--detrend", default="none", choices=["none", "log"])
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("smooth", help="smooth-number counts and sums")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.set_defaults(func=_cmd_smooth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DirpolyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
