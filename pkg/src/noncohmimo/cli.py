"""Command-line front door.

Subcommands: ``gdof`` (closed forms and solvers), ``rates`` (scheme
comparison at T = 2), ``verify`` (analytic check suite, JSON lines),
``sweep`` (SNR sweep of the Gaussian-codebook bound with slopes).

Every run embeds the seed, sample count and library version in its output
header; identical invocations with identical seeds produce byte-identical
output.  Exit codes: 0 success, 1 domain/infeasible parameters, 2 usage.
A flat ``key = value`` config file supplies defaults via ``--config`` and
the environment variable NONCOH_SEED supplies the default seed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict

from . import __version__
from .channel import LinkExponents
from .errors import ConfigurationError, DomainError
from .gdof import (
    gdof_2x2_inner,
    gdof_2x2_sym,
    gdof_gaussian_codebook,
    gdof_miso,
    gdof_parallel,
    gdof_simo,
    gdof_siso,
    gdof_training,
    solve_p8_grid,
    solve_p9_corners,
)
from .numerics import MonteCarloConfig
from .rates import RateScenario, compare_rates, mi_lower_bound_gaussian
from .verify import (
    DEFAULT_GRID,
    check_appendix_k_floor,
    check_fact_chi_squared,
    check_fact_jensen_gap,
    check_fact_recip_exponential,
    check_inner_outer_match,
    check_lemma_isotropic_radial,
    run_default_suite,
)

#: the four published reference scenarios (snr_db, direct_gain, cross_gain)
TABLE2_SCENARIOS = (
    (22.0, 0.1, 0.025),
    (23.0, 0.1, 0.025),
    (23.0, 0.1, 0.016),
    (23.0, 0.1, 0.040),
)

_USAGE_EXIT = 2
_DOMAIN_EXIT = 1


def _load_config(path):
    values = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"malformed config line: {line!r}")
            key, _, val = line.partition("=")
            values[key.strip().replace("_", "-")] = val.strip()
    return values


def _fallback(args, config, name, cast, default=None):
    """CLI value if given, else config file, else default."""
    current = getattr(args, name.replace("-", "_"), None)
    if current is not None:
        return current
    if name in config:
        return cast(config[name])
    return default


def _resolve_seed(args, config):
    seed = _fallback(args, config, "seed", int)
    if seed is None:
        env = os.environ.get("NONCOH_SEED")
        seed = int(env) if env else 0
    return seed


def _emit(meta, rows, fmt, out):
    lines = []
    if fmt == "json":
        lines.append(json.dumps({"meta": meta, "results": rows}, indent=2))
    elif fmt == "csv":
        for key, value in meta.items():
            lines.append(f"# {key}={value}")
        if rows:
            header = list(rows[0].keys())
            lines.append(",".join(header))
            for row in rows:
                lines.append(",".join(str(row[k]) for k in header))
    else:  # pretty
        lines.append(" | ".join(f"{k}={v}" for k, v in meta.items()))
        for row in rows:
            lines.append("  ".join(f"{k}={v}" for k, v in row.items()))
    text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _meta(units, seed=None, n_samples=None):
    return {
        "version": __version__,
        "seed": seed,
        "n_samples": n_samples,
        "units": units,
    }


def _parse_gammas(text):
    try:
        values = [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise DomainError(f"bad exponent list: {text!r}") from exc
    if not values:
        raise DomainError("empty exponent list")
    return values


def _cmd_gdof(args, config):
    kind = args.kind
    t = _fallback(args, config, "t", int)
    if t is None:
        raise DomainError("--t is required")
    rows = []
    if kind in ("siso",):
        gamma = _fallback(args, config, "gamma", float)
        if gamma is None:
            raise DomainError("--gamma is required for siso")
        rows.append({"kind": kind, "per_symbol": gdof_siso(gamma, t)})
    elif kind in ("parallel", "simo", "miso"):
        gammas = _fallback(args, config, "gammas", _parse_gammas)
        if gammas is None:
            raise DomainError("--gammas is required")
        if isinstance(gammas, str):
            gammas = _parse_gammas(gammas)
        fn = {"parallel": gdof_parallel, "simo": gdof_simo, "miso": gdof_miso}[kind]
        rows.append({"kind": kind, "per_symbol": fn(gammas, t)})
    elif kind == "sym2x2":
        gd, gcl = _require_gd_gcl(args, config)
        rows.append({"kind": kind, "per_symbol": gdof_2x2_sym(gd, gcl, t)})
    elif kind == "inner2x2":
        gd, gcl = _require_gd_gcl(args, config)
        ga = _fallback(args, config, "ga", float, 0.0)
        gb = _fallback(args, config, "gb", float, 0.0)
        gc = _fallback(args, config, "gc", float, 0.0)
        exps = LinkExponents.symmetric(gd, gcl)
        rows.append(
            {"kind": kind, "per_symbol": gdof_2x2_inner(ga, gb, gc, exps, t)}
        )
    elif kind == "gausscode":
        gd, gcl = _require_gd_gcl(args, config)
        m = _fallback(args, config, "m", int)
        if m is None:
            raise DomainError("--m is required for gausscode")
        rows.append(
            {"kind": kind, "per_symbol": gdof_gaussian_codebook(m, gd, gcl, t)}
        )
    elif kind == "training":
        gd = _fallback(args, config, "gd", float)
        m = _fallback(args, config, "m", int)
        if gd is None or m is None:
            raise DomainError("--m and --gd are required for training")
        rows.append({"kind": kind, "per_symbol": gdof_training(m, gd, t)})
    elif kind == "p9":
        gd, gcl = _require_gd_gcl(args, config)
        if t == 1:
            rows.append(
                {
                    "kind": kind,
                    "per_symbol": 0.0,
                    "per_block": 0.0,
                    "gamma_a": 0.0,
                    "gamma_b": 0.0,
                    "gamma_c": 0.0,
                }
            )
        else:
            sol = solve_p9_corners(gd, gcl, t)
            rows.append({"kind": kind, **asdict(sol)})
    elif kind == "p8grid":
        g11 = _fallback(args, config, "g11", float)
        g12 = _fallback(args, config, "g12", float)
        g21 = _fallback(args, config, "g21", float)
        g22 = _fallback(args, config, "g22", float)
        if None in (g11, g12, g21, g22):
            raise DomainError("--g11 --g12 --g21 --g22 are required for p8grid")
        grid_points = _fallback(args, config, "grid-points", int, 17)
        refine = _fallback(args, config, "refine-iters", int, 200)
        exps = LinkExponents.from_matrix([[g11, g12], [g21, g22]])
        sol = solve_p8_grid(exps, t, grid_points=grid_points, refine_iters=refine)
        rows.append({"kind": kind, **asdict(sol)})
    else:  # pragma: no cover - argparse restricts choices
        raise DomainError(f"unknown gdof subcommand {kind!r}")
    _emit(_meta("gDoF (dimensionless)"), rows, args.format, args.out)
    return 0


def _require_gd_gcl(args, config):
    gd = _fallback(args, config, "gd", float)
    gcl = _fallback(args, config, "gcl", float)
    if gd is None or gcl is None:
        raise DomainError("--gd and --gcl are required")
    return gd, gcl


def _report_row(snr_db, direct, cross, report):
    return {
        "snr_db": snr_db,
        "direct_gain": direct,
        "cross_gain": cross,
        "noncoherent": report.noncoherent.mean,
        "noncoherent_std_error": report.noncoherent.std_error,
        "siso_training": report.siso_training,
        "parallel_training": report.parallel_training,
        "gain": report.gain,
    }


def _cmd_rates(args, config):
    seed = _resolve_seed(args, config)
    n = _fallback(args, config, "n", int, 10_000_000)
    workers = _fallback(args, config, "workers", int, 1)
    mc = MonteCarloConfig(n_samples=n, seed=seed, n_workers=workers)
    rows = []
    if args.table2:
        scenarios = TABLE2_SCENARIOS
    else:
        snr_db = _fallback(args, config, "snr-db", float)
        direct = _fallback(args, config, "direct", float, 0.1)
        cross = _fallback(args, config, "cross", float)
        if snr_db is None or cross is None:
            raise DomainError("--snr-db and --cross are required (or --table2)")
        scenarios = ((snr_db, direct, cross),)
    for snr_db, direct, cross in scenarios:
        scenario = RateScenario(snr_db=snr_db, direct_gain=direct, cross_gain=cross)
        report = compare_rates(scenario, mc)
        rows.append(_report_row(snr_db, direct, cross, report))
    _emit(_meta("bits/symbol", seed, n), rows, args.format, args.out)
    return 0


_VERIFY_SINGLE = {
    "fact1": (check_fact_jensen_gap, ("a", "b", "mu")),
    "fact2": (check_fact_chi_squared, ("a", "b", "k")),
    "fact3": (check_fact_recip_exponential, ("b", "mu")),
    "lemma1": (check_lemma_isotropic_radial, ("n", "sigma_sq")),
    "kfloor": (check_appendix_k_floor, ("k_mag", "l")),
    "innerouter": (check_inner_outer_match, ("gamma_d", "gamma_cl", "t")),
}

_VERIFY_ARG_MAP = {
    "a": "a",
    "b": "b",
    "mu": "mu",
    "k": "k",
    "n": "n",
    "sigma2": "sigma_sq",
    "kmag": "k_mag",
    "l": "l",
    "gd": "gamma_d",
    "gcl": "gamma_cl",
    "t": "t",
}


def _verify_line(name, params, result):
    record = {"check": name, "params": params, **asdict(result)}
    return json.dumps(record)


def _cmd_verify(args, config):
    seed = _resolve_seed(args, config)
    n = _fallback(args, config, "samples", int, 100_000)
    workers = _fallback(args, config, "workers", int, 1)
    mc = MonteCarloConfig(n_samples=n, seed=seed, n_workers=workers)

    lines = [
        json.dumps(
            {"version": __version__, "seed": seed, "n_samples": n,
             "units": "bits unless noted"}
        )
    ]
    all_passed = True
    if args.check is None or args.all:
        results = run_default_suite(mc=mc)
        for name, params, result in results:
            all_passed &= result.passed
            lines.append(_verify_line(name, params, result))
    else:
        name = args.check
        if name not in _VERIFY_SINGLE and name != "lqnorm":
            raise DomainError(f"unknown check {name!r}")
        explicit = {
            _VERIFY_ARG_MAP[k]: getattr(args, k)
            for k in _VERIFY_ARG_MAP
            if getattr(args, k, None) is not None
        }
        if name == "lqnorm" or not explicit:
            results = run_default_suite(mc=mc, checks=[name])
            for cname, params, result in results:
                all_passed &= result.passed
                lines.append(_verify_line(cname, params, result))
        else:
            fn, required = _VERIFY_SINGLE[name]
            missing = [p for p in required if p not in explicit]
            if missing:
                raise DomainError(f"{name} needs parameters {missing}")
            if name in ("innerouter",):
                result = fn(**explicit)
            else:
                result = fn(mc=mc, **explicit)
            all_passed &= result.passed
            lines.append(_verify_line(name, explicit, result))

    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all_passed else 1


def _parse_range(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigurationError("range must be START:STOP:STEP in dB")
    start, stop, step = (float(p) for p in parts)
    if step <= 0:
        raise ConfigurationError("range step must be positive")
    values = []
    v = start
    while v <= stop + 1e-9:
        values.append(round(v, 9))
        v += step
    return values


def _cmd_sweep(args, config):
    seed = _resolve_seed(args, config)
    n = _fallback(args, config, "samples", int, 200_000)
    workers = _fallback(args, config, "workers", int, 1)
    m = _fallback(args, config, "m", int, 2)
    t = _fallback(args, config, "t", int, 4)
    gd = _fallback(args, config, "gd", float, 1.0)
    gcl = _fallback(args, config, "gcl", float, 0.5)
    rng_text = _fallback(args, config, "snr-db", str, "30:40:5")
    snr_dbs = _parse_range(rng_text)
    if not snr_dbs:
        print("empty SNR range", file=sys.stderr)
        return _USAGE_EXIT

    exps = LinkExponents.symmetric(gd, gcl, size=m)
    predicted = gdof_gaussian_codebook(m, gd, gcl, t)
    mc = MonteCarloConfig(n_samples=n, seed=seed, n_workers=workers)
    rows = []
    prev = None
    for snr_db in snr_dbs:
        snr = 10.0 ** (snr_db / 10.0)
        est = mi_lower_bound_gaussian(m, t, snr, exps, mc)
        slope = ""
        if prev is not None:
            dlog2 = (snr_db - prev[0]) / 10.0 * math.log2(10.0)
            slope = (est.mean - prev[1]) / dlog2
        rows.append(
            {
                "snr_db": snr_db,
                "bound_bits_per_symbol": est.mean,
                "std_error": est.std_error,
                "slope_vs_log2snr": slope,
                "predicted_gdof": predicted,
            }
        )
        prev = (snr_db, est.mean)
    _emit(_meta("bits/symbol; slopes dimensionless", seed, n), rows, args.format, args.out)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="noncoh",
        description="gDoF and achievable-rate calculator for noncoherent "
        "block-fading MIMO with asymmetric link strengths",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("json", "csv", "pretty"), default="pretty")
        p.add_argument("--out", default=None, help="write output to FILE")
        p.add_argument("--config", default=None, help="flat key = value config file")
        p.add_argument("--seed", type=int, default=None)

    g = sub.add_parser("gdof", help="closed-form and solver gDoF queries")
    g.add_argument(
        "kind",
        choices=(
            "siso", "parallel", "simo", "miso", "sym2x2",
            "inner2x2", "gausscode", "training", "p9", "p8grid",
        ),
    )
    g.add_argument("--gamma", type=float, default=None)
    g.add_argument("--gammas", type=str, default=None)
    g.add_argument("--gd", type=float, default=None)
    g.add_argument("--gcl", type=float, default=None)
    g.add_argument("--t", type=int, default=None)
    g.add_argument("--m", type=int, default=None)
    g.add_argument("--ga", type=float, default=None)
    g.add_argument("--gb", type=float, default=None)
    g.add_argument("--gc", type=float, default=None)
    g.add_argument("--g11", type=float, default=None)
    g.add_argument("--g12", type=float, default=None)
    g.add_argument("--g21", type=float, default=None)
    g.add_argument("--g22", type=float, default=None)
    g.add_argument("--grid-points", type=int, default=None)
    g.add_argument("--refine-iters", type=int, default=None)
    common(g)

    r = sub.add_parser("rates", help="compare the three schemes at T = 2")
    r.add_argument("--snr-db", type=float, default=None)
    r.add_argument("--direct", type=float, default=None)
    r.add_argument("--cross", type=float, default=None)
    r.add_argument("--n", type=int, default=None, help="Monte-Carlo samples")
    r.add_argument("--workers", type=int, default=None)
    r.add_argument("--table2", action="store_true",
                   help="run the four bundled reference scenarios")
    common(r)

    v = sub.add_parser("verify", help="run analytic checks (JSON lines)")
    v.add_argument("check", nargs="?", default=None,
                   choices=(None, "fact1", "fact2", "fact3", "lemma1",
                            "lqnorm", "kfloor", "innerouter"))
    v.add_argument("--all", action="store_true")
    v.add_argument("--samples", type=int, default=None)
    v.add_argument("--workers", type=int, default=None)
    v.add_argument("--a", type=float, default=None)
    v.add_argument("--b", type=float, default=None)
    v.add_argument("--mu", type=float, default=None)
    v.add_argument("--k", type=int, default=None)
    v.add_argument("--n", type=int, default=None, help="dimension for lemma1")
    v.add_argument("--sigma2", type=float, default=None)
    v.add_argument("--kmag", type=float, default=None)
    v.add_argument("--l", type=float, default=None)
    v.add_argument("--gd", type=float, default=None)
    v.add_argument("--gcl", type=float, default=None)
    v.add_argument("--t", type=int, default=None)
    common(v)

    s = sub.add_parser("sweep", help="SNR sweep of the Gaussian-codebook bound")
    s.add_argument("--m", type=int, default=None)
    s.add_argument("--t", type=int, default=None)
    s.add_argument("--gd", type=float, default=None)
    s.add_argument("--gcl", type=float, default=None)
    s.add_argument("--snr-db", type=str, default=None, help="START:STOP:STEP in dB")
    s.add_argument("--samples", type=int, default=None)
    s.add_argument("--workers", type=int, default=None)
    common(s)

    return parser


_COMMANDS = {
    "gdof": _cmd_gdof,
    "rates": _cmd_rates,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else 0
    config = {}
    if getattr(args, "config", None):
        try:
            config = _load_config(args.config)
        except (OSError, ConfigurationError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return _USAGE_EXIT
    try:
        return _COMMANDS[args.command](args, config)
    except (DomainError, ConfigurationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _DOMAIN_EXIT


if __name__ == "__main__":
    sys.exit(main())
