"""Command-line interface.

``distspec test`` exits 0 when the null is not rejected, 10 when it is, and 1
on errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from typing import Optional, Sequence

from . import __version__
from .bootstrap import LAWS, wild_bootstrap_test
from .competitors import BandwidthRule
from .dataio import (
    ColumnSchema,
    encode_autompg,
    load_csv,
    read_autompg,
    write_power_csv,
    write_power_curves,
)
from .errors import DistSpecError
from .model import make_builtin
from .projection import validate_closed_form
from .simulation import ScenarioSpec, global_drift_oracle, run_power_study
from .statistics import STATISTICS

EXIT_REJECT = 10
EXIT_ERROR = 1


def _floats(s: str) -> list[float]:
    return [float(v) for v in s.split(",") if v.strip()]


def _ints(s: str) -> list[int]:
    return [int(v) for v in s.split(",") if v.strip()]


def _names(s: str) -> list[str]:
    return [v.strip() for v in s.split(",") if v.strip()]


def _seed(s: str) -> int:
    v = int(s)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="distspec", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="test a parametric regression on a data file")
    t.add_argument("--data", required=True)
    t.add_argument("--response", required=True)
    t.add_argument("--predictors", default="all", help="comma-separated names or 'all'")
    t.add_argument("--model", choices=("linear", "scenario4_null"), default="linear")
    t.add_argument("--stat", choices=STATISTICS, default="tn")
    t.add_argument("--boot", type=int, default=300)
    t.add_argument("--level", type=float, default=0.05)
    t.add_argument("--seed", type=_seed, default=0)
    bw = t.add_mutually_exclusive_group()
    bw.add_argument("--bandwidth", type=float)
    bw.add_argument("--bw-const", type=float, default=1.5)
    t.add_argument("--n-dirs", type=int, default=500)
    t.add_argument("--law", choices=LAWS, default="mammen")

    s = sub.add_parser("simulate", help="run a size/power study")
    s.add_argument("--scenario", type=int, choices=(1, 2, 3, 4), required=True)
    s.add_argument("--p", type=_ints, default=[2])
    s.add_argument("--a", type=_floats, default=[0.0])
    s.add_argument("--n", type=int, default=200)
    s.add_argument("--reps", type=int, default=500)
    s.add_argument("--boot", type=int, default=300)
    s.add_argument("--level", type=float, default=0.05)
    s.add_argument("--seed", type=_seed, default=0)
    s.add_argument("--stats", type=_names, default=["tn"])
    s.add_argument("--cov", default="identity")
    s.add_argument("--workers", default="1")
    s.add_argument("--out")
    s.add_argument("--curves-dir", help="also write per-statistic (a, rate) CSVs here")
    s.add_argument("--bw-const", type=float, default=1.5)
    s.add_argument("--n-dirs", type=int, default=500)
    s.add_argument("--law", choices=LAWS, default="mammen")

    k = sub.add_parser("validate-kernel", help="check the closed-form kernel integral by Monte Carlo")
    k.add_argument("--cases", type=int, default=50)
    k.add_argument("--draws", type=int, default=1_000_000)
    k.add_argument("--seed", type=_seed, default=0)

    m = sub.add_parser("autompg", help="test the linear model on the Auto MPG data")
    m.add_argument("--file", required=True)
    m.add_argument("--boot", type=int, default=300)
    m.add_argument("--seed", type=_seed, default=0)

    d = sub.add_parser("drift-oracle", help="Monte Carlo estimate of the global-alternative drift")
    d.add_argument("--scenario", type=int, choices=(1, 2, 3, 4), required=True)
    d.add_argument("--p", type=int, required=True)
    d.add_argument("--a", type=float, required=True)
    d.add_argument("--pairs", type=int, default=1_000_000)
    d.add_argument("--seed", type=_seed, default=0)
    d.add_argument("--cov", default="identity")
    return ap


def _cmd_test(args) -> int:
    preds = None if args.predictors == "all" else tuple(_names(args.predictors))
    data, dropped = load_csv(args.data, ColumnSchema(args.response, preds), return_dropped=True)
    if dropped:
        print(f"dropped {dropped} incomplete row(s)")
    model = make_builtin(args.model, data.p)
    rule = BandwidthRule("power_rule", args.bw_const)
    res = wild_bootstrap_test(
        model, data, args.stat, B=args.boot, law=args.law, level=args.level, seed=args.seed,
        bandwidth=args.bandwidth, rule=rule, n_dirs=args.n_dirs,
    )
    print(f"n={data.n} p={data.p}")
    print(res.summary())
    return EXIT_REJECT if res.reject else 0


def _cmd_simulate(args) -> int:
    grid = [ScenarioSpec(args.scenario, args.n, p, a, args.cov) for p in args.p for a in args.a]
    for s in args.stats:
        if s not in STATISTICS:
            raise DistSpecError(f"unknown statistic {s!r}")
    t0 = time.perf_counter()
    table = run_power_study(
        grid, args.stats, args.reps, args.boot, args.level, args.seed, args.workers,
        law=args.law, rule=BandwidthRule("power_rule", args.bw_const), n_dirs=args.n_dirs,
    )
    print(table.to_text())
    print(f"elapsed {time.perf_counter() - t0:.1f}s")
    if args.out:
        write_power_csv(table, args.out)
    if args.curves_dir:
        write_power_curves(table, args.curves_dir)
    return 0


def _cmd_validate(args) -> int:
    cases = validate_closed_form(args.cases, args.draws, args.seed)
    print(f"{'case':>4} {'p':>2} {'h':>7} {'closed_form':>12} {'estimate':>12} {'std_err':>10} {'z':>6}")
    bad = 0
    for k, c in enumerate(cases):
        flag = c.z > 4.0
        bad += flag
        print(f"{k:>4} {c.p:>2} {c.h:>7.4f} {c.closed_form:>12.6g} {c.estimate:>12.6g} "
              f"{c.std_error:>10.3g} {c.z:>6.2f}{'  *' if flag else ''}")
    print(f"{bad} of {len(cases)} cases beyond 4 standard errors")
    return 1 if bad > 0.05 * len(cases) else 0


def _cmd_autompg(args) -> int:
    data, dropped = encode_autompg(read_autompg(args.file), return_dropped=True)
    print(f"n={data.n} (dropped {dropped} incomplete row(s)), p={data.p}")
    res = wild_bootstrap_test(make_builtin("linear", data.p), data, "tn", B=args.boot, seed=args.seed)
    print(res.summary())
    print(f"p-value: {res.p_value:.6g}")
    return 0


def _cmd_drift(args) -> int:
    spec = ScenarioSpec(args.scenario, 200, args.p, args.a, args.cov)
    est = global_drift_oracle(spec, args.pairs, args.seed)
    print(f"mu1 = {est.estimate:.6g} +/- {est.std_error:.3g}")
    return 0


_COMMANDS = {
    "test": _cmd_test,
    "simulate": _cmd_simulate,
    "validate-kernel": _cmd_validate,
    "autompg": _cmd_autompg,
    "drift-oracle": _cmd_drift,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return _COMMANDS[args.command](args)
    except (DistSpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
