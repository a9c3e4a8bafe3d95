"""Command-line entry point.

    hs run <config> [--set key=value ...]     run a scenario
    hs check <config> [--set key=value ...]   validate a config (dry run)
    hs analytic rho|radius|rescale2d ...      print reference tables (CSV)

Exit codes: 0 ok, 2 invariant violation, 3 solver failure, 4 config error.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from . import analytic, experiments
from .errors import ConfigError, InvariantViolation, SolverError


def _parse_sets(pairs: list[str]) -> dict[str, str]:
    out = {}
    for p in pairs:
        if "=" not in p:
            raise ConfigError(f"--set expects key=value, got {p!r}")
        k, v = p.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _floats(csv: str) -> list[float]:
    try:
        return [float(s) for s in csv.split(",") if s.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad number list {csv!r}") from exc


def _cmd_run(args) -> int:
    cfg = experiments.load_config(args.config, _parse_sets(args.set))
    result = experiments.run_scenario(cfg)
    sys.stdout.write(result.to_csv())
    for name, path in result.paths.items():
        logging.getLogger(__name__).info("wrote %s -> %s", name, path)
    return 0


def _cmd_check(args) -> int:
    cfg = experiments.load_config(args.config, _parse_sets(args.set))
    line = (f"ok: scenario={cfg.scenario} n={cfg.dimension} N={cfg.nodes} "
            f"extent={cfg.extent} ladder={list(cfg.t_ladder)}")
    if cfg.scenario != "limit-problem":
        rec = experiments.suggested_extent(cfg)
        line += f" suggested_extent>={rec:.3g}"
    print(line)
    return 0


def _cmd_analytic(args) -> int:
    if args.table == "rho":
        params = analytic.PointSourceParams(A=args.A, L=args.L, n=args.n)
        print("t,rho")
        for t in _floats(args.t):
            print("%.9g,%.9g" % (t, analytic.front_radius(params, t)))
    elif args.table == "radius":
        params = analytic.RadialParams(A=args.A, a=args.a, b=args.b, L=args.L, n=args.n)
        ts = _floats(args.t)
        Rs = analytic.radius_evolution(params, np.asarray(ts))
        print("t,R")
        for t, R in zip(ts, Rs):
            print("%.9g,%.9g" % (t, R))
    else:
        print("lambda,R")
        for lam in _floats(args.lam):
            print("%.9g,%.9g" % (lam, analytic.rescale_radius_2d(lam)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hs", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("-v", "--verbose", action="store_true", help="INFO-level logging")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario from a config file")
    run.add_argument("config")
    run.add_argument("--set", action="append", default=[], metavar="KEY=VAL",
                     help="override a config key")
    run.set_defaults(func=_cmd_run)

    chk = sub.add_parser("check", help="validate a config without running")
    chk.add_argument("config")
    chk.add_argument("--set", action="append", default=[], metavar="KEY=VAL")
    chk.set_defaults(func=_cmd_check)

    ana = sub.add_parser("analytic", help="print reference tables as CSV")
    ana.add_argument("table", choices=("rho", "radius", "rescale2d"))
    ana.add_argument("--n", type=int, default=3, help="dimension")
    ana.add_argument("--A", type=float, default=1.0)
    ana.add_argument("--L", type=float, default=1.0)
    ana.add_argument("--a", type=float, default=1.0, help="core radius (radius table)")
    ana.add_argument("--b", type=float, default=1.5, help="initial radius (radius table)")
    ana.add_argument("--t", default="1", help="comma-separated times")
    ana.add_argument("--lam", default="10", help="comma-separated lambda values (rescale2d)")
    ana.set_defaults(func=_cmd_analytic)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 4
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 3
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
