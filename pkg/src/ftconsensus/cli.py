"""Command-line entry point: ``ftconsensus {run,reproduce,list,bound,report}``."""
from __future__ import annotations

import argparse
import csv
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .graph import GraphError
from .integrator import IntegrationError
from .metrics import DEFAULT_EPSILON, ConsensusReport, sustained_below
from .protocols import SingularityError, Variant, bound_consensus_time, check_condition
from .scalar import ConditionError, ScalarGains, bound_scalar
from .scenario import (
    Scenario,
    ScenarioError,
    builtin_scenarios,
    emit_csv,
    emit_report,
    emit_summary,
    load_scenario,
    run_scenario,
)

EXIT_OK, EXIT_INPUT, EXIT_RUNTIME = 0, 1, 2


def _apply_overrides(sc: Scenario, args: argparse.Namespace) -> Scenario:
    settings = sc.integrator
    if args.dt is not None or args.t_end is not None:
        settings = replace(
            settings,
            dt=settings.dt if args.dt is None else args.dt,
            t_end=settings.t_end if args.t_end is None else args.t_end,
            record_every=None,
        )
    protocol = sc.protocol if args.gamma is None else replace(sc.protocol, gamma=args.gamma)
    epsilon = sc.epsilon if args.epsilon is None else args.epsilon
    return replace(sc, integrator=settings, protocol=protocol, epsilon=epsilon)


def _run_one(sc: Scenario, out: Path | None) -> ConsensusReport:
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        warnings.showwarning = _show_warning
        traj, report = run_scenario(sc)
    if out is not None:
        emit_csv(traj, out / f"{sc.name}.csv")
        emit_report(report, out / f"{sc.name}.report.txt")
    return report


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def _print_report(report: ConsensusReport) -> None:
    emit_report(report, sys.stdout)


def cmd_run(args) -> int:
    sc = _apply_overrides(load_scenario(args.file), args)
    out = _prepare_out(args.out)
    _print_report(_run_one(sc, out))
    return EXIT_OK


def cmd_reproduce(args) -> int:
    available = builtin_scenarios()
    if args.name == "all":
        names = list(available)
    elif args.name in available:
        names = [args.name]
    else:
        raise ScenarioError(f"unknown built-in scenario {args.name!r}; choose from {', '.join(available)} or 'all'")
    scenarios = [_apply_overrides(available[name], args) for name in names]
    out = _prepare_out(args.out)
    if args.jobs > 1 and len(scenarios) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_run_one, scenarios, [out] * len(scenarios)))
    else:
        reports = [_run_one(sc, out) for sc in scenarios]
    for i, report in enumerate(reports):
        if i:
            print()
        _print_report(report)
    if out is not None and len(reports) > 1:
        emit_summary(reports, out / "summary.csv")
    return EXIT_OK


def cmd_list(args) -> int:
    for name, sc in builtin_scenarios().items():
        c = sc.protocol
        print(f"{name:12s} {c.variant.value:12s} lambda={c.lam:g} rho={c.rho:g} x0={list(sc.x0)}")
    return EXIT_OK


def cmd_bound(args) -> int:
    if args.variant == "scalar":
        g = ScalarGains(args.lam, args.rho)
        threshold = args.lam**2 / 4.0
        print(f"condition: rho > lambda^2/4 = {threshold!r}: {'satisfied' if args.rho > threshold else 'violated'}")
        print(f"bound={bound_scalar(g)!r}")
        return EXIT_OK
    variant = Variant(args.variant)
    check = check_condition(variant, args.lam, args.rho, args.mu, args.omega_s, args.n, args.kappa, args.K)
    print(f"condition_satisfied={'true' if check.satisfied else 'false'}")
    print(f"rho_threshold={check.threshold!r}")
    if check.reaching_threshold is not None:
        print(f"mu_threshold={check.reaching_threshold!r}")
    bound = bound_consensus_time(variant, args.lam, args.rho, args.mu, args.omega_s, args.n, args.kappa, args.K)
    if bound.reaching is not None:
        print(f"reaching_bound={bound.reaching!r}")
        print(f"consensus_bound={bound.consensus!r}")
    print(f"bound={bound.total!r}")
    return EXIT_OK


def cmd_report(args) -> int:
    """Summarise a trajectory CSV written by ``run``/``reproduce``."""
    with open(args.csv, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(v) for v in row] for row in reader])
    if data.size == 0:
        raise ScenarioError(f"{args.csv}: no samples")
    col = {name: k for k, name in enumerate(header)}
    if "spread" not in col or "t" not in col:
        raise ScenarioError(f"{args.csv}: missing 't' or 'spread' column")
    xs = [col[h] for h in header if h.startswith("x") and h[1:].isdigit()]
    us = [col[h] for h in header if h.startswith("u") and h[1:].isdigit()]
    ss = [col[h] for h in header if h.startswith("s") and h[1:].isdigit()]
    eps = DEFAULT_EPSILON if args.epsilon is None else args.epsilon
    times = data[:, col["t"]]
    t_star = sustained_below(times, data[:, col["spread"]], eps)
    lines = {
        "samples": len(times),
        "consensus_time": t_star,
        "consensus_value": float(data[-1, xs].mean()) if t_star is not None else None,
        "max_spread_final": float(data[-1, col["spread"]]),
        "max_control": float(np.abs(data[:, us]).max()),
    }
    if ss:
        lines["reaching_time"] = sustained_below(times, np.abs(data[:, ss]).max(axis=1), eps)
    for k, v in lines.items():
        print(f"{k}={'none' if v is None else repr(v) if isinstance(v, float) else v}")
    return EXIT_OK


def _prepare_out(out: str | None) -> Path | None:
    if out is None:
        return None
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _add_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="directory for <name>.csv and <name>.report.txt")
    p.add_argument("--dt", type=float, help="override the integration step")
    p.add_argument("--t-end", dest="t_end", type=float, help="override the horizon")
    p.add_argument("--epsilon", type=float, help="override the consensus threshold")
    p.add_argument("--gamma", type=float, help="override the regularization constant")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ftconsensus", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario file")
    p.add_argument("file")
    _add_overrides(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("reproduce", help="run a built-in example, or 'all'")
    p.add_argument("name")
    p.add_argument("--jobs", type=int, default=1, help="run scenarios in parallel processes")
    _add_overrides(p)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("list", help="list built-in examples")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("bound", help="sufficient condition and consensus-time bound")
    p.add_argument("--variant", default="scalar", choices=["scalar"] + [v.value for v in Variant])
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--mu", type=float)
    p.add_argument("--omega-s", dest="omega_s", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--K", type=float, help="largest preassigned weight (weighted variant)")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("report", help="summarise a trajectory CSV")
    p.add_argument("csv")
    p.add_argument("--epsilon", type=float)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (IntegrationError, SingularityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ScenarioError, GraphError, ConditionError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
