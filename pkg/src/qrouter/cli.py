"""Command-line interface.

Exit status on every command: 0 ok / valid / feasible, 1 invalid input,
2 verification failed / infeasible / statistical mismatch. Data goes to
stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import config as cfg
from . import formats
from .errors import QRouterError
from .network import network_report
from .transport import LOST, DELIVERED, compare_to_analytic, simulate_router_transit
from .wiring import build_plan, verify_plan

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FAIL = 2

MAX_PORTS = 4200


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _diag(msg: str) -> None:
    print(msg, file=sys.stderr)


def cmd_plan(args) -> int:
    n = args.n
    if n < 2:
        _diag(f"error: a router needs at least 2 ports, got {n}")
        return EXIT_INPUT
    if n > args.max_n:
        _diag(f"error: {n} ports exceeds the supported maximum of {args.max_n} "
              "(raise it with --max-n)")
        return EXIT_INPUT
    plan = build_plan(n)
    render = {"json": formats.plan_to_json, "dot": formats.plan_to_dot,
              "table": formats.plan_to_table}[args.format]
    sys.stdout.write(render(plan))
    return EXIT_OK


def _read_plan(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise formats.PlanFormatError(f"{path}: {exc.strerror}") from None
    return formats.plan_from_json(text)


def cmd_verify(args) -> int:
    try:
        plan = _read_plan(args.plan)
    except QRouterError as exc:
        _diag(f"error: {exc}")
        return EXIT_INPUT
    report = verify_plan(plan)
    if report.valid:
        print(f"valid: {plan.n_nodes} nodes, {plan.color_count} wavelengths")
        return EXIT_OK
    print(f"invalid: {len(report.violations)} violation(s)")
    for v in report.violations:
        print(v.describe())
    return EXIT_FAIL


def cmd_export_dot(args) -> int:
    try:
        plan = _read_plan(args.plan)
    except QRouterError as exc:
        _diag(f"error: {exc}")
        return EXIT_INPUT
    sys.stdout.write(formats.plan_to_dot(plan))
    return EXIT_OK


def cmd_budget(args) -> int:
    try:
        conf = cfg.load(args.config)
        net = conf.network()
    except QRouterError as exc:
        _diag(f"error: {exc}")
        return EXIT_INPUT
    report = network_report(net, conf.policy)
    if args.format == "csv":
        sys.stdout.write(formats.budget_to_csv(report))
    else:
        sys.stdout.write(formats.dumps(formats.budget_to_dict(report, conf.mux)))
    _diag(f"{report.n_feasible}/{report.n_pairs} pairs feasible")
    return EXIT_OK if report.all_feasible else EXIT_FAIL


def cmd_simulate(args) -> int:
    try:
        conf = cfg.load(args.config)
        sim = conf.sim_config()
        workers = args.workers or conf.sim["workers"]
        report = simulate_router_transit(sim, workers=workers)
    except QRouterError as exc:
        _diag(f"error: {exc}")
        return EXIT_INPUT
    if args.inject_analytic_bias is not None:
        # Test hook: corrupt the analytic reference to exercise the failure path.
        scaled = report.analytic_expected[DELIVERED] * args.inject_analytic_bias
        report = report.with_analytic(**{DELIVERED: scaled,
                                         LOST: report.analytic_expected[LOST]})
    cmp = compare_to_analytic(report, threshold=args.sigma)
    sys.stdout.write(formats.dumps(formats.sim_to_dict(report, cmp)))
    if not cmp.passed:
        _diag("statistical mismatch: " + ", ".join(cmp.failures()))
        return EXIT_FAIL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qrouter",
                description="Wavelength-routed star QKD network planner.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    s = sub.add_parser("plan", help="Generate the router wiring for n ports.")
    s.add_argument("n", type=int)
    s.add_argument("--format", choices=["json", "dot", "table"], default="json")
    s.add_argument("--max-n", type=int, default=MAX_PORTS,
                   help=f"largest port count accepted (default {MAX_PORTS})")
    s.set_defaults(func=cmd_plan)

    s = sub.add_parser("verify", help="Check a plan JSON file.")
    s.add_argument("plan")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("export-dot", help="Convert a plan JSON file to DOT.")
    s.add_argument("plan")
    s.set_defaults(func=cmd_export_dot)

    s = sub.add_parser("budget", help="Per-pair link budgets for a network config.")
    s.add_argument("config")
    s.add_argument("--format", choices=["json", "csv"], default="json")
    s.set_defaults(func=cmd_budget)

    s = sub.add_parser("simulate", help="Monte Carlo router transit vs closed form.")
    s.add_argument("config")
    s.add_argument("--workers", type=int, default=None)
    s.add_argument("--sigma", type=float, default=4.0,
                   help="z-score threshold (default 4)")
    s.add_argument("--inject-analytic-bias", type=float, default=None,
                   help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
