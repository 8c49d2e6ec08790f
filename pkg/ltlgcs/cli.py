#!/usr/bin/env python

"""
The ltlgcs command line.

    ltlgcs run SCENARIO [options]     plan one scenario, write artifacts
    ltlgcs bench DIRECTORY            median stage times over a corpus
    ltlgcs scaling SCENARIO           solve time and cost against Bezier order

Exit status: 0 on success, 2 for invalid input, 3 when the task is
unsatisfiable, 4 when the solver fails. Errors are written to stderr as
one JSON object.
"""

import argparse
import logging
import os
import sys
from typing import Any, Dict, List, Optional

import ltlgcs
from ltlgcs.bench import (
    bench,
    bench_markdown,
    cost_increases,
    scaling,
    write_bench_csv,
    write_scaling_csv,
)
from ltlgcs.error import PlanningError, ScenarioError
from ltlgcs.output import write_plan, write_svg
from ltlgcs.planner import Planner
from ltlgcs.scenario import load

log = logging.getLogger("ltlgcs")


def _solver_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--norm", choices=["l1", "l2"], help="path-length norm")
    parser.add_argument("--order", type=int, help="Bezier order k of each segment")
    parser.add_argument("--smoothness", type=int, help="continuity order d of the spline")
    parser.add_argument("--seed", type=int, help="rounding seed")
    parser.add_argument(
        "--max-round-paths", type=int, dest="max_round_paths", help="rounding attempts"
    )
    parser.add_argument(
        "--strict",
        "--strict-def5",
        action="store_true",
        dest="strict",
        default=None,
        help="accept on the automaton state of the last vertex itself",
    )
    parser.add_argument(
        "--loop-pinning",
        choices=["full", "endpoints"],
        dest="loop_pinning",
        help="how much of the accepting segment a loop must reproduce",
    )


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    names = ["norm", "order", "smoothness", "seed", "max_round_paths", "strict", "loop_pinning"]
    return {name: getattr(args, name, None) for name in names}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ltlgcs", description="Temporal-logic motion planning over convex regions."
    )
    parser.add_argument("--version", action="version", version=ltlgcs.__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="plan one scenario")
    run.add_argument("scenario")
    run.add_argument("--out", default=".", help="directory for plan.json and svg")
    run.add_argument("--dot", metavar="DIR", help="write automaton and graph dumps here")
    _solver_options(run)

    bench_cmd = commands.add_parser("bench", help="time every scenario in a directory")
    bench_cmd.add_argument("corpus")
    bench_cmd.add_argument("--repetitions", type=int, default=3)
    bench_cmd.add_argument("--parallel", action="store_true", help="run scenarios concurrently")
    bench_cmd.add_argument("--csv", metavar="FILE", help="also write the report as CSV")
    _solver_options(bench_cmd)

    scale = commands.add_parser("scaling", help="sweep the Bezier order on one scenario")
    scale.add_argument("scenario")
    scale.add_argument(
        "--orders", default="2,3,4,5,6,7,8,9,10", help="comma-separated Bezier orders"
    )
    scale.add_argument("--csv", metavar="FILE", help="write here instead of stdout")
    _solver_options(scale)
    return parser


def _write_dot(directory: str, name: str, text: str) -> None:
    path = os.path.join(directory, name)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(text)
    log.info("wrote %s", path)


def cmd_run(args: argparse.Namespace) -> int:
    scenario = load(args.scenario)
    req = scenario.request(**_overrides(args))
    planner = Planner()
    if args.verbose:
        planner.on("stage", lambda stage, seconds: log.info("%s: %.3fs", stage, seconds))
        planner.on("loop_retry", lambda vertex: log.info("no loop at %s", vertex))
    prepared = planner.prepare(req)
    if args.dot:
        os.makedirs(args.dot, exist_ok=True)
        _write_dot(args.dot, f"{scenario.name}.transys.dot", prepared.ts.to_dot())
        _write_dot(args.dot, f"{scenario.name}.automaton.dot", prepared.automaton.to_dot())
        _write_dot(args.dot, f"{scenario.name}.gcs.dot", prepared.gcs.to_dot())
    plan = planner.solve(prepared)
    os.makedirs(args.out, exist_ok=True)
    write_plan(plan, scenario.name, scenario.text, args.out)
    write_svg(plan, scenario.regions, scenario.name, args.out)
    print(f"{scenario.name}: cost {plan.cost:.6g} bound {plan.bound:.6g} gap {plan.gap:.3g}")
    print(f"trace: {plan.trace}")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    rows = bench(args.corpus, args.repetitions, args.parallel, _overrides(args))
    sys.stdout.write(bench_markdown(rows))
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as handle:
            write_bench_csv(rows, handle)
    return 0


def cmd_scaling(args: argparse.Namespace) -> int:
    try:
        orders = [int(part) for part in args.orders.split(",") if part.strip()]
    except ValueError as why:
        raise ScenarioError(f"bad --orders: {args.orders}") from why
    scenario = load(args.scenario)
    overrides = _overrides(args)
    overrides.pop("order", None)
    rows = scaling(scenario, orders, overrides)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as handle:
            write_scaling_csv(rows, handle)
    else:
        write_scaling_csv(rows, sys.stdout)
    for order in cost_increases(rows):
        log.warning("cost rose at order %d", order)
    return 0


COMMANDS = {"run": cmd_run, "bench": cmd_bench, "scaling": cmd_scaling}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except PlanningError as why:
        sys.stderr.write(why.to_json() + "\n")
        return why.exit_code


if __name__ == "__main__":
    sys.exit(main())
