#!/usr/bin/env python

"""
Timing harness: per-scenario median stage times over a corpus, and a
sweep of Bezier orders on one scenario.
"""

from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import dataclass, field
import logging
from typing import Any, Dict, List, Optional, Sequence, TextIO

import numpy as np

from ltlgcs import config
from ltlgcs.error import OrderError, PlanningError
from ltlgcs.planner import Planner
from ltlgcs.scenario import ScenarioFile, corpus, load

log = logging.getLogger(__name__)

STAGES = ("automaton", "product", "solve")


@dataclass
class BenchRow:
    name: str
    timings: Dict[str, float] = field(default_factory=dict)  # median seconds per stage
    cost: Optional[float] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class ScaleRow:
    order: int
    control_points: Optional[int] = None
    seconds: Optional[float] = None
    cost: Optional[float] = None
    error: Optional[str] = None


def _bench_one(path: str, repetitions: int, overrides: Dict[str, Any]) -> BenchRow:
    name = path
    try:
        scenario = load(path)
        name = scenario.name
        req = scenario.request(**overrides)
        planner = Planner()
        runs: Dict[str, List[float]] = {stage: [] for stage in STAGES}
        cost = None
        for _ in range(max(1, repetitions)):
            plan = planner.plan(req)
            for stage in STAGES:
                runs[stage].append(plan.timings.get(stage, 0.0))
            cost = plan.cost
    except PlanningError as why:
        log.warning("%s failed: %s", name, why.detail or why.desc)
        return BenchRow(name, error=why.__class__.__name__)
    except Exception as why:  # pylint: disable=broad-except
        log.exception("%s failed unexpectedly", name)
        return BenchRow(name, error=why.__class__.__name__)
    return BenchRow(name, {stage: float(np.median(times)) for stage, times in runs.items()}, cost)


def bench(
    directory: str,
    repetitions: int = 3,
    parallel: bool = False,
    overrides: Optional[Dict[str, Any]] = None,
) -> List[BenchRow]:
    """
    Median automaton/product/solve seconds for every scenario in a
    directory. Failing scenarios are reported, not raised, whatever the
    exception. Scenarios run one after another unless `parallel`.
    """
    paths = corpus(directory)
    opts = overrides or {}
    if parallel:
        with ThreadPoolExecutor(max_workers=config.POOL_SIZE) as pool:
            return list(pool.map(lambda p: _bench_one(p, repetitions, opts), paths))
    return [_bench_one(path, repetitions, opts) for path in paths]


def write_bench_csv(rows: Sequence[BenchRow], out: TextIO) -> None:
    writer = csv.writer(out)
    writer.writerow(["scenario", *STAGES, "cost", "status"])
    for row in rows:
        cost = "" if row.cost is None else f"{row.cost:.6f}"
        status = "ok" if row.ok else f"failed: {row.error}"
        times = [f"{row.timings[stage]:.6f}" if row.ok else "" for stage in STAGES]
        writer.writerow([row.name, *times, cost, status])


def bench_markdown(rows: Sequence[BenchRow]) -> str:
    lines = [
        "| Scenario | LTL to automaton (s) | Form GCS (s) | Solve (s) |",
        "|---|---|---|---|",
    ]
    for row in rows:
        if row.ok:
            cells = [f"{row.timings[stage]:.3f}" for stage in STAGES]
        else:
            cells = [f"failed ({row.error})", "", ""]
        lines.append(f"| {row.name} | " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def scaling(
    scenario: ScenarioFile, orders: Sequence[int], overrides: Optional[Dict[str, Any]] = None
) -> List[ScaleRow]:
    """
    Re-plan one scenario at every Bezier order in `orders`, recording the
    total number of control points, the solve seconds and the cost. A
    failure at one order is recorded and the sweep goes on.
    """
    planner = Planner()
    rows = []
    for order in orders:
        opts = dict(overrides or {})
        opts["order"] = order
        try:
            req = scenario.request(**opts)
            plan = planner.plan(req)
        except OrderError as why:
            log.warning("order %d rejected: %s", order, why.detail)
            rows.append(ScaleRow(order, error=why.__class__.__name__))
            continue
        except PlanningError as why:
            log.warning("order %d failed: %s", order, why.detail or why.desc)
            rows.append(ScaleRow(order, error=why.__class__.__name__))
            continue
        except Exception as why:  # pylint: disable=broad-except
            log.exception("order %d failed unexpectedly", order)
            rows.append(ScaleRow(order, error=why.__class__.__name__))
            continue
        rows.append(
            ScaleRow(order, len(plan.spline) * (order + 1), plan.timings["solve"], plan.cost)
        )
    return rows


def cost_increases(rows: Sequence[ScaleRow], tol: float = config.CONTAINMENT_TOL) -> List[int]:
    "Orders whose cost exceeds the cost at the previous solved order by more than tol."
    out = []
    previous: Optional[float] = None
    for row in sorted(rows, key=lambda r: r.order):
        if row.cost is None:
            continue
        if previous is not None and row.cost > previous + tol:
            out.append(row.order)
        previous = row.cost
    return out


def write_scaling_csv(rows: Sequence[ScaleRow], out: TextIO) -> None:
    writer = csv.writer(out)
    writer.writerow(["order", "control_points", "solve_seconds", "cost", "status"])
    for row in rows:
        writer.writerow(
            [
                row.order,
                "" if row.control_points is None else row.control_points,
                "" if row.seconds is None else f"{row.seconds:.6f}",
                "" if row.cost is None else f"{row.cost:.6f}",
                "ok" if row.error is None else f"failed: {row.error}",
            ]
        )
