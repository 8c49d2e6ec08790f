#!/usr/bin/env python

"""
ltlgcs Planner

Turns a temporal-logic task over labeled convex regions into a smooth
Bezier spline. Co-safe formulas go through a DFA and a single shortest
path; other formulas go through a deterministic Buchi automaton, a prefix
to an accepting vertex, and a loop that closes on that vertex's segment.

A Planner is an EventEmitter; it emits:

* `stage` (name, seconds) after each of `automaton`, `product`, `solve`
* `round` (attempt, path, cost) for every rounded path; cost is None when
  the path's restriction is infeasible
* `loop_retry` (vertex) when an accepting vertex admits no loop and stops
  being accepting
"""

from dataclasses import dataclass, field
import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ltlgcs import config
from ltlgcs.bezier import BezierCurve, BezierSpline, Segment, trace
from ltlgcs.error import (
    DimensionError,
    InfeasibleRelaxationError,
    LassoRequiredError,
    LetterError,
    NoLoopFoundError,
    NoPathFoundError,
    NotCoSafeError,
    OrderError,
    ScenarioError,
    UnsatisfiableError,
    VerificationError,
)
from ltlgcs.events import EventEmitter, timed
from ltlgcs.gcs.graph import CostSpec, Gcs, Norm, Vertex, loop_problem, product
from ltlgcs.gcs.solver import PathSolution, round_paths, solve_relaxation
from ltlgcs.geometry import LabeledRegion
from ltlgcs.ltl.automata import Automaton, AutomatonKind, ltlf_to_dfa
from ltlgcs.ltl.buchi import ltl_to_dba
from ltlgcs.ltl.formula import Formula, is_syntactically_cosafe, to_nnf
from ltlgcs.ltl.semantics import Word, check_word
from ltlgcs.transys import TransitionSystem, build_ts

log = logging.getLogger(__name__)

LOOP_PINNING = ("full", "endpoints")


@dataclass
class PlanRequest:
    formula: Formula
    regions: List[LabeledRegion]
    q0: np.ndarray
    order: int = config.DEFAULT_ORDER
    smoothness: int = config.DEFAULT_SMOOTHNESS
    cost: CostSpec = field(default_factory=CostSpec)
    max_round_paths: int = config.DEFAULT_MAX_ROUND_PATHS
    seed: Optional[int] = 0
    strict: bool = False  # accept on q ∈ F rather than δ(q, L(s)) ∈ F
    stationary_accepting: bool = True  # full LTL: accepting prefix segment is a point
    loop_pinning: str = "full"  # or "endpoints"
    name: str = ""

    def __post_init__(self) -> None:
        self.q0 = np.asarray(self.q0, dtype=float).reshape(-1)
        if self.smoothness < 0:
            raise OrderError(f"smoothness {self.smoothness} is negative")
        if self.order < self.smoothness + 1:
            raise OrderError(
                f"order {self.order} cannot carry C^{self.smoothness} continuity"
            )
        for region in self.regions:
            if region.n != self.q0.size:
                raise DimensionError(
                    f"region {region.name} is in R^{region.n}, start in R^{self.q0.size}"
                )
        if self.loop_pinning not in LOOP_PINNING:
            raise ScenarioError(f"unknown loop pinning {self.loop_pinning!r}")

    @property
    def norm(self) -> Norm:
        return self.cost.norm

    def alphabet(self) -> List[frozenset]:
        "The observed labels, one letter per distinct region label."
        return sorted({region.labels for region in self.regions}, key=sorted)


@dataclass
class Prepared:
    "The offline part of a plan: automaton and product graph."

    request: PlanRequest
    ts: TransitionSystem
    automaton: Automaton
    gcs: Gcs
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def full(self) -> bool:
        return self.automaton.kind is AutomatonKind.DBA


@dataclass
class Plan:
    spline: BezierSpline
    trace: Word
    cost: float
    bound: float
    timings: Dict[str, float] = field(default_factory=dict)
    path: List[str] = field(default_factory=list)
    loop: Optional[List[str]] = None
    automaton: Optional[Automaton] = field(default=None, compare=False, repr=False)
    snapped: float = field(default=0.0, compare=False)  # largest junction move in assembly

    @property
    def gap(self) -> float:
        return (self.cost - self.bound) / max(1.0, abs(self.bound))

    @property
    def full(self) -> bool:
        return self.spline.lasso is not None

    def to_json(self) -> Dict[str, Any]:
        return {
            "spline": self.spline.to_json(),
            "trace": {
                "letters": [sorted(letter) for letter in self.trace.letters],
                "lasso": self.trace.lasso,
            },
            "cost": self.cost,
            "bound": self.bound,
            "gap": self.gap,
            "timing": dict(self.timings),
            "path": list(self.path),
            "loop": None if self.loop is None else list(self.loop),
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "Plan":
        spline = BezierSpline.from_json(data["spline"])
        return cls(
            spline=spline,
            trace=trace(spline),
            cost=float(data["cost"]),
            bound=float(data["bound"]),
            timings={k: float(v) for k, v in data.get("timing", {}).items()},
            path=list(data.get("path", [])),
            loop=data.get("loop"),
        )


@dataclass
class Verification:
    violations: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok


class Planner(EventEmitter):
    "Plans requests; holds no per-request state, so one Planner can serve many."

    def __init__(self) -> None:
        EventEmitter.__init__(self)
        self.pool_size: int = config.POOL_SIZE  # concurrent restriction solves
        self.verify_plans: bool = True  # verify every plan before returning it

    def plan(self, req: PlanRequest) -> Plan:
        "plan_cosafe when the formula is syntactically co-safe, else plan_full."
        if is_syntactically_cosafe(to_nnf(req.formula)):
            return self.plan_cosafe(req)
        return self.plan_full(req)

    def plan_cosafe(self, req: PlanRequest) -> Plan:
        if not is_syntactically_cosafe(to_nnf(req.formula)):
            raise NotCoSafeError(f"{req.formula} is not syntactically co-safe")
        return self.solve(self.prepare(req, full=False))

    def plan_full(self, req: PlanRequest) -> Plan:
        return self.solve(self.prepare(req, full=True))

    def prepare(self, req: PlanRequest, full: Optional[bool] = None) -> Prepared:
        """
        Build the automaton and the pruned product graph. `full` picks the
        Buchi construction; by default it is used for formulas outside the
        co-safe fragment.
        """
        if full is None:
            full = not is_syntactically_cosafe(to_nnf(req.formula))
        timings: Dict[str, float] = {}
        with timed(self, "automaton", timings):
            if full:
                aut = ltl_to_dba(req.formula, req.alphabet())
            else:
                aut = ltlf_to_dfa(req.formula, req.alphabet())
        log.info("%s with %d states for %s", aut.kind.value, len(aut.states), req.formula)
        with timed(self, "product", timings):
            ts = build_ts(req.regions, req.q0, self.pool_size)
            g = product(
                ts,
                aut,
                req.order,
                req.smoothness,
                req.cost,
                req.q0,
                strict=req.strict,
                stationary_accepting=full and req.stationary_accepting,
            )
        return Prepared(req, ts, aut, g, timings)

    def solve(self, prepared: Prepared) -> Plan:
        "The online part: solve the prepared product and assemble the spline."
        req = prepared.request
        timings = dict(prepared.timings)
        if prepared.full:
            plan = self._solve_full(prepared, timings)
        else:
            with timed(self, "solve", timings):
                found = self._shortest(prepared.gcs, req)
            spline, snapped = _assemble(prepared, prepared.gcs.vertices, found, None)
            plan = Plan(
                spline,
                trace(spline),
                found.cost,
                found.bound if found.bound is not None else found.cost,
                timings,
                found.path,
                None,
                prepared.automaton,
                snapped,
            )
        log.info(
            "plan with %d segments, cost %.6g, gap %.3g",
            len(plan.spline),
            plan.cost,
            plan.gap,
        )
        if self.verify_plans:
            result = self.verify(plan, req)
            if not result:
                raise VerificationError("; ".join(result.violations))
        return plan

    def _shortest(self, g: Gcs, req: PlanRequest) -> PathSolution:
        rel = solve_relaxation(g)
        return round_paths(
            g,
            rel,
            req.max_round_paths,
            req.seed,
            self.pool_size,
            lambda attempt, path, cost: self.emit("round", attempt, path, cost),
        )

    def _solve_full(self, prepared: Prepared, timings: Dict[str, float]) -> Plan:
        """
        Prefix to an accepting vertex v_F, then a loop from v_F's segment
        back to it. When no loop closes at v_F, its edge to the target is
        dropped and the prefix is solved again.
        """
        req = prepared.request
        g = prepared.gcs
        aut = prepared.automaton
        while True:
            with timed(self, "solve", timings):
                prefix = self._shortest(g, req)
            accepting = prefix.path[-2]
            pin = prefix.points[accepting]
            try:
                with timed(self, "product", timings):
                    loop_g = loop_problem(
                        g, prepared.ts, aut, accepting, pin, req.loop_pinning == "endpoints"
                    )
                with timed(self, "solve", timings):
                    loop = self._shortest(loop_g, req)
                break
            except (UnsatisfiableError, InfeasibleRelaxationError, NoPathFoundError) as why:
                log.info("no loop at %s (%s); it no longer accepts", accepting, why.desc)
                self.emit("loop_retry", accepting)
                try:
                    with timed(self, "product", timings):
                        g = g.without_target(accepting)
                except UnsatisfiableError:
                    raise NoLoopFoundError(
                        f"no loop closes at any accepting vertex; last tried {accepting}"
                    ) from why
        vertices = dict(g.vertices)
        vertices.update(loop_g.vertices)
        spline, snapped = _assemble(prepared, vertices, prefix, loop)
        bound = sum(
            found.bound if found.bound is not None else found.cost for found in (prefix, loop)
        )
        return Plan(
            spline,
            trace(spline),
            prefix.cost + loop.cost,
            bound,
            timings,
            prefix.path,
            loop.path,
            aut,
            snapped,
        )

    def verify(self, plan: Plan, req: PlanRequest) -> Verification:
        """
        Check a plan against its request: containment of every segment in
        its region, continuity, the start point, and acceptance of the trace
        by both the automaton and the formula semantics.
        """
        problems: List[str] = []
        regions = {region.name: region for region in req.regions}
        spline = plan.spline
        for j, seg in enumerate(spline.segments):
            region = regions.get(seg.region)
            if region is None:
                problems.append(f"segment {j}: unknown region {seg.region}")
                continue
            if seg.labels != region.labels:
                problems.append(f"segment {j}: labels differ from region {region.name}")
            if seg.curve.n != region.n:
                problems.append(f"segment {j}: in R^{seg.curve.n}, region in R^{region.n}")
            elif not seg.curve.contained_in(region.polytope, config.CONTAINMENT_TOL):
                worst = max(region.polytope.violation(p) for p in seg.curve.points)
                problems.append(f"segment {j}: leaves region {region.name} by {worst:.3g}")
        problems.extend(spline.continuity_violations(config.CONTINUITY_TOL))

        if spline.start.size != req.q0.size:
            problems.append("start point has the wrong dimension")
        else:
            offset = float(np.max(np.abs(spline.start - req.q0)))
            if offset > config.START_TOL:
                problems.append(f"start is {offset:.3g} away from q0")

        if spline.lasso is not None and req.loop_pinning == "full":
            closing = spline.segments[-1].curve.points
            accepting = spline.segments[spline.lasso].curve.points
            if closing.shape != accepting.shape or np.max(
                np.abs(closing - accepting)
            ) > config.CONTINUITY_TOL:
                problems.append("closing segment differs from the accepting segment")

        word = trace(spline)
        if word != plan.trace:
            problems.append("recorded trace differs from the spline's trace")
        aut = plan.automaton
        if aut is None:
            aut = (
                ltl_to_dba(req.formula, req.alphabet())
                if word.is_lasso
                else ltlf_to_dfa(req.formula, req.alphabet())
            )
        try:
            if word.is_lasso:
                accepted = aut.accepts_lasso(word.prefix, word.cycle)
            else:
                accepted = aut.accepts(word.letters)
        except LetterError as why:
            problems.append(f"automaton cannot read the trace: {why}")
        else:
            if not accepted:
                problems.append(f"{aut.kind.value} rejects trace {word}")
        try:
            if not check_word(req.formula, word):
                problems.append(f"trace {word} does not satisfy {req.formula}")
        except LassoRequiredError:
            problems.append(f"{req.formula} needs an infinite trace, got {word}")
        return Verification(problems)


def _assemble(
    prepared: Prepared,
    vertices: Dict[str, Vertex],
    prefix: PathSolution,
    loop: Optional[PathSolution],
) -> Tuple[BezierSpline, float]:
    """
    One segment per vertex on the prefix (source and target excluded),
    then for a loop the segments after the pinned start followed by the
    closing copy. Junction points are made to coincide exactly and the
    first point is set to q0. Also returns the largest distance any point
    moved doing so, logged as a warning beyond CONTINUITY_TOL.
    """
    req = prepared.request
    endpoints = req.loop_pinning == "endpoints"
    pieces: List[Tuple[np.ndarray, str]] = [
        (prefix.points[name].copy(), name) for name in prefix.path[1:-1]
    ]
    if not pieces:
        raise NoPathFoundError("the path holds no segment")
    moved = [0.0]

    def snap(points: np.ndarray, index: int, value: np.ndarray) -> None:
        moved[0] = max(moved[0], float(np.linalg.norm(points[index] - value)))
        points[index] = value

    snap(pieces[0][0], 0, np.asarray(req.q0, dtype=float))
    for j in range(1, len(pieces)):
        snap(pieces[j][0], 0, pieces[j - 1][0][-1])
    lasso = None
    if loop is not None:
        lasso = len(pieces) - 1
        accepting = pieces[lasso][0]
        inner = loop.path[1:-1]
        for name in inner:
            pieces.append((loop.points[name].copy(), name))
        for j in range(lasso + 1, len(pieces)):
            snap(pieces[j][0], 0, pieces[j - 1][0][-1])
        closing = loop.points[loop.path[-1]].copy() if endpoints else accepting.copy()
        snap(closing, 0, accepting[0])
        snap(closing, -1, accepting[-1])
        if inner:
            snap(pieces[-1][0], -1, closing[0])
        pieces.append((closing, loop.path[-1]))

    ts = prepared.ts
    segments = []
    for points, name in pieces:
        index = vertices[name].region
        assert index is not None
        region = ts.region_of(index)
        segments.append(Segment(BezierCurve(points), region.name, region.labels, name))
    wrap = 0 if endpoints and loop is not None else None
    if moved[0] > config.CONTINUITY_TOL:
        log.warning("assembly moved a junction point by %.3g", moved[0])
    else:
        log.debug("assembly moved junction points by at most %.3g", moved[0])
    return BezierSpline(segments, req.smoothness, lasso, wrap), moved[0]


def plan(req: PlanRequest) -> Plan:
    return Planner().plan(req)


def plan_cosafe(req: PlanRequest) -> Plan:
    return Planner().plan_cosafe(req)


def plan_full(req: PlanRequest) -> Plan:
    return Planner().plan_full(req)


def verify(p: Plan, req: PlanRequest) -> Verification:
    return Planner().verify(p, req)

