#!/usr/bin/env python

"""
Shortest paths in a Graph of Convex Sets.

build_relaxation writes the perspective formulation of the mixed-integer
shortest-path problem with the edge binaries relaxed to [0, 1]. For each
edge e = (u, v) there is a flow y_e and the products z_e = y_e x_u,
z'_e = y_e x_v; vertex sets, edge constraints and costs are all imposed on
(y_e, z_e, z'_e) in homogeneous form. Norm costs are positively
homogeneous, so the perspective of the cost is the cost itself.

round_paths turns a fractional flow into discrete paths by randomized
depth-first search, and re-optimizes the control points along each path
with the path fixed (the convex restriction).
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import logging
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from ltlgcs import config
from ltlgcs.conic import ConicProgram, ConicSolution, Status, solve_conic
from ltlgcs.error import (
    DimensionError,
    InfeasibleRelaxationError,
    NoPathFoundError,
    PathBudgetError,
    RestrictionError,
    SolverError,
    UnboundedVertexError,
)
from ltlgcs.gcs.graph import CostTerm, Edge, Gcs, Norm, Vertex

log = logging.getLogger(__name__)

EdgeKey = Tuple[str, str]
RoundListener = Callable[[int, List[str], Optional[float]], None]


@dataclass
class RelaxationSolution:
    flows: Dict[EdgeKey, float]
    z: Dict[EdgeKey, np.ndarray]
    zp: Dict[EdgeKey, np.ndarray]
    bound: float
    status: Status
    residual: float = 0.0  # largest flow-conservation violation
    diagnostics: Dict[str, object] = field(default_factory=dict)


@dataclass
class PathSolution:
    path: List[str]
    points: Dict[str, np.ndarray]  # vertex -> (k+1)×n control points
    cost: float
    bound: Optional[float] = None

    @property
    def gap(self) -> float:
        if self.bound is None:
            return 0.0
        return (self.cost - self.bound) / max(1.0, abs(self.bound))

    def edges(self) -> List[EdgeKey]:
        return list(zip(self.path[:-1], self.path[1:]))


class Relaxation:
    "A ConicProgram for the relaxed problem, with the edge variable indices."

    def __init__(self, g: Gcs) -> None:
        self.g = g
        self.program = ConicProgram()
        self.y: Dict[EdgeKey, int] = {}
        self.z: Dict[EdgeKey, np.ndarray] = {}
        self.zp: Dict[EdgeKey, np.ndarray] = {}


def _vertex_rows(
    p: ConicProgram, g: Gcs, vertex: Vertex, cols: np.ndarray, y: Optional[int]
) -> None:
    """
    Perspective membership of cols in y·X_v (plain membership when y is
    None), honoring pinned control points.
    """
    assert vertex.polytope is not None
    pin = None if vertex.pin is None else np.asarray(vertex.pin, dtype=float).reshape(-1)
    if pin is not None and pin.size != cols.size:
        raise DimensionError(f"pin of {vertex.name} has {pin.size} entries, expected {cols.size}")
    fixed = np.zeros(cols.size, dtype=bool) if pin is None else ~np.isnan(pin)
    if fixed.any():
        assert pin is not None
        eye = np.eye(cols.size)[fixed]
        if y is None:
            p.add_eq(cols, eye, pin[fixed])
        else:
            p.add_eq(np.append(cols, y), np.hstack([eye, -pin[fixed][:, None]]), 0.0)
    if fixed.all():
        return
    power = vertex.polytope.power(g.k + 1)
    if y is None:
        p.add_le(cols, power.A, power.b)
    else:
        p.add_le(np.append(cols, y), np.hstack([power.A, -power.b[:, None]]), 0.0)


def _edge_rows(
    p: ConicProgram,
    edge: Edge,
    zu: Optional[np.ndarray],
    zv: Optional[np.ndarray],
    y: Optional[int],
) -> None:
    for con in edge.constraints:
        cols: List[np.ndarray] = []
        coeffs: List[np.ndarray] = []
        if con.left.size:
            assert zu is not None
            cols.append(zu)
            coeffs.append(con.left)
        if con.right.size:
            assert zv is not None
            cols.append(zv)
            coeffs.append(con.right)
        if y is None:
            p.add_eq(np.concatenate(cols), np.hstack(coeffs), con.rhs)
        elif con.homogeneous:
            p.add_eq(np.concatenate(cols), np.hstack(coeffs), 0.0)
        else:
            cols.append(np.array([y]))
            coeffs.append(-con.rhs[:, None])
            p.add_eq(np.concatenate(cols), np.hstack(coeffs), 0.0)


def _cost_rows(
    p: ConicProgram, terms: Sequence[CostTerm], norm: Norm, cols: np.ndarray, tag: str
) -> None:
    "Epigraph variables for weight·Σ‖M_j x‖ added to the objective."
    for t, term in enumerate(terms):
        if norm is Norm.L1:
            s = p.add_block(f"abs[{tag},{t}]", term.matrix.shape[0], lower=0.0)
            eye = np.eye(s.size)
            p.add_le(np.concatenate([cols, s]), np.hstack([term.matrix, -eye]), 0.0)
            p.add_le(np.concatenate([cols, s]), np.hstack([-term.matrix, -eye]), 0.0)
            p.add_objective(s, term.weight)
            continue
        for j in range(term.count):
            rows = term.matrix[j * term.block : (j + 1) * term.block]
            w = p.add_block(f"w[{tag},{t},{j}]", term.block)
            tvar = p.add_block(f"t[{tag},{t},{j}]", 1, lower=0.0)
            p.add_eq(np.concatenate([cols, w]), np.hstack([rows, -np.eye(term.block)]), 0.0)
            p.add_soc(int(tvar[0]), w)
            p.add_objective(tvar, term.weight)


def build_relaxation(g: Gcs) -> Relaxation:
    rel = Relaxation(g)
    p = rel.program
    dim = g.dim
    for i, (key, edge) in enumerate(g.edges.items()):
        u, v = g.vertices[edge.u], g.vertices[edge.v]
        y = int(p.add_block(f"y[{i}]", 1, lower=0.0, upper=1.0)[0])
        rel.y[key] = y
        zu = zv = None
        if u.has_points:
            if g.norm is Norm.L2 and u.pin is None and not u.polytope.is_bounded():  # type: ignore[union-attr]
                raise UnboundedVertexError(f"vertex {u.name} is unbounded")
            zu = p.add_block(f"z[{i}]", dim)
            rel.z[key] = zu
            _vertex_rows(p, g, u, zu, y)
            if g.costed(edge):
                _cost_rows(p, g.terms, g.norm, zu, str(i))
        if v.has_points:
            zv = p.add_block(f"zp[{i}]", dim)
            rel.zp[key] = zv
            _vertex_rows(p, g, v, zv, y)
        _edge_rows(p, edge, zu, zv, y)

    for name in g.vertices:
        outs = [rel.y[e.key] for e in g.out_edges(name)]
        ins = [rel.y[e.key] for e in g.in_edges(name)]
        net = 1.0 if name == g.source else -1.0 if name == g.target else 0.0
        if outs or ins:
            p.add_eq(outs + ins, np.array([[1.0] * len(outs) + [-1.0] * len(ins)]), net)
        if outs:
            p.add_le(outs, np.ones((1, len(outs))), 1.0)
        if name in (g.source, g.target) or not g.vertices[name].has_points:
            continue
        # spatial conservation: what flows in is what flows out
        zin = [rel.zp[e.key] for e in g.in_edges(name)]
        zout = [rel.z[e.key] for e in g.out_edges(name)]
        if zin and zout:
            eye = np.eye(dim)
            p.add_eq(
                np.concatenate(zin + zout),
                np.hstack([eye] * len(zin) + [-eye] * len(zout)),
                0.0,
            )
    return rel


def solve_relaxation(g: Gcs) -> RelaxationSolution:
    rel = build_relaxation(g)
    sol = solve_conic(rel.program)
    if sol.status is Status.INFEASIBLE:
        raise InfeasibleRelaxationError("relaxation is infeasible")
    if not sol.ok or sol.x is None:
        raise SolverError(f"relaxation returned {sol.status.value}", sol.diagnostics)
    x = sol.x
    flows = {key: float(np.clip(x[idx], 0.0, 1.0)) for key, idx in rel.y.items()}
    residual = 0.0
    for name in g.vertices:
        net = 1.0 if name == g.source else -1.0 if name == g.target else 0.0
        out = sum(flows[e.key] for e in g.out_edges(name))
        inn = sum(flows[e.key] for e in g.in_edges(name))
        residual = max(residual, abs(out - inn - net))
    log.info("relaxation bound %.6g, flow residual %.2g", sol.value, residual)
    return RelaxationSolution(
        flows=flows,
        z={key: x[idx] for key, idx in rel.z.items()},
        zp={key: x[idx] for key, idx in rel.zp.items()},
        bound=float(sol.value or 0.0),
        status=sol.status,
        residual=residual,
        diagnostics=sol.diagnostics,
    )


def restriction(g: Gcs, path: Sequence[str]) -> Tuple[Status, Optional[PathSolution], ConicSolution]:
    """
    Optimize the control points along a fixed vertex path.
    """
    p = ConicProgram()
    cols: Dict[str, np.ndarray] = {}
    for name in path:
        vertex = g.vertices[name]
        if vertex.has_points:
            cols[name] = p.add_block(f"x[{name}]", g.dim)
            _vertex_rows(p, g, vertex, cols[name], None)
    for u, v in zip(path[:-1], path[1:]):
        edge = g.edges[(u, v)]
        _edge_rows(p, edge, cols.get(u), cols.get(v), None)
        if g.costed(edge):
            _cost_rows(p, g.terms, g.norm, cols[u], u)
    sol = solve_conic(p)
    if sol.status is Status.INFEASIBLE:
        return sol.status, None, sol
    if not sol.ok or sol.x is None:
        raise SolverError(f"restriction returned {sol.status.value}", sol.diagnostics)
    points = {
        name: sol.x[idx].reshape(g.k + 1, g.n) for name, idx in cols.items()
    }
    cost = 0.0
    for u, v in zip(path[:-1], path[1:]):
        if g.costed(g.edges[(u, v)]):
            cost += g.segment_cost(points[u].reshape(-1))
    return sol.status, PathSolution(list(path), points, cost), sol


def _sample_path(
    g: Gcs, flows: Dict[EdgeKey, float], rng: np.random.Generator
) -> Optional[List[str]]:
    """
    Depth-first walk from the source choosing outgoing edges with
    probability proportional to their flow, backtracking from dead ends.
    Edges below ROUNDING_FLOOR are only tried once the others are spent.
    """
    path = [g.source]
    on_path: Set[str] = {g.source}
    tried: Dict[str, Set[str]] = {g.source: set()}
    while path:
        u = path[-1]
        if u == g.target:
            return path
        options = [
            e for e in g.out_edges(u) if e.v not in on_path and e.v not in tried[u]
        ]
        if not options:
            path.pop()
            on_path.discard(u)
            continue
        strong = [e for e in options if flows[e.key] >= config.ROUNDING_FLOOR]
        pool = strong or options
        weights = np.array([flows[e.key] for e in pool])
        if weights.sum() <= 0:
            weights = np.ones(len(pool))
        pick = pool[int(rng.choice(len(pool), p=weights / weights.sum()))]
        tried[u].add(pick.v)
        path.append(pick.v)
        on_path.add(pick.v)
        tried[pick.v] = set()
    return None


def _integral(flows: Dict[EdgeKey, float], path: Sequence[str]) -> bool:
    return all(
        flows[key] >= 1.0 - config.INTEGRAL_TOL for key in zip(path[:-1], path[1:])
    )


def round_paths(
    g: Gcs,
    rel: RelaxationSolution,
    max_paths: int = config.DEFAULT_MAX_ROUND_PATHS,
    seed: Optional[int] = 0,
    pool_size: int = config.POOL_SIZE,
    listener: Optional[RoundListener] = None,
) -> PathSolution:
    """
    Sample up to max_paths discrete paths from the relaxed flows, solve the
    restriction of each distinct one, and keep the cheapest (ties go to the
    lexicographically smallest path).
    """
    rng = np.random.default_rng(seed)
    paths: List[List[str]] = []
    for _ in range(max(1, max_paths)):
        path = _sample_path(g, rel.flows, rng)
        if path is None:
            break
        if path not in paths:
            paths.append(path)

    def solve(path: List[str]) -> Tuple[List[str], Status, Optional[PathSolution]]:
        status, found, _ = restriction(g, path)
        return path, status, found

    with ThreadPoolExecutor(max_workers=max(1, pool_size)) as pool:
        results = list(pool.map(solve, paths))

    best: Optional[PathSolution] = None
    for attempt, (path, status, found) in enumerate(results):
        if listener is not None:
            listener(attempt, path, None if found is None else found.cost)
        if found is None:
            if _integral(rel.flows, path):
                raise RestrictionError(
                    f"restriction of integral path {' -> '.join(path)} is {status.value}"
                )
            log.debug("rounded path %s is infeasible", path)
            continue
        if best is None or (found.cost, found.path) < (best.cost, best.path):
            best = found
    if best is None:
        raise NoPathFoundError(f"{len(paths)} distinct rounded paths, none feasible")
    best.bound = rel.bound
    log.info("rounded cost %.6g, gap %.3g", best.cost, best.gap)
    return best


def exact_oracle(
    g: Gcs,
    max_simple_paths: int = config.DEFAULT_PATH_BUDGET,
    keep: Optional[Callable[[List[str]], bool]] = None,
) -> PathSolution:
    """
    Global optimum by enumerating every simple source-target path and
    solving its restriction. `keep` optionally restricts the paths
    considered.
    """
    paths: List[List[str]] = []
    for path in g.paths():
        if keep is not None and not keep(path):
            continue
        paths.append(path)
        if len(paths) > max_simple_paths:
            raise PathBudgetError(f"more than {max_simple_paths} simple paths")
    best: Optional[PathSolution] = None
    for path in sorted(paths):
        _, found, _ = restriction(g, path)
        if found is not None and (
            best is None or (found.cost, found.path) < (best.cost, best.path)
        ):
            best = found
    if best is None:
        raise NoPathFoundError(f"none of {len(paths)} simple paths is feasible")
    best.bound = best.cost
    return best
