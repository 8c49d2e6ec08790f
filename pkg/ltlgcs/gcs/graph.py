#!/usr/bin/env python

"""
Graphs of Convex Sets for spline planning.

Every vertex other than the source and target holds one Bezier segment:
k+1 control points in R^n, all in the vertex's region polytope. Edges
carry linear equalities tying the end of the tail segment to the start of
the head segment, and the cost of the tail segment.
"""

from dataclasses import dataclass, field
from enum import Enum
from math import comb, factorial
import logging
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from ltlgcs.error import (
    CostSpecError,
    LetterError,
    OrderError,
    UnboundedVertexError,
    UnsatisfiableError,
)
from ltlgcs.geometry import HPolytope
from ltlgcs.ltl.automata import Automaton, show_letter
from ltlgcs.transys import TransitionSystem

log = logging.getLogger(__name__)

SOURCE = "source"
TARGET = "target"


class Norm(Enum):
    L1 = "l1"
    L2 = "l2"


@dataclass(frozen=True)
class CostSpec:
    """
    Path length (sum of control-point hops) plus optional weighted
    derivative magnitudes, all in one norm.
    """

    norm: Norm = Norm.L2
    length_weight: float = 1.0
    derivative_penalties: Tuple[Tuple[int, float], ...] = ()  # (order, weight)

    def validate(self, k: int, d: int) -> None:
        if self.length_weight < 0:
            raise CostSpecError("length weight must be nonnegative")
        for order, weight in self.derivative_penalties:
            if weight < 0:
                raise CostSpecError(f"penalty weight for order {order} is negative")
            if order < 1:
                raise CostSpecError(f"derivative order {order} must be at least 1")
            if order > d:
                raise CostSpecError(
                    f"derivative penalty of order {order} exceeds smoothness {d}"
                )
            if order > k:
                raise CostSpecError(f"derivative penalty of order {order} exceeds order {k}")


@dataclass(frozen=True)
class CostTerm:
    """
    weight · Σ_j ‖M_j x‖, where M_j is the j-th block of `blocks` rows of
    `matrix` and x is a vertex's stacked control points.
    """

    weight: float
    matrix: np.ndarray = field(compare=False)
    block: int  # rows per norm

    @property
    def count(self) -> int:
        return int(self.matrix.shape[0] // self.block)

    def value(self, x: np.ndarray, norm: Norm) -> float:
        parts = (self.matrix @ x).reshape(self.count, self.block)
        ord_ = 1 if norm is Norm.L1 else 2
        return float(self.weight * np.sum(np.linalg.norm(parts, ord=ord_, axis=1)))


def difference_matrix(k: int, order: int) -> np.ndarray:
    """
    (k+1-order) × (k+1) matrix of order-th forward differences of k+1
    scalar control points.
    """
    out = np.zeros((k + 1 - order, k + 1))
    for i in range(k + 1 - order):
        for t in range(order + 1):
            out[i, i + t] = (-1) ** (order - t) * comb(order, t)
    return out


def edge_cost(cost: CostSpec, k: int, n: int) -> List[CostTerm]:
    """
    Cost template over one segment's stacked control points
    (γ_0, ..., γ_k), γ_i ∈ R^n. The length term is
    Σ_{i<k} ‖γ_{i+1} - γ_i‖; a penalty on derivative order j adds
    w·Σ ‖δ_i‖ over the control points δ_i of the j-th derivative curve.
    """
    eye = np.eye(n)
    terms = []
    if cost.length_weight > 0 and k >= 1:
        terms.append(CostTerm(cost.length_weight, np.kron(difference_matrix(k, 1), eye), n))
    for order, weight in cost.derivative_penalties:
        if weight > 0:
            scale = factorial(k) / factorial(k - order)
            terms.append(
                CostTerm(weight, scale * np.kron(difference_matrix(k, order), eye), n)
            )
    return terms


@dataclass(frozen=True)
class EdgeConstraint:
    "left · x_u + right · x_v = rhs"

    left: np.ndarray = field(compare=False)
    right: np.ndarray = field(compare=False)
    rhs: np.ndarray = field(compare=False)

    @property
    def homogeneous(self) -> bool:
        return not np.any(self.rhs)

    def residual(self, xu: np.ndarray, xv: np.ndarray) -> float:
        value = self.rhs.copy()
        if self.left.size:
            value = value - self.left @ xu
        if self.right.size:
            value = value - self.right @ xv
        return float(np.max(np.abs(value))) if value.size else 0.0


def continuity(k: int, n: int, d: int) -> EdgeConstraint:
    """
    Equal forward differences of orders 0..d at the junction: the last
    d+1 control points of the tail against the first d+1 of the head.
    Under unit-duration segments this is C^d continuity.
    """
    rows = []
    for order in range(d + 1):
        coeffs = difference_matrix(order, order)[0]  # order+1 binomial weights
        tail = np.zeros(k + 1)
        tail[k - order :] = coeffs
        head = np.zeros(k + 1)
        head[: order + 1] = coeffs
        rows.append((tail, head))
    eye = np.eye(n)
    left = np.vstack([np.kron(tail, eye) for tail, _ in rows])
    right = -np.vstack([np.kron(head, eye) for _, head in rows])
    return EdgeConstraint(left, right, np.zeros(left.shape[0]))


def pin_start(k: int, n: int, q0: np.ndarray) -> EdgeConstraint:
    "From a variable-free source: the head's first control point is q0."
    right = np.zeros((n, (k + 1) * n))
    right[:, :n] = np.eye(n)
    return EdgeConstraint(np.zeros((n, 0)), right, np.asarray(q0, dtype=float))


def stationary(k: int, n: int) -> EdgeConstraint:
    "Into a variable-free target: every control point of the tail equals γ_0."
    left = np.zeros((k * n, (k + 1) * n))
    for i in range(1, k + 1):
        left[(i - 1) * n : i * n, i * n : (i + 1) * n] = np.eye(n)
        left[(i - 1) * n : i * n, :n] = -np.eye(n)
    return EdgeConstraint(left, np.zeros((k * n, 0)), np.zeros(k * n))


@dataclass
class Vertex:
    name: str
    polytope: Optional[HPolytope] = None  # None: no continuous variables
    region: Optional[int] = None
    state: Optional[int] = None
    pin: Optional[np.ndarray] = None  # fixed (k+1)×n control points, NaN = free

    @property
    def has_points(self) -> bool:
        return self.polytope is not None


@dataclass
class Edge:
    u: str
    v: str
    constraints: List[EdgeConstraint] = field(default_factory=list)

    @property
    def key(self) -> Tuple[str, str]:
        return (self.u, self.v)


class Gcs:
    """
    A directed graph whose vertices carry X_v = P^{k+1} for a region
    polytope P and whose edges carry linear constraints and the convex cost
    of their tail segment.
    """

    def __init__(
        self, n: int, k: int, d: int, cost: CostSpec, source: str = SOURCE, target: str = TARGET
    ) -> None:
        self.n = n
        self.k = k
        self.d = d
        self.cost = cost
        self.terms = edge_cost(cost, k, n)
        self.source = source
        self.target = target
        self.vertices: Dict[str, Vertex] = {}
        self.edges: Dict[Tuple[str, str], Edge] = {}
        self._out: Optional[Dict[str, List[Edge]]] = None
        self._in: Optional[Dict[str, List[Edge]]] = None

    @property
    def dim(self) -> int:
        "Continuous variables per segment vertex."
        return (self.k + 1) * self.n

    @property
    def norm(self) -> Norm:
        return self.cost.norm

    def add_vertex(self, vertex: Vertex) -> Vertex:
        if vertex.name in self.vertices:
            raise ValueError(f"duplicate vertex {vertex.name}")
        self.vertices[vertex.name] = vertex
        return vertex

    def add_edge(self, u: str, v: str, constraints: Sequence[EdgeConstraint] = ()) -> Edge:
        if u not in self.vertices or v not in self.vertices:
            raise ValueError(f"edge {u} -> {v} between unknown vertices")
        if u == self.target or v == self.source:
            raise ValueError(f"edge {u} -> {v} leaves the target or enters the source")
        edge = Edge(u, v, list(constraints))
        self.edges[edge.key] = edge
        self._out = self._in = None
        return edge

    def _index(self) -> None:
        self._out = {name: [] for name in self.vertices}
        self._in = {name: [] for name in self.vertices}
        for edge in self.edges.values():
            self._out[edge.u].append(edge)
            self._in[edge.v].append(edge)

    def out_edges(self, name: str) -> List[Edge]:
        if self._out is None:
            self._index()
        assert self._out is not None
        return self._out.get(name, [])

    def in_edges(self, name: str) -> List[Edge]:
        if self._in is None:
            self._index()
        assert self._in is not None
        return self._in.get(name, [])

    def costed(self, edge: Edge) -> bool:
        return self.vertices[edge.u].has_points and bool(self.terms)

    def segment_cost(self, x: np.ndarray) -> float:
        return sum(term.value(x, self.norm) for term in self.terms)

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g

    def paths(self) -> Iterator[List[str]]:
        "All simple source-target vertex paths."
        return nx.all_simple_paths(self.graph(), self.source, self.target)

    def prune(self) -> "Gcs":
        """
        Copy keeping only vertices on some source-target path; raises
        UnsatisfiableError when there is none.
        """
        g = self.graph()
        if self.source not in g or self.target not in g or not nx.has_path(
            g, self.source, self.target
        ):
            raise UnsatisfiableError(f"no path from {self.source} to {self.target}")
        keep = (nx.descendants(g, self.source) | {self.source}) & (
            nx.ancestors(g, self.target) | {self.target}
        )
        out = Gcs(self.n, self.k, self.d, self.cost, self.source, self.target)
        for name, vertex in self.vertices.items():
            if name in keep:
                out.add_vertex(vertex)
        for (u, v), edge in self.edges.items():
            if u in keep and v in keep:
                out.edges[(u, v)] = edge
        log.debug(
            "pruned %d/%d vertices, %d/%d edges",
            len(out.vertices),
            len(self.vertices),
            len(out.edges),
            len(self.edges),
        )
        return out

    def without_target(self, name: str) -> "Gcs":
        """
        Pruned copy in which `name` no longer links to the target. The
        vertex stays available to paths that pass through it.
        """
        out = Gcs(self.n, self.k, self.d, self.cost, self.source, self.target)
        for vertex in self.vertices.values():
            out.add_vertex(vertex)
        for key, edge in self.edges.items():
            if key != (name, self.target):
                out.edges[key] = edge
        return out.prune()

    def check_bounded(self) -> None:
        "L2 costs need bounded vertex sets unless the points are pinned."
        if self.norm is not Norm.L2:
            return
        for vertex in self.vertices.values():
            if vertex.polytope is not None and vertex.pin is None:
                if not vertex.polytope.is_bounded():
                    raise UnboundedVertexError(f"vertex {vertex.name} has an unbounded region")

    def to_dot(self, name: str = "gcs") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for vname, vertex in self.vertices.items():
            attrs = [f'label="{vname}"']
            if vertex.region is not None:
                attrs.append(f'region="{vertex.region}"')
            if vertex.state is not None:
                attrs.append(f'state="{vertex.state}"')
            if vertex.pin is not None:
                attrs.append("style=filled")
            if vname in (self.source, self.target):
                attrs.append("shape=box")
            lines.append(f'  "{vname}" [{", ".join(attrs)}];')
        for u, v in self.edges:
            lines.append(f'  "{u}" -> "{v}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def vertex_name(ts: TransitionSystem, s: int, q: int) -> str:
    return f"{ts.region_of(s).name}|q{q}"


def product(
    ts: TransitionSystem,
    aut: Automaton,
    k: int,
    d: int,
    cost: CostSpec,
    q0: np.ndarray,
    strict: bool = False,
    stationary_accepting: bool = False,
) -> Gcs:
    """
    The GCS TS ⊗ A. Vertex (s, q) is a segment in region s while the
    automaton is in q, before it reads L(s). Its successors are (s', δ(q,
    L(s))) for every transition s → s'. It links to the target when δ(q,
    L(s)) ∈ F, or with `strict` when q ∈ F. A variable-free source links to
    every (s0, q_init) with s0 initial and pins the first control point to
    q0.

    With `stationary_accepting`, the segment entering the target must be a
    single point.
    """
    if k < max(1, d + 1):
        raise OrderError(f"order {k} cannot carry C^{d} continuity")
    cost.validate(k, d)
    for letter in ts.letters():
        if letter not in aut.alphabet:
            raise LetterError(f"region label {show_letter(letter)} is not in the alphabet")
    n = ts.regions[0].n
    g = Gcs(n, k, d, cost)
    g.add_vertex(Vertex(SOURCE))
    g.add_vertex(Vertex(TARGET))
    join = continuity(k, n, d)
    into_target = [stationary(k, n)] if stationary_accepting else []

    def vertex(s: int, q: int) -> str:
        name = vertex_name(ts, s, q)
        if name not in g.vertices:
            g.add_vertex(Vertex(name, ts.region_of(s).polytope, s, q))
            frontier.append((s, q))
        return name

    frontier: List[Tuple[int, int]] = []
    for s0 in sorted(ts.initial):
        g.add_edge(SOURCE, vertex(s0, aut.initial), [pin_start(k, n, q0)])
    while frontier:
        s, q = frontier.pop()
        nxt = aut.step(q, ts.label_of(s))
        here = vertex_name(ts, s, q)
        for t in ts.successors(s):
            if (t, nxt) == (s, q):
                continue
            g.add_edge(here, vertex(t, nxt), [join])
        if (q if strict else nxt) in aut.accepting:
            g.add_edge(here, TARGET, into_target)
    log.info(
        "product: %d vertices, %d edges before pruning", len(g.vertices), len(g.edges)
    )
    pruned = g.prune()
    pruned.check_bounded()
    return pruned


def loop_problem(
    g: Gcs, ts: TransitionSystem, aut: Automaton, accepting: str, pin: np.ndarray, endpoints: bool = False
) -> Gcs:
    """
    The GCS for closing a loop at the product vertex `accepting`: its
    outgoing edges leave from a pinned copy `loop_start`, its incoming
    edges enter a pinned copy `loop_end`, and the original vertex, source
    and target are dropped. With `endpoints`, loop_end only has its first
    and last control points fixed.
    """
    base = g.vertices[accepting]
    assert base.region is not None and base.state is not None
    start = f"loop_start[{accepting}]"
    end = f"loop_end[{accepting}]"
    out = Gcs(g.n, g.k, g.d, g.cost, start, end)
    out.add_vertex(Vertex(start, base.polytope, base.region, base.state, pin))
    end_pin = pin
    if endpoints:
        end_pin = np.full_like(pin, np.nan)
        end_pin[0] = pin[0]
        end_pin[-1] = pin[-1]
    out.add_vertex(Vertex(end, base.polytope, base.region, base.state, end_pin))
    for name, vertex in g.vertices.items():
        if name not in (g.source, g.target, accepting):
            out.add_vertex(vertex)
    join = continuity(g.k, g.n, g.d)
    for (u, v), edge in g.edges.items():
        if g.source in (u, v) or g.target in (u, v):
            continue
        tail = start if u == accepting else u
        head = end if v == accepting else v
        out.add_edge(tail, head, edge.constraints)
    # v_F to itself is not a product edge; add it when the automaton stays put
    s, q = base.region, base.state
    if aut.step(q, ts.label_of(s)) == q:
        out.add_edge(start, end, [join])
    return out.prune()
