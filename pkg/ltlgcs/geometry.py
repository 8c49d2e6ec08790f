#!/usr/bin/env python

"""
Convex regions in H-representation, {x : A x ≤ b}.

Rows of A are scaled to unit norm on construction, so slack in a row is a
Euclidean distance to its hyperplane. Feasibility questions are answered by
small LPs through ltlgcs.conic.
"""

from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial import HalfspaceIntersection

from ltlgcs import config
from ltlgcs.conic import ConicProgram, Status, solve_conic
from ltlgcs.error import (
    DimensionError,
    InfeasiblePolytopeError,
    ScenarioError,
    SolverError,
)

ArrayLike = Union[Sequence[float], Sequence[Sequence[float]], np.ndarray]


class HPolytope:
    """
    {x : A x ≤ b}. Rows are divided by their norms unless `normalize` is
    false, and the tolerance of `contains` (like the value of `violation`)
    is measured per row after dividing by the row norm. A point is inside
    up to `tol` when it lies within Euclidean distance `tol` of every
    facet's half-space, however the rows were scaled in the input.
    """

    def __init__(self, A: ArrayLike, b: ArrayLike, normalize: bool = True) -> None:
        A_arr = np.atleast_2d(np.asarray(A, dtype=float))
        b_arr = np.asarray(b, dtype=float).reshape(-1)
        if A_arr.ndim != 2 or A_arr.shape[0] != b_arr.size:
            raise DimensionError(f"A is {A_arr.shape} but b has {b_arr.size} entries")
        if A_arr.shape[0] < 1 or A_arr.shape[1] < 1:
            raise ScenarioError("a polytope needs at least one inequality")
        if not np.all(np.isfinite(A_arr)) or np.any(np.isnan(b_arr)):
            raise ScenarioError("polytope data must be finite")
        norms = np.linalg.norm(A_arr, axis=1)
        if np.any(norms == 0):
            raise ScenarioError("polytope has an all-zero row")
        if normalize:
            A_arr = A_arr / norms[:, None]
            b_arr = b_arr / norms
        self.A = A_arr
        self.b = b_arr
        self._norms = np.linalg.norm(A_arr, axis=1)
        self.A.setflags(write=False)
        self.b.setflags(write=False)
        self._bounded: Optional[bool] = None

    @classmethod
    def from_box(cls, lo: ArrayLike, hi: ArrayLike) -> "HPolytope":
        lo_arr = np.asarray(lo, dtype=float).reshape(-1)
        hi_arr = np.asarray(hi, dtype=float).reshape(-1)
        if lo_arr.size != hi_arr.size:
            raise DimensionError("box corners differ in dimension")
        n = lo_arr.size
        eye = np.eye(n)
        rows, rhs = [], []
        for i in range(n):
            if np.isfinite(hi_arr[i]):
                rows.append(eye[i])
                rhs.append(hi_arr[i])
            if np.isfinite(lo_arr[i]):
                rows.append(-eye[i])
                rhs.append(-lo_arr[i])
        return cls(np.array(rows).reshape(-1, n), rhs)

    @property
    def n(self) -> int:
        return int(self.A.shape[1])

    @property
    def m(self) -> int:
        return int(self.A.shape[0])

    def __repr__(self) -> str:
        return f"<HPolytope n={self.n} m={self.m} at {id(self):#x}>"

    def _check_point(self, x: ArrayLike) -> np.ndarray:
        point = np.asarray(x, dtype=float).reshape(-1)
        if point.size != self.n:
            raise DimensionError(f"point of dimension {point.size} for a polytope in R^{self.n}")
        return point

    def contains(self, x: ArrayLike, tol: float = config.CONTAINMENT_TOL) -> bool:
        point = self._check_point(x)
        return bool(np.all(self.A @ point <= self.b + tol * self._norms))

    def violation(self, x: ArrayLike) -> float:
        "Largest constraint violation at x per unit row norm (≤ 0 inside)."
        point = self._check_point(x)
        return float(np.max((self.A @ point - self.b) / self._norms))

    def intersection(self, other: "HPolytope") -> "HPolytope":
        if other.n != self.n:
            raise DimensionError(f"R^{self.n} and R^{other.n}")
        return HPolytope(np.vstack([self.A, other.A]), np.concatenate([self.b, other.b]), False)

    def intersects(self, other: "HPolytope") -> bool:
        return not self.intersection(other).is_empty()

    def is_empty(self) -> bool:
        """
        Phase-1 LP: minimize s subject to A x - s ≤ b, s ≥ -1. The
        polytope is nonempty iff the optimum is at most FEASIBILITY_TOL.
        """
        lp = ConicProgram()
        x = lp.add_block("x", self.n)
        s = lp.add_block("s", 1, lower=-1.0)
        lp.add_le(np.concatenate([x, s]), np.hstack([self.A, -np.ones((self.m, 1))]), self.b)
        lp.add_objective(s, 1.0)
        sol = solve_conic(lp)
        if not sol.ok:
            raise SolverError(
                f"phase-1 feasibility LP returned {sol.status.value}", sol.diagnostics
            )
        return float(sol["s"][0]) > config.FEASIBILITY_TOL

    def chebyshev_center(self) -> Tuple[np.ndarray, float]:
        """
        Center and radius of the largest inscribed ball. The radius is capped
        at CHEBYSHEV_RADIUS_CAP for unbounded polytopes.
        """
        lp = ConicProgram()
        x = lp.add_block("x", self.n)
        r = lp.add_block("r", 1, lower=0.0, upper=config.CHEBYSHEV_RADIUS_CAP)
        norms = np.linalg.norm(self.A, axis=1)[:, None]
        lp.add_le(np.concatenate([x, r]), np.hstack([self.A, norms]), self.b)
        lp.add_objective(r, -1.0)
        sol = solve_conic(lp)
        if sol.status is Status.INFEASIBLE:
            raise InfeasiblePolytopeError("Chebyshev LP is infeasible")
        if not sol.ok:
            raise SolverError(f"Chebyshev LP returned {sol.status.value}", sol.diagnostics)
        radius = max(0.0, float(sol["r"][0]))
        if radius < config.FEASIBILITY_TOL:
            radius = 0.0
        return np.asarray(sol["x"]), radius

    def is_bounded(self) -> bool:
        "True iff the recession cone {d : A d ≤ 0} is {0}."
        if self._bounded is None:
            self._bounded = True
            for i in range(self.n):
                for sign in (1.0, -1.0):
                    lp = ConicProgram()
                    d = lp.add_block("d", self.n, lower=-1.0, upper=1.0)
                    lp.add_le(d, self.A, 0.0)
                    lp.add_objective([int(d[i])], -sign)
                    sol = solve_conic(lp)
                    if not sol.ok:
                        raise SolverError(
                            f"recession LP returned {sol.status.value}", sol.diagnostics
                        )
                    if sign * float(sol["d"][i]) > config.FEASIBILITY_TOL:
                        self._bounded = False
                        return False
        return self._bounded

    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        lo = np.full(self.n, -np.inf)
        hi = np.full(self.n, np.inf)
        for i in range(self.n):
            for sign in (1.0, -1.0):
                lp = ConicProgram()
                x = lp.add_block("x", self.n)
                lp.add_le(x, self.A, self.b)
                lp.add_objective([int(x[i])], sign)
                sol = solve_conic(lp)
                if sol.status is Status.INFEASIBLE:
                    raise InfeasiblePolytopeError("bounding-box LP is infeasible")
                if sol.ok:
                    if sign > 0:
                        lo[i] = sol["x"][i]
                    else:
                        hi[i] = sol["x"][i]
        return lo, hi

    def power(self, count: int) -> "HPolytope":
        """
        The Cartesian power P^count, over points stacked as
        (x_0, x_1, ..., x_{count-1}).
        """
        return HPolytope(np.kron(np.eye(count), self.A), np.tile(self.b, count), False)

    def vertices_2d(self) -> np.ndarray:
        """
        Vertices of a bounded planar polytope in counter-clockwise order;
        empty if it is not bounded or has no interior.
        """
        if self.n != 2 or not self.is_bounded():
            return np.zeros((0, 2))
        center, radius = self.chebyshev_center()
        if radius <= 0:
            return np.zeros((0, 2))
        halfspaces = np.hstack([self.A, -self.b[:, None]])
        points = HalfspaceIntersection(halfspaces, center).intersections
        angles = np.arctan2(points[:, 1] - center[1], points[:, 0] - center[0])
        return points[np.argsort(angles)]


@dataclass(frozen=True)
class LabeledRegion:
    name: str
    polytope: HPolytope = field(compare=False)
    labels: FrozenSet[str] = frozenset()

    @classmethod
    def box(cls, name: str, lo: ArrayLike, hi: ArrayLike, labels: Iterable[str] = ()) -> "LabeledRegion":
        return cls(name, HPolytope.from_box(lo, hi), frozenset(labels))

    @property
    def n(self) -> int:
        return self.polytope.n


def contains(P: HPolytope, x: ArrayLike, tol: float = config.CONTAINMENT_TOL) -> bool:
    return P.contains(x, tol)


def intersects(P: HPolytope, Q: HPolytope) -> bool:
    return P.intersects(Q)


def chebyshev_center(P: HPolytope) -> Tuple[np.ndarray, float]:
    return P.chebyshev_center()
