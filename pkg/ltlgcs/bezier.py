#!/usr/bin/env python

"""
Bezier curves and splines.

Every segment spans a unit parameter interval, so derivatives are taken
with respect to the curve parameter s ∈ [0, 1] and continuity across a
junction compares derivative control points directly.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Optional

import numpy as np

from ltlgcs import config
from ltlgcs.error import DimensionError
from ltlgcs.geometry import ArrayLike, HPolytope
from ltlgcs.ltl.semantics import Word


class BezierCurve:
    def __init__(self, points: ArrayLike) -> None:
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(1, -1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DimensionError(f"control points must be (k+1)×n, got {pts.shape}")
        self.points = pts
        self.points.setflags(write=False)

    @property
    def order(self) -> int:
        return int(self.points.shape[0] - 1)

    @property
    def n(self) -> int:
        return int(self.points.shape[1])

    def __repr__(self) -> str:
        return f"<BezierCurve k={self.order} n={self.n} at {id(self):#x}>"

    def eval(self, s: float) -> np.ndarray:
        "de Casteljau evaluation."
        if not 0.0 <= s <= 1.0:
            raise ValueError(f"parameter {s} outside [0, 1]")
        pts = self.points.copy()
        for level in range(self.order):
            pts[: self.order - level] = (1 - s) * pts[: self.order - level] + s * pts[
                1 : self.order - level + 1
            ]
        return pts[0]

    def derivative(self) -> "BezierCurve":
        if self.order == 0:
            raise ValueError("a constant curve has no derivative curve")
        return BezierCurve(self.order * np.diff(self.points, axis=0))

    def derivative_points(self, order: int) -> np.ndarray:
        "Control points of the order-th derivative curve."
        curve = self
        for _ in range(order):
            curve = curve.derivative()
        return curve.points

    def contained_in(self, P: HPolytope, tol: float = config.CONTAINMENT_TOL) -> bool:
        """
        True iff every control point lies in P, which implies (by the
        convex-hull property) that the whole curve does.
        """
        if P.n != self.n:
            raise DimensionError(f"curve in R^{self.n}, polytope in R^{P.n}")
        return bool(np.all(self.points @ P.A.T <= P.b + tol))

    def sample(self, count: int) -> np.ndarray:
        return np.array([self.eval(s) for s in np.linspace(0.0, 1.0, count)])

    def is_stationary(self, tol: float = config.CONTINUITY_TOL) -> bool:
        return bool(np.all(np.abs(self.points - self.points[0]) <= tol))


def eval(c: BezierCurve, s: float) -> np.ndarray:  # pylint: disable=redefined-builtin
    return c.eval(s)


def derivative(c: BezierCurve) -> BezierCurve:
    return c.derivative()


def contained_in(c: BezierCurve, P: HPolytope, tol: float = config.CONTAINMENT_TOL) -> bool:
    return c.contained_in(P, tol)


@dataclass(frozen=True)
class Segment:
    curve: BezierCurve = field(compare=False)
    region: str
    labels: FrozenSet[str] = frozenset()
    vertex: str = ""


@dataclass
class BezierSpline:
    """
    A sequence of segments with C^smoothness junctions. For a lasso plan,
    `lasso` is the index of the segment where the repeating part starts and
    the last segment is the closing copy of segments[lasso].
    """

    segments: List[Segment]
    smoothness: int = 0
    lasso: Optional[int] = None
    wrap_smoothness: Optional[int] = None  # at the closing junction; default smoothness

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("a spline needs at least one segment")
        if self.lasso is not None and not 0 <= self.lasso < len(self.segments) - 1:
            raise ValueError(f"lasso index {self.lasso} outside the spline")

    def __len__(self) -> int:
        return len(self.segments)

    @property
    def start(self) -> np.ndarray:
        return self.segments[0].curve.points[0]

    @property
    def visited(self) -> List[Segment]:
        "Segments that contribute a letter to the trace."
        if self.lasso is None:
            return list(self.segments)
        return list(self.segments[:-1])

    def continuity_violations(self, tol: float = config.CONTINUITY_TOL) -> List[str]:
        """
        Junctions where a derivative of order ≤ smoothness jumps, including
        the junction from the closing segment back into the cycle.
        """
        junctions = [(j, j + 1, self.smoothness) for j in range(len(self.segments) - 1)]
        if self.lasso is not None:
            wrap = self.smoothness if self.wrap_smoothness is None else self.wrap_smoothness
            junctions.append((len(self.segments) - 1, self.lasso + 1, wrap))
        problems = []
        for i, j, smoothness in junctions:
            left = self.segments[i].curve
            right = self.segments[j].curve
            for order in range(min(smoothness, left.order, right.order) + 1):
                end = left.derivative_points(order)[-1]
                begin = right.derivative_points(order)[0]
                gap = float(np.max(np.abs(end - begin)))
                if gap > tol:
                    problems.append(
                        f"junction {i}->{j}: derivative {order} differs by {gap:.3g}"
                    )
        return problems

    def sample(self, per_segment: int = 100) -> np.ndarray:
        return np.vstack([seg.curve.sample(per_segment) for seg in self.segments])

    def to_json(self) -> Dict[str, Any]:
        return {
            "smoothness": self.smoothness,
            "lasso": self.lasso,
            "wrap_smoothness": self.wrap_smoothness,
            "segments": [
                {
                    "order": seg.curve.order,
                    "control_points": seg.curve.points.tolist(),
                    "region": seg.region,
                    "labels": sorted(seg.labels),
                    "vertex": seg.vertex,
                }
                for seg in self.segments
            ],
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "BezierSpline":
        segments = [
            Segment(
                BezierCurve(item["control_points"]),
                item["region"],
                frozenset(item.get("labels", [])),
                item.get("vertex", ""),
            )
            for item in data["segments"]
        ]
        return cls(
            segments,
            int(data.get("smoothness", 0)),
            data.get("lasso"),
            data.get("wrap_smoothness"),
        )


def trace(sp: BezierSpline) -> Word:
    """
    One letter per visited segment, repeated labels kept; lasso plans give
    a lasso word.
    """
    return Word.of((seg.labels for seg in sp.visited), sp.lasso)