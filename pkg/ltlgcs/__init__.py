#!/usr/bin/env python

"""
Temporal-Logic Motion Planning over Graphs of Convex Sets

ltlgcs plans smooth Bezier-spline paths through labeled convex regions so
that the sequence of labels visited satisfies a Linear Temporal Logic
formula. The product of the region abstraction and an automaton for the
formula becomes a shortest-path problem on a Graph of Convex Sets, which
is solved by convex relaxation and randomized rounding.
"""

__version__ = "0.1.0"

from ltlgcs.ltl.parser import parse
from ltlgcs.ltl.semantics import Word, check_word
from ltlgcs.geometry import HPolytope, LabeledRegion
from ltlgcs.gcs.graph import CostSpec, Norm
from ltlgcs.planner import (
    Plan,
    Planner,
    PlanRequest,
    Verification,
    plan,
    plan_cosafe,
    plan_full,
    verify,
)
from ltlgcs.events import on
