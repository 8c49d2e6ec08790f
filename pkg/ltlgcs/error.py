#!/usr/bin/env python

"""
ltlgcs Errors

Every failure the planner can report is a PlanningError. `exit_code` is
the status the command line exits with; `graph_level` separates failures
of the discrete structure (automaton, product graph) from failures of the
continuous solve.
"""

import json
from typing import Any, Dict, List, Optional


class PlanningError(Exception):
    desc = "Unknown Error"
    exit_code = 4  # status this produces on the command line
    graph_level = False  # whether the discrete structure is at fault

    def __init__(self, detail: Optional[str] = None) -> None:
        Exception.__init__(self, detail or self.desc)
        self.detail = detail

    def __repr__(self) -> str:
        status = [self.__class__.__module__ + "." + self.__class__.__name__]
        if self.detail:
            status.append(self.detail)
        return f"<{', '.join(status)} at {id(self):#x}>"

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {
            "error": self.__class__.__name__,
            "desc": self.desc,
            "detail": self.detail,
            "exit": self.exit_code,
            "graph_level": self.graph_level,
        }
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


# Input errors


class ScenarioError(PlanningError):
    desc = "The scenario file is invalid"
    exit_code = 2


class FormulaSyntaxError(ScenarioError):
    desc = "The formula could not be parsed"

    def __init__(
        self,
        detail: Optional[str] = None,
        offset: int = 0,
        expected: Optional[List[str]] = None,
    ) -> None:
        ScenarioError.__init__(self, detail)
        self.offset = offset
        self.expected = sorted(expected or [])

    def to_dict(self) -> Dict[str, Any]:
        out = ScenarioError.to_dict(self)
        out["offset"] = self.offset
        out["expected"] = self.expected
        return out


class UnknownAtomError(ScenarioError):
    desc = "The formula refers to an atom no region carries"

    def __init__(self, detail: Optional[str] = None, offset: int = 0) -> None:
        ScenarioError.__init__(self, detail)
        self.offset = offset

    def to_dict(self) -> Dict[str, Any]:
        out = ScenarioError.to_dict(self)
        out["offset"] = self.offset
        return out


class DimensionError(ScenarioError):
    desc = "Dimensions do not agree"


class OrderError(ScenarioError):
    desc = "Bezier order is too low for the requested smoothness"


class CostSpecError(ScenarioError):
    desc = "Invalid cost specification"


class LassoRequiredError(ScenarioError):
    desc = "A formula outside the co-safe fragment needs a lasso word"


class UnsupportedFormulaError(ScenarioError):
    desc = "No deterministic Buchi automaton could be built for the formula"


class NotCoSafeError(ScenarioError):
    desc = "The formula is not syntactically co-safe"


class LetterError(ScenarioError):
    desc = "Letter is outside the automaton alphabet"


class InfeasiblePolytopeError(ScenarioError):
    desc = "The polytope is empty"


class UnboundedVertexError(ScenarioError):
    desc = "Unbounded region cannot carry an L2 cost"


# Unsatisfiable problems


class NoInitialRegionError(PlanningError):
    desc = "The start configuration lies in no region"
    exit_code = 3
    graph_level = True


class UnsatisfiableError(PlanningError):
    desc = "The product graph has no path to an accepting state"
    exit_code = 3
    graph_level = True


class InfeasibleRelaxationError(PlanningError):
    desc = "The convex relaxation is infeasible"
    exit_code = 3


class NoLoopFoundError(PlanningError):
    desc = "No accepting state admits a closing loop"
    exit_code = 3
    graph_level = True


# Solver failures


class SolverError(PlanningError):
    desc = "The conic solver failed"

    def __init__(
        self, detail: Optional[str] = None, diagnostics: Optional[Dict[str, Any]] = None
    ) -> None:
        PlanningError.__init__(self, detail)
        self.diagnostics = diagnostics or {}

    def to_dict(self) -> Dict[str, Any]:
        out = PlanningError.to_dict(self)
        out["diagnostics"] = {k: str(v) for k, v in self.diagnostics.items()}
        return out


class NoPathFoundError(PlanningError):
    desc = "Rounding did not find a feasible path"


class RestrictionError(PlanningError):
    desc = "The convex restriction of an integral path is infeasible"


class PathBudgetError(PlanningError):
    desc = "Too many simple paths to enumerate"


class VerificationError(PlanningError):
    desc = "The plan failed verification"
