#!/usr/bin/env python

"""
A small conic-program container and the backend that solves it.

A ConicProgram has named blocks of scalar variables with bounds, a linear
objective, linear equality and inequality rows, and second-order cones
‖x[u]‖ ≤ x[t] over variables. Programs without cones go to HiGHS through
scipy.optimize.linprog; programs with cones go to Clarabel through cvxpy.
"""

from dataclasses import dataclass, field
from enum import Enum
import logging
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple, Union

import cvxpy as cp
import numpy as np
from scipy import optimize, sparse

log = logging.getLogger(__name__)

Indices = Union[Sequence[int], np.ndarray]


class Status(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERICAL_FAILURE = "numerical-failure"


class _Rows:
    "Sparse rows accumulated as COO triplets."

    def __init__(self) -> None:
        self.rows: List[np.ndarray] = []
        self.cols: List[np.ndarray] = []
        self.vals: List[np.ndarray] = []
        self.rhs: List[float] = []

    @property
    def count(self) -> int:
        return len(self.rhs)

    def add(self, cols: Indices, coeffs: np.ndarray, rhs: Union[float, np.ndarray]) -> None:
        coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
        cols = np.asarray(cols, dtype=int)
        rhs_arr = np.broadcast_to(np.asarray(rhs, dtype=float), (coeffs.shape[0],))
        if coeffs.shape[1] != cols.size:
            raise ValueError(
                f"{coeffs.shape[1]} coefficients per row for {cols.size} variables"
            )
        if not np.all(np.isfinite(coeffs)) or not np.all(np.isfinite(rhs_arr)):
            raise ValueError("constraint data must be finite")
        r, c = np.nonzero(coeffs)
        self.rows.append(r + self.count)
        self.cols.append(cols[c])
        self.vals.append(coeffs[r, c])
        self.rhs.extend(rhs_arr.tolist())

    def matrix(self, size: int) -> sparse.csr_matrix:
        if not self.rhs:
            return sparse.csr_matrix((0, size))
        return sparse.csr_matrix(
            (
                np.concatenate(self.vals),
                (np.concatenate(self.rows), np.concatenate(self.cols)),
            ),
            shape=(self.count, size),
        )

    def items(self) -> List[Tuple[int, int, float]]:
        if not self.rhs:
            return []
        return list(
            zip(
                np.concatenate(self.rows).tolist(),
                np.concatenate(self.cols).tolist(),
                np.concatenate(self.vals).tolist(),
            )
        )


class ConicProgram:
    """
    minimize c·x + offset
    subject to  E x = e,  G x ≤ g,  lower ≤ x ≤ upper,
                ‖x[u]‖₂ ≤ x[t] for every cone (t, u).
    """

    def __init__(self) -> None:
        self.blocks: Dict[str, np.ndarray] = {}
        self.lower: List[float] = []
        self.upper: List[float] = []
        self.cost: Dict[int, float] = {}
        self.offset = 0.0
        self.eq = _Rows()
        self.le = _Rows()
        self.cones: List[Tuple[int, np.ndarray]] = []

    @property
    def size(self) -> int:
        return len(self.lower)

    def add_block(
        self,
        name: str,
        size: int,
        lower: float = -np.inf,
        upper: float = np.inf,
    ) -> np.ndarray:
        if name in self.blocks:
            raise ValueError(f"duplicate block {name}")
        idx = np.arange(self.size, self.size + size)
        self.blocks[name] = idx
        self.lower.extend([lower] * size)
        self.upper.extend([upper] * size)
        return idx

    def add_objective(self, cols: Indices, coeffs: Union[float, Sequence[float], np.ndarray]) -> None:
        cols = np.asarray(cols, dtype=int).reshape(-1)
        values = np.broadcast_to(np.asarray(coeffs, dtype=float), cols.shape)
        if not np.all(np.isfinite(values)):
            raise ValueError("objective coefficients must be finite")
        for col, value in zip(cols.tolist(), values.tolist()):
            self.cost[col] = self.cost.get(col, 0.0) + value

    def add_eq(self, cols: Indices, coeffs: np.ndarray, rhs: Union[float, np.ndarray] = 0.0) -> None:
        self.eq.add(cols, coeffs, rhs)

    def add_le(self, cols: Indices, coeffs: np.ndarray, rhs: Union[float, np.ndarray] = 0.0) -> None:
        self.le.add(cols, coeffs, rhs)

    def add_soc(self, t: int, u: Indices) -> None:
        self.cones.append((int(t), np.asarray(u, dtype=int).reshape(-1)))

    def objective_vector(self) -> np.ndarray:
        c = np.zeros(self.size)
        for col, value in self.cost.items():
            c[col] = value
        return c

    def dump(self, out: TextIO) -> None:
        """
        Write the program as text; see doc/conic.md for the format.
        """
        out.write("# ltlgcs conic program\n")
        out.write(f"variables {self.size}\n")
        for name, idx in self.blocks.items():
            start = int(idx[0]) if idx.size else self.size
            out.write(f"block {name} {start} {idx.size}\n")
        for i, (lo, hi) in enumerate(zip(self.lower, self.upper)):
            if np.isfinite(lo) or np.isfinite(hi):
                out.write(f"bound {i} {lo!r} {hi!r}\n")
        out.write(f"offset {self.offset!r}\n")
        for col in sorted(self.cost):
            out.write(f"cost {col} {self.cost[col]!r}\n")
        for label, rows in (("eq", self.eq), ("le", self.le)):
            entries: Dict[int, List[str]] = {}
            for r, c, v in rows.items():
                entries.setdefault(r, []).append(f"{c}:{v!r}")
            for r, rhs in enumerate(rows.rhs):
                out.write(f"{label} {' '.join(entries.get(r, []))} | {rhs!r}\n")
        for t, u in self.cones:
            out.write(f"soc {t} | {' '.join(str(i) for i in u.tolist())}\n")


@dataclass
class ConicSolution:
    status: Status
    x: Optional[np.ndarray] = None
    value: Optional[float] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)
    blocks: Dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status is Status.OPTIMAL

    def __getitem__(self, name: str) -> np.ndarray:
        assert self.x is not None, "no primal solution"
        return self.x[self.blocks[name]]


def solve_conic(program: ConicProgram) -> ConicSolution:
    if program.cones:
        sol = _solve_cvxpy(program)
    else:
        sol = _solve_linprog(program)
    sol.blocks = program.blocks
    if sol.ok and sol.x is not None:
        sol.value = float(program.objective_vector() @ sol.x + program.offset)
    log.debug(
        "conic program with %d variables, %d cones: %s",
        program.size,
        len(program.cones),
        sol.status.value,
    )
    return sol


def _solve_linprog(program: ConicProgram) -> ConicSolution:
    bounds = [
        (None if np.isinf(lo) else lo, None if np.isinf(hi) else hi)
        for lo, hi in zip(program.lower, program.upper)
    ]
    kwargs: Dict[str, Any] = {}
    if program.eq.count:
        kwargs["A_eq"] = program.eq.matrix(program.size)
        kwargs["b_eq"] = np.asarray(program.eq.rhs)
    if program.le.count:
        kwargs["A_ub"] = program.le.matrix(program.size)
        kwargs["b_ub"] = np.asarray(program.le.rhs)
    res = optimize.linprog(
        program.objective_vector(), bounds=bounds, method="highs", **kwargs
    )
    status = {
        0: Status.OPTIMAL,
        2: Status.INFEASIBLE,
        3: Status.UNBOUNDED,
    }.get(res.status, Status.NUMERICAL_FAILURE)
    diagnostics = {"backend": "highs", "code": res.status, "message": res.message}
    if status is not Status.OPTIMAL:
        return ConicSolution(status, diagnostics=diagnostics)
    return ConicSolution(status, x=np.asarray(res.x), diagnostics=diagnostics)


def _selector(rows: np.ndarray, size: int) -> sparse.csr_matrix:
    return sparse.csr_matrix(
        (np.ones(rows.size), (np.arange(rows.size), rows)), shape=(rows.size, size)
    )


def _solve_cvxpy(program: ConicProgram) -> ConicSolution:
    n = program.size
    x = cp.Variable(n)
    constraints = []
    if program.eq.count:
        constraints.append(program.eq.matrix(n) @ x == np.asarray(program.eq.rhs))
    if program.le.count:
        constraints.append(program.le.matrix(n) @ x <= np.asarray(program.le.rhs))
    lower = np.asarray(program.lower)
    upper = np.asarray(program.upper)
    lo_idx = np.flatnonzero(np.isfinite(lower))
    hi_idx = np.flatnonzero(np.isfinite(upper))
    if lo_idx.size:
        constraints.append(_selector(lo_idx, n) @ x >= lower[lo_idx])
    if hi_idx.size:
        constraints.append(_selector(hi_idx, n) @ x <= upper[hi_idx])
    # one vectorized SOC constraint per cone dimension
    by_dim: Dict[int, List[Tuple[int, np.ndarray]]] = {}
    for t, u in program.cones:
        by_dim.setdefault(u.size, []).append((t, u))
    for dim, cones in by_dim.items():
        ts = np.array([t for t, _ in cones])
        us = np.concatenate([u for _, u in cones])
        stacked = cp.reshape(_selector(us, n) @ x, (dim, len(cones)), order="F")
        constraints.append(cp.SOC(_selector(ts, n) @ x, stacked, axis=0))
    problem = cp.Problem(cp.Minimize(program.objective_vector() @ x), constraints)
    solver = cp.CLARABEL if cp.CLARABEL in cp.installed_solvers() else None
    diagnostics: Dict[str, Any] = {"backend": solver or "cvxpy-default"}
    try:
        problem.solve(solver=solver)
    except cp.error.SolverError as why:
        diagnostics["message"] = str(why)
        return ConicSolution(Status.NUMERICAL_FAILURE, diagnostics=diagnostics)
    diagnostics["code"] = problem.status
    if problem.solver_stats is not None:
        diagnostics["iterations"] = problem.solver_stats.num_iters
        diagnostics["solve_time"] = problem.solver_stats.solve_time
    if problem.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        return ConicSolution(Status.OPTIMAL, x=np.asarray(x.value), diagnostics=diagnostics)
    status = {
        cp.INFEASIBLE: Status.INFEASIBLE,
        cp.INFEASIBLE_INACCURATE: Status.INFEASIBLE,
        cp.UNBOUNDED: Status.UNBOUNDED,
        cp.UNBOUNDED_INACCURATE: Status.UNBOUNDED,
    }.get(problem.status, Status.NUMERICAL_FAILURE)
    return ConicSolution(status, diagnostics=diagnostics)
