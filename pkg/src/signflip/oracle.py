"""Brute-force global solvers and extremality measurement for small instances.

These are the ground truth the descent heuristic is tested against: exhaustive
enumeration over all 2^m sign restrictions, and (for diagonal problems with
directly solvable physics) enumeration over all extremal designs.  Both refuse
to run past an explicit size cap, since the work is exponential in m.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import TYPE_CHECKING

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import conic
from .model import (
    AUBPoint,
    Design,
    DesignBounds,
    DesignProblem,
    DomainError,
    recover_theta,
    to_aub,
)

if TYPE_CHECKING:
    from .problems.diagonal import DiagonalDesignSpec

__all__ = [
    "EnumerationLimitError",
    "NoFeasibleSignsError",
    "OracleResult",
    "ExtremalResult",
    "ExtremalityReport",
    "global_by_signs",
    "global_extremal",
    "extremality_report",
]

MAX_M_DEFAULT = 20


class EnumerationLimitError(ValueError):
    """Refused to enumerate: the instance is larger than the stated cap."""


class NoFeasibleSignsError(RuntimeError):
    """Every sign restriction of the instance is infeasible."""


@dataclass(frozen=True)
class OracleResult:
    design: Design
    point: AUBPoint
    objective: float
    signs: np.ndarray
    n_solved: int
    n_infeasible: int


@dataclass(frozen=True)
class ExtremalResult:
    design: Design
    field: np.ndarray
    objective: float
    theta: np.ndarray
    n_solved: int
    skipped_singular: int


@dataclass(frozen=True)
class ExtremalityReport:
    fraction_extremal: float
    worst_interior_gap: float


def global_by_signs(
    problem: DesignProblem,
    max_m: int = MAX_M_DEFAULT,
    solver_config: conic.SolverConfig | None = None,
    backend: str = "auto",
) -> OracleResult:
    """Globally solve by enumerating all 2^m sign restrictions.

    Ties are broken by the lexicographically smallest sign vector (with
    -1 < +1), which the enumeration order delivers for free; the result is
    therefore deterministic.  Infeasible restrictions contribute +inf.
    """
    m = problem.layout.m
    if m > max_m:
        raise EnumerationLimitError(
            f"m={m} exceeds the enumeration cap max_m={max_m}; raise it explicitly"
        )
    aub = to_aub(problem)

    best_objective = np.inf
    best_signs: np.ndarray | None = None
    best_point: AUBPoint | None = None
    n_infeasible = 0
    n_solved = 0

    for combo in product((-1, 1), repeat=m):
        s = np.array(combo, dtype=np.int8)
        program = conic.build_sign_fixed(aub, s)
        result = conic.solve(program, solver_config, backend=backend)
        n_solved += 1
        if result.status != conic.SolverStatus.OPTIMAL:
            n_infeasible += 1
            continue
        point, objective = conic.extract_point(result, aub)
        if objective < best_objective:
            best_objective = objective
            best_signs = s
            best_point = point

    if best_point is None or best_signs is None:
        raise NoFeasibleSignsError("no feasible sign pattern")
    design = recover_theta(best_point.v, best_point.w, problem.bounds)
    return OracleResult(design, best_point, best_objective, best_signs, n_solved, n_infeasible)


def global_extremal(spec: "DiagonalDesignSpec", max_m: int = MAX_M_DEFAULT) -> ExtremalResult:
    """Globally solve a diagonal design problem over extremal designs only.

    Enumerates theta in {theta_min_i, theta_max_i}^m, solves the linear
    physics (A + diag(theta)) z = b directly at each vertex, and keeps the
    best objective.  Zero-width coordinates contribute a single choice, and
    singular vertices are skipped (and counted), not fatal.
    """
    n = spec.n
    bounds = spec.bounds
    live = int(np.count_nonzero(bounds.rho > 0))
    if live > max_m:
        raise EnumerationLimitError(
            f"{live} free design coordinates exceed the enumeration cap max_m={max_m}"
        )

    choices = [
        (lo,) if lo == hi else (lo, hi)
        for lo, hi in zip(bounds.theta_min, bounds.theta_max)
    ]
    A = spec.A.toarray() if sp.issparse(spec.A) else np.asarray(spec.A, dtype=float)

    best_objective = np.inf
    best_theta: np.ndarray | None = None
    best_field: np.ndarray | None = None
    skipped = 0
    n_solved = 0

    for combo in product(*choices):
        theta = np.array(combo, dtype=float)
        n_solved += 1
        try:
            z = np.linalg.solve(A + np.diag(theta), spec.b)
        except np.linalg.LinAlgError:
            skipped += 1
            continue
        objective = spec.objective.value(z)
        if objective < best_objective:
            best_objective = objective
            best_theta = theta
            best_field = z

    if best_theta is None or best_field is None:
        raise NoFeasibleSignsError("every extremal vertex had singular physics")
    mask = np.ones(n, dtype=bool)
    design = Design(best_theta, mask)
    return ExtremalResult(design, best_field, best_objective, best_theta, n_solved, skipped)


def extremality_report(design, bounds: DesignBounds, tol: float = 1e-6) -> ExtremalityReport:
    """Fraction of coordinates at an interval endpoint, and the largest
    interior gap (relative to the interval width)."""
    theta = np.asarray(getattr(design, "theta", design), dtype=float)
    if theta.size != bounds.m:
        raise DomainError("design length does not match the bounds")
    if theta.size == 0:
        return ExtremalityReport(1.0, 0.0)
    width = bounds.width
    gap = np.minimum(theta - bounds.theta_min, bounds.theta_max - theta)
    rel_gap = np.zeros_like(gap)
    positive = width > 0
    rel_gap[positive] = np.maximum(gap[positive], 0.0) / width[positive]
    extremal = rel_gap <= tol
    return ExtremalityReport(
        float(np.count_nonzero(extremal)) / theta.size,
        float(np.max(rel_gap)),
    )
