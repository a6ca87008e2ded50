"""Sign flip descent over the convex restrictions of the AUB form.

Each sign vector s in {±1}^m turns |w| <= |v| into the convex bound
|w| <= s∘v.  The descent loop solves the restriction at the current signs,
proposes a flip (round-robin greedy, or field-based: flip exactly where the
optimal v vanishes), re-solves, and keeps the proposal only when it strictly
improves the objective.  Field-based proposals can never increase the
optimal value, since the incumbent point stays feasible under them.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import conic
from .model import (
    AUBPoint,
    AUBProblem,
    Design,
    DesignProblem,
    DomainError,
    ProblemStructureError,
    recover_theta,
    to_aub,
)

__all__ = [
    "SignVector",
    "DescentConfig",
    "IterationRecord",
    "DescentTrace",
    "DescentResult",
    "InitializationError",
    "init_signs",
    "propose_greedy",
    "propose_field",
    "midpoint_field",
    "run",
    "run_aub",
]

PhysicsSolveHook = Callable[[AUBProblem], np.ndarray]


class InitializationError(RuntimeError):
    """The initial physics solve or initial subproblem failed."""


@dataclass(frozen=True)
class SignVector:
    """A vector in {-1, +1}^m parameterizing one convex restriction."""

    s: np.ndarray

    def __post_init__(self) -> None:
        s = np.array(self.s, dtype=np.int8)
        if s.ndim != 1:
            raise DomainError("sign vector must be 1-d")
        if s.size and not np.all(np.abs(s) == 1):
            raise DomainError("sign vector entries must be +1 or -1")
        s.setflags(write=False)
        object.__setattr__(self, "s", s)

    def __len__(self) -> int:
        return self.s.size

    def flipped(self, index: int) -> "SignVector":
        out = np.array(self.s)
        out[index] = -out[index]
        return SignVector(out)

    @classmethod
    def ones(cls, m: int) -> "SignVector":
        return cls(np.ones(m, dtype=np.int8))


@dataclass(frozen=True)
class DescentConfig:
    """Proposal rule and stopping thresholds for sign flip descent."""

    rule: str = "field"
    epsilon: float = 1e-4
    max_iters: int = 1000
    zero_threshold: float = 1e-8
    accept_margin: float = 1e-9

    def __post_init__(self) -> None:
        if self.rule not in ("field", "greedy"):
            raise DomainError(f"rule must be 'field' or 'greedy', got {self.rule!r}")
        if self.epsilon <= 0:
            raise DomainError("epsilon must be positive")
        if self.max_iters < 1:
            raise DomainError("max_iters must be at least 1")


@dataclass(frozen=True)
class IterationRecord:
    """One accept/reject step; +inf objective_after marks an infeasible proposal."""

    iter: int
    proposal_rule: str
    objective_before: float
    objective_after: float
    accepted: bool
    flips: int
    solve_time: float


@dataclass
class DescentTrace:
    """Per-iteration history of a descent run, exportable to CSV."""

    records: list[IterationRecord] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return sum(1 for r in self.records if r.proposal_rule != "init")

    @property
    def accepted_objectives(self) -> list[float]:
        out = [r.objective_after for r in self.records if r.accepted]
        return out

    @property
    def total_solve_time(self) -> float:
        return sum(r.solve_time for r in self.records)

    def to_csv(self, path) -> None:
        with open(Path(path), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["iter", "rule", "objective_before", "objective_after", "accepted", "flips", "solve_time_s"]
            )
            for r in self.records:
                writer.writerow(
                    [
                        r.iter,
                        r.proposal_rule,
                        repr(r.objective_before),
                        repr(r.objective_after),
                        int(r.accepted),
                        r.flips,
                        f"{r.solve_time:.6f}",
                    ]
                )


@dataclass(frozen=True)
class DescentResult:
    """Best design found by a descent run, with its field and trace."""

    design: Design
    point: AUBPoint
    trace: DescentTrace
    signs: SignVector
    objective: float

    def __iter__(self):
        return iter((self.design, self.point, self.trace))


def _zero_mask(v: np.ndarray, zero_threshold: float) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(v), initial=0.0)))
    return np.abs(v) <= zero_threshold * scale


def init_signs(
    aub: AUBProblem,
    physics: PhysicsSolveHook,
    config: DescentConfig | None = None,
) -> SignVector:
    """Initial signs from a physics solve at the midpoint design.

    Entries where the field is (numerically) zero default to +1; the field
    rule revisits them.
    """
    cfg = config or DescentConfig()
    v = np.asarray(physics(aub), dtype=float)
    if v.shape != (aub.m,):
        raise ProblemStructureError(
            f"physics hook returned a field of length {v.size}, expected {aub.m}"
        )
    if not np.all(np.isfinite(v)):
        raise InitializationError("physics solve returned non-finite field values")
    s = np.where(v < 0, -1, 1).astype(np.int8)
    s[_zero_mask(v, cfg.zero_threshold)] = 1
    return SignVector(s)


def propose_greedy(s: SignVector, k: int) -> SignVector:
    """Flip exactly one entry, round-robin: entry 1 + ((k-1) mod m)."""
    if k < 1:
        raise DomainError("iteration index k must be >= 1")
    m = len(s)
    if m == 0:
        return s
    return s.flipped((k - 1) % m)


def propose_field(
    s: SignVector, v: np.ndarray, zero_threshold: float = 1e-8
) -> tuple[SignVector, int]:
    """Flip the signs at every coordinate where the optimal v vanishes.

    Returns the proposal and the flip count; zero flips is the termination
    signal.  The incumbent optimal point stays feasible under the proposal,
    so the proposal's optimal value cannot exceed the incumbent's.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (len(s),):
        raise ProblemStructureError("v must match the sign vector in length")
    mask = _zero_mask(v, zero_threshold)
    flips = int(np.count_nonzero(mask))
    if flips == 0:
        return s, 0
    out = np.array(s.s)
    out[mask] = -out[mask]
    return SignVector(out), flips


def midpoint_field(
    aub: AUBProblem,
    solver_config: conic.SolverConfig | None = None,
    backend: str = "auto",
) -> np.ndarray:
    """Generic physics hook: solve the convex program with the design pinned
    at the interval midpoints and return its v block.

    Problem families with cheaper direct solves provide their own hooks; this
    bootstrap works for any problem, including ones loaded from JSON.
    """
    program = conic.build_fixed_design(aub, None)
    result = conic.solve(program, solver_config, backend=backend)
    if result.status != conic.SolverStatus.OPTIMAL:
        raise InitializationError(
            f"midpoint-design solve failed with status {result.status.value}"
        )
    point, _ = conic.extract_point(result, aub)
    return point.v


def run(
    problem: DesignProblem,
    config: DescentConfig | None = None,
    *,
    physics: Optional[PhysicsSolveHook] = None,
    solver_config: conic.SolverConfig | None = None,
    backend: str = "auto",
    warm_start: bool = False,
) -> DescentResult:
    """Run sign flip descent on a design problem.

    Converts to AUB form, initializes signs from the physics hook (midpoint
    bootstrap by default), then iterates propose / solve / accept-if-better
    until the rule's stopping condition.
    """
    return run_aub(
        to_aub(problem),
        config,
        physics=physics,
        solver_config=solver_config,
        backend=backend,
        warm_start=warm_start,
    )


def run_aub(
    aub: AUBProblem,
    config: DescentConfig | None = None,
    *,
    physics: Optional[PhysicsSolveHook] = None,
    solver_config: conic.SolverConfig | None = None,
    backend: str = "auto",
    warm_start: bool = False,
) -> DescentResult:
    cfg = config or DescentConfig()
    hook = physics or (lambda a: midpoint_field(a, solver_config, backend))
    signs = init_signs(aub, hook, cfg)

    trace = DescentTrace()
    last_result: conic.SolverResult | None = None

    def solve_at(s: SignVector) -> tuple[float, AUBPoint | None, float, conic.SolverResult | None]:
        program = conic.build_sign_fixed(aub, s)
        t0 = time.perf_counter()
        result = conic.solve(
            program,
            solver_config,
            backend=backend,
            warm_start=last_result if warm_start else None,
        )
        elapsed = time.perf_counter() - t0
        if result.status != conic.SolverStatus.OPTIMAL:
            return np.inf, None, elapsed, None
        point, objective = conic.extract_point(result, aub)
        return objective, point, elapsed, result

    objective, point, elapsed, result = solve_at(signs)
    if point is None:
        raise InitializationError("initial sign-fixed subproblem is not solvable")
    last_result = result
    trace.records.append(
        IterationRecord(0, "init", objective, objective, True, 0, elapsed)
    )

    rejections_in_row = 0
    m = aub.m
    for k in range(1, cfg.max_iters + 1):
        if cfg.rule == "greedy":
            proposal = propose_greedy(signs, k)
            flips = 1
        else:
            proposal, flips = propose_field(signs, point.v, cfg.zero_threshold)
            if flips == 0:
                trace.records.append(
                    IterationRecord(k, "field", objective, objective, False, 0, 0.0)
                )
                break

        new_objective, new_point, elapsed, result = solve_at(proposal)
        margin = cfg.accept_margin * max(1.0, abs(objective))
        accepted = new_objective < objective - margin
        trace.records.append(
            IterationRecord(
                k, cfg.rule, objective, new_objective, accepted, flips, elapsed
            )
        )

        improvement = 0.0
        if accepted:
            improvement = objective - new_objective
            signs, objective, point = proposal, new_objective, new_point
            last_result = result
            rejections_in_row = 0
        else:
            rejections_in_row += 1

        if cfg.rule == "field" and improvement < cfg.epsilon:
            break
        if cfg.rule == "greedy" and rejections_in_row >= max(m, 1):
            break

    design = recover_theta(point.v, point.w, aub.bounds)
    return DescentResult(design, point, trace, signs, objective)
