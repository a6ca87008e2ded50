"""Lowering of sign-fixed subproblems to standard-form cone programs.

Standard form here is

    minimize    c^T z
    subject to  A z + s = b,    s in K,

with K an ordered product of zero, nonnegative, and second-order cones.
Squared-norm and norm objective terms enter through second-order-cone
epigraphs, so a backend only ever needs those three cone types.  Results are
re-verified against the program data: the residuals stored on a
``SolverResult`` are recomputed here, not copied from the backend.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .model import (
    AUBPoint,
    AUBProblem,
    DomainError,
    ProblemStructureError,
    eval_objective,
)

__all__ = [
    "ConeProgram",
    "SolverConfig",
    "SolverResult",
    "SolverStatus",
    "Residuals",
    "SolverStateError",
    "build_sign_fixed",
    "build_fixed_design",
    "solve",
    "extract_point",
    "kkt_residuals",
    "project_cone",
    "dump_cone_program",
]

_CONE_KINDS = ("zero", "nonneg", "soc")


class SolverStateError(RuntimeError):
    """A solver result was used in a state it does not support."""


class SolverStatus(str, Enum):
    OPTIMAL = "optimal"
    PRIMAL_INFEASIBLE = "primal_infeasible"
    DUAL_INFEASIBLE_OR_UNBOUNDED = "dual_infeasible_or_unbounded"
    ITERATION_LIMIT = "iteration_limit"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclass(frozen=True)
class ConeProgram:
    """A standard-form cone program: min c^T z s.t. A z + s = b, s in K."""

    c: np.ndarray
    A: sp.csc_matrix
    b: np.ndarray
    cones: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        A = sp.csc_matrix(self.A, dtype=float)
        A.eliminate_zeros()
        c = np.asarray(self.c, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if c.ndim != 1 or b.ndim != 1:
            raise ProblemStructureError("c and b must be vectors")
        if A.shape != (b.size, c.size):
            raise ProblemStructureError(
                f"A has shape {A.shape}, expected ({b.size}, {c.size})"
            )
        total = 0
        for kind, size in self.cones:
            if kind not in _CONE_KINDS:
                raise ProblemStructureError(f"unknown cone kind {kind!r}")
            if size < 1:
                raise ProblemStructureError("cone blocks must be nonempty")
            total += size
        if total != b.size:
            raise ProblemStructureError(
                f"cone sizes sum to {total}, but A has {b.size} rows"
            )
        c.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "cones", tuple((k, int(s)) for k, s in self.cones))

    @property
    def n_vars(self) -> int:
        return self.c.size

    @property
    def n_rows(self) -> int:
        return self.b.size

    @property
    def n_zero(self) -> int:
        return sum(s for k, s in self.cones if k == "zero")

    @property
    def n_nonneg(self) -> int:
        return sum(s for k, s in self.cones if k == "nonneg")

    @property
    def soc_sizes(self) -> tuple[int, ...]:
        return tuple(s for k, s in self.cones if k == "soc")


@dataclass(frozen=True)
class SolverConfig:
    """Termination tolerances and iteration budget for a cone solve."""

    abs_tol: float = 1e-8
    rel_tol: float = 1e-8
    max_iters: int = 200_000
    verbose: bool = False

    def __post_init__(self) -> None:
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise DomainError("tolerances must be positive")
        if self.max_iters < 1:
            raise DomainError("max_iters must be at least 1")


@dataclass(frozen=True)
class Residuals:
    """Normalized KKT residuals: primal, dual, and duality gap."""

    primal: float
    dual: float
    gap: float

    @property
    def worst(self) -> float:
        return max(self.primal, self.dual, self.gap)


@dataclass(frozen=True)
class SolverResult:
    """Outcome of a cone solve with independently recomputed residuals."""

    status: SolverStatus
    z: np.ndarray
    y: np.ndarray
    s: np.ndarray
    objective: float
    residuals: Residuals
    solve_time: float
    backend: str
    iterations: int


# ---------------------------------------------------------------------------
# Cone geometry
# ---------------------------------------------------------------------------


def _project_soc(block: np.ndarray) -> np.ndarray:
    t = block[0]
    tail = block[1:]
    norm = float(np.linalg.norm(tail))
    if norm <= t:
        return block
    if norm <= -t:
        return np.zeros_like(block)
    alpha = (t + norm) / 2.0
    out = np.empty_like(block)
    out[0] = alpha
    out[1:] = (alpha / norm) * tail
    return out


def project_cone(vec: np.ndarray, cones: Sequence[tuple[str, int]], dual: bool = False) -> np.ndarray:
    """Project onto the product cone (or its dual when ``dual`` is set).

    The dual of a zero block is the free space; nonnegative and second-order
    blocks are self-dual.
    """
    out = np.array(vec, dtype=float)
    start = 0
    for kind, size in cones:
        stop = start + size
        if kind == "zero":
            if not dual:
                out[start:stop] = 0.0
        elif kind == "nonneg":
            np.maximum(out[start:stop], 0.0, out=out[start:stop])
        else:
            out[start:stop] = _project_soc(out[start:stop])
        start = stop
    return out


def kkt_residuals(program: ConeProgram, z: np.ndarray, y: np.ndarray, s: np.ndarray) -> Residuals:
    """Recompute normalized KKT residuals against the program data.

    The slack and dual candidates are first projected onto their cones, so
    any cone violation folds into the affine residuals.
    """
    z = np.asarray(z, dtype=float)
    s_proj = project_cone(s, program.cones, dual=False)
    y_proj = project_cone(y, program.cones, dual=True)
    pres = float(np.linalg.norm(program.A @ z + s_proj - program.b))
    dres = float(np.linalg.norm(program.A.T @ y_proj + program.c))
    ctz = float(program.c @ z)
    bty = float(program.b @ y_proj)
    gap = abs(ctz + bty)
    return Residuals(
        primal=pres / (1.0 + float(np.linalg.norm(program.b))),
        dual=dres / (1.0 + float(np.linalg.norm(program.c))),
        gap=gap / (1.0 + abs(ctz) + abs(bty)),
    )


# ---------------------------------------------------------------------------
# Lowering
# ---------------------------------------------------------------------------


def _selection_rows(indices: np.ndarray, coeff: np.ndarray, n_cols: int) -> sp.csr_matrix:
    k = indices.size
    return sp.csr_matrix((coeff, (np.arange(k), indices)), shape=(k, n_cols))


def _lower(
    aub: AUBProblem,
    extra_eq: tuple[sp.spmatrix, np.ndarray] | None,
    extra_ineq: tuple[sp.spmatrix, np.ndarray] | None,
) -> ConeProgram:
    """Assemble the cone program shared by sign-fixed and fixed-design solves."""
    layout = aub.layout
    n = layout.dim
    cons = aub.constraints
    n_aux = len(aub.objective.quad_terms) + len(aub.objective.norm_terms)
    n_cols = n + n_aux

    def widen(mat: sp.spmatrix) -> sp.csr_matrix:
        mat = sp.csr_matrix(mat)
        return sp.csr_matrix((mat.data, mat.indices, mat.indptr), shape=(mat.shape[0], n_cols))

    lower = cons.var_lower
    upper = cons.var_upper
    pinned = np.nonzero(np.isfinite(lower) & (lower == upper))[0]
    lower_only = np.nonzero(np.isfinite(lower) & (lower < upper))[0]
    upper_only = np.nonzero(np.isfinite(upper) & (lower < upper))[0]

    zero_blocks: list[sp.spmatrix] = [widen(cons.eq_matrix)]
    zero_rhs: list[np.ndarray] = [cons.eq_rhs]
    if pinned.size:
        zero_blocks.append(_selection_rows(pinned, np.ones(pinned.size), n_cols))
        zero_rhs.append(upper[pinned])
    if extra_eq is not None:
        zero_blocks.append(widen(extra_eq[0]))
        zero_rhs.append(extra_eq[1])

    nonneg_blocks: list[sp.spmatrix] = []
    nonneg_rhs: list[np.ndarray] = []
    if lower_only.size:
        nonneg_blocks.append(_selection_rows(lower_only, -np.ones(lower_only.size), n_cols))
        nonneg_rhs.append(-lower[lower_only])
    if upper_only.size:
        nonneg_blocks.append(_selection_rows(upper_only, np.ones(upper_only.size), n_cols))
        nonneg_rhs.append(upper[upper_only])
    if extra_ineq is not None:
        nonneg_blocks.append(widen(extra_ineq[0]))
        nonneg_rhs.append(extra_ineq[1])

    soc_blocks: list[sp.spmatrix] = []
    soc_rhs: list[np.ndarray] = []
    soc_sizes: list[int] = []
    cost = np.zeros(n_cols)
    cost[:n] = aub.objective.linear

    aux = n
    for term in aub.objective.quad_terms:
        p = term.matrix.shape[0]
        # ||Ey - d||^2 <= t  <=>  ||(2(Ey - d), t - 1)|| <= t + 1
        head = sp.csr_matrix(([-1.0], ([0], [aux])), shape=(1, n_cols))
        tail = widen(2.0 * term.matrix)
        last = sp.csr_matrix(([-1.0], ([0], [aux])), shape=(1, n_cols))
        soc_blocks.extend([head, tail, last])
        soc_rhs.extend([np.array([1.0]), 2.0 * term.offset, np.array([-1.0])])
        soc_sizes.append(p + 2)
        cost[aux] = term.weight
        aux += 1
    for term in aub.objective.norm_terms:
        p = term.matrix.shape[0]
        head = sp.csr_matrix(([-1.0], ([0], [aux])), shape=(1, n_cols))
        tail = widen(term.matrix)
        soc_blocks.extend([head, tail])
        soc_rhs.extend([np.array([0.0]), term.offset])
        soc_sizes.append(p + 1)
        cost[aux] = term.weight
        aux += 1

    blocks = zero_blocks + nonneg_blocks + soc_blocks
    rhs = np.concatenate(zero_rhs + nonneg_rhs + soc_rhs) if blocks else np.zeros(0)
    A = sp.vstack(blocks, format="csc") if blocks else sp.csc_matrix((0, n_cols))

    cones: list[tuple[str, int]] = []
    n_zero = sum(b.shape[0] for b in zero_blocks)
    n_nonneg = sum(b.shape[0] for b in nonneg_blocks)
    if n_zero:
        cones.append(("zero", n_zero))
    if n_nonneg:
        cones.append(("nonneg", n_nonneg))
    cones.extend(("soc", size) for size in soc_sizes)

    return ConeProgram(cost, A, rhs, tuple(cones))


def build_sign_fixed(aub: AUBProblem, signs) -> ConeProgram:
    """Cone program for the convex restriction |w| <= s∘v at a fixed sign vector.

    The bound is lowered as the 2m linear rows w_i - s_i v_i <= 0 and
    -w_i - s_i v_i <= 0.
    """
    s = np.asarray(getattr(signs, "s", signs), dtype=float)
    if s.shape != (aub.m,):
        raise DomainError(f"sign vector must have length {aub.m}")
    if not np.all(np.abs(s) == 1.0):
        raise DomainError("sign vector entries must be +1 or -1")

    m = aub.m
    layout = aub.layout
    n = layout.dim
    v0 = layout.v_slice.start
    w0 = layout.w_slice.start
    idx = np.arange(m)

    rows = np.concatenate([idx, idx, m + idx, m + idx])
    cols = np.concatenate([w0 + idx, v0 + idx, w0 + idx, v0 + idx])
    vals = np.concatenate([np.ones(m), -s, -np.ones(m), -s])
    sign_rows = sp.csr_matrix((vals, (rows, cols)), shape=(2 * m, n))
    return _lower(aub, extra_eq=None, extra_ineq=(sign_rows, np.zeros(2 * m)))


def build_fixed_design(aub: AUBProblem, theta: np.ndarray | None = None) -> ConeProgram:
    """Cone program with the design pinned to a concrete theta.

    Pins w through the equality w_i = ((theta_i - theta_bar_i)/rho_i) v_i,
    which at theta = theta_bar (the default) is simply w = 0.  Used for
    midpoint initialization and for evaluating fixed designs.
    """
    bounds = aub.bounds
    if theta is None:
        theta = bounds.theta_bar
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (aub.m,):
        raise DomainError(f"theta must have length {aub.m}")
    if not bounds.contains(theta, tol=1e-9):
        raise DomainError("theta lies outside the design bounds")

    m = aub.m
    layout = aub.layout
    n = layout.dim
    rho = bounds.rho
    ratio = np.zeros(m)
    positive = rho > 0
    ratio[positive] = (theta[positive] - bounds.theta_bar[positive]) / rho[positive]
    np.clip(ratio, -1.0, 1.0, out=ratio)

    idx = np.arange(m)
    rows = np.concatenate([idx, idx])
    cols = np.concatenate([layout.w_slice.start + idx, layout.v_slice.start + idx])
    vals = np.concatenate([np.ones(m), -ratio])
    pin_rows = sp.csr_matrix((vals, (rows, cols)), shape=(m, n))
    return _lower(aub, extra_eq=(pin_rows, np.zeros(m)), extra_ineq=None)


# ---------------------------------------------------------------------------
# Solving
# ---------------------------------------------------------------------------

# Observers see every (program, result) pair that solve() produces; used for
# telemetry and for certificate auditing in the verification suites.
_solve_observers: list = []


def add_solve_observer(fn) -> None:
    _solve_observers.append(fn)


def remove_solve_observer(fn) -> None:
    _solve_observers.remove(fn)


def solve(
    program: ConeProgram,
    config: SolverConfig | None = None,
    backend: str = "auto",
    warm_start: SolverResult | None = None,
) -> SolverResult:
    """Solve a cone program through the selected backend.

    ``backend`` may be "auto" (best available), "bound" (best bound solver,
    refusing to fall back), "reference" (the built-in operator-splitting
    engine), or a concrete engine name.  The residuals on the returned result
    are recomputed from the program data, independent of the backend.
    """
    from . import backends

    cfg = config or SolverConfig()
    name = backends.resolve(backend, program)
    t0 = time.perf_counter()
    warm = None
    if warm_start is not None and warm_start.z.size == program.n_vars:
        warm = (warm_start.z, warm_start.y, warm_start.s)
    raw = backends.solve_with(name, program, cfg, warm)
    elapsed = time.perf_counter() - t0

    z = np.asarray(raw["x"], dtype=float)
    y = np.asarray(raw["y"], dtype=float)
    s = np.asarray(raw["s"], dtype=float)
    status = raw["status"]
    if z.size != program.n_vars or not np.all(np.isfinite(z)):
        z = np.zeros(program.n_vars)
        if status == SolverStatus.OPTIMAL:
            status = SolverStatus.NUMERICAL_FAILURE
    if y.size != program.n_rows or not np.all(np.isfinite(y)):
        y = np.zeros(program.n_rows)
    if s.size != program.n_rows or not np.all(np.isfinite(s)):
        s = program.b - program.A @ z

    residuals = kkt_residuals(program, z, y, s)
    result = SolverResult(
        status=status,
        z=z,
        y=y,
        s=s,
        objective=float(program.c @ z),
        residuals=residuals,
        solve_time=elapsed,
        backend=name,
        iterations=int(raw.get("iterations", 0)),
    )
    for observer in _solve_observers:
        observer(program, result)
    return result


def extract_point(result: SolverResult, aub: AUBProblem) -> tuple[AUBPoint, float]:
    """Unpack a solver result into an AUB point and its true objective value.

    Epigraph auxiliaries are discarded; the objective is recomputed from the
    problem's objective spec rather than read off the cone program.
    """
    if result.status != SolverStatus.OPTIMAL:
        raise SolverStateError(f"cannot extract a point from status {result.status.value}")
    n = aub.layout.dim
    if result.z.size < n:
        raise ProblemStructureError("solver result does not match the problem layout")
    point = AUBPoint.from_stacked(result.z[:n], aub.layout)
    return point, eval_objective(point, aub.objective)


def dump_cone_program(program: ConeProgram, path) -> None:
    """Debug dump of a cone program in the sparse-triplet JSON schema."""
    coo = sp.coo_matrix(program.A)
    doc = {
        "c": [float(x) for x in program.c],
        "A": {
            "shape": [program.n_rows, program.n_vars],
            "triplets": [[int(r), int(c), float(v)] for r, c, v in zip(coo.row, coo.col, coo.data)],
        },
        "b": [float(x) for x in program.b],
        "cones": [[kind, size] for kind, size in program.cones],
    }
    Path(path).write_text(json.dumps(doc, indent=2))
