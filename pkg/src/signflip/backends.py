"""Conic solver engines behind a common contract.

The reference engine is an operator-splitting (ADMM) method on the
homogeneous self-dual embedding, written with numpy/scipy only, so the
package can solve every program it builds without external solvers.  When
the ``clarabel`` or ``scs`` wheels are importable they can be bound for
faster large solves.  Every engine returns raw (x, y, s, status) data;
residual certification happens in :mod:`signflip.conic` against the program
itself.
"""

from __future__ import annotations

import importlib.util
from typing import Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .conic import ConeProgram, SolverConfig, SolverStatus, project_cone
from .model import DomainError

__all__ = ["available", "resolve", "solve_with", "REFERENCE", "HIGHS", "BOUND_ORDER"]

REFERENCE = "reference"
HIGHS = "highs"  # scipy's HiGHS; linear programs only, returns vertex solutions
BOUND_ORDER = ("clarabel", "scs")


def _importable(name: str) -> bool:
    return importlib.util.find_spec(name) is not None


def available() -> tuple[str, ...]:
    """Engines usable in this environment, best bound solver first."""
    bound = tuple(name for name in BOUND_ORDER if _importable(name))
    return bound + (HIGHS, REFERENCE)


_SIMPLEX_VAR_LIMIT = 5000


def resolve(backend: str, program: ConeProgram | None = None) -> str:
    """Map a backend request ("auto", "bound", "reference", or a name) to an engine.

    "auto" prefers the simplex engine for small pure LPs (vertex solutions
    carry the exact zeros the field-based rule feeds on; simplex slows badly
    on large degenerate LPs) and the best cone solver otherwise; "bound"
    insists on an external cone solver.
    """
    options = available()
    is_lp = program is not None and not program.soc_sizes
    if backend == "auto":
        if is_lp and program.n_vars <= _SIMPLEX_VAR_LIMIT:
            return HIGHS
        cone_capable = [name for name in options if name != HIGHS]
        if is_lp and cone_capable == [REFERENCE]:
            return HIGHS  # a large LP is still better off with simplex than ADMM
        return cone_capable[0]
    if backend == "bound":
        bound = [name for name in options if name in BOUND_ORDER]
        if not bound:
            raise DomainError("no bound solver (clarabel or scs) is importable")
        return bound[0]
    if backend in options:
        if backend == HIGHS and program is not None and program.soc_sizes:
            raise DomainError("the highs backend only solves linear programs")
        return backend
    raise DomainError(f"unknown or unavailable backend {backend!r}; have {options}")


def solve_with(name: str, program: ConeProgram, config: SolverConfig, warm) -> dict:
    if program.n_rows == 0:
        # Unconstrained: either trivially optimal at 0 or unbounded below.
        status = (
            SolverStatus.OPTIMAL
            if not np.any(program.c)
            else SolverStatus.DUAL_INFEASIBLE_OR_UNBOUNDED
        )
        return {
            "x": np.zeros(program.n_vars),
            "y": np.zeros(0),
            "s": np.zeros(0),
            "status": status,
            "iterations": 0,
        }
    if name == REFERENCE:
        return _solve_reference(program, config, warm)
    if name == HIGHS:
        return _solve_highs(program, config)
    if name == "clarabel":
        return _solve_clarabel(program, config)
    if name == "scs":
        return _solve_scs(program, config, warm)
    raise DomainError(f"unknown backend {name!r}")


# ---------------------------------------------------------------------------
# Reference operator-splitting engine
# ---------------------------------------------------------------------------

_RELAXATION = 1.5
_CHECK_EVERY = 25
_SCALE_CLIP = 1e4


def _row_groups(cones: Sequence[tuple[str, int]], n_rows: int) -> list[tuple[int, int]]:
    """Row ranges that must share one scaling factor (one range per SOC block)."""
    groups = []
    start = 0
    for kind, size in cones:
        if kind == "soc":
            groups.append((start, start + size))
        else:
            groups.extend((r, r + 1) for r in range(start, start + size))
        start += size
    return groups


def _equilibrate(program: ConeProgram, passes: int = 10):
    """Ruiz scaling of A with uniform factors inside each second-order block."""
    A = sp.csr_matrix(program.A, copy=True)
    m, n = A.shape
    d = np.ones(m)
    e = np.ones(n)
    groups = _row_groups(program.cones, m)
    for _ in range(passes):
        absA = abs(A)
        row_norm = absA.max(axis=1).toarray().ravel()
        for lo, hi in groups:
            if hi - lo > 1:
                row_norm[lo:hi] = row_norm[lo:hi].max()
        row_norm[row_norm == 0] = 1.0
        col_norm = absA.max(axis=0).toarray().ravel()
        col_norm[col_norm == 0] = 1.0
        dr = 1.0 / np.sqrt(row_norm)
        dc = 1.0 / np.sqrt(col_norm)
        A = sp.diags(dr) @ A @ sp.diags(dc)
        d *= dr
        e *= dc
    np.clip(d, 1.0 / _SCALE_CLIP, _SCALE_CLIP, out=d)
    np.clip(e, 1.0 / _SCALE_CLIP, _SCALE_CLIP, out=e)
    As = sp.diags(d) @ sp.csr_matrix(program.A) @ sp.diags(e)
    return sp.csc_matrix(As), d, e


def _solve_reference(program: ConeProgram, config: SolverConfig, warm) -> dict:
    """ADMM on the homogeneous self-dual embedding of the cone program.

    Iterates a linear solve against the cached factorization of I + A^T A,
    a projection onto R^n x K* x R+, and a dual update; scale-invariant
    residuals are checked on the original (unequilibrated) data.
    """
    A0 = program.A
    b0 = program.b
    c0 = program.c
    m, n = A0.shape
    cones = program.cones
    tol = max(config.abs_tol, config.rel_tol)

    As, d, e = _equilibrate(program)
    bs = d * b0
    cs = e * c0
    AsT = As.T.tocsc()

    gram = (sp.identity(n, format="csc") + AsT @ As).tocsc()
    factor = spla.splu(gram)

    def m_solve(q1: np.ndarray, q2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        z1 = factor.solve(q1 - AsT @ q2)
        return z1, q2 + As @ z1

    gx, gy = m_solve(cs, bs)
    denom = 1.0 + float(cs @ gx + bs @ gy)

    ux = np.zeros(n)
    uy = np.zeros(m)
    ut = 1.0
    vy = np.zeros(m)
    vt = 1.0
    if warm is not None:
        x0, y0, s0 = warm
        ux = np.asarray(x0, dtype=float) / e
        uy = np.asarray(y0, dtype=float) * d
        vy = np.asarray(s0, dtype=float) * d
        ut, vt = 1.0, 0.0

    norm_b = float(np.linalg.norm(b0))
    norm_c = float(np.linalg.norm(c0))

    best = None
    status = SolverStatus.ITERATION_LIMIT
    k = 0
    for k in range(1, config.max_iters + 1):
        wx = ux
        wy = uy + vy
        wt = ut + vt
        p1, p2 = m_solve(wx, wy)
        zeta = (wt + float(cs @ p1 + bs @ p2)) / denom
        tx = p1 - zeta * gx
        ty = p2 - zeta * gy

        hx = _RELAXATION * tx + (1.0 - _RELAXATION) * ux
        hy = _RELAXATION * ty + (1.0 - _RELAXATION) * uy
        ht = _RELAXATION * zeta + (1.0 - _RELAXATION) * ut

        ux = hx
        uy = project_cone(hy - vy, cones, dual=True)
        ut = max(0.0, ht - vt)
        vy = vy - hy + uy
        vt = vt - ht + ut

        if k % _CHECK_EVERY and k != config.max_iters:
            continue

        tau = ut
        if tau > 1e-10:
            x = (ux / tau) * e
            y = (uy / tau) * d
            s = (vy / tau) / d
            pres = float(np.linalg.norm(A0 @ x + s - b0)) / (1.0 + norm_b)
            dres = float(np.linalg.norm(A0.T @ y + c0)) / (1.0 + norm_c)
            ctx = float(c0 @ x)
            bty = float(b0 @ y)
            gap = abs(ctx + bty) / (1.0 + abs(ctx) + abs(bty))
            best = (x, y, s)
            if max(pres, dres, gap) <= tol:
                status = SolverStatus.OPTIMAL
                break

        # Certificate checks (scale-invariant, so the raw u iterate suffices).
        y_c = uy * d
        bty_c = float(b0 @ y_c)
        if norm_b > 1e-12 and bty_c < -1e-12:
            if float(np.linalg.norm(A0.T @ y_c)) * norm_b <= tol * (-bty_c):
                status = SolverStatus.PRIMAL_INFEASIBLE
                best = (np.zeros(n), y_c / (-bty_c), np.zeros(m))
                break
        x_c = ux * e
        ctx_c = float(c0 @ x_c)
        if norm_c > 1e-12 and ctx_c < -1e-12:
            slack = project_cone(-(A0 @ x_c), cones, dual=False)
            if float(np.linalg.norm(A0 @ x_c + slack)) * norm_c <= tol * (-ctx_c):
                status = SolverStatus.DUAL_INFEASIBLE_OR_UNBOUNDED
                best = (x_c / (-ctx_c), np.zeros(m), slack / (-ctx_c))
                break

    if best is None:
        best = (np.zeros(n), np.zeros(m), np.zeros(m))
        if status == SolverStatus.ITERATION_LIMIT:
            status = SolverStatus.NUMERICAL_FAILURE
    x, y, s = best
    return {"x": x, "y": y, "s": s, "status": status, "iterations": k}


# ---------------------------------------------------------------------------
# LP engine (scipy / HiGHS)
# ---------------------------------------------------------------------------

_HIGHS_STATUS = {
    0: SolverStatus.OPTIMAL,
    1: SolverStatus.ITERATION_LIMIT,
    2: SolverStatus.PRIMAL_INFEASIBLE,
    3: SolverStatus.DUAL_INFEASIBLE_OR_UNBOUNDED,
}


def _solve_highs(program: ConeProgram, config: SolverConfig) -> dict:
    """Dual-simplex LP solve; the basic optimal point carries exact zeros."""
    from scipy.optimize import linprog

    if program.soc_sizes:
        raise DomainError("the highs backend only solves linear programs")
    nz, nn = program.n_zero, program.n_nonneg
    A = program.A.tocsr()
    res = linprog(
        program.c,
        A_eq=A[:nz] if nz else None,
        b_eq=program.b[:nz] if nz else None,
        A_ub=A[nz : nz + nn] if nn else None,
        b_ub=program.b[nz : nz + nn] if nn else None,
        bounds=(None, None),
        method="highs",
        options={
            "presolve": True,
            "primal_feasibility_tolerance": min(config.abs_tol, 1e-8),
            "dual_feasibility_tolerance": min(config.abs_tol, 1e-8),
            "disp": config.verbose,
        },
    )
    status = _HIGHS_STATUS.get(int(res.status), SolverStatus.NUMERICAL_FAILURE)
    if res.x is None:
        x = np.zeros(program.n_vars)
        y = np.zeros(program.n_rows)
        s = np.zeros(program.n_rows)
    else:
        x = np.asarray(res.x, dtype=float)
        # scipy marginals satisfy c + A_eq^T m_eq + A_ub^T m_ub = 0 with
        # m_ub <= 0; our convention is c + A^T y = 0 with y >= 0 on
        # inequality rows, hence the sign flip.
        y = np.zeros(program.n_rows)
        if nz:
            y[:nz] = -np.asarray(res.eqlin.marginals, dtype=float)
        if nn:
            y[nz : nz + nn] = -np.asarray(res.ineqlin.marginals, dtype=float)
        s = program.b - A @ x
        if nz:
            s[:nz] = 0.0
        if nn:
            np.maximum(s[nz : nz + nn], 0.0, out=s[nz : nz + nn])
    return {
        "x": x,
        "y": y,
        "s": s,
        "status": status,
        "iterations": int(getattr(res, "nit", 0) or 0),
    }


# ---------------------------------------------------------------------------
# Bound engines
# ---------------------------------------------------------------------------

_CLARABEL_STATUS = {
    "Solved": SolverStatus.OPTIMAL,
    "PrimalInfeasible": SolverStatus.PRIMAL_INFEASIBLE,
    "DualInfeasible": SolverStatus.DUAL_INFEASIBLE_OR_UNBOUNDED,
    "AlmostSolved": SolverStatus.ITERATION_LIMIT,
    "AlmostPrimalInfeasible": SolverStatus.ITERATION_LIMIT,
    "AlmostDualInfeasible": SolverStatus.ITERATION_LIMIT,
    "MaxIterations": SolverStatus.ITERATION_LIMIT,
    "MaxTime": SolverStatus.ITERATION_LIMIT,
}


def _solve_clarabel(program: ConeProgram, config: SolverConfig) -> dict:
    import clarabel

    cone_map = {
        "zero": clarabel.ZeroConeT,
        "nonneg": clarabel.NonnegativeConeT,
        "soc": clarabel.SecondOrderConeT,
    }
    cones = [cone_map[kind](size) for kind, size in program.cones]
    settings = clarabel.DefaultSettings()
    settings.verbose = config.verbose
    settings.max_iter = int(min(config.max_iters, 100_000))
    settings.tol_feas = config.abs_tol
    settings.tol_gap_abs = config.abs_tol
    settings.tol_gap_rel = config.rel_tol

    n = program.n_vars
    P = sp.csc_matrix((n, n))
    solver = clarabel.DefaultSolver(P, program.c, program.A, program.b, cones, settings)
    sol = solver.solve()
    status = _CLARABEL_STATUS.get(str(sol.status), SolverStatus.NUMERICAL_FAILURE)
    return {
        "x": np.asarray(sol.x, dtype=float),
        "y": np.asarray(sol.z, dtype=float),
        "s": np.asarray(sol.s, dtype=float),
        "status": status,
        "iterations": int(sol.iterations),
    }


_SCS_STATUS = {
    1: SolverStatus.OPTIMAL,
    2: SolverStatus.ITERATION_LIMIT,  # solved to reduced accuracy
    -1: SolverStatus.DUAL_INFEASIBLE_OR_UNBOUNDED,  # scs "unbounded"
    -2: SolverStatus.PRIMAL_INFEASIBLE,  # scs "infeasible"
    -6: SolverStatus.ITERATION_LIMIT,
    -7: SolverStatus.ITERATION_LIMIT,
    -8: SolverStatus.ITERATION_LIMIT,
}


def _solve_scs(program: ConeProgram, config: SolverConfig, warm) -> dict:
    import scs

    cone: dict = {}
    if program.n_zero:
        cone["z"] = program.n_zero
    if program.n_nonneg:
        cone["l"] = program.n_nonneg
    if program.soc_sizes:
        cone["q"] = list(program.soc_sizes)
    data = {"A": sp.csc_matrix(program.A), "b": np.array(program.b), "c": np.array(program.c)}
    solver = scs.SCS(
        data,
        cone,
        verbose=config.verbose,
        eps_abs=config.abs_tol,
        eps_rel=config.rel_tol,
        max_iters=int(config.max_iters),
    )
    if warm is not None:
        x0, y0, s0 = warm
        out = solver.solve(warm_start=True, x=np.array(x0), y=np.array(y0), s=np.array(s0))
    else:
        out = solver.solve()
    info = out["info"]
    status = _SCS_STATUS.get(int(info["status_val"]), SolverStatus.NUMERICAL_FAILURE)
    return {
        "x": np.asarray(out["x"], dtype=float),
        "y": np.asarray(out["y"], dtype=float),
        "s": np.asarray(out["s"], dtype=float),
        "status": status,
        "iterations": int(info["iter"]),
    }
