"""Data model for interval-bounded diagonal physical design problems.

A design problem couples a field (x, u, v) to per-coordinate design
parameters theta through u = diag(theta) v, with theta confined to a box
[theta_min, theta_max].  Splitting each coupling coefficient into its
interval midpoint and half-width turns the same problem into the
absolute-upper-bound (AUB) form

    u = diag(theta_bar) v + diag(rho) w,      |w| <= |v|,

whose only nonconvex piece is the elementwise bound |w| <= |v|.  This module
holds the containers for both forms, the exact maps between them (``to_aub``,
``embed_w``, ``recover_theta``), and the bookkeeping everything else builds
on: objective evaluation, feasibility reports, and JSON round-tripping.

All containers are frozen dataclasses whose arrays are made read-only, so
instances are safe to share across threads; every operation here is a pure
function.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Union

import numpy as np
import scipy.sparse as sp

__all__ = [
    "ProblemStructureError",
    "DomainError",
    "InfeasiblePointError",
    "DesignBounds",
    "VariableLayout",
    "AffineConstraintSet",
    "ObjectiveTerm",
    "ObjectiveSpec",
    "DesignProblem",
    "AUBProblem",
    "FieldPoint",
    "AUBPoint",
    "Design",
    "FeasibilityReport",
    "to_aub",
    "embed_w",
    "recover_theta",
    "eval_objective",
    "check_feasible",
    "problem_to_dict",
    "problem_from_dict",
    "save_problem",
    "load_problem",
]


class ProblemStructureError(ValueError):
    """Dimensions or sparsity structure of a problem are inconsistent."""


class DomainError(ValueError):
    """An input lies outside its documented domain."""


class InfeasiblePointError(ValueError):
    """A point violates constraints beyond the accepted tolerance."""


def _vector(value, name: str, length: int | None = None) -> np.ndarray:
    arr = np.array(value, dtype=float)
    if arr.ndim != 1:
        raise ProblemStructureError(f"{name} must be a 1-d vector, got shape {arr.shape}")
    if length is not None and arr.size != length:
        raise ProblemStructureError(f"{name} must have length {length}, got {arr.size}")
    arr.setflags(write=False)
    return arr


def _csr(matrix, name: str, n_cols: int | None = None) -> sp.csr_matrix:
    mat = sp.csr_matrix(matrix, dtype=float)
    mat.eliminate_zeros()
    mat.sum_duplicates()
    if n_cols is not None and mat.shape[1] != n_cols:
        raise ProblemStructureError(f"{name} must have {n_cols} columns, got {mat.shape[1]}")
    return mat


# ---------------------------------------------------------------------------
# Containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DesignBounds:
    """Interval limits for the design parameters.

    The midpoint ``theta_bar`` and half-width ``rho`` are always recomputed
    from the stored endpoints, never stored independently.
    """

    theta_min: np.ndarray
    theta_max: np.ndarray

    def __post_init__(self) -> None:
        tmin = _vector(self.theta_min, "theta_min")
        tmax = _vector(self.theta_max, "theta_max", tmin.size)
        if not (np.all(np.isfinite(tmin)) and np.all(np.isfinite(tmax))):
            raise DomainError("design bounds must be finite")
        if np.any(tmin > tmax):
            raise DomainError("theta_min must be <= theta_max elementwise")
        object.__setattr__(self, "theta_min", tmin)
        object.__setattr__(self, "theta_max", tmax)

    @property
    def m(self) -> int:
        return self.theta_min.size

    @property
    def theta_bar(self) -> np.ndarray:
        return (self.theta_max + self.theta_min) / 2.0

    @property
    def rho(self) -> np.ndarray:
        return (self.theta_max - self.theta_min) / 2.0

    @property
    def width(self) -> np.ndarray:
        return self.theta_max - self.theta_min

    def contains(self, theta: np.ndarray, tol: float = 0.0) -> bool:
        theta = np.asarray(theta, dtype=float)
        pad = tol * np.maximum(1.0, self.width)
        return bool(
            np.all(theta >= self.theta_min - pad) and np.all(theta <= self.theta_max + pad)
        )

    def clip(self, theta: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(theta, dtype=float), self.theta_min, self.theta_max)


@dataclass(frozen=True)
class VariableLayout:
    """Block layout of the stacked decision vector: x | u | v [| w].

    u, v, w and the design vector all share length ``m``; x has length
    ``n_x``.  The w block exists only in AUB form.
    """

    n_x: int
    m: int
    with_w: bool = False

    def __post_init__(self) -> None:
        if self.n_x < 0 or self.m < 0:
            raise ProblemStructureError("block sizes must be nonnegative")

    @property
    def dim(self) -> int:
        return self.n_x + (3 if self.with_w else 2) * self.m

    @property
    def x_slice(self) -> slice:
        return slice(0, self.n_x)

    @property
    def u_slice(self) -> slice:
        return slice(self.n_x, self.n_x + self.m)

    @property
    def v_slice(self) -> slice:
        return slice(self.n_x + self.m, self.n_x + 2 * self.m)

    @property
    def w_slice(self) -> slice:
        if not self.with_w:
            raise ProblemStructureError("layout has no w block")
        return slice(self.n_x + 2 * self.m, self.n_x + 3 * self.m)

    def lifted(self) -> "VariableLayout":
        """The same layout with a w block appended."""
        if self.with_w:
            return self
        return VariableLayout(self.n_x, self.m, with_w=True)


@dataclass(frozen=True)
class AffineConstraintSet:
    """Affine-plus-box set {y : eq_matrix y = eq_rhs, var_lower <= y <= var_upper}.

    Entries of ``var_lower`` / ``var_upper`` may be -inf / +inf.
    """

    eq_matrix: sp.csr_matrix
    eq_rhs: np.ndarray
    var_lower: np.ndarray
    var_upper: np.ndarray

    def __post_init__(self) -> None:
        mat = _csr(self.eq_matrix, "eq_matrix")
        rhs = _vector(self.eq_rhs, "eq_rhs", mat.shape[0])
        lower = _vector(self.var_lower, "var_lower", mat.shape[1])
        upper = _vector(self.var_upper, "var_upper", mat.shape[1])
        if np.any(np.isnan(lower)) or np.any(np.isnan(upper)):
            raise DomainError("box bounds must not be NaN")
        if np.any(lower > upper):
            raise DomainError("var_lower must be <= var_upper elementwise")
        object.__setattr__(self, "eq_matrix", mat)
        object.__setattr__(self, "eq_rhs", rhs)
        object.__setattr__(self, "var_lower", lower)
        object.__setattr__(self, "var_upper", upper)

    @property
    def dim(self) -> int:
        return self.eq_matrix.shape[1]

    @property
    def n_eq(self) -> int:
        return self.eq_matrix.shape[0]

    def residuals(self, y: np.ndarray) -> tuple[float, float]:
        """(max equality residual, max box violation) at the point y."""
        y = np.asarray(y, dtype=float)
        if self.n_eq:
            eq = float(np.max(np.abs(self.eq_matrix @ y - self.eq_rhs)))
        else:
            eq = 0.0
        box = 0.0
        if self.dim:
            low = self.var_lower - y
            high = y - self.var_upper
            box = float(max(np.max(low, initial=0.0), np.max(high, initial=0.0)))
            box = max(box, 0.0)
        return eq, box

    def contains(self, y: np.ndarray, tol: float = 1e-9) -> bool:
        eq, box = self.residuals(y)
        return eq <= tol and box <= tol


@dataclass(frozen=True)
class ObjectiveTerm:
    """One affine block E y - d entering the objective with weight >= 0."""

    weight: float
    matrix: sp.csr_matrix
    offset: np.ndarray

    def __post_init__(self) -> None:
        if not np.isfinite(self.weight) or self.weight < 0:
            raise DomainError("objective term weight must be a nonnegative real")
        mat = _csr(self.matrix, "objective term matrix")
        if mat.shape[0] < 1:
            raise ProblemStructureError("objective term must have at least one row")
        off = _vector(self.offset, "objective term offset", mat.shape[0])
        object.__setattr__(self, "weight", float(self.weight))
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "offset", off)

    def value(self, y: np.ndarray) -> np.ndarray:
        return self.matrix @ y - self.offset

    def lifted(self, new_dim: int) -> "ObjectiveTerm":
        mat = self.matrix
        if new_dim < mat.shape[1]:
            raise ProblemStructureError("cannot shrink an objective term")
        wide = sp.csr_matrix((mat.data, mat.indices, mat.indptr), shape=(mat.shape[0], new_dim))
        return ObjectiveTerm(self.weight, wide, self.offset)


@dataclass(frozen=True)
class ObjectiveSpec:
    """Convex objective: linear·y + sum w‖Ey-d‖² + sum w‖Ey-d‖."""

    linear: np.ndarray
    quad_terms: tuple[ObjectiveTerm, ...] = ()
    norm_terms: tuple[ObjectiveTerm, ...] = ()

    def __post_init__(self) -> None:
        lin = _vector(self.linear, "linear")
        quad = tuple(self.quad_terms)
        norm = tuple(self.norm_terms)
        for term in (*quad, *norm):
            if term.matrix.shape[1] != lin.size:
                raise ProblemStructureError(
                    f"objective term has {term.matrix.shape[1]} columns, expected {lin.size}"
                )
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "quad_terms", quad)
        object.__setattr__(self, "norm_terms", norm)

    @property
    def dim(self) -> int:
        return self.linear.size

    @property
    def is_linear(self) -> bool:
        return not self.quad_terms and not self.norm_terms

    def value(self, y: np.ndarray) -> float:
        y = np.asarray(y, dtype=float)
        if y.size != self.dim:
            raise ProblemStructureError(f"point has dim {y.size}, objective expects {self.dim}")
        total = float(self.linear @ y)
        for term in self.quad_terms:
            r = term.value(y)
            total += term.weight * float(r @ r)
        for term in self.norm_terms:
            r = term.value(y)
            total += term.weight * float(np.linalg.norm(r))
        return total

    def lifted(self, new_dim: int) -> "ObjectiveSpec":
        if new_dim < self.dim:
            raise ProblemStructureError("cannot shrink an objective")
        lin = np.zeros(new_dim)
        lin[: self.dim] = self.linear
        return ObjectiveSpec(
            lin,
            tuple(t.lifted(new_dim) for t in self.quad_terms),
            tuple(t.lifted(new_dim) for t in self.norm_terms),
        )


@dataclass(frozen=True)
class FieldPoint:
    """A field value (x, u, v) in design-parameter form."""

    x: np.ndarray
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", _vector(self.x, "x"))
        u = _vector(self.u, "u")
        v = _vector(self.v, "v", u.size)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.x, self.u, self.v])

    @classmethod
    def from_stacked(cls, y: np.ndarray, layout: VariableLayout) -> "FieldPoint":
        y = np.asarray(y, dtype=float)
        return cls(y[layout.x_slice], y[layout.u_slice], y[layout.v_slice])


@dataclass(frozen=True)
class AUBPoint:
    """A point (x, u, v, w) of the absolute-upper-bound form."""

    x: np.ndarray
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", _vector(self.x, "x"))
        u = _vector(self.u, "u")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", _vector(self.v, "v", u.size))
        object.__setattr__(self, "w", _vector(self.w, "w", u.size))

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.x, self.u, self.v, self.w])

    def drop_w(self) -> FieldPoint:
        return FieldPoint(self.x, self.u, self.v)

    @classmethod
    def from_stacked(cls, y: np.ndarray, layout: VariableLayout) -> "AUBPoint":
        y = np.asarray(y, dtype=float)
        return cls(y[layout.x_slice], y[layout.u_slice], y[layout.v_slice], y[layout.w_slice])


@dataclass(frozen=True)
class Design:
    """A concrete design vector with per-coordinate extremality flags."""

    theta: np.ndarray
    extremal_mask: np.ndarray

    def __post_init__(self) -> None:
        theta = _vector(self.theta, "theta")
        mask = np.array(self.extremal_mask, dtype=bool)
        if mask.shape != theta.shape:
            raise ProblemStructureError("extremal_mask must match theta in length")
        mask.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "extremal_mask", mask)

    @property
    def m(self) -> int:
        return self.theta.size


def _check_problem_dims(layout, constraints, objective, bounds) -> None:
    if constraints.dim != layout.dim:
        raise ProblemStructureError(
            f"constraint matrix has {constraints.dim} columns, layout expects {layout.dim}"
        )
    if objective.dim != layout.dim:
        raise ProblemStructureError(
            f"objective has dim {objective.dim}, layout expects {layout.dim}"
        )
    if bounds.m != layout.m:
        raise ProblemStructureError(
            f"bounds have length {bounds.m}, layout expects m={layout.m}"
        )


@dataclass(frozen=True)
class DesignProblem:
    """A design problem in (x, u, v, theta) form with u = diag(theta) v implicit."""

    layout: VariableLayout
    constraints: AffineConstraintSet
    objective: ObjectiveSpec
    bounds: DesignBounds
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.layout.with_w:
            raise ProblemStructureError("DesignProblem layout must not carry a w block")
        _check_problem_dims(self.layout, self.constraints, self.objective, self.bounds)
        object.__setattr__(self, "metadata", dict(self.metadata))

    @property
    def m(self) -> int:
        return self.layout.m


@dataclass(frozen=True)
class AUBProblem:
    """The absolute-upper-bound form of a design problem.

    The affine coupling u = diag(theta_bar) v + diag(rho) w is materialized as
    equality rows of ``constraints``; the nonconvex bound |w| <= |v| stays
    symbolic and is instantiated per sign vector by the conic module.
    """

    layout: VariableLayout
    constraints: AffineConstraintSet
    objective: ObjectiveSpec
    bounds: DesignBounds
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.layout.with_w:
            raise ProblemStructureError("AUBProblem layout must carry a w block")
        _check_problem_dims(self.layout, self.constraints, self.objective, self.bounds)
        object.__setattr__(self, "metadata", dict(self.metadata))

    @property
    def m(self) -> int:
        return self.layout.m


@dataclass(frozen=True)
class FeasibilityReport:
    """Worst-case residuals of an AUB point against an AUB problem."""

    eq_residual: float
    box_violation: float
    abs_bound_violation: float
    tol: float

    @property
    def feasible(self) -> bool:
        return max(self.eq_residual, self.box_violation, self.abs_bound_violation) <= self.tol


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def to_aub(problem: DesignProblem) -> AUBProblem:
    """Rewrite a design problem into absolute-upper-bound form.

    Appends a w block to the layout, adds the coupling rows
    u - diag(theta_bar) v - diag(rho) w = 0, and pins w_i = 0 wherever the
    design interval has zero width.
    """
    layout = problem.layout.lifted()
    m = layout.m
    n = layout.dim
    old = problem.constraints
    bounds = problem.bounds

    base = old.eq_matrix
    base_wide = sp.csr_matrix((base.data, base.indices, base.indptr), shape=(base.shape[0], n))

    rows = np.repeat(np.arange(m), 3)
    cols = np.concatenate(
        [
            np.arange(m) + layout.u_slice.start,
            np.arange(m) + layout.v_slice.start,
            np.arange(m) + layout.w_slice.start,
        ]
    ).reshape(3, m).T.ravel()
    vals = np.stack([np.ones(m), -bounds.theta_bar, -bounds.rho], axis=1).ravel()
    coupling = sp.csr_matrix((vals, (rows, cols)), shape=(m, n))

    eq = sp.vstack([base_wide, coupling], format="csr") if m else base_wide
    rhs = np.concatenate([old.eq_rhs, np.zeros(m)])

    w_lower = np.full(m, -np.inf)
    w_upper = np.full(m, np.inf)
    pinned = bounds.rho == 0.0
    w_lower[pinned] = 0.0
    w_upper[pinned] = 0.0

    constraints = AffineConstraintSet(
        eq,
        rhs,
        np.concatenate([old.var_lower, w_lower]),
        np.concatenate([old.var_upper, w_upper]),
    )
    return AUBProblem(
        layout=layout,
        constraints=constraints,
        objective=problem.objective.lifted(n),
        bounds=bounds,
        metadata=problem.metadata,
    )


def embed_w(v: np.ndarray, theta: np.ndarray, bounds: DesignBounds, tol: float = 0.0) -> np.ndarray:
    """Map a design-form point into the w coordinate: w_i = ((theta_i - theta_bar_i)/rho_i) v_i.

    Coordinates with a zero-width interval get w_i = 0.  The returned w always
    satisfies |w| <= |v|.
    """
    v = np.asarray(v, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if v.size != bounds.m or theta.size != bounds.m:
        raise ProblemStructureError("v and theta must match the bounds in length")
    if not bounds.contains(theta, tol=tol):
        raise DomainError("theta lies outside the design bounds")
    rho = bounds.rho
    ratio = np.zeros(bounds.m)
    positive = rho > 0
    ratio[positive] = (theta[positive] - bounds.theta_bar[positive]) / rho[positive]
    np.clip(ratio, -1.0, 1.0, out=ratio)
    return ratio * v


def recover_theta(
    v: np.ndarray,
    w: np.ndarray,
    bounds: DesignBounds,
    *,
    zero_threshold: float = 1e-8,
    feas_tol: float = 1e-6,
    clip_warn_tol: float = 1e-6,
    extremal_tol: float = 1e-6,
) -> Design:
    """Recover a design from an AUB point: theta_i = theta_bar_i + rho_i w_i / v_i.

    Coordinates where |v_i| falls below ``zero_threshold`` (relative to
    max(1, ||v||_inf)) take the midpoint value.  The result is clipped into
    the bounds; clipping beyond ``clip_warn_tol`` of the interval width
    raises a warning rather than passing silently.
    """
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    if v.size != bounds.m or w.size != bounds.m:
        raise ProblemStructureError("v and w must match the bounds in length")

    scale = max(1.0, float(np.max(np.abs(v), initial=0.0)))
    excess = np.abs(w) - np.abs(v)
    if np.any(excess > feas_tol * scale):
        worst = float(np.max(excess))
        raise InfeasiblePointError(
            f"|w| exceeds |v| by {worst:.3e}, beyond tolerance {feas_tol * scale:.3e}"
        )

    theta = bounds.theta_bar.copy()
    rho = bounds.rho
    live = (np.abs(v) > zero_threshold * scale) & (rho > 0)
    theta[live] = theta[live] + rho[live] * w[live] / v[live]

    width = bounds.width
    overshoot = np.maximum(theta - bounds.theta_max, bounds.theta_min - theta)
    limit = clip_warn_tol * np.maximum(width, 1.0)
    if np.any(overshoot > limit):
        worst = float(np.max(overshoot))
        warnings.warn(
            f"recovered theta exceeded bounds by {worst:.3e} before clipping",
            RuntimeWarning,
            stacklevel=2,
        )
    theta = bounds.clip(theta)

    gap = np.minimum(theta - bounds.theta_min, bounds.theta_max - theta)
    extremal = gap <= extremal_tol * width
    return Design(theta, extremal)


def eval_objective(
    point: Union[FieldPoint, AUBPoint, np.ndarray], objective: ObjectiveSpec
) -> float:
    """Evaluate an objective spec at a field point or raw stacked vector."""
    if isinstance(point, (FieldPoint, AUBPoint)):
        y = point.stacked()
    else:
        y = np.asarray(point, dtype=float)
    return objective.value(y)


def check_feasible(point: AUBPoint, aub: AUBProblem, tol: float = 1e-6) -> FeasibilityReport:
    """Report worst-case residuals of an AUB point; never raises."""
    y = point.stacked()
    if y.size != aub.layout.dim:
        return FeasibilityReport(np.inf, np.inf, np.inf, tol)
    eq, box = aub.constraints.residuals(y)
    if point.w.size:
        abs_violation = float(np.max(np.abs(point.w) - np.abs(point.v)))
        abs_violation = max(abs_violation, 0.0)
    else:
        abs_violation = 0.0
    return FeasibilityReport(eq, box, abs_violation, tol)


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def _encode_bound(x: float):
    if np.isposinf(x):
        return "inf"
    if np.isneginf(x):
        return "-inf"
    return float(x)


def _decode_bound(x) -> float:
    if isinstance(x, str):
        if x == "inf":
            return np.inf
        if x == "-inf":
            return -np.inf
        raise ProblemStructureError(f"unrecognized bound encoding {x!r}")
    return float(x)


def _matrix_to_triplets(mat: sp.spmatrix) -> list[list]:
    coo = sp.coo_matrix(mat)
    return [[int(r), int(c), float(v)] for r, c, v in zip(coo.row, coo.col, coo.data)]


def _matrix_from_triplets(triplets, shape) -> sp.csr_matrix:
    if triplets:
        rows, cols, vals = zip(*triplets)
    else:
        rows, cols, vals = (), (), ()
    return sp.csr_matrix((vals, (rows, cols)), shape=shape)


def _term_to_dict(term: ObjectiveTerm) -> dict:
    return {
        "weight": term.weight,
        "rows": term.matrix.shape[0],
        "triplets": _matrix_to_triplets(term.matrix),
        "offset": [float(x) for x in term.offset],
    }


def _term_from_dict(d: dict, dim: int) -> ObjectiveTerm:
    mat = _matrix_from_triplets(d["triplets"], (int(d["rows"]), dim))
    return ObjectiveTerm(float(d["weight"]), mat, np.asarray(d["offset"], dtype=float))


def problem_to_dict(problem: DesignProblem) -> dict:
    """Plain-dict form of a design problem, suitable for JSON."""
    cons = problem.constraints
    obj = problem.objective
    nz = np.nonzero(obj.linear)[0]
    return {
        "layout": {"n_x": problem.layout.n_x, "m": problem.layout.m},
        "bounds": {
            "theta_min": [float(x) for x in problem.bounds.theta_min],
            "theta_max": [float(x) for x in problem.bounds.theta_max],
        },
        "constraints": {
            "triplets": _matrix_to_triplets(cons.eq_matrix),
            "rhs": [float(x) for x in cons.eq_rhs],
            "lower": [_encode_bound(x) for x in cons.var_lower],
            "upper": [_encode_bound(x) for x in cons.var_upper],
        },
        "objective": {
            "linear": {"indices": [int(i) for i in nz], "values": [float(obj.linear[i]) for i in nz]},
            "quad_terms": [_term_to_dict(t) for t in obj.quad_terms],
            "norm_terms": [_term_to_dict(t) for t in obj.norm_terms],
        },
        "metadata": dict(problem.metadata),
    }


def problem_from_dict(data: Mapping[str, Any]) -> DesignProblem:
    layout = VariableLayout(int(data["layout"]["n_x"]), int(data["layout"]["m"]))
    dim = layout.dim
    bounds = DesignBounds(
        np.asarray(data["bounds"]["theta_min"], dtype=float),
        np.asarray(data["bounds"]["theta_max"], dtype=float),
    )
    cons_d = data["constraints"]
    n_eq = len(cons_d["rhs"])
    constraints = AffineConstraintSet(
        _matrix_from_triplets(cons_d["triplets"], (n_eq, dim)),
        np.asarray(cons_d["rhs"], dtype=float),
        np.array([_decode_bound(x) for x in cons_d["lower"]]),
        np.array([_decode_bound(x) for x in cons_d["upper"]]),
    )
    obj_d = data["objective"]
    linear = np.zeros(dim)
    for i, val in zip(obj_d["linear"]["indices"], obj_d["linear"]["values"]):
        linear[int(i)] = float(val)
    objective = ObjectiveSpec(
        linear,
        tuple(_term_from_dict(t, dim) for t in obj_d.get("quad_terms", [])),
        tuple(_term_from_dict(t, dim) for t in obj_d.get("norm_terms", [])),
    )
    return DesignProblem(
        layout=layout,
        constraints=constraints,
        objective=objective,
        bounds=bounds,
        metadata=dict(data.get("metadata", {})),
    )


def save_problem(problem: DesignProblem, path) -> None:
    Path(path).write_text(json.dumps(problem_to_dict(problem), indent=2))


def load_problem(path) -> DesignProblem:
    return problem_from_dict(json.loads(Path(path).read_text()))
