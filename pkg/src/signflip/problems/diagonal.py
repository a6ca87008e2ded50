"""Diagonal physical design: (A + diag(theta)) z = b with a convex objective on z.

Introducing u = diag(theta) z turns the physics into the affine rows
A z + u = b, and aliasing v = z exposes the (x, u, v) structure the AUB
machinery expects.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..descent import InitializationError
from ..model import (
    AffineConstraintSet,
    DesignBounds,
    DesignProblem,
    ObjectiveSpec,
    ProblemStructureError,
    VariableLayout,
)

__all__ = ["DiagonalDesignSpec", "build_diagonal", "diagonal_midpoint_field"]


@dataclass(frozen=True)
class DiagonalDesignSpec:
    """Physics operator, excitation, design bounds, and objective over the field z."""

    A: sp.csr_matrix
    b: np.ndarray
    bounds: DesignBounds
    objective: ObjectiveSpec
    name: str = "diagonal"

    def __post_init__(self) -> None:
        A = sp.csr_matrix(self.A, dtype=float)
        if A.shape[0] != A.shape[1]:
            raise ProblemStructureError(f"physics operator must be square, got {A.shape}")
        b = np.asarray(self.b, dtype=float)
        if b.shape != (A.shape[0],):
            raise ProblemStructureError("excitation length must match the operator")
        if self.bounds.m != A.shape[0]:
            raise ProblemStructureError("design bounds must have one entry per field coordinate")
        if self.objective.dim != A.shape[0]:
            raise ProblemStructureError("objective must be over the field z")
        b = b.copy()
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.A.shape[0]


def build_diagonal(
    spec: DiagonalDesignSpec, extra_metadata: Mapping[str, Any] | None = None
) -> DesignProblem:
    """Lift a diagonal design spec into the stacked (x, u, v) problem form.

    Columns are [z | u | v] with the alias row v - z = 0 making the coupling
    u = diag(theta) v explicit; the physics becomes A z + u = b.
    """
    n = spec.n
    if n == 0:
        raise ProblemStructureError("empty diagonal design problem")
    layout = VariableLayout(n_x=n, m=n)
    eye = sp.identity(n, format="csr")
    zero = sp.csr_matrix((n, n))
    physics = sp.hstack([spec.A, eye, zero], format="csr")
    alias = sp.hstack([-eye, zero, eye], format="csr")
    constraints = AffineConstraintSet(
        sp.vstack([physics, alias], format="csr"),
        np.concatenate([spec.b, np.zeros(n)]),
        np.full(layout.dim, -np.inf),
        np.full(layout.dim, np.inf),
    )
    metadata = {"family": "diagonal", "name": spec.name}
    if extra_metadata:
        metadata.update(extra_metadata)
    return DesignProblem(
        layout=layout,
        constraints=constraints,
        objective=spec.objective.lifted(layout.dim),
        bounds=spec.bounds,
        metadata=metadata,
    )


def diagonal_midpoint_field(spec: DiagonalDesignSpec) -> np.ndarray:
    """Direct sparse solve of (A + diag(theta_bar)) z = b; returns v = z."""
    n = spec.n
    system = (spec.A + sp.diags(spec.bounds.theta_bar)).tocsc()
    try:
        factor = spla.splu(system)
        z = factor.solve(np.array(spec.b))
    except RuntimeError as exc:
        raise InitializationError(f"midpoint physics solve failed: {exc}") from exc
    if not np.all(np.isfinite(z)):
        raise InitializationError("midpoint physics solve produced non-finite values")
    return z
