"""Static diffusion design: choose edge conductances on a graph to shape the
steady-state potentials.

The steady state solves A diag(g) A^T e = src.  Splitting it into
v = A^T e (potential differences), w = diag(g) v (flows), and A w = src
exposes the design coupling; one node is grounded to remove the Laplacian's
constant-shift nullspace.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..descent import InitializationError
from ..model import (
    AffineConstraintSet,
    DesignBounds,
    DesignProblem,
    DomainError,
    ObjectiveSpec,
    ProblemStructureError,
    VariableLayout,
)
from .graphs import grid_edges, incidence_matrix

__all__ = ["DiffusionGridSpec", "build_static_diffusion", "diffusion_midpoint_field"]


def _center_square_weights(m_side: int) -> np.ndarray:
    """Mean-temperature weights over the center square of side floor((m_side - 1) / 4).

    The weights average (rather than sum) the square's temperatures, and the
    square sits at the ceil-centered offset; both choices are what reproduce
    the reference objective values for the corner-to-corner experiment.
    """
    c = np.zeros(m_side * m_side)
    k = (m_side - 1) // 4
    if k == 0:
        return c
    start = (m_side - k + 1) // 2
    for row in range(start, start + k):
        c[row * m_side + start : row * m_side + start + k] = 1.0
    return c / (k * k)


@dataclass(frozen=True)
class DiffusionGridSpec:
    """Graph, sources, conductance limits, and objective weights for one design."""

    m_side: int
    incidence: sp.csr_matrix
    src: np.ndarray
    g_min: float = 1.0
    g_max: float = 10.0
    c: np.ndarray | None = None
    ground_node: int | None = None

    def __post_init__(self) -> None:
        A = sp.csr_matrix(self.incidence, dtype=float)
        n_nodes, n_edges = A.shape
        col_sums = np.asarray(abs(A).sum(axis=0)).ravel()
        col_nets = np.asarray(A.sum(axis=0)).ravel()
        if n_edges and (np.any(col_sums != 2.0) or np.any(col_nets != 0.0)):
            raise DomainError("each incidence column must hold exactly one +1 and one -1")
        src = np.asarray(self.src, dtype=float)
        if src.shape != (n_nodes,):
            raise ProblemStructureError("src length must match the node count")
        if abs(float(src.sum())) > 1e-12:
            raise DomainError("sources must balance: sum(src) must be 0")
        if self.g_min > self.g_max or self.g_min <= 0:
            raise DomainError("conductance limits must satisfy 0 < g_min <= g_max")
        c = self.c if self.c is not None else _center_square_weights(self.m_side)
        c = np.asarray(c, dtype=float)
        if c.shape != (n_nodes,):
            raise ProblemStructureError("objective weights must have one entry per node")
        ground = self.ground_node if self.ground_node is not None else n_nodes - 1
        if not 0 <= ground < n_nodes:
            raise DomainError("ground node index out of range")
        src = src.copy()
        src.setflags(write=False)
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "incidence", A)
        object.__setattr__(self, "src", src)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "ground_node", int(ground))

    @classmethod
    def grid(
        cls,
        m_side: int,
        g_min: float = 1.0,
        g_max: float = 10.0,
        source_node: int | None = None,
        sink_node: int | None = None,
    ) -> "DiffusionGridSpec":
        """Default experiment: unit source at the bottom-left corner, unit sink
        at the top-right corner (which is also the grounded node)."""
        if m_side < 2:
            raise DomainError("grid side must be at least 2")
        n_nodes = m_side * m_side
        source = 0 if source_node is None else int(source_node)
        sink = n_nodes - 1 if sink_node is None else int(sink_node)
        if source == sink:
            raise DomainError("source and sink must differ")
        src = np.zeros(n_nodes)
        src[source] = 1.0
        src[sink] = -1.0
        A = incidence_matrix(grid_edges(m_side), n_nodes)
        return cls(m_side, A, src, g_min=g_min, g_max=g_max, ground_node=sink)

    @property
    def n_nodes(self) -> int:
        return self.incidence.shape[0]

    @property
    def n_edges(self) -> int:
        return self.incidence.shape[1]

    @property
    def bounds(self) -> DesignBounds:
        return DesignBounds(
            np.full(self.n_edges, self.g_min), np.full(self.n_edges, self.g_max)
        )


def build_static_diffusion(spec: DiffusionGridSpec) -> DesignProblem:
    """Stacked problem with columns [e | w (flows) | v (potential differences)].

    Equalities: v = A^T e, A w = src, and e_ground = 0.  The conductances are
    the design vector coupling w = diag(g) v.
    """
    A = spec.incidence
    n_v, n_e = A.shape
    layout = VariableLayout(n_x=n_v, m=n_e)
    dim = layout.dim

    eye_e = sp.identity(n_e, format="csr")
    z_ve = sp.csr_matrix((n_e, n_v))
    z_ee = sp.csr_matrix((n_e, n_e))
    z_vv = sp.csr_matrix((n_v, n_v))
    z_venn = sp.csr_matrix((n_v, n_e))

    diff_rows = sp.hstack([-A.T, z_ee, eye_e], format="csr")
    flow_rows = sp.hstack([z_vv, A, z_venn], format="csr")
    ground_row = sp.csr_matrix(([1.0], ([0], [spec.ground_node])), shape=(1, dim))

    eq = sp.vstack([diff_rows, flow_rows, ground_row], format="csr")
    rhs = np.concatenate([np.zeros(n_e), spec.src, [0.0]])

    linear = np.zeros(dim)
    linear[:n_v] = spec.c

    return DesignProblem(
        layout=layout,
        constraints=AffineConstraintSet(
            eq, rhs, np.full(dim, -np.inf), np.full(dim, np.inf)
        ),
        objective=ObjectiveSpec(linear),
        bounds=spec.bounds,
        metadata={
            "family": "diffusion",
            "m_side": spec.m_side,
            "ground_node": spec.ground_node,
        },
    )


def diffusion_midpoint_field(spec: DiffusionGridSpec) -> np.ndarray:
    """Potential differences v = A^T e of the uniform-conductance steady state."""
    A = spec.incidence
    g_mid = (spec.g_min + spec.g_max) / 2.0
    lap = (A @ (g_mid * sp.identity(spec.n_edges)) @ A.T).tocsc()
    keep = np.array([i for i in range(spec.n_nodes) if i != spec.ground_node])
    reduced = lap[keep][:, keep].tocsc()
    try:
        e_red = spla.splu(reduced).solve(spec.src[keep])
    except RuntimeError as exc:
        raise InitializationError(f"grounded Laplacian solve failed: {exc}") from exc
    e = np.zeros(spec.n_nodes)
    e[keep] = e_red
    return A.T @ e
