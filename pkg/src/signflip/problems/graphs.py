"""Incidence matrices and rectangular-grid graph helpers."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ..model import DomainError

__all__ = ["incidence_matrix", "grid_edges", "grid_coordinates"]


def incidence_matrix(edges, n_nodes: int) -> sp.csr_matrix:
    """Node-edge incidence matrix: +1 where the edge points to the node,
    -1 where it points from the node.

    Every column therefore sums to zero, and A diag(g) A^T is the graph
    Laplacian with edge weights g.
    """
    edges = list(edges)
    rows, cols, vals = [], [], []
    for j, (src, dst) in enumerate(edges):
        src, dst = int(src), int(dst)
        if src == dst:
            raise DomainError(f"edge {j} is a self-loop at node {src}")
        if not (0 <= src < n_nodes and 0 <= dst < n_nodes):
            raise DomainError(f"edge {j} references a node outside 0..{n_nodes - 1}")
        rows.extend((dst, src))
        cols.extend((j, j))
        vals.extend((1.0, -1.0))
    return sp.csr_matrix((vals, (rows, cols)), shape=(n_nodes, len(edges)))


def grid_edges(m_side: int) -> list[tuple[int, int]]:
    """Edges of an m_side x m_side grid, horizontal rows first, then vertical.

    Nodes are numbered row-major: node (row, col) has index row*m_side + col.
    Edges point from the lower to the higher node index.
    """
    if m_side < 1:
        raise DomainError("grid side must be at least 1")
    edges: list[tuple[int, int]] = []
    for row in range(m_side):
        for col in range(m_side - 1):
            a = row * m_side + col
            edges.append((a, a + 1))
    for row in range(m_side - 1):
        for col in range(m_side):
            a = row * m_side + col
            edges.append((a, a + m_side))
    return edges


def grid_coordinates(m_side: int) -> np.ndarray:
    """(x, y) positions of the row-major grid nodes, in unit steps."""
    rows, cols = np.divmod(np.arange(m_side * m_side), m_side)
    return np.stack([cols, rows], axis=1).astype(float)
