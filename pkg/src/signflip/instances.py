"""Random well-posed small instances for verification and property suites.

Instances are feasible by construction: a witness point is sampled first and
the constraints are built around it.  Boxes are kept finite so every sign
restriction is bounded, and the witness uses the midpoint design so the
midpoint bootstrap (and hence descent) always has a feasible start.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .model import (
    AffineConstraintSet,
    DesignBounds,
    DesignProblem,
    FieldPoint,
    ObjectiveSpec,
    ObjectiveTerm,
    VariableLayout,
)
from .problems.diagonal import DiagonalDesignSpec

__all__ = ["random_problem", "random_diagonal_lp"]


def _random_bounds(rng: np.random.Generator, m: int, zero_width_prob: float) -> DesignBounds:
    lo = rng.uniform(-1.5, 1.0, size=m)
    width = rng.uniform(0.2, 2.0, size=m)
    width[rng.random(m) < zero_width_prob] = 0.0
    return DesignBounds(lo, lo + width)


def random_problem(
    rng: np.random.Generator,
    n_x: int | None = None,
    m: int | None = None,
    objective: str = "mixed",
    zero_width_prob: float = 0.15,
    midpoint_witness: bool = True,
) -> tuple[DesignProblem, FieldPoint, np.ndarray]:
    """A random design problem plus the witness (field point, theta) it was
    built around.

    ``objective`` is one of "linear", "quad", "norm", or "mixed".  With
    ``midpoint_witness`` the witness design is theta_bar, which keeps the
    midpoint-design problem feasible.
    """
    if n_x is None:
        n_x = int(rng.integers(0, 6))
    if m is None:
        m = int(rng.integers(1, 9))
    bounds = _random_bounds(rng, m, zero_width_prob)
    if midpoint_witness:
        theta = bounds.theta_bar
    else:
        theta = rng.uniform(bounds.theta_min, bounds.theta_max)

    v = rng.normal(size=m)
    v[rng.random(m) < 0.15] = 0.0
    x = rng.normal(size=n_x)
    u = theta * v
    witness = FieldPoint(x, u, v)
    y = witness.stacked()

    layout = VariableLayout(n_x=n_x, m=m)
    dim = layout.dim
    n_eq = int(rng.integers(0, max(2, dim // 3)))
    mask = rng.random((n_eq, dim)) < 0.5
    G = rng.normal(size=(n_eq, dim)) * mask
    h = G @ y

    slack_lo = rng.uniform(0.5, 2.0, size=dim)
    slack_hi = rng.uniform(0.5, 2.0, size=dim)
    constraints = AffineConstraintSet(sp.csr_matrix(G), h, y - slack_lo, y + slack_hi)

    kind = objective
    if kind == "mixed":
        kind = ("linear", "quad", "norm")[int(rng.integers(0, 3))]
    linear = np.zeros(dim)
    quad_terms: tuple[ObjectiveTerm, ...] = ()
    norm_terms: tuple[ObjectiveTerm, ...] = ()
    if kind == "linear":
        linear = rng.normal(size=dim)
    else:
        p = int(rng.integers(1, 4))
        E = rng.normal(size=(p, dim)) * (rng.random((p, dim)) < 0.5)
        term = ObjectiveTerm(float(rng.uniform(0.2, 2.0)), sp.csr_matrix(E), rng.normal(size=p))
        if kind == "quad":
            quad_terms = (term,)
        else:
            norm_terms = (term,)
        linear = rng.normal(size=dim) * 0.2

    problem = DesignProblem(
        layout=layout,
        constraints=constraints,
        objective=ObjectiveSpec(linear, quad_terms, norm_terms),
        bounds=bounds,
        metadata={"family": "random", "kind": kind},
    )
    return problem, witness, theta


def random_diagonal_lp(rng: np.random.Generator, n: int | None = None) -> DiagonalDesignSpec:
    """A random diagonal design instance with a linear objective.

    Construction guarantees the extremality hypotheses: A itself and
    A + diag(theta) for every theta in the box are strictly diagonally
    dominant, so the physics is invertible everywhere and the u block is
    surjective over the affine constraint set.
    """
    if n is None:
        n = int(rng.integers(2, 7))
    off = rng.normal(size=(n, n)) * (rng.random((n, n)) < 0.6)
    np.fill_diagonal(off, 0.0)
    row_sums = np.abs(off).sum(axis=1)
    scale = np.where(row_sums > 0, 0.25 / np.maximum(row_sums, 1e-12), 1.0)
    off *= np.minimum(scale, 1.0)[:, None]
    diag = rng.uniform(0.35, 0.5, size=n) * rng.choice([-1.0, 1.0], size=n)
    A = off + np.diag(diag)

    lo = rng.uniform(0.9, 1.1, size=n)
    hi = lo + rng.uniform(0.5, 1.2, size=n)
    bounds = DesignBounds(lo, hi)

    b = rng.normal(size=n)
    b[np.abs(b) < 0.1] = 0.3
    c = rng.normal(size=n)
    return DiagonalDesignSpec(sp.csr_matrix(A), b, bounds, ObjectiveSpec(c), name="random-lp")
