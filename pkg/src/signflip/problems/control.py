"""Two-room temperature control with adjustable vents and heat pumps.

Rooms exchange heat with each other and with an exogenous sinusoidal ambient
node through conductances (vents) chosen per time step within limits; heat
pumps add or remove power at a cost.  Discrete dynamics over the horizon:

    C e_{t+1} = C e_t + h A w_t + h B u_t,      w_t = diag(g_t) v_t,
    v_t = A^T e_t,

with room temperatures confined to a comfort box and (optionally) periodic.
The conductance trajectory (g_t) is the design vector, so m = 3 (T - 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..model import (
    AffineConstraintSet,
    DesignBounds,
    DesignProblem,
    DomainError,
    ObjectiveSpec,
    ObjectiveTerm,
    VariableLayout,
)
from .graphs import incidence_matrix

__all__ = ["ControlSpec", "build_dynamic_control"]

N_NODES = 3  # room 1, room 2, ambient
N_EDGES = 3  # ambient-room1, room1-room2, room2-ambient
_EDGES = ((2, 0), (0, 1), (1, 2))
AMBIENT = 2


@dataclass(frozen=True)
class ControlSpec:
    """Horizon, physical constants, comfort band, and objective weights."""

    horizon: int = 300
    heat_capacity: tuple[float, float] = (0.3, 0.1)
    input_gain: float = 0.2
    g_min: float = 1.0
    g_max: float = 10.0
    eta: float = 1e-4
    comfort_low: float = 65.0
    comfort_high: float = 75.0
    ambient_base: float = 70.0
    ambient_amplitude: float = 20.0
    periodic: bool = True
    per_step_input_norm: bool = False

    def __post_init__(self) -> None:
        if self.horizon < 2:
            raise DomainError("horizon must be at least 2")
        if min(self.heat_capacity) <= 0:
            raise DomainError("heat capacities must be positive")
        if self.g_min > self.g_max or self.g_min <= 0:
            raise DomainError("conductance limits must satisfy 0 < g_min <= g_max")
        if self.comfort_low > self.comfort_high:
            raise DomainError("comfort band is empty")

    @property
    def step(self) -> float:
        return 1.0 / self.horizon

    @property
    def m(self) -> int:
        return N_EDGES * (self.horizon - 1)

    def ambient(self) -> np.ndarray:
        """Ambient temperature trajectory for t = 1..T."""
        t = np.arange(1, self.horizon + 1)
        return self.ambient_base + self.ambient_amplitude * np.sin(
            4.0 * np.pi * t / self.horizon
        )


def _indices(spec: ControlSpec):
    """Column indices of each variable group in the stacked x block."""
    T = spec.horizon

    def e_idx(t: int, node: int) -> int:  # t = 1..T
        return N_NODES * (t - 1) + node

    pump0 = N_NODES * T

    def pump_idx(t: int, room: int) -> int:  # t = 1..T-1
        return pump0 + 2 * (t - 1) + room

    n_x = N_NODES * T + 2 * (T - 1)
    return e_idx, pump_idx, n_x


def coupling_index(spec: ControlSpec, t: int, edge: int) -> int:
    """Index of edge at time t (t = 1..T-1) within the m coupling coordinates."""
    return N_EDGES * (t - 1) + edge


def build_dynamic_control(spec: ControlSpec | None = None) -> DesignProblem:
    spec = spec or ControlSpec()
    T = spec.horizon
    h = spec.step
    A = incidence_matrix(_EDGES, N_NODES).toarray()
    e_idx, pump_idx, n_x = _indices(spec)
    m = spec.m
    layout = VariableLayout(n_x=n_x, m=m)
    dim = layout.dim
    u0 = layout.u_slice.start  # flows w_t
    v0 = layout.v_slice.start  # potential differences v_t

    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    rhs: list[float] = []
    r = 0

    def add(col: int, val: float) -> None:
        rows.append(r)
        cols.append(col)
        vals.append(val)

    # Dynamics for the two rooms, t = 1..T-1:
    #   C e_{t+1} = C e_t - h A w_t + h B u_t,
    # the diffusive sign (heat flows downhill; with pumps off and ambient
    # constant, rooms relax toward ambient).
    for t in range(1, T):
        for room in range(2):
            cap = spec.heat_capacity[room]
            add(e_idx(t + 1, room), cap)
            add(e_idx(t, room), -cap)
            for edge in range(N_EDGES):
                coef = A[room, edge]
                if coef:
                    add(u0 + coupling_index(spec, t, edge), h * coef)
            add(pump_idx(t, room), -h * spec.input_gain)
            rhs.append(0.0)
            r += 1

    # Potential differences: v_t = A^T e_t, t = 1..T-1.
    for t in range(1, T):
        for edge in range(N_EDGES):
            add(v0 + coupling_index(spec, t, edge), 1.0)
            for node in range(N_NODES):
                coef = A[node, edge]
                if coef:
                    add(e_idx(t, node), -coef)
            rhs.append(0.0)
            r += 1

    # Exogenous ambient trajectory, t = 1..T.
    ambient = spec.ambient()
    for t in range(1, T + 1):
        add(e_idx(t, AMBIENT), 1.0)
        rhs.append(float(ambient[t - 1]))
        r += 1

    # Periodic room temperatures.
    if spec.periodic:
        for room in range(2):
            add(e_idx(1, room), 1.0)
            add(e_idx(T, room), -1.0)
            rhs.append(0.0)
            r += 1

    eq = sp.csr_matrix((vals, (rows, cols)), shape=(r, dim))

    lower = np.full(dim, -np.inf)
    upper = np.full(dim, np.inf)
    for t in range(1, T + 1):
        for room in range(2):
            lower[e_idx(t, room)] = spec.comfort_low
            upper[e_idx(t, room)] = spec.comfort_high

    # Objective: h * ||u||_2 over the stacked pump trajectory (or per-step
    # norms behind the config switch) plus eta * h * sum_t ||e_{t+1} - e_t||_2.
    norm_terms: list[ObjectiveTerm] = []
    if spec.per_step_input_norm:
        for t in range(1, T):
            sel = sp.csr_matrix(
                (np.ones(2), (np.arange(2), [pump_idx(t, 0), pump_idx(t, 1)])),
                shape=(2, dim),
            )
            norm_terms.append(ObjectiveTerm(h, sel, np.zeros(2)))
    else:
        pump_cols = np.array(
            [pump_idx(t, room) for t in range(1, T) for room in range(2)]
        )
        sel = sp.csr_matrix(
            (np.ones(pump_cols.size), (np.arange(pump_cols.size), pump_cols)),
            shape=(pump_cols.size, dim),
        )
        norm_terms.append(ObjectiveTerm(h, sel, np.zeros(pump_cols.size)))
    for t in range(1, T):
        cols_d = [e_idx(t + 1, node) for node in range(N_NODES)]
        cols_s = [e_idx(t, node) for node in range(N_NODES)]
        diff = sp.csr_matrix(
            (
                np.concatenate([np.ones(N_NODES), -np.ones(N_NODES)]),
                (np.tile(np.arange(N_NODES), 2), np.array(cols_d + cols_s)),
            ),
            shape=(N_NODES, dim),
        )
        norm_terms.append(ObjectiveTerm(spec.eta * h, diff, np.zeros(N_NODES)))

    bounds = DesignBounds(np.full(m, spec.g_min), np.full(m, spec.g_max))
    return DesignProblem(
        layout=layout,
        constraints=AffineConstraintSet(eq, np.asarray(rhs), lower, upper),
        objective=ObjectiveSpec(np.zeros(dim), norm_terms=tuple(norm_terms)),
        bounds=bounds,
        metadata={
            "family": "control",
            "horizon": T,
            "periodic": spec.periodic,
            "comfort": [spec.comfort_low, spec.comfort_high],
        },
    )
