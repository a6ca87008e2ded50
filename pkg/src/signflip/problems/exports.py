"""Plot-ready file exports: design.json, field.csv, trajectory.csv.

The field layout is recovered from the metadata the builders record, so a
round-tripped problem exports identically.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from ..model import AUBPoint, Design, DesignProblem

__all__ = ["write_design_json", "write_field_csv", "write_trajectory_csv"]


def write_design_json(design: Design, path) -> None:
    doc = {
        "theta": [float(x) for x in design.theta],
        "extremal_mask": [bool(x) for x in design.extremal_mask],
    }
    Path(path).write_text(json.dumps(doc))


def _write_rows(path, header: list[str], rows) -> None:
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def write_field_csv(problem: DesignProblem, point: AUBPoint, path) -> None:
    """Field values with coordinates where the family defines a geometry.

    Helmholtz exports the interior grid field, diffusion exports node
    potentials; any other family falls back to (block, index, value) rows.
    """
    family = problem.metadata.get("family")
    if family == "helmholtz":
        grid_n = int(problem.metadata["grid_n"])
        k = grid_n - 2
        h = 1.0 / (grid_n - 1)
        z = point.x
        rows = [
            [i, j, repr(i * h), repr(j * h), repr(float(z[(i - 1) * k + (j - 1)]))]
            for i in range(1, k + 1)
            for j in range(1, k + 1)
        ]
        _write_rows(path, ["ix", "iy", "x", "y", "value"], rows)
    elif family == "diffusion":
        m_side = int(problem.metadata["m_side"])
        e = point.x
        rows = [
            [node, node % m_side, node // m_side, repr(float(e[node]))]
            for node in range(m_side * m_side)
        ]
        _write_rows(path, ["node", "x", "y", "value"], rows)
    else:
        rows = []
        for block, values in (("x", point.x), ("u", point.u), ("v", point.v), ("w", point.w)):
            rows.extend([block, i, repr(float(val))] for i, val in enumerate(values))
        _write_rows(path, ["block", "index", "value"], rows)


def write_trajectory_csv(
    problem: DesignProblem, point: AUBPoint, design: Design, path
) -> None:
    """Per-timestep trajectory of a control run: temperatures, pump inputs,
    and conductances (inputs and conductances are empty at t = T)."""
    if problem.metadata.get("family") != "control":
        raise ValueError("trajectory export is only defined for control problems")
    T = int(problem.metadata["horizon"])
    x = point.x
    theta = design.theta
    pump0 = 3 * T
    rows = []
    for t in range(1, T + 1):
        row = [t]
        row.extend(repr(float(x[3 * (t - 1) + node])) for node in range(3))
        if t < T:
            row.extend(repr(float(x[pump0 + 2 * (t - 1) + room])) for room in range(2))
            row.extend(repr(float(theta[3 * (t - 1) + edge])) for edge in range(3))
        else:
            row.extend([""] * 5)
        rows.append(row)
    _write_rows(path, ["t", "e1", "e2", "e3", "u1", "u2", "g1", "g2", "g3"], rows)
