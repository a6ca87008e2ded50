"""Builders for the three application families plus graph utilities.

Each builder produces an immutable :class:`~signflip.model.DesignProblem`
(with family details recorded in metadata for exports) and a matching
midpoint physics hook for descent initialization.
"""

from .graphs import incidence_matrix, grid_edges, grid_coordinates
from .diagonal import DiagonalDesignSpec, build_diagonal, diagonal_midpoint_field
from .helmholtz import (
    HelmholtzConfig,
    build_helmholtz,
    helmholtz_midpoint_field,
    stencil_consistency_error,
)
from .diffusion import DiffusionGridSpec, build_static_diffusion, diffusion_midpoint_field
from .control import ControlSpec, build_dynamic_control
from .exports import write_design_json, write_field_csv, write_trajectory_csv

__all__ = [
    "incidence_matrix",
    "grid_edges",
    "grid_coordinates",
    "DiagonalDesignSpec",
    "build_diagonal",
    "diagonal_midpoint_field",
    "HelmholtzConfig",
    "build_helmholtz",
    "helmholtz_midpoint_field",
    "stencil_consistency_error",
    "DiffusionGridSpec",
    "build_static_diffusion",
    "diffusion_midpoint_field",
    "ControlSpec",
    "build_dynamic_control",
    "write_design_json",
    "write_field_csv",
    "write_trajectory_csv",
]
