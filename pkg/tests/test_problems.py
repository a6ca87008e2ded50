import numpy as np
import pytest
import scipy.sparse as sp

import signflip as sf
from signflip import conic, descent, oracle
from signflip.problems import (
    ControlSpec,
    DiagonalDesignSpec,
    DiffusionGridSpec,
    HelmholtzConfig,
    build_diagonal,
    build_dynamic_control,
    build_helmholtz,
    build_static_diffusion,
    diagonal_midpoint_field,
    diffusion_midpoint_field,
    grid_edges,
    helmholtz_midpoint_field,
    incidence_matrix,
    stencil_consistency_error,
)
from signflip.problems.control import coupling_index


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------


def test_incidence_single_edge():
    A = incidence_matrix([(0, 1)], 2).toarray()
    np.testing.assert_array_equal(A[:, 0], [-1.0, 1.0])


def test_incidence_columns_sum_to_zero():
    A = incidence_matrix(grid_edges(4), 16)
    np.testing.assert_array_equal(np.asarray(A.sum(axis=0)).ravel(), np.zeros(A.shape[1]))


def test_incidence_laplacian_of_two_node_path():
    A = incidence_matrix([(0, 1)], 2)
    lap = (A @ sp.identity(1) @ A.T).toarray()
    np.testing.assert_array_equal(lap, [[1.0, -1.0], [-1.0, 1.0]])


def test_incidence_rejects_self_loop():
    with pytest.raises(sf.DomainError):
        incidence_matrix([(1, 1)], 3)


def test_grid_edge_count():
    assert len(grid_edges(11)) == 2 * 11 * 10


# ---------------------------------------------------------------------------
# diagonal design
# ---------------------------------------------------------------------------


def _toy_spec():
    # A = [0], b = [1], theta in [1, 2], f(z) = z
    return DiagonalDesignSpec(
        sp.csr_matrix(np.array([[0.0]])),
        np.array([1.0]),
        sf.DesignBounds([1.0], [2.0]),
        sf.ObjectiveSpec(np.array([1.0])),
    )


def test_diagonal_toy_global_optimum():
    # z = 1/theta, minimized at theta_max: z = 1/2
    problem = build_diagonal(_toy_spec())
    best = oracle.global_by_signs(problem)
    assert best.objective == pytest.approx(0.5, abs=1e-6)
    assert best.design.theta[0] == pytest.approx(2.0, abs=1e-5)


def test_diagonal_rejects_empty():
    with pytest.raises(sf.ProblemStructureError):
        build_diagonal(
            DiagonalDesignSpec(
                sp.csr_matrix((0, 0)), np.zeros(0), sf.DesignBounds([], []), sf.ObjectiveSpec(np.zeros(0))
            )
        )


def test_diagonal_midpoint_field_toy():
    assert diagonal_midpoint_field(_toy_spec())[0] == pytest.approx(2.0 / 3.0)


# ---------------------------------------------------------------------------
# Helmholtz
# ---------------------------------------------------------------------------


def test_helmholtz_stencil_row():
    cfg = HelmholtzConfig(grid_n=21)
    problem = build_helmholtz(cfg)
    k = cfg.grid_n - 2
    h2 = cfg.spacing**2
    A = problem.constraints.eq_matrix[: cfg.n_interior, : cfg.n_interior]
    center = (k // 2) * k + k // 2
    row = A[center].toarray().ravel()
    assert row[center] == pytest.approx(-4.0 / h2)
    neighbors = np.sort(np.nonzero(row)[0])
    np.testing.assert_array_equal(
        neighbors, np.sort([center, center - 1, center + 1, center - k, center + k])
    )
    for n in neighbors:
        if n != center:
            assert row[n] == pytest.approx(1.0 / h2)


def test_helmholtz_interior_count():
    cfg = HelmholtzConfig(grid_n=41)
    assert cfg.n_interior == 39 * 39
    problem = build_helmholtz(cfg)
    assert problem.layout.n_x == cfg.n_interior
    assert problem.m == cfg.n_interior


def test_helmholtz_excitation_is_indicator():
    cfg = HelmholtzConfig(grid_n=21)
    problem = build_helmholtz(cfg)
    b = problem.constraints.eq_rhs[: cfg.n_interior]
    values = np.unique(b)
    assert set(values.tolist()) <= {0.0, 1.0}
    assert b.sum() > 0


def test_helmholtz_rejects_boundary_region():
    with pytest.raises(sf.DomainError):
        HelmholtzConfig(grid_n=21, source_box=(0.0, 0.3, 0.4, 0.6))


def test_helmholtz_midpoint_residual():
    cfg = HelmholtzConfig(grid_n=21)
    z = helmholtz_midpoint_field(cfg)
    from signflip.problems.helmholtz import _as_spec

    spec = _as_spec(cfg)
    residual = spec.A @ z + spec.bounds.theta_bar * z - spec.b
    assert np.max(np.abs(residual)) <= 1e-10 * max(1.0, np.max(np.abs(spec.b)))


def test_stencil_consistency_rate():
    errs = [stencil_consistency_error(n) for n in (11, 21, 41)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.2)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.2)


# ---------------------------------------------------------------------------
# static diffusion
# ---------------------------------------------------------------------------


def test_diffusion_grid_sizes():
    spec = DiffusionGridSpec.grid(11)
    assert spec.n_nodes == 121
    assert spec.n_edges == 220
    problem = build_static_diffusion(spec)
    assert problem.m == 220
    assert problem.layout.n_x == 121


def test_diffusion_rejects_unbalanced_sources():
    spec = DiffusionGridSpec.grid(3)
    bad = spec.src.copy()
    bad[0] = 2.0
    with pytest.raises(sf.DomainError):
        DiffusionGridSpec(3, spec.incidence, bad)


def test_diffusion_two_node_toy():
    # a single edge with conductance g drops potential by 1/g under unit flow
    A = incidence_matrix([(0, 1)], 2)
    spec = DiffusionGridSpec(
        m_side=1,
        incidence=A,
        src=np.array([1.0, -1.0]),
        g_min=4.0,
        g_max=4.0,
        c=np.zeros(2),
        ground_node=1,
    )
    v = diffusion_midpoint_field(spec)
    assert abs(v[0]) == pytest.approx(1.0 / 4.0)


def test_diffusion_laplacian_psd(rng):
    spec = DiffusionGridSpec.grid(5)
    A = spec.incidence
    for _ in range(10):
        g = rng.uniform(0.0, 10.0, spec.n_edges)
        e = rng.normal(size=spec.n_nodes)
        quad = float(e @ (A @ (g * (A.T @ e))))
        assert quad >= -1e-9


def test_diffusion_flow_conservation():
    spec = DiffusionGridSpec.grid(5)
    problem = build_static_diffusion(spec)
    result = descent.run(
        problem,
        descent.DescentConfig(max_iters=5),
        physics=lambda aub: diffusion_midpoint_field(spec),
    )
    flows = result.point.u
    net = spec.incidence @ flows
    np.testing.assert_allclose(net, spec.src, atol=1e-6)
    assert abs(float(np.ones(spec.n_nodes) @ net)) <= 1e-9


def test_diffusion_grounded_solve_unique():
    spec = DiffusionGridSpec.grid(4)
    v = diffusion_midpoint_field(spec)
    assert np.all(np.isfinite(v))
    again = diffusion_midpoint_field(spec)
    np.testing.assert_array_equal(v, again)


def test_diffusion_center_weights_average():
    spec = DiffusionGridSpec.grid(11)
    assert spec.c.sum() == pytest.approx(1.0)
    assert np.count_nonzero(spec.c) == 4  # floor((11-1)/4) squared


# ---------------------------------------------------------------------------
# dynamic control
# ---------------------------------------------------------------------------


def test_control_dimensions():
    spec = ControlSpec(horizon=300)
    problem = build_dynamic_control(spec)
    assert problem.m == 3 * 299
    assert problem.layout.n_x == 3 * 300 + 2 * 299


def test_control_constant_ambient_zero_cost():
    spec = ControlSpec(
        horizon=40,
        ambient_amplitude=0.0,
        comfort_low=0.0,
        comfort_high=150.0,
    )
    problem = build_dynamic_control(spec)
    result = descent.run(problem, descent.DescentConfig(max_iters=5))
    assert result.objective == pytest.approx(0.0, abs=1e-6)


def test_control_dynamics_relax_toward_ambient():
    # with pumps off and conductances fixed, the simulated rooms approach the
    # constant ambient monotonically, and the simulated trajectory satisfies
    # the built equality rows exactly
    spec = ControlSpec(
        horizon=300,
        ambient_amplitude=0.0,
        comfort_low=0.0,
        comfort_high=150.0,
        periodic=False,
    )
    problem = build_dynamic_control(spec)
    T = spec.horizon
    h = spec.step
    A = incidence_matrix(((2, 0), (0, 1), (1, 2)), 3).toarray()
    # g at the lower limit keeps the explicit recurrence in its monotone regime
    g = np.full(3, spec.g_min)
    cap = np.array([*spec.heat_capacity, 1.0])
    e = np.zeros((T, 3))
    e[0] = [50.0, 55.0, 70.0]
    for t in range(T - 1):
        flow = g * (A.T @ e[t])
        delta = -h * (A @ flow) / cap
        e[t + 1] = e[t] + delta
        e[t + 1, 2] = 70.0
    gaps = 70.0 - e[:, :2]
    assert np.all(gaps > 0)
    assert np.all(np.diff(gaps, axis=0) < 0)

    v = np.concatenate([A.T @ e[t] for t in range(T - 1)])
    w = np.tile(g, T - 1) * v
    x = np.concatenate([e.ravel(), np.zeros(2 * (T - 1))])
    point = sf.AUBPoint(x, w, v, sf.embed_w(v, np.tile(g, T - 1), problem.bounds))
    report = sf.check_feasible(point, sf.to_aub(problem), tol=1e-9)
    assert report.eq_residual <= 1e-9


def test_control_coupling_index():
    spec = ControlSpec(horizon=10)
    assert coupling_index(spec, 1, 0) == 0
    assert coupling_index(spec, 2, 1) == 4


def test_control_validation():
    with pytest.raises(sf.DomainError):
        ControlSpec(horizon=1)
    with pytest.raises(sf.DomainError):
        ControlSpec(comfort_low=80.0, comfort_high=70.0)


def test_control_per_step_switch():
    spec = ControlSpec(horizon=20, per_step_input_norm=True)
    problem = build_dynamic_control(spec)
    # one norm term per step for the pumps plus one per step for smoothness
    assert len(problem.objective.norm_terms) == 2 * 19


# ---------------------------------------------------------------------------
# exports
# ---------------------------------------------------------------------------


def test_exports(tmp_path):
    from signflip.problems import write_design_json, write_field_csv, write_trajectory_csv

    spec = ControlSpec(horizon=12, ambient_amplitude=0.0, comfort_low=0.0, comfort_high=150.0)
    problem = build_dynamic_control(spec)
    result = descent.run(problem, descent.DescentConfig(max_iters=3))
    write_design_json(result.design, tmp_path / "design.json")
    write_trajectory_csv(problem, result.point, result.design, tmp_path / "trajectory.csv")
    import csv
    import json

    doc = json.loads((tmp_path / "design.json").read_text())
    assert len(doc["theta"]) == problem.m
    assert len(doc["extremal_mask"]) == problem.m
    with open(tmp_path / "trajectory.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "e1", "e2", "e3", "u1", "u2", "g1", "g2", "g3"]
    assert len(rows) == spec.horizon + 1
    assert rows[-1][4] == ""  # no inputs at the final step

    dspec = DiffusionGridSpec.grid(4)
    dproblem = build_static_diffusion(dspec)
    dresult = descent.run(
        dproblem, descent.DescentConfig(max_iters=3), physics=lambda aub: diffusion_midpoint_field(dspec)
    )
    write_field_csv(dproblem, dresult.point, tmp_path / "field.csv")
    with open(tmp_path / "field.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["node", "x", "y", "value"]
    assert len(rows) == 17
