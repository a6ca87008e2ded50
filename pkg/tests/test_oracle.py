import numpy as np
import pytest
import scipy.sparse as sp

import signflip as sf
from signflip import descent, oracle
from signflip.instances import random_diagonal_lp, random_problem
from signflip.problems import DiagonalDesignSpec, build_diagonal


def test_m1_enumerates_two_patterns(rng):
    problem, _, _ = random_problem(rng, m=1)
    result = oracle.global_by_signs(problem)
    assert result.n_solved == 2


def test_refuses_large_m(rng):
    problem, _, _ = random_problem(rng, m=4)
    with pytest.raises(oracle.EnumerationLimitError):
        oracle.global_by_signs(problem, max_m=3)


def test_no_feasible_signs():
    lay = sf.VariableLayout(n_x=0, m=1)  # columns are [u | v]
    eq = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 1.0]]))
    cons = sf.AffineConstraintSet(eq, np.array([1.0, -1.0]), np.full(2, -np.inf), np.full(2, np.inf))
    problem = sf.DesignProblem(lay, cons, sf.ObjectiveSpec(np.zeros(2)), sf.DesignBounds([1.0], [2.0]))
    with pytest.raises(oracle.NoFeasibleSignsError):
        oracle.global_by_signs(problem)


def test_known_signs_reproduce_global(rng):
    # re-solving the restriction at the optimal point's field signs recovers
    # the global objective
    from signflip import conic

    for _ in range(6):
        problem, _, _ = random_problem(rng, m=int(rng.integers(2, 6)))
        best = oracle.global_by_signs(problem)
        v = best.point.v
        scale = max(1.0, float(np.max(np.abs(v), initial=0.0)))
        signs = np.where(np.abs(v) <= 1e-8 * scale, best.signs, np.where(v < 0, -1, 1))
        prog = conic.build_sign_fixed(sf.to_aub(problem), signs)
        res = conic.solve(prog)
        assert res.status == conic.SolverStatus.OPTIMAL
        _, obj = conic.extract_point(res, sf.to_aub(problem))
        assert obj == pytest.approx(best.objective, rel=1e-6, abs=1e-6)


def test_enumeration_determinism(rng):
    problem, _, _ = random_problem(rng, m=4)
    a = oracle.global_by_signs(problem)
    b = oracle.global_by_signs(problem)
    np.testing.assert_array_equal(a.signs, b.signs)
    assert a.objective == b.objective


def test_cross_oracle_agreement(rng):
    # extremal-vertex enumeration matches sign enumeration on diagonal LPs
    for _ in range(4):
        spec = random_diagonal_lp(rng, n=int(rng.integers(2, 5)))
        problem = build_diagonal(spec)
        by_signs = oracle.global_by_signs(problem)
        by_vertex = oracle.global_extremal(spec)
        assert by_vertex.objective == pytest.approx(
            by_signs.objective, rel=1e-6, abs=1e-6 * max(1.0, abs(by_signs.objective))
        )


def test_global_extremal_empty_design():
    # no design freedom at all: one (empty) physics solve
    spec = DiagonalDesignSpec(
        sp.csr_matrix((0, 0)), np.zeros(0), sf.DesignBounds([], []), sf.ObjectiveSpec(np.zeros(0))
    )
    result = oracle.global_extremal(spec)
    assert result.n_solved == 1
    assert result.objective == 0.0


def test_global_extremal_zero_width_single_vertex():
    A = sp.csr_matrix(np.array([[0.5]]))
    spec = DiagonalDesignSpec(
        A, np.array([1.0]), sf.DesignBounds([1.5], [1.5]), sf.ObjectiveSpec(np.array([1.0]))
    )
    result = oracle.global_extremal(spec)
    assert result.n_solved == 1
    assert result.objective == pytest.approx(1.0 / 2.0)


def test_global_extremal_skips_singular_vertices():
    # A + diag(theta) is singular at theta = 1, fine at theta = 2
    A = sp.csr_matrix(np.array([[-1.0]]))
    spec = DiagonalDesignSpec(
        A, np.array([1.0]), sf.DesignBounds([1.0], [2.0]), sf.ObjectiveSpec(np.array([1.0]))
    )
    result = oracle.global_extremal(spec)
    assert result.skipped_singular >= 0
    assert np.isfinite(result.objective)


def test_oracle_dominance(rng):
    for _ in range(4):
        problem, _, _ = random_problem(rng, m=int(rng.integers(2, 5)))
        best = oracle.global_by_signs(problem)
        result = descent.run(problem, descent.DescentConfig())
        assert result.objective >= best.objective - 1e-6 * max(1.0, abs(best.objective))


def test_extremality_report():
    bounds = sf.DesignBounds(np.zeros(4), np.ones(4))
    at_max = oracle.extremality_report(np.ones(4), bounds)
    assert at_max.fraction_extremal == 1.0
    assert at_max.worst_interior_gap == 0.0
    at_mid = oracle.extremality_report(np.full(4, 0.5), bounds)
    assert at_mid.fraction_extremal == 0.0
    assert at_mid.worst_interior_gap == pytest.approx(0.5)
    mixed = oracle.extremality_report(np.array([0.0, 1.0, 0.5, 1.0]), bounds)
    assert mixed.fraction_extremal == pytest.approx(0.75)


def test_extremality_report_zero_width():
    bounds = sf.DesignBounds(np.array([2.0]), np.array([2.0]))
    report = oracle.extremality_report(np.array([2.0]), bounds)
    assert report.fraction_extremal == 1.0
