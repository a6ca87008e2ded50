import numpy as np
import pytest

from signflip.descent import DescentTrace


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def assert_trace_sound(trace: DescentTrace, field_safety_tol: float = 1e-6) -> None:
    """Monotone accepted objectives plus field-rule proposal safety."""
    objs = trace.accepted_objectives
    for before, after in zip(objs, objs[1:]):
        assert after <= before + 1e-12 * max(1.0, abs(before)), "accepted sequence increased"
    for rec in trace.records:
        if rec.proposal_rule == "field" and np.isfinite(rec.objective_after):
            bound = rec.objective_before + field_safety_tol * max(1.0, abs(rec.objective_before))
            assert rec.objective_after <= bound, (
                f"field proposal worsened the objective: {rec.objective_before} -> {rec.objective_after}"
            )
        if rec.accepted and rec.proposal_rule != "init":
            assert rec.objective_after < rec.objective_before


@pytest.fixture
def trace_checker():
    return assert_trace_sound
