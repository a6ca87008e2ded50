"""Physical design via sign flip descent on the absolute-upper-bound form.

The toolkit rewrites diagonal physical design problems (u = diag(theta) v
with interval-bounded theta) into their absolute-upper-bound form, solves
the convex sign-fixed restrictions through pluggable cone-program backends,
and searches sign space with greedy or field-based flip proposals.  Exhaustive
oracles verify small instances globally.
"""

from .model import (
    AffineConstraintSet,
    AUBPoint,
    AUBProblem,
    Design,
    DesignBounds,
    DesignProblem,
    DomainError,
    FeasibilityReport,
    FieldPoint,
    InfeasiblePointError,
    ObjectiveSpec,
    ObjectiveTerm,
    ProblemStructureError,
    VariableLayout,
    check_feasible,
    embed_w,
    eval_objective,
    load_problem,
    problem_from_dict,
    problem_to_dict,
    recover_theta,
    save_problem,
    to_aub,
)
from .conic import (
    ConeProgram,
    Residuals,
    SolverConfig,
    SolverResult,
    SolverStateError,
    SolverStatus,
    build_fixed_design,
    build_sign_fixed,
    dump_cone_program,
    extract_point,
    kkt_residuals,
    solve,
)
from .descent import (
    DescentConfig,
    DescentResult,
    DescentTrace,
    InitializationError,
    IterationRecord,
    SignVector,
    init_signs,
    midpoint_field,
    propose_field,
    propose_greedy,
    run,
    run_aub,
)
from .oracle import (
    EnumerationLimitError,
    ExtremalityReport,
    ExtremalResult,
    NoFeasibleSignsError,
    OracleResult,
    extremality_report,
    global_by_signs,
    global_extremal,
)
from . import backends, instances, problems

__version__ = "0.1.0"

__all__ = [
    "AffineConstraintSet",
    "AUBPoint",
    "AUBProblem",
    "Design",
    "DesignBounds",
    "DesignProblem",
    "DomainError",
    "FeasibilityReport",
    "FieldPoint",
    "InfeasiblePointError",
    "ObjectiveSpec",
    "ObjectiveTerm",
    "ProblemStructureError",
    "VariableLayout",
    "check_feasible",
    "embed_w",
    "eval_objective",
    "load_problem",
    "problem_from_dict",
    "problem_to_dict",
    "recover_theta",
    "save_problem",
    "to_aub",
    "ConeProgram",
    "Residuals",
    "SolverConfig",
    "SolverResult",
    "SolverStateError",
    "SolverStatus",
    "build_fixed_design",
    "build_sign_fixed",
    "dump_cone_program",
    "extract_point",
    "kkt_residuals",
    "solve",
    "DescentConfig",
    "DescentResult",
    "DescentTrace",
    "InitializationError",
    "IterationRecord",
    "SignVector",
    "init_signs",
    "midpoint_field",
    "propose_field",
    "propose_greedy",
    "run",
    "run_aub",
    "EnumerationLimitError",
    "ExtremalityReport",
    "ExtremalResult",
    "NoFeasibleSignsError",
    "OracleResult",
    "extremality_report",
    "global_by_signs",
    "global_extremal",
    "backends",
    "instances",
    "problems",
]
