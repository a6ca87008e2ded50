"""Experiment runner: build a problem, run descent or an oracle, emit files.

Subcommands:

* ``solve``  — build the selected problem, run sign flip descent, write
  design.json / trace.csv / field.csv (trajectory.csv for control) and a
  manifest.json into --out-dir, and print a one-line summary.
* ``oracle`` — brute-force global solve of a small instance.
* ``verify`` — run the bundled property suites and print PASS/FAIL per suite.

Exit codes: 0 success, 1 infeasible or initialization failure, 2 bad
configuration, 3 solver failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np
import scipy

from . import __version__, backends, conic, descent, instances, model, oracle
from .problems import (
    ControlSpec,
    DiffusionGridSpec,
    HelmholtzConfig,
    build_dynamic_control,
    build_helmholtz,
    build_static_diffusion,
    diffusion_midpoint_field,
    helmholtz_midpoint_field,
    stencil_consistency_error,
    write_design_json,
    write_field_csv,
    write_trajectory_csv,
)

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_BAD_CONFIG = 2
EXIT_SOLVER_FAILURE = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="signflip",
        description="Physical design by sign flip descent over convex restrictions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve_p = sub.add_parser("solve", help="run descent on a problem and write outputs")
    _common_problem_flags(solve_p)
    solve_p.add_argument("--rule", choices=("field", "greedy"), default="field")
    solve_p.add_argument(
        "--epsilon",
        type=float,
        default=None,
        help="field-rule decrease threshold (default 1e-4; 1e-9 for diffusion, "
        "whose reference runs use no decrease-based stop)",
    )
    solve_p.add_argument("--max-iters", type=int, default=1000)
    solve_p.add_argument("--out-dir", default="out")
    solve_p.add_argument("--seed", type=int, default=0)

    oracle_p = sub.add_parser("oracle", help="brute-force global solve (small m only)")
    _common_problem_flags(oracle_p)
    oracle_p.add_argument("--max-m", type=int, default=oracle.MAX_M_DEFAULT)
    oracle_p.add_argument("--out-dir", default=None)
    oracle_p.add_argument("--seed", type=int, default=0)

    verify_p = sub.add_parser("verify", help="run bundled property suites")
    verify_p.add_argument(
        "--suite",
        choices=("all", "roundtrip", "monotonic", "oracle", "extremality"),
        default="all",
    )
    verify_p.add_argument("--backend", choices=_BACKEND_CHOICES, default="auto")
    verify_p.add_argument("--seed", type=int, default=0)
    return parser


_BACKEND_CHOICES = ("auto", "reference", "bound", "highs", "clarabel", "scs")


def _common_problem_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--problem", choices=("helmholtz", "diffusion", "control", "custom"), required=True
    )
    p.add_argument("--config", default=None, help="JSON file of builder settings")
    p.add_argument("--input", default=None, help="problem JSON (custom problems)")
    p.add_argument("--m-side", type=int, default=None, help="diffusion grid side")
    p.add_argument("--grid-n", type=int, default=None, help="helmholtz grid points per side")
    p.add_argument("--horizon", type=int, default=None, help="control horizon T")
    p.add_argument("--backend", choices=_BACKEND_CHOICES, default="auto")


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    return json.loads(Path(path).read_text())


def _build_problem(args) -> tuple[model.DesignProblem, object]:
    """Returns (problem, physics hook or None)."""
    cfg = _load_config(args.config)
    if args.problem == "diffusion":
        if args.m_side is not None:
            cfg["m_side"] = args.m_side
        m_side = int(cfg.pop("m_side", 11))
        spec = DiffusionGridSpec.grid(m_side, **cfg)
        return build_static_diffusion(spec), lambda aub: diffusion_midpoint_field(spec)
    if args.problem == "helmholtz":
        if args.grid_n is not None:
            cfg["grid_n"] = args.grid_n
        for key in ("source_box", "objective_box"):
            if key in cfg:
                cfg[key] = tuple(cfg[key])
        hcfg = HelmholtzConfig(**cfg)
        return build_helmholtz(hcfg), lambda aub: helmholtz_midpoint_field(hcfg)
    if args.problem == "control":
        if args.horizon is not None:
            cfg["horizon"] = args.horizon
        if "heat_capacity" in cfg:
            cfg["heat_capacity"] = tuple(cfg["heat_capacity"])
        spec = ControlSpec(**cfg)
        return build_dynamic_control(spec), None
    if args.input is None:
        raise model.DomainError("--problem custom requires --input PROBLEM.json")
    return model.load_problem(args.input), None


def _manifest(args, extra: dict) -> dict:
    blob = json.dumps(
        {k: v for k, v in sorted(vars(args).items()) if k != "out_dir"},
        sort_keys=True,
        default=str,
    )
    doc = {
        "command": vars(args).get("command"),
        "config_hash": hashlib.sha256(blob.encode()).hexdigest(),
        "args": json.loads(blob),
        "backend_resolved": extra.pop("backend_resolved", None),
        "tolerances": {"abs_tol": 1e-8, "rel_tol": 1e-8},
        "versions": {
            "signflip": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "backends_available": list(backends.available()),
    }
    doc.update(extra)
    return doc


def _cmd_solve(args) -> int:
    try:
        problem, hook = _build_problem(args)
    except (model.DomainError, model.ProblemStructureError, TypeError, ValueError) as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG

    epsilon = args.epsilon
    if epsilon is None:
        epsilon = 1e-9 if problem.metadata.get("family") == "diffusion" else 1e-4
    cfg = descent.DescentConfig(rule=args.rule, epsilon=epsilon, max_iters=args.max_iters)
    t0 = time.perf_counter()
    try:
        result = descent.run(problem, cfg, physics=hook, backend=args.backend)
    except descent.InitializationError as exc:
        print(f"error: initialization failed: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (conic.SolverStateError, RuntimeError) as exc:
        print(f"error: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER_FAILURE
    wall = time.perf_counter() - t0

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_design_json(result.design, out / "design.json")
    result.trace.to_csv(out / "trace.csv")
    write_field_csv(problem, result.point, out / "field.csv")
    if problem.metadata.get("family") == "control":
        write_trajectory_csv(problem, result.point, result.design, out / "trajectory.csv")
    report = oracle.extremality_report(result.design, problem.bounds, tol=1e-3)
    manifest = _manifest(
        args,
        {
            "backend_resolved": backends.resolve(args.backend),
            "objective": result.objective,
            "iterations": result.trace.iterations,
            "wall_time_s": wall,
            "extremal_fraction": report.fraction_extremal,
        },
    )
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2))
    print(
        f"objective={result.objective:.6g} iterations={result.trace.iterations} "
        f"wall_time_s={wall:.2f} extremal_fraction={report.fraction_extremal:.3f} "
        f"out_dir={out}"
    )
    return EXIT_OK


def _cmd_oracle(args) -> int:
    try:
        problem, _ = _build_problem(args)
    except (model.DomainError, model.ProblemStructureError, TypeError, ValueError) as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    try:
        result = oracle.global_by_signs(problem, max_m=args.max_m, backend=args.backend)
    except oracle.EnumerationLimitError as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except oracle.NoFeasibleSignsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    signs = "".join("+" if s > 0 else "-" for s in result.signs)
    print(
        f"global_objective={result.objective:.9g} best_signs={signs} "
        f"solved={result.n_solved} infeasible={result.n_infeasible}"
    )
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_design_json(result.design, out / "design.json")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify suites
# ---------------------------------------------------------------------------


def _suite_roundtrip(rng, backend) -> tuple[bool, str]:
    worst = 0.0
    for _ in range(40):
        problem, witness, theta = instances.random_problem(rng)
        aub = model.to_aub(problem)
        w = model.embed_w(witness.v, theta, problem.bounds)
        point = model.AUBPoint(witness.x, witness.u, witness.v, w)
        report = model.check_feasible(point, aub, tol=1e-9)
        if not report.feasible:
            return False, "embedded point infeasible"
        f0 = model.eval_objective(witness, problem.objective)
        f1 = model.eval_objective(point, aub.objective)
        worst = max(worst, abs(f0 - f1) / max(1.0, abs(f0)))
        design = model.recover_theta(witness.v, w, problem.bounds)
        live = (np.abs(witness.v) > 1e-8) & (problem.bounds.rho > 0)
        err = np.max(np.abs(design.theta - theta)[live], initial=0.0)
        worst = max(worst, float(err))
    return worst <= 1e-9, f"worst relative error {worst:.2e}"


def _suite_monotonic(rng, backend) -> tuple[bool, str]:
    checked = 0
    for rule in ("field", "greedy"):
        for _ in range(3):
            problem, _, _ = instances.random_problem(rng, m=int(rng.integers(2, 6)))
            result = descent.run(
                problem, descent.DescentConfig(rule=rule, max_iters=40), backend=backend
            )
            objs = result.trace.accepted_objectives
            if any(b > a + 1e-9 for a, b in zip(objs, objs[1:])):
                return False, f"non-monotone accepted objectives under {rule}"
            checked += 1
    return True, f"{checked} descent traces monotone"


def _suite_oracle(rng, backend) -> tuple[bool, str]:
    worst = 0.0
    for _ in range(5):
        problem, _, _ = instances.random_problem(rng, m=int(rng.integers(2, 6)))
        best = oracle.global_by_signs(problem, backend=backend)
        result = descent.run(problem, descent.DescentConfig(), backend=backend)
        slack = best.objective - result.objective
        if slack > 1e-6 * max(1.0, abs(best.objective)):
            return False, "descent beat the oracle (impossible)"
        worst = max(worst, result.objective - best.objective)
    return True, f"oracle dominance holds; worst descent gap {worst:.2e}"


def _suite_extremality(rng, backend) -> tuple[bool, str]:
    spec = DiffusionGridSpec.grid(11)
    problem = build_static_diffusion(spec)
    result = descent.run(
        problem,
        descent.DescentConfig(max_iters=40),
        physics=lambda aub: diffusion_midpoint_field(spec),
        backend=backend,
    )
    report = oracle.extremality_report(result.design, problem.bounds, tol=1e-3)
    return (
        report.fraction_extremal >= 0.95,
        f"fraction extremal {report.fraction_extremal:.3f}",
    )


_SUITES = {
    "roundtrip": _suite_roundtrip,
    "monotonic": _suite_monotonic,
    "oracle": _suite_oracle,
    "extremality": _suite_extremality,
}


def _cmd_verify(args) -> int:
    names = list(_SUITES) if args.suite == "all" else [args.suite]
    failed = False
    for name in names:
        rng = np.random.default_rng(args.seed)
        try:
            ok, detail = _SUITES[name](rng, args.backend)
        except Exception as exc:  # a crashed suite is a failure, not an abort
            ok, detail = False, f"crashed: {exc}"
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failed = failed or not ok
    return EXIT_INFEASIBLE if failed else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "solve":
        return _cmd_solve(args)
    if args.command == "oracle":
        return _cmd_oracle(args)
    return _cmd_verify(args)


if __name__ == "__main__":
    sys.exit(main())
