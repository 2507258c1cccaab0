"""Command-line front end: gen, solve, oracle, verify, compare.

Exit codes: 0 success, 1 validation/verification failure, 2 infeasible
instance, 3 oracle enumeration cap exceeded.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import io
from .generate import GenProfile, generate_planted
from .instance import (
    InfeasibleError,
    Instance,
    ObjectiveKind,
    evaluate_objective,
    feasibility_violations,
    prefix_bounds,
    schedule_lazily,
    split_zero_energy,
    validate_instance,
)
from .oracle import DEFAULT_CAP, CapExceeded, exact_solve
from .relaxation import SNAP_TOL, RelaxedSolution, build_relaxation, solve_lp
from .rounding import BinarySchedule, approximate_solve, certificate_checks

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_CAP = 0, 1, 2, 3

log = logging.getLogger("heatpeak")


@dataclass(frozen=True)
class RunConfig:
    command: str
    instance: str | None = None
    schedule: str | None = None
    output: str | None = None
    objective: ObjectiveKind | None = ObjectiveKind.MAXIMAL
    snap_tol: float = SNAP_TOL
    lp_solver: str = "highs"
    seed: int = 0
    oracle_cap: int = DEFAULT_CAP
    batch: int = 0
    jobs: int = 1
    C: int = 2
    T: int = 4
    profile: GenProfile = GenProfile()
    trace: bool = False


@dataclass
class FleetSolution:
    """Schedule for every converter, with zero-electricity ones scheduled on their own."""

    x: np.ndarray
    core: BinarySchedule | None
    core_index: list[int]
    zero_index: list[int]


def solve_fleet(inst: Instance, kind: ObjectiveKind, method="highs", snap_tol=SNAP_TOL) -> FleetSolution:
    core, zero = split_zero_energy(inst)
    C, T = inst.shape
    x = np.zeros((C, T), dtype=np.int64)
    bounds = prefix_bounds(inst)
    for c in zero:
        x[c] = schedule_lazily(bounds.lower[c], bounds.upper[c])
    core_index = [c for c in range(C) if c not in zero]
    result = None
    if core is not None:
        result = approximate_solve(core, kind, method=method, snap_tol=snap_tol)
        x[core_index] = result.x
    return FleetSolution(x, result, core_index, zero)


def _full_relaxed(inst, fleet):
    y = fleet.x.astype(float)
    if fleet.core is not None:
        y[fleet.core_index] = fleet.core.relaxed.y
    return y


def solve_report(inst: Instance, kind: ObjectiveKind, fleet: FleetSolution, trace=False) -> dict:
    energies = [abs(c.energy) for c in inst.converters if c.energy != 0]
    E = float(max(energies)) if energies else 0.0
    objective = evaluate_objective(inst, fleet.x, kind)
    core = fleet.core
    if core is not None:
        lp_bound = core.lp_bound
    else:
        lp_bound = float(evaluate_objective(inst, fleet.x, kind))
    gap = float(objective) - lp_bound
    bound = kind.error_factor * E
    report = {
        "objective_kind": kind.value,
        "schedule": io.matrix_to_json(fleet.x),
        "objective": io.format_number(objective),
        "objectives": {k.value: io.format_number(evaluate_objective(inst, fleet.x, k)) for k in ObjectiveKind},
        "lp_bound": repr(float(lp_bound)),
        "certificate": {
            "max_energy": io.format_number(E),
            "gap": repr(gap),
            "bound": io.format_number(bound),
            "respected": bool(gap <= bound + 1e-6),
            "checks": dict(core.checks) if core is not None else {},
        },
        "relaxed": [[repr(float(v)) for v in row] for row in _full_relaxed(inst, fleet)],
        "counters": {
            "lp_method": core.lp_method if core else None,
            "lp_iterations": core.lp_iterations if core else 0,
            "reduction_moves": core.reduction.moves if core else 0,
            "potential_initial": core.reduction.potentials[0] if core else 0,
            "potential_final": core.reduction.potentials[-1] if core else 0,
            "peel_length": core.order_length if core else 0,
            "zero_energy_converters": fleet.zero_index,
        },
    }
    if trace and core is not None:
        red = core.reduction
        report["trace"] = [
            {"phi_before": red.potentials[i], "phi_after": red.potentials[i + 1],
             "cycle_length": red.cycle_lengths[i], "alpha": repr(red.alphas[i])}
            for i in range(red.moves)
        ]
    return report


def _load_valid_instance(path):
    inst = io.load_instance(path)
    report = validate_instance(inst)
    # zero-electricity converters are handled by solve_fleet; anything else is fatal
    errors = [e for e in report.errors if "electricity E_c is zero" not in e]
    return inst, errors


def run_gen(cfg: RunConfig) -> tuple[int, dict]:
    inst, planted = generate_planted(cfg.C, cfg.T, cfg.seed, cfg.profile)
    doc = io.instance_to_dict(inst)
    if cfg.schedule:
        io.write_json({"schedule": io.matrix_to_json(planted)}, cfg.schedule)
    return EXIT_OK, doc


def run_solve(cfg: RunConfig) -> tuple[int, dict]:
    inst, errors = _load_valid_instance(cfg.instance)
    if errors:
        return EXIT_INVALID, {"status": "invalid", "errors": errors}
    try:
        fleet = solve_fleet(inst, cfg.objective, cfg.lp_solver, cfg.snap_tol)
    except InfeasibleError as exc:
        return EXIT_INFEASIBLE, {"status": "infeasible", "reason": str(exc)}
    return EXIT_OK, {"status": "ok", **solve_report(inst, cfg.objective, fleet, cfg.trace)}


def _oracle_doc(result) -> dict:
    return {
        "value": io.format_number(result.value),
        "schedule": io.matrix_to_json(result.schedule),
        "n_feasible": result.n_feasible,
    }


def run_oracle(cfg: RunConfig) -> tuple[int, dict]:
    inst, errors = _load_valid_instance(cfg.instance)
    if errors:
        return EXIT_INVALID, {"status": "invalid", "errors": errors}
    try:
        result = exact_solve(inst, cfg.objective, cfg.oracle_cap)
    except CapExceeded as exc:
        return EXIT_CAP, {"status": "cap_exceeded", "reason": str(exc)}
    except InfeasibleError as exc:
        return EXIT_INFEASIBLE, {"status": "infeasible", "reason": str(exc)}
    return EXIT_OK, {"status": "ok", "objective_kind": cfg.objective.value, **_oracle_doc(result)}


def verify_schedule(inst: Instance, kind: ObjectiveKind, x, relaxed=None, lp_solver="highs") -> dict:
    """Re-check feasibility and every certificate for a given schedule."""
    x = np.asarray(x)
    if x.shape != inst.shape:
        return {"ok": False, "violations": [{"reason": f"schedule shape {x.shape} != {inst.shape}"}], "checks": {}}
    violations = [{"converter": c + 1, "t": t, "reason": why} for c, t, why in feasibility_violations(inst, x)]
    checks = {"feasible": not violations}
    if not violations:
        core, zero = split_zero_energy(inst)
        core_index = [c for c in range(inst.n_converters) if c not in zero]
        if core is not None:
            sol = solve_lp(build_relaxation(core, prefix_bounds(core), kind), lp_solver)
            objective = evaluate_objective(inst, x, kind)
            if relaxed is None:
                # without the relaxed solution it was rounded from, only the gap can be certified
                bound = kind.error_factor * core.max_energy
                checks["binary"] = bool(((x == 0) | (x == 1)).all())
                checks["error_certificate"] = float(objective) - sol.objective <= bound + 1e-6
            else:
                y = RelaxedSolution(np.asarray(relaxed, dtype=float)[core_index])
                checks.update(certificate_checks(core, kind, x[core_index], y, objective, sol.objective))
    return {"ok": all(checks.values()), "violations": violations, "checks": checks}


def run_verify(cfg: RunConfig) -> tuple[int, dict]:
    inst, errors = _load_valid_instance(cfg.instance)
    if errors:
        return EXIT_INVALID, {"status": "invalid", "errors": errors}
    doc = io.load_json(cfg.schedule)
    if isinstance(doc, list):
        doc = {"schedule": doc}
    kind = cfg.objective or ObjectiveKind(doc.get("objective_kind", "maximal"))
    x = io.matrix_from_json(doc["schedule"])
    relaxed = None
    if "relaxed" in doc:
        relaxed = np.array([[float(io.parse_number(v)) for v in row] for row in doc["relaxed"]])
    try:
        result = verify_schedule(inst, kind, x, relaxed, cfg.lp_solver)
    except InfeasibleError as exc:
        return EXIT_INFEASIBLE, {"status": "infeasible", "reason": str(exc)}
    status = EXIT_OK if result["ok"] else EXIT_INVALID
    return status, {"status": "ok" if result["ok"] else "failed", "objective_kind": kind.value, **result}


def compare_instance(inst: Instance, kind: ObjectiveKind, cap: int, lp_solver="highs", snap_tol=SNAP_TOL) -> dict:
    fleet = solve_fleet(inst, kind, lp_solver, snap_tol)
    approx = evaluate_objective(inst, fleet.x, kind)
    exact = exact_solve(inst, kind, cap)
    energies = [abs(c.energy) for c in inst.converters if c.energy != 0]
    bound = kind.error_factor * (max(energies) if energies else 0)
    gap = approx - exact.value
    return {
        "m_A": io.format_number(approx),
        "m_O": io.format_number(exact.value),
        "gap": io.format_number(gap),
        "bound": io.format_number(bound),
        "bound_respected": bool(float(gap) <= float(bound) + 1e-9),
    }


def _compare_seed(args):
    seed, cfg = args
    inst = generate_planted(cfg.C, cfg.T, seed, cfg.profile)[0]
    return {"seed": seed, **compare_instance(inst, cfg.objective, cfg.oracle_cap, cfg.lp_solver, cfg.snap_tol)}


def run_compare(cfg: RunConfig) -> tuple[int, dict]:
    try:
        if cfg.batch:
            tasks = [(cfg.seed + i, cfg) for i in range(cfg.batch)]
            if cfg.jobs > 1:
                with ProcessPoolExecutor(cfg.jobs) as pool:
                    rows = list(pool.map(_compare_seed, tasks))
            else:
                rows = [_compare_seed(t) for t in tasks]
            doc = {
                "objective_kind": cfg.objective.value,
                "instances": rows,
                "bound_respected": all(r["bound_respected"] for r in rows),
            }
        else:
            inst, errors = _load_valid_instance(cfg.instance)
            if errors:
                return EXIT_INVALID, {"status": "invalid", "errors": errors}
            doc = {"objective_kind": cfg.objective.value, **compare_instance(
                inst, cfg.objective, cfg.oracle_cap, cfg.lp_solver, cfg.snap_tol)}
    except CapExceeded as exc:
        return EXIT_CAP, {"status": "cap_exceeded", "reason": str(exc)}
    except InfeasibleError as exc:
        return EXIT_INFEASIBLE, {"status": "infeasible", "reason": str(exc)}
    return EXIT_OK, {"status": "ok", **doc}


COMMANDS = {"gen": run_gen, "solve": run_solve, "oracle": run_oracle, "verify": run_verify, "compare": run_compare}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heatpeak", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, instance=True):
        if instance:
            p.add_argument("instance", help="instance JSON file")
        p.add_argument("-o", "--output", help="write the JSON report here instead of stdout")
        p.add_argument("--objective", choices=[k.value for k in ObjectiveKind], default=None,
                       help="default: maximal (verify: the report's own objective)")
        p.add_argument("--snap-tol", type=float, default=SNAP_TOL)
        p.add_argument("--lp-solver", choices=["highs", "simplex", "barycentric"], default="highs")
        p.add_argument("--trace", action="store_true", help="log one line per vertex-reduction move")

    def gen_args(p):
        p.add_argument("--C", type=int, default=2, help="number of converters")
        p.add_argument("--T", type=int, default=4, help="number of intervals")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--profile", choices=["zero", "diurnal"], default="zero", help="base-load profile")
        p.add_argument("--positive", action="store_true", help="only consuming converters (E_c > 0)")
        p.add_argument("--force-run", action="store_true", help="every converter must run at least once")

    p = sub.add_parser("gen", help="generate a feasible random instance")
    gen_args(p)
    p.add_argument("-o", "--output")
    p.add_argument("--planted", help="also write the planted feasible schedule here")

    common(sub.add_parser("solve", help="approximate schedule with error certificate"))

    p = sub.add_parser("oracle", help="exact optimum by enumeration (small instances)")
    common(p)
    p.add_argument("--oracle-cap", type=int, default=DEFAULT_CAP)

    p = sub.add_parser("verify", help="re-check a schedule's feasibility and certificates")
    common(p)
    p.add_argument("schedule", help="solve report or {\"schedule\": [[...]]} JSON")

    p = sub.add_parser("compare", help="approximate vs exact on one instance or a generated batch")
    p.add_argument("instance", nargs="?")
    common(p, instance=False)
    gen_args(p)
    p.add_argument("--oracle-cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--batch", type=int, default=0, help="generate and compare this many instances")
    p.add_argument("--jobs", type=int, default=1)
    return parser


def config_from_args(args) -> RunConfig:
    get = lambda name, default=None: getattr(args, name, default)  # noqa: E731
    profile = GenProfile(
        base=get("profile", "zero") or "zero",
        positive_only=bool(get("positive", False)),
        force_run=bool(get("force_run", False)),
    )
    objective = get("objective")
    if objective is not None:
        objective = ObjectiveKind(objective)
    elif args.command != "verify":
        objective = ObjectiveKind.MAXIMAL
    return RunConfig(
        command=args.command,
        instance=get("instance"),
        schedule=get("schedule") if args.command == "verify" else get("planted"),
        output=get("output"),
        objective=objective,
        snap_tol=get("snap_tol", SNAP_TOL),
        lp_solver=get("lp_solver", "highs"),
        seed=get("seed", 0),
        oracle_cap=get("oracle_cap", DEFAULT_CAP),
        batch=get("batch", 0),
        jobs=get("jobs", 1),
        C=get("C", 2),
        T=get("T", 4),
        profile=profile,
        trace=bool(get("trace", False)),
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = config_from_args(args)
    logging.basicConfig(level=logging.DEBUG if cfg.trace else logging.WARNING, format="%(name)s: %(message)s")
    code, doc = COMMANDS[cfg.command](cfg)
    text = io.write_json(doc, cfg.output)
    if cfg.output is None or cfg.output == "-":
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
