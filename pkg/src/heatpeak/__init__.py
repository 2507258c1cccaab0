"""Peak-shaving schedules for converter fleets via LP relaxation and forest rounding."""

from .forest import CycleWitness, NonIntegralityGraph, Reduction, apply_line_move, build_graph, find_cycle, reduce_to_forest
from .generate import GenProfile, generate_instance, generate_planted
from .instance import (
    Converter,
    InfeasibleError,
    Instance,
    ObjectiveKind,
    PrefixBounds,
    check_feasible,
    evaluate_objective,
    reformulate,
    simulate_states,
    validate_instance,
)
from .oracle import CapExceeded, OracleResult, enumerate_feasible, exact_solve
from .relaxation import LinearProgram, RelaxedSolution, build_relaxation, extract_relaxed, solve_lp
from .rounding import BinarySchedule, PeelOrder, approximate_solve, peel_order, round_solution

__all__ = [
    "BinarySchedule", "CapExceeded", "Converter", "CycleWitness", "GenProfile", "InfeasibleError",
    "Instance", "LinearProgram", "NonIntegralityGraph", "ObjectiveKind", "OracleResult", "PeelOrder",
    "PrefixBounds", "Reduction", "RelaxedSolution", "apply_line_move", "approximate_solve",
    "build_graph", "build_relaxation", "check_feasible", "enumerate_feasible", "evaluate_objective",
    "exact_solve", "extract_relaxed", "find_cycle", "generate_instance", "generate_planted",
    "peel_order", "reduce_to_forest", "reformulate", "round_solution", "simulate_states",
    "solve_lp", "validate_instance",
]
