"""Peel order over a forest graph, rounding rules, and the end-to-end approximate solver."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .forest import NonIntegralityGraph, Reduction, build_graph, reduce_to_forest
from .instance import (
    Instance,
    ObjectiveKind,
    evaluate_objective,
    load_profile,
    reformulate,
)
from .relaxation import SNAP_TOL, RelaxedSolution, build_relaxation, extract_relaxed, solve_lp

_SIGN_TOL = 1e-9


@dataclass(frozen=True)
class PeelStep:
    cls: int
    converter: int
    times: tuple[int, ...]
    anchor: int | None


@dataclass(frozen=True)
class PeelOrder:
    steps: tuple[PeelStep, ...]

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)


def peel_order(g: NonIntegralityGraph) -> PeelOrder:
    """Order the class vertices so each has at most one non-leaf neighbour when it is added.

    Built from the end: repeatedly remove a class vertex with at most one
    neighbouring time vertex of degree >= 2.  Raises RuntimeError on a cycle.
    """
    K = len(g.classes)
    class_adj = [times for _, times in g.classes]
    deg = {t: len(ks) for t, ks in g.time_adj.items()}
    active = {t: d >= 2 for t, d in deg.items()}
    cdeg = [sum(active[t] for t in times) for times in class_adj]
    removed = [False] * K
    queue = deque(k for k in range(K) if cdeg[k] <= 1)
    reverse = []
    while queue:
        k = queue.popleft()
        anchor = next((t for t in class_adj[k] if active[t]), None)
        removed[k] = True
        reverse.append(PeelStep(k, g.classes[k][0], class_adj[k], anchor))
        for t in class_adj[k]:
            deg[t] -= 1
            if active[t] and deg[t] <= 1:
                active[t] = False
                for k2 in g.time_adj[t]:
                    if not removed[k2]:
                        cdeg[k2] -= 1
                        if cdeg[k2] == 1:
                            queue.append(k2)
    if len(reverse) != K:
        raise RuntimeError("non-integrality graph has a cycle; reduce it to a forest first")
    return PeelOrder(tuple(reversed(reverse)))


def round_solution(z: RelaxedSolution, order: PeelOrder, energy) -> np.ndarray:
    """Round the fractional entries of ``z`` class by class in peel order.

    Entries before the pivot interval follow floor (or ceil) prefix steps, the
    pivot itself is forced to 1 (or 0) against the accumulated deviation, and
    later entries follow whichever prefix rounding keeps the running count
    between the floor and ceiling of ``z``'s prefix sums.
    """
    energy = np.asarray(energy, dtype=float)
    x = z.y.copy()
    # deviation[t] = sum_c E_c (z - x) at t
    deviation = np.zeros(z.shape[1])
    lo = z.prefix_floor()
    hi = z.prefix_ceil()

    def floor_at(c, t):
        return lo[c, t] if t >= 0 else 0

    def ceil_at(c, t):
        return hi[c, t] if t >= 0 else 0

    def assign(c, t, v):
        deviation[t] += energy[c] * (x[c, t] - v)
        x[c, t] = v

    for step in order:
        c, W = step.converter, step.times
        pivot = step.anchor if step.anchor is not None else W[0]
        increase = energy[c] * deviation[pivot] >= -_SIGN_TOL
        for t in W:
            if t < pivot:
                if increase:
                    assign(c, t, floor_at(c, t) - floor_at(c, t - 1))
                else:
                    assign(c, t, ceil_at(c, t) - ceil_at(c, t - 1))
        assign(c, pivot, 1.0 if increase else 0.0)
        # The running count now sits at floor+1 (after a forced 1) or at the
        # ceiling (after a forced 0) of the previous prefix; keep following
        # whichever rounding of the current prefix that equals.
        if increase:
            use_ceil = floor_at(c, pivot - 1) == floor_at(c, pivot)
        else:
            use_ceil = ceil_at(c, pivot - 1) == ceil_at(c, pivot)
        for t in W:
            if t > pivot:
                if use_ceil:
                    assign(c, t, ceil_at(c, t) - ceil_at(c, t - 1))
                else:
                    assign(c, t, floor_at(c, t) - floor_at(c, t - 1))

    rounded = np.rint(x)
    if np.abs(x - rounded).max(initial=0.0) > 0 or ((rounded != 0) & (rounded != 1)).any():
        raise RuntimeError("rounding produced a non-binary schedule")
    return rounded.astype(np.int64)


@dataclass
class BinarySchedule:
    x: np.ndarray
    kind: ObjectiveKind
    objective: object
    lp_bound: float
    error_bound: float
    relaxed: RelaxedSolution
    forest: RelaxedSolution
    reduction: Reduction
    order_length: int
    lp_method: str = "highs"
    lp_iterations: int = 0
    checks: dict = field(default_factory=dict)

    @property
    def gap(self) -> float:
        """Certified ``m^A - m^LP``."""
        return float(self.objective) - self.lp_bound

    @property
    def certified(self) -> bool:
        return all(self.checks.values())


def approximate_solve(
    inst: Instance,
    kind: ObjectiveKind,
    *,
    method: str = "highs",
    snap_tol: float = SNAP_TOL,
    cert_tol: float = 1e-6,
) -> BinarySchedule:
    """Reformulate, solve the relaxation, reduce to a forest, peel and round.

    Raises InfeasibleError when the instance has no feasible schedule.
    """
    bounds = reformulate(inst)
    lp = build_relaxation(inst, bounds, kind)
    sol = solve_lp(lp, method)
    y = extract_relaxed(sol, inst, snap_tol)
    energy = inst.energies
    reduction = reduce_to_forest(y, energy)
    z = reduction.solution
    order = peel_order(build_graph(z))
    x = round_solution(z, order, energy)
    out = BinarySchedule(
        x=x,
        kind=kind,
        objective=evaluate_objective(inst, x, kind),
        lp_bound=sol.objective,
        error_bound=kind.error_factor * inst.max_energy,
        relaxed=y,
        forest=z,
        reduction=reduction,
        order_length=len(order),
        lp_method=sol.method,
        lp_iterations=sol.iterations,
    )
    out.checks = certificate_checks(inst, kind, x, y, out.objective, out.lp_bound, tol=cert_tol)
    out.checks["prefix_bounds"] = bool(bounds.admits(x))
    return out


def certificate_checks(inst: Instance, kind: ObjectiveKind, x, y: RelaxedSolution, objective, lp_bound, tol=1e-6) -> dict:
    """Boolean per guarantee: prefix sandwich, per-interval deviation, error certificate."""
    x = np.asarray(x)
    E = inst.max_energy
    px = np.cumsum(x, axis=1)
    sandwich = bool(((y.prefix_floor() <= px) & (px <= y.prefix_ceil())).all())
    totals_x = np.array([float(v) for v in load_profile(inst, x, kind)])
    base = np.zeros(inst.horizon) if kind is ObjectiveKind.BASIC else [float(v) for v in inst.base_load]
    totals_y = y.totals(inst.energies, base)
    deviation = float(np.abs(totals_x - totals_y).max())
    return {
        "binary": bool(((x == 0) | (x == 1)).all()),
        "prefix_sandwich": sandwich,
        "interval_deviation": deviation <= E + tol,
        "error_certificate": float(objective) - lp_bound <= kind.error_factor * E + tol,
    }
