"""Brute-force ground truth for small instances."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .instance import Instance, InfeasibleError, ObjectiveKind, PrefixBounds, evaluate_objective, prefix_bounds

DEFAULT_CAP = 24


class CapExceeded(Exception):
    pass


@dataclass(frozen=True)
class OracleResult:
    value: object
    schedule: np.ndarray
    n_feasible: int


def _rows(lower, upper) -> list[tuple[int, ...]]:
    """All binary rows meeting the prefix bounds, in lexicographic order."""
    T = len(lower)
    # fewest runs still needed from t on, given the running count before t
    need = [0] * (T + 1)
    for t in range(T - 1, -1, -1):
        need[t] = max(int(lower[t]), need[t + 1] - 1)
    out = []
    row = [0] * T

    def dfs(t, count):
        if t == T:
            out.append(tuple(row))
            return
        for bit in (0, 1):
            p = count + bit
            if p > upper[t] or p < need[t]:
                continue
            row[t] = bit
            dfs(t + 1, p)
        row[t] = 0

    dfs(0, 0)
    return out


def enumerate_feasible(bounds: PrefixBounds, cap: int = DEFAULT_CAP) -> Iterator[np.ndarray]:
    """Yield every binary schedule meeting the prefix bounds, lexicographically."""
    C, T = bounds.shape
    if C * T > cap:
        raise CapExceeded(f"C*T = {C * T} exceeds the enumeration cap {cap}")
    rows = [_rows(bounds.lower[c], bounds.upper[c]) for c in range(C)]
    for combo in itertools.product(*rows):
        yield np.array(combo, dtype=np.int64).reshape(C, T)


def exact_solve(inst: Instance, kind: ObjectiveKind, cap: int = DEFAULT_CAP) -> OracleResult:
    """Minimum objective over all feasible schedules; ties go to the lexicographically first.

    Objectives are screened in floating point over the whole product of
    per-converter rows, then the near-minimal candidates are re-scored with
    the instance's own (possibly exact) arithmetic.
    """
    C, T = inst.shape
    if C * T > cap:
        raise CapExceeded(f"C*T = {C * T} exceeds the enumeration cap {cap}")
    bounds = prefix_bounds(inst)
    rows = [np.array(_rows(bounds.lower[c], bounds.upper[c]), dtype=np.int64).reshape(-1, T) for c in range(C)]
    if any(len(r) == 0 for r in rows):
        raise InfeasibleError("no binary schedule satisfies the buffer limits")
    base = np.zeros(T) if kind is ObjectiveKind.BASIC else np.array([float(v) for v in inst.base_load])
    totals = base[None, :]
    for conv, r in zip(inst.converters, rows):
        totals = (totals[:, None, :] + float(conv.energy) * r[None, :, :]).reshape(-1, T)
    if kind is ObjectiveKind.ABSOLUTE:
        values = np.abs(totals).max(axis=1)
    elif kind is ObjectiveKind.FLUCTUATION:
        values = totals.max(axis=1) - totals.min(axis=1)
    else:
        values = totals.max(axis=1)
    sizes = [len(r) for r in rows]
    best, best_x = None, None
    for flat in np.flatnonzero(values <= values.min() + 1e-9):
        idx = np.unravel_index(flat, sizes)
        x = np.stack([rows[c][i] for c, i in enumerate(idx)])
        v = evaluate_objective(inst, x, kind)
        if best is None or v < best:
            best, best_x = v, x
    return OracleResult(best, best_x, len(values))
