"""LP relaxation of the peak-shaving problem over prefix bounds.

Variables are ordered ``x[0,0], x[0,1], ..., x[C-1,T-1]`` followed by the
objective helpers (``m``, or ``m_l`` then ``m_u`` for fluctuation).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, replace

import numpy as np
import scipy.optimize
import scipy.sparse as sp

from .instance import Instance, InfeasibleError, ObjectiveKind, PrefixBounds
from .simplex import simplex

SNAP_TOL = 1e-7


@dataclass(frozen=True)
class LinearProgram:
    shape: tuple[int, int]
    kind: ObjectiveKind
    cost: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    rows: sp.csr_matrix
    senses: tuple[str, ...]
    rhs: np.ndarray
    row_names: tuple[str, ...]

    @property
    def n_vars(self) -> int:
        return len(self.cost)

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def var_names(self) -> list[str]:
        C, T = self.shape
        names = [f"x_{c + 1}_{t + 1}" for c in range(C) for t in range(T)]
        if self.kind is ObjectiveKind.FLUCTUATION:
            return names + ["m_l", "m_u"]
        return names + ["m"]

    def residuals(self, v) -> np.ndarray:
        """Constraint violation per row (0 when satisfied), bounds included."""
        act = self.rows @ v
        senses = np.array(self.senses)
        viol = np.where(senses == "<=", act - self.rhs, 0.0)
        viol = np.where(senses == ">=", self.rhs - act, viol)
        viol = np.where(senses == "=", np.abs(act - self.rhs), viol)
        bound_viol = np.maximum(self.lower - v, 0) + np.maximum(v - self.upper, 0)
        return np.concatenate([np.maximum(viol, 0.0), bound_viol])

    def to_lp_text(self) -> str:
        """CPLEX-LP style dump, fixed-point decimals, one constraint per line."""
        names = self.var_names
        out = io.StringIO()
        out.write(f"Minimize\n obj: {_terms((a, names[j]) for j, a in enumerate(self.cost) if a)}\n")
        out.write("Subject To\n")
        for i in range(self.n_rows):
            lo, hi = self.rows.indptr[i], self.rows.indptr[i + 1]
            expr = _terms((a, names[j]) for j, a in zip(self.rows.indices[lo:hi], self.rows.data[lo:hi]))
            out.write(f" {self.row_names[i]}: {expr} {self.senses[i]} {self.rhs[i]:.10f}\n")
        out.write("Bounds\n")
        for j, name in enumerate(names):
            lo, hi = self.lower[j], self.upper[j]
            if np.isinf(lo) and np.isinf(hi):
                out.write(f" {name} free\n")
            else:
                lo_s = "-inf" if np.isinf(lo) else f"{lo:.10f}"
                hi_s = "+inf" if np.isinf(hi) else f"{hi:.10f}"
                out.write(f" {lo_s} <= {name} <= {hi_s}\n")
        out.write("End\n")
        return out.getvalue()


def _terms(pairs) -> str:
    parts = []
    for a, name in pairs:
        if parts:
            parts.append(f"{'-' if a < 0 else '+'} {abs(a):.10f} {name}")
        else:
            parts.append(f"{'-' if a < 0 else ''}{abs(a):.10f} {name}")
    return " ".join(parts)


def build_relaxation(inst: Instance, bounds: PrefixBounds, kind: ObjectiveKind) -> LinearProgram:
    C, T = inst.shape
    n_ctrl = C * T
    base = np.zeros(T) if kind is ObjectiveKind.BASIC else np.array([float(f) for f in inst.base_load])
    E = inst.energies
    fluct = kind is ObjectiveKind.FLUCTUATION
    n = n_ctrl + (2 if fluct else 1)
    m_idx = n_ctrl

    rows, cols, vals = [], [], []
    senses, rhs, names = [], [], []

    def add_row(entries, sense, b, name):
        r = len(rhs)
        for j, a in entries:
            rows.append(r); cols.append(j); vals.append(a)
        senses.append(sense); rhs.append(b); names.append(name)

    for t in range(T):
        load = [(c * T + t, E[c]) for c in range(C)]
        if kind in (ObjectiveKind.BASIC, ObjectiveKind.MAXIMAL):
            add_row(load + [(m_idx, -1.0)], "<=", -base[t], f"peak_{t + 1}")
        elif kind is ObjectiveKind.ABSOLUTE:
            add_row(load + [(m_idx, -1.0)], "<=", -base[t], f"abs_hi_{t + 1}")
            add_row([(j, -a) for j, a in load] + [(m_idx, -1.0)], "<=", base[t], f"abs_lo_{t + 1}")
        else:
            add_row(load + [(m_idx, -1.0)], ">=", -base[t], f"band_lo_{t + 1}")
            add_row(load + [(m_idx + 1, -1.0)], "<=", -base[t], f"band_hi_{t + 1}")

    for c in range(C):
        for t in range(T):
            prefix = [(c * T + i, 1.0) for i in range(t + 1)]
            add_row(prefix, ">=", float(bounds.lower[c, t]), f"pre_lo_{c + 1}_{t + 1}")
            add_row(prefix, "<=", float(bounds.upper[c, t]), f"pre_hi_{c + 1}_{t + 1}")

    cost = np.zeros(n)
    if fluct:
        cost[m_idx], cost[m_idx + 1] = -1.0, 1.0
    else:
        cost[m_idx] = 1.0
    lower = np.concatenate([np.zeros(n_ctrl), np.full(n - n_ctrl, -np.inf)])
    upper = np.concatenate([np.ones(n_ctrl), np.full(n - n_ctrl, np.inf)])
    mat = sp.csr_matrix((vals, (rows, cols)), shape=(len(rhs), n))
    return LinearProgram(
        shape=(C, T), kind=kind, cost=cost, lower=lower, upper=upper, rows=mat,
        senses=tuple(senses), rhs=np.array(rhs, dtype=float), row_names=tuple(names),
    )


@dataclass(frozen=True)
class LpSolution:
    values: np.ndarray
    objective: float
    method: str
    iterations: int


def solve_lp(lp: LinearProgram, method: str = "highs") -> LpSolution:
    """Optimal basic solution of ``lp``; raises InfeasibleError if there is none.

    ``method="highs"`` runs the HiGHS dual simplex through scipy;
    ``method="simplex"`` runs the dense in-house simplex.
    """
    if method == "highs":
        return _solve_highs(lp)
    if method == "simplex":
        return _solve_dense(lp)
    if method == "barycentric":
        return _solve_barycentric(lp)
    raise ValueError(f"unknown LP method {method!r}")


def _solve_barycentric(lp, n_extra=4, seed=0):
    """Mean of several optimal vertices: an optimum that is usually not a vertex.

    The extra vertices come from fixing the objective at its optimum and
    minimising fixed pseudo-random directions over the control variables.
    """
    first = _solve_highs(lp)
    C, T = lp.shape
    rng = np.random.default_rng(seed)
    cap = first.objective + 1e-7 * max(1.0, abs(first.objective))
    fixed = LinearProgram(
        shape=lp.shape, kind=lp.kind, cost=lp.cost, lower=lp.lower, upper=lp.upper,
        rows=sp.vstack([lp.rows, sp.csr_matrix(lp.cost)]).tocsr(),
        senses=lp.senses + ("<=",), rhs=np.append(lp.rhs, cap), row_names=lp.row_names + ("optimum",),
    )
    points = [first.values]
    iterations = first.iterations
    for _ in range(n_extra):
        cost = np.zeros(lp.n_vars)
        cost[: C * T] = rng.standard_normal(C * T)
        try:
            sol = _solve_highs(replace(fixed, cost=cost))
        except InfeasibleError:
            # numerically empty optimal face; the first vertex stands alone
            continue
        points.append(sol.values)
        iterations += sol.iterations
    values = np.mean(points, axis=0)
    return LpSolution(values, float(lp.cost @ values), "barycentric", iterations)


def _solve_highs(lp):
    senses = np.array(lp.senses)
    ub_rows = np.flatnonzero(senses == "<=")
    lb_rows = np.flatnonzero(senses == ">=")
    eq_rows = np.flatnonzero(senses == "=")
    A_ub = sp.vstack([lp.rows[ub_rows], -lp.rows[lb_rows]]).tocsr()
    b_ub = np.concatenate([lp.rhs[ub_rows], -lp.rhs[lb_rows]])
    kwargs = {}
    if len(eq_rows):
        kwargs = {"A_eq": lp.rows[eq_rows], "b_eq": lp.rhs[eq_rows]}
    bounds = [(None if np.isinf(lo) else lo, None if np.isinf(hi) else hi) for lo, hi in zip(lp.lower, lp.upper)]
    res = scipy.optimize.linprog(
        lp.cost, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs-ds",
        options={"primal_feasibility_tolerance": 1e-9, "dual_feasibility_tolerance": 1e-9}, **kwargs,
    )
    if res.status == 2:
        raise InfeasibleError("LP relaxation is infeasible, so no binary schedule exists")
    if res.status == 3:
        raise RuntimeError("LP relaxation reported unbounded; the objective helper must be bounded below")
    if res.status != 0:
        raise RuntimeError(f"HiGHS failed: {res.message}")
    return LpSolution(res.x, float(res.fun), "highs", int(res.nit))


def _solve_dense(lp):
    res = simplex(lp.cost, lp.rows.toarray(), lp.senses, lp.rhs, lp.lower, lp.upper)
    if res.status == "infeasible":
        raise InfeasibleError("LP relaxation is infeasible, so no binary schedule exists")
    if res.status == "unbounded":
        raise RuntimeError("LP relaxation reported unbounded; the objective helper must be bounded below")
    return LpSolution(res.x, res.objective, "simplex", res.iterations)


@dataclass(frozen=True, eq=False)
class RelaxedSolution:
    """A fractional schedule with snapped values and cached prefix sums.

    Entries and prefix sums within ``tol`` of an integer are flagged integral
    and stored as that integer exactly.
    """

    y: np.ndarray
    objective: float = math.nan
    tol: float = SNAP_TOL

    def __post_init__(self):
        y = np.clip(np.array(self.y, dtype=float), 0.0, 1.0)
        y = np.where(np.abs(y - np.rint(y)) <= self.tol, np.rint(y), y)
        prefix = np.cumsum(y, axis=1)
        p_integral = np.abs(prefix - np.rint(prefix)) <= self.tol
        prefix = np.where(p_integral, np.rint(prefix), prefix)
        # entries are re-derived from the snapped prefix sums so both agree exactly
        y = np.diff(prefix, axis=1, prepend=0.0)
        integral = np.abs(y - np.rint(y)) <= self.tol
        y = np.where(integral, np.rint(y), y)
        for name, arr in (("y", y), ("prefix", prefix), ("frac", ~integral), ("frac_prefix", ~p_integral)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.y.shape

    @property
    def potential(self) -> int:
        """Number of fractional entries plus fractional prefix sums."""
        return int(self.frac.sum() + self.frac_prefix.sum())

    def is_integral(self) -> bool:
        return not self.frac.any()

    def prefix_floor(self) -> np.ndarray:
        return np.floor(self.prefix).astype(np.int64)

    def prefix_ceil(self) -> np.ndarray:
        return np.ceil(self.prefix).astype(np.int64)

    def totals(self, energy, base=None) -> np.ndarray:
        """Per-interval ``base_t + sum_c energy_c * y[c, t]``."""
        out = np.asarray(energy, dtype=float) @ self.y
        return out if base is None else out + np.asarray(base, dtype=float)


def extract_relaxed(sol: LpSolution, inst: Instance, tol: float = SNAP_TOL) -> RelaxedSolution:
    C, T = inst.shape
    y = np.asarray(sol.values[: C * T]).reshape(C, T)
    return RelaxedSolution(y, sol.objective, tol)
