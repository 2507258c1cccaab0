"""Dense bounded-variable primal simplex with Bland's rule.

Small and slow on purpose: it is the independent second route for checking
LP optima on desk-size instances, not the production solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-10
COST_TOL = 1e-10
FEAS_TOL = 1e-8


class SimplexError(RuntimeError):
    pass


@dataclass
class SimplexResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    objective: float | None
    iterations: int


class _Tableau:
    """Columns ``0..n-1`` are structural, ``n..n+m-1`` artificial.

    Every variable lives in ``[0, ub]``; nonbasic variables sit at a bound.
    """

    def __init__(self, A, b, ub):
        m, n = A.shape
        sign = np.where(b < 0, -1.0, 1.0)
        self.tab = np.hstack([A * sign[:, None], np.eye(m)])
        self.ub = np.concatenate([ub, np.full(m, np.inf)])
        self.basis = list(range(n, n + m))
        self.at_upper = np.zeros(n + m, dtype=bool)
        self.value = np.concatenate([np.zeros(n), b * sign])
        self.n = n
        self.iterations = 0

    def run(self, cost, max_iter):
        N = self.tab.shape[1]
        while True:
            if self.iterations >= max_iter:
                raise SimplexError(f"iteration limit {max_iter} reached")
            reduced = cost - cost[self.basis] @ self.tab
            basic = np.zeros(N, dtype=bool)
            basic[self.basis] = True
            entering = -1
            for j in range(N):
                if basic[j] or self.ub[j] == 0:
                    continue
                if not self.at_upper[j] and reduced[j] < -COST_TOL:
                    entering, direction = j, 1.0
                    break
                if self.at_upper[j] and reduced[j] > COST_TOL:
                    entering, direction = j, -1.0
                    break
            if entering < 0:
                return "optimal"
            self.iterations += 1
            if not self._step(entering, direction):
                return "unbounded"

    def _step(self, j, direction):
        col = self.tab[:, j] * direction
        best = self.ub[j]
        leave_row = -1
        leave_to_upper = False
        for i, var in enumerate(self.basis):
            a = col[i]
            if a > PIVOT_TOL:
                limit = self.value[var] / a
                to_upper = False
            elif a < -PIVOT_TOL and np.isfinite(self.ub[var]):
                limit = (self.ub[var] - self.value[var]) / -a
                to_upper = True
            else:
                continue
            limit = max(limit, 0.0)
            # Bland: among tied rows the lowest variable index leaves
            if limit < best - PIVOT_TOL or (
                leave_row >= 0 and abs(limit - best) <= PIVOT_TOL and var < self.basis[leave_row]
            ):
                best, leave_row, leave_to_upper = limit, i, to_upper
        if not np.isfinite(best):
            return False
        for i, var in enumerate(self.basis):
            self.value[var] -= best * col[i]
        self.value[j] += direction * best
        if leave_row < 0:
            self.at_upper[j] = not self.at_upper[j]
            return True
        leaving = self.basis[leave_row]
        self.value[leaving] = self.ub[leaving] if leave_to_upper else 0.0
        self.at_upper[leaving] = leave_to_upper
        self.at_upper[j] = False
        pivot = self.tab[leave_row] / self.tab[leave_row, j]
        self.tab -= np.outer(self.tab[:, j], pivot)
        self.tab[leave_row] = pivot
        self.basis[leave_row] = j
        return True


def simplex(cost, A, senses, rhs, lower, upper, max_iter=100_000) -> SimplexResult:
    """Minimise ``cost @ x`` subject to row constraints and variable bounds.

    ``senses`` holds ``"<="``, ``">="`` or ``"="`` per row.  Bounds may be
    infinite on either side.
    """
    A = np.asarray(A, dtype=float)
    cost = np.asarray(cost, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    m, n = A.shape

    # Map every original variable onto columns in [0, ub]: x = shift + sum(sign * col).
    cols, signs, owners, ubs = [], [], [], []
    shift = np.zeros(n)
    for j in range(n):
        lo, hi = lower[j], upper[j]
        if np.isfinite(lo):
            shift[j] = lo
            cols.append(A[:, j]); signs.append(1.0); owners.append(j); ubs.append(hi - lo)
        elif np.isfinite(hi):
            shift[j] = hi
            cols.append(-A[:, j]); signs.append(-1.0); owners.append(j); ubs.append(np.inf)
        else:
            cols.append(A[:, j]); signs.append(1.0); owners.append(j); ubs.append(np.inf)
            cols.append(-A[:, j]); signs.append(-1.0); owners.append(j); ubs.append(np.inf)
    n_struct = len(cols)
    for i, sense in enumerate(senses):
        if sense == "=":
            continue
        slack = np.zeros(m)
        slack[i] = 1.0 if sense == "<=" else -1.0
        cols.append(slack); signs.append(0.0); owners.append(-1); ubs.append(np.inf)
    if any(u < -FEAS_TOL for u in ubs):
        return SimplexResult("infeasible", None, None, 0)

    M = np.column_stack(cols) if cols else np.zeros((m, 0))
    b = rhs - A @ shift
    ub = np.maximum(np.array(ubs, dtype=float), 0.0)
    tab = _Tableau(M, b, ub)
    N = M.shape[1]

    phase1 = np.concatenate([np.zeros(N), np.ones(m)])
    tab.run(phase1, max_iter)
    infeas = tab.value[N:].sum()
    if infeas > FEAS_TOL * max(1.0, np.abs(b).max(initial=0.0)):
        return SimplexResult("infeasible", None, None, tab.iterations)

    tab.ub[N:] = 0.0
    tab.value[N:] = 0.0
    cost_cols = np.zeros(N + m)
    for k in range(n_struct):
        cost_cols[k] = signs[k] * cost[owners[k]]
    if tab.run(cost_cols, max_iter) == "unbounded":
        return SimplexResult("unbounded", None, None, tab.iterations)

    x = shift.copy()
    for k in range(n_struct):
        x[owners[k]] += signs[k] * tab.value[k]
    return SimplexResult("optimal", x, float(cost @ x), tab.iterations)
