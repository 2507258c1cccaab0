"""Move a relaxed solution along cycle directions until its fractional part is a forest.

The non-integrality graph links each time interval ``t`` to the runs
``(c, W)`` of fractional entries of converter ``c`` that are chained by
fractional prefix sums.  A cycle in that graph gives a direction that keeps
every per-interval total fixed; stepping along it as far as the prefix box
allows makes at least one more value integral.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .relaxation import RelaxedSolution

log = logging.getLogger(__name__)

_DIR_TOL = 1e-12
REDUCTION_TOL = 1e-12


@dataclass(frozen=True)
class NonIntegralityGraph:
    """Bipartite graph between time intervals and classes ``(c, W)``.

    Class ``k`` is ``classes[k] = (c, times)``; ``time_adj[t]`` lists the
    classes containing ``t`` in increasing class order.  All indices are 0-based.
    """

    horizon: int
    classes: tuple[tuple[int, tuple[int, ...]], ...]
    time_adj: dict[int, tuple[int, ...]]

    @property
    def time_vertices(self) -> list[int]:
        return sorted(self.time_adj)

    @property
    def n_edges(self) -> int:
        return sum(len(times) for _, times in self.classes)

    def edges(self) -> list[tuple[int, int]]:
        """``(t, k)`` pairs."""
        return [(t, k) for k, (_, times) in enumerate(self.classes) for t in times]

    def is_forest(self) -> bool:
        return find_cycle(self) is None


@dataclass(frozen=True)
class CycleWitness:
    """Converters ``c_1..c_k`` and distinct times ``t_1..t_k`` (cyclic, ``t_{k+1} = t_1``).

    ``converters[i]`` has fractional entries at ``times[i]`` and
    ``times[(i + 1) % k]`` joined by fractional prefix sums.
    """

    converters: tuple[int, ...]
    times: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.times)


def build_graph(sol: RelaxedSolution) -> NonIntegralityGraph:
    C, T = sol.shape
    # Two fractional entries share a class iff no integral prefix sum lies in
    # [t1, t2); count integral prefixes strictly before each t to key the class.
    integral_prefix = (~sol.frac_prefix).astype(np.int64)
    before = np.zeros((C, T), dtype=np.int64)
    before[:, 1:] = np.cumsum(integral_prefix, axis=1)[:, :-1]
    classes = []
    time_adj: dict[int, list[int]] = {}
    for c in range(C):
        current_key, current = None, None
        for t in np.flatnonzero(sol.frac[c]):
            key = before[c, t]
            if key != current_key:
                current = []
                classes.append((c, current))
                current_key = key
            current.append(int(t))
            time_adj.setdefault(int(t), []).append(len(classes) - 1)
    return NonIntegralityGraph(
        horizon=T,
        classes=tuple((c, tuple(times)) for c, times in classes),
        time_adj={t: tuple(ks) for t, ks in sorted(time_adj.items())},
    )


def find_cycle(g: NonIntegralityGraph) -> CycleWitness | None:
    """Depth-first search for a back edge; None when ``g`` is a forest."""
    T = g.horizon
    class_adj = [times for _, times in g.classes]

    def neighbours(v):
        return [T + k for k in g.time_adj.get(v, ())] if v < T else list(class_adj[v - T])

    parent: dict[int, int] = {}
    for root in g.time_vertices:
        if root in parent:
            continue
        parent[root] = -1
        stack = [(root, iter(neighbours(root)))]
        while stack:
            v, it = stack[-1]
            for w in it:
                if w == parent[v]:
                    continue
                if w in parent:
                    return _witness(g, _cycle_path(parent, v, w))
                parent[w] = v
                stack.append((w, iter(neighbours(w))))
                break
            else:
                stack.pop()
    return None


def _cycle_path(parent, v, ancestor):
    path = [v]
    while path[-1] != ancestor:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def _witness(g, cycle):
    T = g.horizon
    start = next(i for i, v in enumerate(cycle) if v < T)
    cycle = cycle[start:] + cycle[:start]
    times = tuple(cycle[0::2])
    converters = tuple(g.classes[k - T][0] for k in cycle[1::2])
    return CycleWitness(converters, times)


def line_direction(shape, w: CycleWitness, energy) -> np.ndarray:
    """Direction ``d`` with ``energy @ d == 0`` column-wise, supported on the cycle."""
    d = np.zeros(shape)
    k = len(w)
    for i, c in enumerate(w.converters):
        d[c, w.times[i]] += 1.0 / energy[c]
        d[c, w.times[(i + 1) % k]] -= 1.0 / energy[c]
    return d


def max_step(z: RelaxedSolution, d: np.ndarray, box_lo, box_hi) -> float:
    """Largest ``alpha`` keeping ``z + alpha d`` in ``[0,1]`` with prefix sums in the box."""
    steps = []
    pos, neg = d > _DIR_TOL, d < -_DIR_TOL
    steps.append((1.0 - z.y[pos]) / d[pos])
    steps.append(z.y[neg] / -d[neg])
    D = np.cumsum(d, axis=1)
    pos, neg = D > _DIR_TOL, D < -_DIR_TOL
    steps.append((box_hi[pos] - z.prefix[pos]) / D[pos])
    steps.append((z.prefix[neg] - box_lo[neg]) / -D[neg])
    steps = np.concatenate(steps)
    return float(steps.min()) if steps.size else float("inf")


def apply_line_move(z: RelaxedSolution, w: CycleWitness, energy, box=None) -> tuple[RelaxedSolution, float]:
    """Step along the cycle direction until a box or ``[0,1]`` constraint binds.

    ``box`` is ``(lower, upper)`` on prefix sums; by default the floor/ceil of
    ``z``'s own prefix sums.  Returns the new solution and the step length.
    """
    energy = np.asarray(energy, dtype=float)
    if box is None:
        box = (z.prefix_floor(), z.prefix_ceil())
    box_lo, box_hi = box
    d = line_direction(z.shape, w, energy)
    alpha = max_step(z, d, box_lo, box_hi)
    if not np.isfinite(alpha) or alpha <= 0:
        raise RuntimeError(f"no positive step along cycle {w} (alpha={alpha}); integrality flags are inconsistent")
    y = z.y + alpha * d
    # entries that hit 0 or 1 land there exactly
    moved = np.abs(d) > _DIR_TOL
    y[moved & (np.abs(y) <= z.tol)] = 0.0
    y[moved & (np.abs(y - 1.0) <= z.tol)] = 1.0
    return RelaxedSolution(y, z.objective, z.tol), alpha


@dataclass
class Reduction:
    solution: RelaxedSolution
    potentials: list[int] = field(default_factory=list)
    cycle_lengths: list[int] = field(default_factory=list)
    alphas: list[float] = field(default_factory=list)

    @property
    def moves(self) -> int:
        return len(self.alphas)


def reduce_to_forest(y: RelaxedSolution, energy) -> Reduction:
    """Repeat cycle moves until the non-integrality graph is a forest.

    The prefix box is frozen at the floor/ceil of ``y``'s prefix sums, so the
    result stays inside the polytope around the original solution.
    """
    energy = np.asarray(energy, dtype=float)
    C, T = y.shape
    box = (y.prefix_floor(), y.prefix_ceil())
    # Only exactly binding constraints are snapped from here on; a looser
    # tolerance would round near-ties and leak into the per-interval totals.
    z = RelaxedSolution(y.y, y.objective, tol=REDUCTION_TOL)
    out = Reduction(z, potentials=[z.potential])
    while True:
        w = find_cycle(build_graph(z))
        if w is None:
            break
        before = z.potential
        z, alpha = apply_line_move(z, w, energy, box)
        after = z.potential
        log.debug("move %d: phi %d -> %d, cycle length %d, alpha %.6g", out.moves + 1, before, after, len(w), alpha)
        if after >= before:
            raise RuntimeError(f"potential did not decrease ({before} -> {after})")
        out.potentials.append(after)
        out.cycle_lengths.append(len(w))
        out.alphas.append(alpha)
        if out.moves > 2 * C * T:
            raise RuntimeError(f"more than 2CT = {2 * C * T} moves")
    out.solution = z
    return out


def potential(sol: RelaxedSolution) -> int:
    return sol.potential
