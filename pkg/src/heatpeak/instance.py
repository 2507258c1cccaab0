"""Fleet model: converters with heat buffers, prefix-bound reformulation, objectives.

Numbers are kept in whatever form they arrive.  ``fractions.Fraction`` values
give exact bound arithmetic; floats fall back to a snap tolerance when taking
floors and ceilings.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Real
from typing import Sequence

import numpy as np

FLOAT_SNAP_TOL = 1e-9


class InfeasibleError(Exception):
    """The instance (or its relaxation) admits no feasible schedule."""


class ObjectiveKind(enum.Enum):
    BASIC = "basic"
    MAXIMAL = "maximal"
    ABSOLUTE = "absolute"
    FLUCTUATION = "fluctuation"

    @property
    def error_factor(self) -> int:
        """Multiple of ``max |E_c|`` bounding the absolute approximation error."""
        return 2 if self is ObjectiveKind.FLUCTUATION else 1


@dataclass(frozen=True)
class Converter:
    """One on/off heat converter with its own buffer.

    ``soc_lower``/``soc_upper`` have ``T + 1`` entries; index 0 is the state
    at the start of the horizon and must be pinned (lower == upper).
    """

    energy: Real
    heat: Real
    demand: tuple
    soc_lower: tuple
    soc_upper: tuple
    id: str = ""

    def __post_init__(self):
        for name in ("demand", "soc_lower", "soc_upper"):
            object.__setattr__(self, name, tuple(getattr(self, name)))


@dataclass(frozen=True)
class Instance:
    horizon: int
    base_load: tuple
    converters: tuple

    def __post_init__(self):
        object.__setattr__(self, "base_load", tuple(self.base_load))
        object.__setattr__(self, "converters", tuple(self.converters))

    @property
    def n_converters(self) -> int:
        return len(self.converters)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.converters), self.horizon)

    @property
    def energies(self) -> np.ndarray:
        return np.array([float(c.energy) for c in self.converters])

    @property
    def max_energy(self) -> float:
        """``E = max_c |E_c|``, the unit of the approximation guarantee."""
        return float(max(abs(c.energy) for c in self.converters))

    def with_base_load(self, base_load: Sequence[Real]) -> "Instance":
        return Instance(self.horizon, tuple(base_load), self.converters)

    def without_base_load(self) -> "Instance":
        return self.with_base_load((0,) * self.horizon)


@dataclass(frozen=True)
class PrefixBounds:
    """Integral bounds ``lower[c, t] <= sum_{i<=t} x[c, i] <= upper[c, t]``.

    Column ``t`` (0-based) refers to the prefix ending at interval ``t + 1``.
    """

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        for name in ("lower", "upper"):
            arr = np.array(getattr(self, name), dtype=np.int64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.lower.shape

    def violations(self) -> list[tuple[int, int]]:
        """Cells where the lower bound exceeds the upper bound."""
        return [tuple(map(int, ct)) for ct in np.argwhere(self.lower > self.upper)]

    def is_feasible(self) -> bool:
        return not (self.lower > self.upper).any()

    def admits(self, x) -> bool:
        prefix = np.cumsum(np.asarray(x), axis=1)
        return bool(((self.lower <= prefix) & (prefix <= self.upper)).all())


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    advisories: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def __bool__(self) -> bool:
        return self.ok


def validate_instance(inst: Instance) -> ValidationReport:
    report = ValidationReport()
    T = inst.horizon
    if not isinstance(T, int) or T < 1:
        report.errors.append(f"horizon must be a positive integer, got {T!r}")
        return report
    if len(inst.converters) < 1:
        report.errors.append("instance has no converters")
    if len(inst.base_load) != T:
        report.errors.append(f"base_load has {len(inst.base_load)} entries, expected {T}")
    for c, conv in enumerate(inst.converters):
        where = f"converter {c}" + (f" ({conv.id})" if conv.id else "")
        if conv.energy == 0:
            report.errors.append(f"{where}: electricity E_c is zero")
            report.advisories.append(
                f"{where}: zero-electricity converters do not affect any objective; "
                "split them off with split_zero_energy() and schedule them independently"
            )
        if not conv.heat > 0:
            report.errors.append(f"{where}: heat H_c must be positive, got {conv.heat}")
        if len(conv.demand) != T:
            report.errors.append(f"{where}: demand has {len(conv.demand)} entries, expected {T}")
        elif any(d < 0 for d in conv.demand):
            report.errors.append(f"{where}: negative demand")
        for name in ("soc_lower", "soc_upper"):
            if len(getattr(conv, name)) != T + 1:
                report.errors.append(
                    f"{where}: {name} has {len(getattr(conv, name))} entries, expected {T + 1}"
                )
        if len(conv.soc_lower) == T + 1 and len(conv.soc_upper) == T + 1:
            for t, (lo, hi) in enumerate(zip(conv.soc_lower, conv.soc_upper)):
                if lo > hi:
                    report.errors.append(f"{where}: soc_lower > soc_upper at t={t + 1}")
            if conv.soc_lower[0] != conv.soc_upper[0]:
                report.errors.append(f"{where}: initial SoC not fixed (soc_lower[1] != soc_upper[1])")
    return report


def simulate_states(inst: Instance, x) -> list[list]:
    """Buffer trajectory ``s[c][t]`` for ``t = 1..T+1`` (0-based lists of length T+1)."""
    x = np.asarray(x)
    if x.shape != inst.shape:
        raise ValueError(f"schedule shape {x.shape} does not match instance {inst.shape}")
    states = []
    for c, conv in enumerate(inst.converters):
        s = conv.soc_lower[0]
        row = [s]
        for t in range(inst.horizon):
            s = s + conv.heat * _as_number(x[c, t]) - conv.demand[t]
            row.append(s)
        states.append(row)
    return states


def feasibility_violations(inst: Instance, x) -> list[tuple[int, int, str]]:
    """All ``(c, t, reason)`` triples where ``x`` breaks the model; ``t`` is 1-based."""
    x = np.asarray(x)
    if x.shape != inst.shape:
        raise ValueError(f"schedule shape {x.shape} does not match instance {inst.shape}")
    out = []
    for c, t in np.argwhere((x != 0) & (x != 1)):
        out.append((int(c), int(t) + 1, "not binary"))
    if out:
        return out
    for c, row in enumerate(simulate_states(inst, x)):
        conv = inst.converters[c]
        for t, s in enumerate(row):
            if _exceeds(conv.soc_lower[t], s):
                out.append((c, t + 1, f"state {s} below lower bound {conv.soc_lower[t]}"))
            elif _exceeds(s, conv.soc_upper[t]):
                out.append((c, t + 1, f"state {s} above upper bound {conv.soc_upper[t]}"))
    return out


def check_feasible(inst: Instance, x) -> bool:
    return not feasibility_violations(inst, x)


def reformulate(inst: Instance) -> PrefixBounds:
    """Turn buffer limits into integral bounds on running-count prefix sums.

    Raises InfeasibleError when some lower bound exceeds its upper bound.
    """
    bounds = prefix_bounds(inst)
    bad = bounds.violations()
    if bad:
        c, t = bad[0]
        raise InfeasibleError(
            f"converter {c} cannot meet its buffer limits at t={t + 1} "
            f"(needs >= {bounds.lower[c, t]} runs, allows <= {bounds.upper[c, t]})"
        )
    return bounds


def prefix_bounds(inst: Instance) -> PrefixBounds:
    """Raw clipped bounds, without the feasibility check."""
    C, T = inst.shape
    lower = np.zeros((C, T), dtype=np.int64)
    upper = np.zeros((C, T), dtype=np.int64)
    for c, conv in enumerate(inst.converters):
        s0 = conv.soc_lower[0]
        demand_sum = 0
        for t in range(T):
            demand_sum = demand_sum + conv.demand[t]
            lo = snap_ceil(_ratio(conv.soc_lower[t + 1] - s0 + demand_sum, conv.heat))
            hi = snap_floor(_ratio(conv.soc_upper[t + 1] - s0 + demand_sum, conv.heat))
            lower[c, t] = max(0, lo)
            upper[c, t] = min(t + 1, hi)
    return PrefixBounds(lower, upper)


def load_profile(inst: Instance, x, kind: ObjectiveKind = ObjectiveKind.MAXIMAL) -> list:
    """Per-interval total ``F_t + sum_c E_c x[c, t]`` (``F`` dropped for BASIC)."""
    x = np.asarray(x)
    if x.shape != inst.shape:
        raise ValueError(f"schedule shape {x.shape} does not match instance {inst.shape}")
    base = (0,) * inst.horizon if kind is ObjectiveKind.BASIC else inst.base_load
    totals = []
    for t in range(inst.horizon):
        total = base[t]
        for c, conv in enumerate(inst.converters):
            total = total + conv.energy * _as_number(x[c, t])
        totals.append(total)
    return totals


def evaluate_objective(inst: Instance, x, kind: ObjectiveKind):
    totals = load_profile(inst, x, kind)
    if kind in (ObjectiveKind.BASIC, ObjectiveKind.MAXIMAL):
        return max(totals)
    if kind is ObjectiveKind.ABSOLUTE:
        return max(abs(v) for v in totals)
    return max(totals) - min(totals)


def split_zero_energy(inst: Instance) -> tuple[Instance | None, list[int]]:
    """Separate converters with ``E_c == 0``.

    Returns the instance restricted to nonzero-E converters (None if there are
    none left) and the indices of the removed converters in the original order.
    """
    zero = [c for c, conv in enumerate(inst.converters) if conv.energy == 0]
    if not zero:
        return inst, []
    kept = [conv for conv in inst.converters if conv.energy != 0]
    core = Instance(inst.horizon, inst.base_load, kept) if kept else None
    return core, zero


def schedule_lazily(lower, upper) -> np.ndarray:
    """Binary row with the fewest runs meeting prefix bounds, running as late as possible.

    ``lower`` is first tightened backwards so a later requirement can always be
    met one run per interval; then the converter runs at ``t`` exactly when
    skipping would let the running count fall below the tightened bound.
    """
    lower = np.asarray(lower, dtype=np.int64)
    upper = np.asarray(upper, dtype=np.int64)
    T = len(lower)
    need = lower.copy()
    for t in range(T - 2, -1, -1):
        need[t] = max(need[t], need[t + 1] - 1)
    row = np.zeros(T, dtype=np.int64)
    count = 0
    for t in range(T):
        if count < need[t]:
            row[t] = 1
            count += 1
        if count < lower[t] or count > upper[t]:
            raise InfeasibleError(f"no schedule meets the prefix bounds at t={t + 1}")
    return row


def snap_floor(v) -> int:
    if isinstance(v, (int, Fraction)):
        return math.floor(v)
    r = round(v)
    if abs(v - r) <= FLOAT_SNAP_TOL:
        return int(r)
    return math.floor(v)


def snap_ceil(v) -> int:
    if isinstance(v, (int, Fraction)):
        return math.ceil(v)
    r = round(v)
    if abs(v - r) <= FLOAT_SNAP_TOL:
        return int(r)
    return math.ceil(v)


def _exceeds(a, b) -> bool:
    """``a > b``, with the float snap tolerance unless both sides are exact."""
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        return a > b
    return a - b > FLOAT_SNAP_TOL


def _ratio(num, den):
    if isinstance(num, (int, Fraction)) and isinstance(den, (int, Fraction)):
        return Fraction(num) / den
    return num / den


def _as_number(v):
    # numpy scalars would turn Fraction arithmetic into floats
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    return v
