"""Random instances with a planted feasible schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .instance import Converter, Instance


@dataclass(frozen=True)
class GenProfile:
    base: str = "zero"  # "zero" | "diurnal"
    positive_only: bool = False
    force_run: bool = False  # every buffer must end above its initial level
    run_prob: float = 0.5

    def __post_init__(self):
        if self.base not in ("zero", "diurnal"):
            raise ValueError(f"unknown base-load profile {self.base!r}")


def generate_planted(C: int, T: int, seed: int, profile: GenProfile = GenProfile()) -> tuple[Instance, np.ndarray]:
    """Instance plus the schedule it was built around (which is always feasible)."""
    if C < 1 or T < 1:
        raise ValueError("C and T must be positive")
    rng = np.random.default_rng(seed)
    energy_choices = [1, 2, 3] if profile.positive_only else [-3, -2, -1, 1, 2, 3]
    convs, planted = [], []
    for c in range(C):
        H = int(rng.integers(1, 4))
        E = int(rng.choice(energy_choices))
        cap = int(rng.integers(H, 3 * H + 1))
        s0 = int(rng.integers(0, cap if profile.force_run else cap + 1))
        x = (rng.random(T) < profile.run_prob).astype(np.int64)
        if profile.force_run and not x.any():
            x[int(rng.integers(0, T))] = 1
        demand = _draw_demand(rng, x, H, cap, s0)
        if profile.force_run:
            for _ in range(50):
                if s0 + H * int(x.sum()) - sum(demand) > s0:
                    break
                demand = _draw_demand(rng, x, H, cap, s0)
            else:
                demand = _draw_demand(rng, x, H, cap, s0, minimal=True)
        lower = [s0] + [0] * T
        upper = [s0] + [cap] * T
        if profile.force_run:
            lower[T] = s0 + 1
        convs.append(Converter(E, H, demand, lower, upper, id=f"c{c + 1}"))
        planted.append(x)
    if profile.base == "diurnal":
        amp = float(rng.uniform(0.5, 2.0)) * C
        offset = float(rng.uniform(-1.0, 1.0)) * C
        phase = float(rng.uniform(0, 2 * math.pi))
        base = [Fraction(f"{amp * math.sin(2 * math.pi * t / 24 + phase) + offset:.2f}") for t in range(T)]
        base = [int(v) if v.denominator == 1 else v for v in base]
    else:
        base = [0] * T
    return Instance(T, base, convs), np.array(planted, dtype=np.int64)


def _draw_demand(rng, x, H, cap, s0, minimal=False):
    s = s0
    demand = []
    for bit in x:
        avail = s + H * int(bit)
        lo = max(0, avail - cap)
        d = lo if minimal else int(rng.integers(lo, avail + 1))
        demand.append(d)
        s = avail - d
    return demand


def generate_instance(C: int, T: int, seed: int, profile: GenProfile = GenProfile()) -> Instance:
    return generate_planted(C, T, seed, profile)[0]
