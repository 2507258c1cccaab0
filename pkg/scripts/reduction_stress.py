"""Drive the vertex reduction from non-vertex optima and report moves, potentials and drift.

    python3 scripts/reduction_stress.py --C 20 --T 48 --seeds 5
"""

from __future__ import annotations

import argparse
from dataclasses import dataclass

import numpy as np

from heatpeak import GenProfile, ObjectiveKind, approximate_solve, generate_planted


@dataclass
class StressConfig:
    C: int = 20
    T: int = 48
    seeds: int = 5
    kind: ObjectiveKind = ObjectiveKind.FLUCTUATION


def run(cfg: StressConfig):
    print(f"{'seed':>5} {'phi0':>6} {'moves':>6} {'2CT':>6} {'max cycle':>9} {'drift':>9}")
    for seed in range(cfg.seeds):
        inst = generate_planted(cfg.C, cfg.T, seed, GenProfile(base="diurnal"))[0]
        res = approximate_solve(inst, cfg.kind, method="barycentric")
        red = res.reduction
        drift = np.abs(res.forest.totals(inst.energies) - res.relaxed.totals(inst.energies)).max()
        longest = max(red.cycle_lengths, default=0)
        print(f"{seed:>5} {red.potentials[0]:>6} {red.moves:>6} {2 * cfg.C * cfg.T:>6} {longest:>9} {drift:>9.1e}")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--C", type=int, default=20)
    p.add_argument("--T", type=int, default=48)
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--objective", choices=[k.value for k in ObjectiveKind], default="fluctuation")
    a = p.parse_args()
    run(StressConfig(a.C, a.T, a.seeds, ObjectiveKind(a.objective)))


if __name__ == "__main__":
    main()
