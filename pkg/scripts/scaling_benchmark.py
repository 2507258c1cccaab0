"""Wall-clock time of the end-to-end solver as the fleet and horizon grow.

    python3 scripts/scaling_benchmark.py --sizes 10x24 50x96 100x96
"""

from __future__ import annotations

import argparse
import time
from dataclasses import dataclass, field

from heatpeak import GenProfile, ObjectiveKind, approximate_solve, generate_planted


@dataclass
class BenchConfig:
    sizes: list = field(default_factory=lambda: [(10, 24), (25, 48), (50, 96)])
    seeds: int = 3
    kind: ObjectiveKind = ObjectiveKind.MAXIMAL
    method: str = "highs"


def run(cfg: BenchConfig):
    print(f"{'C':>4} {'T':>4} {'seed':>5} {'seconds':>8} {'moves':>6} {'gap/bound':>9} certified")
    for C, T in cfg.sizes:
        for seed in range(cfg.seeds):
            inst = generate_planted(C, T, seed, GenProfile(base="diurnal"))[0]
            t0 = time.perf_counter()
            res = approximate_solve(inst, cfg.kind, method=cfg.method)
            dt = time.perf_counter() - t0
            ratio = res.gap / res.error_bound
            print(f"{C:>4} {T:>4} {seed:>5} {dt:>8.2f} {res.reduction.moves:>6} {ratio:>9.3f} {res.certified}")


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", nargs="+", default=None, help="CxT pairs, e.g. 50x96")
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--objective", choices=[k.value for k in ObjectiveKind], default="maximal")
    p.add_argument("--method", choices=["highs", "simplex", "barycentric"], default="highs")
    a = p.parse_args()
    cfg = BenchConfig(seeds=a.seeds, kind=ObjectiveKind(a.objective), method=a.method)
    if a.sizes:
        cfg.sizes = [tuple(int(v) for v in s.split("x")) for s in a.sizes]
    run(cfg)


if __name__ == "__main__":
    main()
