"""Acceptance criteria 1-8, one PASS/FAIL line each.

Every solve in the batches below goes through the same record, so the
per-solve invariants (criteria 2, 4, 7) are checked on the union of the
small oracle batch and the large C=50, T=96 batch.  The default LP solver
returns vertices, which rarely need any line moves, so each batch is also
re-solved from a non-vertex optimum ("barycentric") to exercise the
vertex reduction.
"""

from __future__ import annotations

import itertools
import subprocess
import sys
import time
from dataclasses import dataclass

import numpy as np
import pytest

from heatpeak import Converter, GenProfile, Instance, ObjectiveKind, approximate_solve, build_graph, check_feasible, exact_solve
from heatpeak import generate_planted
from heatpeak.cli import main
from heatpeak.instance import load_profile, prefix_bounds
from conftest import ACCEPTANCE_LINES

TOL = 1e-6
CONSERVATION_TOL = 1e-9
KINDS = list(ObjectiveKind)


@dataclass(frozen=True)
class BatchConfig:
    n_small: int = 500
    small_C: tuple = (1, 2, 3)
    small_T: tuple = (2, 3, 4, 5)
    reduction_stride: int = 2  # every n-th small instance is also solved from a non-vertex optimum
    n_large: int = 20
    large_shape: tuple = (50, 96)
    large_reduction_seeds: tuple = (0, 1)
    time_limit_small: float = 60.0
    time_limit_large: float = 5.0
    n_relative: int = 200


CFG = BatchConfig()


def report(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def solve_record(inst, kind, method="highs"):
    """Solve once and measure every per-solve invariant."""
    t0 = time.perf_counter()
    res = approximate_solve(inst, kind, method=method)
    elapsed = time.perf_counter() - t0
    y, z, x = res.relaxed, res.forest, res.x
    px = np.cumsum(x, axis=1)
    E = inst.max_energy
    base = np.zeros(inst.horizon) if kind is ObjectiveKind.BASIC else [float(v) for v in inst.base_load]
    totals_x = np.array([float(v) for v in load_profile(inst, x, kind)])
    red = res.reduction
    C, T = inst.shape
    return {
        "kind": kind,
        "method": method,
        "E": E,
        "m_A": res.objective,
        "m_LP": res.lp_bound,
        "feasible": check_feasible(inst, x),
        "sandwich": bool(((y.prefix_floor() <= px) & (px <= y.prefix_ceil())).all()),
        "deviation": float(np.abs(totals_x - y.totals(inst.energies, base)).max()),
        "moves": red.moves,
        "move_limit": 2 * C * T,
        "phi_decreasing": all(a > b for a, b in zip(red.potentials, red.potentials[1:])),
        "forest": build_graph(z).is_forest(),
        "conservation": float(np.abs(z.totals(inst.energies) - y.totals(inst.energies)).max()),
        "seconds": elapsed,
    }


def small_instance(seed):
    C = CFG.small_C[seed % len(CFG.small_C)]
    T = CFG.small_T[(seed // len(CFG.small_C)) % len(CFG.small_T)]
    base = "diurnal" if seed % 2 else "zero"
    return generate_planted(C, T, seed, GenProfile(base=base))[0]


@pytest.fixture(scope="module")
def small_batch():
    records = []
    t0 = time.perf_counter()
    for seed in range(CFG.n_small):
        inst = small_instance(seed)
        for kind in KINDS:
            rec = solve_record(inst, kind)
            exact = exact_solve(inst, kind).value
            rec["gap_oracle"] = float(rec["m_A"] - exact)
            records.append(rec)
    elapsed = time.perf_counter() - t0
    for seed in range(0, CFG.n_small, CFG.reduction_stride):
        inst = small_instance(seed)
        for kind in KINDS:
            rec = solve_record(inst, kind, "barycentric")
            rec["gap_oracle"] = float(rec["m_A"] - exact_solve(inst, kind).value)
            records.append(rec)
    return records, elapsed


@pytest.fixture(scope="module")
def large_batch():
    C, T = CFG.large_shape
    records = []
    for seed in range(CFG.n_large):
        inst = generate_planted(C, T, 10_000 + seed, GenProfile(base="diurnal"))[0]
        for kind in KINDS:
            records.append(solve_record(inst, kind))
    for seed in CFG.large_reduction_seeds:
        inst = generate_planted(C, T, 10_000 + seed, GenProfile(base="diurnal"))[0]
        records.append(solve_record(inst, ObjectiveKind.FLUCTUATION if seed % 2 else ObjectiveKind.MAXIMAL, "barycentric"))
    return records


def test_criterion_1_error_bound_against_oracle(small_batch):
    records, elapsed = small_batch
    bad = [r for r in records if r["gap_oracle"] > r["kind"].error_factor * r["E"] + TOL]
    n_inst = CFG.n_small
    worst = max(r["gap_oracle"] / (r["kind"].error_factor * r["E"]) for r in records)
    ok = not bad and n_inst >= 500 and elapsed < CFG.time_limit_small
    report(1, ok, f"{len(records)} solves on {n_inst} instances x 4 objectives, {len(bad)} bound violations, "
                  f"worst gap/bound {worst:.3f}, default batch {elapsed:.1f}s (< {CFG.time_limit_small:.0f}s)")
    assert not bad
    assert elapsed < CFG.time_limit_small


def test_criterion_2_sandwich_and_interval_deviation(small_batch, large_batch):
    records = small_batch[0] + large_batch
    sandwich = sum(not r["sandwich"] for r in records)
    deviation = sum(r["deviation"] > r["E"] + CONSERVATION_TOL for r in records)
    infeasible = sum(not r["feasible"] for r in records)
    worst = max(r["deviation"] / r["E"] for r in records)
    ok = sandwich == deviation == infeasible == 0
    report(2, ok, f"{len(records)} solves, {sandwich} sandwich / {deviation} deviation / {infeasible} feasibility "
                  f"violations, worst deviation/E {worst:.3f}")
    assert ok


def test_criterion_3_certificate_at_scale(large_batch):
    timed = [r for r in large_batch if r["method"] == "highs"]
    bad = [r for r in large_batch if r["m_A"] - r["m_LP"] > r["kind"].error_factor * r["E"] + TOL]
    slow = [r for r in timed if r["seconds"] >= CFG.time_limit_large]
    C, T = CFG.large_shape
    ok = not bad and not slow and len(timed) >= 20
    report(3, ok, f"C={C}, T={T}: {len(large_batch)} solves, {len(bad)} certificate violations, "
                  f"slowest default solve {max(r['seconds'] for r in timed):.2f}s (< {CFG.time_limit_large:.0f}s)")
    assert not bad
    assert not slow


def test_criterion_4_reduction_terminates(small_batch, large_batch):
    records = small_batch[0] + large_batch
    over = sum(r["moves"] > r["move_limit"] for r in records)
    flat = sum(not r["phi_decreasing"] for r in records)
    not_forest = sum(not r["forest"] for r in records)
    total_moves = sum(r["moves"] for r in records)
    ok = over == flat == not_forest == 0
    report(4, ok, f"{len(records)} reductions, {total_moves} line moves, {over} over 2CT, {flat} non-decreasing "
                  f"potentials, {not_forest} non-forest results, max moves/2CT "
                  f"{max(r['moves'] / r['move_limit'] for r in records):.3f}")
    assert ok
    assert total_moves > 0, "no solve exercised the vertex reduction"


def random_bounds_instance(C, T, rng):
    """Instance with time-varying buffer limits; may be infeasible."""
    convs = []
    for _ in range(C):
        H = int(rng.integers(1, 4))
        s0 = int(rng.integers(0, 4))
        lower = [s0] + rng.integers(0, 3, T).tolist()
        upper = [s0] + (np.array(lower[1:]) + rng.integers(0, 2 * H + 1, T)).tolist()
        convs.append(Converter(int(rng.choice([-2, 1, 3])), H, rng.integers(0, H + 1, T).tolist(), lower, upper))
    return Instance(T, [0] * T, convs)


def test_criterion_5_reformulation_equivalence():
    rng = np.random.default_rng(5)
    shapes = [(C, T) for C in range(1, 13) for T in range(1, 13) if C * T <= 12]
    n_inst = n_sched = mismatches = 0
    for C, T in shapes:
        for rep in range(2):
            for inst in (generate_planted(C, T, 1000 * C + 10 * T + rep)[0], random_bounds_instance(C, T, rng)):
                bounds = prefix_bounds(inst)
                n_inst += 1
                for bits in itertools.product((0, 1), repeat=C * T):
                    x = np.array(bits).reshape(C, T)
                    n_sched += 1
                    mismatches += check_feasible(inst, x) != bounds.admits(x)
    ok = mismatches == 0
    report(5, ok, f"{n_inst} instances over all {len(shapes)} shapes with C*T <= 12, "
                  f"{n_sched} schedules enumerated, {mismatches} mismatches")
    assert ok


def test_criterion_6_relative_error():
    profile = GenProfile(positive_only=True, force_run=True)
    ratios = []
    for seed in range(CFG.n_relative):
        C = CFG.small_C[seed % 3]
        T = CFG.small_T[(seed // 3) % 4]
        inst = generate_planted(C, T, 50_000 + seed, profile)[0]
        assert all(c.energy > 0 for c in inst.converters) and all(v == 0 for v in inst.base_load)
        assert all(c.soc_lower[-1] > c.soc_upper[0] for c in inst.converters)
        kind = ObjectiveKind.MAXIMAL
        m_O = exact_solve(inst, kind).value
        m_A = approximate_solve(inst, kind).objective
        ratios.append(float(m_A) / float(m_O))
    bad = sum(r > 2 + TOL for r in ratios)
    report(6, bad == 0, f"{len(ratios)} instances (E > 0, zero base load, every converter must run), "
                        f"{bad} with m^A/m^O > 2, worst ratio {max(ratios):.3f}")
    assert bad == 0


def test_criterion_7_conservation(small_batch, large_batch):
    records = small_batch[0] + large_batch
    worst = max(r["conservation"] for r in records)
    moved = [r for r in records if r["moves"]]
    bad = sum(r["conservation"] > CONSERVATION_TOL for r in records)
    report(7, bad == 0, f"{len(records)} reductions ({len(moved)} with line moves), {bad} over {CONSERVATION_TOL:g}, "
                        f"worst drift {worst:.2e}")
    assert bad == 0


def test_criterion_8_determinism(tmp_path):
    runs = []
    cases = [("zero", "maximal", "highs"), ("diurnal", "fluctuation", "barycentric"), ("diurnal", "absolute", "simplex")]
    identical = 0
    for i, (profile, kind, method) in enumerate(cases):
        inst = tmp_path / f"inst{i}.json"
        main(["gen", "--C", "3", "--T", "8", "--seed", str(i), "--profile", profile, "-o", str(inst)])
        outs = []
        for rep in range(2):
            out = tmp_path / f"solve{i}_{rep}.json"
            main(["solve", str(inst), "--objective", kind, "--lp-solver", method, "--trace", "-o", str(out)])
            outs.append(out.read_bytes())
        # a fresh interpreter must agree too
        proc = subprocess.run(
            [sys.executable, "-m", "heatpeak.cli", "solve", str(inst), "--objective", kind, "--lp-solver", method, "--trace"],
            capture_output=True, check=True,
        )
        outs.append(proc.stdout)
        runs.append(outs)
        identical += len(set(outs)) == 1
    ok = identical == len(cases)
    report(8, ok, f"{identical}/{len(cases)} solve configurations byte-identical across 2 in-process runs "
                  f"and 1 fresh process")
    assert ok
