"""Randomised invariants over generated instances."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from heatpeak import GenProfile, ObjectiveKind, RelaxedSolution, approximate_solve, build_graph, check_feasible
from heatpeak import evaluate_objective, exact_solve, generate_planted, reduce_to_forest, reformulate
from heatpeak.relaxation import build_relaxation, solve_lp

kinds = st.sampled_from(list(ObjectiveKind))
small = st.tuples(st.integers(1, 3), st.integers(1, 5), st.integers(0, 10**6), st.sampled_from(["zero", "diurnal"]))


@settings(max_examples=60, deadline=None)
@given(small, kinds, st.sampled_from(["highs", "barycentric"]))
def test_solve_is_feasible_and_certified(params, kind, method):
    C, T, seed, base = params
    inst, _ = generate_planted(C, T, seed, GenProfile(base=base))
    res = approximate_solve(inst, kind, method=method)
    assert check_feasible(inst, res.x) and res.certified


@settings(max_examples=40, deadline=None)
@given(small, kinds)
def test_lp_bound_below_oracle_below_approx(params, kind):
    C, T, seed, base = params
    inst, _ = generate_planted(C, T, seed, GenProfile(base=base))
    lp = solve_lp(build_relaxation(inst, reformulate(inst), kind))
    exact = exact_solve(inst, kind).value
    approx = approximate_solve(inst, kind).objective
    assert lp.objective <= float(exact) + 1e-7
    assert exact <= approx
    assert float(approx - exact) <= kind.error_factor * inst.max_energy + 1e-6


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 6), st.integers(0, 10**6))
def test_planted_schedule_meets_prefix_bounds(C, T, seed):
    inst, x = generate_planted(C, T, seed)
    assert reformulate(inst).admits(x)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 4).flatmap(lambda C: st.tuples(
        st.just(C),
        st.lists(st.sampled_from([-3.0, -2.0, -1.0, 1.0, 2.0, 3.0]), min_size=C, max_size=C),
    )),
    st.integers(1, 7),
    st.integers(0, 10**6),
)
def test_reduction_on_arbitrary_fractional_points(shape, T, seed):
    C, energy = shape
    rng = np.random.default_rng(seed)
    y = RelaxedSolution(rng.choice([0.0, 0.2, 0.5, 0.7, 1.0], size=(C, T)))
    red = reduce_to_forest(y, energy)
    z = red.solution
    assert build_graph(z).is_forest()
    assert red.moves <= 2 * C * T
    assert all(a > b for a, b in zip(red.potentials, red.potentials[1:]))
    assert np.abs(z.totals(energy) - y.totals(energy)).max() <= 1e-9


@settings(max_examples=50, deadline=None)
@given(small)
def test_absolute_dominates_maximal_for_nonnegative_loads(params):
    C, T, seed, _ = params
    inst, x = generate_planted(C, T, seed, GenProfile(positive_only=True))
    assert evaluate_objective(inst, x, ObjectiveKind.ABSOLUTE) >= evaluate_objective(inst, x, ObjectiveKind.MAXIMAL)
