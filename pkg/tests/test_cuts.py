from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import one_facility
from lbbd.cumulative import FEASIBILITY, MAKESPAN, TARDINESS
from lbbd.cuts import (
    ANALYTIC_TARDINESS,
    CutConfig,
    PreconditionError,
    Resolver,
    analytic_makespan_cut_deadlines,
    analytic_makespan_cut_releases,
    analytic_tardiness_cut,
    cut_holds_on_subsets,
    facility_cuts,
    feasibility_nogood_cut,
    nogood_makespan_cut,
    strengthen_support_infeasible,
    strengthen_support_makespan,
    tardiness_nogood_cuts,
)
from lbbd.generate import LCG
from lbbd.model import Mvar, Tvar, X


def coeffs(cut):
    return {k: v for k, v in cut.coeffs.items()}


def test_both_jobs_needed_for_makespan():
    inst = one_facility([(0, 20, 5, 1), (0, 20, 1, 1)])
    assert strengthen_support_makespan(Resolver(inst), 0, [0, 1], 6) == [0, 1]


def test_identical_parallel_jobs_reduce_to_one():
    inst = one_facility([(0, 10, 5, 1), (0, 10, 5, 1)], capacity=2)
    res = Resolver(inst)
    support = strengthen_support_makespan(res, 0, [0, 1], 5)
    assert len(support) == 1
    assert res.solve(0, support, MAKESPAN).value == 5


def test_empty_support():
    inst = one_facility([(0, 10, 5, 1)])
    assert strengthen_support_makespan(Resolver(inst), 0, [], 0) == []
    cut = nogood_makespan_cut(0, [], 0)
    assert cut.bound_on(Mvar(0), {}) == 0


def test_nogood_makespan_substitution():
    cut = nogood_makespan_cut(0, [1, 2], 7)
    # Mvar >= 7 - 7(1 - X1) - 7(1 - X2)
    assert coeffs(cut) == {Mvar(0): 1, X(0, 1): -7, X(0, 2): -7}
    assert cut.rhs == -7
    assert cut.bound_on(Mvar(0), {X(0, 1): 1, X(0, 2): 1}) == 7
    assert cut.bound_on(Mvar(0), {X(0, 1): 1}) == 0


def test_deadline_analytic_single_job():
    inst = one_facility([(0, 6, 4, 1)])
    cut = analytic_makespan_cut_deadlines(inst, 0, [0], 4)
    assert coeffs(cut) == {Mvar(0): 1, X(0, 0): -4} and cut.rhs == 0


def test_deadline_analytic_substitution():
    inst = one_facility([(0, 4, 3, 1), (0, 6, 3, 1)])
    cut = analytic_makespan_cut_deadlines(inst, 0, [0, 1], 6)
    # Mvar >= 6 - 3(1 - X0) - 3(1 - X1) - 2
    assert coeffs(cut) == {Mvar(0): 1, X(0, 0): -3, X(0, 1): -3}
    assert cut.rhs == -2


def test_deadline_analytic_needs_zero_releases():
    inst = one_facility([(1, 6, 2, 1)])
    with pytest.raises(PreconditionError):
        analytic_makespan_cut_deadlines(inst, 0, [0], 3)


def test_release_analytic_substitution():
    inst = one_facility([(0, 40, 2, 1), (5, 40, 2, 1)])
    m_star = Resolver(inst).solve(0, [0, 1], MAKESPAN).value
    assert m_star == 7
    cut = analytic_makespan_cut_releases(inst, 0, [0, 1], m_star)
    # Mvar >= 7 - 2(1 - X0) - 2(1 - X1) - 5
    assert coeffs(cut) == {Mvar(0): 1, X(0, 0): -2, X(0, 1): -2} and cut.rhs == -2


def test_release_analytic_equal_releases_has_no_spread():
    inst = one_facility([(0, 40, 2, 1), (0, 40, 3, 1)])
    cut = analytic_makespan_cut_releases(inst, 0, [0, 1], 5)
    assert cut.bound_on(Mvar(0), {X(0, 0): 1, X(0, 1): 1}) == 5
    assert cut.bound_on(Mvar(0), {X(0, 1): 1}) == 3


def test_release_analytic_empty_facility_not_overstated():
    inst = one_facility([(5, 40, 2, 1)])
    cut = analytic_makespan_cut_releases(inst, 0, [0], 7)
    assert cut.bound_on(Mvar(0), {X(0, 0): 1}) == 7
    assert cut.bound_on(Mvar(0), {}) <= 0


def _random_facility(rng, n, zero_release, deadline_free):
    jobs = []
    for _ in range(n):
        r = 0 if zero_release else rng.randint(0, 4)
        p = rng.randint(1, 4)
        d = 99 if deadline_free else r + p * rng.randint(1, 3)
        jobs.append((r, d, p, rng.randint(1, 2)))
    return one_facility(jobs, capacity=2, horizon=None if not deadline_free else 20)


@pytest.mark.parametrize("seed", range(30))
def test_analytic_makespan_cuts_valid_under_all_removals(seed):
    rng = LCG(seed)
    for zero_release in (True, False):
        inst = _random_facility(rng, rng.randint(1, 4), zero_release, not zero_release)
        res = Resolver(inst)
        jobs = inst.job_ids
        full = res.solve(0, jobs, MAKESPAN)
        if not full.feasible:
            continue
        support = strengthen_support_makespan(res, 0, jobs, full.value)
        make = analytic_makespan_cut_deadlines if zero_release else analytic_makespan_cut_releases
        cut = make(inst, 0, support, full.value)
        assert cut_holds_on_subsets(res, cut, 0, jobs, MAKESPAN)
        assert cut_holds_on_subsets(res, nogood_makespan_cut(0, support, full.value), 0, jobs, MAKESPAN)


def test_infeasible_single_job():
    inst = one_facility([(0, 2, 3, 1)])
    support = strengthen_support_infeasible(Resolver(inst), 0, [0])
    cut = feasibility_nogood_cut(0, support)
    assert support == [0]
    assert not cut.satisfied({X(0, 0): 1}) and cut.satisfied({X(0, 0): 0})


def test_pair_overloading_window():
    inst = one_facility([(0, 3, 2, 1), (0, 3, 2, 1), (0, 30, 1, 1)])
    res = Resolver(inst)
    assert res.solve(0, [0], FEASIBILITY).feasible and res.solve(0, [1], FEASIBILITY).feasible
    assert not res.solve(0, [0, 1, 2], FEASIBILITY).feasible
    support = strengthen_support_infeasible(res, 0, [0, 1, 2])
    assert support == [0, 1]
    cut = feasibility_nogood_cut(0, support)
    for x0, x1, x2 in itertools.product((0, 1), repeat=3):
        xs = {X(0, 0): x0, X(0, 1): x1, X(0, 2): x2}
        assert cut.satisfied(xs) == (not (x0 and x1))


def test_tardiness_on_time_cuts_vacuous():
    inst = one_facility([(0, 10, 2, 1), (0, 10, 3, 1)], objective="tardiness")
    nog = tardiness_nogood_cuts(Resolver(inst), 0, [0, 1])
    for cut in nog.cuts:
        assert cut.bound_on(Tvar(0), {X(0, 0): 1, X(0, 1): 1}) <= 0


def test_tardiness_removable_set():
    # A is late whatever happens, B never matters
    inst = one_facility([(0, 1, 3, 1), (0, 10, 1, 1)], capacity=2, objective="tardiness")
    res = Resolver(inst)
    nog = tardiness_nogood_cuts(res, 0, [0, 1])
    assert nog.removable == [1]
    core, full = nog.cuts
    assert set(k for k in core.coeffs if k[0] == "X") == {X(0, 0)}
    assert core.bound_on(Tvar(0), {X(0, 0): 1}) == res.solve(0, [0], TARDINESS).value == 2
    assert full.bound_on(Tvar(0), {X(0, 0): 1, X(0, 1): 1}) == 2


def test_analytic_tardiness_cut_invalid_on_late_singleton():
    inst = one_facility([(0, 3, 5, 1)], objective="tardiness")
    res = Resolver(inst)
    cut = analytic_tardiness_cut(inst, 0, [0], 5)
    assert coeffs(cut) == {Tvar(0): 1, X(0, 0): -5} and cut.rhs == 0
    assert cut.bound_on(Tvar(0), {X(0, 0): 1}) == 5
    assert res.solve(0, [0], TARDINESS).value == 2
    assert not cut_holds_on_subsets(res, cut, 0, [0], TARDINESS)
    out = facility_cuts(res, TARDINESS, 0, [0], res.solve(0, [0], TARDINESS))
    assert all(c.tag != ANALYTIC_TARDINESS for c in out.cuts)
    assert any("rejected" in n for n in out.notes)


def test_analytic_tardiness_equal_due_dates():
    inst = one_facility([(0, 4, 2, 1), (0, 4, 2, 1)], objective="tardiness")
    cut = analytic_tardiness_cut(inst, 0, [0, 1], 4)
    assert coeffs(cut) == {Tvar(0): 1, X(0, 0): -2, X(0, 1): -2} and cut.rhs == 0


def test_analytic_tardiness_skipped_when_cumulative():
    inst = one_facility([(0, 1, 3, 1), (0, 1, 3, 1)], capacity=2, objective="tardiness")
    res = Resolver(inst)
    out = facility_cuts(res, TARDINESS, 0, [0, 1], res.solve(0, [0, 1], TARDINESS))
    assert any("not disjunctive" in n for n in out.notes)


@pytest.mark.parametrize("seed", range(20))
def test_emitted_analytic_tardiness_cuts_are_valid(seed):
    rng = LCG(1000 + seed)
    jobs = []
    for _ in range(rng.randint(1, 4)):
        r = rng.randint(0, 3)
        p = rng.randint(1, 3)
        jobs.append((r, r + rng.randint(0, 6), p, 1))
    inst = one_facility(jobs, capacity=1, objective="tardiness")
    res = Resolver(inst)
    ids = inst.job_ids
    out = facility_cuts(res, TARDINESS, 0, ids, res.solve(0, ids, TARDINESS))
    for cut in out.cuts:
        assert cut_holds_on_subsets(res, cut, 0, ids, TARDINESS)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9), st.sampled_from([MAKESPAN, TARDINESS]), st.booleans())
def test_facility_cuts_valid_and_tight(seed, objective, strengthen):
    rng = LCG(seed)
    jobs = []
    for _ in range(rng.randint(1, 4)):
        r = rng.randint(0, 3)
        p = rng.randint(1, 3)
        jobs.append((r, r + p * rng.randint(1, 3), p, rng.randint(1, 2)))
    inst = one_facility(jobs, capacity=2, objective="tardiness" if objective == TARDINESS else "makespan")
    res = Resolver(inst)
    ids = inst.job_ids
    outcome = res.solve(0, ids, objective)
    out = facility_cuts(res, objective, 0, ids, outcome, CutConfig(strengthen=strengthen))
    xs = {X(0, j): 1 for j in ids}
    if not outcome.feasible:
        assert not out.cuts[0].satisfied(xs)
        return
    var = Mvar(0) if objective == MAKESPAN else Tvar(0)
    bounds = [c.bound_on(var, xs) for c in out.cuts]
    assert max(bounds) == outcome.value
    for cut in out.cuts:
        assert cut_holds_on_subsets(res, cut, 0, ids, objective)


def test_bound_on_uses_exact_fractions():
    cut = nogood_makespan_cut(0, [0], 3)
    assert isinstance(cut.bound_on(Mvar(0), {X(0, 0): 1}), Fraction)
