"""Benders cuts for the job assignment and scheduling problem.

All cuts are linear in the master variables and are returned as
:class:`LinearCut` with exact rational coefficients.  Supports are
reduced by removing jobs one at a time (ascending id) and re-solving.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .cumulative import FEASIBILITY, MAKESPAN, TARDINESS, FacilitySubproblem, solve_subproblem
from .model import Instance, LinearCut, Mvar, ScheduleOutcome, Tvar, X

NOGOOD_MAKESPAN = "NogoodMakespan"
ANALYTIC_DEADLINE = "AnalyticDeadline"
ANALYTIC_RELEASE = "AnalyticRelease"
FEASIBILITY_NOGOOD = "FeasibilityNogood"
NOGOOD_TARDINESS = "NogoodTardiness"
ANALYTIC_TARDINESS = "AnalyticTardiness"

OPTIMALITY_TAGS = (NOGOOD_MAKESPAN, ANALYTIC_DEADLINE, ANALYTIC_RELEASE, NOGOOD_TARDINESS, ANALYTIC_TARDINESS)

# Exhaustive validation of an analytic tardiness cut costs 2**|J_i| solves.
ANALYTIC_TARDINESS_MAX_JOBS = 10


class Resolver:
    """Memoized subproblem solves for one instance (the re-solve handle)."""

    def __init__(self, instance: Instance):
        self.instance = instance
        self._memo: dict[tuple, ScheduleOutcome] = {}
        self.solves = 0

    def solve(self, i: int, job_ids: Iterable[int], objective: str, deadlines: bool | None = None) -> ScheduleOutcome:
        jobs = frozenset(job_ids)
        if deadlines is None:
            deadlines = objective != TARDINESS
        key = (i, jobs, objective, deadlines)
        out = self._memo.get(key)
        if out is None:
            self.solves += 1
            sp = FacilitySubproblem.from_instance(self.instance, i, jobs, objective, deadlines)
            out = solve_subproblem(sp)
            self._memo[key] = out
        return out


def _greedy_removal(jobs: Sequence[int], keep_removed, multi_pass: bool) -> list[int]:
    support = sorted(jobs)
    changed = True
    while changed:
        changed = False
        for j in list(support):
            trial = [k for k in support if k != j]
            if keep_removed(trial):
                support = trial
                changed = True
        if not multi_pass:
            break
    return support


def strengthen_support_makespan(
    resolver: Resolver, i: int, jobs: Sequence[int], m_star: int, multi_pass: bool = False
) -> list[int]:
    """Drop jobs while the minimum makespan stays at ``m_star``."""

    def same(trial):
        out = resolver.solve(i, trial, MAKESPAN)
        return out.feasible and out.value == m_star

    return _greedy_removal(jobs, same, multi_pass)


def strengthen_support_infeasible(resolver: Resolver, i: int, jobs: Sequence[int], multi_pass: bool = False) -> list[int]:
    """Drop jobs while the facility stays infeasible."""
    return _greedy_removal(jobs, lambda trial: not resolver.solve(i, trial, FEASIBILITY).feasible, multi_pass)


def nogood_makespan_cut(i: int, support: Iterable[int], m_star: int) -> LinearCut:
    """Mvar(i) >= M* (1 - sum_{j in J'} (1 - X(i,j)))."""
    support = sorted(support)
    M = Fraction(m_star)
    coeffs = {Mvar(i): Fraction(1)}
    for j in support:
        coeffs[X(i, j)] = -M
    return LinearCut(coeffs, M * (1 - len(support)), NOGOOD_MAKESPAN, i)


class PreconditionError(ValueError):
    pass


def _processing_cut(var, i, support, instance, base, tag, extra=None):
    """var >= base - sum_j (p_ij + extra_j) (1 - X(i,j))."""
    coeffs = {var: Fraction(1)}
    rhs = Fraction(base)
    for j in support:
        w = Fraction(instance.p(i, j)) + (extra or {}).get(j, 0)
        if w:
            coeffs[X(i, j)] = -w
        rhs -= w
    return LinearCut(coeffs, rhs, tag, i)


def analytic_makespan_cut_deadlines(instance: Instance, i: int, support: Iterable[int], m_star: int) -> LinearCut:
    """Mvar(i) >= M* - sum p_ij (1 - X(i,j)) - (max d - min d) over J'.

    Requires every release in the support to be zero.
    """
    support = sorted(support)
    if any(instance.job(j).release != 0 for j in support):
        raise PreconditionError("deadline analytic cut needs zero release times")
    if not support:
        return LinearCut({Mvar(i): Fraction(1)}, Fraction(0), ANALYTIC_DEADLINE, i)
    dues = [instance.job(j).due for j in support]
    return _processing_cut(Mvar(i), i, support, instance, m_star - (max(dues) - min(dues)), ANALYTIC_DEADLINE)


def deadline_free(instance: Instance, i: int, jobs: Iterable[int]) -> bool:
    """True when no deadline in ``jobs`` can bind within the horizon."""
    return all(instance.job(j).due - instance.p(i, j) >= instance.horizon for j in jobs)


def analytic_makespan_cut_releases(instance: Instance, i: int, support: Iterable[int], m_star: int) -> LinearCut:
    """Mvar(i) >= M* - sum p_ij (1 - X(i,j)) - (max r - min r) over J'.

    When min r > 0 an emptied facility would still be bounded by min r,
    so each removal also gives up min_r / |J'|.
    """
    support = sorted(support)
    if not deadline_free(instance, i, support):
        raise PreconditionError("release analytic cut needs inactive deadlines")
    if not support:
        return LinearCut({Mvar(i): Fraction(1)}, Fraction(0), ANALYTIC_RELEASE, i)
    rel = [instance.job(j).release for j in support]
    extra = {}
    if min(rel) > 0:
        extra = {j: Fraction(min(rel), len(support)) for j in support}
    return _processing_cut(Mvar(i), i, support, instance, m_star - (max(rel) - min(rel)), ANALYTIC_RELEASE, extra)


def feasibility_nogood_cut(i: int, support: Iterable[int]) -> LinearCut:
    """sum_{j in J'} (1 - X(i,j)) >= 1."""
    support = sorted(support)
    if not support:
        raise PreconditionError("an empty job set is always feasible")
    coeffs = {X(i, j): Fraction(-1) for j in support}
    return LinearCut(coeffs, Fraction(1 - len(support)), FEASIBILITY_NOGOOD, i)


def _tardiness_nogood(i: int, jobs: Sequence[int], value: int) -> LinearCut:
    T = Fraction(value)
    coeffs = {Tvar(i): Fraction(1)}
    for j in jobs:
        coeffs[X(i, j)] = -T
    return LinearCut(coeffs, T * (1 - len(jobs)), NOGOOD_TARDINESS, i)


@dataclass
class TardinessNogoods:
    removable: list[int]
    cuts: list[LinearCut] = field(default_factory=list)


def tardiness_nogood_cuts(resolver: Resolver, i: int, jobs: Sequence[int]) -> TardinessNogoods:
    """The Z_i-reduced cut and the full-set cut for facility ``i``."""
    jobs = sorted(jobs)
    t_full = resolver.solve(i, jobs, TARDINESS).value
    removable = [j for j in jobs if resolver.solve(i, [k for k in jobs if k != j], TARDINESS).value == t_full]
    core = [j for j in jobs if j not in removable]
    t_core = resolver.solve(i, core, TARDINESS).value
    return TardinessNogoods(removable, [_tardiness_nogood(i, core, t_core), _tardiness_nogood(i, jobs, t_full)])


def disjunctive(instance: Instance, i: int, jobs: Iterable[int]) -> bool:
    return instance.facility(i).capacity == 1 and all(instance.c(i, j) == 1 for j in jobs)


def analytic_tardiness_cut(instance: Instance, i: int, jobs: Sequence[int], m_star: int) -> LinearCut:
    """Tvar(i) >= M* - (sum p_ij (1 - X(i,j)) + max d - min d) over J_i."""
    jobs = sorted(jobs)
    if not jobs:
        return LinearCut({Tvar(i): Fraction(1)}, Fraction(0), ANALYTIC_TARDINESS, i)
    dues = [instance.job(j).due for j in jobs]
    return _processing_cut(Tvar(i), i, jobs, instance, m_star - (max(dues) - min(dues)), ANALYTIC_TARDINESS)


def cut_holds_on_subsets(resolver: Resolver, cut: LinearCut, i: int, jobs: Sequence[int], objective: str) -> bool:
    """Check an optimality cut against every subset of ``jobs`` left on ``i``.

    Jobs outside ``jobs`` do not appear in the cut and can only raise the
    facility's optimum, so this settles validity for all assignments.
    """
    var = Mvar(i) if objective == MAKESPAN else Tvar(i)
    jobs = sorted(jobs)
    for r in range(len(jobs) + 1):
        for kept in itertools.combinations(jobs, r):
            out = resolver.solve(i, kept, objective)
            if not out.feasible:
                continue
            xs = {X(i, j): 1 for j in kept}
            if cut.bound_on(var, xs) > out.value:
                return False
    return True


@dataclass
class FacilityCuts:
    cuts: list[LinearCut]
    support: list[int]
    notes: list[str] = field(default_factory=list)


@dataclass
class CutConfig:
    analytic: bool = True
    strengthen: bool = True
    multi_pass: bool = False


def facility_cuts(
    resolver: Resolver,
    objective: str,
    i: int,
    jobs: Sequence[int],
    outcome: ScheduleOutcome,
    config: CutConfig | None = None,
) -> FacilityCuts:
    """All cuts for one facility given its subproblem outcome.

    ``objective`` is the subproblem objective (makespan, feasibility or
    tardiness).  Infeasible facilities yield a feasibility nogood.
    """
    config = config or CutConfig()
    inst = resolver.instance
    jobs = sorted(jobs)
    if not outcome.feasible:
        support = strengthen_support_infeasible(resolver, i, jobs, config.multi_pass) if config.strengthen else jobs
        return FacilityCuts([feasibility_nogood_cut(i, support)], support)
    if not jobs or objective == FEASIBILITY:
        return FacilityCuts([], [])

    if objective == MAKESPAN:
        m_star = outcome.value
        if config.strengthen:
            support = strengthen_support_makespan(resolver, i, jobs, m_star, config.multi_pass)
        else:
            support = jobs
        cuts = [nogood_makespan_cut(i, support, m_star)]
        notes = []
        if config.analytic:
            if all(inst.job(j).release == 0 for j in support):
                cuts.append(analytic_makespan_cut_deadlines(inst, i, support, m_star))
            elif deadline_free(inst, i, support):
                cuts.append(analytic_makespan_cut_releases(inst, i, support, m_star))
            else:
                notes.append(f"facility {i}: no analytic makespan cut (releases and deadlines both active)")
        return FacilityCuts(cuts, support, notes)

    # Tardiness.
    if config.strengthen:
        nog = tardiness_nogood_cuts(resolver, i, jobs)
        cuts = list(nog.cuts)
        support = [j for j in jobs if j not in nog.removable]
    else:
        cuts = [_tardiness_nogood(i, jobs, outcome.value)]
        support = jobs
    notes = []
    if config.analytic:
        if not disjunctive(inst, i, jobs):
            notes.append(f"facility {i}: analytic tardiness cut skipped (not disjunctive)")
        elif len(jobs) > ANALYTIC_TARDINESS_MAX_JOBS:
            notes.append(f"facility {i}: analytic tardiness cut skipped (too many jobs to validate)")
        else:
            m_star = resolver.solve(i, jobs, MAKESPAN, deadlines=False).value
            cut = analytic_tardiness_cut(inst, i, jobs, m_star)
            if cut_holds_on_subsets(resolver, cut, i, jobs, TARDINESS):
                cuts.append(cut)
            else:
                notes.append(f"facility {i}: analytic tardiness cut rejected by validation")
    return FacilityCuts(cuts, support, notes)
