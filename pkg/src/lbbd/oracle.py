"""Brute-force reference solver for desk-scale instances.

Every job takes every integer start time in its window.  Partial
schedules that leave the same resource profile are interchangeable for
the jobs still to come, so only the best partial objective per profile
is kept; nothing else is pruned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .cumulative import FEASIBILITY, MAKESPAN, TARDINESS, FacilitySubproblem
from .model import ASSIGN_COST, TOTAL_TARDINESS, Assignment, Instance

MAX_CELLS = 12
MAX_HORIZON = 12


class OracleGuardError(ValueError):
    pass


@dataclass
class OracleResult:
    optimum: int | None  # None means infeasible
    assignment: Assignment | None = None
    starts: dict[int, int] = field(default_factory=dict)
    enumerated_count: int = 0

    @property
    def feasible(self) -> bool:
        return self.optimum is not None


def oracle_subproblem(sp: FacilitySubproblem) -> OracleResult:
    """Exact optimum of a single-facility subproblem by enumeration."""
    H = sp.horizon
    windows = sp.deadlines and sp.objective != TARDINESS
    width = H + max((t.proc for t in sp.tasks), default=0) + 1
    # profile -> (partial objective, starts)
    states: dict[tuple, tuple[int, tuple]] = {(0,) * width: (0, ())}
    count = 0
    for t in sp.tasks:
        hi = min(H, t.due - t.proc) if windows else H
        nxt: dict[tuple, tuple[int, tuple]] = {}
        for prof, (val, starts) in states.items():
            for s in range(t.release, hi + 1):
                count += 1
                new = list(prof)
                ok = True
                for u in range(s, s + t.proc):
                    new[u] += t.demand
                    if new[u] > sp.capacity:
                        ok = False
                        break
                if not ok:
                    continue
                end = s + t.proc
                if sp.objective == TARDINESS:
                    nval = val + max(0, end - t.due)
                elif sp.objective == MAKESPAN:
                    nval = max(val, end)
                else:
                    nval = 0
                key = tuple(new)
                if key not in nxt or nval < nxt[key][0]:
                    nxt[key] = (nval, starts + ((t.id, s),))
        states = nxt
        if not states:
            return OracleResult(None, enumerated_count=count)
    val, starts = min(states.values(), key=lambda vs: (vs[0], vs[1]))
    if sp.objective == FEASIBILITY:
        val = 0
    return OracleResult(val, starts=dict(starts), enumerated_count=count)


def _sub_objective(objective: str) -> str:
    if objective == ASSIGN_COST:
        return FEASIBILITY
    if objective == TOTAL_TARDINESS:
        return TARDINESS
    return MAKESPAN


class FacilityValues:
    """Memoized oracle values of single-facility subproblems of an instance."""

    def __init__(self, instance: Instance, objective: str | None = None):
        self.instance = instance
        self.objective = objective or _sub_objective(instance.objective)
        self._memo: dict[tuple, OracleResult] = {}

    def result(self, i: int, job_ids) -> OracleResult:
        key = (i, frozenset(job_ids))
        if key not in self._memo:
            sp = FacilitySubproblem.from_instance(self.instance, i, key[1], self.objective)
            if any(t.demand > sp.capacity for t in sp.tasks):
                self._memo[key] = OracleResult(None)
            else:
                self._memo[key] = oracle_subproblem(sp)
        return self._memo[key]

    def value(self, i: int, job_ids) -> int | None:
        return self.result(i, job_ids).optimum


def all_assignments(instance: Instance):
    fids = instance.facility_ids
    jids = instance.job_ids
    for combo in itertools.product(fids, repeat=len(jids)):
        yield Assignment(dict(zip(jids, combo)))


def check_guard(instance: Instance) -> None:
    if instance.n * instance.m > MAX_CELLS or instance.horizon > MAX_HORIZON:
        raise OracleGuardError(
            f"oracle limited to n*m <= {MAX_CELLS} and horizon <= {MAX_HORIZON}; "
            f"got n*m = {instance.n * instance.m}, horizon = {instance.horizon}"
        )


def evaluate(instance: Instance, assignment: Assignment, values: FacilityValues) -> int | None:
    """Objective of the best schedule under a fixed assignment, None if infeasible."""
    parts = assignment.partition(instance.facility_ids)
    per = []
    for i, jobs in parts.items():
        v = values.value(i, jobs)
        if v is None:
            return None
        per.append(v)
    if instance.objective == ASSIGN_COST:
        return sum(instance.assign_cost(i, j) for j, i in assignment.facility_of.items())
    if instance.objective == TOTAL_TARDINESS:
        return sum(per)
    return max(per, default=0)


def oracle_solve(instance: Instance) -> OracleResult:
    """Exact optimum over all m**n assignments."""
    check_guard(instance)
    values = FacilityValues(instance)
    best: OracleResult = OracleResult(None)
    count = 0
    for a in all_assignments(instance):
        count += 1
        v = evaluate(instance, a, values)
        if v is not None and (best.optimum is None or v < best.optimum):
            best = OracleResult(v, a)
    if best.assignment is not None:
        for i, jobs in best.assignment.partition(instance.facility_ids).items():
            best.starts.update(values.result(i, jobs).starts)
    best.enumerated_count = count
    return best
