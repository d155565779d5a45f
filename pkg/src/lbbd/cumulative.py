"""Exact single-facility cumulative scheduling.

Depth-first branch and bound over the order in which jobs are placed.
Each placed job starts at its earliest time-table feasible start (the
first time >= release at which its demand fits under the capacity for
its whole duration).  Enumerating every placement order this way yields
every active schedule, and makespan and total tardiness are regular
objectives, so some active schedule is optimal.  Deadlines only cap
start times, so left-shifting a feasible schedule keeps it feasible and
the same argument covers the windowed variants.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import INFEASIBLE, OPTIMAL, Instance, ScheduleOutcome

MAKESPAN = "makespan"
FEASIBILITY = "feasibility"
TARDINESS = "tardiness"


class HorizonExhausted(RuntimeError):
    """A job could not be placed before the horizon; the horizon is too small."""


@dataclass(frozen=True)
class Task:
    """A job as seen by one facility."""

    id: int
    release: int
    due: int
    proc: int
    demand: int


@dataclass(frozen=True)
class FacilitySubproblem:
    capacity: int
    tasks: tuple[Task, ...]
    objective: str
    horizon: int
    deadlines: bool = True

    @classmethod
    def from_instance(
        cls,
        instance: Instance,
        i: int,
        job_ids: Iterable[int],
        objective: str,
        deadlines: bool | None = None,
    ) -> FacilitySubproblem:
        if deadlines is None:
            deadlines = objective != TARDINESS
        tasks = tuple(
            Task(j, instance.job(j).release, instance.job(j).due, instance.p(i, j), instance.c(i, j))
            for j in sorted(job_ids)
        )
        return cls(instance.facility(i).capacity, tasks, objective, instance.horizon, deadlines)

    def restrict(self, job_ids: Iterable[int]) -> FacilitySubproblem:
        keep = set(job_ids)
        return FacilitySubproblem(
            self.capacity,
            tuple(t for t in self.tasks if t.id in keep),
            self.objective,
            self.horizon,
            self.deadlines,
        )

    def with_objective(self, objective: str, deadlines: bool | None = None) -> FacilitySubproblem:
        if deadlines is None:
            deadlines = objective != TARDINESS
        return FacilitySubproblem(self.capacity, self.tasks, objective, self.horizon, deadlines)


def schedule_value(tasks: Sequence[Task], starts, objective: str) -> int:
    if objective == TARDINESS:
        return sum(max(0, starts[t.id] + t.proc - t.due) for t in tasks)
    if objective == FEASIBILITY:
        return 0
    return max((starts[t.id] + t.proc for t in tasks), default=0)


def check_schedule(sp: FacilitySubproblem, starts) -> list[str]:
    """Violations of windows and capacity; empty when the schedule is feasible."""
    out = []
    windows = sp.deadlines and sp.objective != TARDINESS
    for t in sp.tasks:
        s = starts[t.id]
        if s < t.release:
            out.append(f"job {t.id} starts at {s} before release {t.release}")
        if windows and s + t.proc > t.due:
            out.append(f"job {t.id} ends at {s + t.proc} after deadline {t.due}")
    end = max((starts[t.id] + t.proc for t in sp.tasks), default=0)
    for time in range(end):
        load = sum(t.demand for t in sp.tasks if starts[t.id] <= time < starts[t.id] + t.proc)
        if load > sp.capacity:
            out.append(f"load {load} exceeds capacity {sp.capacity} at t={time}")
    return out


class _Search:
    def __init__(self, sp: FacilitySubproblem):
        self.sp = sp
        self.C = sp.capacity
        self.windows = sp.deadlines and sp.objective != TARDINESS
        # Branching order: smallest due date, then smallest id.
        self.tasks = sorted(sp.tasks, key=lambda t: (t.due, t.id))
        width = sp.horizon + max((t.proc for t in sp.tasks), default=0) + 1
        self.profile = [0] * width
        self.best: int | None = None
        self.best_starts: dict[int, int] | None = None
        self.starts: dict[int, int] = {}
        self.seen: dict[tuple, int] = {}

    def latest(self, t: Task) -> int:
        if self.windows:
            return min(t.due - t.proc, self.sp.horizon)
        return self.sp.horizon

    def earliest(self, t: Task) -> int | None:
        if t.proc == 0 or t.demand == 0:
            s = t.release
            return s if s <= self.latest(t) else None
        room = self.C - t.demand
        prof = self.profile
        s = t.release
        last = self.latest(t)
        while s <= last:
            for u in range(s, s + t.proc):
                if prof[u] > room:
                    s = u + 1
                    break
            else:
                return s
        return None

    def place(self, t: Task, s: int, delta: int):
        if t.demand:
            prof = self.profile
            for u in range(s, s + t.proc):
                prof[u] += delta

    def run(self):
        self.dfs(0, 0)

    def dfs(self, mask: int, partial: int):
        n = len(self.tasks)
        if mask == (1 << n) - 1:
            if self.best is None or partial < self.best:
                self.best = partial
                self.best_starts = dict(self.starts)
            return
        key = (mask, tuple(self.profile))
        prev = self.seen.get(key)
        if prev is not None and prev <= partial:
            return
        self.seen[key] = partial

        objective = self.sp.objective
        children = []
        bound = partial
        for k, t in enumerate(self.tasks):
            if mask >> k & 1:
                continue
            s = self.earliest(t)
            if s is None:
                if self.windows:
                    # The profile only grows below this node, so t can never fit.
                    return
                raise HorizonExhausted(f"job {t.id} cannot start by horizon {self.sp.horizon}")
            end = s + t.proc
            if objective == TARDINESS:
                bound += max(0, end - t.due)
            elif objective == MAKESPAN:
                bound = max(bound, end)
            children.append((k, t, s))
        if objective != FEASIBILITY and self.best is not None and bound >= self.best:
            return

        for k, t, s in children:
            end = s + t.proc
            if objective == TARDINESS:
                child = partial + max(0, end - t.due)
            elif objective == MAKESPAN:
                child = max(partial, end)
            else:
                child = 0
            self.place(t, s, t.demand)
            self.starts[t.id] = s
            self.dfs(mask | 1 << k, child)
            del self.starts[t.id]
            self.place(t, s, -t.demand)
            if objective == FEASIBILITY and self.best is not None:
                return


def solve_subproblem(sp: FacilitySubproblem) -> ScheduleOutcome:
    """Optimal schedule for one facility, or Infeasible.

    Tardiness subproblems only enforce releases, so they are always
    feasible; a job demanding more than the capacity is a ``ValueError``
    there and an immediate infeasibility otherwise.
    """
    windows = sp.deadlines and sp.objective != TARDINESS
    for t in sp.tasks:
        if t.demand > sp.capacity:
            if sp.objective == TARDINESS:
                raise ValueError(f"job {t.id} demand {t.demand} exceeds capacity {sp.capacity}")
            return ScheduleOutcome(INFEASIBLE)
        if windows and t.release + t.proc > t.due:
            return ScheduleOutcome(INFEASIBLE)
    if not sp.tasks:
        return ScheduleOutcome(OPTIMAL, 0, {})
    search = _Search(sp)
    search.run()
    if search.best is None:
        return ScheduleOutcome(INFEASIBLE)
    return ScheduleOutcome(OPTIMAL, search.best, search.best_starts)


def min_makespan_of(sp: FacilitySubproblem, job_ids: Iterable[int], deadlines: bool = True) -> ScheduleOutcome:
    """Minimum makespan of ``job_ids`` on the subproblem's facility."""
    return solve_subproblem(sp.restrict(job_ids).with_objective(MAKESPAN, deadlines))
