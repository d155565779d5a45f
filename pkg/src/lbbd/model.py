"""Instances, assignments, schedules and linear cuts, plus JSON instance I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

MAKESPAN = "makespan"
ASSIGN_COST = "cost"
TOTAL_TARDINESS = "tardiness"
OBJECTIVES = (MAKESPAN, ASSIGN_COST, TOTAL_TARDINESS)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"


class InstanceFormatError(ValueError):
    """Raised when an instance file cannot be parsed.

    ``locus`` names the offending field (``jobs[2].proc``) or the
    ``line:column`` of a JSON syntax error.
    """

    def __init__(self, message: str, locus: str):
        super().__init__(f"{locus}: {message}")
        self.locus = locus


@dataclass(frozen=True)
class Facility:
    id: int
    capacity: int


@dataclass(frozen=True)
class Job:
    """A job with per-facility data.

    ``proc``, ``demand`` and ``cost`` are aligned with the instance's
    facility list (sorted by facility id).
    """

    id: int
    release: int
    due: int
    proc: tuple[int, ...]
    demand: tuple[int, ...]
    cost: tuple[int, ...]


def default_horizon(jobs: Iterable[Job]) -> int:
    jobs = list(jobs)
    if not jobs:
        return 0
    return max(j.release for j in jobs) + sum(max(j.proc, default=0) for j in jobs)


@dataclass(frozen=True)
class Instance:
    jobs: tuple[Job, ...]
    facilities: tuple[Facility, ...]
    objective: str = MAKESPAN
    horizon: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "jobs", tuple(sorted(self.jobs, key=lambda j: j.id)))
        object.__setattr__(
            self, "facilities", tuple(sorted(self.facilities, key=lambda f: f.id))
        )
        if self.horizon is None:
            object.__setattr__(self, "horizon", default_horizon(self.jobs))

    @cached_property
    def _fpos(self) -> dict[int, int]:
        return {f.id: k for k, f in enumerate(self.facilities)}

    @cached_property
    def _jobs_by_id(self) -> dict[int, Job]:
        return {j.id: j for j in self.jobs}

    @property
    def n(self) -> int:
        return len(self.jobs)

    @property
    def m(self) -> int:
        return len(self.facilities)

    @property
    def job_ids(self) -> list[int]:
        return [j.id for j in self.jobs]

    @property
    def facility_ids(self) -> list[int]:
        return [f.id for f in self.facilities]

    def job(self, j: int) -> Job:
        return self._jobs_by_id[j]

    def facility(self, i: int) -> Facility:
        return self.facilities[self._fpos[i]]

    def p(self, i: int, j: int) -> int:
        return self._jobs_by_id[j].proc[self._fpos[i]]

    def c(self, i: int, j: int) -> int:
        return self._jobs_by_id[j].demand[self._fpos[i]]

    def assign_cost(self, i: int, j: int) -> int:
        return self._jobs_by_id[j].cost[self._fpos[i]]

    def energy(self, i: int, j: int) -> int:
        return self.p(i, j) * self.c(i, j)

    @property
    def has_deadlines(self) -> bool:
        """Due dates are hard deadlines for makespan and cost objectives."""
        return self.objective != TOTAL_TARDINESS

    def assignable(self, i: int, j: int) -> bool:
        if self.c(i, j) > self.facility(i).capacity:
            return False
        if self.has_deadlines:
            job = self._jobs_by_id[j]
            return job.release + self.p(i, j) <= job.due
        return True

    def with_objective(self, objective: str) -> Instance:
        return Instance(self.jobs, self.facilities, objective, self.horizon)


@dataclass(frozen=True, eq=True)
class Assignment:
    """Total map from job id to facility id."""

    facility_of: Mapping[int, int]

    def __post_init__(self):
        object.__setattr__(self, "facility_of", dict(sorted(self.facility_of.items())))

    def __hash__(self):
        return hash(tuple(self.facility_of.items()))

    def jobs_on(self, i: int) -> list[int]:
        return [j for j, f in self.facility_of.items() if f == i]

    def partition(self, facility_ids: Iterable[int]) -> dict[int, list[int]]:
        """J_i for every facility, empty lists included."""
        out: dict[int, list[int]] = {i: [] for i in facility_ids}
        for j, i in self.facility_of.items():
            out[i].append(j)
        return out

    def x(self, i: int, j: int) -> int:
        return int(self.facility_of.get(j) == i)


@dataclass(frozen=True)
class ScheduleOutcome:
    status: str
    value: int | None = None
    starts: Mapping[int, int] | None = None

    @property
    def feasible(self) -> bool:
        return self.status == OPTIMAL


# Master-variable keys.
def X(i: int, j: int) -> tuple:
    return ("X", i, j)


def Mvar(i: int) -> tuple:
    return ("M", i)


def Tvar(i: int) -> tuple:
    return ("T", i)


def That(i: int, k: int) -> tuple:
    return ("That", i, k)


Z = ("Z",)


def key_name(key: tuple) -> str:
    return "_".join(str(part) for part in key)


@dataclass(frozen=True)
class LinearCut:
    """``sum(coeffs[k] * var[k]) >= rhs`` over master variables."""

    coeffs: Mapping[tuple, Fraction]
    rhs: Fraction
    tag: str
    facility: int | None = field(default=None, compare=False)

    def lhs(self, values: Mapping[tuple, object]) -> Fraction:
        return sum((a * values.get(k, 0) for k, a in self.coeffs.items()), Fraction(0))

    def satisfied(self, values: Mapping[tuple, object], tol: float = 0.0) -> bool:
        return self.lhs(values) >= self.rhs - tol

    def bound_on(self, var: tuple, x_values: Mapping[tuple, object]) -> Fraction:
        """Lower bound the cut imposes on ``var`` once the X values are fixed.

        Only valid for cuts whose other terms are X variables.
        """
        a = self.coeffs[var]
        rest = sum(
            (b * x_values.get(k, 0) for k, b in self.coeffs.items() if k != var),
            Fraction(0),
        )
        return (self.rhs - rest) / a

    def __str__(self):
        terms = " ".join(f"{'+' if a >= 0 else '-'}{abs(a)} {key_name(k)}" for k, a in self.coeffs.items())
        return f"[{self.tag}] {terms} >= {self.rhs}"


def assignment_values(assignment: Assignment, instance: Instance) -> dict[tuple, int]:
    return {
        X(i, j): assignment.x(i, j)
        for i in instance.facility_ids
        for j in instance.job_ids
    }


def validate(instance: Instance) -> list[str]:
    """Check instance invariants; one message per violation."""
    out: list[str] = []
    if not instance.jobs:
        out.append("instance has no jobs")
    if not instance.facilities:
        out.append("instance has no facilities")
    if instance.objective not in OBJECTIVES:
        out.append(f"unknown objective {instance.objective!r}")
    fids = instance.facility_ids
    if len(set(fids)) != len(fids):
        out.append("duplicate facility ids")
    jids = instance.job_ids
    if len(set(jids)) != len(jids):
        out.append("duplicate job ids")
    for f in instance.facilities:
        if f.capacity < 1:
            out.append(f"facility {f.id} capacity < 1")
    m = instance.m
    for job in instance.jobs:
        if job.release < 0:
            out.append(f"job {job.id} release < 0")
        for name in ("proc", "demand", "cost"):
            if len(getattr(job, name)) != m:
                out.append(f"job {job.id} {name} has {len(getattr(job, name))} entries, expected {m}")
        if any(len(getattr(job, name)) != m for name in ("proc", "demand", "cost")):
            continue
        for f, p, c in zip(instance.facilities, job.proc, job.demand):
            if p < 0:
                out.append(f"job {job.id} proc < 0 on facility {f.id}")
            if c < 0:
                out.append(f"job {job.id} demand < 0 on facility {f.id}")
            if c > f.capacity:
                out.append(f"job {job.id} unassignable to facility {f.id}: demand {c} > capacity {f.capacity}")
    if instance.jobs and not out:
        safe = default_horizon(instance.jobs)
        if instance.horizon < safe:
            out.append(f"horizon {instance.horizon} below safe bound {safe}")
    return out


def instance_to_dict(instance: Instance) -> dict:
    return {
        "facilities": [{"id": f.id, "capacity": f.capacity} for f in instance.facilities],
        "jobs": [
            {
                "id": j.id,
                "release": j.release,
                "due": j.due,
                "proc": list(j.proc),
                "demand": list(j.demand),
                "cost": list(j.cost),
            }
            for j in instance.jobs
        ],
        "objective": instance.objective,
        "horizon": instance.horizon,
    }


def _field(obj: Mapping, name: str, locus: str, kind=int):
    if not isinstance(obj, Mapping):
        raise InstanceFormatError("expected an object", locus)
    if name not in obj:
        raise InstanceFormatError(f"missing required field {name!r}", f"{locus}.{name}")
    value = obj[name]
    if kind is int and (not isinstance(value, int) or isinstance(value, bool)):
        raise InstanceFormatError(f"expected integer, got {value!r}", f"{locus}.{name}")
    if kind is list:
        if not isinstance(value, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in value
        ):
            raise InstanceFormatError("expected array of integers", f"{locus}.{name}")
        return tuple(value)
    if kind is str and not isinstance(value, str):
        raise InstanceFormatError(f"expected string, got {value!r}", f"{locus}.{name}")
    return value


def instance_from_dict(data: Mapping) -> Instance:
    if not isinstance(data, Mapping):
        raise InstanceFormatError("top level must be an object", "$")
    for name in ("facilities", "jobs"):
        if name not in data:
            raise InstanceFormatError(f"missing required field {name!r}", name)
        if not isinstance(data[name], list):
            raise InstanceFormatError("expected an array", name)
    facilities = [
        Facility(_field(f, "id", f"facilities[{k}]"), _field(f, "capacity", f"facilities[{k}]"))
        for k, f in enumerate(data["facilities"])
    ]
    jobs = []
    for k, j in enumerate(data["jobs"]):
        loc = f"jobs[{k}]"
        jobs.append(
            Job(
                id=_field(j, "id", loc),
                release=_field(j, "release", loc),
                due=_field(j, "due", loc),
                proc=_field(j, "proc", loc, list),
                demand=_field(j, "demand", loc, list),
                cost=_field(j, "cost", loc, list),
            )
        )
    objective = _field(data, "objective", "$", str)
    horizon = data.get("horizon")
    if horizon is not None and (not isinstance(horizon, int) or isinstance(horizon, bool)):
        raise InstanceFormatError(f"expected integer, got {horizon!r}", "horizon")
    return Instance(tuple(jobs), tuple(facilities), objective, horizon)


def load_instance(path) -> Instance:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(exc.msg, f"line {exc.lineno}:{exc.colno}") from exc
    return instance_from_dict(data)


def save_instance(instance: Instance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(instance), indent=2) + "\n")
