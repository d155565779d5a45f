from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import strategies as st

from lbbd.cumulative import FacilitySubproblem, Task
from lbbd.model import Facility, Instance, Job

INSTANCES = Path(__file__).resolve().parent.parent / "instances"


def one_facility(jobs, capacity=1, objective="makespan", horizon=None) -> Instance:
    """jobs: (release, due, proc, demand[, cost]) tuples on a single facility."""
    out = []
    for k, row in enumerate(jobs):
        r, d, p, c = row[:4]
        cost = row[4] if len(row) > 4 else 1
        out.append(Job(k, r, d, (p,), (c,), (cost,)))
    return Instance(tuple(out), (Facility(0, capacity),), objective, horizon)


def subproblem(tasks, capacity, objective, horizon=12, deadlines=True) -> FacilitySubproblem:
    return FacilitySubproblem(
        capacity,
        tuple(Task(k, r, d, p, c) for k, (r, d, p, c) in enumerate(tasks)),
        objective,
        horizon,
        deadlines,
    )


@st.composite
def small_subproblems(draw, max_jobs=5, objective=None):
    cap = draw(st.integers(1, 3))
    n = draw(st.integers(0, max_jobs))
    tasks = []
    for _ in range(n):
        r = draw(st.integers(0, 3))
        p = draw(st.integers(1, 3))
        d = r + p * draw(st.integers(1, 3))
        tasks.append((r, d, p, draw(st.integers(1, cap))))
    obj = objective or draw(st.sampled_from(["makespan", "feasibility", "tardiness"]))
    horizon = max((t[0] for t in tasks), default=0) + sum(t[2] for t in tasks)
    return subproblem(tasks, cap, obj, horizon)


@pytest.fixture
def instances_dir() -> Path:
    return INSTANCES
