from __future__ import annotations

import pytest

from conftest import one_facility, subproblem
from lbbd.cumulative import check_schedule, schedule_value
from lbbd.model import Assignment, Facility, Instance, Job
from lbbd.oracle import OracleGuardError, oracle_solve, oracle_subproblem


def test_single_job_makespan():
    assert oracle_solve(one_facility([(0, 10, 3, 1)])).optimum == 3


def test_parallel_and_serial_cases():
    assert oracle_subproblem(subproblem([(0, 10, 2, 1), (0, 10, 2, 1)], 2, "makespan")).optimum == 2
    assert oracle_subproblem(subproblem([(0, 10, 2, 2), (0, 10, 3, 2)], 2, "makespan")).optimum == 5


def test_all_assignments_infeasible():
    jobs = (Job(0, 0, 2, (3, 4), (1, 1), (1, 1)), Job(1, 0, 5, (1, 1), (1, 1), (1, 1)))
    inst = Instance(jobs, (Facility(0, 1), Facility(1, 1)), "cost")
    res = oracle_solve(inst)
    assert res.optimum is None and not res.feasible


def test_witness_recomputes_to_optimum():
    sp = subproblem([(0, 8, 2, 1), (1, 8, 3, 1), (2, 9, 1, 1)], 1, "tardiness")
    res = oracle_subproblem(sp)
    assert check_schedule(sp, res.starts) == []
    assert schedule_value(sp.tasks, res.starts, "tardiness") == res.optimum


def test_solve_witness_has_assignment():
    jobs = (Job(0, 0, 9, (2, 5), (1, 1), (3, 1)), Job(1, 0, 9, (4, 1), (1, 1), (1, 3)))
    inst = Instance(jobs, (Facility(0, 1), Facility(1, 1)), "makespan")
    res = oracle_solve(inst)
    assert res.optimum == 2
    assert res.assignment == Assignment({0: 0, 1: 1})


def test_order_independence():
    tasks = [(0, 9, 2, 1), (1, 8, 3, 2), (0, 6, 1, 1), (2, 12, 2, 1)]
    a = oracle_subproblem(subproblem(tasks, 2, "tardiness")).optimum
    b = oracle_subproblem(subproblem(tasks[::-1], 2, "tardiness")).optimum
    assert a == b


def test_half_integer_grid_scales():
    # doubling every time quantity doubles the optimum, so an integer grid
    # loses nothing that a half-unit grid would find
    tasks = [(0, 5, 2, 1), (1, 6, 3, 1), (0, 4, 1, 1)]
    base = oracle_subproblem(subproblem(tasks, 1, "makespan", horizon=6)).optimum
    doubled = [(2 * r, 2 * d, 2 * p, c) for r, d, p, c in tasks]
    assert oracle_subproblem(subproblem(doubled, 1, "makespan", horizon=12)).optimum == 2 * base


def test_size_guard():
    jobs = tuple(Job(j, 0, 20, (1, 1), (1, 1), (1, 1)) for j in range(7))
    inst = Instance(jobs, (Facility(0, 1), Facility(1, 1)), "makespan")
    with pytest.raises(OracleGuardError):
        oracle_solve(inst)
    with pytest.raises(OracleGuardError):
        oracle_solve(one_facility([(0, 20, 13, 1)]))
