"""Logic-based Benders decomposition for assigning jobs to facilities
with cumulative scheduling subproblems."""

from .driver import BRANCH_AND_CHECK, ITERATIVE, Solution, SolverConfig, solve
from .model import (
    ASSIGN_COST,
    MAKESPAN,
    TOTAL_TARDINESS,
    Assignment,
    Facility,
    Instance,
    Job,
    load_instance,
    save_instance,
)
from .oracle import oracle_solve

__all__ = [
    "ASSIGN_COST", "MAKESPAN", "TOTAL_TARDINESS", "ITERATIVE", "BRANCH_AND_CHECK",
    "Assignment", "Facility", "Instance", "Job", "Solution", "SolverConfig",
    "load_instance", "save_instance", "oracle_solve", "solve",
]
