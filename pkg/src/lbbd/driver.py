"""Benders loops: iterate to convergence, or check integral nodes of one search."""

from __future__ import annotations

import logging
import math
import time
from collections import Counter
from dataclasses import dataclass, field

from .cumulative import FEASIBILITY, MAKESPAN, TARDINESS
from .cuts import CutConfig, Resolver, facility_cuts
from .master import MasterModel, build_master, solve_master
from .model import (
    ASSIGN_COST,
    INFEASIBLE,
    OPTIMAL,
    TOTAL_TARDINESS,
    Assignment,
    Instance,
    LinearCut,
    validate,
)
from .relax import relaxation_cuts

log = logging.getLogger(__name__)

ITERATIVE = "iterative"
BRANCH_AND_CHECK = "bnc"
BUDGET_EXHAUSTED = "budget_exhausted"

TOL = 1e-6


@dataclass
class SolverConfig:
    mode: str = ITERATIVE
    warm_start_count: int = 0
    iteration_budget: int | None = None
    time_budget: float | None = None
    analytic_cuts: bool = True
    relaxations: bool = True
    multi_pass_strengthening: bool = False
    strengthen: bool = True

    def __post_init__(self):
        if self.mode not in (ITERATIVE, BRANCH_AND_CHECK):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.warm_start_count < 0:
            raise ValueError("warm_start_count must be >= 0")
        if self.iteration_budget is not None and self.iteration_budget < 1:
            raise ValueError("iteration_budget must be positive")
        if self.time_budget is not None and self.time_budget <= 0:
            raise ValueError("time_budget must be positive")

    @property
    def cut_config(self) -> CutConfig:
        return CutConfig(self.analytic_cuts, self.strengthen, self.multi_pass_strengthening)


@dataclass
class CutRecord:
    """A Benders cut with the assignment and facility outcome it came from."""

    cut: LinearCut
    assignment: Assignment
    facility: int
    value: int | None  # facility optimum at the anchor, None if infeasible


@dataclass
class IterationRecord:
    k: int
    z: float
    v: float  # aggregate subproblem value, inf when some facility is infeasible
    v_min: float
    per_facility: dict[int, int | None]
    cuts: Counter
    ms: int
    assignment: Assignment | None = None

    def log_line(self) -> str:
        tags = ",".join(f"{t}:{c}" for t, c in sorted(self.cuts.items()))
        return f"{self.k} {_fmt(self.z)} {_fmt(self.v)} {_fmt(self.v_min)} cuts={tags} ms={self.ms}"


def _fmt(v: float) -> str:
    if v is None:
        return "-"
    if math.isinf(v):
        return "inf"
    r = round(v)
    return str(r) if abs(v - r) < TOL else f"{v:.6g}"


@dataclass
class SolveTrace:
    iterations: list[IterationRecord] = field(default_factory=list)
    status: str | None = None
    lower: float = -math.inf
    upper: float = math.inf
    master_solves: int = 0
    node_checks: int = 0
    cut_log: list[CutRecord] = field(default_factory=list)
    relaxation: list[LinearCut] = field(default_factory=list)
    warm_start: list[LinearCut] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    master_ms: float = 0.0
    subproblem_ms: float = 0.0

    def lines(self) -> list[str]:
        return [rec.log_line() for rec in self.iterations]

    def write(self, path) -> None:
        with open(path, "w") as fh:
            for line in self.lines():
                fh.write(line + "\n")


@dataclass
class Solution:
    status: str
    value: float | None
    assignment: Assignment | None
    starts: dict[int, int]
    trace: SolveTrace

    @property
    def lower(self) -> float:
        return self.trace.lower

    @property
    def upper(self) -> float:
        return self.trace.upper


def sub_objective(objective: str) -> str:
    return {ASSIGN_COST: FEASIBILITY, TOTAL_TARDINESS: TARDINESS}.get(objective, MAKESPAN)


class _Context:
    """State shared by the loops: the instance, master, and subproblem cache."""

    def __init__(self, instance: Instance, config: SolverConfig):
        problems = validate(instance)
        # Unassignable (demand > capacity) pairs are handled by the master.
        problems = [p for p in problems if "unassignable" not in p]
        if problems:
            raise ValueError("invalid instance: " + "; ".join(problems))
        self.instance = instance
        self.config = config
        self.objective = instance.objective
        self.sub = sub_objective(self.objective)
        self.resolver = Resolver(instance)
        self.trace = SolveTrace()
        self.started = time.perf_counter()
        self.model: MasterModel = build_master(
            instance, tardiness_aux=config.relaxations and self.objective == TOTAL_TARDINESS
        )
        if config.relaxations:
            rel = relaxation_cuts(instance)
            self.model.add_cuts(rel)
            self.trace.relaxation = rel

    def elapsed(self) -> float:
        return time.perf_counter() - self.started

    def evaluate(self, assignment: Assignment):
        """Per-facility outcomes for an assignment, in facility order."""
        t0 = time.perf_counter()
        parts = assignment.partition(self.instance.facility_ids)
        outcomes = {i: self.resolver.solve(i, jobs, self.sub) for i, jobs in parts.items()}
        self.trace.subproblem_ms += (time.perf_counter() - t0) * 1000
        return parts, outcomes

    def aggregate(self, assignment: Assignment, outcomes) -> float:
        if any(not o.feasible for o in outcomes.values()):
            return math.inf
        if self.objective == ASSIGN_COST:
            inst = self.instance
            return sum(inst.assign_cost(i, j) for j, i in assignment.facility_of.items())
        if self.objective == TOTAL_TARDINESS:
            return sum(o.value for o in outcomes.values())
        return max((o.value for o in outcomes.values()), default=0)

    def cuts_for(self, assignment: Assignment, parts, outcomes) -> list[LinearCut]:
        """Cuts for every facility with jobs, in facility order."""
        out = []
        t0 = time.perf_counter()
        for i in self.instance.facility_ids:
            jobs, outcome = parts[i], outcomes[i]
            if not jobs:
                continue
            if self.sub == FEASIBILITY and outcome.feasible:
                continue
            fc = facility_cuts(self.resolver, self.sub, i, jobs, outcome, self.config.cut_config)
            self.trace.notes.extend(fc.notes)
            for cut in fc.cuts:
                out.append(cut)
                self.trace.cut_log.append(
                    CutRecord(cut, assignment, i, outcome.value if outcome.feasible else None)
                )
        self.trace.subproblem_ms += (time.perf_counter() - t0) * 1000
        return out

    def solve_master(self, callback=None):
        t0 = time.perf_counter()
        sol = solve_master(self.model, callback)
        self.trace.master_ms += (time.perf_counter() - t0) * 1000
        self.trace.master_solves += 1
        return sol

    def out_of_time(self) -> bool:
        return self.config.time_budget is not None and self.elapsed() > self.config.time_budget

    def starts_of(self, outcomes) -> dict[int, int]:
        starts: dict[int, int] = {}
        for o in outcomes.values():
            starts.update(o.starts or {})
        return starts


def heuristic_assignments(instance: Instance, count: int) -> list[Assignment]:
    """Greedy assignment, then round-robin single-job moves."""
    if count <= 0:
        return []
    fids = instance.facility_ids
    key = instance.assign_cost if instance.objective == ASSIGN_COST else instance.p
    base = {}
    for j in instance.job_ids:
        options = [i for i in fids if instance.assignable(i, j)] or fids
        base[j] = min(options, key=lambda i: (key(i, j), i))
    out = [Assignment(base)]
    jids = instance.job_ids
    for w in range(1, count):
        moved = dict(base)
        j = jids[(w - 1) % len(jids)]
        options = [i for i in fids if instance.assignable(i, j)] or fids
        pos = options.index(moved[j]) if moved[j] in options else -1
        moved[j] = options[(pos + 1 + (w - 1) // len(jids)) % len(options)]
        out.append(Assignment(moved))
    return out


def warm_start(instance: Instance, config: SolverConfig, ctx: _Context | None = None) -> list[LinearCut]:
    """Cuts from heuristically chosen assignments, generated before iteration 1."""
    if config.warm_start_count <= 0:
        return []
    ctx = ctx or _Context(instance, config)
    cuts = []
    for a in heuristic_assignments(instance, config.warm_start_count):
        parts, outcomes = ctx.evaluate(a)
        cuts.extend(ctx.cuts_for(a, parts, outcomes))
    return cuts


def _prepare(instance: Instance, config: SolverConfig) -> _Context:
    ctx = _Context(instance, config)
    ws = warm_start(instance, config, ctx)
    ctx.model.add_cuts(ws)
    ctx.trace.warm_start = ws
    return ctx


def solve_lbbd(instance: Instance, config: SolverConfig | None = None) -> Solution:
    """Iterate master and subproblems until z_k equals the best subproblem value."""
    config = config or SolverConfig()
    if instance.objective == ASSIGN_COST:
        raise ValueError("cost objective has feasibility subproblems; use solve_lbbd_feasibility")
    ctx = _prepare(instance, config)
    trace = ctx.trace
    best: tuple[Assignment, dict] | None = None
    v_min = math.inf
    k = 0
    while True:
        t0 = time.perf_counter()
        msol = ctx.solve_master()
        if msol.status == INFEASIBLE:
            trace.status = INFEASIBLE
            trace.lower = math.inf
            return Solution(INFEASIBLE, None, None, {}, trace)
        z = msol.objective
        k += 1
        parts, outcomes = ctx.evaluate(msol.assignment)
        v = ctx.aggregate(msol.assignment, outcomes)
        cuts = ctx.cuts_for(msol.assignment, parts, outcomes)
        ctx.model.add_cuts(cuts)
        if v < v_min:
            v_min = v
            best = (msol.assignment, ctx.starts_of(outcomes))
        trace.lower = max(trace.lower, z)
        trace.upper = v_min
        per = {i: (o.value if o.feasible else None) for i, o in outcomes.items()}
        trace.iterations.append(
            IterationRecord(k, z, v, v_min, per, Counter(c.tag for c in cuts),
                            int((time.perf_counter() - t0) * 1000), msol.assignment)
        )
        log.debug(trace.iterations[-1].log_line())
        if abs(z - v_min) <= TOL:
            trace.status = OPTIMAL
            trace.lower = trace.upper = v_min
            return Solution(OPTIMAL, v_min, best[0], best[1], trace)
        if z > v_min + TOL:
            raise AssertionError(f"master bound {z} exceeds incumbent {v_min}: invalid cut")
        if (config.iteration_budget is not None and k >= config.iteration_budget) or ctx.out_of_time():
            trace.status = BUDGET_EXHAUSTED
            if best is None:
                return Solution(BUDGET_EXHAUSTED, None, None, {}, trace)
            return Solution(BUDGET_EXHAUSTED, v_min, best[0], best[1], trace)


def solve_lbbd_feasibility(instance: Instance, config: SolverConfig | None = None) -> Solution:
    """Minimize assignment cost; add feasibility cuts until every facility schedules."""
    config = config or SolverConfig()
    if instance.objective != ASSIGN_COST:
        raise ValueError("feasibility loop requires the cost objective")
    ctx = _prepare(instance, config)
    trace = ctx.trace
    k = 0
    while True:
        t0 = time.perf_counter()
        msol = ctx.solve_master()
        if msol.status == INFEASIBLE:
            trace.status = INFEASIBLE
            trace.lower = math.inf
            return Solution(INFEASIBLE, None, None, {}, trace)
        z = msol.objective
        k += 1
        parts, outcomes = ctx.evaluate(msol.assignment)
        feasible = all(o.feasible for o in outcomes.values())
        cuts = ctx.cuts_for(msol.assignment, parts, outcomes)
        ctx.model.add_cuts(cuts)
        v = ctx.aggregate(msol.assignment, outcomes)
        trace.lower = max(trace.lower, z)
        if feasible:
            trace.upper = v
        trace.iterations.append(
            IterationRecord(k, z, v, trace.upper, {i: (0 if o.feasible else None) for i, o in outcomes.items()},
                            Counter(c.tag for c in cuts), int((time.perf_counter() - t0) * 1000),
                            msol.assignment)
        )
        if feasible:
            trace.status = OPTIMAL
            return Solution(OPTIMAL, v, msol.assignment, ctx.starts_of(outcomes), trace)
        if (config.iteration_budget is not None and k >= config.iteration_budget) or ctx.out_of_time():
            trace.status = BUDGET_EXHAUSTED
            return Solution(BUDGET_EXHAUSTED, None, None, {}, trace)


def solve_branch_and_check(instance: Instance, config: SolverConfig | None = None) -> Solution:
    """Solve the master once, generating cuts at each integral node."""
    config = config or SolverConfig()
    ctx = _prepare(instance, config)
    trace = ctx.trace
    checked: set[Assignment] = set()
    t0 = time.perf_counter()

    def on_integer_node(assignment: Assignment) -> list[LinearCut]:
        trace.node_checks += 1
        if assignment in checked:
            return []
        checked.add(assignment)
        parts, outcomes = ctx.evaluate(assignment)
        v = ctx.aggregate(assignment, outcomes)
        if v < trace.upper:
            trace.upper = v
        return ctx.cuts_for(assignment, parts, outcomes)

    msol = ctx.solve_master(on_integer_node)
    if msol.status == INFEASIBLE:
        trace.status = INFEASIBLE
        trace.lower = math.inf
        return Solution(INFEASIBLE, None, None, {}, trace)
    parts, outcomes = ctx.evaluate(msol.assignment)
    v = ctx.aggregate(msol.assignment, outcomes)
    if abs(v - msol.objective) > TOL:
        raise AssertionError(f"incumbent value {msol.objective} disagrees with subproblems {v}")
    trace.lower = trace.upper = v
    trace.status = OPTIMAL
    trace.iterations.append(
        IterationRecord(1, msol.objective, v, v,
                        {i: (o.value if o.feasible else None) for i, o in outcomes.items()},
                        Counter(r.cut.tag for r in trace.cut_log), int((time.perf_counter() - t0) * 1000),
                        msol.assignment)
    )
    return Solution(OPTIMAL, v, msol.assignment, ctx.starts_of(outcomes), trace)


def solve(instance: Instance, config: SolverConfig | None = None) -> Solution:
    """Dispatch on mode and objective."""
    config = config or SolverConfig()
    if config.mode == BRANCH_AND_CHECK:
        return solve_branch_and_check(instance, config)
    if instance.objective == ASSIGN_COST:
        return solve_lbbd_feasibility(instance, config)
    return solve_lbbd(instance, config)

