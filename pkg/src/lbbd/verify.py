"""Cross-checks of solver output against the brute-force oracle."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .cuts import FEASIBILITY_NOGOOD, NOGOOD_MAKESPAN, NOGOOD_TARDINESS, OPTIMALITY_TAGS
from .driver import BRANCH_AND_CHECK, ITERATIVE, TOL, SolverConfig, Solution, solve
from .master import build_master, lp_bound
from .model import ASSIGN_COST, TOTAL_TARDINESS, Instance, LinearCut, Mvar, Tvar, assignment_values
from .oracle import FacilityValues, all_assignments, oracle_solve
from .relax import relaxation_cuts


def implied_bound(cuts: list[LinearCut], var: tuple, x_values) -> Fraction:
    """Smallest value of ``var`` allowed by ``cuts`` once X is fixed.

    Handles auxiliary That variables that appear in a single defining
    inequality each and are summed into ``var``.
    """
    aux: dict[tuple, Fraction] = {}
    for c in cuts:
        keys = [k for k in c.coeffs if k[0] == "That"]
        if len(keys) == 1:
            aux[keys[0]] = max(aux.get(keys[0], Fraction(0)), c.bound_on(keys[0], x_values))
    values = dict(x_values)
    values.update(aux)
    bound = Fraction(0)
    for c in cuts:
        if var in c.coeffs:
            bound = max(bound, c.bound_on(var, values))
    return bound


def _facility_var(instance: Instance, i: int) -> tuple:
    return Tvar(i) if instance.objective == TOTAL_TARDINESS else Mvar(i)


def cut_violations(instance: Instance, solution: Solution, values: FacilityValues) -> list[str]:
    """Benders cuts that cut off some assignment's true facility optimum."""
    out = []
    assignments = list(all_assignments(instance))
    for rec in solution.trace.cut_log:
        i = rec.facility
        for a in assignments:
            v = values.value(i, a.jobs_on(i))
            xs = assignment_values(a, instance)
            if rec.cut.tag == FEASIBILITY_NOGOOD:
                if v is not None and not rec.cut.satisfied(xs):
                    out.append(f"{rec.cut} excludes feasible {dict(a.facility_of)}")
            elif v is not None:
                b = rec.cut.bound_on(_facility_var(instance, i), xs)
                if b > v:
                    out.append(f"{rec.cut} gives {b} > {v} at {dict(a.facility_of)}")
    return out


def anchor_violations(instance: Instance, solution: Solution) -> list[str]:
    out = []
    groups: dict[tuple, list] = {}
    for rec in solution.trace.cut_log:
        if rec.cut.tag not in OPTIMALITY_TAGS:
            if rec.cut.tag == FEASIBILITY_NOGOOD:
                if rec.cut.satisfied(assignment_values(rec.assignment, instance)):
                    out.append(f"{rec.cut} not violated at its anchor")
            continue
        groups.setdefault((rec.assignment, rec.facility), []).append(rec)
    for (a, i), recs in groups.items():
        xs = assignment_values(a, instance)
        var = _facility_var(instance, i)
        v = recs[0].value
        bounds = [r.cut.bound_on(var, xs) for r in recs]
        if max(bounds) != v:
            out.append(f"facility {i}: strongest anchor bound {max(bounds)} != {v}")
        for r, b in zip(recs, bounds):
            if b > v:
                out.append(f"{r.cut} exceeds anchor value {v}")
            exact = r.cut.tag == NOGOOD_MAKESPAN or (
                r.cut.tag == NOGOOD_TARDINESS and set(k[2] for k in r.cut.coeffs if k[0] == "X") == set(a.jobs_on(i))
            )
            if exact and b != v:
                out.append(f"{r.cut} anchor bound {b} != {v}")
    return out


def relaxation_violations(instance: Instance, cuts: list[LinearCut], values: FacilityValues) -> list[str]:
    """Relaxation inequalities violated by some (assignment, optimum) pair."""
    out = []
    for a in all_assignments(instance):
        xs = assignment_values(a, instance)
        for i in instance.facility_ids:
            v = values.value(i, a.jobs_on(i))
            if v is None:
                continue
            fc = [c for c in cuts if c.facility == i]
            if instance.objective == ASSIGN_COST:
                bad = [c for c in fc if not c.satisfied(xs)]
                out += [f"{c} violated at feasible {dict(a.facility_of)}" for c in bad]
                continue
            b = implied_bound(fc, _facility_var(instance, i), xs)
            if b > v:
                out.append(f"facility {i} relaxation bound {b} > {v} at {dict(a.facility_of)}")
    return out


def bookkeeping_violations(instance: Instance, solution: Solution) -> list[str]:
    out = []
    its = solution.trace.iterations
    cap = 2 ** (instance.n * instance.m) + 1
    if len(its) >= cap:
        out.append(f"iteration cap {cap} reached")
    for prev, cur in zip(its, its[1:]):
        if cur.z < prev.z - TOL:
            out.append(f"z decreased at k={cur.k}: {prev.z} -> {cur.z}")
        if cur.v_min > prev.v_min + TOL:
            out.append(f"v_min increased at k={cur.k}")
    for rec in its[:-1]:
        if abs(rec.z - rec.v_min) <= TOL:
            out.append(f"z_k = v_min at k={rec.k} but the loop continued")
    if solution.status == "optimal" and its and abs(its[-1].z - its[-1].v_min) > TOL:
        out.append("stopped without z_k = v_min")
    return out


def pruning_changes_lp(instance: Instance) -> bool:
    """True when dominance pruning changes the root LP value of the master."""
    vals = []
    for prune in (True, False):
        model = build_master(instance)
        model.add_cuts(relaxation_cuts(instance, prune=prune))
        vals.append(lp_bound(model))
    if vals[0] is None or vals[1] is None:
        return vals[0] != vals[1]
    return abs(vals[0] - vals[1]) > 1e-6


@dataclass
class CheckResult:
    instance: Instance
    oracle: int | None
    values: dict[str, float | None] = field(default_factory=dict)
    iterations: dict[str, int] = field(default_factory=dict)
    problems: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems


def check_instance(instance: Instance, config: SolverConfig | None = None) -> CheckResult:
    """Oracle vs both modes, plus cut, anchor, relaxation and trace checks."""
    config = config or SolverConfig()
    oracle = oracle_solve(instance)
    fv = FacilityValues(instance)
    res = CheckResult(instance, oracle.optimum)
    for mode in (ITERATIVE, BRANCH_AND_CHECK):
        cfg = SolverConfig(**{**config.__dict__, "mode": mode})
        try:
            sol = solve(instance, cfg)
        except AssertionError as exc:
            # the driver's own consistency guards caught an invalid cut
            res.values[mode] = None
            res.problems.append(f"{mode}: {exc}")
            continue
        res.values[mode] = sol.value
        res.iterations[mode] = len(sol.trace.iterations)
        expect = oracle.optimum
        got = sol.value
        if (got is None) != (expect is None) or (got is not None and abs(got - expect) > TOL):
            res.problems.append(f"{mode}: value {got} != oracle {expect}")
        res.problems += [f"{mode}: {p}" for p in cut_violations(instance, sol, fv)]
        res.problems += [f"{mode}: {p}" for p in anchor_violations(instance, sol)]
        res.problems += [f"{mode}: {p}" for p in bookkeeping_violations(instance, sol)]
    res.problems += relaxation_violations(instance, relaxation_cuts(instance), fv)
    return res

