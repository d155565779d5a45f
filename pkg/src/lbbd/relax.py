"""Subproblem relaxations written in master variables.

Energy of job j on facility i is p_ij * c_ij.  Every inequality is a
:class:`LinearCut` added to the master before the first solve.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .model import ASSIGN_COST, MAKESPAN, TOTAL_TARDINESS, Instance, LinearCut, Mvar, Tvar, That, X

RELAX_ENERGY = "RelaxEnergy"
RELAX_MAKESPAN = "RelaxMakespan"
RELAX_TARDINESS_1 = "RelaxTardiness1"
RELAX_TARDINESS_2 = "RelaxTardiness2"


@dataclass(frozen=True)
class WindowPair:
    facility: int
    t1: int
    t2: int
    jobs: tuple[int, ...]
    tightness: Fraction

    def inside(self, other: WindowPair) -> bool:
        return other.t1 <= self.t1 and self.t2 <= other.t2


def window_jobs(instance: Instance, t1: int, t2: int) -> list[int]:
    """J(t1, t2): jobs whose whole window lies in [t1, t2]."""
    return [j.id for j in instance.jobs if j.release >= t1 and j.due <= t2]


def window_pairs(instance: Instance, i: int) -> list[WindowPair]:
    releases = sorted({j.release for j in instance.jobs})
    dues = sorted({j.due for j in instance.jobs})
    C = instance.facility(i).capacity
    out = []
    for t1 in releases:
        for t2 in dues:
            if t1 >= t2:
                continue
            jobs = window_jobs(instance, t1, t2)
            if not jobs:
                continue
            theta = Fraction(sum(instance.energy(i, j) for j in jobs), C) - t2 + t1
            out.append(WindowPair(i, t1, t2, tuple(jobs), theta))
    return out


def prune_dominated(pairs: list[WindowPair]) -> list[WindowPair]:
    """Drop [u1,u2] when a kept [t1,t2] inside it is at least as tight."""
    unique = {(p.facility, p.t1, p.t2): p for p in pairs}
    ordered = sorted(unique.values(), key=lambda p: (p.facility, p.t2 - p.t1, p.t1))
    kept: list[WindowPair] = []
    for u in ordered:
        if any(t.facility == u.facility and t.inside(u) and t.tightness >= u.tightness for t in kept):
            continue
        kept.append(u)
    return kept


def energy_window_inequalities(instance: Instance, prune: bool = True) -> list[LinearCut]:
    """sum_{j in J(t1,t2)} p_ij c_ij X(i,j) <= C_i (t2 - t1), written as >=."""
    cuts = []
    for i in instance.facility_ids:
        pairs = window_pairs(instance, i)
        if prune:
            pairs = prune_dominated(pairs)
        C = instance.facility(i).capacity
        for w in pairs:
            coeffs = {X(i, j): Fraction(-instance.energy(i, j)) for j in w.jobs}
            cuts.append(LinearCut(coeffs, Fraction(-C * (w.t2 - w.t1)), RELAX_ENERGY, i))
    return cuts


def makespan_relaxation(instance: Instance) -> list[LinearCut]:
    """Mvar(i) >= t + (1/C_i) sum_{r_j >= t} p_ij c_ij X(i,j).

    The constant t only holds if some job released at or after t is on
    the facility, so for t > 0 it is switched on by X(i,j') of a job j'
    released at exactly t (one inequality per such job).
    """
    cuts = []
    for i in instance.facility_ids:
        C = instance.facility(i).capacity
        for t in sorted({j.release for j in instance.jobs}):
            cohort = [j.id for j in instance.jobs if j.release >= t]
            energy = {X(i, j): Fraction(-instance.energy(i, j), C) for j in cohort if instance.energy(i, j)}
            triggers = [None] if t == 0 else [j.id for j in instance.jobs if j.release == t]
            for trig in triggers:
                coeffs = {Mvar(i): Fraction(1), **energy}
                if trig is not None:
                    coeffs[X(i, trig)] = coeffs.get(X(i, trig), Fraction(0)) - t
                cuts.append(LinearCut(coeffs, Fraction(0), RELAX_MAKESPAN, i))
    return cuts


def tardiness_relaxation_1(instance: Instance) -> list[LinearCut]:
    """Tvar(i) >= (1/C_i) sum_{d_j <= d_k} p_ij c_ij X(i,j) - d_k."""
    cuts = []
    for i in instance.facility_ids:
        C = instance.facility(i).capacity
        for d in sorted({j.due for j in instance.jobs}):
            coeffs = {Tvar(i): Fraction(1)}
            for j in window_jobs(instance, 0, d):
                if instance.energy(i, j):
                    coeffs[X(i, j)] = Fraction(-instance.energy(i, j), C)
            cuts.append(LinearCut(coeffs, Fraction(-d), RELAX_TARDINESS_1, i))
    return cuts


@dataclass(frozen=True)
class TardinessRelaxAux:
    facility: int
    due_order: tuple[int, ...]  # job ids by (due, id)
    energy_order: tuple[int, ...]  # job ids by (energy, id): the permutation pi_i
    big_m: tuple[int, ...]  # U_ik, aligned with due_order

    @classmethod
    def build(cls, instance: Instance, i: int) -> TardinessRelaxAux:
        due_order = tuple(j.id for j in sorted(instance.jobs, key=lambda j: (j.due, j.id)))
        energy_order = tuple(sorted(instance.job_ids, key=lambda j: (instance.energy(i, j), j)))
        big_m = []
        acc = 0
        for k, j in enumerate(due_order):
            acc += instance.energy(i, energy_order[k])
            big_m.append(acc - instance.job(j).due)
        return cls(i, due_order, energy_order, tuple(big_m))


def tardiness_relaxation_2(instance: Instance, single_switch: bool = False) -> list[LinearCut]:
    """Tvar(i) >= sum_k That(i,k), That(i,k) >= 0, and for each k

        That(i,k) >= (1/C_i) sum_{l<=k} e_{i,pi(l)} X(i,pi(l)) - d_k - big-M

    ``That`` is keyed by the job id in due-date position k.  With
    ``single_switch`` the big-M term is U_ik (1 - X(i,k)).  That form
    overstates tardiness when a job due earlier than k is elsewhere while
    low-energy jobs due later are here, so by default the term is
    U_ik^+ sum_{l<=k} (1 - X(i, due_order[l])): the bound only applies
    when the k earliest-due jobs are all on the facility.
    """
    cuts = []
    for i in instance.facility_ids:
        aux = TardinessRelaxAux.build(instance, i)
        C = instance.facility(i).capacity
        total = {Tvar(i): Fraction(1)}
        for j in aux.due_order:
            total[That(i, j)] = Fraction(-1)
        cuts.append(LinearCut(total, Fraction(0), RELAX_TARDINESS_2, i))
        for k, job_k in enumerate(aux.due_order):
            d = instance.job(job_k).due
            U = aux.big_m[k]
            coeffs = {That(i, job_k): Fraction(1)}
            for j in aux.energy_order[: k + 1]:
                e = instance.energy(i, j)
                if e:
                    coeffs[X(i, j)] = coeffs.get(X(i, j), Fraction(0)) - Fraction(e, C)
            if single_switch:
                coeffs[X(i, job_k)] = coeffs.get(X(i, job_k), Fraction(0)) - U
                rhs = Fraction(-d - U)
            else:
                Up = max(U, 0)
                if Up:
                    for j in aux.due_order[: k + 1]:
                        coeffs[X(i, j)] = coeffs.get(X(i, j), Fraction(0)) - Up
                rhs = Fraction(-d - (k + 1) * Up)
            coeffs = {key: a for key, a in coeffs.items() if a != 0 or key[0] != "X"}
            cuts.append(LinearCut(coeffs, rhs, RELAX_TARDINESS_2, i))
    return cuts


def relaxation_cuts(instance: Instance, objective: str | None = None, prune: bool = True) -> list[LinearCut]:
    """Relaxation inequalities appropriate to the objective."""
    objective = objective or instance.objective
    if objective == ASSIGN_COST:
        return energy_window_inequalities(instance, prune)
    if objective == MAKESPAN:
        return energy_window_inequalities(instance, prune) + makespan_relaxation(instance)
    if objective == TOTAL_TARDINESS:
        return tardiness_relaxation_1(instance) + tardiness_relaxation_2(instance)
    raise ValueError(f"unknown objective {objective!r}")
