"""0-1 master problem: model, cut pool and best-first branch and bound.

The bounding core is :func:`lbbd.lp.solve_lp`.  ``solve_master`` takes an
optional callback that is invoked whenever a node's LP solution is
integral in X; cuts it returns are added to the pool and the node is
re-solved while any of them is violated (branch and check).
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from .lp import solve_lp
from .model import (
    ASSIGN_COST,
    INFEASIBLE,
    MAKESPAN,
    OPTIMAL,
    TOTAL_TARDINESS,
    Assignment,
    Instance,
    LinearCut,
    Mvar,
    Tvar,
    That,
    X,
    Z,
    key_name,
)

log = logging.getLogger(__name__)

FEAS_TOL = 1e-7
INT_TOL = 1e-6

Callback = Callable[[Assignment], Iterable[LinearCut]]


class CutScopeError(ValueError):
    """A cut names a variable the model does not have."""

    def __init__(self, key):
        super().__init__(f"cut refers to unknown master variable {key_name(key)}")
        self.key = key


@dataclass
class MasterSolution:
    status: str
    objective: float | None = None
    assignment: Assignment | None = None
    values: dict = field(default_factory=dict)
    nodes: int = 0
    lp_solves: int = 0


@dataclass
class MasterModel:
    instance: Instance
    objective: str
    variables: list[tuple]
    lb: np.ndarray
    ub: np.ndarray
    cost: np.ndarray
    base: list[LinearCut]
    equalities: list[LinearCut]
    cuts: list[LinearCut] = field(default_factory=list)
    unassignable: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.index = {k: n for n, k in enumerate(self.variables)}
        self.x_keys = [k for k in self.variables if k[0] == "X"]

    @property
    def infeasible_at_build(self) -> bool:
        return bool(self.unassignable)

    def add_cut(self, cut: LinearCut) -> None:
        for key in cut.coeffs:
            if key not in self.index:
                raise CutScopeError(key)
        self.cuts.append(cut)

    def add_cuts(self, cuts: Iterable[LinearCut]) -> None:
        for cut in cuts:
            self.add_cut(cut)

    def copy(self) -> MasterModel:
        return MasterModel(
            self.instance, self.objective, list(self.variables), self.lb.copy(),
            self.ub.copy(), self.cost.copy(), list(self.base), list(self.equalities),
            list(self.cuts), list(self.unassignable),
        )

    def _rows(self):
        rows = self.equalities + self.base + self.cuts
        A = np.zeros((len(rows), len(self.variables)))
        for r, cut in enumerate(rows):
            for key, a in cut.coeffs.items():
                A[r, self.index[key]] += float(a)
        senses = ["="] * len(self.equalities) + [">="] * (len(rows) - len(self.equalities))
        b = np.array([float(cut.rhs) for cut in rows])
        return A, senses, b

    def solve_lp(self, fixed: dict | None = None):
        """LP relaxation with some X variables fixed to 0/1."""
        lb, ub = self.lb.copy(), self.ub.copy()
        for key, v in (fixed or {}).items():
            lb[self.index[key]] = ub[self.index[key]] = v
        A, senses, b = self._rows()
        return solve_lp(self.cost, A, senses, b, lb, ub)

    def to_lp_format(self) -> str:
        """Human-readable LP-format dump of the current model."""

        def expr(coeffs):
            parts = []
            for key, a in coeffs.items():
                a = Fraction(a)
                sign = "-" if a < 0 else "+"
                mag = abs(a)
                parts.append(f"{sign} {'' if mag == 1 else str(float(mag)) + ' '}{key_name(key)}")
            text = " ".join(parts)
            return text[2:] if text.startswith("+ ") else text

        obj = {k: self.cost[n] for n, k in enumerate(self.variables) if self.cost[n]}
        lines = ["Minimize", f" obj: {expr(obj) or '0'}", "Subject To"]
        for n, cut in enumerate(self.equalities):
            lines.append(f" eq{n}: {expr(cut.coeffs)} = {float(cut.rhs):g}")
        for n, cut in enumerate(self.base + self.cuts):
            lines.append(f" c{n}_{cut.tag}: {expr(cut.coeffs)} >= {float(cut.rhs):g}")
        lines.append("Bounds")
        for n, key in enumerate(self.variables):
            ub = self.ub[n]
            ub_text = "inf" if not np.isfinite(ub) else f"{ub:g}"
            lines.append(f" {self.lb[n]:g} <= {key_name(key)} <= {ub_text}")
        lines.append("Binaries")
        lines.append(" " + " ".join(key_name(k) for k in self.x_keys))
        lines.append("End")
        return "\n".join(lines) + "\n"


def build_master(instance: Instance, objective: str | None = None, tardiness_aux: bool = False) -> MasterModel:
    """Base master model for the selected objective.

    ``tardiness_aux`` declares the That(i,k) variables used by the second
    tardiness relaxation.
    """
    objective = objective or instance.objective
    inst = instance if objective == instance.objective else instance.with_objective(objective)
    fids, jids = inst.facility_ids, inst.job_ids
    H = inst.horizon
    pmax = max((max(j.proc) for j in inst.jobs), default=0)
    variables: list[tuple] = [X(i, j) for i in fids for j in jids]
    lb = [0.0] * len(variables)
    ub = [1.0 if inst.assignable(i, j) else 0.0 for i in fids for j in jids]
    cost = [float(inst.assign_cost(i, j)) if objective == ASSIGN_COST else 0.0 for i in fids for j in jids]
    base: list[LinearCut] = []
    one = Fraction(1)
    if objective == MAKESPAN:
        for i in fids:
            variables.append(Mvar(i))
            lb.append(0.0)
            ub.append(float(H + pmax))
            cost.append(0.0)
        variables.append(Z)
        lb.append(0.0)
        ub.append(float(H + pmax))
        cost.append(1.0)
        for i in fids:
            base.append(LinearCut({Z: one, Mvar(i): -one}, Fraction(0), "Epigraph", i))
    elif objective == TOTAL_TARDINESS:
        for i in fids:
            variables.append(Tvar(i))
            lb.append(0.0)
            ub.append(float(inst.n * (H + pmax)))
            cost.append(1.0)
        if tardiness_aux:
            for i in fids:
                for j in jids:
                    variables.append(That(i, j))
                    lb.append(0.0)
                    ub.append(float(inst.n * (H + pmax)))
                    cost.append(0.0)
    elif objective != ASSIGN_COST:
        raise ValueError(f"unknown objective {objective!r}")
    equalities = [
        LinearCut({X(i, j): one for i in fids}, one, "Partition") for j in jids
    ]
    unassignable = [j for j in jids if not any(inst.assignable(i, j) for i in fids)]
    if unassignable:
        log.info("jobs %s cannot be assigned to any facility", unassignable)
    return MasterModel(
        inst, objective, variables, np.array(lb), np.array(ub), np.array(cost),
        base, equalities, unassignable=unassignable,
    )


def add_cut(model: MasterModel, cut: LinearCut) -> None:
    model.add_cut(cut)


def _violated(cut: LinearCut, model: MasterModel, x: np.ndarray) -> bool:
    lhs = sum(float(a) * x[model.index[k]] for k, a in cut.coeffs.items())
    return lhs < float(cut.rhs) - FEAS_TOL * max(1.0, abs(float(cut.rhs)))


def _extract(model: MasterModel, x: np.ndarray) -> Assignment:
    inst = model.instance
    out = {}
    for j in inst.job_ids:
        for i in inst.facility_ids:
            if x[model.index[X(i, j)]] > 0.5:
                out[j] = i
                break
    return Assignment(out)


def solve_master(model: MasterModel, on_integer_node: Callback | None = None) -> MasterSolution:
    """Optimal integral solution under all base constraints and cuts.

    Best-first search; branches on the most fractional X, ties broken
    by variable order (facility, then job).
    """
    if model.infeasible_at_build:
        return MasterSolution(INFEASIBLE)
    incumbent: tuple[float, np.ndarray] | None = None
    heap: list = [(-np.inf, 0, ())]
    seq = 1
    nodes = lp_solves = 0
    while heap:
        bound, _, fixes = heapq.heappop(heap)
        if incumbent is not None and bound >= incumbent[0] - 1e-9:
            continue
        nodes += 1
        fixed = dict(fixes)
        while True:
            res = model.solve_lp(fixed)
            lp_solves += 1
            if res.status != OPTIMAL:
                break
            if incumbent is not None and res.objective >= incumbent[0] - 1e-9:
                break
            x = res.x
            frac = None
            best_dist = 0.5 - INT_TOL
            for key in model.x_keys:
                v = x[model.index[key]]
                dist = abs(v - 0.5)
                if min(v, 1 - v) > INT_TOL and dist < best_dist:
                    frac, best_dist = key, dist
            if frac is None:
                if on_integer_node is not None:
                    cuts = list(on_integer_node(_extract(model, x)))
                    model.add_cuts(cuts)
                    if any(_violated(c, model, x) for c in cuts):
                        continue
                incumbent = (res.objective, x)
                break
            for v in (1.0, 0.0):
                heapq.heappush(heap, (res.objective, seq, fixes + ((frac, v),)))
                seq += 1
            break
    if incumbent is None:
        return MasterSolution(INFEASIBLE, nodes=nodes, lp_solves=lp_solves)
    obj, x = incumbent
    values = {k: float(x[n]) for n, k in enumerate(model.variables)}
    return MasterSolution(OPTIMAL, obj, _extract(model, x), values, nodes, lp_solves)


def lp_bound(model: MasterModel) -> float | None:
    """Root LP relaxation value, None when infeasible."""
    res = model.solve_lp()
    return res.objective if res.status == OPTIMAL else None
