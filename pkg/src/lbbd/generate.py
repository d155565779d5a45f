"""Seeded random instances.

The stream is a 64-bit linear congruential generator

    state <- (6364136223846793005 * state + 1442695040888963407) mod 2**64

seeded with ``state = seed``.  Each draw advances the state once and
uses its top 31 bits (``state >> 33``); an integer in [lo, hi] is
``lo + draw % (hi - lo + 1)``.  Instance fields are drawn in this order:
m, n, then per facility C_i, then per job r_j, per facility (p_ij, c_ij,
cost_ij), then the due-date multiplier.  An instance whose default
horizon exceeds ``max_horizon`` is discarded and drawing continues from
the same stream.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .model import Facility, Instance, Job, default_horizon

LCG_A = 6364136223846793005
LCG_C = 1442695040888963407
MASK64 = (1 << 64) - 1


class LCG:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (LCG_A * self.state + LCG_C) & MASK64
        return self.state >> 33

    def randint(self, lo: int, hi: int) -> int:
        return lo + self.next() % (hi - lo + 1)


@dataclass(frozen=True)
class GeneratorParams:
    m_range: tuple[int, int] = (1, 2)
    n_range: tuple[int, int] = (2, 5)
    capacity: tuple[int, int] = (1, 3)
    proc: tuple[int, int] = (1, 5)
    release: tuple[int, int] = (0, 4)
    due_factor: tuple[int, int] = (1, 3)
    cost: tuple[int, int] = (1, 9)
    max_horizon: int | None = 12
    max_attempts: int = 100_000


def random_instance(rng: LCG, objective: str, params: GeneratorParams = GeneratorParams()) -> Instance:
    """Draw one instance; d_j = r_j + p_(first facility),j * factor."""
    for _ in range(params.max_attempts):
        m = rng.randint(*params.m_range)
        n = rng.randint(*params.n_range)
        caps = [rng.randint(*params.capacity) for _ in range(m)]
        jobs = []
        for j in range(n):
            r = rng.randint(*params.release)
            proc, demand, cost = [], [], []
            for i in range(m):
                proc.append(rng.randint(*params.proc))
                demand.append(rng.randint(1, caps[i]))
                cost.append(rng.randint(*params.cost))
            d = r + proc[0] * rng.randint(*params.due_factor)
            jobs.append(Job(j, r, d, tuple(proc), tuple(demand), tuple(cost)))
        if params.max_horizon is not None and default_horizon(jobs) > params.max_horizon:
            continue
        return Instance(tuple(jobs), tuple(Facility(i, caps[i]) for i in range(m)), objective)
    raise RuntimeError("no instance within the horizon cap; loosen the parameters")


def corpus(seed: int, count: int, objective: str, params: GeneratorParams = GeneratorParams()) -> list[Instance]:
    rng = LCG(seed)
    return [random_instance(rng, objective, params) for _ in range(count)]


def stratified_corpus(
    seed: int, per_cell: int, objective: str, m_values=(1, 2), n_values=(2, 3, 4, 5),
    params: GeneratorParams = GeneratorParams(),
) -> list[Instance]:
    """``per_cell`` instances for every (m, n) pair, drawn from one stream.

    Uniform draws under the horizon cap almost never produce two
    facilities with four or more jobs, so the test corpus fixes the
    size of each cell instead.
    """
    rng = LCG(seed)
    out = []
    for m in m_values:
        for n in n_values:
            cell = replace(params, m_range=(m, m), n_range=(n, n))
            out += [random_instance(rng, objective, cell) for _ in range(per_cell)]
    return out
