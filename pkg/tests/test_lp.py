from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from lbbd.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, solve_lp


def reference(c, A, senses, b, lb, ub):
    A_ub, b_ub, A_eq, b_eq = [], [], [], []
    for row, s, rhs in zip(A, senses, b):
        if s == "=":
            A_eq.append(row)
            b_eq.append(rhs)
        elif s == ">=":
            A_ub.append(-np.asarray(row))
            b_ub.append(-rhs)
        else:
            A_ub.append(row)
            b_ub.append(rhs)
    return linprog(
        c,
        A_ub=np.array(A_ub) if A_ub else None,
        b_ub=b_ub or None,
        A_eq=np.array(A_eq) if A_eq else None,
        b_eq=b_eq or None,
        bounds=list(zip(lb, [None if not np.isfinite(u) else u for u in ub])),
        method="highs",
    )


def test_small_known_lp():
    # min x + y st x + 2y >= 4, 3x + y >= 6
    res = solve_lp([1, 1], [[1, 2], [3, 1]], [">=", ">="], [4, 6], [0, 0], [np.inf, np.inf])
    assert res.status == OPTIMAL
    assert res.objective == pytest.approx(2.8)
    assert res.x == pytest.approx([1.6, 1.2])


def test_infeasible():
    res = solve_lp([1], [[1], [1]], [">=", "<="], [3, 2], [0], [10])
    assert res.status == INFEASIBLE


def test_unbounded():
    res = solve_lp([-1, 0], [[1, -1]], ["<="], [1], [0, 0], [np.inf, np.inf])
    assert res.status == UNBOUNDED


def test_no_columns():
    res = solve_lp([], np.zeros((0, 0)), [], [], [], [])
    assert res.status == OPTIMAL and res.objective == 0


@st.composite
def lps(draw):
    n = draw(st.integers(1, 5))
    m = draw(st.integers(0, 5))
    ints = st.integers(-4, 4)
    c = [draw(ints) for _ in range(n)]
    A = [[draw(ints) for _ in range(n)] for _ in range(m)]
    senses = [draw(st.sampled_from([">=", "<=", "="])) for _ in range(m)]
    b = [draw(ints) for _ in range(m)]
    lb = [draw(st.integers(-2, 1)) for _ in range(n)]
    ub = [lo + draw(st.integers(0, 4)) for lo in lb]
    return c, A, senses, b, lb, ub


@settings(max_examples=300, deadline=None)
@given(lps())
def test_matches_highs_on_bounded_lps(lp):
    c, A, senses, b, lb, ub = lp
    mine = solve_lp(c, np.array(A, dtype=float).reshape(len(A), len(c)), senses, b, lb, ub)
    ref = reference(c, A, senses, b, lb, ub)
    if ref.status == 2:
        assert mine.status == INFEASIBLE
    else:
        assert ref.status == 0
        assert mine.status == OPTIMAL
        assert mine.objective == pytest.approx(ref.fun, abs=1e-6)
        x = mine.x
        assert np.all(x >= np.array(lb) - 1e-7) and np.all(x <= np.array(ub) + 1e-7)
        for row, s, rhs in zip(A, senses, b):
            lhs = float(np.dot(row, x))
            if s == ">=":
                assert lhs >= rhs - 1e-6
            elif s == "<=":
                assert lhs <= rhs + 1e-6
            else:
                assert lhs == pytest.approx(rhs, abs=1e-6)
