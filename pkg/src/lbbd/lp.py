"""Dense two-phase tableau simplex for small LPs.

    min c.x  s.t.  A x (>=, <=, =) b,  lb <= x <= ub

Dantzig pricing, switching to Bland's rule after a run of degenerate
pivots so the method cannot cycle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FEAS_TOL = 1e-7
PIV_TOL = 1e-9

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: str
    x: np.ndarray | None = None
    objective: float | None = None
    pivots: int = 0


def _pivot(T: np.ndarray, basis: list[int], r: int, col: int) -> None:
    T[r] /= T[r, col]
    colv = T[:, col].copy()
    colv[r] = 0.0
    nz = np.nonzero(np.abs(colv) > 1e-15)[0]
    if len(nz):
        T[nz] -= np.outer(colv[nz], T[r])
    basis[r] = col


def _run(T: np.ndarray, basis: list[int], ncols: int, max_pivots: int) -> tuple[str, int]:
    """Minimize the objective in the last row of T over columns [0, ncols)."""
    pivots = 0
    degenerate = 0
    bland = False
    m = T.shape[0] - 1
    while True:
        red = T[-1, :ncols]
        if ncols == 0:
            return OPTIMAL, pivots
        if bland:
            cand = np.nonzero(red < -PIV_TOL)[0]
            if not len(cand):
                return OPTIMAL, pivots
            col = int(cand[0])
        else:
            col = int(np.argmin(red))
            if red[col] >= -PIV_TOL:
                return OPTIMAL, pivots
        colv = T[:m, col]
        pos = colv > PIV_TOL
        if not pos.any():
            return UNBOUNDED, pivots
        ratios = np.full(m, np.inf)
        ratios[pos] = T[:m, -1][pos] / colv[pos]
        best = ratios.min()
        ties = np.nonzero(ratios <= best + 1e-12)[0]
        r = int(min(ties, key=lambda k: basis[k]))
        degenerate = degenerate + 1 if best <= 1e-12 else 0
        if degenerate > 50:
            bland = True
        _pivot(T, basis, r, col)
        pivots += 1
        if pivots > max_pivots:
            raise RuntimeError("simplex pivot limit exceeded")


def solve_lp(c, A, senses, b, lb, ub) -> LPResult:
    """Solve the LP; ``senses`` holds '>=', '<=' or '=' per row."""
    c = np.asarray(c, dtype=float)
    A = np.asarray(A, dtype=float).reshape(len(b), len(c))
    b = np.asarray(b, dtype=float)
    lb = np.asarray(lb, dtype=float)
    ub = np.asarray(ub, dtype=float)
    n = len(c)
    if np.any(ub < lb - FEAS_TOL):
        return LPResult(INFEASIBLE)

    # Shift to x = lb + y and drop fixed columns.
    b = b - A @ lb
    width = ub - lb
    free = np.nonzero(width > FEAS_TOL)[0]
    A_f = A[:, free]
    c_f = c[free]
    rows = [A_f]
    rhs = [b]
    sense = list(senses)
    bounded = [k for k, col in enumerate(free) if np.isfinite(width[col])]
    if bounded:
        U = np.zeros((len(bounded), len(free)))
        U[np.arange(len(bounded)), bounded] = 1.0
        rows.append(U)
        rhs.append(width[free][bounded])
        sense += ["<="] * len(bounded)
    A_s = np.vstack(rows) if rows else np.zeros((0, len(free)))
    b_s = np.concatenate(rhs) if rhs else np.zeros(0)

    # Drop empty rows after checking them.
    keep = []
    for k in range(A_s.shape[0]):
        if np.any(np.abs(A_s[k]) > 1e-12):
            keep.append(k)
            continue
        s, v = sense[k], b_s[k]
        if (s == ">=" and v > FEAS_TOL) or (s == "<=" and v < -FEAS_TOL) or (s == "=" and abs(v) > FEAS_TOL):
            return LPResult(INFEASIBLE)
    A_s = A_s[keep]
    b_s = b_s[keep]
    sense = [sense[k] for k in keep]
    m, nf = A_s.shape

    n_slack = sum(1 for s in sense if s != "=")
    # columns: structural | slack | artificial | rhs
    slack_col = {}
    for k, s in enumerate(sense):
        if s != "=":
            slack_col[k] = nf + len(slack_col)
    n_art_max = m
    T = np.zeros((m + 1, nf + n_slack + n_art_max + 1))
    T[:m, :nf] = A_s
    T[:m, -1] = b_s
    for k, col in slack_col.items():
        T[k, col] = -1.0 if sense[k] == ">=" else 1.0
    neg = T[:m, -1] < 0
    T[:m][neg] *= -1.0

    basis: list[int] = []
    art_cols = []
    for k in range(m):
        col = slack_col.get(k)
        if col is not None and T[k, col] > 0:
            basis.append(col)
        else:
            a = nf + n_slack + len(art_cols)
            art_cols.append(a)
            T[k, a] = 1.0
            basis.append(a)
    n_art = len(art_cols)
    last = nf + n_slack + n_art
    T = np.delete(T, np.s_[last:-1], axis=1)
    max_piv = 50 * (m + last + 10)
    pivots = 0

    if n_art:
        T[-1, :] = 0.0
        for k, bcol in enumerate(basis):
            if bcol >= nf + n_slack:
                T[-1] -= T[k]
        for a in range(nf + n_slack, last):
            T[-1, a] += 1.0
        status, p = _run(T, basis, last, max_piv)
        pivots += p
        if -T[-1, -1] > FEAS_TOL * max(1.0, np.abs(b_s).max(initial=0.0)):
            return LPResult(INFEASIBLE, pivots=pivots)
        # Drive artificials out of the basis; drop redundant rows.
        drop = []
        for k in range(m):
            if basis[k] >= nf + n_slack:
                cand = np.nonzero(np.abs(T[k, : nf + n_slack]) > 1e-9)[0]
                if len(cand):
                    _pivot(T, basis, k, int(cand[0]))
                else:
                    drop.append(k)
        if drop:
            keep_rows = [k for k in range(m) if k not in drop]
            T = T[keep_rows + [m]]
            basis = [basis[k] for k in keep_rows]
            m = len(keep_rows)
        T = np.delete(T, np.s_[nf + n_slack : last], axis=1)

    ncols = nf + n_slack
    T[-1, :] = 0.0
    T[-1, :nf] = c_f
    for k, bcol in enumerate(basis):
        if T[-1, bcol] != 0.0:
            T[-1] -= T[-1, bcol] * T[k]
    status, p = _run(T, basis, ncols, max_piv)
    pivots += p
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, pivots=pivots)

    y = np.zeros(ncols)
    for k, bcol in enumerate(basis):
        y[bcol] = T[k, -1]
    x = lb.copy()
    x[free] += y[:nf]
    x = np.where(np.abs(x - np.round(x)) < 1e-9, np.round(x), x)
    return LPResult(OPTIMAL, x, float(c @ x), pivots)
