"""Dense two-phase primal simplex used by the exact solvers.

Problems are stated as: maximize c.x subject to rows a.x {<=,=,>=} b and
per-variable bounds [l, u] with l finite (default 0) and u possibly
infinite.  The solver certifies its answer: primal feasibility of the
returned point is re-checked from the original data, the objective is
recomputed from scratch, and a dual vector is rebuilt from the final
basis so callers can verify strong duality.

Pivoting is Dantzig's rule with a deterministic ratio test; after a run
of degenerate pivots the solver switches to Bland's rule, which cannot
cycle.  There is a hard pivot cap so a wrong answer is never returned
silently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7
MAX_PIVOTS = 10 ** 6
STALL_LIMIT = 100  # degenerate pivots before switching to Bland's rule

LESS, EQUAL, GREATER = "<=", "=", ">="


class PivotLimitError(RuntimeError):
    """The pivot cap was exceeded; no answer is returned."""


class LpNumericsError(RuntimeError):
    """The final tableau failed its independent feasibility re-check."""


@dataclass
class LinearProgram:
    """maximize objective.x subject to rows and bounds."""

    objective: np.ndarray
    rows: list[tuple[np.ndarray, str, float]] = field(default_factory=list)
    bounds: list[tuple[float, float]] | None = None  # (lower, upper); default (0, inf)

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        if not np.all(np.isfinite(self.objective)):
            raise ValueError("objective has non-finite coefficients")
        n = self.objective.size
        rows = []
        for a, rel, b in self.rows:
            a = np.asarray(a, dtype=float)
            if a.size != n:
                raise ValueError("row width does not match objective")
            if not (np.all(np.isfinite(a)) and np.isfinite(b)):
                raise ValueError("row has non-finite coefficients")
            if rel == "==":
                rel = EQUAL
            if rel not in (LESS, EQUAL, GREATER):
                raise ValueError(f"unknown relation {rel!r}")
            rows.append((a, rel, float(b)))
        self.rows = rows
        if self.bounds is None:
            self.bounds = [(0.0, np.inf)] * n
        if len(self.bounds) != n:
            raise ValueError("bounds length does not match objective")
        for lo, up in self.bounds:
            if not np.isfinite(lo):
                raise ValueError("lower bounds must be finite")
            if lo > up:
                raise ValueError(f"inconsistent bound [{lo}, {up}]")


@dataclass(frozen=True)
class LpOutcome:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None = None
    value: float | None = None
    dual: np.ndarray | None = None  # one multiplier per input row, when optimal
    dual_value: float | None = None


def _pivot(T: np.ndarray, i: int, j: int) -> None:
    T[i] /= T[i, j]
    col = T[:, j].copy()
    col[i] = 0.0
    T -= np.outer(col, T[i])
    T[:, j] = 0.0
    T[i, j] = 1.0


def _simplex(T: np.ndarray, basis: list[int], pivot_tol: float,
             budget: list[int]) -> str:
    """Run pivots until optimal/unbounded; T's last row holds z-c and the objective."""
    bland = False
    stall = 0
    nrows = T.shape[0] - 1
    while True:
        red = T[-1, :-1]
        if bland:
            candidates = np.nonzero(red < -pivot_tol)[0]
            if candidates.size == 0:
                return "optimal"
            j = int(candidates[0])
        else:
            j = int(np.argmin(red))
            if red[j] >= -pivot_tol:
                return "optimal"
        col = T[:nrows, j]
        positive = col > pivot_tol
        if not positive.any():
            return "unbounded"
        ratios = np.full(nrows, np.inf)
        ratios[positive] = T[:nrows, -1][positive] / col[positive]
        best = ratios.min()
        # Deterministic leaving rule: smallest basic-variable index among
        # the minimum ratios (also mildly anti-degenerate).
        tied = np.nonzero(ratios <= best + pivot_tol * max(1.0, abs(best)))[0]
        i = int(min(tied, key=lambda r: basis[r]))
        if budget[0] <= 0:
            raise PivotLimitError(f"pivot cap exceeded ({MAX_PIVOTS})")
        budget[0] -= 1
        before = T[-1, -1]
        _pivot(T, i, j)
        basis[i] = j
        if T[-1, -1] <= before + 1e-12:
            stall += 1
            if stall >= STALL_LIMIT:
                bland = True
        else:
            stall = 0


def _cost_row(T: np.ndarray, basis: list[int], costs: np.ndarray) -> None:
    """Recompute reduced costs z-c and the (negated) objective in T's last row."""
    c_basis = costs[basis]
    T[-1, :-1] = c_basis @ T[:-1, :-1] - costs
    T[-1, -1] = c_basis @ T[:-1, -1]


def solve_lp(lp: LinearProgram, pivot_tol: float = PIVOT_TOL,
             max_pivots: int = MAX_PIVOTS) -> LpOutcome:
    """Solve to a certified status; see module docstring."""
    n = lp.objective.size
    lower = np.array([b[0] for b in lp.bounds])
    upper = np.array([b[1] for b in lp.bounds])

    # Shift to x = lower + x'; finite upper bounds become extra rows.
    rows: list[tuple[np.ndarray, str, float]] = []
    sign = []       # +1/-1 per std row, -1 when negated to make rhs >= 0
    is_input = []   # std row index -> originating input row, or -1 for bounds
    for idx, (a, rel, b) in enumerate(lp.rows):
        rows.append((a, rel, b - float(a @ lower)))
        is_input.append(idx)
    for j in range(n):
        if np.isfinite(upper[j]):
            e = np.zeros(n)
            e[j] = 1.0
            rows.append((e, LESS, upper[j] - lower[j]))
            is_input.append(-1)

    canon = []
    for a, rel, b in rows:
        if b < 0:
            a, b = -a, -b
            rel = {LESS: GREATER, GREATER: LESS, EQUAL: EQUAL}[rel]
            sign.append(-1.0)
        else:
            sign.append(1.0)
        canon.append((a, rel, b))

    R = len(canon)
    n_slack = sum(1 for _, rel, _ in canon if rel == LESS)
    n_surp = sum(1 for _, rel, _ in canon if rel == GREATER)
    n_art = sum(1 for _, rel, _ in canon if rel != LESS)
    C = n + n_slack + n_surp + n_art

    A = np.zeros((R, C))
    b_vec = np.zeros(R)
    basis: list[int] = []
    art_cols: list[int] = []
    s_at, t_at, a_at = n, n + n_slack, n + n_slack + n_surp
    for i, (a, rel, b) in enumerate(canon):
        A[i, :n] = a
        b_vec[i] = b
        if rel == LESS:
            A[i, s_at] = 1.0
            basis.append(s_at)
            s_at += 1
        else:
            if rel == GREATER:
                A[i, t_at] = -1.0
                t_at += 1
            A[i, a_at] = 1.0
            art_cols.append(a_at)
            basis.append(a_at)
            a_at += 1

    T = np.zeros((R + 1, C + 1))
    T[:R, :C] = A
    T[:R, -1] = b_vec
    kept_rows = list(range(R))
    budget = [max_pivots]

    if art_cols:
        costs1 = np.zeros(C)
        costs1[art_cols] = -1.0
        _cost_row(T, basis, costs1)
        status = _simplex(T, basis, pivot_tol, budget)
        if status != "optimal":  # pragma: no cover - phase 1 is always bounded
            raise LpNumericsError(f"phase 1 ended {status}")
        if T[-1, -1] < -FEAS_TOL:
            return LpOutcome(status="infeasible")
        # Remove artificials still in the basis: pivot them out, or drop the
        # row entirely when it has become redundant.
        art_set = set(art_cols)
        drop_rows = []
        for i in range(len(basis)):
            if basis[i] in art_set:
                row = T[i, :C]
                pivot_col = -1
                for j in range(C):
                    if j not in art_set and abs(row[j]) > pivot_tol:
                        pivot_col = j
                        break
                if pivot_col >= 0:
                    budget[0] -= 1
                    _pivot(T, i, pivot_col)
                    basis[i] = pivot_col
                else:
                    drop_rows.append(i)
        for i in sorted(drop_rows, reverse=True):
            T = np.delete(T, i, axis=0)
            del basis[i]
            del kept_rows[i]

    # Artificial columns sit at the end; drop them (basis indices unchanged).
    C2 = n + n_slack + n_surp
    T = np.hstack([T[:, :C2], T[:, -1:]])
    assert all(j < C2 for j in basis)

    costs2 = np.zeros(C2)
    costs2[:n] = lp.objective
    _cost_row(T, basis, costs2)
    status = _simplex(T, basis, pivot_tol, budget)
    if status == "unbounded":
        return LpOutcome(status="unbounded")

    x_std = np.zeros(C2)
    nrows = T.shape[0] - 1
    for i in range(nrows):
        x_std[basis[i]] = T[i, -1]
    x = lower + x_std[:n]
    value = float(lp.objective @ x)

    _check_feasible(lp, x)

    # Dual reconstruction from the final basis against the unpivoted data.
    y_std = np.zeros(R)
    if kept_rows:
        B = A[np.ix_(kept_rows, basis)]
        y_std[kept_rows] = np.linalg.solve(B.T, costs2[basis])
    dual_value = float(y_std @ b_vec + lp.objective @ lower)
    dual = np.zeros(len(lp.rows))
    for i_std, i_in in enumerate(is_input):
        if i_in >= 0:
            dual[i_in] = sign[i_std] * y_std[i_std]
    return LpOutcome(status="optimal", x=x, value=value,
                     dual=dual, dual_value=dual_value)


def _check_feasible(lp: LinearProgram, x: np.ndarray) -> None:
    for j, (lo, up) in enumerate(lp.bounds):
        if x[j] < lo - FEAS_TOL or x[j] > up + FEAS_TOL:
            raise LpNumericsError(f"variable {j} outside its bounds: {x[j]}")
    for a, rel, b in lp.rows:
        lhs = float(a @ x)
        tol = FEAS_TOL * max(1.0, abs(b))
        if rel == LESS and lhs > b + tol:
            raise LpNumericsError(f"row violated: {lhs} <= {b}")
        if rel == GREATER and lhs < b - tol:
            raise LpNumericsError(f"row violated: {lhs} >= {b}")
        if rel == EQUAL and abs(lhs - b) > tol:
            raise LpNumericsError(f"row violated: {lhs} = {b}")
