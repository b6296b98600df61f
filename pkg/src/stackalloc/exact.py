"""Exact strong-equilibrium solvers.

Two routes to the same object:

* ``solve_multi_lp`` works on any instance.  For each candidate follower
  response y* it solves an LP over the leader's pure-strategy simplex
  that maximizes f(., y*) while keeping y* a (weak) best response, then
  keeps the best feasible candidate.

* ``solve_disjoint_lp`` applies when every customer has at most one
  adjacent medium.  Utilities then depend on a mixed strategy only
  through its fractional allocation r (r_u = funding probability of u),
  so the per-candidate LP shrinks to n variables over the polytope
  Q = {0 <= r <= 1, sum r <= k_L}, and a mixed strategy with support at
  most n+1 is recovered from the optimal r afterwards.

Every reported equilibrium is re-verified through the payoff and
follower modules; LP bookkeeping is never trusted for the final value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import follower as follower_mod
from . import payoff
from .lp import LinearProgram, solve_lp
from .model import (BipartiteInfluenceGame, CapExceededError, FractionalAllocation,
                    MixedStrategy, PureStrategy, allocation_of, count_subsets,
                    iter_subsets)

DEFAULT_LEADER_CAP = 10 ** 5
VALUE_TIE_TOL = 1e-9
REVERIFY_TOL = 1e-6
PRUNE_TOL = 1e-12


@dataclass(frozen=True)
class EquilibriumResult:
    """Solver output plus the per-candidate audit trail."""

    leader: MixedStrategy
    follower: PureStrategy
    value: float
    per_y_values: dict[PureStrategy, tuple[str, float | None]]


def enumerate_leader(game: BipartiteInfluenceGame,
                     cap: int = DEFAULT_LEADER_CAP) -> list[PureStrategy]:
    """All leader pure strategies, lexicographically ordered."""
    total = count_subsets(game.n, game.k_L)
    if total > cap:
        raise CapExceededError(
            f"leader strategy set has {total} elements (cap {cap}); "
            f"use the disjoint solver or an approximation instead")
    return [PureStrategy(s) for s in iter_subsets(game.n, game.k_L)]


def _finish(game: BipartiteInfluenceGame, x: MixedStrategy, y_star: PureStrategy,
            lp_value: float, oracle: follower_mod.FollowerOracle,
            per_y: dict[PureStrategy, tuple[str, float | None]]) -> EquilibriumResult:
    """Re-verify a candidate equilibrium from scratch and package it."""
    pvx = payoff.mixed_activation_vector(game, x)
    f_all, g_all = oracle.utilities(pvx)
    f_all, g_all = f_all[0], g_all[0]
    yi = oracle.strategies.index(y_star)
    if g_all[yi] < g_all.max() - REVERIFY_TOL:
        raise RuntimeError(
            f"recovered strategy does not induce {y_star} as a best response "
            f"(g={g_all[yi]}, max={g_all.max()})")
    value = float(f_all[yi])
    if abs(value - lp_value) > REVERIFY_TOL:
        raise RuntimeError(
            f"re-evaluated value {value} disagrees with LP value {lp_value}")
    return EquilibriumResult(leader=x, follower=y_star, value=value, per_y_values=per_y)


def solve_multi_lp(game: BipartiteInfluenceGame,
                   leader_cap: int = DEFAULT_LEADER_CAP,
                   follower_cap: int = follower_mod.DEFAULT_FOLLOWER_CAP) -> EquilibriumResult:
    """Exact equilibrium by one LP per candidate follower response.

    The LP for y* has one variable per leader pure strategy z:
    maximize sum_z f(z, y*) x_z subject to
    sum_z (g(z, y*) - g(z, y')) x_z >= 0 for every y', sum_z x_z = 1,
    x >= 0.  Candidates whose LP is infeasible are not inducible and are
    skipped (recorded in the audit trail).
    """
    leaders = enumerate_leader(game, leader_cap)
    oracle = follower_mod.follower_oracle(game, follower_cap)
    pv = np.array([payoff.activation_vector(game, z) for z in leaders])
    F = pv @ (1.0 - oracle.recapture).T                      # f(z, y)
    G = pv @ oracle.recapture.T + (1.0 - pv) @ oracle.activation.T

    per_y: dict[PureStrategy, tuple[str, float | None]] = {}
    best: tuple[float, int, np.ndarray] | None = None
    for yi, y_star in enumerate(oracle.strategies):
        rows = [(G[:, yi] - G[:, yj], ">=", 0.0) for yj in range(len(oracle))]
        rows.append((np.ones(len(leaders)), "=", 1.0))
        out = solve_lp(LinearProgram(objective=F[:, yi], rows=rows))
        per_y[y_star] = (out.status, out.value)
        if out.status != "optimal":
            continue
        if best is None or out.value > best[0] + VALUE_TIE_TOL:
            best = (out.value, yi, out.x)
    assert best is not None, "some follower response is always inducible"

    lp_value, yi, weights = best
    kept = {leaders[i]: float(w) for i, w in enumerate(weights) if w > PRUNE_TOL}
    total = sum(kept.values())
    x = MixedStrategy({s: w / total for s, w in kept.items()})
    return _finish(game, x, oracle.strategies[yi], lp_value, oracle, per_y)


def membership_Q(r, k_L: int, tol: float = 1e-9) -> bool:
    """Is r in Q = {0 <= r <= 1, sum r <= k_L} (within tolerance)?"""
    r = np.asarray(r, dtype=float)
    if np.any(r < -tol) or np.any(r > 1.0 + tol):
        return False
    return float(r.sum()) <= k_L + tol


def decompose_allocation(r, k_L: int, tol: float = 1e-9) -> MixedStrategy:
    """Write r in Q as a mix of at most n+1 budget-respecting subsets.

    Peels one vertex of the minimal face of Q containing the current
    point per step: coordinates already at 0 or 1 are kept, the free
    coordinates are rounded up in descending order until k_L media are
    funded, and the largest step toward that vertex that keeps the
    remainder inside Q is removed.  The binding coordinate of each step
    becomes integral exactly, so at most n peels happen before the
    remainder is itself a vertex.
    """
    if isinstance(r, FractionalAllocation):
        r = r.r
    rho = np.asarray(r, dtype=float).copy()
    n = rho.size
    if not membership_Q(rho, k_L, tol):
        raise ValueError(f"allocation outside Q (budget {k_L}): {rho}")
    rho = np.clip(rho, 0.0, 1.0)
    total = float(rho.sum())
    if total > k_L:
        rho *= k_L / total

    snap = 1e-12
    atoms: dict[PureStrategy, float] = {}
    mass = 1.0
    for _ in range(n + 1):
        rho[rho < snap] = 0.0
        rho[rho > 1.0 - snap] = 1.0
        free = np.nonzero((rho > 0.0) & (rho < 1.0))[0]
        ones = np.nonzero(rho == 1.0)[0]
        if ones.size > k_L:
            # Near-1 peel steps can snap one coordinate too many once the
            # residual mass is tiny; dropping the tail costs at most that
            # residual, far below the reconstruction tolerance.
            ones = ones[:k_L]
        if free.size == 0:
            z = PureStrategy(tuple(int(u) for u in ones))
            atoms[z] = atoms.get(z, 0.0) + mass
            mass = 0.0
            break
        room = k_L - ones.size
        # Descending value, then ascending index, for a deterministic vertex.
        order = sorted(free, key=lambda u: (-rho[u], u))
        up = order[:room]
        zmask = np.zeros(n)
        zmask[ones] = 1.0
        zmask[up] = 1.0
        z_size = ones.size + len(up)

        # Track 1-lam alongside lam from the binding term itself, so the
        # binding coordinate becomes exactly integral after the update.
        lam, comp = 1.0, 0.0
        for u in free:
            term, term_comp = (rho[u], 1.0 - rho[u]) if zmask[u] else (1.0 - rho[u], rho[u])
            if term < lam:
                lam, comp = term, term_comp
        if z_size < k_L:
            # Cannot bind: an underfilled vertex contains every free
            # coordinate, so the step to the budget face exceeds 1.
            term = (k_L - float(rho.sum())) / (k_L - z_size)
            if term < lam:
                lam, comp = term, 1.0 - term
        assert 0.0 < lam < 1.0, f"degenerate peel step lam={lam}"

        z = PureStrategy(tuple(int(u) for u in np.nonzero(zmask)[0]))
        atoms[z] = atoms.get(z, 0.0) + mass * lam
        # Update only the free coordinates; integral ones are pinned so
        # rounding in lam/comp can never un-fix them.
        new_rho = rho.copy()
        new_rho[free] = np.clip((rho[free] - lam * zmask[free]) / comp, 0.0, 1.0)
        rho = new_rho
        mass *= comp
    else:  # pragma: no cover - the peel argument bounds the loop
        raise RuntimeError("decomposition failed to terminate in n+1 steps")
    return MixedStrategy(atoms)


def solve_disjoint_lp(game: BipartiteInfluenceGame,
                      follower_cap: int = follower_mod.DEFAULT_FOLLOWER_CAP) -> EquilibriumResult:
    """Exact equilibrium for disjoint customers via the n-variable LPs.

    For each candidate y* the LP maximizes
    sum_u sum_{v in N_u} p_uv (1 - p_F,uv y*_u) r_u over r in Q subject
    to, for every follower y,
    sum_u sum_{v in N_u} p_uv (y*_u - y_u)(1 - (p_uv - p_F,uv) r_u) >= 0.
    The optimal allocation is decomposed back into a mixed strategy.
    """
    from .model import is_disjoint

    if not is_disjoint(game):
        raise ValueError("instance has a customer with several media; use solve_multi_lp")
    oracle = follower_mod.follower_oracle(game, follower_cap)
    n = game.n
    # Per-medium aggregates over its customers.
    a = np.bincount(game.edge_media, weights=game.edge_p, minlength=n)
    d = np.bincount(game.edge_media, weights=game.edge_p * game.edge_pf, minlength=n)
    bq = np.bincount(game.edge_media,
                     weights=game.edge_p * (game.edge_p - game.edge_pf), minlength=n)
    ymat = np.array([y.mask(n) for y in oracle.strategies], dtype=float)

    per_y: dict[PureStrategy, tuple[str, float | None]] = {}
    best: tuple[float, int, np.ndarray] | None = None
    budget_row = (np.ones(n), "<=", float(game.k_L))
    bounds = [(0.0, 1.0)] * n
    for yi, y_star in enumerate(oracle.strategies):
        ys = ymat[yi]
        objective = a - ys * d
        rows = []
        for yj in range(len(oracle)):
            diff = ys - ymat[yj]
            # g(r, y*) - g(r, y) = sum_u diff_u * (a_u - bq_u r_u) >= 0
            rows.append((-diff * bq, ">=", float(-(diff @ a))))
        rows.append(budget_row)
        out = solve_lp(LinearProgram(objective=objective, rows=rows, bounds=bounds))
        per_y[y_star] = (out.status, out.value)
        if out.status != "optimal":
            continue
        if best is None or out.value > best[0] + VALUE_TIE_TOL:
            best = (out.value, yi, out.x)
    assert best is not None, "some follower response is always inducible"

    lp_value, yi, r = best
    x = decompose_allocation(r, game.k_L)
    return _finish(game, x, oracle.strategies[yi], lp_value, oracle, per_y)
