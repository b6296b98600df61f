"""Follower side: strategy enumeration and optimistic best responses.

The follower's pure strategies are all media subsets of size at most
``k_F``.  A best response maximizes g(x, .); among responses tied within
tolerance the one maximizing f(x, .) is chosen (leader-favorable
tie-breaking, the strong-equilibrium convention), with a final
lexicographic tie-break for determinism.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass

import numpy as np

from . import payoff
from .model import (BipartiteInfluenceGame, CapExceededError, MixedStrategy,
                    PureStrategy, count_subsets, iter_subsets)

DEFAULT_FOLLOWER_CAP = 10 ** 6
TIE_TOL = 1e-9


def enumerate_follower(game: BipartiteInfluenceGame,
                       cap: int = DEFAULT_FOLLOWER_CAP) -> list[PureStrategy]:
    """All follower pure strategies, lexicographically ordered."""
    total = count_subsets(game.n, game.k_F)
    if total > cap:
        raise CapExceededError(
            f"follower strategy set has {total} elements (cap {cap}); "
            f"evaluating best responses is intractable for large k_F, "
            f"reduce k_F or raise the cap")
    return [PureStrategy(s) for s in iter_subsets(game.n, game.k_F)]


@dataclass(frozen=True)
class BestResponseResult:
    """All g-maximizers, the optimistic pick, and both players' values."""

    responses: tuple[PureStrategy, ...]
    follower_value: float
    chosen: PureStrategy
    leader_value: float


class FollowerOracle:
    """Per-instance tables over the follower strategy set.

    Rows of ``activation`` and ``recapture`` hold P_v(y) and P_{F,v}(y)
    for each enumerated y, so utilities against any leader activation
    vector reduce to matrix-vector products.  Built once per instance and
    shared by every solver.
    """

    def __init__(self, game: BipartiteInfluenceGame, cap: int = DEFAULT_FOLLOWER_CAP):
        self.game = game
        self.strategies = enumerate_follower(game, cap)
        self.activation = np.array([payoff.activation_vector(game, y) for y in self.strategies])
        self.recapture = np.array([payoff.recapture_vector(game, y) for y in self.strategies])
        self.activation_sums = self.activation.sum(axis=1)
        self.evaluations = 0  # instrumentation: leader points scored so far

    def __len__(self) -> int:
        return len(self.strategies)

    def utilities(self, pvx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(f(x, y), g(x, y)) over all y, for rows of leader activations.

        Accepts one activation vector or a stack of them; returns arrays
        of shape (rows, |D_F|).
        """
        pvx = np.atleast_2d(np.asarray(pvx, dtype=float))
        self.evaluations += pvx.shape[0]
        flipped = pvx @ self.recapture.T
        f = pvx.sum(axis=1, keepdims=True) - flipped
        g = flipped + (1.0 - pvx) @ self.activation.T
        return f, g

    def best_response_values(self, pvx: np.ndarray,
                             tie_tol: float = TIE_TOL) -> np.ndarray:
        """Optimistic leader value f_BR for each row of leader activations."""
        f, g = self.utilities(pvx)
        gmax = g.max(axis=1, keepdims=True)
        tied = g >= gmax - tie_tol
        return np.where(tied, f, -np.inf).max(axis=1)

    def best_response(self, pvx: np.ndarray,
                      tie_tol: float = TIE_TOL) -> BestResponseResult:
        f, g = self.utilities(pvx)
        f, g = f[0], g[0]
        gmax = float(g.max())
        tied = np.nonzero(g >= gmax - tie_tol)[0]
        fmax = float(f[tied].max())
        # Enumeration is lexicographic, so the first optimistic candidate
        # is the documented tie-break.
        chosen = int(tied[np.nonzero(f[tied] >= fmax - tie_tol)[0][0]])
        return BestResponseResult(
            responses=tuple(self.strategies[i] for i in tied),
            follower_value=gmax,
            chosen=self.strategies[chosen],
            leader_value=float(f[chosen]),
        )


_ORACLES: "weakref.WeakKeyDictionary[BipartiteInfluenceGame, FollowerOracle]" = \
    weakref.WeakKeyDictionary()


def follower_oracle(game: BipartiteInfluenceGame,
                    cap: int = DEFAULT_FOLLOWER_CAP) -> FollowerOracle:
    """The shared per-instance oracle; materialized on first request."""
    oracle = _ORACLES.get(game)
    if oracle is None:
        oracle = FollowerOracle(game, cap)
        _ORACLES[game] = oracle
    return oracle


def best_response(game: BipartiteInfluenceGame, x: MixedStrategy,
                  tie_tol: float = TIE_TOL,
                  oracle: FollowerOracle | None = None) -> BestResponseResult:
    """Optimistic best response to a leader mixed strategy."""
    if oracle is None:
        oracle = follower_oracle(game)
    return oracle.best_response(payoff.mixed_activation_vector(game, x), tie_tol)


def best_response_value(game: BipartiteInfluenceGame, x: MixedStrategy,
                        tie_tol: float = TIE_TOL,
                        oracle: FollowerOracle | None = None) -> float:
    """f_BR(x): the leader's value under the optimistic best response."""
    return best_response(game, x, tie_tol, oracle).leader_value
