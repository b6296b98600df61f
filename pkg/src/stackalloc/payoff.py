"""Exact utility evaluation.

For a pure strategy ``z`` the chance that customer ``v`` is activated is

    P_v(z) = 1 - prod_{u in N_v, z_u = 1} (1 - p_uv)

and the follower's recapture chance P_{F,v}(y) is the same product over
``p_F``.  Leader and follower utilities are

    f(z, y) = sum_v P_v(z) * (1 - P_{F,v}(y))
    g(z, y) = sum_v [P_v(z) * P_{F,v}(y) + (1 - P_v(z)) * P_v(y)]

and extend linearly to leader mixed strategies through
P_v(x) = sum_z x_z P_v(z).  The zero-sum surrogate used by the
approximation solver is phi(x, y) = -g(x, y) + sum_v P_v(x), bounded
below by -C where C = max_y sum_v P_v(y).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import BipartiteInfluenceGame, MixedStrategy, PureStrategy


@dataclass(frozen=True)
class UtilityPair:
    """Leader (retained) and follower (acquired) expected customer counts."""

    leader: float
    follower: float


def _as_mask(game: BipartiteInfluenceGame, media) -> np.ndarray:
    if isinstance(media, PureStrategy):
        return media.mask(game.n)
    arr = np.asarray(media)
    if arr.dtype == bool:
        return arr
    mask = np.zeros(game.n, dtype=bool)
    mask[arr.astype(int)] = True
    return mask


def _survival(game: BipartiteInfluenceGame, media, probs: np.ndarray) -> np.ndarray:
    """Per-customer product of (1 - prob) over the selected media's edges."""
    mask = _as_mask(game, media)
    s = np.ones(game.m)
    sel = mask[game.edge_media]
    if sel.any():
        np.multiply.at(s, game.edge_customers[sel], 1.0 - probs[sel])
    return s


def activation_vector(game: BipartiteInfluenceGame, media) -> np.ndarray:
    """P_v(z) for every customer v."""
    return 1.0 - _survival(game, media, game.edge_p)


def recapture_vector(game: BipartiteInfluenceGame, media) -> np.ndarray:
    """P_{F,v}(y) for every customer v."""
    return 1.0 - _survival(game, media, game.edge_pf)


def mixed_activation_vector(game: BipartiteInfluenceGame, x: MixedStrategy) -> np.ndarray:
    """P_v(x) = sum over the support of x_z * P_v(z); O(|E| * |supp(x)|)."""
    pvx = np.zeros(game.m)
    for z, w in x.weights.items():
        pvx += w * activation_vector(game, z)
    return pvx


def _activation_of(game: BipartiteInfluenceGame, x) -> np.ndarray:
    if isinstance(x, MixedStrategy):
        return mixed_activation_vector(game, x)
    return activation_vector(game, x)


def activation_prob(game: BipartiteInfluenceGame, v: int, z) -> float:
    """P_v(z); the empty selection never activates anyone."""
    if not 0 <= v < game.m:
        raise IndexError(f"invalid customer index {v}")
    mask = _as_mask(game, z)
    prod = 1.0
    for u in game.customer_neighbors[v]:
        if mask[u]:
            prod *= 1.0 - game.p[(u, v)]
    return 1.0 - prod


def recapture_prob(game: BipartiteInfluenceGame, v: int, y) -> float:
    """P_{F,v}(y)."""
    if not 0 <= v < game.m:
        raise IndexError(f"invalid customer index {v}")
    mask = _as_mask(game, y)
    prod = 1.0
    for u in game.customer_neighbors[v]:
        if mask[u]:
            prod *= 1.0 - game.p_F[(u, v)]
    return 1.0 - prod


def leader_utility_pure(game: BipartiteInfluenceGame, z, y) -> float:
    """f(z, y): expected customers activated by the leader and kept."""
    pv = activation_vector(game, z)
    rec = recapture_vector(game, y)
    return float(pv @ (1.0 - rec))


def follower_utility_pure(game: BipartiteInfluenceGame, z, y) -> float:
    """g(z, y): customers flipped from the leader plus fresh activations."""
    pv = activation_vector(game, z)
    rec = recapture_vector(game, y)
    pvy = activation_vector(game, y)
    return float(pv @ rec + (1.0 - pv) @ pvy)


def utilities_mixed(game: BipartiteInfluenceGame, x: MixedStrategy, y) -> UtilityPair:
    """f and g at a leader mix x and follower pure strategy y."""
    pvx = mixed_activation_vector(game, x)
    rec = recapture_vector(game, y)
    pvy = activation_vector(game, y)
    leader = float(pvx @ (1.0 - rec))
    follower = float(pvx @ rec + (1.0 - pvx) @ pvy)
    return UtilityPair(leader=leader, follower=follower)


def phi(game: BipartiteInfluenceGame, x, y) -> float:
    """Zero-sum surrogate: -g(x, y) + sum_v P_v(x)."""
    pvx = _activation_of(game, x)
    rec = recapture_vector(game, y)
    pvy = activation_vector(game, y)
    g = float(pvx @ rec + (1.0 - pvx) @ pvy)
    return float(pvx.sum()) - g


def phi_constant(game: BipartiteInfluenceGame, cap: int | None = None) -> float:
    """C = max over follower pure strategies of sum_v P_v(y), by enumeration."""
    from . import follower as _follower

    kwargs = {} if cap is None else {"cap": cap}
    oracle = _follower.follower_oracle(game, **kwargs)
    return float(oracle.activation_sums.max(initial=0.0))
