import numpy as np
import pytest

from stackalloc import (BipartiteInfluenceGame, MixedStrategy, PureStrategy,
                        activation_prob, activation_vector, follower_utility_pure,
                        leader_utility_pure, mixed_activation_vector, phi,
                        phi_constant, recapture_prob, utilities_mixed)

import oracles
from conftest import random_game


def point(media):
    return MixedStrategy.point_mass(PureStrategy.of(media))


def test_activation_prob_uniform_overlap(uniform_overlap):
    assert activation_prob(uniform_overlap, 1, PureStrategy.of([0, 1])) == pytest.approx(0.96, abs=1e-15)
    assert activation_prob(uniform_overlap, 2, PureStrategy.empty()) == 0.0


def test_activation_prob_single_edge():
    game = BipartiteInfluenceGame.build(1, 1, [(0, 0, 0.1, 0.5)], 1, 1)
    assert activation_prob(game, 0, PureStrategy.of([0])) == pytest.approx(0.1, abs=1e-15)


def test_activation_prob_invalid_customer(uniform_overlap):
    with pytest.raises(IndexError):
        activation_prob(uniform_overlap, 9, PureStrategy.of([0]))


def test_recapture_prob_examples(uniform_overlap, no_pure_optimum):
    assert recapture_prob(uniform_overlap, 1, PureStrategy.of([2])) == pytest.approx(0.5, abs=1e-15)
    assert recapture_prob(uniform_overlap, 0, PureStrategy.empty()) == 0.0
    # the lone edge into the last customer has p_F = 0
    assert recapture_prob(no_pure_optimum, 3, PureStrategy.of([2])) == 0.0


def test_leader_utility_pure_examples(overfunding_trap):
    assert leader_utility_pure(overfunding_trap, PureStrategy.of([0, 1, 2]),
                               PureStrategy.of([1])) == pytest.approx(0.0, abs=1e-15)
    assert leader_utility_pure(overfunding_trap, PureStrategy.of([0]),
                               PureStrategy.of([2])) == pytest.approx(1.0, abs=1e-15)
    assert leader_utility_pure(overfunding_trap, PureStrategy.empty(),
                               PureStrategy.of([1])) == 0.0


def test_follower_utility_pure_uniform_overlap_contribution(uniform_overlap):
    z, y = PureStrategy.of([0, 1]), PureStrategy.of([2])
    pv = activation_vector(uniform_overlap, z)
    from stackalloc import recapture_vector
    rec = recapture_vector(uniform_overlap, y)
    pvy = activation_vector(uniform_overlap, y)
    v2 = pv[1] * rec[1] + (1 - pv[1]) * pvy[1]
    assert v2 == pytest.approx(0.512, abs=1e-12)
    assert follower_utility_pure(uniform_overlap, z, y) == pytest.approx(oracles.g_pure(uniform_overlap, (0, 1), (2,)), abs=1e-12)


def test_follower_utility_pure_empty_and_no_pure_optimum(no_pure_optimum):
    assert follower_utility_pure(no_pure_optimum, PureStrategy.of([0]), PureStrategy.empty()) == 0.0
    # frozen from the event-enumeration oracle: 1*0.5 + 1*0.1 = 0.6
    assert oracles.g_pure(no_pure_optimum, (0,), (1,)) == pytest.approx(0.6, abs=1e-12)
    assert follower_utility_pure(no_pure_optimum, PureStrategy.of([0]),
                                 PureStrategy.of([1])) == pytest.approx(0.6, abs=1e-12)


def test_utilities_mixed_no_pure_optimum_mixture(no_pure_optimum):
    x = MixedStrategy({PureStrategy.of([0]): 0.5, PureStrategy.of([1]): 0.5})
    pair = utilities_mixed(no_pure_optimum, x, PureStrategy.of([2]))
    assert pair.leader == pytest.approx(1.1, abs=1e-12)
    assert pair.follower == pytest.approx(0.599, abs=1e-12)


def test_utilities_mixed_point_mass_equals_pure(uniform_overlap):
    rng = np.random.default_rng(0)
    for _ in range(20):
        game = random_game(rng)
        z = tuple(sorted(rng.choice(game.n, size=min(game.n, 2), replace=False).tolist()))
        y = tuple(sorted(rng.choice(game.n, size=min(game.n, 1), replace=False).tolist()))
        pair = utilities_mixed(game, point(z), PureStrategy.of(y))
        assert pair.leader == pytest.approx(
            leader_utility_pure(game, PureStrategy.of(z), PureStrategy.of(y)), abs=1e-12)
        assert pair.follower == pytest.approx(
            follower_utility_pure(game, PureStrategy.of(z), PureStrategy.of(y)), abs=1e-12)


def test_utilities_mixed_private_customers(private_customers):
    third = 1.0 / 3.0
    x = MixedStrategy({PureStrategy.of([0, 3]): third,
                       PureStrategy.of([0, 1, 3]): third,
                       PureStrategy.of([0, 2, 3]): third})
    pair = utilities_mixed(private_customers, x, PureStrategy.of([1, 2]))
    assert pair.leader == pytest.approx(18.0, abs=1e-12)
    assert pair.leader == pytest.approx(
        oracles.f_mixed(private_customers, oracles.weights_of(x), (1, 2)), abs=1e-12)


def test_pure_utilities_match_event_enumeration_oracle():
    rng = np.random.default_rng(21)
    for _ in range(40):
        game = random_game(rng, n_max=5, m_max=6)
        z = tuple(sorted(rng.choice(game.n, size=int(rng.integers(0, game.n + 1)),
                                    replace=False).tolist()))
        y = tuple(sorted(rng.choice(game.n, size=int(rng.integers(0, game.n + 1)),
                                    replace=False).tolist()))
        zs, ys = PureStrategy.of(z), PureStrategy.of(y)
        assert leader_utility_pure(game, zs, ys) == pytest.approx(
            oracles.f_pure(game, z, y), abs=1e-10)
        assert follower_utility_pure(game, zs, ys) == pytest.approx(
            oracles.g_pure(game, z, y), abs=1e-10)


def test_phi_identities_and_empty_response():
    rng = np.random.default_rng(33)
    for _ in range(30):
        game = random_game(rng)
        z = tuple(sorted(rng.choice(game.n, size=min(game.n, game.k_L),
                                    replace=False).tolist()))
        y = tuple(sorted(rng.choice(game.n, size=min(game.n, max(game.k_F, 1)),
                                    replace=False).tolist()))
        x = point(z)
        pvx = mixed_activation_vector(game, x)
        pvy = activation_vector(game, y)
        pair = utilities_mixed(game, x, PureStrategy.of(y))
        value = phi(game, x, PureStrategy.of(y))
        assert value == pytest.approx(pair.leader - float((1 - pvx) @ pvy), abs=1e-12)
        assert value == pytest.approx(-pair.follower + pvx.sum(), abs=1e-12)
        assert phi(game, x, PureStrategy.empty()) == pytest.approx(pvx.sum(), abs=1e-12)


def test_phi_constant_no_pure_optimum(no_pure_optimum):
    assert phi_constant(no_pure_optimum) == pytest.approx(1.1, abs=1e-12)


def test_phi_lower_bound_via_constant():
    rng = np.random.default_rng(44)
    for _ in range(25):
        game = random_game(rng)
        C = phi_constant(game)
        assert C >= -1e-12
        for y in oracles.subsets_up_to(game.n, game.k_F):
            z = tuple(sorted(rng.choice(game.n, size=min(game.n, game.k_L),
                                        replace=False).tolist()))
            assert -phi(game, point(z), PureStrategy.of(y)) <= C + 1e-9


def test_conservation_identity_rapid():
    rng = np.random.default_rng(55)
    for _ in range(50):
        game = random_game(rng)
        z = tuple(sorted(rng.choice(game.n, size=min(game.n, game.k_L),
                                    replace=False).tolist()))
        y = tuple(sorted(rng.choice(game.n, size=min(game.n, max(game.k_F, 1)),
                                    replace=False).tolist()))
        x = point(z)
        pair = utilities_mixed(game, x, PureStrategy.of(y))
        pvx = mixed_activation_vector(game, x)
        pvy = activation_vector(game, y)
        expected = float(pvx.sum() + (1 - pvx) @ pvy)
        assert pair.leader + pair.follower == pytest.approx(expected, abs=1e-12)
        assert 0.0 <= pair.leader <= game.m and 0.0 <= pair.follower <= game.m
        assert pair.leader + pair.follower <= game.m + 1e-12


def test_mixed_evaluation_linear_in_x():
    rng = np.random.default_rng(66)
    for _ in range(20):
        game = random_game(rng, n_max=5)
        subsets = oracles.subsets_up_to(game.n, game.k_L)
        z1 = subsets[int(rng.integers(len(subsets)))]
        z2 = subsets[int(rng.integers(len(subsets)))]
        y = PureStrategy.of(subsets[int(rng.integers(len(subsets)))])
        alpha = float(rng.uniform(0.1, 0.9))
        if z1 == z2:
            continue
        blend = MixedStrategy({PureStrategy.of(z1): alpha, PureStrategy.of(z2): 1 - alpha})
        p1, p2 = utilities_mixed(game, point(z1), y), utilities_mixed(game, point(z2), y)
        pb = utilities_mixed(game, blend, y)
        assert pb.leader == pytest.approx(alpha * p1.leader + (1 - alpha) * p2.leader, abs=1e-12)
        assert pb.follower == pytest.approx(alpha * p1.follower + (1 - alpha) * p2.follower, abs=1e-12)


def test_activation_is_monotone_submodular():
    rng = np.random.default_rng(77)
    for _ in range(60):
        game = random_game(rng, n_max=6)
        if game.n < 2:
            continue
        perm = rng.permutation(game.n)
        cut = int(rng.integers(1, game.n))
        small = set(int(u) for u in perm[:max(1, cut // 2)])
        big = small | set(int(u) for u in perm[:cut])
        outside = [int(u) for u in perm[cut:]]
        if not outside:
            continue
        u = outside[0]
        for v in range(game.m):
            gain_small = (activation_prob(game, v, PureStrategy.of(small | {u}))
                          - activation_prob(game, v, PureStrategy.of(small)))
            gain_big = (activation_prob(game, v, PureStrategy.of(big | {u}))
                        - activation_prob(game, v, PureStrategy.of(big)))
            assert gain_small >= gain_big - 1e-12
            assert gain_big >= -1e-12
