"""Tests for instance generation, chains, mixing, sampling, and JSON.

Derived quantities get independent oracles: the two-state stationary
distribution and contraction factor are solved by hand below and frozen,
the induced chain is rebuilt with explicit loops, and sampling
frequencies are checked against the exact product law.
"""

import numpy as np
import pytest

from tdclab.errors import DegenerateInstance, InvalidArgument, NotErgodic
from tdclab.mdp import (
    FeatureMap,
    Mdp,
    MixingEstimate,
    PolicyPair,
    generate_garnet,
    induced_chain,
    instance_from_json,
    instance_to_json,
    load_instance,
    mixing_constants,
    sample_step,
    save_instance,
    stationary_distribution,
)
from tdclab.rng import SplitMix64

# Hand-solved oracle for P = [[0.9, 0.1], [0.5, 0.5]]: the stationary
# equations give mu = (5/6, 1/6); the eigenvalues are 1 and
# trace - 1 = 0.4, so the total-variation curve is exactly d(0) * 0.4^t.
TWO_STATE_P = np.array([[0.9, 0.1], [0.5, 0.5]])
TWO_STATE_MU = np.array([5.0 / 6.0, 1.0 / 6.0])
TWO_STATE_RATE = 0.4


def small_instance(seed=42):
    return generate_garnet(20, 4, 5, 6, seed=seed)


# ---------------------------------------------------------------------------
# generator

def test_garnet_shapes_and_invariants():
    mdp, policies, features = small_instance()
    assert mdp.transition.shape == (20, 4, 20)
    assert mdp.reward.shape == (20,)
    assert mdp.gamma == 0.95
    np.testing.assert_allclose(mdp.transition.sum(axis=2), 1.0, atol=1e-12)
    assert np.all(mdp.reward >= 0) and np.all(mdp.reward <= 1)
    # exactly `branching` successors per state-action pair
    support = np.count_nonzero(mdp.transition, axis=2)
    assert np.all(support == 5)
    np.testing.assert_allclose(np.linalg.norm(features.phi, axis=1), 1.0,
                               atol=1e-12)
    assert np.linalg.matrix_rank(features.phi) == 6
    assert np.all(policies.behavior > 0)
    np.testing.assert_allclose(policies.behavior.sum(axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(policies.target.sum(axis=1), 1.0, atol=1e-12)
    np.testing.assert_allclose(policies.rho,
                               policies.target / policies.behavior)


def test_garnet_deterministic_in_seed():
    m1, p1, f1 = small_instance(seed=9)
    m2, p2, f2 = small_instance(seed=9)
    assert np.array_equal(m1.transition, m2.transition)
    assert np.array_equal(m1.reward, m2.reward)
    assert np.array_equal(p1.behavior, p2.behavior)
    assert np.array_equal(f1.phi, f2.phi)
    m3, _, _ = small_instance(seed=10)
    assert not np.array_equal(m1.transition, m3.transition)


def test_garnet_rejects_impossible_feature_count():
    # more feature columns than states can never reach full column rank
    with pytest.raises(InvalidArgument):
        generate_garnet(4, 2, 2, 6, seed=0)


def test_garnet_gives_up_on_unusable_family():
    # two states, one action, branching one: every drawable chain is
    # deterministic and therefore periodic or reducible, so the retry
    # budget must run out
    with pytest.raises(DegenerateInstance):
        generate_garnet(2, 1, 1, 1, seed=0)


def test_garnet_argument_validation():
    with pytest.raises(InvalidArgument):
        generate_garnet(10, 2, 0, 3, seed=0)
    with pytest.raises(InvalidArgument):
        generate_garnet(10, 2, 11, 3, seed=0)
    with pytest.raises(InvalidArgument):
        generate_garnet(10, 2, 5, 3, seed=0, gamma=1.0)


# ---------------------------------------------------------------------------
# domain type validation

def test_mdp_validation():
    P = np.full((2, 1, 2), 0.5)
    Mdp(2, 1, P, np.array([0.5, 0.5]), gamma=0.9)
    with pytest.raises(InvalidArgument):
        Mdp(2, 1, P * 1.01, np.array([0.5, 0.5]), gamma=0.9)
    with pytest.raises(InvalidArgument):
        Mdp(2, 1, P, np.array([1.5, 0.5]), gamma=0.9)
    with pytest.raises(InvalidArgument):
        Mdp(2, 1, P, np.array([0.5, 0.5]), gamma=1.0)


def test_policy_pair_validation():
    good = np.array([[0.5, 0.5], [0.2, 0.8]])
    pair = PolicyPair(behavior=good, target=good)
    assert pair.rho_max == 1.0
    with pytest.raises(InvalidArgument):
        PolicyPair(behavior=np.array([[1.0, 0.0]]),
                   target=np.array([[0.5, 0.5]]))


def test_feature_map_validation():
    FeatureMap(np.array([[1.0], [-1.0]]))
    with pytest.raises(InvalidArgument):
        FeatureMap(np.array([[2.0], [1.0]]))
    with pytest.raises(InvalidArgument):
        FeatureMap(np.array([[0.5, 0.5], [0.5, 0.5]]))


def test_arrays_are_frozen():
    mdp, policies, features = small_instance()
    with pytest.raises(ValueError):
        mdp.transition[0, 0, 0] = 0.5
    with pytest.raises(ValueError):
        features.phi[0, 0] = 0.5


# ---------------------------------------------------------------------------
# induced chain and stationary distribution

def test_induced_chain_matches_loop_oracle():
    mdp, policies, _ = small_instance()
    P = induced_chain(mdp, policies.behavior)
    oracle = np.zeros((20, 20))
    for s in range(20):
        for a in range(4):
            for sn in range(20):
                oracle[s, sn] += policies.behavior[s, a] * mdp.transition[s, a, sn]
    np.testing.assert_allclose(P, oracle, atol=1e-14)
    np.testing.assert_allclose(P.sum(axis=1), 1.0, atol=1e-12)


def test_stationary_two_state_frozen():
    mu = stationary_distribution(TWO_STATE_P)
    np.testing.assert_allclose(mu, TWO_STATE_MU, atol=1e-10)


def test_stationary_fixed_point_on_random_chain():
    mdp, policies, _ = small_instance()
    P = induced_chain(mdp, policies.behavior)
    mu = stationary_distribution(P)
    np.testing.assert_allclose(mu @ P, mu, atol=1e-10)
    assert abs(mu.sum() - 1.0) < 1e-12
    assert np.all(mu > 0)


def test_stationary_rejects_reducible_and_periodic():
    with pytest.raises(NotErgodic):
        stationary_distribution(np.eye(2))
    with pytest.raises(NotErgodic):
        stationary_distribution(np.array([[0.0, 1.0], [1.0, 0.0]]))


# ---------------------------------------------------------------------------
# mixing

def test_mixing_two_state_rate_is_exact():
    mu = stationary_distribution(TWO_STATE_P)
    est = mixing_constants(TWO_STATE_P, mu)
    # repeated matrix powers leave ~1e-7 of roundoff in the fitted rate
    assert abs(est.rho_hat - TWO_STATE_RATE) < 1e-5
    # worst start is state 1: d(0) = 5/6, so m_hat must cover it
    assert est.m_hat * est.rho_hat >= est.tv_curve[0]


def test_mixing_envelope_dominates_curve():
    mdp, policies, _ = small_instance()
    P = induced_chain(mdp, policies.behavior)
    mu = stationary_distribution(P)
    est = mixing_constants(P, mu)
    t = np.arange(1, est.tv_curve.size + 1, dtype=np.float64)
    envelope = est.m_hat * est.rho_hat ** t
    assert np.all(est.tv_curve <= envelope)
    assert est.tv_curve[-1] < 1e-8


def test_mixing_estimate_revalidates_domination():
    with pytest.raises(InvalidArgument):
        MixingEstimate(m_hat=0.1, rho_hat=0.5, horizon=1,
                       tv_curve=np.array([0.9]))


# ---------------------------------------------------------------------------
# sampling

def test_sample_step_consumes_two_uniforms():
    mdp, policies, _ = small_instance()
    rng = SplitMix64(5)
    before = rng.state
    sample_step(mdp, policies, 3, rng)
    gamma64 = 0x9E3779B97F4A7C15
    assert rng.state == (before + 2 * gamma64) % (1 << 64)


def test_sample_step_matches_product_law():
    mdp, policies, _ = small_instance(seed=3)
    s = 7
    rng = SplitMix64(999)
    counts = np.zeros((4, 20))
    n = 200_000
    for _ in range(n):
        obs = sample_step(mdp, policies, s, rng)
        assert obs.s == s
        assert obs.r == mdp.reward[s]
        counts[obs.a, obs.s_next] += 1
    law = policies.behavior[s][:, None] * mdp.transition[s]
    assert np.abs(counts / n - law).sum() < 0.01


def test_sample_step_reproducible():
    mdp, policies, _ = small_instance()
    path1 = [sample_step(mdp, policies, 0, SplitMix64(11)) for _ in range(1)]
    path2 = [sample_step(mdp, policies, 0, SplitMix64(11)) for _ in range(1)]
    assert path1 == path2


# ---------------------------------------------------------------------------
# serialization

def test_json_round_trip_is_bit_exact():
    mdp, policies, features = small_instance(seed=6)
    gen = {"p": 5, "q": 6, "seed": 6}
    text = instance_to_json(mdp, policies, features, gen)
    mdp2, policies2, features2 = instance_from_json(text)
    assert np.array_equal(mdp.transition, mdp2.transition)
    assert np.array_equal(mdp.reward, mdp2.reward)
    assert mdp.gamma == mdp2.gamma and mdp.r_max == mdp2.r_max
    assert np.array_equal(policies.behavior, policies2.behavior)
    assert np.array_equal(policies.target, policies2.target)
    assert np.array_equal(features.phi, features2.phi)


def test_save_load_instance(tmp_path):
    mdp, policies, features = small_instance(seed=8)
    path = tmp_path / "inst.json"
    save_instance(path, mdp, policies, features, {"p": 5, "q": 6, "seed": 8})
    mdp2, _, features2 = load_instance(path)
    assert np.array_equal(mdp.transition, mdp2.transition)
    assert np.array_equal(features.phi, features2.phi)


def test_from_json_rejects_bad_rows():
    mdp, policies, features = small_instance()
    text = instance_to_json(mdp, policies, features)
    bad = text.replace('"gamma": 0.95', '"gamma": 1.5')
    with pytest.raises(InvalidArgument):
        instance_from_json(bad)
