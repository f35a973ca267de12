import numpy as np
import pytest

from coevnet import (
    ActivationSchedule,
    PopulationState,
    StopCriterion,
    TwoLayerNetwork,
    check_thm5,
    check_thm6,
    is_nash,
    simulate,
)
from coevnet.genesis import complete_bipartite, initial_state, random_symmetric_stochastic
from coevnet.oracle import (
    CrossValidation,
    candidate,
    cross_validate,
    enumerate_equilibria,
    equilibria_to_json,
    iterate_opinions,
    opinion_fixed_point,
)

from conftest import rand_net, uniform_params


# --- opinion fixed point -------------------------------------------------------


def test_fixed_point_consensus_is_all_ones():
    net = rand_net(7, seed=1)
    p = uniform_params(7, 0.4, 0.5, -1)
    y = opinion_fixed_point(np.ones(7, int), net, p)
    assert y == pytest.approx(np.ones(7), abs=1e-12)


def test_fixed_point_two_node_solutions(two_node_net):
    y5 = opinion_fixed_point(np.array([1, -1]), two_node_net, uniform_params(2, 0.5, 0.5, 1))
    assert y5 == pytest.approx([1 / 3, -1 / 3], abs=1e-14)
    y7 = opinion_fixed_point(np.array([1, -1]), two_node_net, uniform_params(2, 0.7, 0.6, -1))
    assert y7 == pytest.approx([7 / 13, -7 / 13], abs=1e-14)


def test_fixed_point_residual_bound():
    rng = np.random.default_rng(3)
    for k in range(50):
        n = int(rng.integers(2, 12))
        net = rand_net(n, seed=500 + k)
        p = uniform_params(n, float(rng.uniform(0.05, 0.95)), 0.5, -1)
        x = rng.integers(0, 2, n) * 2 - 1
        y = opinion_fixed_point(x, net, p)
        residual = np.max(np.abs(y - ((1 - p.lam) * (net.W.weights @ y) + p.lam * x)))
        assert residual <= 1e-12


def test_fixed_point_unique_attractor_of_iteration():
    # iterating the opinion update from any start converges geometrically,
    # rate bounded by max(1 - lam)
    rng = np.random.default_rng(5)
    net = rand_net(6, seed=77)
    p = uniform_params(6, 0.3, 0.5, -1)
    x = np.array([1, -1, 1, 1, -1, -1])
    target = opinion_fixed_point(x, net, p)
    for _ in range(5):
        y0 = rng.uniform(-1, 1, 6)
        err0 = np.max(np.abs(y0 - target))
        y40 = iterate_opinions(x, net, p, y0, sweeps=40)
        assert np.max(np.abs(y40 - target)) <= err0 * 0.7 ** 40 + 1e-12


# --- enumeration ------------------------------------------------------------------


def test_enumerate_two_node_anti_pair(two_node_net):
    p = uniform_params(2, 0.5, 0.5, -1)
    cands = enumerate_equilibria(two_node_net, p)
    profiles = {tuple(c.x.tolist()): c for c in cands}
    # the two strictly polarized equilibria
    assert profiles[(1, -1)].marginal is False
    assert profiles[(-1, 1)].marginal is False
    assert profiles[(1, -1)].y_star == pytest.approx([1 / 3, -1 / 3], abs=1e-12)
    # the consensus profiles survive only through exact zero discriminants
    # (payoff tie with the inertia rule), so they are flagged marginal
    assert profiles[(1, 1)].marginal is True
    assert profiles[(-1, -1)].marginal is True
    assert len(cands) == 4


def test_enumerate_lexicographic_order(two_node_net):
    p = uniform_params(2, 0.5, 0.5, -1)
    cands = enumerate_equilibria(two_node_net, p)
    listed = [tuple(c.x.tolist()) for c in cands]
    assert listed == sorted(listed)


def test_enumerate_consensus_present_for_coordinating():
    rng = np.random.default_rng(7)
    for k in range(10):
        n = int(rng.integers(2, 7))
        net = rand_net(n, seed=900 + k)
        p = uniform_params(n, float(rng.uniform(0.2, 0.8)), float(rng.uniform(0.2, 0.8)),
                           +1, float(rng.choice([0.0, 0.5])))
        profiles = {tuple(c.x.tolist()) for c in enumerate_equilibria(net, p)}
        assert tuple([1] * n) in profiles
        assert tuple([-1] * n) in profiles
        assert profiles  # never empty for coordinating populations


def test_enumerate_size_gate():
    net = rand_net(4, seed=11)
    p = uniform_params(4, 0.5, 0.5, -1)
    with pytest.raises(ValueError, match="n_max=3"):
        enumerate_equilibria(net, p, n_max=3)


def test_candidate_consistency_matches_membership():
    rng = np.random.default_rng(13)
    for k in range(30):
        n = int(rng.integers(2, 7))
        net = rand_net(n, seed=1500 + k)
        p = uniform_params(n, float(rng.uniform(0.2, 0.8)), float(rng.uniform(0.2, 0.8)),
                           -1 if k % 2 else 1)
        members = {tuple(c.x.tolist()) for c in enumerate_equilibria(net, p)}
        for code in range(2 ** n):
            x = np.array([1 if (code >> (n - 1 - j)) & 1 else -1 for j in range(n)])
            assert (tuple(x.tolist()) in members) == candidate(net, p, x).consistent


def test_consistent_candidates_are_nash_and_vice_versa():
    rng = np.random.default_rng(17)
    for k in range(30):
        n = int(rng.integers(2, 7))
        net = rand_net(n, seed=2500 + k)
        p = uniform_params(n, float(rng.uniform(0.15, 0.85)), float(rng.uniform(0.15, 0.85)),
                           -1 if k % 2 else 1, float(rng.choice([0.0, 0.5])))
        members = {tuple(c.x.tolist()) for c in enumerate_equilibria(net, p)}
        for code in range(2 ** n):
            x = np.array([1 if (code >> (n - 1 - j)) & 1 else -1 for j in range(n)])
            z = PopulationState(actions=x, opinions=opinion_fixed_point(x, net, p))
            assert is_nash(z, net, p).holds == (tuple(x.tolist()) in members)


def test_thm5_membership_biconditional_small():
    rng = np.random.default_rng(19)
    for k in range(20):
        n = int(rng.integers(2, 11))
        net = rand_net(n, seed=3500 + k)
        lam, beta = float(rng.uniform(0.1, 0.9)), float(rng.uniform(0.1, 0.9))
        rhs = 2 * (1 - lam) * beta / (1 - beta)
        if abs(rhs - 1.0) < 1e-9:
            continue
        p = uniform_params(n, lam, beta, -1, 0.0)
        member = any(
            np.array_equal(c.x, np.ones(n, int)) for c in enumerate_equilibria(net, p)
        )
        assert member == check_thm5(net, p).holds


def test_equilibria_json_schema(two_node_net):
    import json

    p = uniform_params(2, 0.5, 0.5, -1)
    payload = json.loads(equilibria_to_json(enumerate_equilibria(two_node_net, p)))
    assert all(set(item) == {"x", "y", "marginal"} for item in payload)
    assert payload[0]["x"] == [-1, -1]  # lexicographic with -1 < +1


# --- thm6 audit against the oracle ---------------------------------------------------


def test_thm6_bipartite_audit_against_enumeration():
    # the checker's verbatim third inequality rejects the complete-bipartite
    # partition, while the enumeration proves the polarized equilibrium exists
    part = (tuple(range(3)), tuple(range(3, 6)))
    net = TwoLayerNetwork.single_layer(complete_bipartite(part, seed=23))
    p = uniform_params(6, 0.7, 0.6, -1, 0.0)
    report = check_thm6(part, net, p)
    assert not report.holds
    polarized_profile = np.array([1, 1, 1, -1, -1, -1])
    cand = candidate(net, p, polarized_profile)
    assert cand.consistent
    assert np.all(cand.y_star[:3] > 0) and np.all(cand.y_star[3:] < 0)


# --- trace cross-validation -----------------------------------------------------------


def _converged_trace(n, seed):
    net = rand_net(n, seed=seed)
    p = uniform_params(n, 0.5, 0.6, -1)
    z0 = initial_state("random", n, seed + 1)
    trace = simulate(z0, net, p, ActivationSchedule.round_robin(n),
                     StopCriterion(max_steps=5000))
    return trace, net, p


def test_cross_validate_accepts_converged_run():
    trace, net, p = _converged_trace(8, 41)
    assert trace.converged
    report = cross_validate(trace, net, p)
    assert isinstance(report, CrossValidation)
    assert report.ok and report.membership_checked
    assert report.opinion_gap <= 1e-8


def test_cross_validate_size_gate_skips_membership():
    net = TwoLayerNetwork.single_layer(random_symmetric_stochastic(30, 43))
    p = uniform_params(30, 0.5, 0.8, -1)
    z0 = initial_state("positive_opinions", 30, 44)
    trace = simulate(z0, net, p, ActivationSchedule.uniform_random(30, 45),
                     StopCriterion(max_steps=18000))
    assert trace.converged
    report = cross_validate(trace, net, p)
    assert report.ok and not report.membership_checked


def test_cross_validate_flags_truncated_trace():
    trace, net, p = _converged_trace(6, 47)
    # corrupt the terminal opinions: pretend the run stopped mid-transient
    z_bad = PopulationState(actions=trace.final().actions,
                            opinions=np.clip(trace.final().opinions + 0.05, -1, 1))
    bad = type(trace)(
        states=trace.states + (z_bad,),
        active=trace.active + (frozenset({0}),),
        deltas=trace.deltas + ({0: 0.0},),
        converged=True, reason="converged", schedule_kind=trace.schedule_kind,
        seed=trace.seed, window_used=trace.window_used,
        realized_cover=trace.realized_cover, fixed_point_gap=None,
        params=p, net=net,
    )
    report = cross_validate(bad, net, p)
    assert not report.ok
    assert any("agent" in issue and "opinion" in issue for issue in report.issues)


def test_cross_validate_requires_convergence():
    trace, net, p = _converged_trace(5, 53)
    unconverged = type(trace)(
        states=trace.states, active=trace.active, deltas=trace.deltas,
        converged=False, reason="max_steps", schedule_kind=trace.schedule_kind,
        seed=trace.seed, window_used=trace.window_used,
        realized_cover=trace.realized_cover, fixed_point_gap=None,
        params=p, net=net,
    )
    with pytest.raises(ValueError, match="converged"):
        cross_validate(unconverged, net, p)
