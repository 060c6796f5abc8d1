import warnings

import numpy as np
import pytest

from multitask_irl import (
    Demonstration,
    DegeneratePosteriorError,
    DirichletRewardPrior,
    DiscreteRewardPrior,
    FixedHyperprior,
    FixedTemperature,
    GammaHyperprior,
    Mdp,
    PosteriorEnsemble,
    RewardFunction,
    TemperaturePrior,
    chain_transition,
    importance_weights,
    make_demonstrator,
    metropolis_accept,
    mtpp_mc,
    mtpp_mh,
    posterior_policy,
    simulate,
    substream,
    value_iteration,
)
from oracles import batch_means_se, enumerate_atom_posterior, importance_se

DISCOUNT = 0.95
ATOMS = np.array([[1.0, 0.0], [0.0, 1.0]])
ETA = 2.0


def two_state_cmp():
    return chain_transition(2, 0.1)


def atom_demo(cmp, atom_index, seed, horizon=50, task_id=0):
    """Softmax demonstration generated under one grid atom's reward."""
    mdp = Mdp(cmp, RewardFunction(ATOMS[atom_index]), DISCOUNT)
    demonstrator = make_demonstrator("softmax", mdp, eta=ETA)
    return simulate(mdp, demonstrator, horizon, substream(seed, "demo"), task_id=task_id)


def grid_hyperprior():
    return FixedHyperprior(DiscreteRewardPrior(ATOMS), FixedTemperature(ETA))


def atom_indicators(ensemble, task_id):
    """(K, n_atoms) indicator of which atom each sample assigned the task."""
    m = ensemble.task_index(task_id)
    rewards = ensemble.rewards[:, m, :]
    return np.stack([
        np.all(np.abs(rewards - atom[None, :]) < 1e-9, axis=1).astype(float)
        for atom in ATOMS
    ], axis=1)


def test_importance_weights_basics():
    assert np.array_equal(importance_weights([0.0]), [1.0])
    weights = importance_weights(np.full(5, -3.7))
    assert np.allclose(weights, 0.2, atol=1e-12)
    ll = np.array([[-1.0, -2.0], [-3.0, -0.5], [-2.0, -2.0]])
    direct = importance_weights(ll)
    expected = np.exp(ll.sum(axis=1) - ll.sum(axis=1).max())
    assert np.allclose(direct, expected / expected.sum(), atol=1e-12)


def test_importance_weights_per_task_rescaling_invariance():
    rng = np.random.default_rng(0)
    ll = rng.normal(size=(20, 3)) * 5.0
    shifted = ll + np.array([100.0, -250.0, 3.0])[None, :]
    assert np.allclose(importance_weights(ll), importance_weights(shifted), atol=1e-12)


def test_importance_weights_degenerate_and_validation():
    with pytest.raises(DegeneratePosteriorError) as info:
        importance_weights(np.array([-1e300, -1e300]))
    assert info.value.max_log_likelihood <= -1e299
    with pytest.raises(ValueError):
        importance_weights(np.zeros((2, 2, 2)))
    with pytest.raises(ValueError):
        importance_weights(np.zeros(0))


def test_metropolis_accept_shortcut_and_rejection():
    rng = substream(0, "mh")
    assert metropolis_accept(0.0, rng)
    assert metropolis_accept(3.2, rng)
    hits = sum(metropolis_accept(np.log(0.25), rng) for _ in range(20000))
    assert abs(hits / 20000 - 0.25) < 0.01


def test_metropolis_chain_reaches_target_distribution():
    # Two-state flip chain targeting (0.3, 0.7).
    target = np.array([0.3, 0.7])
    rng = substream(1, "balance")
    state = 0
    visits = np.zeros(2)
    for _ in range(100_000):
        other = 1 - state
        if metropolis_accept(np.log(target[other]) - np.log(target[state]), rng):
            state = other
        visits[state] += 1
    assert abs(visits[1] / visits.sum() - 0.7) < 0.01


def test_mtpp_mc_matches_enumerated_posterior():
    cmp = two_state_cmp()
    demo = atom_demo(cmp, 1, seed=101)
    exact = enumerate_atom_posterior(cmp, [demo], ATOMS, [0.5, 0.5], ETA, DISCOUNT)
    ensemble = mtpp_mc(cmp, [demo], grid_hyperprior(), 4000, DISCOUNT, 17)
    indicators = atom_indicators(ensemble, 0)
    for j in range(2):
        estimate = float(ensemble.weights @ indicators[:, j])
        se = importance_se(ensemble.weights, indicators[:, j], estimate)
        assert abs(estimate - exact[j]) <= 3.0 * se + 1e-3


def test_mtpp_mh_matches_enumerated_posterior():
    cmp = two_state_cmp()
    demo = atom_demo(cmp, 1, seed=101)
    exact = enumerate_atom_posterior(cmp, [demo], ATOMS, [0.5, 0.5], ETA, DISCOUNT)
    ensemble = mtpp_mh(cmp, [demo], grid_hyperprior(), 6000, 1, DISCOUNT, 23)
    assert np.allclose(ensemble.weights, 1.0 / ensemble.n_samples, atol=1e-12)
    indicators = atom_indicators(ensemble, 0)
    for j in range(2):
        estimate = float(indicators[:, j].mean())
        se = batch_means_se(indicators[:, j])
        assert abs(estimate - exact[j]) <= 3.0 * se + 0.01


def test_mtpp_mc_joint_posterior_factorizes_across_tasks():
    # With a degenerate hyperprior the tasks are independent, so each task's
    # marginal must match its own single-task enumeration.
    cmp = two_state_cmp()
    demos = [atom_demo(cmp, 0, seed=7, task_id=0), atom_demo(cmp, 1, seed=8, task_id=1)]
    ensemble = mtpp_mc(cmp, demos, grid_hyperprior(), 4000, DISCOUNT, 31)
    for task_id in (0, 1):
        exact = enumerate_atom_posterior(
            cmp, [demos[task_id]], ATOMS, [0.5, 0.5], ETA, DISCOUNT
        )
        indicators = atom_indicators(ensemble, task_id)
        for j in range(2):
            estimate = float(ensemble.weights @ indicators[:, j])
            se = importance_se(ensemble.weights, indicators[:, j], estimate)
            assert abs(estimate - exact[j]) <= 3.0 * se + 2e-3


def test_mtpp_mc_task_streams_do_not_interact():
    # Adding a second task must not change the candidates drawn for the first.
    cmp = two_state_cmp()
    first = atom_demo(cmp, 0, seed=7, task_id=0)
    second = atom_demo(cmp, 1, seed=8, task_id=1)
    hyper = GammaHyperprior(2)
    alone = mtpp_mc(cmp, [first], hyper, 300, DISCOUNT, 5)
    joint = mtpp_mc(cmp, [first, second], hyper, 300, DISCOUNT, 5)
    assert np.array_equal(alone.rewards[:, 0, :], joint.rewards[:, 0, :])
    assert np.array_equal(alone.temperatures[:, 0], joint.temperatures[:, 0])


def test_mtpp_mc_reproducible_and_seed_sensitive():
    cmp = two_state_cmp()
    demo = atom_demo(cmp, 1, seed=3)
    hyper = GammaHyperprior(2)
    a = mtpp_mc(cmp, [demo], hyper, 200, DISCOUNT, 12)
    b = mtpp_mc(cmp, [demo], hyper, 200, DISCOUNT, 12)
    c = mtpp_mc(cmp, [demo], hyper, 200, DISCOUNT, 13)
    assert np.array_equal(a.weights, b.weights)
    assert np.array_equal(a.rewards, b.rewards)
    assert not np.array_equal(a.weights, c.weights)
    assert a.metadata["kind"] == "mtpp-mc"
    assert a.metadata["seed"] == 12
    assert a.hyper_concentrations.shape == (200, 2)
    assert np.all(a.temperatures > 0)


def test_mtpp_mc_degenerate_posterior_raises():
    # An infinitely sharp demonstrator makes both atoms assign probability
    # zero to one of the demonstrated actions.
    cmp = chain_transition(2, 0.0)
    demo = Demonstration(0, np.array([0, 0]), np.array([0, 1]))
    hyper = FixedHyperprior(DiscreteRewardPrior(ATOMS), FixedTemperature(1e9))
    with pytest.raises(DegeneratePosteriorError):
        mtpp_mc(cmp, [demo], hyper, 50, DISCOUNT, 0)


def test_mtpp_mc_validation():
    cmp = two_state_cmp()
    demo = atom_demo(cmp, 0, seed=1)
    with pytest.raises(ValueError):
        mtpp_mc(cmp, [], GammaHyperprior(2), 10, DISCOUNT, 0)
    with pytest.raises(ValueError):
        mtpp_mc(cmp, [demo], GammaHyperprior(3), 10, DISCOUNT, 0)
    with pytest.raises(ValueError):
        mtpp_mc(cmp, [demo], GammaHyperprior(2), 0, DISCOUNT, 0)
    with pytest.raises(ValueError):
        mtpp_mc(cmp, [demo], GammaHyperprior(2), 10, 1.0, 0)
    with pytest.raises(TypeError):
        mtpp_mc(cmp, [demo], object(), 10, DISCOUNT, 0)


def test_mtpp_mh_hierarchical_chains_and_acceptance_rates():
    cmp = chain_transition(3, 0.2)
    mdp = Mdp(cmp, RewardFunction([0.2, 0.0, 1.0]), DISCOUNT)
    demonstrator = make_demonstrator("softmax", mdp, eta=4.0)
    demos = [
        simulate(mdp, demonstrator, 30, substream(2, "d", m), task_id=m) for m in range(2)
    ]
    ensemble = mtpp_mh(cmp, demos, GammaHyperprior(3), 400, 2, DISCOUNT, 9)
    # 400 iterations over 2 chains, 10% burn-in each: 2 * (200 - 20) kept.
    assert ensemble.n_samples == 360
    assert ensemble.task_ids == (0, 1)
    assert np.allclose(ensemble.weights.sum(), 1.0, atol=1e-12)
    assert ensemble.rewards.shape == (360, 2, 3)
    assert np.all(ensemble.temperatures > 0)
    assert ensemble.hyper_concentrations.shape == (360, 3)
    assert np.all(ensemble.hyper_concentrations > 0)
    rates = ensemble.metadata["acceptance_rates"]
    assert len(rates) == 2
    for chain_rates in rates:
        assert set(chain_rates) == {"hyper", "reward", "temperature"}
        assert all(0.0 <= rate <= 1.0 for rate in chain_rates.values())


def test_mtpp_mh_degenerate_hyperprior_skips_fixed_blocks():
    cmp = two_state_cmp()
    demo = atom_demo(cmp, 1, seed=4)
    ensemble = mtpp_mh(cmp, [demo], grid_hyperprior(), 200, 1, DISCOUNT, 3)
    assert ensemble.hyper_concentrations is None
    assert np.all(ensemble.temperatures == ETA)
    rates = ensemble.metadata["acceptance_rates"]
    assert set(rates[0]) == {"reward"}


def test_mtpp_mh_reproducible():
    cmp = two_state_cmp()
    demo = atom_demo(cmp, 0, seed=6)
    a = mtpp_mh(cmp, [demo], GammaHyperprior(2), 150, 1, DISCOUNT, 21)
    b = mtpp_mh(cmp, [demo], GammaHyperprior(2), 150, 1, DISCOUNT, 21)
    assert np.array_equal(a.rewards, b.rewards)
    assert np.array_equal(a.temperatures, b.temperatures)


def test_mtpp_mh_survives_temperature_underflow():
    # A tiny gamma shape draws temperatures that underflow to exactly zero;
    # the chain must stay finite instead of freezing on a -inf log prior.
    cmp = two_state_cmp()
    demo = atom_demo(cmp, 1, seed=8)
    hyper = FixedHyperprior(DiscreteRewardPrior(ATOMS), TemperaturePrior(1e-4, 1.0))
    with warnings.catch_warnings():
        warnings.simplefilter("error", RuntimeWarning)
        ensemble = mtpp_mh(cmp, [demo], hyper, 200, 1, DISCOUNT, 5)
    assert np.all(np.isfinite(ensemble.temperatures))
    assert np.all(ensemble.temperatures > 0.0)
    assert np.all(np.isfinite(ensemble.rewards))


def test_mtpp_mh_validation():
    cmp = two_state_cmp()
    demo = atom_demo(cmp, 0, seed=6)
    hyper = GammaHyperprior(2)
    with pytest.raises(ValueError):
        mtpp_mh(cmp, [demo], hyper, 100, 0, DISCOUNT, 0)
    with pytest.raises(ValueError):
        mtpp_mh(cmp, [demo], hyper, 3, 4, DISCOUNT, 0)
    with pytest.raises(ValueError):
        mtpp_mh(cmp, [demo], hyper, 100, 1, DISCOUNT, 0, burn_in_fraction=1.0)
    with pytest.raises(ValueError):
        mtpp_mh(cmp, [demo], hyper, 100, 1, DISCOUNT, 0, reward_step=0.0)
    with pytest.raises(TypeError):
        mtpp_mh(cmp, [demo], object(), 100, 1, DISCOUNT, 0)


def test_posterior_ensemble_accessors_and_mean():
    rewards = np.array([[[1.0, 0.0]], [[0.0, 1.0]]])
    ensemble = PosteriorEnsemble(
        task_ids=(4,),
        weights=np.array([0.25, 0.75]),
        rewards=rewards,
        temperatures=np.ones((2, 1)),
        log_likelihoods=np.zeros((2, 1)),
    )
    mean = ensemble.posterior_mean_reward(4)
    assert np.allclose(mean.values, [0.25, 0.75], atol=1e-12)
    assert ensemble.n_samples == 2
    assert ensemble.n_tasks == 1
    with pytest.raises(KeyError):
        ensemble.task_index(0)
    sample = ensemble.sample(1)
    assert sample.weight == 0.75
    assert np.array_equal(sample.rewards, rewards[1])
    with pytest.raises(ValueError):
        PosteriorEnsemble(
            task_ids=(0,),
            weights=np.array([0.3, 0.3]),
            rewards=rewards,
            temperatures=np.ones((2, 1)),
            log_likelihoods=np.zeros((2, 1)),
        )


def test_posterior_ensemble_jsonl_round_trip(tmp_path):
    cmp = two_state_cmp()
    demo = atom_demo(cmp, 1, seed=3)
    ensemble = mtpp_mc(cmp, [demo], GammaHyperprior(2), 60, DISCOUNT, 2)
    path = tmp_path / "ensemble.jsonl"
    ensemble.to_jsonl(path)
    loaded = PosteriorEnsemble.from_jsonl(path)
    assert loaded.task_ids == ensemble.task_ids
    assert np.array_equal(loaded.weights, ensemble.weights)
    assert np.array_equal(loaded.rewards, ensemble.rewards)
    assert np.array_equal(loaded.temperatures, ensemble.temperatures)
    assert np.array_equal(loaded.log_likelihoods, ensemble.log_likelihoods)
    assert loaded.policies is None
    assert loaded.hyper_concentrations is None
    assert loaded.metadata["kind"] == "mtpp-mc"


def test_posterior_ensemble_jsonl_rejects_other_formats(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"format": "something-else"}\n')
    with pytest.raises(ValueError):
        PosteriorEnsemble.from_jsonl(path)


def test_posterior_policy_recovers_demonstrated_goal():
    cmp = two_state_cmp()
    demo = atom_demo(cmp, 1, seed=101, horizon=100)
    ensemble = mtpp_mc(cmp, [demo], grid_hyperprior(), 2000, DISCOUNT, 19)
    policy = posterior_policy(ensemble, 0, cmp, DISCOUNT)
    # Atom (0, 1) rewards the far state; its optimal policy always advances.
    truth = Mdp(cmp, RewardFunction(ATOMS[1]), DISCOUNT)
    _, optimal = value_iteration(truth)
    assert np.array_equal(policy.greedy_actions(), optimal.greedy_actions())
