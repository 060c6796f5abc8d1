import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multitask_irl import (
    ADVANCE,
    LOG_ZERO,
    RESET,
    ChainSpec,
    Cmp,
    Demonstration,
    Mdp,
    RewardFunction,
    StationaryPolicy,
    batch_policy_values,
    batch_solve_optimal,
    log_likelihood,
    make_chain,
    policy_evaluation,
    policy_transition,
    q_from_v,
    simulate,
    softmax_policy,
    substream,
    value_iteration,
)
from oracles import dense_policy_values, random_cmp

# Hand-solved 3-state deterministic chain, discount 0.95, rewards (0.2, 0, 1):
# advancing forever gives V = (18.25, 19, 20); always resetting gives
# V = (4, 3.8, 4.8).
CHAIN3_OPTIMAL = np.array([18.25, 19.0, 20.0])
CHAIN3_RESET = np.array([4.0, 3.8, 4.8])


@pytest.fixture
def chain3():
    return make_chain(ChainSpec(n_states=3, slip=0.0))


def test_chain_optimal_values_match_hand_solution(chain3):
    values, policy = value_iteration(chain3, 1e-10)
    assert np.allclose(values, CHAIN3_OPTIMAL, atol=1e-7)
    assert np.array_equal(policy.greedy_actions(), [ADVANCE, ADVANCE, ADVANCE])


def test_chain_q_values_match_hand_solution(chain3):
    values, _ = value_iteration(chain3, 1e-10)
    q = q_from_v(chain3, values)
    assert abs(q[0, ADVANCE] - 18.25) < 1e-7
    assert abs(q[0, RESET] - 17.5375) < 1e-7


def test_always_reset_value_matches_hand_solution(chain3):
    policy = StationaryPolicy.from_actions([RESET] * 3, 2)
    values = policy_evaluation(chain3, policy, 1e-10)
    assert np.allclose(values, CHAIN3_RESET, atol=1e-7)


def test_policy_evaluation_matches_dense_solve():
    rng = np.random.default_rng(42)
    for _ in range(5):
        cmp = random_cmp(rng, 4, 3)
        reward = RewardFunction(rng.random(4))
        probs = rng.dirichlet(np.ones(3), size=4)
        mdp = Mdp(cmp, reward, 0.9)
        iterative = policy_evaluation(mdp, StationaryPolicy(probs), 1e-11)
        dense = dense_policy_values(cmp, reward.values, probs, 0.9)
        assert np.allclose(iterative, dense, atol=1e-8)


def test_batch_solve_optimal_matches_value_iteration():
    rng = np.random.default_rng(7)
    cmp = random_cmp(rng, 5, 3)
    rewards = rng.random((6, 5))
    values, actions = batch_solve_optimal(cmp.transition, rewards, 0.95, 1e-10)
    for k in range(6):
        expected, _ = value_iteration(Mdp(cmp, RewardFunction(rewards[k]), 0.95), 1e-10)
        assert np.allclose(values[k], expected, atol=1e-7)
        # Ties can resolve either way at solver precision; the chosen actions
        # must still achieve the optimal value.
        greedy = StationaryPolicy.from_actions(actions[k], 3)
        achieved = policy_evaluation(Mdp(cmp, RewardFunction(rewards[k]), 0.95), greedy, 1e-10)
        assert np.allclose(achieved, expected, atol=1e-6)


def test_batch_solve_optimal_single_reward_shape():
    rng = np.random.default_rng(3)
    cmp = random_cmp(rng, 3, 2)
    reward = rng.random(3)
    values, actions = batch_solve_optimal(cmp.transition, reward, 0.9)
    assert values.shape == (3,)
    assert actions.shape == (3,)


def test_batch_solve_optimal_zero_discount():
    rng = np.random.default_rng(4)
    cmp = random_cmp(rng, 3, 2)
    rewards = rng.random((2, 3))
    values, actions = batch_solve_optimal(cmp.transition, rewards, 0.0)
    assert np.array_equal(values, rewards)
    assert np.array_equal(actions, np.zeros((2, 3), dtype=int))


def test_batch_policy_values_matches_policy_evaluation():
    rng = np.random.default_rng(11)
    cmp = random_cmp(rng, 4, 2)
    rewards = rng.random((3, 4))
    probs = rng.dirichlet(np.ones(2), size=(2, 4))
    out = batch_policy_values(cmp.transition, rewards, probs, 0.9)
    assert out.shape == (2, 3, 4)
    for k in range(2):
        for n in range(3):
            expected = policy_evaluation(
                Mdp(cmp, RewardFunction(rewards[n]), 0.9), StationaryPolicy(probs[k]), 1e-11
            )
            assert np.allclose(out[k, n], expected, atol=1e-8)


def test_value_iteration_zero_discount_returns_rewards(chain3):
    mdp = Mdp(chain3.cmp, chain3.reward, 0.0)
    values, _ = value_iteration(mdp)
    assert np.array_equal(values, chain3.reward.values)


def test_value_iteration_breaks_ties_toward_lowest_action():
    # Both actions share one kernel, so every state is a tie.
    kernel = np.zeros((3, 2, 3))
    kernel[:, 0] = np.eye(3)
    kernel[:, 1] = np.eye(3)
    mdp = Mdp(Cmp(kernel), RewardFunction([0.1, 0.5, 0.9]), 0.9)
    _, policy = value_iteration(mdp)
    assert np.array_equal(policy.greedy_actions(), [0, 0, 0])


def test_policy_transition_rows_are_distributions():
    rng = np.random.default_rng(9)
    cmp = random_cmp(rng, 4, 3)
    policy = StationaryPolicy(rng.dirichlet(np.ones(3), size=4))
    kernel = policy_transition(cmp, policy)
    assert kernel.shape == (4, 4)
    assert np.allclose(kernel.sum(axis=1), 1.0, atol=1e-12)


def test_softmax_policy_known_ratio():
    q = np.array([[np.log(4.0), 0.0]])
    policy = softmax_policy(q, 1.0)
    assert np.allclose(policy.action_probs, [[0.8, 0.2]], atol=1e-12)


def test_softmax_policy_eta_zero_is_uniform():
    q = np.array([[3.0, -1.0, 0.5]])
    policy = softmax_policy(q, 0.0)
    assert np.allclose(policy.action_probs, 1.0 / 3.0, atol=1e-12)


def test_softmax_policy_shift_invariance_and_large_eta():
    rng = np.random.default_rng(2)
    q = rng.normal(size=(4, 3))
    shifted = q + rng.normal(size=(4, 1))
    a = softmax_policy(q, 2.5).action_probs
    b = softmax_policy(shifted, 2.5).action_probs
    assert np.allclose(a, b, atol=1e-12)
    sharp = softmax_policy(q, 1e6).action_probs
    assert np.array_equal(sharp.argmax(axis=1), q.argmax(axis=1))


def test_softmax_policy_rejects_bad_inputs():
    with pytest.raises(ValueError):
        softmax_policy(np.array([1.0, 2.0]), 1.0)
    with pytest.raises(ValueError):
        softmax_policy(np.array([[1.0, np.inf]]), 1.0)
    with pytest.raises(ValueError):
        softmax_policy(np.array([[1.0, 2.0]]), -0.5)


def test_log_likelihood_uniform_policy():
    policy = StationaryPolicy.uniform(3, 2)
    demo = Demonstration(0, np.zeros(10, dtype=int), np.zeros(10, dtype=int))
    assert abs(log_likelihood(policy, demo) - (-10.0 * np.log(2.0))) < 1e-12


def test_log_likelihood_impossible_step_is_log_zero():
    policy = StationaryPolicy.from_actions([0, 0], 2)
    demo = Demonstration(0, np.array([0, 1]), np.array([0, 1]))
    assert log_likelihood(policy, demo) == LOG_ZERO


def test_log_likelihood_checks_bounds():
    policy = StationaryPolicy.uniform(2, 2)
    demo = Demonstration(0, np.array([5]), np.array([0]))
    with pytest.raises(ValueError):
        log_likelihood(policy, demo)


def test_simulate_reproducible_and_in_bounds(chain3):
    policy = StationaryPolicy.uniform(3, 2)
    a = simulate(chain3, policy, 40, substream(5, "sim"), task_id=2)
    b = simulate(chain3, policy, 40, substream(5, "sim"), task_id=2)
    assert np.array_equal(a.states, b.states)
    assert np.array_equal(a.actions, b.actions)
    assert a.task_id == 2
    assert len(a) == 40
    assert a.states[0] == 0
    assert np.all((a.states >= 0) & (a.states < 3))
    assert np.all((a.actions >= 0) & (a.actions < 2))


def test_simulate_initial_distribution_point_mass(chain3):
    policy = StationaryPolicy.uniform(3, 2)
    start = np.array([0.0, 1.0, 0.0])
    demo = simulate(chain3, policy, 5, substream(0, "s"), initial_state_probs=start)
    assert demo.states[0] == 1


def test_simulate_empirical_frequencies_match_policy_and_kernel():
    mdp = make_chain(ChainSpec(n_states=3, slip=0.3))
    policy = StationaryPolicy.uniform(3, 2)
    demo = simulate(mdp, policy, 20000, substream(99, "freq"))
    assert abs(np.mean(demo.actions == RESET) - 0.5) < 0.015
    # Transitions out of (state 0, advance) land on state 1 w.p. 0.7.
    here = (demo.states[:-1] == 0) & (demo.actions[:-1] == ADVANCE)
    landed = demo.states[1:][here]
    assert abs(np.mean(landed == 1) - 0.7) < 0.03


def test_simulate_accepts_bare_cmp(chain3):
    policy = StationaryPolicy.uniform(3, 2)
    demo = simulate(chain3.cmp, policy, 5, substream(1, "cmp"))
    assert len(demo) == 5


def test_simulate_validates_inputs(chain3):
    policy = StationaryPolicy.uniform(3, 2)
    with pytest.raises(ValueError):
        simulate(chain3, policy, 0, substream(0, "x"))
    with pytest.raises(ValueError):
        simulate(chain3, policy, 5, substream(0, "x"), initial_state_probs=[0.5, 0.5])
    with pytest.raises(ValueError):
        simulate(chain3, StationaryPolicy.uniform(4, 2), 5, substream(0, "x"))
    with pytest.raises(TypeError):
        simulate(object(), policy, 5, substream(0, "x"))


def test_cmp_validation():
    with pytest.raises(ValueError):
        Cmp(np.ones((2, 2)))
    bad = np.full((2, 2, 2), 0.6)
    with pytest.raises(ValueError):
        Cmp(bad)
    negative = np.zeros((2, 1, 2))
    negative[:, 0, 0] = 1.5
    negative[:, 0, 1] = -0.5
    with pytest.raises(ValueError):
        Cmp(negative)


def test_reward_function_validation():
    with pytest.raises(ValueError):
        RewardFunction([0.5, 1.2])
    with pytest.raises(ValueError):
        RewardFunction([-0.1, 0.5])
    with pytest.raises(ValueError):
        RewardFunction([[0.1, 0.2]])
    with pytest.raises(ValueError):
        RewardFunction([np.nan])


def test_mdp_validation(chain3):
    with pytest.raises(ValueError):
        Mdp(chain3.cmp, RewardFunction([0.5, 0.5]), 0.9)
    with pytest.raises(ValueError):
        Mdp(chain3.cmp, chain3.reward, 1.0)


def test_stationary_policy_validation_and_readonly():
    with pytest.raises(ValueError):
        StationaryPolicy(np.array([[0.5, 0.4]]))
    with pytest.raises(ValueError):
        StationaryPolicy(np.array([[1.5, -0.5]]))
    policy = StationaryPolicy.uniform(2, 2)
    with pytest.raises(ValueError):
        policy.action_probs[0, 0] = 1.0


def test_demonstration_validation():
    with pytest.raises(ValueError):
        Demonstration(0, np.array([], dtype=int), np.array([], dtype=int))
    with pytest.raises(ValueError):
        Demonstration(0, np.array([0, 1]), np.array([0]))
    with pytest.raises(ValueError):
        Demonstration(-1, np.array([0]), np.array([0]))
    with pytest.raises(ValueError):
        Demonstration(0, np.array([-1]), np.array([0]))
    demo = Demonstration(1, np.array([0, 1]), np.array([1, 0]))
    with pytest.raises(ValueError):
        demo.check_bounds(2, 1)
    demo.check_bounds(2, 2)


@st.composite
def mdp_instances(draw):
    n_states = draw(st.integers(2, 5))
    n_actions = draw(st.integers(2, 4))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    discount = draw(st.sampled_from([0.0, 0.5, 0.9, 0.97]))
    rng = np.random.default_rng(seed)
    cmp = random_cmp(rng, n_states, n_actions)
    return Mdp(cmp, RewardFunction(rng.random(n_states)), discount)


@settings(max_examples=60, deadline=None)
@given(mdp_instances())
def test_value_iteration_fixed_point_property(mdp):
    values, policy = value_iteration(mdp, 1e-10)
    backup = mdp.reward.values[:, None] + mdp.discount * mdp.cmp.transition @ values
    assert np.max(np.abs(backup.max(axis=1) - values)) <= 1e-9
    assert np.all(values >= -1e-9)
    assert np.all(values <= 1.0 / (1.0 - mdp.discount) + 1e-6)
    achieved = policy_evaluation(mdp, policy, 1e-10)
    assert np.allclose(achieved, values, atol=1e-6)


@settings(max_examples=60, deadline=None)
@given(mdp_instances(), st.integers(0, 2 ** 16))
def test_greedy_dominates_random_policy_property(mdp, policy_seed):
    rng = np.random.default_rng(policy_seed)
    values, _ = value_iteration(mdp, 1e-10)
    other = StationaryPolicy(rng.dirichlet(np.ones(mdp.cmp.n_actions), size=mdp.cmp.n_states))
    assert np.all(policy_evaluation(mdp, other, 1e-10) <= values + 1e-6)
