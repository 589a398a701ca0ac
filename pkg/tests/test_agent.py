import math

import numpy as np
import pytest
import scipy.integrate

from qtransduce.agent import (
    CriticParams,
    LearningConfig,
    MlpParams,
    PolicyParams,
    advantage_update,
    advantages,
    critic_gradient,
    critic_value,
    initialize,
    initialize_critic,
    initialize_policy,
    mlp_backward,
    mlp_forward,
    policy_log_prob,
    policy_log_prob_gradient,
    policy_mean_action,
    policy_sample,
    qac_update,
    td_error,
    zeros,
)
from qtransduce.enums import CriticMode
from qtransduce.env import Action, Transition
from qtransduce.errors import InvalidArgument

H = 1e-5
SEEDS = range(10)


def _relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    scale = max(np.linalg.norm(analytic) + np.linalg.norm(numeric), 1e-12)
    return float(np.linalg.norm(analytic - numeric) / scale)


def _finite_difference(f, vector: np.ndarray) -> np.ndarray:
    gradient = np.empty_like(vector)
    for index in range(vector.size):
        up, down = vector.copy(), vector.copy()
        up[index] += H
        down[index] -= H
        gradient[index] = (f(up) - f(down)) / (2 * H)
    return gradient


def _constant_critic(value: float, inputs: int, mode: CriticMode = CriticMode.Q) -> CriticParams:
    trunk = zeros((inputs, 4, 1))
    biases = (trunk.biases[0], np.array([value]))
    return CriticParams(trunk=MlpParams(weights=trunk.weights, biases=biases), mode=mode)


def test_forward_of_zero_network_is_zero():
    assert np.array_equal(mlp_forward(zeros((3, 5, 2)), np.array([1.0, -2.0, 3.0])), np.zeros(2))


def test_forward_of_identity_layer():
    p = MlpParams(weights=(np.eye(3),), biases=(np.zeros(3),))
    x = np.array([0.5, -1.5, 2.0])
    assert np.array_equal(mlp_forward(p, x), x)


def test_forward_by_hand():
    p = MlpParams(
        weights=(np.array([[1.0, 2.0]]), np.array([[3.0]])),
        biases=(np.array([0.5]), np.array([-1.0])),
    )
    output = mlp_forward(p, np.array([0.1, 0.2]))
    assert output == pytest.approx([3.0 * math.tanh(1.0) - 1.0])


def test_forward_rejects_wrong_input():
    with pytest.raises(InvalidArgument):
        mlp_forward(zeros((3, 2)), np.ones(4))
    with pytest.raises(InvalidArgument):
        MlpParams(weights=(np.ones((2, 3)),), biases=(np.ones(3),))


def test_flat_layout_round_trips():
    p = initialize((4, 6, 2), np.random.default_rng(0))
    assert MlpParams.from_flat(p.sizes, p.flat()).same_as(p)


@pytest.mark.parametrize("seed", SEEDS)
def test_backward_matches_finite_differences(seed: int):
    rng = np.random.default_rng(seed)
    sizes = (4, 8, 8, 2)
    p = initialize(sizes, rng)
    x = rng.normal(size=4)
    upstream = rng.normal(size=2)

    gradient, input_gradient = mlp_backward(p, x, upstream)

    def loss(vector: np.ndarray) -> float:
        return float(upstream @ mlp_forward(MlpParams.from_flat(sizes, vector), x))

    assert _relative_error(gradient.flat(), _finite_difference(loss, p.flat())) < 1e-4
    numeric_input = _finite_difference(lambda v: float(upstream @ mlp_forward(p, v)), x)
    assert _relative_error(input_gradient, numeric_input) < 1e-4


def test_zero_upstream_gives_zero_gradient():
    p = initialize((3, 5, 2), np.random.default_rng(1))
    gradient, input_gradient = mlp_backward(p, np.ones(3), np.zeros(2))
    assert not np.any(gradient.flat())
    assert not np.any(input_gradient)


@pytest.mark.parametrize("seed", SEEDS)
def test_policy_log_prob_gradient_matches_finite_differences(seed: int):
    rng = np.random.default_rng(seed)
    theta = initialize_policy(4, 2, rng, hidden=(8,), initial_log_std=-0.7)
    s = rng.normal(size=4)
    action, _ = policy_sample(theta, s, rng)
    sizes = theta.trunk.sizes

    gradient = policy_log_prob_gradient(theta, s, action)

    def by_trunk(vector: np.ndarray) -> float:
        perturbed = PolicyParams(trunk=MlpParams.from_flat(sizes, vector), log_std=theta.log_std, bound=theta.bound)
        return policy_log_prob(perturbed, s, action)

    def by_log_std(vector: np.ndarray) -> float:
        return policy_log_prob(PolicyParams(trunk=theta.trunk, log_std=vector, bound=theta.bound), s, action)

    assert _relative_error(gradient.trunk.flat(), _finite_difference(by_trunk, theta.trunk.flat())) < 1e-4
    assert _relative_error(gradient.log_std, _finite_difference(by_log_std, theta.log_std)) < 1e-4


@pytest.mark.parametrize("seed", SEEDS)
def test_critic_gradient_matches_finite_differences(seed: int):
    rng = np.random.default_rng(seed)
    w = initialize_critic(4, 2, CriticMode.Q, rng, hidden=(8, 8), action_scale=0.2)
    s = rng.normal(size=4)
    action = Action(delta=rng.uniform(-0.2, 0.2, size=2))
    sizes = w.trunk.sizes

    def value(vector: np.ndarray) -> float:
        perturbed = CriticParams(trunk=MlpParams.from_flat(sizes, vector), mode=w.mode, action_scale=w.action_scale)
        return critic_value(perturbed, s, action)

    analytic = critic_gradient(w, s, action).flat()
    assert _relative_error(analytic, _finite_difference(value, w.trunk.flat())) < 1e-4


def test_log_std_is_clamped():
    trunk = zeros((1, 1))
    assert PolicyParams(trunk=trunk, log_std=[-10.0]).log_std[0] == -5.0
    assert PolicyParams(trunk=trunk, log_std=[4.0]).log_std[0] == 1.0


def test_narrow_policy_samples_its_mean():
    rng = np.random.default_rng(0)
    theta = initialize_policy(4, 2, rng, initial_log_std=-5.0)
    s = np.array([0.3, 0.1, -0.2, 0.5])
    mean = policy_mean_action(theta, s).delta
    for _ in range(20):
        action, _ = policy_sample(theta, s, rng)
        assert np.all(np.abs(action.delta) < theta.bound)
        np.testing.assert_allclose(action.delta, mean, atol=0.2 * 5 * math.exp(-5.0))


def test_sampled_log_density_matches_log_prob():
    rng = np.random.default_rng(3)
    theta = initialize_policy(4, 2, rng)
    s = rng.normal(size=4)
    action, logp = policy_sample(theta, s, rng)
    assert policy_log_prob(theta, s, action) == logp
    assert policy_log_prob(theta, s, Action(delta=action.delta)) == pytest.approx(logp, abs=1e-6)


def test_sampling_is_deterministic_per_generator():
    theta = initialize_policy(4, 2, np.random.default_rng(0))
    s = np.ones(4)
    first = [policy_sample(theta, s, np.random.default_rng(9))[0].delta for _ in range(3)]
    second = [policy_sample(theta, s, np.random.default_rng(9))[0].delta for _ in range(3)]
    assert all(np.array_equal(a, b) for a, b in zip(first, second))


@pytest.mark.parametrize("log_std", [-1.0, 0.0])
def test_squashed_density_integrates_to_one(log_std: float):
    trunk = MlpParams(weights=(np.zeros((1, 1)),), biases=(np.array([0.3]),))
    theta = PolicyParams(trunk=trunk, log_std=[log_std], bound=0.2)
    s = np.zeros(1)

    def density(a: float) -> float:
        return math.exp(policy_log_prob(theta, s, Action(delta=[a])))

    total, _ = scipy.integrate.quad(density, -0.2, 0.2, limit=200)
    assert total == pytest.approx(1.0, abs=1e-3)


def _transition(reward: float, done: bool = False) -> Transition:
    state = np.array([1.0, 0.0])
    action = Action(delta=np.array([0.05]))
    return Transition(state=state, action=action, reward=reward, next_state=np.array([0.0, 1.0]), done=done)


def test_td_error_of_constant_critic():
    w = _constant_critic(2.0, 3)
    cfg = LearningConfig(gamma_rl=0.9)
    theta = initialize_policy(2, 1, np.random.default_rng(0), hidden=(4,))
    _, _, delta = qac_update(theta, w, _transition(1.0), Action(delta=np.array([0.1])), cfg)
    assert delta == pytest.approx(0.8)
    assert td_error(w, _transition(2.0, done=True), Action.zero(1), 0.9) == 0.0


def test_qac_with_zero_rates_changes_nothing():
    w = _constant_critic(2.0, 3)
    theta = initialize_policy(2, 1, np.random.default_rng(0), hidden=(4,))
    cfg = LearningConfig(alpha_theta=0.0, alpha_w=0.0, gamma_rl=0.9)
    theta_next, w_next, _ = qac_update(theta, w, _transition(1.0), Action.zero(1), cfg)
    assert theta_next.same_as(theta)
    assert w_next.same_as(w)


def test_qac_moves_towards_the_target():
    w = _constant_critic(2.0, 3)
    theta = initialize_policy(2, 1, np.random.default_rng(0), hidden=(4,))
    cfg = LearningConfig(alpha_theta=1e-3, alpha_w=1e-2, gamma_rl=0.9)
    t = _transition(1.0)
    theta_next, w_next, delta = qac_update(theta, w, t, Action(delta=np.array([0.1])), cfg)
    assert critic_value(w_next, t.state, t.action) == pytest.approx(2.0 + 1e-2 * delta)
    assert policy_log_prob(theta_next, t.state, t.action) > policy_log_prob(theta, t.state, t.action)


def test_qac_needs_a_q_critic():
    v = _constant_critic(0.0, 2, CriticMode.V)
    theta = initialize_policy(2, 1, np.random.default_rng(0))
    with pytest.raises(InvalidArgument):
        qac_update(theta, v, _transition(1.0), Action.zero(1), LearningConfig())


def test_advantages_are_one_step_errors():
    v = _constant_critic(0.5, 2, CriticMode.V)
    trajectory = [_transition(1.0), _transition(0.0, done=True)]
    np.testing.assert_allclose(advantages(trajectory, v, 0.9), [1.0 + 0.45 - 0.5, -0.5])


def test_advantage_update_without_signal_is_a_no_op():
    v = _constant_critic(0.0, 2, CriticMode.V)
    theta = initialize_policy(2, 1, np.random.default_rng(0))
    trajectory = [_transition(0.0), _transition(0.0, done=True)]
    theta_next, v_next = advantage_update(trajectory, theta, v, LearningConfig())
    assert theta_next.same_as(theta)
    assert v_next.same_as(v)


def test_single_step_advantage_update():
    v = _constant_critic(0.5, 2, CriticMode.V)
    theta = initialize_policy(2, 1, np.random.default_rng(0))
    cfg = LearningConfig(alpha_theta=1e-3, alpha_w=0.1)
    t = _transition(1.0, done=True)
    theta_next, v_next = advantage_update([t], theta, v, cfg)
    assert critic_value(v_next, t.state) == pytest.approx(0.5 + 0.1 * 0.5)
    assert policy_log_prob(theta_next, t.state, t.action) > policy_log_prob(theta, t.state, t.action)


def test_advantage_update_needs_transitions():
    v = _constant_critic(0.0, 2, CriticMode.V)
    theta = initialize_policy(2, 1, np.random.default_rng(0))
    with pytest.raises(InvalidArgument):
        advantage_update([], theta, v, LearningConfig())
