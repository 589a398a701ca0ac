"""
MIT License

Copyright (c) 2024-present Isabelle Phoebe <izzy@uwu.gal>

Permission is hereby granted, free of charge, to any person obtaining a copy
of this software and associated documentation files (the "Software"), to deal
in the Software without restriction, including without limitation the rights
to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
copies of the Software, and to permit persons to whom the Software is
furnished to do so, subject to the following conditions:

The above copyright notice and this permission notice shall be included in all
copies or substantial portions of the Software.

THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
SOFTWARE.
"""

from __future__ import annotations

import logging
from typing import Final, Sequence

import numpy as np

from qtransduce.agent.critic import CriticParams, critic_gradient, critic_value
from qtransduce.agent.mlp import zeros
from qtransduce.agent.policy import PolicyGradient, PolicyParams, policy_log_prob_gradient
from qtransduce.agent.types import LearningConfig
from qtransduce.enums import CriticMode
from qtransduce.env import Action, Transition
from qtransduce.errors import InvalidArgument, NumericalInstability


__all__: Final[tuple[str, ...]] = (
    "td_error",
    "advantages",
    "qac_update",
    "advantage_update",
)


logger: Final[logging.Logger] = logging.getLogger("qtransduce")


def _require_mode(w: CriticParams, mode: CriticMode) -> None:
    if w.mode != mode:
        raise InvalidArgument(f"this update needs a {mode.name} critic, got {w.mode.name}")


def _require_finite(name: str, value: float | np.ndarray, context: str) -> None:
    if not np.all(np.isfinite(value)):
        raise NumericalInstability(f"non-finite {name} in {context}: {value}")


def td_error(w: CriticParams, t: Transition, next_action: Action, gamma: float) -> float:
    """``r + gamma * Q(s', a') - Q(s, a)``, with the bootstrap term dropped on terminal transitions."""
    bootstrap = 0.0 if t.done else gamma * critic_value(w, t.next_state, next_action)
    return t.reward + bootstrap - critic_value(w, t.state, t.action)


def qac_update(
    theta: PolicyParams,
    w: CriticParams,
    t: Transition,
    next_action: Action,
    cfg: LearningConfig,
) -> tuple[PolicyParams, CriticParams, float]:
    """
    One Q actor-critic step: the actor moves along ``Q(s, a) * grad log pi(a|s)`` and the critic
    along ``delta * grad Q(s, a)``.
    """
    _require_mode(w, CriticMode.Q)
    q_value = critic_value(w, t.state, t.action)
    delta = td_error(w, t, next_action, cfg.gamma_rl)
    _require_finite("TD error", delta, "qac_update")

    actor_gradient = policy_log_prob_gradient(theta, t.state, t.action)
    critic_grad = critic_gradient(w, t.state, t.action)
    if not actor_gradient.finite:
        raise NumericalInstability(f"non-finite policy gradient in qac_update (Q(s, a) = {q_value})")
    if not critic_grad.finite:
        raise NumericalInstability(f"non-finite critic gradient in qac_update (TD error = {delta})")

    theta_next = theta.step(actor_gradient, cfg.alpha_theta * q_value)
    w_next = w.step(critic_grad, cfg.alpha_w * delta)
    if not (theta_next.trunk.finite and w_next.trunk.finite):
        raise NumericalInstability(f"parameters diverged in qac_update (Q(s, a) = {q_value}, TD error = {delta})")
    return theta_next, w_next, delta


def advantages(trajectory: Sequence[Transition], v: CriticParams, gamma: float) -> np.ndarray:
    """One-step advantages ``r_t + gamma * V(s_{t+1}) - V(s_t)``."""
    _require_mode(v, CriticMode.V)
    values = np.empty(len(trajectory))
    for index, t in enumerate(trajectory):
        bootstrap = 0.0 if t.done else gamma * critic_value(v, t.next_state)
        values[index] = t.reward + bootstrap - critic_value(v, t.state)
    return values


def advantage_update(
    trajectory: Sequence[Transition],
    theta: PolicyParams,
    v: CriticParams,
    cfg: LearningConfig,
) -> tuple[PolicyParams, CriticParams]:
    """
    Advantage-weighted policy gradient over a whole episode. The actor ascends
    ``sum_t A_t * grad log pi(a_t|s_t)``; the critic descends the squared one-step error with its
    bootstrap target held fixed. Both gradients use the parameters the episode started with.
    """
    if not trajectory:
        raise InvalidArgument("advantage_update needs at least one transition")
    advantage = advantages(trajectory, v, cfg.gamma_rl)
    _require_finite("advantage", advantage, "advantage_update")

    actor_gradient = PolicyGradient(trunk=zeros(theta.trunk.sizes), log_std=np.zeros(theta.action_size))
    critic_grad = zeros(v.trunk.sizes)
    for a_t, t in zip(advantage, trajectory):
        if a_t == 0.0:
            continue
        actor_gradient = actor_gradient + policy_log_prob_gradient(theta, t.state, t.action).scaled(a_t)
        critic_grad = critic_grad + critic_gradient(v, t.state).scaled(a_t)

    if not actor_gradient.finite or not critic_grad.finite:
        raise NumericalInstability(
            f"non-finite gradient in advantage_update over {len(trajectory)} steps "
            f"(advantages in [{advantage.min()}, {advantage.max()}])"
        )
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(f"advantage_update: {len(trajectory)} steps, mean advantage {advantage.mean():.5f}")
    return theta.step(actor_gradient, cfg.alpha_theta), v.step(critic_grad, cfg.alpha_w)
