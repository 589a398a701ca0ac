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

from qtransduce.agent.adaptation import adapt_online, monitor_episode
from qtransduce.agent.critic import CriticParams, critic_gradient, critic_value, initialize_critic
from qtransduce.agent.mlp import MlpParams, initialize, mlp_backward, mlp_forward, mlp_gradient, zeros
from qtransduce.agent.policy import (
    PolicyGradient,
    PolicyParams,
    initialize_policy,
    policy_log_prob,
    policy_log_prob_gradient,
    policy_mean_action,
    policy_sample,
)
from qtransduce.agent.training import Agent, EpisodeRecord, rollout, train
from qtransduce.agent.types import AdaptationConfig, AdaptationReport, LearningConfig, TrainingReport
from qtransduce.agent.updates import advantage_update, advantages, qac_update, td_error


__all__: tuple[str, ...] = (
    "Agent",
    "EpisodeRecord",
    "MlpParams",
    "PolicyParams",
    "PolicyGradient",
    "CriticParams",
    "LearningConfig",
    "TrainingReport",
    "AdaptationConfig",
    "AdaptationReport",
    "initialize",
    "zeros",
    "mlp_forward",
    "mlp_backward",
    "mlp_gradient",
    "initialize_policy",
    "policy_sample",
    "policy_log_prob",
    "policy_log_prob_gradient",
    "policy_mean_action",
    "initialize_critic",
    "critic_value",
    "critic_gradient",
    "td_error",
    "advantages",
    "qac_update",
    "advantage_update",
    "rollout",
    "train",
    "monitor_episode",
    "adapt_online",
)
