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

import dataclasses
import logging
import time
from collections import deque
from typing import Callable, Final

import numpy as np

from qtransduce.agent.training import Agent, train
from qtransduce.agent.types import AdaptationConfig, AdaptationReport, LearningConfig
from qtransduce.errors import PreconditionError
from qtransduce.protocols import EnvironmentProtocol
from qtransduce.utils.functions import derive_seed


__all__: Final[tuple[str, ...]] = (
    "monitor_episode",
    "adapt_online",
)


logger: Final[logging.Logger] = logging.getLogger("qtransduce")

MONITOR_STREAM: Final[int] = 2
BURST_STREAM: Final[int] = 3


def monitor_episode(env: EnvironmentProtocol, agent: Agent, seed: int) -> tuple[float, float]:
    """Run the deterministic policy for one episode; returns (return, final true efficiency)."""
    policy = agent.as_policy()
    observation = env.reset(seed)
    total = 0.0
    while not env.done:
        transition = env.step(policy(observation))
        total += transition.reward
        observation = transition.next_state
    return total, env.true_efficiency


def adapt_online(
    agent: Agent,
    env: EnvironmentProtocol,
    trigger_cfg: AdaptationConfig,
    *,
    learning: LearningConfig | None = None,
    clock: Callable[[], float] = time.monotonic,
) -> tuple[Agent, AdaptationReport]:
    """
    Watch a deployed agent on a possibly drifting environment and fine-tune it when it degrades.

    Monitoring episodes cycle through a fixed panel of ``window`` start seeds, so a full window always
    averages over the same starts. The first full window (and the first after every burst) sets the
    reference; later windows whose average falls more than ``drop_fraction * |reference|`` below it
    trigger a burst of ``burst_episodes`` training episodes on ``env``.
    """
    if agent.reference_return is None:
        raise PreconditionError("adapt_online needs a trained agent (no reference return recorded)")
    window = trigger_cfg.window
    base = learning or agent.learning
    burst_learning = dataclasses.replace(base, episodes=trigger_cfg.burst_episodes, parallel_envs=1)
    panel = [derive_seed(trigger_cfg.monitor_seed, MONITOR_STREAM, index) for index in range(window)]

    history: deque[float] = deque(maxlen=window)
    returns: list[float] = []
    final_etas: list[float] = []
    moving_averages: list[float] = []
    triggers: list[int] = []
    references: list[float] = []
    recoveries: list[float] = []
    reference: float | None = None
    last_burst: int | None = None
    last_burst_at: float | None = None

    for episode in range(trigger_cfg.episodes):
        episode_return, final_eta = monitor_episode(env, agent, panel[episode % window])
        returns.append(episode_return)
        final_etas.append(final_eta)
        history.append(episode_return)
        average = float(np.mean(history))
        moving_averages.append(average)
        if len(history) < window:
            continue

        if reference is None:
            reference = average
            references.append(reference)
            if triggers:
                recoveries.append(average)
            logger.debug(f"adaptation reference set to {reference:.5f} at episode {episode}")
            continue

        threshold = reference - trigger_cfg.drop_fraction * abs(reference)
        if trigger_cfg.drop_fraction >= 1.0 or average >= threshold:
            continue
        if last_burst is not None and episode - last_burst < trigger_cfg.cooldown_episodes:
            continue
        if (
            trigger_cfg.cadence_seconds is not None
            and last_burst_at is not None
            and clock() - last_burst_at < trigger_cfg.cadence_seconds
        ):
            continue

        logger.info(
            f"moving-average return {average:.5f} fell below {threshold:.5f} (reference {reference:.5f}) "
            f"at episode {episode}; fine-tuning for {trigger_cfg.burst_episodes} episodes"
        )
        seed = derive_seed(base.seed, BURST_STREAM, len(triggers))
        train(env, dataclasses.replace(burst_learning, seed=seed), agent.algorithm, agent=agent)
        triggers.append(episode)
        history.clear()
        reference = None
        last_burst = episode
        last_burst_at = clock()

    return agent, AdaptationReport(
        returns=tuple(returns),
        final_etas=tuple(final_etas),
        moving_averages=tuple(moving_averages),
        trigger_episodes=tuple(triggers),
        references=tuple(references),
        recovery_returns=tuple(recoveries),
    )
