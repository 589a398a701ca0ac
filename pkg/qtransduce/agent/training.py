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

import asyncio
import logging
import time
from collections import deque
from dataclasses import dataclass
from typing import Any, Callable, Final, Iterable, Iterator

import numpy as np

from qtransduce.agent.critic import CriticParams, initialize_critic
from qtransduce.agent.policy import PolicyParams, initialize_policy, policy_mean_action, policy_sample
from qtransduce.agent.types import LearningConfig, TrainingReport
from qtransduce.agent.updates import advantage_update, qac_update
from qtransduce.enums import Algorithm, CriticMode
from qtransduce.env import Action, EnvConfig, Transition, TransducerEnv
from qtransduce.errors import InvalidArgument
from qtransduce.protocols import EnvFactory, EnvironmentProtocol, ObservationLike, PolicyFunc
from qtransduce.utils.functions import derive_seed, utc_now


__all__: Final[tuple[str, ...]] = (
    "Agent",
    "EpisodeRecord",
    "train",
    "rollout",
)


logger: Final[logging.Logger] = logging.getLogger("qtransduce")

CRITIC_MODES: Final[dict[Algorithm, CriticMode]] = {
    Algorithm.QAC: CriticMode.Q,
    Algorithm.ADVANTAGE: CriticMode.V,
}
POLICY_STREAM: Final[int] = 1
PROGRESS_EVERY: Final[int] = 100


class Agent:
    """
    Actor, critic and the generator that drives action sampling. The single owner of the parameters:
    every update replaces them through :meth:`apply`.
    """

    __slots__: Final[tuple[str, ...]] = (
        "_policy",
        "_critic",
        "_algorithm",
        "_rng",
        "_learning",
        "_reference_return",
        "_episodes_trained",
        "_steps_taken",
        "_recent_returns",
    )

    def __init__(
        self,
        *,
        policy: PolicyParams,
        critic: CriticParams,
        algorithm: Algorithm,
        rng: np.random.Generator,
        learning: LearningConfig,
        reference_return: float | None = None,
        episodes_trained: int = 0,
        steps_taken: int = 0,
        recent_returns: Iterable[float] = (),
    ) -> None:
        algorithm = Algorithm(algorithm)
        if critic.mode != CRITIC_MODES[algorithm]:
            expected = CRITIC_MODES[algorithm].name
            raise InvalidArgument(f"{algorithm.value} needs a {expected} critic, got {critic.mode.name}")
        self._policy: PolicyParams = policy
        self._critic: CriticParams = critic
        self._algorithm: Algorithm = algorithm
        self._rng: np.random.Generator = rng
        self._learning: LearningConfig = learning
        self._reference_return: float | None = reference_return
        self._episodes_trained: int = episodes_trained
        self._steps_taken: int = steps_taken
        self._recent_returns: deque[float] = deque(recent_returns, maxlen=learning.window)

    @classmethod
    def create(
        cls,
        observation_size: int,
        action_size: int,
        *,
        bound: float,
        algorithm: Algorithm,
        learning: LearningConfig,
    ) -> Agent:
        """Freshly initialized agent; the policy is drawn first, then the critic, from ``learning.seed``."""
        algorithm = Algorithm(algorithm)
        rng = np.random.default_rng(learning.seed)
        policy = initialize_policy(
            observation_size,
            action_size,
            rng,
            hidden=learning.hidden,
            bound=bound,
            initial_log_std=learning.initial_log_std,
        )
        critic = initialize_critic(
            observation_size,
            action_size,
            CRITIC_MODES[algorithm],
            rng,
            hidden=learning.hidden,
            action_scale=bound,
        )
        return cls(policy=policy, critic=critic, algorithm=algorithm, rng=rng, learning=learning)

    @property
    def policy(self) -> PolicyParams:
        return self._policy

    @property
    def critic(self) -> CriticParams:
        return self._critic

    @property
    def algorithm(self) -> Algorithm:
        return self._algorithm

    @property
    def rng(self) -> np.random.Generator:
        """Generator for action sampling in single-environment training."""
        return self._rng

    @property
    def learning(self) -> LearningConfig:
        """Configuration the agent was created with."""
        return self._learning

    @property
    def reference_return(self) -> float | None:
        """Moving-average return at the end of the last training call; None until trained."""
        return self._reference_return

    @reference_return.setter
    def reference_return(self, value: float | None) -> None:
        self._reference_return = value

    @property
    def episodes_trained(self) -> int:
        return self._episodes_trained

    @property
    def steps_taken(self) -> int:
        return self._steps_taken

    @property
    def recent_returns(self) -> tuple[float, ...]:
        return tuple(self._recent_returns)

    def apply(self, policy: PolicyParams, critic: CriticParams) -> None:
        self._policy = policy
        self._critic = critic

    def record(self, episode_return: float, steps: int) -> float:
        """Book a finished episode and return the moving-average return."""
        self._recent_returns.append(episode_return)
        self._episodes_trained += 1
        self._steps_taken += steps
        return float(np.mean(self._recent_returns))

    def act(self, observation: ObservationLike | np.ndarray, *, deterministic: bool = False) -> Action:
        if deterministic:
            return policy_mean_action(self._policy, observation)
        return policy_sample(self._policy, observation, self._rng)[0]

    def as_policy(self) -> PolicyFunc:
        """Deterministic (mean-action) policy over the current parameters."""
        return lambda observation: policy_mean_action(self._policy, observation)

    def same_as(self, other: Agent) -> bool:
        """Bitwise equality of parameters, generator state and bookkeeping."""
        return (
            self._algorithm == other._algorithm
            and self._policy.same_as(other._policy)
            and self._critic.same_as(other._critic)
            and self._rng.bit_generator.state == other._rng.bit_generator.state
            and self._reference_return == other._reference_return
            and self._episodes_trained == other._episodes_trained
            and self._steps_taken == other._steps_taken
            and self.recent_returns == other.recent_returns
        )


@dataclass(frozen=True, slots=True)
class EpisodeRecord:
    episode: int
    episode_return: float
    final_eta: float
    final_observed_eta: float
    moving_average: float
    steps: int


@dataclass(frozen=True, slots=True, eq=False)
class _Rollout:
    trajectory: tuple[Transition, ...]
    final_eta: float
    final_observed_eta: float

    @property
    def episode_return(self) -> float:
        return float(sum(t.reward for t in self.trajectory))


def rollout(
    env: EnvironmentProtocol,
    theta: PolicyParams,
    seed: int,
    rng: np.random.Generator,
) -> _Rollout:
    """One full episode under a fixed stochastic policy, no learning."""
    observation = env.reset(seed)
    trajectory: list[Transition] = []
    while not env.done:
        action, _ = policy_sample(theta, observation, rng)
        transition = env.step(action)
        trajectory.append(transition)
        observation = transition.next_state
    return _Rollout(tuple(trajectory), env.true_efficiency, env.observed_efficiency)


def _apply_trajectory(agent: Agent, trajectory: tuple[Transition, ...], cfg: LearningConfig) -> None:
    if agent.algorithm == Algorithm.ADVANTAGE:
        agent.apply(*advantage_update(trajectory, agent.policy, agent.critic, cfg))
        return
    for transition in trajectory:
        next_action, _ = policy_sample(agent.policy, transition.next_state, agent.rng)
        theta, w, _ = qac_update(agent.policy, agent.critic, transition, next_action, cfg)
        agent.apply(theta, w)


def _online_qac_episode(agent: Agent, env: EnvironmentProtocol, seed: int, cfg: LearningConfig) -> _Rollout:
    observation = env.reset(seed)
    action, _ = policy_sample(agent.policy, observation, agent.rng)
    trajectory: list[Transition] = []
    while not env.done:
        transition = env.step(action)
        next_action, _ = policy_sample(agent.policy, transition.next_state, agent.rng)
        agent.apply(*qac_update(agent.policy, agent.critic, transition, next_action, cfg)[:2])
        trajectory.append(transition)
        action = next_action
    return _Rollout(tuple(trajectory), env.true_efficiency, env.observed_efficiency)


def _book(agent: Agent, result: _Rollout) -> EpisodeRecord:
    episode = agent.episodes_trained
    moving_average = agent.record(result.episode_return, len(result.trajectory))
    record = EpisodeRecord(
        episode=episode,
        episode_return=result.episode_return,
        final_eta=float(result.final_eta),
        final_observed_eta=float(result.final_observed_eta),
        moving_average=moving_average,
        steps=agent.steps_taken,
    )
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(
            f"episode {episode}: return {record.episode_return:.5f}, final eta {record.final_eta:.5f}, "
            f"moving average {moving_average:.5f}"
        )
    if (episode + 1) % PROGRESS_EVERY == 0:
        logger.info(
            f"episode {episode + 1}: moving-average return {moving_average:.5f}, final eta {record.final_eta:.4f}"
        )
    return record


def _train_sequential(agent: Agent, env: EnvironmentProtocol, cfg: LearningConfig) -> list[EpisodeRecord]:
    records: list[EpisodeRecord] = []
    for _ in range(cfg.episodes):
        seed = derive_seed(cfg.seed, agent.episodes_trained)
        if agent.algorithm == Algorithm.QAC:
            result = _online_qac_episode(agent, env, seed, cfg)
        else:
            result = rollout(env, agent.policy, seed, agent.rng)
            _apply_trajectory(agent, result.trajectory, cfg)
        records.append(_book(agent, result))
    return records


async def _train_parallel(
    agent: Agent,
    envs: list[EnvironmentProtocol],
    cfg: LearningConfig,
) -> list[EpisodeRecord]:
    """
    Rollouts run in worker threads, each on a private environment against the parameters current when
    the episode started. Finished trajectories are applied on the event loop, one at a time, in
    completion order.
    """
    first = agent.episodes_trained
    pending: Iterator[int] = iter(range(first, first + cfg.episodes))
    records: list[EpisodeRecord] = []

    async def worker(env: EnvironmentProtocol) -> None:
        for episode in pending:
            rng = np.random.default_rng(derive_seed(cfg.seed, episode, POLICY_STREAM))
            result = await asyncio.to_thread(rollout, env, agent.policy, derive_seed(cfg.seed, episode), rng)
            _apply_trajectory(agent, result.trajectory, cfg)
            records.append(_book(agent, result))

    await asyncio.gather(*(worker(env) for env in envs))
    return records


def _factory(env: EnvConfig | EnvFactory | EnvironmentProtocol) -> Callable[[], EnvironmentProtocol]:
    if isinstance(env, EnvConfig):
        return lambda: TransducerEnv(env)
    if isinstance(env, EnvironmentProtocol):
        return lambda: env
    return env


def train(
    env: EnvConfig | EnvFactory | EnvironmentProtocol,
    cfg: LearningConfig,
    algorithm: Algorithm = Algorithm.ADVANTAGE,
    *,
    agent: Agent | None = None,
) -> TrainingReport:
    """
    Train an agent, or continue training ``agent``.

    ``env`` is an environment config, a factory of environments, or a single environment instance (which
    forces single-environment mode). Episode ``k`` always starts from ``derive_seed(cfg.seed, k)``, so a
    single-environment run split across checkpoints matches an uninterrupted one.
    """
    algorithm = Algorithm(algorithm)
    factory = _factory(env)
    first_env = factory()
    if agent is None:
        agent = Agent.create(
            first_env.observation_size,
            first_env.action_size,
            bound=first_env.increment_bound,
            algorithm=algorithm,
            learning=cfg,
        )
    elif agent.algorithm != algorithm:
        raise InvalidArgument(f"agent was built for {agent.algorithm.value}, cannot train it with {algorithm.value}")

    parallel = 1 if isinstance(env, EnvironmentProtocol) else cfg.parallel_envs
    started_at = utc_now()
    start = time.perf_counter()
    logger.info(
        f"training {algorithm.value} for {cfg.episodes} episodes on {parallel} environment(s), seed {cfg.seed}"
    )
    if cfg.episodes == 0:
        records: list[EpisodeRecord] = []
    elif parallel == 1:
        records = _train_sequential(agent, first_env, cfg)
    else:
        envs = [first_env, *(factory() for _ in range(parallel - 1))]
        records = asyncio.run(_train_parallel(agent, envs, cfg))
    if records:
        agent.reference_return = float(np.mean(agent.recent_returns))

    config: dict[str, Any] = {"algorithm": algorithm.value, **cfg.to_dict()}
    return TrainingReport(
        episodes=tuple(r.episode for r in records),
        returns=tuple(r.episode_return for r in records),
        final_etas=tuple(r.final_eta for r in records),
        final_observed_etas=tuple(r.final_observed_eta for r in records),
        moving_averages=tuple(r.moving_average for r in records),
        steps=tuple(r.steps for r in records),
        wall_time=time.perf_counter() - start,
        seed=cfg.seed,
        config=config,
        agent=agent,
        started_at=started_at,
        finished_at=utc_now(),
    )
