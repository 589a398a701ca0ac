from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qtransduce.env import Action, Transition


@dataclass(frozen=True, eq=False)
class VectorObservation:
    vector: np.ndarray


class BanditEnv:
    """One-step continuous bandit with reward ``-(a - target)^2``."""

    observation_size = 1
    action_size = 1
    increment_bound = 1.0

    def __init__(self, target: float = 0.3) -> None:
        self.target = target
        self.done = True
        self.true_efficiency = math.nan
        self.observed_efficiency = math.nan
        self._observation = VectorObservation(np.ones(1))

    def reset(self, seed: int | None = None) -> VectorObservation:
        self.done = False
        return self._observation

    def step(self, action: Action) -> Transition:
        a = float(action.delta[0])
        self.done = True
        self.true_efficiency = a
        reward = -((a - self.target) ** 2)
        return Transition(self._observation, action, reward, self._observation, True)


class ChainEnv:
    """
    Two states, two actions (sign of the continuous action). In state 0, action 0 stays for 0.1 and
    action 1 moves to state 1 for nothing; in state 1, action 0 stays for 1 and action 1 falls back.
    """

    observation_size = 2
    action_size = 1
    increment_bound = 1.0
    length = 10

    # (next state, reward) indexed by [state][action]
    DYNAMICS = (((0, 0.1), (1, 0.0)), ((1, 1.0), (0, 0.0)))

    def __init__(self) -> None:
        self.state = 0
        self.steps = 0
        self.done = True
        self.true_efficiency = math.nan
        self.observed_efficiency = math.nan

    @staticmethod
    def observe(state: int) -> VectorObservation:
        vector = np.zeros(2)
        vector[state] = 1.0
        return VectorObservation(vector)

    def reset(self, seed: int | None = None) -> VectorObservation:
        self.state = int(np.random.default_rng(seed).integers(2))
        self.steps = 0
        self.done = False
        return self.observe(self.state)

    def step(self, action: Action) -> Transition:
        choice = int(action.delta[0] >= 0)
        before = self.observe(self.state)
        self.state, reward = self.DYNAMICS[self.state][choice]
        self.steps += 1
        self.done = self.steps >= self.length
        return Transition(before, action, reward, self.observe(self.state), self.done)


class ShiftingBandit(BanditEnv):
    """Bandit whose rewards drop by ``penalty`` once ``shift_after`` steps have been taken."""

    def __init__(self, target: float = 0.3, penalty: float = 2.0, shift_after: int = 10) -> None:
        super().__init__(target)
        self.penalty = penalty
        self.shift_after = shift_after
        self.steps = 0

    def step(self, action: Action) -> Transition:
        transition = super().step(action)
        shifted = self.steps >= self.shift_after
        self.steps += 1
        if not shifted:
            return transition
        return Transition(
            transition.state, action, transition.reward - self.penalty, transition.next_state, transition.done
        )
