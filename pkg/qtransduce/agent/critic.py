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

from dataclasses import dataclass
from typing import Final

import numpy as np

from qtransduce.agent.mlp import MlpParams, initialize, mlp_forward, mlp_gradient
from qtransduce.agent.policy import features
from qtransduce.enums import CriticMode
from qtransduce.env import Action
from qtransduce.errors import InvalidArgument
from qtransduce.protocols import ObservationLike


__all__: Final[tuple[str, ...]] = (
    "CriticParams",
    "initialize_critic",
    "critic_input",
    "critic_value",
    "critic_gradient",
)


UNIT: Final[np.ndarray] = np.ones(1)


@dataclass(frozen=True, slots=True, eq=False)
class CriticParams:
    """
    Scalar value network. In ``Q`` mode the input is the observation followed by the action divided by
    ``action_scale``; in ``V`` mode it is the observation alone.
    """

    trunk: MlpParams
    mode: CriticMode = CriticMode.V
    action_scale: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", CriticMode(self.mode))
        if self.trunk.sizes[-1] != 1:
            raise InvalidArgument(f"critic must have a scalar output, got {self.trunk.sizes[-1]}")
        if not self.action_scale > 0:
            raise InvalidArgument(f"action_scale must be positive, got {self.action_scale}")

    def step(self, gradient: MlpParams, rate: float) -> CriticParams:
        return CriticParams(trunk=self.trunk.step(gradient, rate), mode=self.mode, action_scale=self.action_scale)

    def same_as(self, other: CriticParams) -> bool:
        return self.mode == other.mode and self.action_scale == other.action_scale and self.trunk.same_as(other.trunk)


def initialize_critic(
    observation_size: int,
    action_size: int,
    mode: CriticMode,
    rng: np.random.Generator,
    *,
    hidden: tuple[int, ...] = (32, 32),
    action_scale: float = 1.0,
) -> CriticParams:
    inputs = observation_size + (action_size if mode == CriticMode.Q else 0)
    return CriticParams(trunk=initialize((inputs, *hidden, 1), rng), mode=mode, action_scale=action_scale)


def critic_input(w: CriticParams, s: ObservationLike | np.ndarray, action: Action | None = None) -> np.ndarray:
    x = features(s)
    if w.mode == CriticMode.V:
        return x
    if action is None:
        raise InvalidArgument("a Q critic needs the action as well as the observation")
    return np.concatenate([x, action.delta / w.action_scale])


def critic_value(w: CriticParams, s: ObservationLike | np.ndarray, action: Action | None = None) -> float:
    return float(mlp_forward(w.trunk, critic_input(w, s, action))[0])


def critic_gradient(w: CriticParams, s: ObservationLike | np.ndarray, action: Action | None = None) -> MlpParams:
    """Gradient of the critic output with respect to its parameters."""
    return mlp_gradient(w.trunk, critic_input(w, s, action), UNIT)
