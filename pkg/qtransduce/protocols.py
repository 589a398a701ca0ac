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

from typing import (
    TYPE_CHECKING,
    Callable,
    Final,
    Protocol,
    runtime_checkable,
)

import numpy as np


if TYPE_CHECKING:
    from qtransduce.env import Action, Transition


__all__: Final[tuple[str, ...]] = (
    "ObservationLike",
    "EnvironmentProtocol",
    "PolicyFunc",
    "EnvFactory",
)


@runtime_checkable
class ObservationLike(Protocol):
    """Protocol for observations fed to the networks: anything exposing a flat feature vector."""

    @property
    def vector(self) -> np.ndarray: ...


@runtime_checkable
class EnvironmentProtocol(Protocol):
    """Protocol for episodic environments the trainer can drive, defining the reset/step surface it relies on."""

    @property
    def observation_size(self) -> int: ...

    @property
    def action_size(self) -> int: ...

    @property
    def increment_bound(self) -> float: ...

    @property
    def true_efficiency(self) -> float: ...

    @property
    def observed_efficiency(self) -> float: ...

    @property
    def done(self) -> bool: ...

    def reset(self, seed: int | None = None) -> ObservationLike: ...

    def step(self, action: Action) -> Transition: ...


"""Type alias for policies used in evaluation, mapping an observation to the action to take."""
PolicyFunc = Callable[[ObservationLike], "Action"]

"""Type alias for environment factories, used to give every rollout worker a private environment instance."""
EnvFactory = Callable[[], EnvironmentProtocol]
