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

import math
from dataclasses import dataclass
from typing import Final

import numpy as np

from qtransduce.agent.mlp import MlpParams, initialize, mlp_backward, mlp_forward
from qtransduce.env import Action
from qtransduce.errors import InvalidArgument
from qtransduce.protocols import ObservationLike


__all__: Final[tuple[str, ...]] = (
    "PolicyParams",
    "PolicyGradient",
    "initialize_policy",
    "features",
    "policy_sample",
    "policy_log_prob",
    "policy_log_prob_gradient",
    "policy_mean_action",
)


LOG_STD_MIN: Final[float] = -5.0
LOG_STD_MAX: Final[float] = 1.0
HALF_LOG_TWO_PI: Final[float] = 0.5 * math.log(2.0 * math.pi)
EDGE: Final[float] = 1.0 - 1e-12


def features(s: ObservationLike | np.ndarray) -> np.ndarray:
    """Feature vector of an observation; bare arrays pass through."""
    vector = s.vector if isinstance(s, ObservationLike) else s
    return np.asarray(vector, dtype=np.float64)


@dataclass(frozen=True, slots=True, eq=False)
class PolicyGradient:
    trunk: MlpParams
    log_std: np.ndarray

    @property
    def finite(self) -> bool:
        return self.trunk.finite and bool(np.all(np.isfinite(self.log_std)))

    def scaled(self, factor: float) -> PolicyGradient:
        return PolicyGradient(trunk=self.trunk.scaled(factor), log_std=factor * self.log_std)

    def __add__(self, other: PolicyGradient) -> PolicyGradient:
        return PolicyGradient(trunk=self.trunk + other.trunk, log_std=self.log_std + other.log_std)


@dataclass(frozen=True, slots=True, eq=False)
class PolicyParams:
    """
    Squashed Gaussian policy: ``u ~ N(mu(s), exp(log_std)^2)`` and ``a = bound * tanh(u)``.
    ``log_std`` is clamped to [-5, 1] on construction.
    """

    trunk: MlpParams
    log_std: np.ndarray
    bound: float = 0.2

    def __post_init__(self) -> None:
        log_std = np.clip(np.atleast_1d(np.array(self.log_std, dtype=np.float64)), LOG_STD_MIN, LOG_STD_MAX)
        if log_std.shape != (self.trunk.sizes[-1],):
            raise InvalidArgument(
                f"log_std has {log_std.shape[0]} entries but the trunk produces {self.trunk.sizes[-1]} means"
            )
        if not self.bound > 0:
            raise InvalidArgument(f"bound must be positive, got {self.bound}")
        object.__setattr__(self, "log_std", log_std)
        object.__setattr__(self, "bound", float(self.bound))

    @property
    def action_size(self) -> int:
        return self.trunk.sizes[-1]

    @property
    def std(self) -> np.ndarray:
        return np.exp(self.log_std)

    def step(self, gradient: PolicyGradient, rate: float) -> PolicyParams:
        return PolicyParams(
            trunk=self.trunk.step(gradient.trunk, rate),
            log_std=self.log_std + rate * gradient.log_std,
            bound=self.bound,
        )

    def same_as(self, other: PolicyParams) -> bool:
        return (
            self.trunk.same_as(other.trunk)
            and np.array_equal(self.log_std, other.log_std)
            and self.bound == other.bound
        )


def initialize_policy(
    observation_size: int,
    action_size: int,
    rng: np.random.Generator,
    *,
    hidden: tuple[int, ...] = (32, 32),
    bound: float = 0.2,
    initial_log_std: float = -0.5,
) -> PolicyParams:
    return PolicyParams(
        trunk=initialize((observation_size, *hidden, action_size), rng),
        log_std=np.full(action_size, initial_log_std),
        bound=bound,
    )


def _log_tanh_jacobian(u: np.ndarray) -> np.ndarray:
    """``log(1 - tanh(u)^2)`` without cancellation for large ``|u|``."""
    return 2.0 * (math.log(2.0) - u - np.logaddexp(0.0, -2.0 * u))


def _log_density(theta: PolicyParams, mu: np.ndarray, u: np.ndarray) -> float:
    xi = (u - mu) / theta.std
    gaussian = -0.5 * xi**2 - theta.log_std - HALF_LOG_TWO_PI
    squash = math.log(theta.bound) + _log_tanh_jacobian(u)
    return float(np.sum(gaussian - squash))


def _pre_squash(theta: PolicyParams, action: Action) -> np.ndarray:
    if action.pre_squash is not None:
        return np.asarray(action.pre_squash, dtype=np.float64)
    return np.arctanh(np.clip(action.delta / theta.bound, -EDGE, EDGE))


def policy_sample(
    theta: PolicyParams,
    s: ObservationLike | np.ndarray,
    rng: np.random.Generator,
) -> tuple[Action, float]:
    """Draw an action and the exact log-density of the squashed sample."""
    mu = mlp_forward(theta.trunk, features(s))
    u = mu + theta.std * rng.standard_normal(theta.action_size)
    action = Action(delta=theta.bound * np.tanh(u), pre_squash=u)
    return action, _log_density(theta, mu, u)


def policy_log_prob(theta: PolicyParams, s: ObservationLike | np.ndarray, action: Action) -> float:
    mu = mlp_forward(theta.trunk, features(s))
    return _log_density(theta, mu, _pre_squash(theta, action))


def policy_log_prob_gradient(
    theta: PolicyParams,
    s: ObservationLike | np.ndarray,
    action: Action,
) -> PolicyGradient:
    """Gradient of ``log pi(a|s)`` with respect to the trunk parameters and ``log_std``."""
    x = features(s)
    mu = mlp_forward(theta.trunk, x)
    u = _pre_squash(theta, action)
    variance = theta.std**2
    trunk_gradient, _ = mlp_backward(theta.trunk, x, (u - mu) / variance)
    return PolicyGradient(trunk=trunk_gradient, log_std=(u - mu) ** 2 / variance - 1.0)


def policy_mean_action(theta: PolicyParams, s: ObservationLike | np.ndarray) -> Action:
    """Deterministic action: the squashed mean."""
    mu = mlp_forward(theta.trunk, features(s))
    return Action(delta=theta.bound * np.tanh(mu), pre_squash=mu)
