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
import math
from dataclasses import dataclass, field
from typing import Final, Sequence

import numpy as np

from qtransduce.enums import DriftTarget, EfficiencyOracle, RewardMode
from qtransduce.errors import InvalidArgument, ProtocolViolation
from qtransduce.model import TransducerParams
from qtransduce.protocols import PolicyFunc
from qtransduce.scattering import added_noise_quanta, efficiency_map, simulated_efficiency, spectral_efficiency
from qtransduce.utils.functions import U64_LIMIT, derive_seed


__all__: Final[tuple[str, ...]] = (
    "DriftSpec",
    "EnvConfig",
    "Observation",
    "Action",
    "Transition",
    "TraceRow",
    "EvaluationSummary",
    "TransducerEnv",
    "EnvState",
    "reset",
    "step",
    "inject_drift",
    "evaluate_policy",
    "grid_search_optimum",
    "random_policy",
    "oracle_policy",
)


logger: Final[logging.Logger] = logging.getLogger("qtransduce")

OBSERVED_ETA_CEILING: Final[float] = 1.5
NOISE_CEILING: Final[float] = 1e6
RATE_FLOOR: Final[float] = 1e-6
SHAPING_WEIGHT: Final[float] = 0.1
DEFAULT_BOUNDS: Final[tuple[tuple[float, float], tuple[float, float]]] = ((0.0, 4.0), (0.0, 4.0))
DRIFT_STREAM: Final[int] = 1


@dataclass(frozen=True, slots=True)
class DriftSpec:
    """
    Parameter drift of the simulated device. From ``onset_step`` (counted over every step the
    environment instance has taken) the target is multiplied once by ``jump_factor`` and then performs
    a Gaussian random walk with per-step deviation ``walk_sd``.
    """

    target: DriftTarget
    walk_sd: float = 0.0
    onset_step: int = 0
    jump_factor: float = 1.0

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "target", DriftTarget(self.target))
        except ValueError:
            known = ", ".join(t.value for t in DriftTarget)
            raise InvalidArgument(f"unknown drift target {self.target!r} (expected one of {known})")
        if not self.walk_sd >= 0:
            raise InvalidArgument(f"walk_sd must be non-negative, got {self.walk_sd}")
        if self.onset_step < 0:
            raise InvalidArgument(f"onset_step must be non-negative, got {self.onset_step}")
        if not self.jump_factor > 0:
            raise InvalidArgument(f"jump_factor must be positive, got {self.jump_factor}")


@dataclass(frozen=True, slots=True)
class EnvConfig:
    """Episode protocol around a transducer. Actuator bounds are on log10 of the pump photon numbers."""

    base_params: TransducerParams = field(default_factory=TransducerParams)
    action_bounds: tuple[tuple[float, float], tuple[float, float]] = DEFAULT_BOUNDS
    episode_length: int = 64
    observation_noise_sd: float = 0.01
    drift: DriftSpec | None = None
    seed: int = 0
    increment_bound: float = 0.2
    reward_mode: RewardMode = RewardMode.IMPROVEMENT
    oracle: EfficiencyOracle = EfficiencyOracle.SCATTERING

    def __post_init__(self) -> None:
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.action_bounds)
        if len(bounds) != 2:
            raise InvalidArgument(f"expected bounds for 2 actuators, got {len(bounds)}")
        for index, (lo, hi) in enumerate(bounds):
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise InvalidArgument(f"actuator {index} bounds must satisfy min <= max, got ({lo}, {hi})")
        object.__setattr__(self, "action_bounds", bounds)
        if self.episode_length < 1:
            raise InvalidArgument(f"episode_length must be >= 1, got {self.episode_length}")
        if not self.observation_noise_sd >= 0:
            raise InvalidArgument(f"observation_noise_sd must be >= 0, got {self.observation_noise_sd}")
        if not 0 <= self.seed < U64_LIMIT:
            raise InvalidArgument(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not self.increment_bound > 0:
            raise InvalidArgument(f"increment_bound must be positive, got {self.increment_bound}")
        object.__setattr__(self, "reward_mode", RewardMode(self.reward_mode))
        object.__setattr__(self, "oracle", EfficiencyOracle(self.oracle))


@dataclass(frozen=True, slots=True)
class Observation:
    """What the controller sees: a noisy efficiency reading, the added noise and its own actuator settings."""

    eta_measured: float
    added_noise_quanta: float
    actuators_normalized: tuple[float, float]

    @property
    def vector(self) -> np.ndarray:
        """Network features; the added noise enters on a log scale."""
        return np.array(
            [
                self.eta_measured,
                math.log1p(self.added_noise_quanta),
                self.actuators_normalized[0],
                self.actuators_normalized[1],
            ]
        )


@dataclass(frozen=True, slots=True, eq=False)
class Action:
    """
    Increments on the normalized actuators. ``pre_squash`` keeps the Gaussian sample the policy
    squashed into ``delta`` so log-densities need no inverse hyperbolic tangent.
    """

    delta: np.ndarray
    pre_squash: np.ndarray | None = None

    def __post_init__(self) -> None:
        delta = np.atleast_1d(np.asarray(self.delta, dtype=np.float64))
        if not np.all(np.isfinite(delta)):
            raise InvalidArgument(f"action must be finite, got {delta}")
        object.__setattr__(self, "delta", delta)

    @classmethod
    def zero(cls, size: int = 2) -> Action:
        return cls(delta=np.zeros(size))


@dataclass(frozen=True, slots=True, eq=False)
class Transition:
    state: Observation
    action: Action
    reward: float
    next_state: Observation
    done: bool
    eta_true: float = math.nan


@dataclass(frozen=True, slots=True)
class TraceRow:
    step: int
    log_pump: tuple[float, float]
    eta_true: float
    eta_observed: float
    reward: float


@dataclass(frozen=True, slots=True)
class EvaluationSummary:
    mean_final_eta: float
    max_final_eta: float
    mean_return: float
    final_etas: tuple[float, ...]
    returns: tuple[float, ...]


class TransducerEnv:
    """
    Gym-style episodic environment over one simulated device.

    The instance is single-owner mutable state. Device parameters, including any drift, persist across
    :meth:`reset`; only the actuators, the measurement noise stream and the episode counters restart.
    """

    __slots__: Final[tuple[str, ...]] = (
        "_cfg",
        "_params",
        "_drift",
        "_drift_rng",
        "_jumped",
        "_global_step",
        "_rng",
        "_actuators",
        "_step_index",
        "_done",
        "_eta",
        "_previous_eta",
        "_best_eta",
        "_observation",
        "_trace",
    )

    def __init__(self, cfg: EnvConfig) -> None:
        self._cfg: Final[EnvConfig] = cfg
        self._params: TransducerParams = cfg.base_params
        self._drift: DriftSpec | None = cfg.drift
        self._drift_rng: np.random.Generator = np.random.default_rng(derive_seed(cfg.seed, DRIFT_STREAM))
        self._jumped: bool = False
        self._global_step: int = 0
        self._rng: np.random.Generator = np.random.default_rng(cfg.seed)
        self._actuators: np.ndarray = np.zeros(2)
        self._step_index: int = 0
        self._done: bool = True
        self._eta: float = math.nan
        self._previous_eta: float = math.nan
        self._best_eta: float = math.nan
        self._observation: Observation | None = None
        self._trace: list[TraceRow] = []

    @property
    def config(self) -> EnvConfig:
        """The configuration the environment was built from."""
        return self._cfg

    @property
    def params(self) -> TransducerParams:
        """Current device parameters, drifted ones included."""
        return self._params

    @property
    def observation_size(self) -> int:
        return 4

    @property
    def action_size(self) -> int:
        return 2

    @property
    def increment_bound(self) -> float:
        return self._cfg.increment_bound

    @property
    def true_efficiency(self) -> float:
        """Noiseless efficiency at the current actuators."""
        return self._eta

    @property
    def observed_efficiency(self) -> float:
        """Last efficiency reading shown to the controller."""
        return math.nan if self._observation is None else self._observation.eta_measured

    @property
    def actuators(self) -> tuple[float, float]:
        """Normalized actuator settings in [-1, 1]."""
        return float(self._actuators[0]), float(self._actuators[1])

    @property
    def step_index(self) -> int:
        return self._step_index

    @property
    def global_step(self) -> int:
        """Steps taken by this instance over all episodes; drift onsets are measured against it."""
        return self._global_step

    @property
    def done(self) -> bool:
        return self._done

    @property
    def drift(self) -> DriftSpec | None:
        return self._drift

    @property
    def trace(self) -> list[TraceRow]:
        """Rows of the current episode, the reset row first."""
        return list(self._trace)

    def log_pump(self, actuators: np.ndarray | None = None) -> np.ndarray:
        """log10 pump photon numbers for normalized actuators."""
        u = self._actuators if actuators is None else np.asarray(actuators, dtype=np.float64)
        bounds = np.array(self._cfg.action_bounds)
        return bounds[:, 0] + 0.5 * (u + 1.0) * (bounds[:, 1] - bounds[:, 0])

    def device_params(self, actuators: np.ndarray | None = None) -> TransducerParams:
        n_pump = 10.0 ** self.log_pump(actuators)
        return self._params.replace(n_pump=(float(n_pump[0]), float(n_pump[1])))

    def _efficiency(self, params: TransducerParams) -> float:
        if self._cfg.oracle == EfficiencyOracle.LINDBLAD:
            return min(max(simulated_efficiency(params), 0.0), 1.0)
        return spectral_efficiency(params, 0.0)

    def _observe(self, params: TransducerParams) -> Observation:
        noise = self._rng.normal(0.0, self._cfg.observation_noise_sd) if self._cfg.observation_noise_sd > 0 else 0.0
        measured = min(max(self._eta + noise, 0.0), OBSERVED_ETA_CEILING)
        quanta = min(added_noise_quanta(params, 0.0), NOISE_CEILING)
        collapsed = [lo == hi for lo, hi in self._cfg.action_bounds]
        u = tuple(0.0 if flat else float(value) for flat, value in zip(collapsed, self._actuators))
        return Observation(eta_measured=float(measured), added_noise_quanta=float(quanta), actuators_normalized=u)

    def reset(self, seed: int | None = None) -> Observation:
        """Start an episode with actuators drawn uniformly from the box; identical seeds give identical starts."""
        seed = self._cfg.seed if seed is None else seed
        if not 0 <= seed < U64_LIMIT:
            raise InvalidArgument(f"seed must be a 64-bit unsigned integer, got {seed}")
        self._rng = np.random.default_rng(seed)
        collapsed = np.array([lo == hi for lo, hi in self._cfg.action_bounds])
        self._actuators = np.where(collapsed, 0.0, self._rng.uniform(-1.0, 1.0, size=2))
        self._step_index = 0
        self._done = False
        params = self.device_params()
        self._eta = self._efficiency(params)
        self._previous_eta = self._eta
        self._best_eta = self._eta
        self._observation = self._observe(params)
        log_pump = self.log_pump()
        self._trace = [
            TraceRow(
                step=0,
                log_pump=(float(log_pump[0]), float(log_pump[1])),
                eta_true=self._eta,
                eta_observed=self._observation.eta_measured,
                reward=0.0,
            )
        ]
        return self._observation

    def _apply_drift(self) -> None:
        spec = self._drift
        if spec is None or self._global_step < spec.onset_step:
            return
        value = _drift_value(self._params, spec.target)
        if not self._jumped:
            value *= spec.jump_factor
            self._jumped = True
        if spec.walk_sd > 0:
            value += self._drift_rng.normal(0.0, spec.walk_sd)
        floor = 0.0 if spec.target == DriftTarget.N_TH else RATE_FLOOR
        self._params = _with_drift_value(self._params, spec.target, max(value, floor))

    def set_drift(self, spec: DriftSpec | None) -> None:
        self._drift = spec
        self._jumped = False

    def _reward(self, eta: float) -> float:
        if self._cfg.reward_mode == RewardMode.INDICATOR:
            reward = 1.0 if eta > self._best_eta else 0.0
        elif eta > self._best_eta:
            reward = eta - self._best_eta
        else:
            reward = SHAPING_WEIGHT * (eta - self._previous_eta)
        self._best_eta = max(self._best_eta, eta)
        self._previous_eta = eta
        return reward

    def step(self, action: Action) -> Transition:
        if self._done or self._observation is None:
            raise ProtocolViolation("step() called on a finished episode; call reset() first")
        delta = np.asarray(action.delta, dtype=np.float64)
        if delta.shape != (2,):
            raise InvalidArgument(f"action must have 2 components, got shape {delta.shape}")
        bound = self._cfg.increment_bound
        self._actuators = np.clip(self._actuators + np.clip(delta, -bound, bound), -1.0, 1.0)

        self._apply_drift()
        self._global_step += 1
        self._step_index += 1

        params = self.device_params()
        eta = self._efficiency(params)
        reward = self._reward(eta)
        self._eta = eta
        state = self._observation
        self._observation = self._observe(params)
        self._done = self._step_index >= self._cfg.episode_length

        log_pump = self.log_pump()
        self._trace.append(
            TraceRow(
                step=self._step_index,
                log_pump=(float(log_pump[0]), float(log_pump[1])),
                eta_true=eta,
                eta_observed=self._observation.eta_measured,
                reward=reward,
            )
        )
        return Transition(
            state=state,
            action=action,
            reward=reward,
            next_state=self._observation,
            done=self._done,
            eta_true=eta,
        )


EnvState = TransducerEnv


def _drift_value(params: TransducerParams, target: DriftTarget) -> float:
    if target == DriftTarget.DELTA_M:
        return params.delta_m
    if target == DriftTarget.N_TH:
        return params.n_th
    if target == DriftTarget.GAMMA_1:
        return params.gamma[0]
    return params.gamma[1]


def _with_drift_value(params: TransducerParams, target: DriftTarget, value: float) -> TransducerParams:
    if target == DriftTarget.DELTA_M:
        return params.replace(delta_m=value)
    if target == DriftTarget.N_TH:
        return params.replace(n_th=value)
    if target == DriftTarget.GAMMA_1:
        return params.replace(gamma=(value, params.gamma[1]))
    return params.replace(gamma=(params.gamma[0], value))


def reset(cfg: EnvConfig, seed: int) -> tuple[TransducerEnv, Observation]:
    """Fresh environment for ``cfg`` and its first observation."""
    env = TransducerEnv(cfg)
    return env, env.reset(seed)


def step(state: TransducerEnv, a: Action) -> Transition:
    return state.step(a)


def inject_drift(state: TransducerEnv, spec: DriftSpec) -> TransducerEnv:
    """Attach ``spec`` to the environment; it takes effect from ``spec.onset_step``."""
    if not isinstance(spec, DriftSpec):
        raise InvalidArgument(f"expected a DriftSpec, got {type(spec).__name__}")
    state.set_drift(spec)
    return state


def grid_search_optimum(
    cfg: EnvConfig,
    params: TransducerParams | None = None,
    *,
    resolution: int = 200,
) -> tuple[float, tuple[float, float]]:
    """
    Best on-resonance efficiency over a ``resolution x resolution`` grid of the actuator box.

    Returns the efficiency and the normalized actuators that reach it.
    """
    if resolution < 1:
        raise InvalidArgument(f"resolution must be >= 1, got {resolution}")
    params = cfg.base_params if params is None else params
    u = np.linspace(-1.0, 1.0, resolution) if resolution > 1 else np.zeros(1)
    axes = []
    for lo, hi in cfg.action_bounds:
        axes.append(10.0 ** (lo + 0.5 * (u + 1.0) * (hi - lo)))
    etas = efficiency_map(params, axes[0], axes[1])
    i, j = np.unravel_index(int(np.argmax(etas)), etas.shape)
    collapsed = [lo == hi for lo, hi in cfg.action_bounds]
    best = (0.0 if collapsed[0] else float(u[i]), 0.0 if collapsed[1] else float(u[j]))
    return float(etas[i, j]), best


def random_policy(seed: int, bound: float = 0.2) -> PolicyFunc:
    """Uniform random increments; used as a baseline."""
    rng = np.random.default_rng(seed)

    def _policy(observation: Observation) -> Action:
        return Action(delta=rng.uniform(-bound, bound, size=2))

    return _policy


def evaluate_policy(
    env: EnvConfig | TransducerEnv,
    policy: PolicyFunc,
    episodes: int,
    seed: int,
) -> EvaluationSummary:
    """
    Roll ``policy`` out for ``episodes`` episodes without any learning. Episode ``k`` starts from
    ``derive_seed(seed, k)``, so a deterministic policy gives identical summaries on every call.
    """
    if episodes < 1:
        raise InvalidArgument(f"episodes must be >= 1, got {episodes}")
    instance = TransducerEnv(env) if isinstance(env, EnvConfig) else env
    final_etas: list[float] = []
    returns: list[float] = []
    for episode in range(episodes):
        observation = instance.reset(derive_seed(seed, episode))
        total = 0.0
        while not instance.done:
            transition = instance.step(policy(observation))
            total += transition.reward
            observation = transition.next_state
        final_etas.append(instance.true_efficiency)
        returns.append(total)
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(f"evaluate_policy: {episodes} episodes, mean final eta {np.mean(final_etas):.4f}")
    return EvaluationSummary(
        mean_final_eta=float(np.mean(final_etas)),
        max_final_eta=float(np.max(final_etas)),
        mean_return=float(np.mean(returns)),
        final_etas=tuple(final_etas),
        returns=tuple(returns),
    )


def oracle_policy(target: Sequence[float], bound: float = 0.2) -> PolicyFunc:
    """Steers the actuators straight to ``target`` at the largest allowed increment."""
    goal = np.asarray(target, dtype=np.float64)

    def _policy(observation: Observation) -> Action:
        current = np.asarray(observation.actuators_normalized, dtype=np.float64)
        return Action(delta=np.clip(goal - current, -bound, bound))

    return _policy
