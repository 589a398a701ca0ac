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

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Final

from qtransduce.errors import InvalidArgument
from qtransduce.utils.functions import U64_LIMIT


if TYPE_CHECKING:
    from qtransduce.agent.training import Agent


__all__: Final[tuple[str, ...]] = (
    "LearningConfig",
    "TrainingReport",
    "AdaptationConfig",
    "AdaptationReport",
)


@dataclass(frozen=True, slots=True)
class LearningConfig:
    alpha_theta: float = 3e-4
    alpha_w: float = 1e-3
    gamma_rl: float = 0.98
    episodes: int = 1000
    parallel_envs: int = 4
    seed: int = 0
    hidden: tuple[int, ...] = (32, 32)
    initial_log_std: float = -0.5
    window: int = 20

    def __post_init__(self) -> None:
        object.__setattr__(self, "hidden", tuple(int(width) for width in self.hidden))
        if not (self.alpha_theta >= 0 and self.alpha_w >= 0):
            raise InvalidArgument(
                f"learning rates must be non-negative, got alpha_theta={self.alpha_theta} alpha_w={self.alpha_w}"
            )
        if not 0 <= self.gamma_rl < 1:
            raise InvalidArgument(f"gamma_rl must lie in [0, 1), got {self.gamma_rl}")
        if self.episodes < 0:
            raise InvalidArgument(f"episodes must be >= 0, got {self.episodes}")
        if self.parallel_envs < 1:
            raise InvalidArgument(f"parallel_envs must be >= 1, got {self.parallel_envs}")
        if not 0 <= self.seed < U64_LIMIT:
            raise InvalidArgument(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if any(width < 1 for width in self.hidden):
            raise InvalidArgument(f"hidden layer widths must be >= 1, got {self.hidden}")
        if self.window < 1:
            raise InvalidArgument(f"window must be >= 1, got {self.window}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "alpha_theta": self.alpha_theta,
            "alpha_w": self.alpha_w,
            "gamma_rl": self.gamma_rl,
            "episodes": self.episodes,
            "parallel_envs": self.parallel_envs,
            "seed": self.seed,
            "hidden": list(self.hidden),
            "initial_log_std": self.initial_log_std,
            "window": self.window,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> LearningConfig:
        return cls(**{**data, "hidden": tuple(data.get("hidden", (32, 32)))})


@dataclass(frozen=True, slots=True, eq=False)
class TrainingReport:
    """
    Per-episode record of one training call. ``episodes`` holds global episode indices, which keep
    counting across resumed runs; ``steps`` is the cumulative environment step count at each episode end.
    """

    episodes: tuple[int, ...]
    returns: tuple[float, ...]
    final_etas: tuple[float, ...]
    final_observed_etas: tuple[float, ...]
    moving_averages: tuple[float, ...]
    steps: tuple[int, ...]
    wall_time: float
    seed: int
    config: dict[str, Any]
    agent: Agent
    started_at: str = ""
    finished_at: str = ""

    def __post_init__(self) -> None:
        lengths = {
            len(self.episodes),
            len(self.returns),
            len(self.final_etas),
            len(self.final_observed_etas),
            len(self.moving_averages),
            len(self.steps),
        }
        if len(lengths) != 1:
            raise InvalidArgument(f"report columns have mismatched lengths {sorted(lengths)}")

    def __len__(self) -> int:
        return len(self.episodes)


@dataclass(frozen=True, slots=True)
class AdaptationConfig:
    """
    Trigger for fine-tuning bursts: when the moving average of ``window`` monitored returns falls
    more than ``drop_fraction * |reference|`` below the reference, ``burst_episodes`` training episodes
    run, at most once per ``cooldown_episodes`` and, if ``cadence_seconds`` is set, once per that many
    seconds.
    """

    window: int = 20
    drop_fraction: float = 0.2
    burst_episodes: int = 10
    cooldown_episodes: int = 50
    cadence_seconds: float | None = None
    episodes: int = 500
    monitor_seed: int = 0

    def __post_init__(self) -> None:
        if self.window < 1:
            raise InvalidArgument(f"window must be >= 1, got {self.window}")
        if not 0 <= self.drop_fraction <= 1:
            raise InvalidArgument(f"drop_fraction must lie in [0, 1], got {self.drop_fraction}")
        if self.burst_episodes < 1:
            raise InvalidArgument(f"burst_episodes must be >= 1, got {self.burst_episodes}")
        if self.cooldown_episodes < 0:
            raise InvalidArgument(f"cooldown_episodes must be >= 0, got {self.cooldown_episodes}")
        if self.cadence_seconds is not None and not self.cadence_seconds > 0:
            raise InvalidArgument(f"cadence_seconds must be positive when set, got {self.cadence_seconds}")
        if self.episodes < 0:
            raise InvalidArgument(f"episodes must be >= 0, got {self.episodes}")
        if not 0 <= self.monitor_seed < U64_LIMIT:
            raise InvalidArgument(f"monitor_seed must be a 64-bit unsigned integer, got {self.monitor_seed}")


@dataclass(frozen=True, slots=True, eq=False)
class AdaptationReport:
    returns: tuple[float, ...]
    final_etas: tuple[float, ...]
    moving_averages: tuple[float, ...]
    trigger_episodes: tuple[int, ...]
    references: tuple[float, ...]
    recovery_returns: tuple[float, ...] = field(default=())

    @property
    def bursts(self) -> int:
        return len(self.trigger_episodes)
