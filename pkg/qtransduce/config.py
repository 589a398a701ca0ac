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

import configparser
import dataclasses
import math
import re
from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path
from typing import Any, Callable, Final

from qtransduce.agent.types import AdaptationConfig, LearningConfig
from qtransduce.enums import (
    Algorithm,
    DriftTarget,
    EfficiencyOracle,
    RewardMode,
)
from qtransduce.env import DriftSpec, EnvConfig
from qtransduce.errors import ConfigError, InvalidArgument
from qtransduce.model import TransducerParams
from qtransduce.utils.functions import U64_LIMIT, digest


__all__: Final[tuple[str, ...]] = (
    "SweepConfig",
    "RunConfig",
    "load_config",
    "parse_config",
    "serialize",
    "config_hash",
)


REQUIRED: Final[object] = object()
SECTION_PATTERN: Final[re.Pattern[str]] = re.compile(r"^\s*\[([^\]]+)\]")
KEY_PATTERN: Final[re.Pattern[str]] = re.compile(r"^\s*([^=:#;\s\[][^=:]*?)\s*[=:]")

Key = tuple[str, str]


@dataclass(frozen=True, slots=True)
class SweepConfig:
    """Detuning range and pump-grid resolution of the ``sweep`` command."""

    omega_min: float = -30.0
    omega_max: float = 30.0
    points: int = 601
    grid_points: int = 41


@dataclass(frozen=True, slots=True)
class RunConfig:
    seed: int
    algorithm: Algorithm
    cutoffs: tuple[int, int, int]
    evaluation_episodes: int
    params: TransducerParams
    env: EnvConfig
    learning: LearningConfig
    adaptation: AdaptationConfig
    output_dir: str
    write_trace: bool
    sweep: SweepConfig

    def with_seed(self, seed: int) -> RunConfig:
        """Same configuration with every seeded component re-keyed to ``seed``."""
        values = _values_of(self)
        values[("run", "seed")] = seed
        return _build(values)

    def with_output_dir(self, directory: str) -> RunConfig:
        return dataclasses.replace(self, output_dir=str(directory))

    def to_dict(self) -> dict[str, dict[str, str]]:
        """Config echo for run summaries, every value in its file notation."""
        echo: dict[str, dict[str, str]] = {}
        for (section, key), value in _values_of(self).items():
            echo.setdefault(section, {})[key] = FIELDS[(section, key)].format(value)
        return echo


def _parse_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError(f"{text!r} is not finite")
    return value


def _parse_int(text: str) -> int:
    return int(text.strip())


def _parse_pair(text: str) -> tuple[float, float]:
    parts = [part for part in text.split(",")]
    if len(parts) != 2:
        raise ValueError(f"expected two comma-separated numbers, got {text!r}")
    return _parse_float(parts[0]), _parse_float(parts[1])


def _parse_ints(text: str) -> tuple[int, ...]:
    return tuple(_parse_int(part) for part in text.split(","))


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "yes", "true", "on"):
        return True
    if lowered in ("0", "no", "false", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_optional_float(text: str) -> float | None:
    return None if text.strip().lower() in ("", "none") else _parse_float(text)


def _parse_enum(kind: type[StrEnum], optional: bool = False) -> Callable[[str], Any]:
    def _parse(text: str) -> Any:
        text = text.strip().lower()
        if optional and text in ("", "none"):
            return None
        try:
            return kind(text)
        except ValueError as exc:
            choices = ", ".join(member.value for member in kind)
            raise ValueError(f"expected one of {choices}{', none' if optional else ''}, got {text!r}") from exc

    return _parse


def _format_float(value: float) -> str:
    return repr(float(value))


def _format_pair(value: tuple[float, float]) -> str:
    return f"{float(value[0])!r}, {float(value[1])!r}"


def _format_ints(value: tuple[int, ...]) -> str:
    return ", ".join(str(item) for item in value)


def _format_optional(value: Any) -> str:
    if value is None:
        return "none"
    return value.value if isinstance(value, StrEnum) else repr(float(value))


def _format_bool(value: bool) -> str:
    return "true" if value else "false"


@dataclass(frozen=True, slots=True)
class _Field:
    section: str
    key: str
    parse: Callable[[str], Any]
    format: Callable[[Any], str]
    default: Any = REQUIRED
    check: Callable[[Any], bool] | None = None
    constraint: str = ""


def _positive(value: float) -> bool:
    return value > 0


def _non_negative(value: float) -> bool:
    return value >= 0


def _pair_positive(value: tuple[float, float]) -> bool:
    return min(value) > 0


def _pair_non_negative(value: tuple[float, float]) -> bool:
    return min(value) >= 0


def _ordered(value: tuple[float, float]) -> bool:
    return value[0] <= value[1]


_PARAMS: Final[TransducerParams] = TransducerParams()
_ENV: Final[EnvConfig] = EnvConfig()
_LEARNING: Final[LearningConfig] = LearningConfig()
_ADAPTATION: Final[AdaptationConfig] = AdaptationConfig()
_SWEEP: Final[SweepConfig] = SweepConfig()
_DRIFT: Final[DriftSpec] = DriftSpec(DriftTarget.DELTA_M)

_FIELD_LIST: Final[tuple[_Field, ...]] = (
    _Field("run", "seed", _parse_int, str, REQUIRED, lambda v: 0 <= v < U64_LIMIT, "must be in [0, 2**64)"),
    _Field("run", "algorithm", _parse_enum(Algorithm), str, Algorithm.ADVANTAGE),
    _Field("run", "cutoffs", _parse_ints, _format_ints, (4, 4, 4), lambda v: len(v) == 3 and min(v) >= 2,
           "must be three Fock cutoffs >= 2"),
    _Field("run", "evaluation_episodes", _parse_int, str, 20, _positive, "must be > 0"),
    _Field("transducer", "omega_m", _parse_float, _format_float, _PARAMS.omega_m),
    _Field("transducer", "omega_c", _parse_pair, _format_pair, _PARAMS.omega_c),
    _Field("transducer", "gamma", _parse_pair, _format_pair, _PARAMS.gamma, _pair_positive, "must be > 0"),
    _Field("transducer", "epsilon", _parse_pair, _format_pair, _PARAMS.epsilon),
    _Field("transducer", "omega_d", _parse_pair, _format_pair, _PARAMS.omega_d),
    _Field("transducer", "delta", _parse_pair, _format_pair, _PARAMS.delta, _pair_positive, "must be > 0"),
    _Field("transducer", "delta_m", _parse_float, _format_float, _PARAMS.delta_m, _positive, "must be > 0"),
    _Field("transducer", "n_th", _parse_float, _format_float, _PARAMS.n_th, _non_negative, "must be >= 0"),
    _Field("transducer", "n_pump", _parse_pair, _format_pair, _PARAMS.n_pump, _pair_non_negative, "must be >= 0"),
    _Field("transducer", "cavity_n_th", _parse_pair, _format_pair, _PARAMS.cavity_n_th, _pair_non_negative,
           "must be >= 0"),
    _Field("environment", "action_bounds_1", _parse_pair, _format_pair, _ENV.action_bounds[0], _ordered,
           "must satisfy min <= max"),
    _Field("environment", "action_bounds_2", _parse_pair, _format_pair, _ENV.action_bounds[1], _ordered,
           "must satisfy min <= max"),
    _Field("environment", "episode_length", _parse_int, str, _ENV.episode_length, _positive, "must be >= 1"),
    _Field("environment", "observation_noise_sd", _parse_float, _format_float, _ENV.observation_noise_sd,
           _non_negative, "must be >= 0"),
    _Field("environment", "increment_bound", _parse_float, _format_float, _ENV.increment_bound, _positive,
           "must be > 0"),
    _Field("environment", "reward_mode", _parse_enum(RewardMode), str, _ENV.reward_mode),
    _Field("environment", "oracle", _parse_enum(EfficiencyOracle), str, _ENV.oracle),
    _Field("environment", "drift_target", _parse_enum(DriftTarget, optional=True), _format_optional, None),
    _Field("environment", "drift_walk_sd", _parse_float, _format_float, _DRIFT.walk_sd, _non_negative,
           "must be >= 0"),
    _Field("environment", "drift_onset_step", _parse_int, str, _DRIFT.onset_step, _non_negative, "must be >= 0"),
    _Field("environment", "drift_jump_factor", _parse_float, _format_float, _DRIFT.jump_factor, _positive,
           "must be > 0"),
    _Field("learning", "alpha_theta", _parse_float, _format_float, _LEARNING.alpha_theta, _non_negative,
           "must be >= 0"),
    _Field("learning", "alpha_w", _parse_float, _format_float, _LEARNING.alpha_w, _non_negative, "must be >= 0"),
    _Field("learning", "gamma_rl", _parse_float, _format_float, _LEARNING.gamma_rl, lambda v: 0 <= v < 1,
           "must lie in [0, 1)"),
    _Field("learning", "episodes", _parse_int, str, _LEARNING.episodes, _non_negative, "must be >= 0"),
    _Field("learning", "parallel_envs", _parse_int, str, _LEARNING.parallel_envs, _positive, "must be >= 1"),
    _Field("learning", "hidden", _parse_ints, _format_ints, _LEARNING.hidden, lambda v: min(v) >= 1,
           "must be widths >= 1"),
    _Field("learning", "initial_log_std", _parse_float, _format_float, _LEARNING.initial_log_std),
    _Field("learning", "window", _parse_int, str, _LEARNING.window, _positive, "must be >= 1"),
    _Field("adaptation", "window", _parse_int, str, _ADAPTATION.window, _positive, "must be >= 1"),
    _Field("adaptation", "drop_fraction", _parse_float, _format_float, _ADAPTATION.drop_fraction,
           lambda v: 0 <= v <= 1, "must lie in [0, 1]"),
    _Field("adaptation", "burst_episodes", _parse_int, str, _ADAPTATION.burst_episodes, _positive, "must be >= 1"),
    _Field("adaptation", "cooldown_episodes", _parse_int, str, _ADAPTATION.cooldown_episodes, _non_negative,
           "must be >= 0"),
    _Field("adaptation", "cadence_seconds", _parse_optional_float, _format_optional, _ADAPTATION.cadence_seconds,
           lambda v: v is None or v > 0, "must be > 0 or none"),
    _Field("adaptation", "episodes", _parse_int, str, _ADAPTATION.episodes, _non_negative, "must be >= 0"),
    _Field("output", "directory", str.strip, str, "runs", lambda v: bool(v), "must not be empty"),
    _Field("output", "trace", _parse_bool, _format_bool, True),
    _Field("sweep", "omega_min", _parse_float, _format_float, _SWEEP.omega_min),
    _Field("sweep", "omega_max", _parse_float, _format_float, _SWEEP.omega_max),
    _Field("sweep", "points", _parse_int, str, _SWEEP.points, lambda v: v >= 2, "must be >= 2"),
    _Field("sweep", "grid_points", _parse_int, str, _SWEEP.grid_points, lambda v: v >= 2, "must be >= 2"),
)
FIELDS: Final[dict[Key, _Field]] = {(f.section, f.key): f for f in _FIELD_LIST}
SECTIONS: Final[tuple[str, ...]] = tuple(dict.fromkeys(f.section for f in _FIELD_LIST))


def _where(key: Key, lines: dict[Key, int]) -> str:
    line = lines.get(key)
    return f"[{key[0]}] {key[1]}" + (f" (line {line})" if line is not None else "")


def _section(values: dict[Key, Any], section: str) -> dict[str, Any]:
    return {key: value for (name, key), value in values.items() if name == section}


def _build(values: dict[Key, Any], lines: dict[Key, int] | None = None) -> RunConfig:
    lines = lines or {}
    complete: dict[Key, Any] = {}
    for key, spec in FIELDS.items():
        value = values.get(key, spec.default)
        if value is REQUIRED:
            raise ConfigError(f"missing mandatory key {key[1]!r} in section [{key[0]}]", key=key[1])
        if spec.check is not None and not spec.check(value):
            raise ConfigError(f"{_where(key, lines)} = {value!r} {spec.constraint}", key=key[1], line=lines.get(key))
        complete[key] = value

    run = _section(complete, "run")
    env_values = _section(complete, "environment")
    learning_values = _section(complete, "learning")
    if env_values["drift_target"] is None:
        drift = None
    else:
        drift = DriftSpec(
            target=env_values["drift_target"],
            walk_sd=env_values["drift_walk_sd"],
            onset_step=env_values["drift_onset_step"],
            jump_factor=env_values["drift_jump_factor"],
        )
    try:
        params = TransducerParams(**_section(complete, "transducer"))
        env = EnvConfig(
            base_params=params,
            action_bounds=(env_values["action_bounds_1"], env_values["action_bounds_2"]),
            episode_length=env_values["episode_length"],
            observation_noise_sd=env_values["observation_noise_sd"],
            drift=drift,
            seed=run["seed"],
            increment_bound=env_values["increment_bound"],
            reward_mode=env_values["reward_mode"],
            oracle=env_values["oracle"],
        )
        learning = LearningConfig(**learning_values, seed=run["seed"])
        adaptation = AdaptationConfig(**_section(complete, "adaptation"), monitor_seed=run["seed"])
        sweep = SweepConfig(**_section(complete, "sweep"))
    except InvalidArgument as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
    if sweep.omega_min >= sweep.omega_max:
        raise ConfigError(
            f"[sweep] omega_min = {sweep.omega_min!r} must be below omega_max = {sweep.omega_max!r}",
            key="omega_min",
            line=lines.get(("sweep", "omega_min")),
        )

    return RunConfig(
        seed=run["seed"],
        algorithm=run["algorithm"],
        cutoffs=tuple(run["cutoffs"]),
        evaluation_episodes=run["evaluation_episodes"],
        params=params,
        env=env,
        learning=learning,
        adaptation=adaptation,
        output_dir=complete[("output", "directory")],
        write_trace=complete[("output", "trace")],
        sweep=sweep,
    )


def _values_of(cfg: RunConfig) -> dict[Key, Any]:
    drift = cfg.env.drift or _DRIFT
    values: dict[Key, Any] = {
        ("run", "seed"): cfg.seed,
        ("run", "algorithm"): cfg.algorithm,
        ("run", "cutoffs"): cfg.cutoffs,
        ("run", "evaluation_episodes"): cfg.evaluation_episodes,
        ("environment", "action_bounds_1"): cfg.env.action_bounds[0],
        ("environment", "action_bounds_2"): cfg.env.action_bounds[1],
        ("environment", "episode_length"): cfg.env.episode_length,
        ("environment", "observation_noise_sd"): cfg.env.observation_noise_sd,
        ("environment", "increment_bound"): cfg.env.increment_bound,
        ("environment", "reward_mode"): cfg.env.reward_mode,
        ("environment", "oracle"): cfg.env.oracle,
        ("environment", "drift_target"): None if cfg.env.drift is None else drift.target,
        ("environment", "drift_walk_sd"): drift.walk_sd,
        ("environment", "drift_onset_step"): drift.onset_step,
        ("environment", "drift_jump_factor"): drift.jump_factor,
        ("output", "directory"): cfg.output_dir,
        ("output", "trace"): cfg.write_trace,
    }
    for name, value in cfg.params.to_dict().items():
        values[("transducer", name)] = value
    for name, value in cfg.learning.to_dict().items():
        if name != "seed":
            values[("learning", name)] = tuple(value) if name == "hidden" else value
    for section, source in (("adaptation", cfg.adaptation), ("sweep", cfg.sweep)):
        for spec in dataclasses.fields(source):
            if (section, spec.name) in FIELDS:
                values[(section, spec.name)] = getattr(source, spec.name)
    return {key: values[key] for key in FIELDS}


def _locate(text: str) -> dict[Key, int]:
    lines: dict[Key, int] = {}
    section: str | None = None
    for number, line in enumerate(text.splitlines(), start=1):
        if match := SECTION_PATTERN.match(line):
            section = match.group(1).strip()
            lines.setdefault((section, ""), number)
        elif section is not None and (match := KEY_PATTERN.match(line)):
            lines.setdefault((section, match.group(1).strip().lower()), number)
    return lines


def parse_config(text: str, *, source: str = "<config>") -> RunConfig:
    """Parse and validate an INI document; see :func:`load_config`."""
    parser = configparser.ConfigParser(interpolation=None, default_section="\x00")
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        if line is None and getattr(exc, "errors", None):
            line = exc.errors[0][0]
        raise ConfigError(f"{source}: cannot parse configuration: {exc}", line=line) from exc

    lines = _locate(text)
    values: dict[Key, Any] = {}
    for section in parser.sections():
        if section not in SECTIONS:
            line = lines.get((section, ""))
            raise ConfigError(
                f"{source}: unknown section [{section}]" + (f" (line {line})" if line else ""),
                key=section,
                line=line,
            )
        for key, raw in parser.items(section):
            if (section, key) not in FIELDS:
                raise ConfigError(
                    f"{source}: unknown key {_where((section, key), lines)}", key=key, line=lines.get((section, key))
                )
            try:
                values[(section, key)] = FIELDS[(section, key)].parse(raw)
            except ValueError as exc:
                raise ConfigError(
                    f"{source}: {_where((section, key), lines)}: {exc}", key=key, line=lines.get((section, key))
                ) from exc
    return _build(values, lines)


def load_config(path: str | Path) -> RunConfig:
    """
    Read a run configuration. Unknown sections and keys are rejected, omitted keys take their defaults
    and ``[run] seed`` is mandatory.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc.strerror or exc}") from exc
    return parse_config(text, source=str(path))


def serialize(cfg: RunConfig) -> str:
    """Canonical INI text with every key written out; ``parse_config(serialize(c)) == c``."""
    values = _values_of(cfg)
    blocks: list[str] = []
    for section in SECTIONS:
        rows = [
            f"{key} = {FIELDS[(name, key)].format(value)}" for (name, key), value in values.items() if name == section
        ]
        blocks.append("\n".join([f"[{section}]", *rows]))
    return "\n\n".join(blocks) + "\n"


def config_hash(cfg: RunConfig) -> str:
    return digest(serialize(cfg))
