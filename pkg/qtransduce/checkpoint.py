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

import json
import logging
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Any, Final

import numpy as np

from qtransduce.agent.critic import CriticParams
from qtransduce.agent.mlp import MlpParams
from qtransduce.agent.policy import PolicyParams
from qtransduce.agent.training import Agent
from qtransduce.agent.types import LearningConfig
from qtransduce.errors import CheckpointVersionMismatch, CorruptCheckpoint, InvalidArgument
from qtransduce.utils.functions import digest, from_timestamp, utc_now


__all__: Final[tuple[str, ...]] = (
    "CHECKPOINT_VERSION",
    "Checkpoint",
    "save_checkpoint",
    "read_checkpoint",
    "load_checkpoint",
)


logger: Final[logging.Logger] = logging.getLogger("qtransduce")

CHECKPOINT_VERSION: Final[int] = 1


@dataclass(frozen=True, slots=True, eq=False)
class Checkpoint:
    agent: Agent
    seed: int
    config_hash: str
    saved_at: datetime


def _canonical(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def _agent_payload(agent: Agent) -> dict[str, Any]:
    return {
        "algorithm": agent.algorithm.value,
        "policy": {
            **agent.policy.trunk.to_dict(),
            "log_std": agent.policy.log_std.tolist(),
            "bound": agent.policy.bound,
        },
        "critic": {
            **agent.critic.trunk.to_dict(),
            "mode": agent.critic.mode.value,
            "action_scale": agent.critic.action_scale,
        },
        "learning": agent.learning.to_dict(),
        "rng": agent.rng.bit_generator.state,
        "reference_return": agent.reference_return,
        "episodes_trained": agent.episodes_trained,
        "steps_taken": agent.steps_taken,
        "recent_returns": list(agent.recent_returns),
    }


def _restore_rng(state: dict[str, Any]) -> np.random.Generator:
    bit_generator = getattr(np.random, state["bit_generator"])
    rng = np.random.Generator(bit_generator())
    rng.bit_generator.state = state
    return rng


def _agent_from_payload(payload: dict[str, Any]) -> Agent:
    policy = payload["policy"]
    critic = payload["critic"]
    return Agent(
        policy=PolicyParams(
            trunk=MlpParams.from_dict(policy),
            log_std=np.array(policy["log_std"], dtype=np.float64),
            bound=policy["bound"],
        ),
        critic=CriticParams(
            trunk=MlpParams.from_dict(critic),
            mode=critic["mode"],
            action_scale=critic["action_scale"],
        ),
        algorithm=payload["algorithm"],
        rng=_restore_rng(payload["rng"]),
        learning=LearningConfig.from_dict(payload["learning"]),
        reference_return=payload["reference_return"],
        episodes_trained=payload["episodes_trained"],
        steps_taken=payload["steps_taken"],
        recent_returns=payload["recent_returns"],
    )


def save_checkpoint(agent: Agent, path: str | Path, *, seed: int | None = None, config_hash: str = "") -> Path:
    """
    Write ``agent`` as a versioned JSON container. The checksum is a BLAKE2b digest over the version,
    seed, config hash and payload.
    """
    body = {
        "version": CHECKPOINT_VERSION,
        "seed": agent.learning.seed if seed is None else seed,
        "config_hash": config_hash,
        "payload": _agent_payload(agent),
    }
    document = {**body, "saved_at": utc_now(), "checksum": digest(_canonical(body))}
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=1) + "\n", encoding="utf-8")
    logger.info(f"checkpoint saved to {path} after {agent.episodes_trained} episodes")
    return path


def read_checkpoint(path: str | Path) -> Checkpoint:
    """Load and verify a checkpoint together with its metadata."""
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CorruptCheckpoint(f"cannot read checkpoint {path}: {exc.strerror or exc}") from exc
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise CorruptCheckpoint(f"{path} is not a checkpoint: {exc}") from exc
    if not isinstance(document, dict):
        raise CorruptCheckpoint(f"{path} is not a checkpoint")

    version = document.get("version")
    if version != CHECKPOINT_VERSION:
        raise CheckpointVersionMismatch(f"{path} has format version {version!r}, expected {CHECKPOINT_VERSION}")
    try:
        body = {key: document[key] for key in ("version", "seed", "config_hash", "payload")}
        checksum = document["checksum"]
    except KeyError as exc:
        raise CorruptCheckpoint(f"{path} is missing field {exc.args[0]!r}") from exc
    if digest(_canonical(body)) != checksum:
        raise CorruptCheckpoint(f"{path} failed its checksum")

    try:
        agent = _agent_from_payload(body["payload"])
        saved_at = from_timestamp(document["saved_at"])
    except (KeyError, TypeError, ValueError, InvalidArgument) as exc:
        raise CorruptCheckpoint(f"{path} has an unreadable payload: {exc}") from exc
    return Checkpoint(agent=agent, seed=body["seed"], config_hash=body["config_hash"], saved_at=saved_at)


def load_checkpoint(path: str | Path) -> Agent:
    return read_checkpoint(path).agent
