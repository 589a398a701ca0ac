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

import csv
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Final, Iterable, Sequence

from qtransduce.agent.types import AdaptationReport, TrainingReport
from qtransduce.enums import Port
from qtransduce.env import EvaluationSummary, TraceRow
from qtransduce.errors import InvalidArgument
from qtransduce.scattering import ScatteringMatrix


__all__: Final[tuple[str, ...]] = (
    "METRICS_COLUMNS",
    "MetricsRow",
    "metrics_rows",
    "write_metrics",
    "read_metrics",
    "write_sweep",
    "write_pump_grid",
    "write_trace",
    "write_steady",
    "write_evaluation",
    "write_adaptation",
    "write_summary",
    "read_summary",
)


logger: Final[logging.Logger] = logging.getLogger("qtransduce")

METRICS_COLUMNS: Final[tuple[str, ...]] = (
    "episode",
    "return",
    "final_eta",
    "final_observed_eta",
    "moving_average_return",
    "timestamp",
    "seed",
    "config_hash",
)


@dataclass(frozen=True, slots=True)
class MetricsRow:
    """
    One training episode. ``timestamp`` is the cumulative environment step count when the episode
    finished, a logical clock that keeps metric files reproducible.
    """

    episode: int
    episode_return: float
    final_eta: float
    final_observed_eta: float
    moving_average_return: float
    timestamp: int
    seed: int
    config_hash: str

    def to_row(self) -> list[str]:
        return [
            str(self.episode),
            _number(self.episode_return),
            _number(self.final_eta),
            _number(self.final_observed_eta),
            _number(self.moving_average_return),
            str(self.timestamp),
            str(self.seed),
            self.config_hash,
        ]

    @classmethod
    def from_row(cls, row: dict[str, str]) -> MetricsRow:
        return cls(
            episode=int(row["episode"]),
            episode_return=float(row["return"]),
            final_eta=float(row["final_eta"]),
            final_observed_eta=float(row["final_observed_eta"]),
            moving_average_return=float(row["moving_average_return"]),
            timestamp=int(row["timestamp"]),
            seed=int(row["seed"]),
            config_hash=row["config_hash"],
        )


def _number(value: float) -> str:
    return repr(float(value))


def _write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        count = 0
        for row in rows:
            writer.writerow(row)
            count += 1
    logger.debug(f"wrote {count} rows to {path}")
    return path


def metrics_rows(report: TrainingReport, config_hash: str) -> list[MetricsRow]:
    return [
        MetricsRow(
            episode=episode,
            episode_return=episode_return,
            final_eta=final_eta,
            final_observed_eta=observed,
            moving_average_return=average,
            timestamp=steps,
            seed=report.seed,
            config_hash=config_hash,
        )
        for episode, episode_return, final_eta, observed, average, steps in zip(
            report.episodes,
            report.returns,
            report.final_etas,
            report.final_observed_etas,
            report.moving_averages,
            report.steps,
        )
    ]


def write_metrics(path: str | Path, rows: Sequence[MetricsRow]) -> Path:
    for previous, current in zip(rows, rows[1:]):
        if current.episode <= previous.episode:
            raise InvalidArgument(f"episode indices must increase, got {previous.episode} then {current.episode}")
    return _write_csv(path, METRICS_COLUMNS, (row.to_row() for row in rows))


def read_metrics(path: str | Path) -> list[MetricsRow]:
    with Path(path).open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if tuple(reader.fieldnames or ()) != METRICS_COLUMNS:
            raise InvalidArgument(f"{path} does not have the metrics header {','.join(METRICS_COLUMNS)}")
        return [MetricsRow.from_row(row) for row in reader]


def write_sweep(
    path: str | Path,
    sweep: Sequence[ScatteringMatrix],
    noise: Sequence[float],
    seed: int,
    config_hash: str,
) -> Path:
    header = ("omega", "eta", "s21_real", "s21_imag", "added_noise_quanta", "unitarity_error", "seed", "config_hash")
    rows = []
    for matrix, quanta in zip(sweep, noise):
        s21 = matrix.element(Port.OPTICAL, Port.MICROWAVE)
        rows.append(
            [
                _number(matrix.omega),
                _number(matrix.efficiency),
                _number(s21.real),
                _number(s21.imag),
                _number(quanta),
                _number(matrix.unitarity_error()),
                seed,
                config_hash,
            ]
        )
    return _write_csv(path, header, rows)


def write_pump_grid(
    path: str | Path,
    n_pump_1: Sequence[float],
    n_pump_2: Sequence[float],
    etas: Any,
    seed: int,
    config_hash: str,
) -> Path:
    header = ("n_pump_1", "n_pump_2", "eta", "seed", "config_hash")
    rows = (
        [_number(n1), _number(n2), _number(etas[i][j]), seed, config_hash]
        for i, n1 in enumerate(n_pump_1)
        for j, n2 in enumerate(n_pump_2)
    )
    return _write_csv(path, header, rows)


def write_trace(path: str | Path, trace: Sequence[TraceRow], seed: int, config_hash: str) -> Path:
    header = ("step", "log10_n_pump_1", "log10_n_pump_2", "eta_true", "eta_observed", "reward", "seed", "config_hash")
    rows = (
        [
            row.step,
            _number(row.log_pump[0]),
            _number(row.log_pump[1]),
            _number(row.eta_true),
            _number(row.eta_observed),
            _number(row.reward),
            seed,
            config_hash,
        ]
        for row in trace
    )
    return _write_csv(path, header, rows)


def write_steady(
    path: str | Path,
    modes: Sequence[str],
    lindblad: Sequence[float],
    analytic: Sequence[float],
    seed: int,
    config_hash: str,
) -> Path:
    header = ("mode", "lindblad_occupation", "analytic_occupation", "seed", "config_hash")
    rows = ([mode, _number(a), _number(b), seed, config_hash] for mode, a, b in zip(modes, lindblad, analytic))
    return _write_csv(path, header, rows)


def write_evaluation(path: str | Path, summary: EvaluationSummary, seed: int, config_hash: str) -> Path:
    header = ("episode", "return", "final_eta", "seed", "config_hash")
    rows = (
        [index, _number(episode_return), _number(final_eta), seed, config_hash]
        for index, (episode_return, final_eta) in enumerate(zip(summary.returns, summary.final_etas))
    )
    return _write_csv(path, header, rows)


def write_adaptation(path: str | Path, report: AdaptationReport, seed: int, config_hash: str) -> Path:
    header = ("episode", "return", "final_eta", "moving_average_return", "burst", "seed", "config_hash")
    triggers = set(report.trigger_episodes)
    rows = (
        [index, _number(r), _number(eta), _number(avg), int(index in triggers), seed, config_hash]
        for index, (r, eta, avg) in enumerate(zip(report.returns, report.final_etas, report.moving_averages))
    )
    return _write_csv(path, header, rows)


def _jsonable(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_summary(path: str | Path, summary: dict[str, Any]) -> Path:
    """Machine-readable run summary (JSON); non-finite floats are written as strings."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(summary), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_summary(path: str | Path) -> dict[str, Any]:
    return json.loads(Path(path).read_text(encoding="utf-8"))
