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

import argparse
import dataclasses
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Final, Sequence

import numpy as np

from qtransduce.agent import adapt_online, monitor_episode, train
from qtransduce.checkpoint import load_checkpoint, save_checkpoint
from qtransduce.config import RunConfig, config_hash, load_config, parse_config
from qtransduce.enums import Algorithm, Mode
from qtransduce.env import TransducerEnv, evaluate_policy, grid_search_optimum
from qtransduce.errors import QTransduceException
from qtransduce.lindblad import steady_state, transducer_liouvillian
from qtransduce.metrics import (
    metrics_rows,
    write_adaptation,
    write_evaluation,
    write_metrics,
    write_pump_grid,
    write_steady,
    write_summary,
    write_sweep,
    write_trace,
)
from qtransduce.model import conversion_efficiency, cooperativities
from qtransduce.quantum import ModeSpace, embed, expectation, number
from qtransduce.scattering import (
    added_noise_quanta,
    conversion_bandwidth,
    efficiency_map,
    frequency_sweep,
    mode_occupations,
    simulated_efficiency,
    spectral_efficiency,
)
from qtransduce.utils.functions import U64_LIMIT, derive_seed, utc_now


__all__: Final[tuple[str, ...]] = (
    "OUT_DIR_ENV",
    "build_parser",
    "run",
    "main",
)


logger: Final[logging.Logger] = logging.getLogger("qtransduce")

OUT_DIR_ENV: Final[str] = "QTRANSDUCE_OUT_DIR"
LOG_FORMAT: Final[str] = "%(asctime)s %(levelname)s %(name)s: %(message)s"
GRID_RESOLUTION: Final[int] = 200


class _UsageError(Exception):
    pass


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < U64_LIMIT:
        raise argparse.ArgumentTypeError(f"seed must be in [0, 2**64), got {text}")
    return value


def _count(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative count, got {text}")
    return value


def _positive_count(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive count, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="run configuration (INI)")
    common.add_argument("--out", type=Path, help=f"output directory (overrides ${OUT_DIR_ENV} and the config)")
    common.add_argument("--seed", type=_seed, help="64-bit seed, overrides [run] seed")
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(prog="qtransduce", description="Quantum transducer simulation and control.")
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")
    commands.add_parser("sweep", parents=[common], help="efficiency versus detuning and pump grid")
    commands.add_parser("steady", parents=[common], help="steady-state occupations of the device")

    train_parser = commands.add_parser("train", parents=[common], help="train a controller")
    train_parser.add_argument("--algorithm", choices=[a.value for a in Algorithm], help="learning rule")
    train_parser.add_argument("--episodes", type=_count, help="overrides [learning] episodes")
    train_parser.add_argument("--resume", type=Path, help="continue from this checkpoint")
    train_parser.add_argument("--checkpoint", type=Path, help="where to write the checkpoint")

    evaluate_parser = commands.add_parser("evaluate", parents=[common], help="evaluate a trained controller")
    evaluate_parser.add_argument("--checkpoint", type=Path, required=True, help="checkpoint to evaluate")
    evaluate_parser.add_argument("--episodes", type=_positive_count, help="overrides [run] evaluation_episodes")

    adapt_parser = commands.add_parser("adapt", parents=[common], help="monitor and fine-tune under drift")
    adapt_parser.add_argument("--checkpoint", type=Path, required=True, help="trained checkpoint to adapt")
    return parser


def _load(args: argparse.Namespace) -> RunConfig:
    if args.config is None:
        if args.seed is None:
            raise _UsageError("either --config or --seed is required")
        return parse_config(f"[run]\nseed = {args.seed}\n", source="<defaults>")
    cfg = load_config(args.config)
    return cfg if args.seed is None else cfg.with_seed(args.seed)


def _output_dir(args: argparse.Namespace, cfg: RunConfig) -> Path:
    directory = args.out or os.environ.get(OUT_DIR_ENV) or cfg.output_dir
    path = Path(directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _base_summary(command: str, cfg: RunConfig, digest: str, started_at: str) -> dict[str, Any]:
    return {
        "command": command,
        "seed": cfg.seed,
        "config_hash": digest,
        "config": cfg.to_dict(),
        "started_at": started_at,
    }


def _sweep(args: argparse.Namespace, cfg: RunConfig, out: Path) -> dict[str, Any]:
    digest = config_hash(cfg)
    summary = _base_summary("sweep", cfg, digest, utc_now())
    p = cfg.params
    omegas = np.union1d(np.linspace(cfg.sweep.omega_min, cfg.sweep.omega_max, cfg.sweep.points), [0.0])
    sweep = frequency_sweep(p, omegas)
    noise = [added_noise_quanta(p, float(omega)) for omega in omegas]
    write_sweep(out / "sweep.csv", sweep, noise, cfg.seed, digest)

    axes = [10.0 ** np.linspace(lo, hi, cfg.sweep.grid_points) for lo, hi in cfg.env.action_bounds]
    write_pump_grid(out / "pump_grid.csv", axes[0], axes[1], efficiency_map(p, axes[0], axes[1]), cfg.seed, digest)

    pair = cooperativities(p)
    optimum, actuators = grid_search_optimum(cfg.env, resolution=GRID_RESOLUTION)
    summary.update(
        eta_zero_detuning=spectral_efficiency(p, 0.0),
        eta_analytic=conversion_efficiency(pair),
        cooperativities=[pair.c1, pair.c2],
        bandwidth=conversion_bandwidth(p),
        grid_optimum_eta=optimum,
        grid_optimum_actuators=list(actuators),
    )
    logger.info(f"sweep: eta(0) = {summary['eta_zero_detuning']:.6f}, bandwidth {summary['bandwidth']:.4f}")
    return summary


def _steady(args: argparse.Namespace, cfg: RunConfig, out: Path) -> dict[str, Any]:
    digest = config_hash(cfg)
    summary = _base_summary("steady", cfg, digest, utc_now())
    space = ModeSpace(cutoffs=cfg.cutoffs)
    rho = steady_state(transducer_liouvillian(cfg.params, space))
    lindblad = [expectation(rho, embed(number(space.cutoffs[mode]), mode, space)).real for mode in Mode]
    analytic = mode_occupations(cfg.params)
    names = [mode.name.lower() for mode in Mode]
    write_steady(out / "steady.csv", names, lindblad, analytic, cfg.seed, digest)

    summary.update(
        cutoffs=list(cfg.cutoffs),
        occupations=dict(zip(names, lindblad)),
        analytic_occupations=dict(zip(names, analytic.tolist())),
        max_occupation_deviation=float(np.max(np.abs(np.array(lindblad) - analytic))),
        min_eigenvalue=float(np.min(rho.eigenvalues())),
        simulated_efficiency=simulated_efficiency(cfg.params),
        spectral_efficiency=spectral_efficiency(cfg.params, 0.0),
    )
    logger.info(
        f"steady: mechanical occupation {lindblad[Mode.MECHANICAL]:.6f} (analytic {analytic[Mode.MECHANICAL]:.6f})"
    )
    return summary


def _train(args: argparse.Namespace, cfg: RunConfig, out: Path) -> dict[str, Any]:
    digest = config_hash(cfg)
    summary = _base_summary("train", cfg, digest, utc_now())
    algorithm = Algorithm(args.algorithm or cfg.algorithm)
    learning = cfg.learning
    if args.episodes is not None:
        learning = dataclasses.replace(learning, episodes=args.episodes)
    agent = load_checkpoint(args.resume) if args.resume is not None else None

    report = train(cfg.env, learning, algorithm, agent=agent)
    write_metrics(out / "metrics.csv", metrics_rows(report, digest))
    checkpoint = save_checkpoint(
        report.agent,
        args.checkpoint or out / "checkpoint.json",
        seed=cfg.seed,
        config_hash=digest,
    )

    tail = report.final_etas[-100:]
    optimum, _ = grid_search_optimum(cfg.env, resolution=GRID_RESOLUTION)
    summary.update(
        algorithm=algorithm.value,
        episodes=len(report),
        episodes_trained=report.agent.episodes_trained,
        resumed_from=str(args.resume) if args.resume is not None else None,
        mean_final_eta_last_100=float(np.mean(tail)) if tail else None,
        grid_optimum_eta=optimum,
        reference_return=report.agent.reference_return,
        wall_time=report.wall_time,
        checkpoint=str(checkpoint),
    )
    return summary


def _evaluate(args: argparse.Namespace, cfg: RunConfig, out: Path) -> dict[str, Any]:
    digest = config_hash(cfg)
    summary = _base_summary("evaluate", cfg, digest, utc_now())
    agent = load_checkpoint(args.checkpoint)
    episodes = cfg.evaluation_episodes if args.episodes is None else args.episodes
    result = evaluate_policy(cfg.env, agent.as_policy(), episodes, cfg.seed)
    write_evaluation(out / "evaluation.csv", result, cfg.seed, digest)
    if cfg.write_trace:
        env = TransducerEnv(cfg.env)
        monitor_episode(env, agent, derive_seed(cfg.seed, 0))
        write_trace(out / "trace.csv", env.trace, cfg.seed, digest)

    optimum, _ = grid_search_optimum(cfg.env, resolution=GRID_RESOLUTION)
    summary.update(
        checkpoint=str(args.checkpoint),
        episodes=len(result.returns),
        mean_final_eta=result.mean_final_eta,
        max_final_eta=result.max_final_eta,
        mean_return=result.mean_return,
        grid_optimum_eta=optimum,
    )
    logger.info(f"evaluate: mean final eta {result.mean_final_eta:.5f} (grid optimum {optimum:.5f})")
    return summary


def _adapt(args: argparse.Namespace, cfg: RunConfig, out: Path) -> dict[str, Any]:
    digest = config_hash(cfg)
    summary = _base_summary("adapt", cfg, digest, utc_now())
    agent = load_checkpoint(args.checkpoint)
    env = TransducerEnv(cfg.env)
    agent, report = adapt_online(agent, env, cfg.adaptation, learning=cfg.learning)
    write_adaptation(out / "adaptation.csv", report, cfg.seed, digest)
    checkpoint = save_checkpoint(agent, out / "adapted.json", seed=cfg.seed, config_hash=digest)
    summary.update(
        checkpoint=str(checkpoint),
        bursts=report.bursts,
        trigger_episodes=list(report.trigger_episodes),
        references=list(report.references),
        recovery_returns=list(report.recovery_returns),
    )
    return summary


COMMANDS: Final[dict[str, Callable[[argparse.Namespace, RunConfig, Path], dict[str, Any]]]] = {
    "sweep": _sweep,
    "steady": _steady,
    "train": _train,
    "evaluate": _evaluate,
    "adapt": _adapt,
}


def run(argv: Sequence[str] | None = None) -> int:
    """
    Entry point behind the ``qtransduce`` script. Returns 0 on success, 2 on usage errors and 1 on
    runtime failures.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format=LOG_FORMAT)
    try:
        cfg = _load(args)
        out = _output_dir(args, cfg)
        summary = COMMANDS[args.command](args, cfg, out)
        summary["finished_at"] = utc_now()
        write_summary(out / f"{args.command}_summary.json", summary)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"qtransduce: error: {exc}", file=sys.stderr)
        return 2
    except QTransduceException as exc:
        logger.debug("run failed", exc_info=True)
        print(f"qtransduce: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"qtransduce: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
