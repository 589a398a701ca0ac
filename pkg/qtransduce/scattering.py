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
from dataclasses import dataclass
from typing import Final, Iterable

import numpy as np
import scipy.linalg
import scipy.optimize

from qtransduce.enums import Mode, Port
from qtransduce.errors import InvalidArgument, ResonanceSingularity
from qtransduce.lindblad import steady_state, transducer_liouvillian
from qtransduce.model import TransducerParams
from qtransduce.quantum import ModeSpace, OperatorMatrix, annihilation, embed, expectation


__all__: Final[tuple[str, ...]] = (
    "DriftMatrix",
    "ScatteringMatrix",
    "drift_matrix",
    "scattering_matrix",
    "spectral_efficiency",
    "added_noise_quanta",
    "frequency_sweep",
    "conversion_bandwidth",
    "simulated_efficiency",
    "efficiency_map",
    "mode_occupations",
)


logger: Final[logging.Logger] = logging.getLogger("qtransduce")

CONDITION_LIMIT: Final[float] = 1e14
SIMULATION_CUTOFFS: Final[tuple[int, int, int]] = (3, 3, 8)
DRIVE_AMPLITUDE: Final[float] = 0.02


@dataclass(frozen=True, slots=True, eq=False)
class DriftMatrix:
    """Linearised Langevin drift over (a_1, a_2, b) in the displaced rotating frame."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        if self.entries.shape != (3, 3):
            raise InvalidArgument(f"drift matrix must be 3x3, got {self.entries.shape}")

    @property
    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues of the drift; their real parts are the mode decay rates (all <= 0 when stable)."""
        return scipy.linalg.eigvals(self.entries)

    @property
    def stable(self) -> bool:
        return bool(np.all(self.eigenvalues.real <= 1e-12))


@dataclass(frozen=True, slots=True, eq=False)
class ScatteringMatrix:
    """Input-output map at signal detuning ``omega``; rows are output ports, columns input ports."""

    omega: float
    entries: np.ndarray

    def element(self, output: Port, source: Port) -> complex:
        return complex(self.entries[int(output), int(source)])

    @property
    def efficiency(self) -> float:
        """Microwave-to-optical transmission ``|S_21|^2``."""
        return float(abs(self.entries[Port.OPTICAL, Port.MICROWAVE]) ** 2)

    def unitarity_error(self) -> float:
        return float(np.max(np.abs(self.entries.conj().T @ self.entries - np.eye(3))))


def drift_matrix(p: TransducerParams) -> DriftMatrix:
    """Drift at matched detunings (both cavities red-detuned by the mechanical frequency)."""
    if min(p.delta) <= 0 or p.delta_m <= 0:
        raise InvalidArgument("damping rates must be positive")
    g1, g2 = p.cavity_rates
    return DriftMatrix(
        entries=np.array(
            [
                [-p.delta[0] / 2, 0.0, -1j * g1],
                [0.0, -p.delta[1] / 2, -1j * g2],
                [-1j * g1, -1j * g2, -p.delta_m / 2],
            ],
            dtype=np.complex128,
        )
    )


def _coupling(p: TransducerParams) -> np.ndarray:
    return np.diag(np.sqrt([p.delta[0], p.delta[1], p.delta_m])).astype(np.complex128)


def scattering_matrix(p: TransducerParams, omega: float) -> ScatteringMatrix:
    """``S(omega) = I - K^dag (-i omega I - M)^-1 K`` with ``K = diag(sqrt(delta_1), sqrt(delta_2), sqrt(delta_m))``."""
    m = drift_matrix(p).entries
    k = _coupling(p)
    resolvent = -1j * omega * np.eye(3) - m
    if not np.isfinite(omega) or np.linalg.cond(resolvent) > CONDITION_LIMIT:
        raise ResonanceSingularity(f"(-i omega - M) is singular at omega={omega}")
    s = np.eye(3, dtype=np.complex128) - k.conj().T @ scipy.linalg.solve(resolvent, k)
    return ScatteringMatrix(omega=float(omega), entries=s)


def spectral_efficiency(p: TransducerParams, omega: float = 0.0) -> float:
    return scattering_matrix(p, omega).efficiency


def added_noise_quanta(p: TransducerParams, omega: float = 0.0) -> float:
    """
    Thermal quanta from the mechanical bath in the optical output, referred to the microwave input:
    ``n_th |S_23|^2 / eta``. Infinite when nothing converts.
    """
    s = scattering_matrix(p, omega)
    eta = s.efficiency
    leak = abs(s.element(Port.OPTICAL, Port.MECHANICAL_BATH)) ** 2
    if eta <= 0.0:
        return math.inf if p.n_th * leak > 0 else 0.0
    return p.n_th * leak / eta


def frequency_sweep(p: TransducerParams, omegas: Iterable[float]) -> list[ScatteringMatrix]:
    return [scattering_matrix(p, float(omega)) for omega in omegas]


def conversion_bandwidth(p: TransducerParams) -> float:
    """Full width of the window around zero detuning where ``eta(omega) >= eta(0) / 2``."""
    peak = spectral_efficiency(p, 0.0)
    if peak <= 0.0:
        return 0.0

    def excess(omega: float) -> float:
        return spectral_efficiency(p, omega) - 0.5 * peak

    edges = []
    for sign in (1.0, -1.0):
        upper = 0.5 * min(*p.delta, p.delta_m)
        while excess(sign * upper) > 0:
            upper *= 2.0
            if upper > 1e9:
                return math.inf
        edges.append(scipy.optimize.brentq(lambda w: excess(sign * w), 0.0, upper, xtol=1e-12))
    return float(sum(edges))


def simulated_efficiency(
    p: TransducerParams,
    cutoffs: tuple[int, int, int] = SIMULATION_CUTOFFS,
    *,
    amplitude: float = DRIVE_AMPLITUDE,
) -> float:
    """
    Efficiency read from the master equation rather than the scattering formula.

    The microwave port is driven with a weak resonant coherent tone of flux ``amplitude^2 * delta_1``
    and the converted flux ``delta_2 |<a_2>|^2`` is read from the steady state. Truncation of a warm
    mechanical mode biases the result, so cross-checks are meaningful for small ``n_th`` or large
    mechanical cutoffs.
    """
    space = ModeSpace(cutoffs=cutoffs)
    a1 = embed(annihilation(cutoffs[Mode.MICROWAVE]), Mode.MICROWAVE, space)
    a2 = embed(annihilation(cutoffs[Mode.OPTICAL]), Mode.OPTICAL, space)
    alpha = amplitude * math.sqrt(p.delta[0])
    drive = OperatorMatrix(1j * math.sqrt(p.delta[0]) * alpha * (a1.entries - a1.dagger().entries))
    rho = steady_state(transducer_liouvillian(p, space, extra=drive))
    output = p.delta[1] * abs(expectation(rho, a2)) ** 2
    eta = output / (alpha * alpha)
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(f"simulated_efficiency: cutoffs {cutoffs}, eta {eta:.6f}")
    return float(eta)


def efficiency_map(p: TransducerParams, n_pump_1: np.ndarray, n_pump_2: np.ndarray) -> np.ndarray:
    """
    ``eta(0)`` over a grid of pump photon numbers, shape ``(len(n_pump_1), len(n_pump_2))``.

    Batched version of :func:`spectral_efficiency`: every grid point is its own scattering solve.
    """
    n1, n2 = np.meshgrid(
        np.asarray(n_pump_1, dtype=np.float64),
        np.asarray(n_pump_2, dtype=np.float64),
        indexing="ij",
    )
    if np.any(n1 < 0) or np.any(n2 < 0):
        raise InvalidArgument("pump photon numbers must be non-negative")
    g1 = p.gamma[0] * np.sqrt(n1)
    g2 = p.gamma[1] * np.sqrt(n2)
    m = np.zeros(n1.shape + (3, 3), dtype=np.complex128)
    m[..., 0, 0] = -p.delta[0] / 2
    m[..., 1, 1] = -p.delta[1] / 2
    m[..., 2, 2] = -p.delta_m / 2
    m[..., 0, 2] = m[..., 2, 0] = -1j * g1
    m[..., 1, 2] = m[..., 2, 1] = -1j * g2
    k = _coupling(p)
    # at omega = 0 the resolvent is -M; only the microwave column is needed
    column = np.linalg.solve(-m, np.broadcast_to(k[:, :1], n1.shape + (3, 1)))
    s21 = -(k[1, 1] * column[..., 1, 0])
    return np.abs(s21) ** 2


def mode_occupations(p: TransducerParams) -> np.ndarray:
    """
    Steady-state occupations ``<a_1^dag a_1>, <a_2^dag a_2>, <b^dag b>`` of the linearised model, from
    the Lyapunov equation ``conj(M) N + N M^T + D = 0`` with thermal diffusion ``D``.
    """
    m = drift_matrix(p).entries
    diffusion = np.diag([p.delta[0] * p.cavity_n_th[0], p.delta[1] * p.cavity_n_th[1], p.delta_m * p.n_th])
    covariance = scipy.linalg.solve_continuous_lyapunov(m.conj(), -diffusion.astype(np.complex128))
    return np.real(np.diag(covariance))
