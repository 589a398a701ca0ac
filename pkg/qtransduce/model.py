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

import dataclasses
import functools
import math
from dataclasses import dataclass
from typing import Any, Final

import numpy as np

from qtransduce.enums import EfficiencyFormula, Mode
from qtransduce.errors import InvalidArgument
from qtransduce.quantum import ModeSpace, OperatorMatrix, annihilation, embed, number


__all__: Final[tuple[str, ...]] = (
    "TransducerParams",
    "CooperativityPair",
    "cavity_rate",
    "cooperativity",
    "cooperativities",
    "conversion_efficiency",
    "build_full_hamiltonian",
    "build_beam_splitter_hamiltonian",
    "total_number_operator",
)


Pair = tuple[float, float]


def _pair(name: str, value: Any) -> Pair:
    try:
        first, second = value
    except (TypeError, ValueError):
        raise InvalidArgument(f"{name} must be a pair of numbers, got {value!r}")
    return float(first), float(second)


@dataclass(frozen=True, slots=True)
class TransducerParams:
    """
    Physical parameters of the three-mode transducer in dimensionless units (mechanical damping is the
    frequency unit). Pairs are ordered (microwave, optical).
    """

    omega_m: float = 20.0
    omega_c: Pair = (20.0, 20.0)
    gamma: Pair = (0.02, 0.02)
    epsilon: Pair = (0.0, 0.0)
    omega_d: Pair = (0.0, 0.0)
    delta: Pair = (10.0, 10.0)
    delta_m: float = 1.0
    n_th: float = 2.0
    n_pump: Pair = (100.0, 100.0)
    cavity_n_th: Pair = (0.0, 0.0)

    def __post_init__(self) -> None:
        for name in ("omega_c", "gamma", "epsilon", "omega_d", "delta", "n_pump", "cavity_n_th"):
            object.__setattr__(self, name, _pair(name, getattr(self, name)))
        for name in ("omega_m", "delta_m", "n_th"):
            object.__setattr__(self, name, float(getattr(self, name)))

        for field in dataclasses.fields(self):
            values = getattr(self, field.name)
            for value in values if isinstance(values, tuple) else (values,):
                if not math.isfinite(value):
                    raise InvalidArgument(f"{field.name} must be finite, got {value}")
        if min(self.delta) <= 0:
            raise InvalidArgument(f"delta must be strictly positive, got {self.delta}")
        if self.delta_m <= 0:
            raise InvalidArgument(f"delta_m must be strictly positive, got {self.delta_m}")
        if min(self.gamma) <= 0:
            raise InvalidArgument(f"gamma must be strictly positive, got {self.gamma}")
        if self.n_th < 0:
            raise InvalidArgument(f"n_th must be non-negative, got {self.n_th}")
        if min(self.n_pump) < 0:
            raise InvalidArgument(f"n_pump must be non-negative, got {self.n_pump}")
        if min(self.cavity_n_th) < 0:
            raise InvalidArgument(f"cavity_n_th must be non-negative, got {self.cavity_n_th}")

    @classmethod
    def default(cls) -> TransducerParams:
        return cls()

    def replace(self, **changes: Any) -> TransducerParams:
        """A copy with the given fields replaced (validated again)."""
        return dataclasses.replace(self, **changes)

    @property
    def cavity_rates(self) -> Pair:
        """Pump-enhanced couplings ``G_l = gamma_l * sqrt(n_l)``."""
        return (
            cavity_rate(self.gamma[0], self.n_pump[0]),
            cavity_rate(self.gamma[1], self.n_pump[1]),
        )

    def to_dict(self) -> dict[str, Any]:
        return {field.name: getattr(self, field.name) for field in dataclasses.fields(self)}


@dataclass(frozen=True, slots=True)
class CooperativityPair:
    c1: float
    c2: float

    def __post_init__(self) -> None:
        if self.c1 < 0 or self.c2 < 0:
            raise InvalidArgument(f"cooperativities must be non-negative, got ({self.c1}, {self.c2})")


def cavity_rate(gamma_l: float, n_l: float) -> float:
    if n_l < 0:
        raise InvalidArgument(f"mean pump photon number must be non-negative, got {n_l}")
    if gamma_l <= 0:
        raise InvalidArgument(f"coupling must be positive, got {gamma_l}")
    return gamma_l * math.sqrt(n_l)


def cooperativity(g: float, delta_l: float, delta_m: float) -> float:
    if delta_l <= 0 or delta_m <= 0:
        raise InvalidArgument(f"damping rates must be positive, got delta_l={delta_l}, delta_m={delta_m}")
    return 4.0 * g * g / (delta_l * delta_m)


def cooperativities(p: TransducerParams) -> CooperativityPair:
    g1, g2 = p.cavity_rates
    return CooperativityPair(
        c1=cooperativity(g1, p.delta[0], p.delta_m),
        c2=cooperativity(g2, p.delta[1], p.delta_m),
    )


def conversion_efficiency(
    c: CooperativityPair,
    formula: EfficiencyFormula = EfficiencyFormula.MATCHED,
) -> float:
    """
    Analytic on-resonance conversion efficiency.

    ``MATCHED`` squares the denominator and stays in [0, 1). ``PRINTED`` keeps the unsquared
    denominator; it exceeds 1 near C1 = C2 = 1 and is never used as a reward.
    """
    if c.c1 < 0 or c.c2 < 0:
        raise InvalidArgument("cooperativities must be non-negative")
    denominator = 1.0 + c.c1 + c.c2
    if formula == EfficiencyFormula.PRINTED:
        return 4.0 * c.c1 * c.c2 / denominator
    return 4.0 * c.c1 * c.c2 / (denominator * denominator)


def _check_space(space: ModeSpace) -> None:
    if space.modes != len(Mode):
        raise InvalidArgument(f"transducer Hamiltonians need {len(Mode)} modes, got {space.modes}")


def _ladders(space: ModeSpace) -> tuple[list[OperatorMatrix], OperatorMatrix]:
    cavities = [embed(annihilation(space.cutoffs[mode]), mode, space) for mode in (Mode.MICROWAVE, Mode.OPTICAL)]
    mechanics = embed(annihilation(space.cutoffs[Mode.MECHANICAL]), Mode.MECHANICAL, space)
    return cavities, mechanics


@functools.lru_cache(maxsize=16)
def _full_hamiltonian_parts(p: TransducerParams, space: ModeSpace) -> tuple[np.ndarray, tuple[np.ndarray, ...]]:
    cavities, b = _ladders(space)
    n_m = embed(number(space.cutoffs[Mode.MECHANICAL]), Mode.MECHANICAL, space)
    position = (b + b.dagger()).entries

    static = p.omega_m * n_m.entries.copy()
    for l, a in enumerate(cavities):
        n_l = a.dagger().entries @ a.entries
        static += p.omega_c[l] * n_l
        static += p.gamma[l] * (position @ n_l)
    static.flags.writeable = False
    return static, tuple(a.entries for a in cavities)


def build_full_hamiltonian(p: TransducerParams, space: ModeSpace, t: float) -> OperatorMatrix:
    """Driven three-mode Hamiltonian with radiation-pressure coupling, evaluated at time ``t``."""
    _check_space(space)
    static, cavities = _full_hamiltonian_parts(p, space)
    h = static.copy()
    for l, a in enumerate(cavities):
        phase = np.exp(-1j * p.omega_d[l] * t)
        h += 1j * p.epsilon[l] * (phase * a.conj().T - np.conj(phase) * a)
    # position and n_l commute, so the coupling term is Hermitian up to rounding only
    return OperatorMatrix(0.5 * (h + h.conj().T))


def build_beam_splitter_hamiltonian(p: TransducerParams, space: ModeSpace) -> OperatorMatrix:
    """Linearised exchange Hamiltonian ``sum_l G_l (d_l b^dag + d_l^dag b)`` in the fluctuation frame."""
    _check_space(space)
    cavities, b = _ladders(space)
    h = np.zeros((space.total_dim, space.total_dim), dtype=np.complex128)
    for g, d in zip(p.cavity_rates, cavities):
        h += g * (d.entries @ b.dagger().entries + d.dagger().entries @ b.entries)
    return OperatorMatrix(h)


def total_number_operator(space: ModeSpace) -> OperatorMatrix:
    total = np.zeros((space.total_dim, space.total_dim), dtype=np.complex128)
    for slot, cutoff in enumerate(space.cutoffs):
        total += embed(number(cutoff), slot, space).entries
    return OperatorMatrix(total)
