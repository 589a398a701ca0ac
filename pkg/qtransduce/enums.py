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

from enum import IntEnum, StrEnum
from typing import Final


__all__: Final[tuple[str, ...]] = (
    "Mode",
    "Port",
    "EfficiencyFormula",
    "HamiltonianFrame",
    "RewardMode",
    "EfficiencyOracle",
    "DriftTarget",
    "Algorithm",
    "CriticMode",
)


class Mode(IntEnum):
    """Fixed ordering of the three bosonic modes. Every multi-mode operator uses this slot order."""

    MICROWAVE = 0
    OPTICAL = 1
    MECHANICAL = 2


class Port(IntEnum):
    """Scattering channels. The mechanical bath is the third port so the scattering matrix stays square."""

    MICROWAVE = 0
    OPTICAL = 1
    MECHANICAL_BATH = 2


class EfficiencyFormula(StrEnum):
    """Denominator convention for the analytic conversion efficiency."""

    MATCHED = "matched"  # 4 C1 C2 / (1 + C1 + C2)^2
    PRINTED = "printed"  # 4 C1 C2 / (1 + C1 + C2), can exceed 1


class HamiltonianFrame(StrEnum):
    """Which Hamiltonian a Liouvillian is built from."""

    BEAM_SPLITTER = "beam_splitter"
    FULL = "full"


class RewardMode(StrEnum):
    """Reward shaping used by the environment."""

    IMPROVEMENT = "improvement"
    INDICATOR = "indicator"


class EfficiencyOracle(StrEnum):
    """How the environment evaluates the true efficiency after each step."""

    SCATTERING = "scattering"
    LINDBLAD = "lindblad"


class DriftTarget(StrEnum):
    """Device parameters that may drift during an adaptation run."""

    DELTA_M = "delta_m"
    N_TH = "n_th"
    GAMMA_1 = "gamma_1"
    GAMMA_2 = "gamma_2"


class Algorithm(StrEnum):
    """Learning rule applied by the trainer."""

    QAC = "qac"
    ADVANTAGE = "advantage"


class CriticMode(StrEnum):
    """Whether the critic estimates Q(s, a) or V(s)."""

    Q = "q"
    V = "v"
