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

from dataclasses import dataclass
from functools import reduce
from typing import Final, Sequence

import numpy as np
import scipy.linalg

from qtransduce.enums import Mode
from qtransduce.errors import InvalidArgument


__all__: Final[tuple[str, ...]] = (
    "ModeSpace",
    "OperatorMatrix",
    "DensityMatrix",
    "annihilation",
    "creation",
    "number",
    "identity",
    "embed",
    "expectation",
    "fock_state",
    "thermal_state",
    "maximally_mixed",
)


DEFAULT_CUTOFF: Final[int] = 4

HERMITIAN_TOLERANCE: Final[float] = 1e-10
TRACE_TOLERANCE: Final[float] = 1e-9
POSITIVITY_TOLERANCE: Final[float] = 1e-8


@dataclass(frozen=True, slots=True)
class ModeSpace:
    """
    Truncated Fock space of a few bosonic modes.

    Slots follow :class:`qtransduce.enums.Mode` (microwave, optical, mechanical) whenever three
    modes are present; smaller spaces are used for single-cavity checks.
    """

    cutoffs: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.cutoffs) == 0:
            raise InvalidArgument("ModeSpace needs at least one mode")
        for slot, cutoff in enumerate(self.cutoffs):
            if int(cutoff) != cutoff or cutoff < 2:
                raise InvalidArgument(f"cutoff of mode {slot} must be an integer >= 2, got {cutoff}")
        object.__setattr__(self, "cutoffs", tuple(int(c) for c in self.cutoffs))

    @classmethod
    def default(cls, cutoff: int = DEFAULT_CUTOFF) -> ModeSpace:
        """Three-mode transducer space with the same cutoff on every mode."""
        return cls(cutoffs=(cutoff,) * len(Mode))

    @property
    def total_dim(self) -> int:
        """Dimension of the product space."""
        return int(np.prod(self.cutoffs))

    @property
    def modes(self) -> int:
        """Number of modes."""
        return len(self.cutoffs)


class OperatorMatrix:
    __slots__: Final[tuple[str, ...]] = ("_entries",)

    def __init__(self, entries: np.ndarray | Sequence[Sequence[complex]]) -> None:
        array = np.array(entries, dtype=np.complex128)
        if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] < 1:
            raise InvalidArgument(f"operator must be a non-empty square matrix, got shape {array.shape}")
        array.flags.writeable = False
        self._entries: np.ndarray = array

    @property
    def dim(self) -> int:
        """Row (and column) count."""
        return self._entries.shape[0]

    @property
    def entries(self) -> np.ndarray:
        """Read-only dense complex matrix."""
        return self._entries

    def dagger(self) -> OperatorMatrix:
        return OperatorMatrix(self._entries.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self._entries))

    def is_hermitian(self, tol: float = HERMITIAN_TOLERANCE) -> bool:
        return bool(np.max(np.abs(self._entries - self._entries.conj().T), initial=0.0) <= tol)

    def commutator(self, other: OperatorMatrix) -> OperatorMatrix:
        return self @ other - other @ self

    def _check(self, other: OperatorMatrix) -> None:
        if other.dim != self.dim:
            raise InvalidArgument(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __matmul__(self, other: OperatorMatrix) -> OperatorMatrix:
        self._check(other)
        return OperatorMatrix(self._entries @ other._entries)

    def __add__(self, other: OperatorMatrix) -> OperatorMatrix:
        self._check(other)
        return OperatorMatrix(self._entries + other._entries)

    def __sub__(self, other: OperatorMatrix) -> OperatorMatrix:
        self._check(other)
        return OperatorMatrix(self._entries - other._entries)

    def __mul__(self, scalar: complex) -> OperatorMatrix:
        return OperatorMatrix(self._entries * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> OperatorMatrix:
        return OperatorMatrix(-self._entries)

    def __repr__(self) -> str:
        return f"<OperatorMatrix dim={self.dim}>"


class DensityMatrix:
    __slots__: Final[tuple[str, ...]] = (
        "_space",
        "_entries",
    )

    def __init__(self, space: ModeSpace, entries: np.ndarray, *, validate: bool = True) -> None:
        array = np.array(entries, dtype=np.complex128)
        if array.shape != (space.total_dim, space.total_dim):
            raise InvalidArgument(f"density matrix shape {array.shape} does not match space dim {space.total_dim}")
        if validate:
            _validate_state(array)
        array.flags.writeable = False
        self._space: ModeSpace = space
        self._entries: np.ndarray = array

    @property
    def space(self) -> ModeSpace:
        """The mode space the state lives on."""
        return self._space

    @property
    def entries(self) -> np.ndarray:
        """Read-only dense complex matrix."""
        return self._entries

    @property
    def dim(self) -> int:
        return self._space.total_dim

    def eigenvalues(self) -> np.ndarray:
        hermitian = 0.5 * (self._entries + self._entries.conj().T)
        return scipy.linalg.eigvalsh(hermitian)

    def __repr__(self) -> str:
        return f"<DensityMatrix cutoffs={self._space.cutoffs}>"


def _validate_state(array: np.ndarray) -> None:
    asymmetry = np.max(np.abs(array - array.conj().T))
    if asymmetry > HERMITIAN_TOLERANCE:
        raise InvalidArgument(f"density matrix is not Hermitian (max deviation {asymmetry:.3e})")
    trace = np.trace(array)
    if abs(trace - 1.0) > TRACE_TOLERANCE:
        raise InvalidArgument(f"density matrix trace is {trace.real:.12f}, expected 1")
    smallest = scipy.linalg.eigvalsh(0.5 * (array + array.conj().T))[0]
    if smallest < -POSITIVITY_TOLERANCE:
        raise InvalidArgument(f"density matrix has negative eigenvalue {smallest:.3e}")


def annihilation(cutoff: int) -> OperatorMatrix:
    """Truncated lowering operator with ``a[i, i + 1] = sqrt(i + 1)``."""
    if cutoff < 2:
        raise InvalidArgument(f"cutoff must be >= 2, got {cutoff}")
    return OperatorMatrix(np.diag(np.sqrt(np.arange(1, cutoff, dtype=np.float64)), k=1))


def creation(cutoff: int) -> OperatorMatrix:
    return annihilation(cutoff).dagger()


def number(cutoff: int) -> OperatorMatrix:
    if cutoff < 2:
        raise InvalidArgument(f"cutoff must be >= 2, got {cutoff}")
    return OperatorMatrix(np.diag(np.arange(cutoff, dtype=np.float64)))


def identity(dim: int) -> OperatorMatrix:
    if dim < 1:
        raise InvalidArgument(f"dimension must be >= 1, got {dim}")
    return OperatorMatrix(np.eye(dim))


def embed(op: OperatorMatrix, slot: int | Mode, space: ModeSpace) -> OperatorMatrix:
    """Place ``op`` in ``slot`` of ``space``, identities elsewhere."""
    slot = int(slot)
    if not 0 <= slot < space.modes:
        raise InvalidArgument(f"slot {slot} out of range for {space.modes} modes")
    if op.dim != space.cutoffs[slot]:
        raise InvalidArgument(f"operator dim {op.dim} does not match cutoff {space.cutoffs[slot]} of slot {slot}")
    factors = [op.entries if i == slot else np.eye(c) for i, c in enumerate(space.cutoffs)]
    return OperatorMatrix(reduce(np.kron, factors))


def expectation(rho: DensityMatrix, op: OperatorMatrix) -> complex:
    """``Tr(rho op)``."""
    if rho.dim != op.dim:
        raise InvalidArgument(f"dimension mismatch: state {rho.dim} vs operator {op.dim}")
    return complex(np.einsum("ij,ji->", rho.entries, op.entries))


def fock_state(space: ModeSpace, occupations: Sequence[int]) -> DensityMatrix:
    """Pure product Fock state ``|n_0, n_1, ...><n_0, n_1, ...|``."""
    if len(occupations) != space.modes:
        raise InvalidArgument(f"expected {space.modes} occupations, got {len(occupations)}")
    index = 0
    for n, cutoff in zip(occupations, space.cutoffs):
        if not 0 <= n < cutoff:
            raise InvalidArgument(f"occupation {n} outside cutoff {cutoff}")
        index = index * cutoff + n
    entries = np.zeros((space.total_dim, space.total_dim), dtype=np.complex128)
    entries[index, index] = 1.0
    return DensityMatrix(space, entries, validate=False)


def thermal_state(space: ModeSpace, occupations: Sequence[float]) -> DensityMatrix:
    """
    Product of truncated thermal states.

    Each mode gets populations proportional to ``(n / (n + 1)) ** k`` on its retained levels, which is
    the exact fixed point of the truncated thermal dissipator, so its mean occupation falls slightly
    below ``n`` when the cutoff is small.
    """
    if len(occupations) != space.modes:
        raise InvalidArgument(f"expected {space.modes} occupations, got {len(occupations)}")
    diagonals = []
    for n, cutoff in zip(occupations, space.cutoffs):
        if n < 0:
            raise InvalidArgument(f"thermal occupation must be >= 0, got {n}")
        populations = (n / (n + 1.0)) ** np.arange(cutoff, dtype=np.float64)
        diagonals.append(populations / populations.sum())
    diagonal = reduce(np.kron, diagonals)
    return DensityMatrix(space, np.diag(diagonal).astype(np.complex128), validate=False)


def maximally_mixed(space: ModeSpace) -> DensityMatrix:
    dim = space.total_dim
    return DensityMatrix(space, np.eye(dim, dtype=np.complex128) / dim, validate=False)
