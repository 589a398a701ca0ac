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
from typing import Callable, Final

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from qtransduce.enums import HamiltonianFrame, Mode
from qtransduce.errors import DegenerateSteadyState, InvalidArgument, NumericalInstability
from qtransduce.model import TransducerParams, build_beam_splitter_hamiltonian, build_full_hamiltonian
from qtransduce.quantum import DensityMatrix, ModeSpace, OperatorMatrix, annihilation, embed


__all__: Final[tuple[str, ...]] = (
    "CollapseChannel",
    "Liouvillian",
    "apply_liouvillian",
    "evolve",
    "steady_state",
    "superoperator",
    "transducer_liouvillian",
    "default_time_step",
)


logger: Final[logging.Logger] = logging.getLogger("qtransduce")

DENSE_MAX_DIM: Final[int] = 100
SPARSE_ABOVE_DIM: Final[int] = 32
TRACE_DRIFT_LIMIT: Final[float] = 1e-6
FINAL_TRACE_TOLERANCE: Final[float] = 1e-7
FINAL_HERMITIAN_TOLERANCE: Final[float] = 1e-8
PIVOT_TOLERANCE: Final[float] = 1e-12
ILU_DROP_TOLERANCE: Final[float] = 1e-4
ILU_FILL_FACTOR: Final[float] = 10.0
GMRES_TOLERANCE: Final[float] = 1e-10
GMRES_RESTART: Final[int] = 60
GMRES_MAX_ITER: Final[int] = 200
STEP_FRACTION: Final[float] = 0.005

HamiltonianFn = Callable[[float], OperatorMatrix]


@dataclass(frozen=True, slots=True)
class CollapseChannel:
    """Jump operator ``op`` acting at ``rate``; contributes ``rate * D[op]``."""

    op: OperatorMatrix
    rate: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.rate) or self.rate < 0:
            raise InvalidArgument(f"collapse rate must be finite and non-negative, got {self.rate}")


@dataclass(frozen=True, slots=True, eq=False)
class Liouvillian:
    """
    Generator of Markovian dynamics. ``hamiltonian`` is the static part; ``drive`` optionally
    returns the full Hamiltonian at time ``t`` and then replaces the static one.
    """

    hamiltonian: OperatorMatrix
    channels: tuple[CollapseChannel, ...] = ()
    drive: HamiltonianFn | None = None
    characteristic_rate: float | None = None
    space: ModeSpace | None = None
    _decay: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "channels", tuple(self.channels))
        dim = self.hamiltonian.dim
        decay = np.zeros((dim, dim), dtype=np.complex128)
        for channel in self.channels:
            if channel.op.dim != dim:
                raise InvalidArgument(f"collapse operator dim {channel.op.dim} does not match system dim {dim}")
            decay += channel.rate * (channel.op.dagger().entries @ channel.op.entries)
        decay.flags.writeable = False
        object.__setattr__(self, "_decay", decay)

    @property
    def dim(self) -> int:
        return self.hamiltonian.dim

    @property
    def time_dependent(self) -> bool:
        return self.drive is not None

    def hamiltonian_at(self, t: float) -> np.ndarray:
        if self.drive is None:
            return self.hamiltonian.entries
        h = self.drive(t)
        if h.dim != self.dim:
            raise InvalidArgument(f"drive returned dim {h.dim}, expected {self.dim}")
        return h.entries

    def effective_hamiltonian(self, t: float = 0.0) -> np.ndarray:
        """Non-Hermitian ``H - i/2 sum_k rate_k c_k^dag c_k``."""
        return self.hamiltonian_at(t) - 0.5j * self._decay

    def rate_scale(self) -> float:
        if self.characteristic_rate is not None:
            return self.characteristic_rate
        rates = [channel.rate for channel in self.channels]
        rates.append(float(np.max(np.abs(self.hamiltonian.entries), initial=0.0)))
        return max(max(rates), 1e-12)


def _rhs(l: Liouvillian, rho: np.ndarray, t: float) -> np.ndarray:
    h_eff = l.effective_hamiltonian(t)
    out = -1j * (h_eff @ rho - rho @ h_eff.conj().T)
    for channel in l.channels:
        if channel.rate == 0.0:
            continue
        c = channel.op.entries
        out += channel.rate * (c @ rho @ c.conj().T)
    return out


def apply_liouvillian(l: Liouvillian, rho: DensityMatrix | np.ndarray, t: float = 0.0) -> np.ndarray:
    """``d rho / dt`` for the given state, evaluated matrix-free."""
    array = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=np.complex128)
    if array.shape != (l.dim, l.dim):
        raise InvalidArgument(f"state shape {array.shape} does not match Liouvillian dim {l.dim}")
    return _rhs(l, array, t)


def default_time_step(p: TransducerParams) -> float:
    return STEP_FRACTION / max(*p.delta, p.delta_m, *p.cavity_rates)


def evolve(
    l: Liouvillian,
    rho0: DensityMatrix,
    t_final: float,
    dt: float | None = None,
    *,
    t0: float = 0.0,
) -> DensityMatrix:
    """
    Fixed-step classical Runge-Kutta integration of the master equation.

    The step is shrunk so that an integer number of steps lands exactly on ``t_final``. Trace drift
    beyond 1e-6 at any step aborts with :class:`NumericalInstability`.
    """
    if dt is None:
        dt = STEP_FRACTION / l.rate_scale()
    if not dt > 0:
        raise InvalidArgument(f"time step must be positive, got {dt}")
    if t_final < 0:
        raise InvalidArgument(f"t_final must be non-negative, got {t_final}")
    if rho0.dim != l.dim:
        raise InvalidArgument(f"state dim {rho0.dim} does not match Liouvillian dim {l.dim}")
    if t_final == 0:
        return rho0

    steps = max(1, math.ceil(t_final / dt - 1e-9))
    h = t_final / steps
    rho = rho0.entries.copy()
    t = t0
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(f"evolve: {steps} RK4 steps of {h:.3e} on dim {l.dim}")
    for step in range(1, steps + 1):
        k1 = _rhs(l, rho, t)
        k2 = _rhs(l, rho + 0.5 * h * k1, t + 0.5 * h)
        k3 = _rhs(l, rho + 0.5 * h * k2, t + 0.5 * h)
        k4 = _rhs(l, rho + h * k3, t + h)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = t0 + step * h
        drift = abs(np.trace(rho) - 1.0)
        if not np.isfinite(drift) or drift > TRACE_DRIFT_LIMIT:
            raise NumericalInstability(f"trace drifted by {drift:.3e} after step {step} of {steps} (dt={h:.3e})")

    asymmetry = float(np.max(np.abs(rho - rho.conj().T)))
    drift = abs(np.trace(rho) - 1.0)
    if asymmetry > FINAL_HERMITIAN_TOLERANCE or drift > FINAL_TRACE_TOLERANCE:
        raise NumericalInstability(
            f"evolved state lost structure after {steps} steps: hermiticity {asymmetry:.3e}, trace drift {drift:.3e}"
        )
    return DensityMatrix(rho0.space, rho, validate=False)


def superoperator(l: Liouvillian, *, sparse: bool = False) -> np.ndarray | scipy.sparse.csc_matrix:
    """
    Matrix of the (static) Liouvillian acting on row-major ``vec(rho)``, using
    ``vec(A rho B) = (A kron B^T) vec(rho)``.
    """
    if l.time_dependent:
        raise InvalidArgument("a time-dependent Liouvillian has no single superoperator")
    dim = l.dim
    h_eff = l.effective_hamiltonian()
    if sparse:
        eye = scipy.sparse.identity(dim, dtype=np.complex128, format="csr")
        h_sp = scipy.sparse.csr_matrix(h_eff)
        total = -1j * scipy.sparse.kron(h_sp, eye) + 1j * scipy.sparse.kron(eye, h_sp.conj())
        for channel in l.channels:
            if channel.rate == 0.0:
                continue
            c = scipy.sparse.csr_matrix(channel.op.entries)
            total = total + channel.rate * scipy.sparse.kron(c, c.conj())
        return scipy.sparse.csc_matrix(total)

    if dim > DENSE_MAX_DIM:
        raise InvalidArgument(f"dense superoperator limited to dim <= {DENSE_MAX_DIM}, got {dim}")
    eye = np.eye(dim, dtype=np.complex128)
    total = -1j * np.kron(h_eff, eye) + 1j * np.kron(eye, h_eff.conj())
    for channel in l.channels:
        if channel.rate == 0.0:
            continue
        c = channel.op.entries
        total += channel.rate * np.kron(c, c.conj())
    return total


def _check_pivots(diagonal: np.ndarray) -> None:
    magnitudes = np.abs(diagonal)
    largest = float(np.max(magnitudes))
    smallest = float(np.min(magnitudes))
    if largest == 0.0 or smallest < PIVOT_TOLERANCE * largest:
        raise DegenerateSteadyState(
            f"Liouvillian is degenerate (pivot ratio {smallest / largest if largest else 0.0:.3e}); "
            "every mode needs damping for a unique steady state"
        )


def _solve_iterative(l: Liouvillian) -> np.ndarray:
    """
    GMRES on ``L + w |0><trace|`` with an incomplete-LU preconditioner. The superoperator is only
    ever held in sparse form.
    """
    dim = l.dim
    matrix = superoperator(l, sparse=True)
    weight = float(np.mean(np.abs(matrix.data)))
    trace_cols = np.arange(dim) * (dim + 1)
    bordered = scipy.sparse.csc_matrix(
        (np.full(dim, weight, dtype=np.complex128), (np.zeros(dim, dtype=np.int64), trace_cols)),
        shape=matrix.shape,
    )
    system = (matrix + bordered).tocsc()
    rhs = np.zeros(dim * dim, dtype=np.complex128)
    rhs[0] = weight
    # start from the projector on the joint ground state
    guess = np.zeros(dim * dim, dtype=np.complex128)
    guess[0] = 1.0

    try:
        ilu = scipy.sparse.linalg.spilu(
            system,
            drop_tol=ILU_DROP_TOLERANCE,
            fill_factor=ILU_FILL_FACTOR,
            diag_pivot_thresh=0.1,
            permc_spec="COLAMD",
        )
    except RuntimeError as e:
        raise DegenerateSteadyState(f"steady-state system is singular: {e}") from e
    preconditioner = scipy.sparse.linalg.LinearOperator(system.shape, matvec=ilu.solve, dtype=np.complex128)

    iterations = 0

    def count(_: np.ndarray) -> None:
        nonlocal iterations
        iterations += 1

    vector, info = scipy.sparse.linalg.gmres(
        system,
        rhs,
        x0=guess,
        rtol=GMRES_TOLERANCE,
        atol=0.0,
        restart=GMRES_RESTART,
        maxiter=GMRES_MAX_ITER,
        M=preconditioner,
        callback=count,
        callback_type="pr_norm",
    )
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(f"steady_state: GMRES on dim {dim} took {iterations} iterations (info={info})")
    if info != 0:
        raise NumericalInstability(f"GMRES did not converge on the steady-state system (info={info})")
    return vector


def steady_state(l: Liouvillian, *, sparse: bool | None = None) -> DensityMatrix:
    """
    Solve ``L rho = 0`` with the first equation replaced by ``Tr rho = 1``.

    Dense LU for small systems and sparse LU above :data:`SPARSE_ABOVE_DIM`. Past
    :data:`DENSE_MAX_DIM` the factorization fills in too much, so the system is solved with
    preconditioned GMRES instead. A Liouvillian without a mode space yields a state on a single
    mode of the same dimension.
    """
    if l.time_dependent:
        raise InvalidArgument("a time-dependent Liouvillian has no steady state")
    dim = l.dim
    if sparse is None:
        sparse = dim > SPARSE_ABOVE_DIM
    trace_row = np.zeros(dim * dim, dtype=np.complex128)
    trace_row[:: dim + 1] = 1.0
    rhs = np.zeros(dim * dim, dtype=np.complex128)
    rhs[0] = 1.0

    if dim > DENSE_MAX_DIM:
        vector = _solve_iterative(l)
    elif sparse:
        matrix = superoperator(l, sparse=True).tocsr()
        system = scipy.sparse.vstack([scipy.sparse.csr_matrix(trace_row), matrix[1:]]).tocsc()
        try:
            lu = scipy.sparse.linalg.splu(system)
        except RuntimeError as e:
            raise DegenerateSteadyState(f"steady-state system is singular: {e}") from e
        _check_pivots(lu.U.diagonal())
        vector = lu.solve(rhs)
    else:
        matrix = superoperator(l)
        matrix[0, :] = trace_row
        lu, piv = scipy.linalg.lu_factor(matrix, check_finite=True)
        _check_pivots(np.diag(lu))
        vector = scipy.linalg.lu_solve((lu, piv), rhs)

    rho = vector.reshape(dim, dim)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho)
    residual = float(np.max(np.abs(_rhs(l, rho, 0.0))))
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug(f"steady_state: dim {dim}, sparse={sparse}, residual {residual:.3e}")
    if not np.isfinite(residual) or residual > 1e-6 * max(1.0, l.rate_scale()):
        raise NumericalInstability(f"steady-state residual {residual:.3e} is too large")
    space = l.space if l.space is not None else ModeSpace(cutoffs=(dim,))
    return DensityMatrix(space, rho, validate=False)


def transducer_liouvillian(
    p: TransducerParams,
    space: ModeSpace,
    *,
    frame: HamiltonianFrame = HamiltonianFrame.BEAM_SPLITTER,
    extra: OperatorMatrix | None = None,
) -> Liouvillian:
    """
    Device Liouvillian: Hamiltonian of the requested frame plus the damping channels of the three
    components. Cavities see baths at ``p.cavity_n_th`` (zero by default), the mechanics at ``p.n_th``.
    """
    channels: list[CollapseChannel] = []
    rates = ((Mode.MICROWAVE, p.delta[0], p.cavity_n_th[0]), (Mode.OPTICAL, p.delta[1], p.cavity_n_th[1]))
    for mode, rate, occupation in (*rates, (Mode.MECHANICAL, p.delta_m, p.n_th)):
        lower = embed(annihilation(space.cutoffs[mode]), mode, space)
        channels.append(CollapseChannel(op=lower, rate=rate * (occupation + 1.0)))
        if occupation > 0:
            channels.append(CollapseChannel(op=lower.dagger(), rate=rate * occupation))

    scale = max(*p.delta, p.delta_m, *p.cavity_rates)
    if frame == HamiltonianFrame.FULL:
        scale = max(scale, abs(p.omega_m), *map(abs, p.omega_c), *map(abs, p.omega_d), *map(abs, p.epsilon))
        static = build_full_hamiltonian(p, space, 0.0)

        def drive(t: float) -> OperatorMatrix:
            h = build_full_hamiltonian(p, space, t)
            return h if extra is None else h + extra

        return Liouvillian(
            hamiltonian=static,
            channels=tuple(channels),
            drive=drive,
            characteristic_rate=scale,
            space=space,
        )

    h = build_beam_splitter_hamiltonian(p, space)
    if extra is not None:
        h = h + extra
    return Liouvillian(hamiltonian=h, channels=tuple(channels), characteristic_rate=scale, space=space)

