import math

import numpy as np
import pytest

from qtransduce.enums import HamiltonianFrame, Mode
from qtransduce.errors import DegenerateSteadyState, InvalidArgument
from qtransduce.lindblad import (
    CollapseChannel,
    Liouvillian,
    apply_liouvillian,
    default_time_step,
    evolve,
    steady_state,
    superoperator,
    transducer_liouvillian,
)
from qtransduce.model import TransducerParams
from qtransduce.quantum import (
    DensityMatrix,
    ModeSpace,
    OperatorMatrix,
    annihilation,
    embed,
    expectation,
    fock_state,
    number,
    thermal_state,
)


def damped_cavity(cutoff: int, delta: float, n_th: float = 0.0) -> Liouvillian:
    a = annihilation(cutoff)
    channels = [CollapseChannel(op=a, rate=delta * (n_th + 1.0))]
    if n_th > 0:
        channels.append(CollapseChannel(op=a.dagger(), rate=delta * n_th))
    return Liouvillian(
        hamiltonian=OperatorMatrix(np.zeros((cutoff, cutoff))),
        channels=tuple(channels),
        space=ModeSpace(cutoffs=(cutoff,)),
    )


def random_state(space: ModeSpace, rng: np.random.Generator) -> DensityMatrix:
    dim = space.total_dim
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return DensityMatrix(space, rho / np.trace(rho))


def random_params(rng: np.random.Generator) -> TransducerParams:
    return TransducerParams(
        gamma=tuple(rng.uniform(0.02, 0.1, size=2)),
        delta=tuple(rng.uniform(0.5, 2.0, size=2)),
        delta_m=rng.uniform(0.5, 2.0),
        n_th=rng.uniform(0.0, 1.0),
        n_pump=tuple(rng.uniform(1.0, 100.0, size=2)),
    )


def test_damped_cavity_decays_exponentially():
    delta = 1.5
    l = damped_cavity(5, delta)
    rho = fock_state(l.space, (3,))
    n_op = number(5)
    t = 0.0
    for _ in range(10):
        rho = evolve(l, rho, 0.5 / delta, t0=t)
        t += 0.5 / delta
        ratio = expectation(rho, n_op).real / 3.0
        assert ratio == pytest.approx(math.exp(-delta * t), rel=1e-6)


def test_thermal_steady_state_has_bath_occupation():
    rho = steady_state(damped_cavity(80, 1.0, n_th=2.0))
    assert expectation(rho, number(80)).real == pytest.approx(2.0, abs=1e-8)


def test_evolution_converges_to_steady_state():
    delta = 1.0
    l = damped_cavity(30, delta, n_th=2.0)
    target = expectation(steady_state(l), number(30)).real
    rho = evolve(l, fock_state(l.space, (0,)), 20.0 / delta)
    assert expectation(rho, number(30)).real == pytest.approx(target, abs=1e-5)


@pytest.mark.parametrize("cutoff", [6, 40, 110])
def test_steady_state_of_truncated_thermal_dissipator_is_the_truncated_thermal_state(cutoff):
    rho = steady_state(damped_cavity(cutoff, 0.7, n_th=1.3))
    expected = thermal_state(ModeSpace(cutoffs=(cutoff,)), (1.3,))
    np.testing.assert_allclose(rho.entries, expected.entries, atol=1e-8)


def test_steady_state_is_a_fixed_point_of_evolution():
    p = TransducerParams(n_th=0.5, n_pump=(400.0, 900.0))
    l = transducer_liouvillian(p, ModeSpace(cutoffs=(2, 2, 4)))
    rho = steady_state(l)
    later = evolve(l, rho, 10.0 / max(p.delta))
    np.testing.assert_allclose(later.entries, rho.entries, atol=1e-7)


def test_cold_beam_splitter_relaxes_to_vacuum():
    p = TransducerParams(n_th=0.0, n_pump=(2000.0, 2000.0))
    space = ModeSpace(cutoffs=(3, 3, 3))
    rho = steady_state(transducer_liouvillian(p, space))
    np.testing.assert_allclose(rho.entries, fock_state(space, (0, 0, 0)).entries, atol=1e-10)


@pytest.mark.parametrize("draw", range(20))
def test_liouvillian_structure(draw):
    rng = np.random.default_rng(draw)
    p = random_params(rng)
    space = ModeSpace(cutoffs=(2, 2, 3))
    l = transducer_liouvillian(p, space)
    rho = random_state(space, rng)

    derivative = apply_liouvillian(l, rho)
    assert abs(np.trace(derivative)) < 1e-12
    assert np.max(np.abs(derivative - derivative.conj().T)) < 1e-12

    evolved = evolve(l, rho, 1.0)
    assert np.min(evolved.eigenvalues()) > -1e-7

    once = evolve(l, rho, 0.6)
    twice = evolve(l, evolve(l, rho, 0.3), 0.3, t0=0.3)
    assert np.max(np.abs(once.entries - twice.entries)) < 1e-6


def test_superoperator_matches_matrix_free_action():
    rng = np.random.default_rng(11)
    space = ModeSpace(cutoffs=(2, 2, 2))
    l = transducer_liouvillian(random_params(rng), space)
    rho = random_state(space, rng)
    dense = superoperator(l) @ rho.entries.ravel()
    sparse = superoperator(l, sparse=True) @ rho.entries.ravel()
    expected = apply_liouvillian(l, rho).ravel()
    np.testing.assert_allclose(dense, expected, atol=1e-12)
    np.testing.assert_allclose(sparse, expected, atol=1e-12)


def test_dense_and_sparse_steady_states_agree():
    p = TransducerParams(n_th=0.5)
    l = transducer_liouvillian(p, ModeSpace(cutoffs=(2, 2, 4)))
    dense = steady_state(l, sparse=False)
    sparse = steady_state(l, sparse=True)
    np.testing.assert_allclose(dense.entries, sparse.entries, atol=1e-10)


def test_undamped_system_has_no_unique_steady_state():
    l = Liouvillian(hamiltonian=number(3))
    with pytest.raises(DegenerateSteadyState):
        steady_state(l)


def test_weakly_driven_occupations_converge_in_cutoff():
    p = TransducerParams(n_th=0.0, n_pump=(2000.0, 2000.0))
    alpha = 0.02 * math.sqrt(p.delta[0])
    occupations = []
    for cutoff in (4, 6):
        space = ModeSpace.default(cutoff)
        a1 = embed(annihilation(cutoff), Mode.MICROWAVE, space)
        drive = OperatorMatrix(1j * math.sqrt(p.delta[0]) * alpha * (a1.entries - a1.dagger().entries))
        rho = steady_state(transducer_liouvillian(p, space, extra=drive))
        occupations.append([expectation(rho, embed(number(cutoff), mode, space)).real for mode in Mode])
    np.testing.assert_allclose(occupations[0], occupations[1], atol=1e-4)


def test_mechanical_occupation_matches_bath_without_pumps():
    p = TransducerParams(n_pump=(0.0, 0.0), n_th=0.4)
    space = ModeSpace(cutoffs=(2, 2, 12))
    rho = steady_state(transducer_liouvillian(p, space))
    n_b = expectation(rho, embed(number(12), Mode.MECHANICAL, space)).real
    assert n_b == pytest.approx(0.4, abs=1e-5)


def test_full_frame_is_time_dependent():
    p = TransducerParams(epsilon=(0.1, 0.0), omega_d=(20.0, 0.0))
    l = transducer_liouvillian(p, ModeSpace.default(2), frame=HamiltonianFrame.FULL)
    assert l.time_dependent
    assert not np.allclose(l.hamiltonian_at(0.0), l.hamiltonian_at(0.1))
    with pytest.raises(InvalidArgument):
        superoperator(l)
    rho = evolve(l, fock_state(ModeSpace.default(2), (0, 0, 0)), 0.05)
    assert np.trace(rho.entries).real == pytest.approx(1.0, abs=1e-9)


def test_evolve_arguments():
    l = damped_cavity(3, 1.0)
    rho = fock_state(l.space, (1,))
    assert evolve(l, rho, 0.0) is rho
    with pytest.raises(InvalidArgument):
        evolve(l, rho, -1.0)
    with pytest.raises(InvalidArgument):
        evolve(l, rho, 1.0, dt=0.0)
    with pytest.raises(InvalidArgument):
        evolve(l, fock_state(ModeSpace(cutoffs=(4,)), (1,)), 1.0)


def test_default_time_step_tracks_fastest_rate(params):
    assert default_time_step(params) == pytest.approx(0.005 / 10.0)
