import numpy as np
import pytest

from qtransduce.enums import Mode
from qtransduce.errors import InvalidArgument
from qtransduce.quantum import (
    DensityMatrix,
    ModeSpace,
    OperatorMatrix,
    annihilation,
    creation,
    embed,
    expectation,
    fock_state,
    identity,
    maximally_mixed,
    number,
    thermal_state,
)


def test_annihilation_lowers_fock_states():
    a = annihilation(5).entries
    for n in range(1, 5):
        ket = np.zeros(5)
        ket[n] = 1.0
        lowered = a @ ket
        assert lowered[n - 1] == pytest.approx(np.sqrt(n))
        assert np.count_nonzero(lowered) == 1


def test_number_operator_is_a_dagger_a():
    a = annihilation(6)
    np.testing.assert_allclose((creation(6) @ a).entries, number(6).entries, atol=1e-14)


def test_commutator_is_identity_except_last_level():
    a = annihilation(5)
    commutator = a.commutator(creation(5)).entries
    expected = np.eye(5)
    expected[-1, -1] = -4.0
    np.testing.assert_allclose(commutator, expected, atol=1e-12)


def test_cutoff_below_two_is_rejected():
    with pytest.raises(InvalidArgument):
        annihilation(1)
    with pytest.raises(InvalidArgument):
        ModeSpace(cutoffs=(4, 1))


def test_default_space_has_three_modes():
    space = ModeSpace.default()
    assert space.modes == 3
    assert space.total_dim == 64


def test_embed_acts_on_the_requested_mode_only():
    space = ModeSpace(cutoffs=(3, 4, 2))
    rho = fock_state(space, (2, 1, 1))
    for mode, expected in zip(Mode, (2, 1, 1)):
        op = embed(number(space.cutoffs[mode]), mode, space)
        assert expectation(rho, op) == pytest.approx(expected)


def test_embed_rejects_mismatched_dimensions():
    space = ModeSpace(cutoffs=(3, 3, 3))
    with pytest.raises(InvalidArgument):
        embed(number(4), Mode.OPTICAL, space)
    with pytest.raises(InvalidArgument):
        embed(number(3), 3, space)


def test_embed_preserves_spectrum():
    space = ModeSpace(cutoffs=(2, 3, 4))
    x = annihilation(3) + creation(3)
    local = np.linalg.eigvalsh(x.entries)
    embedded = np.linalg.eigvalsh(embed(x, Mode.OPTICAL, space).entries)
    np.testing.assert_allclose(embedded, np.sort(np.repeat(local, 8)), atol=1e-12)


def test_expectation_is_linear():
    rng = np.random.default_rng(3)
    space = ModeSpace(cutoffs=(3, 2))
    raw = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    rho = DensityMatrix(space, raw @ raw.conj().T / np.trace(raw @ raw.conj().T))
    first = embed(number(3), 0, space)
    second = embed(annihilation(2), 1, space)
    combined = first * (0.5 - 2j) + second * 3.0
    expected = (0.5 - 2j) * expectation(rho, first) + 3.0 * expectation(rho, second)
    assert expectation(rho, combined) == pytest.approx(expected, abs=1e-12)


def test_expectation_of_identity_is_trace():
    space = ModeSpace(cutoffs=(3, 3))
    rho = maximally_mixed(space)
    assert expectation(rho, identity(9)) == pytest.approx(1.0)


def test_expectation_dimension_mismatch():
    rho = maximally_mixed(ModeSpace(cutoffs=(3,)))
    with pytest.raises(InvalidArgument):
        expectation(rho, identity(4))


def test_thermal_state_mean_occupation_approaches_n():
    space = ModeSpace(cutoffs=(80,))
    rho = thermal_state(space, (2.0,))
    assert expectation(rho, number(80)).real == pytest.approx(2.0, abs=1e-8)


def test_density_matrix_validation():
    space = ModeSpace(cutoffs=(2,))
    with pytest.raises(InvalidArgument):
        DensityMatrix(space, np.diag([0.7, 0.7]))
    with pytest.raises(InvalidArgument):
        DensityMatrix(space, np.diag([1.2, -0.2]))
    with pytest.raises(InvalidArgument):
        DensityMatrix(space, np.array([[0.5, 0.3], [0.0, 0.5]]))
    state = DensityMatrix(space, np.diag([0.25, 0.75]))
    np.testing.assert_allclose(state.eigenvalues(), [0.25, 0.75])


def test_operator_arithmetic():
    a = annihilation(3)
    x = a + a.dagger()
    assert x.is_hermitian()
    assert not a.is_hermitian()
    np.testing.assert_allclose((2 * x - x).entries, x.entries)
    np.testing.assert_allclose((-x).entries, -x.entries)
    with pytest.raises(InvalidArgument):
        a @ annihilation(4)
    with pytest.raises(InvalidArgument):
        OperatorMatrix(np.zeros((2, 3)))


def test_operator_entries_are_read_only():
    with pytest.raises(ValueError):
        number(3).entries[0, 0] = 5.0
