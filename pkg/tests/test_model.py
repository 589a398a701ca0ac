import math

import numpy as np
import pytest

from qtransduce.enums import EfficiencyFormula
from qtransduce.errors import InvalidArgument
from qtransduce.model import (
    CooperativityPair,
    TransducerParams,
    build_beam_splitter_hamiltonian,
    build_full_hamiltonian,
    cavity_rate,
    conversion_efficiency,
    cooperativities,
    cooperativity,
    total_number_operator,
)
from qtransduce.quantum import ModeSpace


def test_cavity_rate_and_cooperativity():
    assert cavity_rate(0.02, 100.0) == pytest.approx(0.2)
    assert cavity_rate(0.5, 0.0) == 0.0
    assert cooperativity(0.2, 10.0, 1.0) == pytest.approx(0.016)
    with pytest.raises(InvalidArgument):
        cavity_rate(0.1, -1.0)
    with pytest.raises(InvalidArgument):
        cavity_rate(0.0, 4.0)
    with pytest.raises(InvalidArgument):
        cooperativity(0.1, 0.0, 1.0)


def test_cooperativities_of_defaults(params):
    pair = cooperativities(params)
    assert pair.c1 == pytest.approx(0.016)
    assert pair.c2 == pytest.approx(0.016)


def test_efficiency_is_one_at_matched_unit_cooperativity_in_the_limit():
    assert conversion_efficiency(CooperativityPair(1.0, 1.0)) == pytest.approx(4.0 / 9.0)
    big = conversion_efficiency(CooperativityPair(1e6, 1e6))
    assert big == pytest.approx(1.0, abs=1e-5)
    assert conversion_efficiency(CooperativityPair(0.0, 5.0)) == 0.0


def test_printed_formula_differs():
    pair = CooperativityPair(1.0, 1.0)
    assert conversion_efficiency(pair, EfficiencyFormula.PRINTED) == pytest.approx(4.0 / 3.0)


def test_matched_efficiency_is_bounded():
    rng = np.random.default_rng(3)
    for c1, c2 in rng.uniform(0, 50, size=(200, 2)):
        assert 0.0 <= conversion_efficiency(CooperativityPair(c1, c2)) < 1.0


def test_params_validation(params):
    with pytest.raises(InvalidArgument, match="delta_m"):
        params.replace(delta_m=-1.0)
    with pytest.raises(InvalidArgument, match="n_th"):
        params.replace(n_th=-0.5)
    with pytest.raises(InvalidArgument):
        params.replace(delta=(1.0, 0.0))
    with pytest.raises(InvalidArgument):
        params.replace(omega_m=math.inf)
    with pytest.raises(InvalidArgument):
        TransducerParams(gamma=(0.1,))
    with pytest.raises(InvalidArgument, match="gamma"):
        params.replace(gamma=(0.0, 0.02))


def test_params_are_hashable_and_comparable(params):
    assert params == TransducerParams.default()
    assert hash(params) == hash(TransducerParams())
    assert params.replace(n_th=3.0) != params


def test_beam_splitter_hamiltonian_conserves_excitations(params):
    space = ModeSpace.default(3)
    h = build_beam_splitter_hamiltonian(params, space)
    assert h.is_hermitian()
    n_total = total_number_operator(space)
    assert np.max(np.abs(h.commutator(n_total).entries)) < 1e-12


def test_full_hamiltonian_is_hermitian_at_all_times():
    p = TransducerParams(epsilon=(0.3, 0.1), omega_d=(19.0, 21.0))
    space = ModeSpace.default(3)
    for t in (0.0, 0.37, 5.2):
        assert build_full_hamiltonian(p, space, t).is_hermitian(1e-12)


def test_hamiltonians_need_three_modes(params):
    with pytest.raises(InvalidArgument):
        build_beam_splitter_hamiltonian(params, ModeSpace(cutoffs=(3, 3)))
