import math

import numpy as np
import pytest

from qtransduce.enums import Mode, Port
from qtransduce.errors import ResonanceSingularity
from qtransduce.lindblad import steady_state, transducer_liouvillian
from qtransduce.model import TransducerParams, conversion_efficiency, cooperativities
from qtransduce.quantum import ModeSpace, embed, expectation, number
from qtransduce.scattering import (
    added_noise_quanta,
    conversion_bandwidth,
    drift_matrix,
    efficiency_map,
    frequency_sweep,
    mode_occupations,
    simulated_efficiency,
    scattering_matrix,
    spectral_efficiency,
)


def test_zero_detuning_efficiency_matches_cooperativity_formula():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        p = TransducerParams(
            gamma=tuple(rng.uniform(0.001, 0.2, size=2)),
            delta=tuple(rng.uniform(0.5, 20.0, size=2)),
            delta_m=rng.uniform(0.1, 5.0),
            n_pump=tuple(10.0 ** rng.uniform(0, 4, size=2)),
        )
        expected = conversion_efficiency(cooperativities(p))
        assert spectral_efficiency(p, 0.0) == pytest.approx(expected, abs=1e-9)


def test_scattering_matrix_is_unitary_across_detunings(params):
    for matrix in frequency_sweep(params.replace(n_pump=(5000.0, 3000.0)), np.linspace(-40, 40, 81)):
        assert matrix.unitarity_error() < 1e-9


def test_efficiency_is_symmetric_in_detuning(params):
    p = params.replace(n_pump=(4000.0, 900.0))
    for omega in (0.3, 1.7, 12.0):
        assert spectral_efficiency(p, omega) == pytest.approx(spectral_efficiency(p, -omega), abs=1e-12)


def test_transmission_is_reciprocal(params):
    p = params.replace(n_pump=(3000.0, 700.0))
    for omega in (0.0, 0.4, 2.5, 9.0):
        forward = scattering_matrix(p, -omega).element(Port.OPTICAL, Port.MICROWAVE)
        backward = scattering_matrix(p, omega).element(Port.MICROWAVE, Port.OPTICAL)
        assert abs(backward) == pytest.approx(abs(forward), abs=1e-12)


def test_resonant_efficiency_over_a_coupling_grid(params):
    for g1 in np.linspace(0.05, 3.0, 7):
        for g2 in np.linspace(0.05, 3.0, 7):
            p = params.replace(n_pump=((g1 / params.gamma[0]) ** 2, (g2 / params.gamma[1]) ** 2))
            c1 = 4.0 * g1**2 / (p.delta[0] * p.delta_m)
            c2 = 4.0 * g2**2 / (p.delta[1] * p.delta_m)
            matched = 4.0 * c1 * c2 / (1.0 + c1 + c2) ** 2
            assert scattering_matrix(p, 0.0).efficiency == pytest.approx(matched, abs=1e-9)


def test_drift_matrix_is_stable(params):
    drift = drift_matrix(params)
    assert drift.stable
    assert np.all(drift.eigenvalues.real < 0)


def test_no_pump_means_no_conversion(params):
    p = params.replace(n_pump=(0.0, 0.0))
    assert spectral_efficiency(p) == 0.0
    assert added_noise_quanta(p) == 0.0
    s = scattering_matrix(p, 0.0)
    assert abs(s.element(Port.MICROWAVE, Port.MICROWAVE)) == pytest.approx(1.0)


def test_added_noise_scales_with_bath_occupation(params):
    p = params.replace(n_pump=(3000.0, 3000.0))
    assert added_noise_quanta(p.replace(n_th=0.0)) == 0.0
    one = added_noise_quanta(p.replace(n_th=1.0))
    assert one > 0
    assert added_noise_quanta(p.replace(n_th=3.0)) == pytest.approx(3.0 * one)


def test_added_noise_is_infinite_when_nothing_converts(params):
    assert math.isinf(added_noise_quanta(params.replace(n_pump=(0.0, 100.0))))


def test_bandwidth_is_full_width_at_half_maximum(params):
    p = params.replace(n_pump=(6000.0, 6000.0))
    width = conversion_bandwidth(p)
    assert width > 0
    peak = spectral_efficiency(p, 0.0)
    assert spectral_efficiency(p, width / 2) == pytest.approx(peak / 2, rel=1e-6)
    assert conversion_bandwidth(params.replace(n_pump=(0.0, 0.0))) == 0.0


def test_efficiency_map_matches_pointwise_solves(params):
    n1 = np.array([1.0, 30.0, 2500.0])
    n2 = np.array([10.0, 10000.0])
    grid = efficiency_map(params, n1, n2)
    assert grid.shape == (3, 2)
    for i, a in enumerate(n1):
        for j, b in enumerate(n2):
            assert grid[i, j] == pytest.approx(spectral_efficiency(params.replace(n_pump=(a, b))), abs=1e-12)


def test_simulated_efficiency_matches_scattering_for_a_cold_bath(params):
    p = params.replace(n_th=0.0, n_pump=(5000.0, 5000.0))
    assert simulated_efficiency(p) == pytest.approx(spectral_efficiency(p), abs=1e-3)


def test_lyapunov_occupations_match_lindblad(params):
    p = params.replace(n_th=0.3, n_pump=(3000.0, 3000.0))
    space = ModeSpace(cutoffs=(3, 3, 8))
    rho = steady_state(transducer_liouvillian(p, space))
    lindblad = [expectation(rho, embed(number(space.cutoffs[mode]), mode, space)).real for mode in Mode]
    np.testing.assert_allclose(mode_occupations(p), lindblad, atol=1e-3)


def test_mechanical_occupation_without_pumps_is_thermal(params):
    occupations = mode_occupations(params.replace(n_pump=(0.0, 0.0)))
    np.testing.assert_allclose(occupations, [0.0, 0.0, params.n_th], atol=1e-12)


def test_non_finite_detuning_is_rejected(params):
    with pytest.raises(ResonanceSingularity):
        scattering_matrix(params, math.nan)
