"""
Tests de la simulation du protocole quantique (n = 2).

Example:
    $ pytest tests/test_quantum_sim.py -v
"""

import math
from decimal import Decimal

import numpy as np
import pytest

from brac_witness.exceptions import DimensionMismatch, InvalidLabel
from brac_witness.models.payoff import PayoffConfig
from brac_witness.models.quantum import QuantumState
from brac_witness.services.bounds_service import bounds_service
from brac_witness.services.pcrit_service import REFERENCE_PCRIT_VALUES
from brac_witness.services.quantum_service import quantum_service

sim = quantum_service


def _config(d: int) -> PayoffConfig:
    """t_yes publié quand il existe, d/2 sinon."""
    if d in REFERENCE_PCRIT_VALUES:
        return PayoffConfig(t_yes=Decimal(str(REFERENCE_PCRIT_VALUES[d][1])), d=d)
    return PayoffConfig(t_yes=Decimal(d) / 2, d=d)


# ==============================================================================
# BASES ET ÉTATS
# ==============================================================================

def test_fourier_vector_examples():
    s = 1 / math.sqrt(2)
    assert np.allclose(sim.fourier_vector(0, 2).amplitudes, [s, s], atol=1e-12)
    assert np.allclose(sim.fourier_vector(1, 2).amplitudes, [s, -s], atol=1e-12)
    assert np.allclose(sim.fourier_vector(1, 4).amplitudes, [0.5, 0.5j, -0.5, -0.5j], atol=1e-12)
    with pytest.raises(InvalidLabel):
        sim.fourier_vector(4, 4)


def test_prepared_states_norms():
    for d in (2, 3, 5, 8):
        for a0 in range(d):
            for a1 in range(d):
                raw = sim.unnormalized_state(a0, a1, d)
                assert np.vdot(raw, raw).real == pytest.approx(2 + 2 / math.sqrt(d), abs=1e-12)
                state = sim.prepare_state(a0, a1, d)
                assert np.linalg.norm(state.amplitudes) == pytest.approx(1.0, abs=1e-12)


def test_prepare_state_examples():
    state = sim.prepare_state(0, 0, 4)
    assert abs(state.amplitudes[0]) ** 2 == pytest.approx(0.75, abs=1e-12)
    with pytest.raises(InvalidLabel):
        sim.prepare_state(0, 5, 4)


def test_correct_measurements_are_balanced():
    for d in (2, 3, 4, 7):
        expected = 0.5 + 1 / (2 * math.sqrt(d))
        for a0 in range(d):
            for a1 in range(d):
                state = sim.prepare_state(a0, a1, d)
                assert sim.born_probability(state, sim.measurement(0, a0, d)) == pytest.approx(expected, abs=1e-9)
                assert sim.born_probability(state, sim.measurement(1, a1, d)) == pytest.approx(expected, abs=1e-9)


def test_literal_state_is_not_balanced():
    raw = sim.unnormalized_state(1, 1, 3, aligned=False)
    assert np.vdot(raw, raw).real != pytest.approx(2 + 2 / math.sqrt(3), abs=1e-6)


def test_quantum_state_rejects_unnormalized():
    with pytest.raises(ValueError):
        QuantumState(amplitudes=[1.0, 1.0])


# ==============================================================================
# MESURES
# ==============================================================================

def test_measurement_examples():
    assert np.allclose(sim.measurement(0, 2, 4).vector, [0, 0, 1, 0])
    assert np.allclose(sim.measurement(1, 0, 2).vector, [1 / math.sqrt(2)] * 2)
    assert np.allclose(sim.measurement(1, 1, 4).vector, sim.fourier_vector(1, 4).amplitudes)
    with pytest.raises(InvalidLabel):
        sim.measurement(2, 0, 4)


def test_born_probability_examples():
    zero = QuantumState(amplitudes=[1, 0])
    assert sim.born_probability(zero, sim.measurement(0, 0, 2)) == pytest.approx(1.0)
    assert sim.born_probability(zero, sim.measurement(0, 1, 2)) == pytest.approx(0.0)
    assert sim.born_probability(sim.fourier_vector(0, 2), sim.measurement(0, 0, 2)) == pytest.approx(0.5)
    with pytest.raises(DimensionMismatch):
        sim.born_probability(zero, sim.measurement(0, 0, 3))


def test_measurement_completeness_randomized():
    rng = np.random.default_rng(41)
    for _ in range(1000):
        d = int(rng.integers(2, 9))
        state = sim.prepare_state(int(rng.integers(0, d)), int(rng.integers(0, d)), d)
        y = int(rng.integers(0, 2))
        total = sum(sim.born_probability(state, sim.measurement(y, k, d)) for k in range(d))
        assert total == pytest.approx(1.0, abs=1e-9)


def test_projectors_are_idempotent():
    for y in (0, 1):
        for k in range(5):
            projector = sim.measurement(y, k, 5).projector
            assert np.allclose(projector @ projector, projector, atol=1e-12)


# ==============================================================================
# GAIN SIMULÉ
# ==============================================================================

def test_guess_probability_examples():
    assert sim.quantum_guess_probability(4) == pytest.approx(0.75, abs=1e-9)
    assert sim.quantum_guess_probability(9) == pytest.approx(2 / 3, abs=1e-9)
    assert sim.quantum_guess_probability(2) == pytest.approx(0.853553, abs=1e-6)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 8, 16])
def test_simulation_matches_closed_form(d):
    config = _config(d)
    simulated = sim.simulate_binary_payoff(d, config)
    assert simulated == pytest.approx(bounds_service.binary_quantum_n2(d, config), abs=1e-9)
    margin = simulated - float(bounds_service.binary_classical_n2(d, config))
    assert margin > 0
    assert margin == pytest.approx(bounds_service.quantum_classical_gap(d, config), abs=1e-9)


def test_simulation_examples():
    assert sim.simulate_binary_payoff(4, PayoffConfig(t_yes=Decimal(3), d=4)) == pytest.approx(5 / 6, abs=1e-9)
    assert sim.simulate_binary_payoff(2, PayoffConfig(t_yes=Decimal(1), d=2)) == pytest.approx(0.853553, abs=1e-6)


def test_simulation_gap_identity_up_to_16():
    for d in range(2, 17):
        config = PayoffConfig(t_yes=Decimal("2.5"), d=d)
        gap = sim.simulate_binary_payoff(d, config) - float(bounds_service.binary_classical_n2(d, config))
        assert gap == pytest.approx(bounds_service.quantum_classical_gap(d, config), abs=1e-9)


def test_literal_state_payoff_is_computed():
    config = PayoffConfig(t_yes=Decimal(2), d=3)
    literal = sim.simulate_binary_payoff(3, config, aligned=False)
    assert 0 <= literal <= 1


def test_export_statistics_shape():
    table = sim.export_statistics(3, PayoffConfig(t_yes=Decimal(2), d=3))
    assert table.d == 3 and table.n == 2
    assert len(table.entries) == 9 * 2 * 3
    assert all(abs(e.p0 + e.p1 - 1) < 1e-12 for e in table.entries)
