import math
from pathlib import Path

import numpy as np
import pytest

from fermion_boson_sim.core.errors import ConfigurationError
from fermion_boson_sim.engine.layout import QubitLayout
from fermion_boson_sim.model.hamiltonian import free_phonons, holstein
from fermion_boson_sim.oracle.operators import hamiltonian_matrix
from fermion_boson_sim.oscillator.grid import make_grid
from fermion_boson_sim.prep.gaussian import gaussian_amplitudes, product_state
from fermion_boson_sim.qpe.estimator import (
    DenseEvolution,
    EnergyHistogram,
    Evolution,
    TrotterEvolution,
    check_window,
    dirichlet_probabilities,
    ground_energy_estimate,
    iterative_qpe,
    ladder_probabilities,
    load_reference_config,
    qpe_gate_level,
    qpe_run,
    spectral_weights,
)
from fermion_boson_sim.qpe.phonons import phonon_config, phonon_distribution
from fermion_boson_sim.schemas.run_models import EvolutionMode, QpeConfig
from fermion_boson_sim.synth.boson import momentum_matrix

REFERENCE = Path(__file__).resolve().parents[2] / "config" / "qpe_reference.json"


class DiagonalEvolution(Evolution):
    """U = diag(exp(-i phi_j))"""

    def __init__(self, phases):
        self.phases = np.asarray(phases, dtype=float)

    def apply(self, amplitudes, power):
        return np.exp(-1j * power * self.phases) * amplitudes


def _bin_phase(w, n_bins):
    return 2.0 * math.pi * w / n_bins


def test_dirichlet_on_bin():
    """
    Test that an eigenphase on a bin centre is read out with certainty
    """
    probabilities = dirichlet_probabilities(np.array([_bin_phase(3, 16)]), np.array([1.0]), 16)
    assert probabilities[3] == pytest.approx(1.0)
    off = dirichlet_probabilities(np.array([0.37, 2.9]), np.array([0.4, 0.6]), 32)
    assert off.sum() == pytest.approx(1.0)
    assert np.all(off >= 0.0)


def test_ladder_matches_dirichlet_for_diagonal_unitary():
    """
    Test the autocorrelation route on a two-level unitary
    """
    phases = [_bin_phase(5, 16), _bin_phase(9, 16) + 0.1]
    psi = np.sqrt([0.3, 0.7]).astype(complex)
    ladder = ladder_probabilities(DiagonalEvolution(phases), psi, 16)
    assert np.allclose(ladder, dirichlet_probabilities(np.array(phases), np.array([0.3, 0.7]), 16), atol=1e-12)


def test_dense_eigenstate_between_bins():
    """
    Test that an off-bin eigenphase at six ancillas lands on its nearest bins
    """
    layout = QubitLayout.standard(0, 1, 4)
    spec = free_phonons(1.0, 1)
    matrix = hamiltonian_matrix(spec, layout).toarray()
    values, vectors = np.linalg.eigh(0.5 * (matrix + matrix.conj().T))
    e_min = values[0] - 17.3 * 0.125
    config = QpeConfig(ancillas=6, mode=EvolutionMode.DENSE, e_min=e_min, e_max=e_min + 8.0, shots=2000, seed=7)
    assert config.resolution == pytest.approx(0.125)
    psi = vectors[:, 0].astype(complex)

    probabilities = ladder_probabilities(DenseEvolution(spec, layout, config), psi, config.n_bins)
    assert probabilities[17] + probabilities[18] >= 0.4
    assert int(np.argmax(probabilities)) == 17

    histogram = qpe_run(config, psi, spec, layout, spectral=False)
    assert histogram.modal_bin() == 17
    assert abs(histogram.modal_energy() - values[0]) <= config.resolution


def test_evolution_is_abstract():
    """
    Test that the evolution base class needs an apply implementation
    """
    with pytest.raises(TypeError):
        Evolution()


def test_ladder_matches_spectrum(small_holstein):
    """
    Test dense ladder probabilities against the eigendecomposition path
    """
    layout = QubitLayout.standard(2, 2, 2)
    config = QpeConfig(ancillas=5, mode=EvolutionMode.DENSE, e_min=-4.0, e_max=4.0, seed=1)
    state = product_state(layout, np.array([0, 1.0, 0.5, 0]), [gaussian_amplitudes(2)] * 2)
    psi = state.physical()
    energies, weights = spectral_weights(small_holstein, layout, psi)
    phases = (energies - config.e_min) * config.evolution_time
    expected = dirichlet_probabilities(phases, weights, config.n_bins)
    ladder = ladder_probabilities(DenseEvolution(small_holstein, layout, config), psi, config.n_bins)
    assert np.allclose(ladder, expected, atol=1e-10)


def test_qpe_run_is_deterministic(small_holstein):
    """
    Test that equal seeds give identical histograms
    """
    layout = QubitLayout.standard(2, 2, 2)
    config = QpeConfig(ancillas=4, mode=EvolutionMode.DENSE, e_min=-4.0, e_max=4.0, shots=500, seed=9)
    state = product_state(layout, np.array([0, 1.0, 0, 0]), [gaussian_amplitudes(2)] * 2)
    first = qpe_run(config, state, small_holstein, layout)
    second = qpe_run(config, state, small_holstein, layout)
    assert first.counts == second.counts
    assert first.shots == 500


def test_gate_level_matches_ladder():
    """
    Test the explicit ancilla register against the autocorrelation route
    """
    layout = QubitLayout.standard(0, 1, 3)
    spec = free_phonons(1.0, 1)
    config = QpeConfig(ancillas=4, e_min=-1.0, e_max=7.0, steps_per_unit=8, shots=20000, seed=4)
    psi = gaussian_amplitudes(3, 1) + 0.5 * gaussian_amplitudes(3, 0)
    psi = psi / np.linalg.norm(psi)
    gate = qpe_gate_level(config, psi, spec, layout)
    exact = ladder_probabilities(TrotterEvolution(spec, layout, config), psi, config.n_bins)
    assert np.max(np.abs(gate.frequencies() - exact)) < 0.015

    unpromoted = qpe_gate_level(config, psi, spec, layout, promote_phase=False)
    assert np.max(np.abs(unpromoted.frequencies() - exact)) > 0.05


def test_iterative_qpe_exact_eigenphase():
    """
    Test the single-ancilla driver on an eigenstate whose phase sits on a bin
    """
    config = QpeConfig(ancillas=4, e_min=0.0, e_max=1.0, shots=40, seed=2)
    histogram = iterative_qpe(config, np.array([1.0 + 0j]), DiagonalEvolution([_bin_phase(11, 16)]))
    assert histogram.counts == {11: 40}


def test_iterative_qpe_matches_ladder():
    """
    Test outcome statistics of the single-ancilla driver on a superposition
    """
    config = QpeConfig(ancillas=4, e_min=0.0, e_max=1.0, shots=3000, seed=6)
    evolution = DiagonalEvolution([_bin_phase(2, 16), _bin_phase(13, 16)])
    psi = np.sqrt([0.25, 0.75]).astype(complex)
    histogram = iterative_qpe(config, psi, evolution)
    assert set(histogram.counts) == {2, 13}
    assert histogram.frequencies()[13] == pytest.approx(0.75, abs=0.04)


def test_histogram_energies_and_merge():
    """
    Test bin energies, merging and mismatched merges
    """
    first = EnergyHistogram(16, -4.0, math.pi / 2, {1: 3, 4: 5})
    second = EnergyHistogram(16, -4.0, math.pi / 2, {4: 2, 7: 1})
    merged = first.merge(second)
    assert merged.counts == {1: 3, 4: 7, 7: 1}
    assert merged.energy(4) == pytest.approx(-4.0 + 4 * 0.25)
    assert merged.modal_bin() == 4
    assert [row["bin"] for row in merged.rows()] == [1, 4, 7]
    with pytest.raises(ConfigurationError):
        first.merge(EnergyHistogram(32, -4.0, math.pi / 2, {}))


def test_ground_energy_estimate_lowest_peak():
    """
    Test that the lowest significant peak wins over the modal bin
    """
    histogram = EnergyHistogram(16, -4.0, math.pi / 2, {1: 10, 3: 50, 4: 100, 5: 50, 10: 790})
    assert ground_energy_estimate(histogram) == pytest.approx(histogram.energy(4))
    assert histogram.modal_energy() == pytest.approx(histogram.energy(10))


def test_check_window_rejects_aliasing():
    """
    Test the window-times-t0 guard
    """
    with pytest.raises(ConfigurationError):
        check_window(QpeConfig(e_min=0.0, e_max=8.0, t0=1.0, seed=0))
    check_window(QpeConfig(e_min=-4.0, e_max=0.0, t0=math.pi / 2, seed=0))


def test_reference_config():
    """
    Test the committed reference configuration
    """
    config = load_reference_config(REFERENCE)
    assert config.ancillas == 8
    assert (config.e_min, config.e_max) == (-4.0, 0.0)
    assert config.evolution_time == pytest.approx(math.pi / 2)
    assert config.seed == 17
    with pytest.raises(ConfigurationError):
        load_reference_config(REFERENCE.with_name("missing.json"))


def test_phonon_config_bins():
    """
    Test that phonon level n lands on bin 8n with eight ancillas
    """
    config = phonon_config(1.0, 2, shots=10, seed=0)
    assert config.e_min == pytest.approx(1.0)
    assert config.resolution == pytest.approx(0.125)


@pytest.mark.parametrize("level", [0, 1, 2])
def test_phonon_distribution_number_states(level):
    """
    Test Z(n) of a product of grid number states
    """
    layout = QubitLayout.standard(2, 2, 5)
    fermion = np.array([0, 1.0, 1.0, 0]) / math.sqrt(2.0)
    state = product_state(layout, fermion, [gaussian_amplitudes(5, level), gaussian_amplitudes(5)])
    result = phonon_distribution(state, layout, shots=2000, seed=3)
    assert result.z.sum() == pytest.approx(1.0)
    assert result.z[level] >= 0.999


def test_phonon_distribution_rejects_weight_above_window():
    """
    Test that a register state above n_max phonons raises instead of wrapping
    """
    layout = QubitLayout.standard(0, 1, 6)
    positions = make_grid(6).positions
    p = momentum_matrix(6)
    local = 0.5 * p @ p + 0.5 * np.diag(positions ** 2)
    values, vectors = np.linalg.eigh(0.5 * (local + local.conj().T))
    assert values[-1] >= phonon_config(1.0, 1, shots=10, seed=0).e_max
    with pytest.raises(ConfigurationError):
        phonon_distribution(vectors[:, -1].astype(complex), layout, shots=100, seed=3)
    with pytest.raises(ConfigurationError):
        phonon_distribution(vectors[:, -1].astype(complex), layout, shots=100, seed=3, mode=EvolutionMode.TROTTER)
    result = phonon_distribution(vectors[:, 0].astype(complex), layout, shots=100, seed=3)
    assert result.z[0] == pytest.approx(1.0)


def test_holstein_ground_state_spectral_peak():
    """
    Test that an exact sector eigenstate is read out on its own bin
    """
    spec = holstein(1.0, 0.0, 1.0, sites=2)
    layout = QubitLayout.standard(2, 2, 3)
    config = QpeConfig(ancillas=6, mode=EvolutionMode.DENSE, e_min=-4.0, e_max=4.0, shots=400, seed=5)
    state = product_state(layout, np.array([0, 1.0, 1.0, 0]), [gaussian_amplitudes(3)] * 2)
    histogram = qpe_run(config, state, spec, layout)
    energies, weights = spectral_weights(spec, layout, state.physical())
    ground = energies[np.argmax(weights)]
    assert abs(ground_energy_estimate(histogram) - ground) <= config.resolution
