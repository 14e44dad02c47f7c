"""Phonon-number distribution read out by phase estimation of the free phonons."""
from dataclasses import dataclass

import numpy as np

from fermion_boson_sim.core.errors import ConfigurationError, LayoutError
from fermion_boson_sim.core.logging import get_logger
from fermion_boson_sim.engine.layout import QubitLayout
from fermion_boson_sim.engine.statevector import StateVector
from fermion_boson_sim.model.hamiltonian import free_phonons
from fermion_boson_sim.oscillator.grid import make_grid
from fermion_boson_sim.qpe.estimator import EnergyHistogram, histogram_from_spectrum, qpe_run
from fermion_boson_sim.schemas.run_models import EvolutionMode, QpeConfig
from fermion_boson_sim.synth.boson import momentum_matrix
from fermion_boson_sim.utils.linalg import hermitian_eigh

logger = get_logger(__name__)

DEFAULT_N_MAX = 31
DEFAULT_ANCILLAS = 8
OVERFLOW_TOLERANCE = 1e-6


@dataclass
class PhononDistribution:
    z: np.ndarray
    histogram: EnergyHistogram

    def rows(self):
        return [{"n": n, "Z_qpe": float(v)} for n, v in enumerate(self.z)]


def phonon_config(
    omega: float,
    sites: int,
    shots: int,
    seed: int,
    ancillas: int = DEFAULT_ANCILLAS,
    n_max: int = DEFAULT_N_MAX,
    mode: EvolutionMode = EvolutionMode.DENSE,
    steps_per_unit: int = 64,
) -> QpeConfig:
    """Window [omega S/2, omega (S/2 + n_max + 1)) so level n lands on a bin edge"""
    e_min = 0.5 * omega * sites
    return QpeConfig(
        ancillas=ancillas,
        mode=mode,
        e_min=e_min,
        e_max=e_min + omega * (n_max + 1),
        steps_per_unit=steps_per_unit,
        shots=shots,
        seed=seed,
    )


def _oscillator_eigensystem(n_x: int, omega: float):
    p = momentum_matrix(n_x)
    x = make_grid(n_x).positions
    local = 0.5 * p @ p + 0.5 * omega ** 2 * np.diag(x * x)
    return hermitian_eigh(0.5 * (local + local.conj().T))


def free_phonon_weights(state: np.ndarray, layout: QubitLayout, omega: float):
    """Energies and weights of the state in the product eigenbasis of the free phonons"""
    sites = layout.n_oscillators
    expected = layout.n_orbitals
    for register in layout.boson_registers:
        if register.low != expected:
            raise LayoutError("phonon readout needs the standard layout order")
        expected += register.width
    widths = [r.width for r in layout.boson_registers]
    shape = [2 ** len(layout.ancilla_qubits)] + [2 ** w for w in reversed(widths)] + [2 ** layout.n_orbitals]
    tensor = np.asarray(state, dtype=complex).reshape(shape)
    energies = np.zeros([1] * (sites + 2))
    for site in range(sites):
        values, vectors = _oscillator_eigensystem(widths[site], omega)
        axis = sites - site
        tensor = np.moveaxis(np.tensordot(vectors.conj().T, tensor, axes=([1], [axis])), 0, axis)
        shape_axis = [1] * (sites + 2)
        shape_axis[axis] = values.size
        energies = energies + values.reshape(shape_axis)
    weights = (np.abs(tensor) ** 2).sum(axis=(0, sites + 1))
    return energies.reshape(-1), weights.reshape(-1)


def phonon_distribution(
    state,
    layout: QubitLayout,
    shots: int,
    seed: int,
    omega: float = 1.0,
    ancillas: int = DEFAULT_ANCILLAS,
    n_max: int = DEFAULT_N_MAX,
    mode: EvolutionMode = EvolutionMode.DENSE,
) -> PhononDistribution:
    """
    Z(n) from QPE on H_p = sum_s (P_s^2 + omega^2 X_s^2) / 2

    Energy E maps to total phonon number n = round((E - omega S / 2) / omega).

    Args:
        state: Prepared system state (StateVector or amplitudes)
        layout: System layout
        shots: Measurement shots
        seed: Sampling seed
        omega: Phonon frequency
        ancillas: Ancilla count
        n_max: Largest phonon number resolved
        mode: DENSE uses the exact product eigenbasis; TROTTER runs the synthesized evolution

    Returns:
        PhononDistribution with Z summing to 1

    Raises:
        ConfigurationError: more than OVERFLOW_TOLERANCE of the weight lies above
            level n_max, where it would wrap onto low phonon numbers
    """
    psi = state.physical() if isinstance(state, StateVector) else np.asarray(state, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    sites = layout.n_oscillators
    config = phonon_config(omega, sites, shots, seed, ancillas, n_max, mode)
    energies, weights = free_phonon_weights(psi, layout, omega)
    overflow = float(weights[energies >= config.e_max - 0.5 * omega].sum())
    if overflow > OVERFLOW_TOLERANCE:
        logger.error("Phonon weight above readout window", overflow=overflow, n_max=n_max)
        raise ConfigurationError(
            f"weight {overflow:.3g} above {n_max} phonons would alias; raise n_max"
        )
    if mode == EvolutionMode.DENSE:
        histogram = histogram_from_spectrum(config, energies, weights)
    else:
        histogram = qpe_run(config, psi, free_phonons(omega, sites), layout, spectral=False)
    z = np.zeros(n_max + 1)
    for w, count in histogram.counts.items():
        n = int(round((histogram.energy(w) - config.e_min) / omega))
        if 0 <= n <= n_max:
            z[n] += count
    total = z.sum()
    if total > 0:
        z /= total
    logger.info("Phonon distribution measured", shots=shots, z0=float(z[0]))
    return PhononDistribution(z=z, histogram=histogram)
