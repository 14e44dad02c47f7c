"""Quantum phase estimation of lattice Hamiltonians.

The evolution U = exp(-i (H - E_min) t0) maps the energy window
[E_min, E_min + 2 pi / t0) onto phases [0, 2 pi). Bin w of an a-ancilla
register then reads E = E_min + 2 pi w / (2**a t0).
"""
import json
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from fermion_boson_sim.core.config import settings
from fermion_boson_sim.core.errors import ConfigurationError, DimensionError
from fermion_boson_sim.core.logging import get_logger
from fermion_boson_sim.engine.circuit import Circuit
from fermion_boson_sim.engine.gates import Gate, GateKind, phase_shift, qft_block
from fermion_boson_sim.engine.layout import QubitLayout
from fermion_boson_sim.engine.program import Program, compile_circuit
from fermion_boson_sim.engine.statevector import StateVector, sample_distribution
from fermion_boson_sim.model.trotter import trotter_plan
from fermion_boson_sim.oracle.operators import dense_propagator, fermion_sector, sector_eigensystem
from fermion_boson_sim.schemas.hamiltonian_models import HamiltonianSpec
from fermion_boson_sim.schemas.run_models import EvolutionMode, QpeConfig
from fermion_boson_sim.synth.trotter import synth_trotter_step

logger = get_logger(__name__)

PEAK_FRACTION = 0.02
WEIGHT_FLOOR = 1e-14


@dataclass
class EnergyHistogram:
    """Measured bin counts of one QPE run"""
    n_bins: int
    e_min: float
    t0: float
    counts: Dict[int, int] = field(default_factory=dict)

    @property
    def shots(self) -> int:
        return sum(self.counts.values())

    @property
    def resolution(self) -> float:
        return 2.0 * math.pi / (self.n_bins * self.t0)

    def phase(self, w: int) -> float:
        return w / self.n_bins

    def energy(self, w: int) -> float:
        return self.e_min + w * self.resolution

    def frequencies(self) -> np.ndarray:
        dense = np.zeros(self.n_bins)
        for w, c in self.counts.items():
            dense[w] = c
        return dense / max(1, self.shots)

    def modal_bin(self) -> int:
        return max(sorted(self.counts), key=lambda w: self.counts[w])

    def modal_energy(self) -> float:
        return self.energy(self.modal_bin())

    def merge(self, other: "EnergyHistogram") -> "EnergyHistogram":
        """Combine batches of the same configuration"""
        if (other.n_bins, other.e_min, other.t0) != (self.n_bins, self.e_min, self.t0):
            raise ConfigurationError("cannot merge histograms of different configurations")
        counts = dict(self.counts)
        for w, c in other.counts.items():
            counts[w] = counts.get(w, 0) + c
        return EnergyHistogram(self.n_bins, self.e_min, self.t0, dict(sorted(counts.items())))

    def rows(self) -> List[Dict[str, Union[int, float]]]:
        return [
            {"bin": w, "phase": self.phase(w), "energy": self.energy(w), "count": c}
            for w, c in sorted(self.counts.items())
        ]


def load_reference_config(path: Optional[Union[str, Path]] = None) -> QpeConfig:
    """Parse the versioned reference QPE configuration"""
    path = Path(path or settings.QPE_REFERENCE_PATH)
    try:
        return QpeConfig(**json.loads(path.read_text()))
    except (OSError, ValueError, ValidationError) as e:
        logger.error("Invalid QPE reference config", path=str(path), error=str(e))
        raise ConfigurationError(f"cannot read QPE config {path}: {e}") from e


def check_window(config: QpeConfig) -> None:
    if config.width * config.evolution_time > 2.0 * math.pi * (1.0 + 1e-12):
        raise ConfigurationError(
            f"energy window {config.width} times t0={config.evolution_time} exceeds 2 pi; phases would alias"
        )


def dirichlet_probabilities(phases: np.ndarray, weights: np.ndarray, n_bins: int) -> np.ndarray:
    """
    Exact outcome distribution for eigenphases phi_j with weights |c_j|^2

    P(w) = sum_j |c_j|^2 |sum_x exp(-i x (phi_j - 2 pi w / M))|^2 / M^2
    """
    w = np.arange(n_bins)
    delta = np.asarray(phases)[:, None] - 2.0 * math.pi * w[None, :] / n_bins
    half = 0.5 * delta
    sin_half = np.sin(half)
    small = np.abs(sin_half) < 1e-12
    kernel = np.where(small, 1.0, np.sin(n_bins * half) / (n_bins * np.where(small, 1.0, sin_half)))
    probabilities = np.asarray(weights) @ (kernel ** 2)
    return probabilities / probabilities.sum()


def histogram_from_spectrum(
    config: QpeConfig,
    energies: np.ndarray,
    weights: np.ndarray,
) -> EnergyHistogram:
    """Sample a histogram from eigen-energies and input-state weights"""
    check_window(config)
    keep = np.asarray(weights) > WEIGHT_FLOOR
    phases = (np.asarray(energies)[keep] - config.e_min) * config.evolution_time
    probabilities = dirichlet_probabilities(phases, np.asarray(weights)[keep], config.n_bins)
    counts = sample_distribution(probabilities, config.shots, config.seed)
    return EnergyHistogram(config.n_bins, config.e_min, config.evolution_time, counts)


def spectral_weights(spec: HamiltonianSpec, layout: QubitLayout, state: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Eigen-energies and |<E_j|psi>|^2 over every fermion-number sector the state touches"""
    psi = np.asarray(state)
    energies, weights = [], []
    for n in range(layout.n_orbitals + 1):
        indices = fermion_sector(layout, n)
        if np.sum(np.abs(psi[indices]) ** 2) <= WEIGHT_FLOOR:
            continue
        values, vectors, indices = sector_eigensystem(spec, layout, n)
        overlaps = vectors.conj().T @ psi[indices]
        energies.append(values)
        weights.append(np.abs(overlaps) ** 2)
    if not energies:
        raise DimensionError("input state has no weight")
    return np.concatenate(energies), np.concatenate(weights)


class Evolution(ABC):
    """U^power acting on physical amplitudes"""

    @abstractmethod
    def apply(self, amplitudes: np.ndarray, power: int) -> np.ndarray:
        pass


class TrotterEvolution(Evolution):
    """steps first-order Trotter sweeps plus the window phase per application"""

    def __init__(self, spec: HamiltonianSpec, layout: QubitLayout, config: QpeConfig):
        t0 = config.evolution_time
        self.steps = config.steps_per_application
        plan = trotter_plan(spec, t0, self.steps)
        self.step_circuit = synth_trotter_step(plan, layout).circuit
        self.program: Program = compile_circuit(self.step_circuit)
        self.window_phase = -config.e_min * t0
        self.n_qubits = layout.n_qubits
        self.layout = layout

    def unitary_circuit(self) -> Circuit:
        """One application of U as a circuit, window phase folded into the classical phase"""
        circuit = Circuit(self.n_qubits)
        for _ in range(self.steps):
            circuit.extend(self.step_circuit)
        circuit.add_phase(self.window_phase)
        return circuit

    def apply(self, amplitudes: np.ndarray, power: int) -> np.ndarray:
        state = StateVector(self.n_qubits, amplitudes, layout=self.layout)
        for _ in range(power):
            self.program.run(state, repetitions=self.steps)
            state.global_phase += self.window_phase
        return state.physical()


class DenseEvolution(Evolution):
    """Exact exp(-i (H - E_min) t0) as a dense matrix"""

    def __init__(self, spec: HamiltonianSpec, layout: QubitLayout, config: QpeConfig):
        t0 = config.evolution_time
        self.matrix = np.exp(1j * config.e_min * t0) * dense_propagator(spec, layout, t0)

    def apply(self, amplitudes: np.ndarray, power: int) -> np.ndarray:
        result = np.asarray(amplitudes, dtype=complex)
        for _ in range(power):
            result = self.matrix @ result
        return result


def make_evolution(spec: HamiltonianSpec, layout: QubitLayout, config: QpeConfig) -> Evolution:
    if config.mode == EvolutionMode.DENSE:
        return DenseEvolution(spec, layout, config)
    return TrotterEvolution(spec, layout, config)


def ladder_probabilities(evolution: Evolution, state: np.ndarray, n_bins: int) -> np.ndarray:
    """
    Ancilla outcome distribution from the autocorrelation c(d) = <psi|U^d|psi>

    Equivalent to controlled powers, inverse QFT and measurement, without
    storing the ancilla register. Returned by bin w = -y mod M.
    """
    psi = np.asarray(state, dtype=complex)
    current = psi.copy()
    c = np.empty(n_bins, dtype=complex)
    c[0] = np.vdot(psi, psi)
    for d in range(1, n_bins):
        current = evolution.apply(current, 1)
        c[d] = np.vdot(psi, current)
    d = np.arange(n_bins)
    weighted = (n_bins - d) * c
    weighted[0] = 0.0
    by_y = (n_bins * c[0].real + 2.0 * np.fft.fft(weighted).real) / n_bins ** 2
    by_y = np.clip(by_y, 0.0, None)
    by_w = by_y[(-d) % n_bins]
    return by_w / by_w.sum()


def qpe_run(
    config: QpeConfig,
    state: Union[StateVector, np.ndarray],
    spec: HamiltonianSpec,
    layout: QubitLayout,
    spectral: Optional[bool] = None,
) -> EnergyHistogram:
    """
    Sample an energy histogram for the input state

    Dense mode uses the exact eigendecomposition of the discrete Hamiltonian;
    Trotter mode pushes the state through the synthesized step circuit.

    Args:
        config: QPE parameters
        state: System state on the layout (no ancillas)
        spec: Hamiltonian
        layout: System layout
        spectral: Force (True) or forbid (False) the eigendecomposition path

    Returns:
        EnergyHistogram with config.shots counts
    """
    check_window(config)
    psi = state.physical() if isinstance(state, StateVector) else np.asarray(state, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    use_spectrum = spectral if spectral is not None else config.mode == EvolutionMode.DENSE
    if use_spectrum:
        energies, weights = spectral_weights(spec, layout, psi)
        histogram = histogram_from_spectrum(config, energies, weights)
    else:
        probabilities = ladder_probabilities(make_evolution(spec, layout, config), psi, config.n_bins)
        counts = sample_distribution(probabilities, config.shots, config.seed)
        histogram = EnergyHistogram(config.n_bins, config.e_min, config.evolution_time, counts)
    logger.info(
        "QPE run complete",
        ancillas=config.ancillas,
        mode=config.mode.value,
        shots=config.shots,
        modal_energy=histogram.modal_energy(),
    )
    return histogram


def promote(circuit: Circuit, control: int, promote_phase: bool = True) -> Circuit:
    """
    Controlled version of a circuit

    Conjugating gates stay uncontrolled; the classical phase becomes a
    PhaseShift on the control when promote_phase is set.
    """
    promoted = Circuit(max(circuit.n_qubits, control + 1))
    for gate in circuit:
        promoted.append(gate if gate.conjugating else gate.with_controls((control,)))
    if promote_phase and circuit.classical_phase:
        promoted.append(phase_shift(control, circuit.classical_phase))
    return promoted


def qpe_circuit(
    unitary: Circuit,
    layout: QubitLayout,
    promote_phase: bool = True,
) -> Circuit:
    """
    Textbook QPE circuit on layout.ancilla_qubits

    Ancilla k controls U^(2^k); an inverse QFT on the ancilla span follows.
    """
    ancillas = layout.ancilla_qubits
    if not ancillas:
        raise ConfigurationError("QPE circuit needs ancilla qubits")
    circuit = Circuit(layout.n_qubits)
    for q in ancillas:
        circuit.append(Gate(GateKind.HADAMARD, targets=(q,)))
    for k, q in enumerate(ancillas):
        controlled = promote(unitary, q, promote_phase)
        for _ in range(2 ** k):
            circuit.extend(controlled)
    circuit.append(qft_block(tuple(ancillas), inverse=True))
    return circuit


def qpe_gate_level(
    config: QpeConfig,
    state: Union[StateVector, np.ndarray],
    spec: HamiltonianSpec,
    layout: QubitLayout,
    promote_phase: bool = True,
) -> EnergyHistogram:
    """
    QPE with an explicit ancilla register and promoted Trotter circuits

    Args:
        config: QPE parameters; config.ancillas qubits are added on top
        state: System state
        spec: Hamiltonian
        layout: System layout without ancillas
        promote_phase: Promote the tracked classical phase (disable only to
            demonstrate its effect)

    Returns:
        EnergyHistogram
    """
    check_window(config)
    full = layout.with_ancillas(config.ancillas)
    if full.n_qubits > settings.MAX_QUBITS:
        raise DimensionError(f"gate-level QPE needs {full.n_qubits} qubits")
    evolution = TrotterEvolution(spec, layout, config)
    psi = state.physical() if isinstance(state, StateVector) else np.asarray(state, dtype=complex)
    ancilla_zero = np.zeros(2 ** config.ancillas, dtype=complex)
    ancilla_zero[0] = 1.0
    register = StateVector(full.n_qubits, np.kron(ancilla_zero, psi / np.linalg.norm(psi)), layout=full)
    circuit = qpe_circuit(evolution.unitary_circuit(), full, promote_phase)
    compile_circuit(circuit).run(register)
    by_y = register.probabilities(full.ancilla_qubits)
    by_w = by_y[(-np.arange(config.n_bins)) % config.n_bins]
    counts = sample_distribution(by_w, config.shots, config.seed)
    logger.info("Gate-level QPE complete", qubits=full.n_qubits, gates=len(circuit), promote_phase=promote_phase)
    return EnergyHistogram(config.n_bins, config.e_min, config.evolution_time, counts)


def iterative_qpe(
    config: QpeConfig,
    state: Union[StateVector, np.ndarray],
    evolution: Evolution,
) -> EnergyHistogram:
    """
    Single-ancilla phase estimation, least significant bit first

    Each shot runs config.ancillas rounds; round m applies controlled
    U^(2^(a-1-m)), a feedback phase built from the earlier bits, a Hadamard
    and a measurement that collapses the system.

    Args:
        config: QPE parameters (shots is the number of full bit strings)
        state: System state
        evolution: U acting on system amplitudes

    Returns:
        EnergyHistogram over the same bins as the register driver
    """
    check_window(config)
    a, n_bins = config.ancillas, config.n_bins
    psi0 = state.physical() if isinstance(state, StateVector) else np.asarray(state, dtype=complex)
    psi0 = psi0 / np.linalg.norm(psi0)
    rng = np.random.Generator(np.random.Philox(config.seed))
    counts: Dict[int, int] = {}
    for _ in range(config.shots):
        psi = psi0
        y = 0
        for m in range(a):
            feedback = sum(((y >> l) & 1) * 2.0 ** (l - m - 1) for l in range(m))
            rotated = np.exp(-2j * math.pi * feedback) * evolution.apply(psi, 2 ** (a - 1 - m))
            plus, minus = 0.5 * (psi + rotated), 0.5 * (psi - rotated)
            p_zero = float(np.vdot(plus, plus).real)
            bit = 0 if rng.random() < p_zero else 1
            branch = plus if bit == 0 else minus
            psi = branch / np.linalg.norm(branch)
            y |= bit << m
        w = (-y) % n_bins
        counts[w] = counts.get(w, 0) + 1
    return EnergyHistogram(n_bins, config.e_min, config.evolution_time, dict(sorted(counts.items())))


def ground_energy_estimate(histogram: EnergyHistogram, min_fraction: float = PEAK_FRACTION) -> float:
    """
    Lowest significant peak, refined by a three-bin centroid

    A peak is a local maximum holding at least min_fraction of the shots.
    """
    freq = histogram.frequencies()
    n = freq.size
    for w in range(n):
        if freq[w] < min_fraction:
            continue
        left = freq[w - 1] if w > 0 else 0.0
        right = freq[w + 1] if w + 1 < n else 0.0
        if freq[w] >= left and freq[w] >= right:
            neighbours = [v for v in (w - 1, w, w + 1) if 0 <= v < n]
            mass = sum(freq[v] for v in neighbours)
            return sum(freq[v] * histogram.energy(v) for v in neighbours) / mass
    return histogram.modal_energy()
