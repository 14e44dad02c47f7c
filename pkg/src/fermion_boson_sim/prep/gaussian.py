"""Exact register loaders and product states."""
import functools
import math
from typing import Dict, Iterable, Optional, Sequence

import numpy as np

from fermion_boson_sim.core.errors import ConfigurationError, DimensionError, LayoutError
from fermion_boson_sim.core.logging import get_logger
from fermion_boson_sim.engine.circuit import Circuit
from fermion_boson_sim.engine.gates import Gate, GateKind
from fermion_boson_sim.engine.layout import QubitLayout
from fermion_boson_sim.engine.statevector import StateVector
from fermion_boson_sim.oscillator.grid import make_grid, sample_basis

logger = get_logger(__name__)

MAX_LOADER_NX = 8


def gaussian_amplitudes(n_x: int, level: int = 0) -> np.ndarray:
    """Normalized sampled Hermite-Gauss column chi_level"""
    grid = make_grid(n_x)
    chi = sample_basis(grid, level + 1).chi[:, level]
    return chi / np.linalg.norm(chi)


def prepare_gaussian_exact(n_x: int) -> StateVector:
    """
    Register state chi_0 written directly into the amplitudes

    Args:
        n_x: Register width, at most 8

    Returns:
        Normalized n_x-qubit state
    """
    if n_x > MAX_LOADER_NX:
        raise DimensionError(f"exact Gaussian loader limited to n_x <= {MAX_LOADER_NX}, got {n_x}")
    return StateVector(n_x, gaussian_amplitudes(n_x))


def loader_circuit(amplitudes: np.ndarray, offset: int = 0, n_qubits: Optional[int] = None) -> Circuit:
    """
    Binary-tree loader of real amplitudes from |0...0>

    Level k splits the weight of every k-bit prefix of the top qubits with a
    Ry controlled on that prefix; zero-valued controls are wrapped in PauliX.

    Args:
        amplitudes: Real vector of length 2**n
        offset: Lowest qubit of the register
        n_qubits: Total circuit width (defaults to offset + n)

    Returns:
        Circuit with 2**n - 1 controlled rotations
    """
    a = np.asarray(amplitudes)
    if np.iscomplexobj(a):
        if np.max(np.abs(a.imag)) > 1e-12:
            raise ConfigurationError("tree loader takes real amplitudes")
        a = a.real
    width = int(round(math.log2(a.size)))
    if 2 ** width != a.size:
        raise DimensionError(f"amplitude count {a.size} is not a power of two")
    a = a / np.linalg.norm(a)
    circuit = Circuit(n_qubits if n_qubits is not None else offset + width)
    for level in range(width):
        target = width - 1 - level
        blocks = a.reshape(2 ** level, 2, 2 ** target)
        higher = tuple(range(target + 1, width))
        for prefix in range(2 ** level):
            left, right = blocks[prefix, 0], blocks[prefix, 1]
            if target == 0:
                phi = math.atan2(right[0], left[0])
            else:
                phi = math.atan2(np.linalg.norm(right), np.linalg.norm(left))
            flips = [offset + q for i, q in enumerate(higher) if not (prefix >> i) & 1]
            for q in flips:
                circuit.append(Gate(GateKind.PAULI_X, targets=(q,)))
            circuit.append(Gate(
                GateKind.RY,
                targets=(offset + target,),
                controls=tuple(offset + q for q in higher),
                theta=-2.0 * phi,
            ))
            for q in flips:
                circuit.append(Gate(GateKind.PAULI_X, targets=(q,)))
    return circuit


def loader_report(n_x: int) -> Dict[str, int]:
    """Gate census of the exact chi_0 loader, whose depth grows as n_x^2 2^n_x"""
    if n_x > MAX_LOADER_NX:
        raise DimensionError(f"exact Gaussian loader limited to n_x <= {MAX_LOADER_NX}, got {n_x}")
    circuit = loader_circuit(gaussian_amplitudes(n_x))
    report = dict(circuit.census())
    report["gates"] = len(circuit)
    report["depth"] = circuit.depth()
    report["controlled_rotations"] = 2 ** n_x - 1
    report["depth_bound"] = n_x * n_x * 2 ** n_x
    logger.info("Gaussian loader report", n_x=n_x, gates=report["gates"])
    return report


def prepare_fermion_product(layout: QubitLayout, occupied: Iterable[int]) -> Circuit:
    """PauliX on every occupied orbital's qubit"""
    orbitals = list(occupied)
    if len(set(orbitals)) != len(orbitals):
        raise ConfigurationError(f"occupied orbitals repeat: {orbitals}")
    circuit = Circuit(layout.n_qubits)
    for orbital in sorted(orbitals):
        circuit.append(Gate(GateKind.PAULI_X, targets=(layout.fermion_qubit(orbital),)))
    return circuit


def product_state(
    layout: QubitLayout,
    fermion: np.ndarray,
    registers: Sequence[np.ndarray],
) -> StateVector:
    """
    Tensor product of a fermion-register vector and one vector per oscillator

    Ancillas start in |0>. The layout must place fermions lowest, then the
    registers in site order.
    """
    if len(registers) != layout.n_oscillators:
        raise LayoutError(f"need {layout.n_oscillators} register vectors, got {len(registers)}")
    expected = layout.n_orbitals
    for register in layout.boson_registers:
        if register.low != expected:
            raise LayoutError("product_state needs the standard layout order")
        expected += register.width
    fermion = np.asarray(fermion, dtype=complex)
    if fermion.size != 2 ** layout.n_orbitals:
        raise DimensionError(f"fermion vector has {fermion.size} entries, expected {2 ** layout.n_orbitals}")
    ancillas = np.zeros(2 ** len(layout.ancilla_qubits), dtype=complex)
    ancillas[0] = 1.0
    factors = [ancillas] + [np.asarray(v, dtype=complex) for v in reversed(registers)] + [fermion]
    amplitudes = functools.reduce(np.kron, factors)
    return StateVector(layout.n_qubits, amplitudes, layout=layout).normalize()
