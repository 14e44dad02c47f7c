"""Compiled executor for repeated circuits.

Runs of diagonal gates collapse into one full-width phase vector, runs of
small non-diagonal gates collapse into one dense block, and QFT blocks keep
their FFT path. The result matches gate-by-gate application.
"""
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np

from fermion_boson_sim.core.logging import get_logger
from fermion_boson_sim.engine.circuit import Circuit
from fermion_boson_sim.engine.gates import Gate, GateKind
from fermion_boson_sim.engine.statevector import StateVector, circuit_unitary

logger = get_logger(__name__)

MAX_FUSED_WIDTH = 3


@dataclass(frozen=True)
class DiagonalOp:
    phases: np.ndarray


@dataclass(frozen=True)
class DenseOp:
    targets: Tuple[int, ...]
    matrix: np.ndarray


@dataclass(frozen=True)
class GateOp:
    gate: Gate


ProgramOp = Union[DiagonalOp, DenseOp, GateOp]


class Program:
    """Fused form of a circuit; run() mutates the state in place"""

    def __init__(self, n_qubits: int, ops: List[ProgramOp], phase: float, source_gates: int):
        self.n_qubits = n_qubits
        self.ops = ops
        self.phase = phase
        self.source_gates = source_gates

    def run(self, state: StateVector, repetitions: int = 1) -> StateVector:
        for _ in range(repetitions):
            for op in self.ops:
                if isinstance(op, DiagonalOp):
                    state._buffer *= op.phases[:, np.newaxis]
                elif isinstance(op, DenseOp):
                    state._apply_dense(op.targets, op.matrix)
                else:
                    state.apply(op.gate)
            state.global_phase += self.phase
        return state


def _diagonal_of(gates: List[Gate], n_qubits: int) -> Tuple[np.ndarray, float]:
    ones = StateVector(n_qubits, np.ones(2 ** n_qubits, dtype=complex))
    for gate in gates:
        ones.apply(gate)
    return ones.amplitudes.copy(), ones.global_phase


def _dense_of(gates: List[Gate], qubits: Tuple[int, ...]) -> np.ndarray:
    local = {q: i for i, q in enumerate(qubits)}
    remapped = Circuit(len(qubits))
    for gate in gates:
        remapped.append(Gate(
            gate.kind,
            targets=tuple(local[q] for q in gate.targets),
            controls=tuple(local[q] for q in gate.controls),
            theta=gate.theta,
            matrix=gate.matrix,
            inverse=gate.inverse,
            centered=gate.centered,
            dagger=gate.dagger,
        ))
    return circuit_unitary(remapped)


def compile_circuit(circuit: Circuit, max_fused_width: Optional[int] = None) -> Program:
    """
    Fuse a circuit into diagonal, dense-block and passthrough operations

    Args:
        circuit: Source circuit
        max_fused_width: Largest qubit count of a fused dense block

    Returns:
        Program including the circuit's classical phase
    """
    width_limit = max_fused_width or MAX_FUSED_WIDTH
    ops: List[ProgramOp] = []
    phase = circuit.classical_phase
    diagonal_run: List[Gate] = []
    dense_run: List[Gate] = []
    dense_qubits: List[int] = []

    def flush_diagonal() -> None:
        nonlocal phase
        if diagonal_run:
            phases, extra = _diagonal_of(diagonal_run, circuit.n_qubits)
            ops.append(DiagonalOp(phases))
            phase += extra
            diagonal_run.clear()

    def flush_dense() -> None:
        if dense_run:
            qubits = tuple(sorted(dense_qubits))
            ops.append(DenseOp(qubits, _dense_of(dense_run, qubits)))
            dense_run.clear()
            dense_qubits.clear()

    for gate in circuit.gates:
        if gate.is_diagonal:
            flush_dense()
            diagonal_run.append(gate)
            continue
        flush_diagonal()
        if gate.kind == GateKind.QFT_BLOCK or len(gate.qubits) > width_limit:
            flush_dense()
            ops.append(GateOp(gate))
            continue
        merged = set(dense_qubits) | set(gate.qubits)
        if len(merged) > width_limit:
            flush_dense()
            merged = set(gate.qubits)
        dense_run.append(gate)
        dense_qubits[:] = sorted(merged)
    flush_diagonal()
    flush_dense()

    logger.debug("Compiled circuit", gates=len(circuit), ops=len(ops), n_qubits=circuit.n_qubits)
    return Program(circuit.n_qubits, ops, phase, len(circuit))
