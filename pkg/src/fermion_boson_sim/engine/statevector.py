"""Amplitude-level state-vector kernel.

Amplitudes live in one flat complex buffer indexed little-endian: qubit q is
bit q of the index. A batch axis of width B lets the same kernel push B states
(for example the columns of an identity) through a circuit at once. In the
tensor view of shape (2,)*n + (B,) qubit q sits on axis n - 1 - q.
"""
import math
from typing import TYPE_CHECKING, Dict, Iterable, Optional, Sequence, Union

import numpy as np
import scipy.sparse

from fermion_boson_sim.core.config import settings
from fermion_boson_sim.core.errors import DimensionError, LayoutError
from fermion_boson_sim.core.logging import get_logger
from fermion_boson_sim.engine.gates import DIAGONAL_KINDS, Gate, GateKind, MAX_DENSE_WIDTH
from fermion_boson_sim.engine.layout import QubitLayout

if TYPE_CHECKING:
    from fermion_boson_sim.engine.circuit import Circuit

logger = get_logger(__name__)

Observable = Union[np.ndarray, scipy.sparse.spmatrix]


class StateVector:
    """Complex amplitudes over the full register plus a classically tracked phase"""

    def __init__(
        self,
        n_qubits: int,
        amplitudes: Optional[np.ndarray] = None,
        global_phase: float = 0.0,
        layout: Optional[QubitLayout] = None,
    ):
        """
        Initialize a state

        Args:
            n_qubits: Register size
            amplitudes: Array of length 2**n_qubits, or shape (2**n_qubits, B) for a batch;
                defaults to |0...0>
            global_phase: Phase t in the physical state e^{-it} * amplitudes
            layout: Optional layout used to validate QFT spans
        """
        if n_qubits < 0 or n_qubits > settings.MAX_QUBITS:
            raise LayoutError(f"n_qubits={n_qubits} outside [0, {settings.MAX_QUBITS}]")
        dim = 2 ** n_qubits
        if amplitudes is None:
            buffer = np.zeros((dim, 1), dtype=complex)
            buffer[0, 0] = 1.0
        else:
            buffer = np.array(amplitudes, dtype=complex, copy=True)
            if buffer.ndim == 1:
                buffer = buffer[:, np.newaxis]
            if buffer.ndim != 2 or buffer.shape[0] != dim:
                raise DimensionError(f"amplitudes shape {np.shape(amplitudes)} does not match {n_qubits} qubits")
            buffer = np.ascontiguousarray(buffer)
        self.n_qubits = n_qubits
        self.global_phase = float(global_phase)
        self.layout = layout
        self._buffer = buffer

    @classmethod
    def basis(cls, n_qubits: int, index: int, layout: Optional[QubitLayout] = None) -> "StateVector":
        if not 0 <= index < 2 ** n_qubits:
            raise LayoutError(f"basis index {index} out of range")
        amplitudes = np.zeros(2 ** n_qubits, dtype=complex)
        amplitudes[index] = 1.0
        return cls(n_qubits, amplitudes, layout=layout)

    @classmethod
    def identity_batch(cls, n_qubits: int) -> "StateVector":
        """All computational basis states as one batch; the result columns form a unitary"""
        if n_qubits > settings.MAX_DENSE_QUBITS:
            raise DimensionError(f"dense batch limited to {settings.MAX_DENSE_QUBITS} qubits")
        return cls(n_qubits, np.eye(2 ** n_qubits, dtype=complex))

    @property
    def batch(self) -> int:
        return self._buffer.shape[1]

    @property
    def amplitudes(self) -> np.ndarray:
        """Stored amplitudes (global phase not applied)"""
        return self._buffer[:, 0] if self.batch == 1 else self._buffer

    @property
    def buffer(self) -> np.ndarray:
        return self._buffer

    def physical(self) -> np.ndarray:
        """Amplitudes with the tracked global phase applied"""
        return np.exp(-1j * self.global_phase) * self.amplitudes

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self._buffer, self.global_phase, self.layout)

    def norm(self) -> Union[float, np.ndarray]:
        norms = np.linalg.norm(self._buffer, axis=0)
        return float(norms[0]) if self.batch == 1 else norms

    def normalize(self) -> "StateVector":
        norms = np.linalg.norm(self._buffer, axis=0)
        if np.any(norms == 0):
            raise DimensionError("cannot normalize a zero state")
        self._buffer /= norms[np.newaxis, :]
        return self

    def tensor(self) -> np.ndarray:
        return self._buffer.reshape((2,) * self.n_qubits + (self.batch,))

    def _axis(self, qubit: int) -> int:
        return self.n_qubits - 1 - qubit

    def _check(self, qubits: Iterable[int]) -> None:
        for q in qubits:
            if not 0 <= q < self.n_qubits:
                raise LayoutError(f"qubit {q} out of range for {self.n_qubits}-qubit state")

    def _controlled_index(self, controls: Sequence[int]) -> list:
        index = [slice(None)] * (self.n_qubits + 1)
        for c in controls:
            index[self._axis(c)] = slice(1, 2)
        return index

    def apply(self, gate: Gate) -> "StateVector":
        """Apply one gate in place and return self"""
        self._check(gate.qubits)
        if gate.kind == GateKind.GLOBAL_PHASE:
            if not gate.controls:
                self.global_phase += gate.theta
            else:
                self.tensor()[tuple(self._controlled_index(gate.controls))] *= np.exp(-1j * gate.theta)
            return self
        if gate.kind == GateKind.QFT_BLOCK:
            return self._apply_qft(gate)
        if gate.kind == GateKind.DENSE_UNITARY:
            return self._apply_dense(gate.targets, gate.matrix, gate.controls)
        matrix = gate.single_qubit_matrix()
        if gate.kind in DIAGONAL_KINDS:
            return self._apply_diagonal_1q(gate.targets[0], np.diag(matrix), gate.controls)
        return self._apply_1q(gate.targets[0], matrix, gate.controls)

    def _apply_diagonal_1q(self, target: int, diag: np.ndarray, controls: Sequence[int]) -> "StateVector":
        tensor = self.tensor()
        index = self._controlled_index(controls)
        axis = self._axis(target)
        for bit in (0, 1):
            if diag[bit] != 1.0:
                index[axis] = slice(bit, bit + 1)
                tensor[tuple(index)] *= diag[bit]
        return self

    def _apply_1q(self, target: int, matrix: np.ndarray, controls: Sequence[int]) -> "StateVector":
        tensor = self.tensor()
        index0 = self._controlled_index(controls)
        index1 = list(index0)
        axis = self._axis(target)
        index0[axis] = slice(0, 1)
        index1[axis] = slice(1, 2)
        a0 = tensor[tuple(index0)].copy()
        a1 = tensor[tuple(index1)].copy()
        tensor[tuple(index0)] = matrix[0, 0] * a0 + matrix[0, 1] * a1
        tensor[tuple(index1)] = matrix[1, 0] * a0 + matrix[1, 1] * a1
        return self

    def _apply_dense(
        self,
        targets: Sequence[int],
        matrix: np.ndarray,
        controls: Sequence[int] = (),
    ) -> "StateVector":
        width = len(targets)
        if width > MAX_DENSE_WIDTH:
            raise LayoutError(f"dense span width {width} exceeds {MAX_DENSE_WIDTH}")
        sub = self.tensor()[tuple(self._controlled_index(controls))]
        source = [self._axis(t) for t in reversed(targets)]
        destination = list(range(sub.ndim - width - 1, sub.ndim - 1))
        moved = np.moveaxis(sub, source, destination)
        moved = np.moveaxis(moved, -1, -width - 1)
        shape = moved.shape
        flat = moved.reshape(-1, 2 ** width)
        result = (flat @ matrix.T).reshape(shape)
        result = np.moveaxis(result, -width - 1, -1)
        sub[...] = np.moveaxis(result, destination, source)
        return self

    def _apply_qft(self, gate: Gate) -> "StateVector":
        span = gate.targets
        if self.layout is not None and not self.layout.is_register_span(span):
            raise LayoutError(f"QFT span {span} is not a boson or ancilla register")
        if gate.centered and len(span) < 2:
            raise LayoutError("centered QFT needs at least two qubits")
        if gate.controls:
            return self._apply_dense(span, qft_matrix(len(span), gate.centered, gate.inverse), gate.controls)
        lo, width = span[0], len(span)
        n_points = 2 ** width
        view = self._buffer.reshape(2 ** (self.n_qubits - lo - width), n_points, 2 ** lo, self.batch)
        sign = (-1.0) ** np.arange(n_points)[np.newaxis, :, np.newaxis, np.newaxis]
        if gate.centered:
            view *= sign
        forward_unc = (not gate.inverse) != gate.centered
        view[...] = np.fft.ifft(view, axis=1, norm="ortho") if forward_unc else np.fft.fft(view, axis=1, norm="ortho")
        if gate.centered:
            view *= sign
        return self

    def apply_circuit(self, circuit: "Circuit", include_phase: bool = True) -> "StateVector":
        """Apply every gate of a circuit; optionally fold in its classical phase"""
        for gate in circuit.gates:
            self.apply(gate)
        if include_phase:
            self.global_phase += circuit.classical_phase
        return self

    def probabilities(self, qubits: Optional[Sequence[int]] = None) -> np.ndarray:
        """
        Marginal outcome distribution

        Args:
            qubits: Measured qubits; outcome index is sum of b_{q_i} 2**i

        Returns:
            Probability vector of length 2**len(qubits)
        """
        if self.batch != 1:
            raise DimensionError("probabilities need a single state")
        weights = np.abs(self._buffer[:, 0]) ** 2
        if qubits is None:
            return weights
        qubits = list(qubits)
        self._check(qubits)
        tensor = weights.reshape((2,) * self.n_qubits)
        keep = [self._axis(q) for q in reversed(qubits)]
        others = tuple(ax for ax in range(self.n_qubits) if ax not in keep)
        marginal = tensor.sum(axis=others) if others else tensor
        remaining = sorted(keep)
        marginal = np.transpose(marginal, [remaining.index(ax) for ax in keep])
        return marginal.reshape(-1)


def apply(state: StateVector, gate: Gate) -> StateVector:
    """Apply gate to state in place and return it"""
    return state.apply(gate)


def qft_matrix(width: int, centered: bool = False, inverse: bool = False) -> np.ndarray:
    """
    Dense register Fourier matrix

    Uncentered forward: F[n, j] = exp(+2 pi i j n / N) / sqrt(N).
    Centered forward: F[m, i] = exp(-i x_i p_m) / sqrt(N) on the symmetric grid.
    """
    n_points = 2 ** width
    k = np.arange(n_points)
    forward = np.exp(2j * math.pi * np.outer(k, k) / n_points) / math.sqrt(n_points)
    if centered:
        sign = (-1.0) ** k
        forward = sign[:, np.newaxis] * forward.conj() * sign[np.newaxis, :]
    return forward.conj().T if inverse else forward


def qft(state: StateVector, span: Sequence[int], centered: bool = False, inverse: bool = False) -> StateVector:
    """Register Fourier transform through the FFT"""
    return state.apply(Gate(GateKind.QFT_BLOCK, targets=tuple(span), centered=centered, inverse=inverse))


def expectation(state: StateVector, observable: Observable) -> float:
    """
    <psi|O|psi> for a full-width observable

    Args:
        state: Single state
        observable: 1-D diagonal, dense matrix or scipy sparse matrix of dimension 2**n

    Returns:
        Real part of the expectation value
    """
    psi = state.amplitudes
    dim = psi.shape[0]
    if psi.ndim != 1:
        raise DimensionError("expectation needs a single state")
    if scipy.sparse.issparse(observable):
        if observable.shape != (dim, dim):
            raise DimensionError(f"observable shape {observable.shape} does not match state dimension {dim}")
        value = np.vdot(psi, observable @ psi)
    else:
        observable = np.asarray(observable)
        if observable.ndim == 1 and observable.shape[0] == dim:
            value = np.vdot(psi, observable * psi)
        elif observable.shape == (dim, dim):
            value = np.vdot(psi, observable @ psi)
        else:
            raise DimensionError(f"observable shape {observable.shape} does not match state dimension {dim}")
    return float(value.real)


def local_expectation(state: StateVector, span: Sequence[int], operator: np.ndarray) -> float:
    """
    <psi|I (x) O (x) I|psi> for an operator on one contiguous span

    Args:
        state: Single state
        span: Contiguous ascending qubits
        operator: 1-D diagonal or square matrix of dimension 2**len(span)

    Returns:
        Real part of the expectation value
    """
    lo, width = span[0], len(span)
    n_points = 2 ** width
    operator = np.asarray(operator)
    if operator.shape not in ((n_points,), (n_points, n_points)):
        raise DimensionError(f"operator shape {operator.shape} does not match span width {width}")
    psi = state.amplitudes.reshape(2 ** (state.n_qubits - lo - width), n_points, 2 ** lo)
    if operator.ndim == 1:
        value = np.einsum("anb,n,anb->", psi.conj(), operator, psi)
    else:
        value = np.einsum("anb,nm,amb->", psi.conj(), operator, psi)
    return float(value.real)


def sample(state: StateVector, qubits: Sequence[int], shots: int, seed: int) -> Dict[int, int]:
    """
    Draw measurement outcomes from the marginal distribution

    Args:
        state: Single state
        qubits: Measured qubits
        shots: Number of draws, >= 1
        seed: Seed of the counter-based generator

    Returns:
        Outcome index -> count, ascending, zero counts omitted
    """
    if shots < 1:
        raise DimensionError(f"shots must be >= 1, got {shots}")
    probabilities = state.probabilities(qubits)
    return sample_distribution(probabilities, shots, seed)


def sample_distribution(probabilities: np.ndarray, shots: int, seed: int) -> Dict[int, int]:
    """Multinomial draw with a Philox generator"""
    weights = np.clip(np.asarray(probabilities, dtype=float), 0.0, None)
    weights = weights / weights.sum()
    rng = np.random.Generator(np.random.Philox(seed))
    counts = rng.multinomial(shots, weights)
    return {int(k): int(c) for k, c in enumerate(counts) if c}


def circuit_unitary(circuit: "Circuit", n_qubits: Optional[int] = None, include_phase: bool = True) -> np.ndarray:
    """
    Dense matrix of a circuit, columns U|k>

    Args:
        circuit: Circuit to expand
        n_qubits: Register size (defaults to circuit.n_qubits)
        include_phase: Fold the circuit's classical phase into the result

    Returns:
        Complex matrix of dimension 2**n_qubits
    """
    width = circuit.n_qubits if n_qubits is None else n_qubits
    batch = StateVector.identity_batch(width)
    batch.apply_circuit(circuit, include_phase=include_phase)
    return np.exp(-1j * batch.global_phase) * batch.buffer
