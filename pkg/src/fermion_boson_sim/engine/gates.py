import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from fermion_boson_sim.core.errors import LayoutError, NumericError

MAX_DENSE_WIDTH = 12
UNITARY_TOL = 1e-10


class GateKind(str, Enum):
    """Gate kinds understood by the state-vector engine"""
    PHASE_SHIFT = "PhaseShift"
    RZ = "Rz"
    RX = "Rx"
    RY = "Ry"
    HADAMARD = "Hadamard"
    RX_HALF_PI = "RxHalfPi"
    PAULI_X = "PauliX"
    PAULI_Y = "PauliY"
    PAULI_Z = "PauliZ"
    CPHASE = "CPhase"
    MULTI_CPHASE = "MultiCPhase"
    QFT_BLOCK = "QFTBlock"
    DENSE_UNITARY = "DenseUnitary"
    GLOBAL_PHASE = "GlobalPhase"


DIAGONAL_KINDS = {
    GateKind.PHASE_SHIFT,
    GateKind.RZ,
    GateKind.PAULI_Z,
    GateKind.CPHASE,
    GateKind.MULTI_CPHASE,
    GateKind.GLOBAL_PHASE,
}

_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0)
_RX_HALF_PI = np.array([[1, 1j], [1j, 1]], dtype=complex) / math.sqrt(2.0)
_PAULI = {
    GateKind.PAULI_X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.PAULI_Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.PAULI_Z: np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True, eq=False)
class Gate:
    """
    One gate on little-endian qubits.

    Phase conventions: PhaseShift(t) = diag(1, e^{-it}); R_s(t) = exp(i t s / 2)
    for s in {X, Y, Z}; GlobalPhase(t) multiplies the state by e^{-it}.
    Controls act on the all-ones subspace. Dense matrices index their targets
    little-endian in the order given.
    """
    kind: GateKind
    targets: Tuple[int, ...] = ()
    controls: Tuple[int, ...] = ()
    theta: float = 0.0
    matrix: Optional[np.ndarray] = field(default=None, repr=False)
    inverse: bool = False
    centered: bool = False
    dagger: bool = False
    conjugating: bool = False

    def __post_init__(self) -> None:
        qubits = self.targets + self.controls
        if len(set(qubits)) != len(qubits):
            raise LayoutError(f"{self.kind.value} repeats a qubit: {qubits}")
        if any(q < 0 for q in qubits):
            raise LayoutError(f"{self.kind.value} has a negative qubit index")
        if self.kind == GateKind.GLOBAL_PHASE:
            if self.targets:
                raise LayoutError("GlobalPhase takes no targets")
        elif self.kind == GateKind.QFT_BLOCK:
            if list(self.targets) != list(range(min(self.targets), min(self.targets) + len(self.targets))):
                raise LayoutError(f"QFTBlock span must be contiguous ascending, got {self.targets}")
        elif self.kind == GateKind.DENSE_UNITARY:
            self._check_dense()
        elif len(self.targets) != 1:
            raise LayoutError(f"{self.kind.value} acts on exactly one target")

    def _check_dense(self) -> None:
        width = len(self.targets)
        if not 1 <= width <= MAX_DENSE_WIDTH:
            raise LayoutError(f"DenseUnitary span width {width} outside [1, {MAX_DENSE_WIDTH}]")
        if self.matrix is None or self.matrix.shape != (2 ** width, 2 ** width):
            raise LayoutError(f"DenseUnitary needs a {2 ** width}x{2 ** width} matrix")
        defect = self.matrix.conj().T @ self.matrix - np.eye(2 ** width)
        if np.max(np.abs(defect)) > UNITARY_TOL:
            raise NumericError(f"DenseUnitary not unitary (defect {np.max(np.abs(defect)):.2e})")

    @property
    def qubits(self) -> Tuple[int, ...]:
        return self.targets + self.controls

    @property
    def label(self) -> str:
        if self.kind == GateKind.PAULI_X and len(self.controls) == 1:
            return "CNOT"
        return self.kind.value

    @property
    def is_diagonal(self) -> bool:
        if self.kind in DIAGONAL_KINDS:
            return True
        if self.kind == GateKind.DENSE_UNITARY:
            return bool(np.count_nonzero(self.matrix - np.diag(np.diag(self.matrix))) == 0)
        return False

    def single_qubit_matrix(self) -> np.ndarray:
        """2x2 matrix of a one-target gate"""
        t = self.theta
        if self.kind in (GateKind.PHASE_SHIFT, GateKind.CPHASE, GateKind.MULTI_CPHASE):
            return np.diag([1.0, np.exp(-1j * t)]).astype(complex)
        if self.kind == GateKind.RZ:
            return np.diag([np.exp(0.5j * t), np.exp(-0.5j * t)])
        if self.kind == GateKind.RX:
            c, s = math.cos(t / 2), math.sin(t / 2)
            return np.array([[c, 1j * s], [1j * s, c]], dtype=complex)
        if self.kind == GateKind.RY:
            c, s = math.cos(t / 2), math.sin(t / 2)
            return np.array([[c, s], [-s, c]], dtype=complex)
        if self.kind == GateKind.HADAMARD:
            return _HADAMARD
        if self.kind == GateKind.RX_HALF_PI:
            return _RX_HALF_PI.conj().T if self.dagger else _RX_HALF_PI
        if self.kind in _PAULI:
            return _PAULI[self.kind]
        raise LayoutError(f"{self.kind.value} has no single-qubit matrix")

    def adjoint(self) -> "Gate":
        """Inverse gate"""
        if self.kind in (GateKind.HADAMARD, GateKind.PAULI_X, GateKind.PAULI_Y, GateKind.PAULI_Z):
            return self
        if self.kind == GateKind.RX_HALF_PI:
            return replace(self, dagger=not self.dagger)
        if self.kind == GateKind.QFT_BLOCK:
            return replace(self, inverse=not self.inverse)
        if self.kind == GateKind.DENSE_UNITARY:
            return replace(self, matrix=self.matrix.conj().T)
        return replace(self, theta=-self.theta)

    def with_controls(self, extra: Tuple[int, ...]) -> "Gate":
        """Copy controlled additionally on extra qubits"""
        if self.kind == GateKind.GLOBAL_PHASE:
            if not extra:
                return self
            target, rest = extra[0], tuple(extra[1:]) + self.controls
            kind = GateKind.PHASE_SHIFT if not rest else (
                GateKind.CPHASE if len(rest) == 1 else GateKind.MULTI_CPHASE
            )
            return Gate(kind, targets=(target,), controls=rest, theta=self.theta)
        controls = self.controls + tuple(extra)
        kind = self.kind
        if kind in (GateKind.PHASE_SHIFT, GateKind.CPHASE, GateKind.MULTI_CPHASE):
            kind = GateKind.PHASE_SHIFT if not controls else (
                GateKind.CPHASE if len(controls) == 1 else GateKind.MULTI_CPHASE
            )
        return replace(self, kind=kind, controls=controls, conjugating=False)

    def describe(self) -> dict:
        """Record used by the JSON-lines circuit dump"""
        record = {
            "kind": self.label,
            "targets": list(self.targets),
            "controls": list(self.controls),
            "theta": self.theta,
        }
        if self.kind == GateKind.QFT_BLOCK:
            record.update(inverse=self.inverse, centered=self.centered)
        if self.kind == GateKind.RX_HALF_PI:
            record["dagger"] = self.dagger
        return record


def phase_shift(qubit: int, theta: float, controls: Tuple[int, ...] = ()) -> Gate:
    """PhaseShift, CPhase or MultiCPhase depending on control count"""
    kind = GateKind.PHASE_SHIFT if not controls else (
        GateKind.CPHASE if len(controls) == 1 else GateKind.MULTI_CPHASE
    )
    return Gate(kind, targets=(qubit,), controls=tuple(controls), theta=theta)


def cnot(control: int, target: int) -> Gate:
    return Gate(GateKind.PAULI_X, targets=(target,), controls=(control,), conjugating=True)


def qft_block(span: Tuple[int, ...], inverse: bool = False, centered: bool = False) -> Gate:
    return Gate(GateKind.QFT_BLOCK, targets=tuple(span), inverse=inverse, centered=centered, conjugating=True)


def global_phase(theta: float) -> Gate:
    return Gate(GateKind.GLOBAL_PHASE, theta=theta)
