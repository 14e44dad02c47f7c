import json
from collections import Counter
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Union

from fermion_boson_sim.core.errors import LayoutError
from fermion_boson_sim.engine.gates import Gate, GateKind


class Circuit:
    """Ordered gate list over n_qubits with a classically tracked phase"""

    def __init__(self, n_qubits: int, gates: Iterable[Gate] = (), classical_phase: float = 0.0):
        self.n_qubits = n_qubits
        self.gates: List[Gate] = []
        self.classical_phase = float(classical_phase)
        for gate in gates:
            self.append(gate)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def append(self, gate: Gate) -> "Circuit":
        for q in gate.qubits:
            if not 0 <= q < self.n_qubits:
                raise LayoutError(f"{gate.label} touches qubit {q} outside {self.n_qubits}-qubit circuit")
        self.gates.append(gate)
        return self

    def extend(self, other: Union["Circuit", Iterable[Gate]]) -> "Circuit":
        """Append gates; a Circuit also contributes its classical phase"""
        if isinstance(other, Circuit):
            for gate in other.gates:
                self.append(gate)
            self.classical_phase += other.classical_phase
        else:
            for gate in other:
                self.append(gate)
        return self

    def add_phase(self, theta: float) -> "Circuit":
        self.classical_phase += theta
        return self

    def inverse(self) -> "Circuit":
        return Circuit(
            self.n_qubits,
            [gate.adjoint() for gate in reversed(self.gates)],
            -self.classical_phase,
        )

    def copy(self) -> "Circuit":
        return Circuit(self.n_qubits, self.gates, self.classical_phase)

    def census(self) -> Dict[str, int]:
        """Gate count by label, sorted by label"""
        counts = Counter(gate.label for gate in self.gates)
        return dict(sorted(counts.items()))

    def depth(self) -> int:
        """Greedy layering depth; GlobalPhase gates take no layer"""
        level: Dict[int, int] = {}
        depth = 0
        for gate in self.gates:
            if gate.kind == GateKind.GLOBAL_PHASE and not gate.controls:
                continue
            layer = max((level.get(q, 0) for q in gate.qubits), default=0) + 1
            for q in gate.qubits:
                level[q] = layer
            depth = max(depth, layer)
        return depth

    def to_jsonl(self) -> str:
        """One JSON object per gate, newline terminated"""
        return "".join(json.dumps(gate.describe(), sort_keys=True) + "\n" for gate in self.gates)

    def dump(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_jsonl())
