from collections import Counter
from typing import Dict, Optional

from fermion_boson_sim.core.logging import get_logger
from fermion_boson_sim.engine.circuit import Circuit
from fermion_boson_sim.engine.gates import GateKind
from fermion_boson_sim.engine.layout import QubitLayout
from fermion_boson_sim.model.trotter import trotter_plan
from fermion_boson_sim.schemas.hamiltonian_models import HamiltonianSpec
from fermion_boson_sim.schemas.run_models import ResourceReport
from fermion_boson_sim.synth.trotter import synth_term, synth_trotter_step

logger = get_logger(__name__)


def qft_lowering(width: int) -> Dict[str, int]:
    """Hadamard/controlled-phase network plus bit-reversal swaps"""
    return {"H": width, "CPhase": width * (width - 1) // 2, "SWAP": width // 2}


def multi_cphase_lowering(n_qubits: int) -> Dict[str, int]:
    """Toffoli ladder onto work qubits around one CPhase; n_qubits counts controls plus target"""
    if n_qubits <= 2:
        return {"CPhase": 1} if n_qubits == 2 else {"PhaseShift": 1}
    return {"Toffoli": 2 * (n_qubits - 2), "CPhase": 1}


def lowered_counts(circuit: Circuit) -> Dict[str, int]:
    """
    Gate census after lowering composite gates

    QFT blocks and MultiCPhase expand into one- and two-qubit gates plus
    Toffolis; a diagonal DenseUnitary on n qubits counts as 2**n MultiCPhase
    and a general one as 4**n elementary gates.
    """
    counts: Counter = Counter()
    for gate in circuit.gates:
        if gate.kind == GateKind.QFT_BLOCK:
            counts.update(qft_lowering(len(gate.targets)))
        elif gate.kind == GateKind.MULTI_CPHASE:
            counts.update(multi_cphase_lowering(len(gate.qubits)))
        elif gate.kind == GateKind.DENSE_UNITARY:
            width = len(gate.targets)
            if gate.is_diagonal:
                counts["MultiCPhase"] += 2 ** width
            else:
                counts["DenseElementary"] += 4 ** width
        elif gate.kind == GateKind.RZ and gate.controls:
            counts["CRz"] += 1
        elif gate.kind == GateKind.GLOBAL_PHASE and not gate.controls:
            continue
        else:
            counts[gate.label] += 1
    return dict(sorted(counts.items()))


def resource_report(spec: HamiltonianSpec, layout: QubitLayout, dt: Optional[float] = None) -> ResourceReport:
    """
    Per-kind and total gate counts of one Trotter step

    Args:
        spec: Hamiltonian
        layout: Qubit layout
        dt: Step size used for the angles (counts do not depend on it)

    Returns:
        ResourceReport
    """
    step_dt = 1.0 if dt is None else dt
    plan = trotter_plan(spec, step_dt, 1)
    per_kind_circuits: Dict[str, Circuit] = {}
    for term in plan.ordered_terms:
        circuit = per_kind_circuits.setdefault(term.kind.value, Circuit(layout.n_qubits))
        circuit.extend(synth_term(term, layout, plan.dt))
    per_kind = {
        kind: {"gates": len(circuit), "depth": circuit.depth(), **circuit.census()}
        for kind, circuit in sorted(per_kind_circuits.items())
    }
    step = synth_trotter_step(plan, layout)
    widths = {r.width for r in layout.boson_registers}
    report = ResourceReport(
        n_x=max(widths) if widths else 0,
        per_kind=per_kind,
        totals={"gates": len(step.circuit), "depth": step.depth_report, "qubits": layout.n_qubits},
        lowered=lowered_counts(step.circuit),
    )
    logger.info("Resource report", gates=report.totals["gates"], depth=report.totals["depth"])
    return report
