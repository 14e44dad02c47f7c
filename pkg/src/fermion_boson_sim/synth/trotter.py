from dataclasses import dataclass, field
from typing import Dict, List

from fermion_boson_sim.core.errors import RouteError, UnsupportedFeatureError
from fermion_boson_sim.core.logging import get_logger
from fermion_boson_sim.engine.circuit import Circuit
from fermion_boson_sim.engine.gates import Gate, GateKind
from fermion_boson_sim.engine.layout import QubitLayout
from fermion_boson_sim.model.trotter import TrotterPlan
from fermion_boson_sim.schemas.hamiltonian_models import Term, TermKind
from fermion_boson_sim.synth import boson, fermion

logger = get_logger(__name__)


@dataclass
class SynthesizedStep:
    """One Trotter sweep as a circuit plus its tracked phase and reports"""
    circuit: Circuit
    gate_count_report: Dict[str, int] = field(default_factory=dict)
    depth_report: int = 0

    @property
    def classical_phase(self) -> float:
        return self.circuit.classical_phase


def synth_term(term: Term, layout: QubitLayout, dt: float) -> Circuit:
    """
    Circuit for exp(-i coeff dt O) of one term

    Args:
        term: Hamiltonian term
        layout: Qubit layout
        dt: Time step

    Returns:
        Circuit including the term's classical phase
    """
    theta = term.coeff * dt
    kind = term.kind
    sites, orbitals = term.sites, term.orbitals
    if kind == TermKind.X:
        return boson.synth_X(layout, sites[0], theta)
    if kind == TermKind.X2:
        return boson.synth_X2(layout, sites[0], theta)
    if kind == TermKind.XX:
        return boson.synth_XX(layout, sites[0], sites[1], theta)
    if kind in (TermKind.P, TermKind.P2, TermKind.PP, TermKind.XP_CROSS):
        return boson.synth_momentum_variants(layout, kind.value, sites, theta)
    if kind == TermKind.XP_SELF:
        u, v = term.exponents
        return boson.synth_xp_self(layout, sites[0], u, v, theta)
    if kind == TermKind.XK_PRODUCT:
        return boson.synth_boson_product(layout, sites, term.factors, theta)
    if kind == TermKind.DENS:
        return fermion.synth_density(layout, orbitals[0], theta)
    if kind == TermKind.DENS_X:
        return fermion.synth_density_X(layout, orbitals[0], sites[0], theta)
    if kind == TermKind.DENS_P:
        return fermion.synth_density_P(layout, orbitals[0], sites[0], theta)
    if kind == TermKind.HOP:
        return fermion.synth_hopping_X(layout, orbitals[0], orbitals[1], (), theta)
    if kind == TermKind.HOP_X:
        return fermion.synth_hopping_X(layout, orbitals[0], orbitals[1], [(sites[0], theta)])
    if kind == TermKind.HOP_MULTI_X:
        angles = [(site, weight * dt) for site, weight in zip(sites, term.weights)]
        return fermion.synth_hopping_X(layout, orbitals[0], orbitals[1], angles, theta)
    if kind == TermKind.CUR_X:
        return fermion.synth_current_X(layout, orbitals[0], orbitals[1], sites[0], theta)
    if kind in (TermKind.HOP_P, TermKind.CUR_P):
        return fermion.synth_fermion_P_variants(layout, kind.value, orbitals[0], orbitals[1], sites[0], theta)
    if kind == TermKind.TWO_BODY:
        raise UnsupportedFeatureError("two-body fermion terms have no circuit realization")
    raise RouteError(f"no synthesizer for {kind.value}")


def _is_inverse_qft(previous: Gate, gate: Gate) -> bool:
    return (
        previous.kind == GateKind.QFT_BLOCK
        and previous.targets == gate.targets
        and previous.centered == gate.centered
        and previous.inverse != gate.inverse
        and not previous.controls
        and not gate.controls
    )


def cancel_qft_pairs(circuit: Circuit) -> Circuit:
    """
    Drop QFT/inverse-QFT pairs with nothing in between on their span

    Returns:
        New circuit with the same classical phase
    """
    kept: List[Gate] = []
    removed = 0
    for gate in circuit.gates:
        if gate.kind == GateKind.QFT_BLOCK and not gate.controls:
            span = set(gate.targets)
            for position in range(len(kept) - 1, -1, -1):
                if span.intersection(kept[position].qubits):
                    if _is_inverse_qft(kept[position], gate):
                        del kept[position]
                        removed += 1
                        gate = None
                    break
            if gate is None:
                continue
        kept.append(gate)
    if removed:
        logger.debug("Cancelled QFT pairs", pairs=removed)
    return Circuit(circuit.n_qubits, kept, circuit.classical_phase)


def synth_trotter_step(plan: TrotterPlan, layout: QubitLayout) -> SynthesizedStep:
    """
    Concatenate one sweep of the plan and cancel adjacent QFT pairs

    Args:
        plan: Trotter plan
        layout: Qubit layout

    Returns:
        SynthesizedStep whose classical phase includes shift * dt
    """
    circuit = Circuit(layout.n_qubits)
    for term in plan.ordered_terms:
        try:
            circuit.extend(synth_term(term, layout, plan.dt))
        except UnsupportedFeatureError as e:
            logger.error("Term cannot be synthesized", kind=term.kind.value, error=str(e))
            raise
    circuit.add_phase(plan.shift * plan.dt)
    circuit = cancel_qft_pairs(circuit)
    return SynthesizedStep(
        circuit=circuit,
        gate_count_report=circuit.census(),
        depth_report=circuit.depth(),
    )


def trotter_circuit(plan: TrotterPlan, layout: QubitLayout) -> Circuit:
    """All plan.steps sweeps as one circuit"""
    step = synth_trotter_step(plan, layout).circuit
    full = Circuit(layout.n_qubits)
    for _ in range(plan.steps):
        full.extend(step)
    return cancel_qft_pairs(full)
