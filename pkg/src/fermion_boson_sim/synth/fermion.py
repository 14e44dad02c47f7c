"""Jordan-Wigner circuits for fermion and fermion-boson terms.

Orbital i sits on one qubit with |1> occupied and c_i = Z...Z sigma^-_i.
The hopping operator c_i^dag c_j + h.c. equals (X_i X_j + Y_i Y_j) Z_string / 2
and the current i(c_i^dag c_j - c_j^dag c_i) equals (Y_i X_j - X_i Y_j) Z_string / 2.
Each Pauli product is evolved by rotating its end points to Z, collecting the
string parity on q_j with a CNOT ladder and applying one Rz there.
"""
from typing import List, Sequence, Tuple

from fermion_boson_sim.core.errors import OrderingError, RouteError
from fermion_boson_sim.engine.circuit import Circuit
from fermion_boson_sim.engine.gates import Gate, GateKind, cnot
from fermion_boson_sim.engine.layout import QubitLayout
from fermion_boson_sim.synth.boson import momentum_sandwich
from fermion_boson_sim.synth.polynomial import LinearForm, momentum_form, number_form, phase_polynomial, position_form

# (basis on q_i, basis on q_j, sign of the block)
HOP_BLOCKS: Tuple[Tuple[str, str, int], ...] = (("X", "X", 1), ("Y", "Y", 1))
CURRENT_BLOCKS: Tuple[Tuple[str, str, int], ...] = (("Y", "X", 1), ("X", "Y", -1))

BosonAngle = Tuple[int, float]


def synth_density(layout: QubitLayout, orbital: int, theta: float) -> Circuit:
    """exp(-i theta n_i)"""
    return phase_polynomial([number_form(layout.fermion_qubit(orbital))], theta, layout.n_qubits)


def _density_boson(layout: QubitLayout, orbital: int, form: LinearForm, theta: float) -> Circuit:
    return phase_polynomial([number_form(layout.fermion_qubit(orbital)), form], theta, layout.n_qubits)


def synth_density_X(layout: QubitLayout, orbital: int, site: int, theta: float) -> Circuit:
    """exp(-i theta n_i x_n): n CPhase onto the register plus one fermion PhaseShift"""
    return _density_boson(layout, orbital, position_form(layout.register(site)), theta)


def synth_density_P(layout: QubitLayout, orbital: int, site: int, theta: float) -> Circuit:
    core = _density_boson(layout, orbital, momentum_form(layout.register(site)), theta)
    return momentum_sandwich(layout, [site], core)


def _basis_in(qubit: int, basis: str) -> Gate:
    if basis == "X":
        return Gate(GateKind.HADAMARD, targets=(qubit,), conjugating=True)
    return Gate(GateKind.RX_HALF_PI, targets=(qubit,), dagger=True, conjugating=True)


def _basis_out(qubit: int, basis: str) -> Gate:
    if basis == "X":
        return Gate(GateKind.HADAMARD, targets=(qubit,), conjugating=True)
    return Gate(GateKind.RX_HALF_PI, targets=(qubit,), dagger=False, conjugating=True)


def _central_rotation(
    layout: QubitLayout,
    pivot: int,
    sign: int,
    theta0: float,
    boson_angles: Sequence[BosonAngle],
    momentum: bool,
) -> List[Gate]:
    """
    Rz(-sign * A) on the pivot with A = theta0 + sum_m theta_m * f(site_m)

    f is the position (or momentum) eigenvalue; each register bit contributes
    a boson-controlled Rz and the offsets fold into one uncontrolled Rz.
    """
    constant = theta0
    gates: List[Gate] = []
    for site, angle in boson_angles:
        register = layout.register(site)
        form = momentum_form(register) if momentum else position_form(register)
        constant += angle * form.scale * form.offset
        for qubit, weight in zip(form.qubits, form.weights):
            gates.append(Gate(
                GateKind.RZ,
                targets=(pivot,),
                controls=(qubit,),
                theta=-sign * angle * form.scale * weight,
            ))
    return [Gate(GateKind.RZ, targets=(pivot,), theta=-sign * constant)] + gates


def _pauli_string_block(
    layout: QubitLayout,
    i: int,
    j: int,
    block: Tuple[str, str, int],
    theta0: float,
    boson_angles: Sequence[BosonAngle],
    momentum: bool,
) -> Circuit:
    basis_i, basis_j, sign = block
    qi, qj = layout.fermion_qubit(i), layout.fermion_qubit(j)
    chain = list(layout.fermion_qubits[i:j + 1])
    ladder = [cnot(chain[k], chain[k + 1]) for k in range(len(chain) - 1)]
    circuit = Circuit(layout.n_qubits)
    circuit.append(_basis_in(qi, basis_i))
    circuit.append(_basis_in(qj, basis_j))
    circuit.extend(ladder)
    circuit.extend(_central_rotation(layout, qj, sign, theta0, boson_angles, momentum))
    circuit.extend(reversed(ladder))
    circuit.append(_basis_out(qi, basis_i))
    circuit.append(_basis_out(qj, basis_j))
    return circuit


def _two_orbital_circuit(
    layout: QubitLayout,
    i: int,
    j: int,
    blocks: Tuple[Tuple[str, str, int], ...],
    theta0: float,
    boson_angles: Sequence[BosonAngle],
    momentum: bool,
) -> Circuit:
    if i >= j:
        raise OrderingError(f"orbital pair must satisfy i < j, got ({i}, {j})")
    circuit = Circuit(layout.n_qubits)
    for block in blocks:
        circuit.extend(_pauli_string_block(layout, i, j, block, theta0, boson_angles, momentum))
    if momentum and boson_angles:
        return momentum_sandwich(layout, [site for site, _ in boson_angles], circuit)
    return circuit


def synth_hopping_X(
    layout: QubitLayout,
    i: int,
    j: int,
    boson_angles: Sequence[BosonAngle] = (),
    theta0: float = 0.0,
) -> Circuit:
    """
    exp(-i (theta0 + sum_m theta_m x_m)(c_i^dag c_j + h.c.))

    Args:
        layout: Qubit layout
        i: Lower orbital
        j: Upper orbital, i < j
        boson_angles: (site, theta_m) pairs; empty gives pure hopping
        theta0: Boson-independent angle

    Returns:
        Circuit
    """
    return _two_orbital_circuit(layout, i, j, HOP_BLOCKS, theta0, boson_angles, momentum=False)


def synth_current_X(layout: QubitLayout, i: int, j: int, site: int, theta: float) -> Circuit:
    """exp(-i theta i(c_i^dag c_j - c_j^dag c_i) x_n); second block carries the negated angle"""
    return _two_orbital_circuit(layout, i, j, CURRENT_BLOCKS, 0.0, [(site, theta)], momentum=False)


def synth_fermion_P_variants(
    layout: QubitLayout,
    kind: str,
    i: int,
    j: int,
    site: int,
    theta: float,
) -> Circuit:
    """HopP and CurP: the X circuits with momentum angles inside a QFT sandwich"""
    if kind not in ("HopP", "CurP"):
        raise RouteError(f"{kind} is not a fermion momentum variant")
    blocks = HOP_BLOCKS if kind == "HopP" else CURRENT_BLOCKS
    return _two_orbital_circuit(layout, i, j, blocks, 0.0, [(site, theta)], momentum=True)
