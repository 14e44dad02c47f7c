from typing import Dict, List, Sequence, Tuple

import numpy as np

from fermion_boson_sim.core.errors import ConfigurationError, RouteError
from fermion_boson_sim.core.logging import get_logger
from fermion_boson_sim.engine.circuit import Circuit
from fermion_boson_sim.engine.gates import Gate, GateKind, qft_block
from fermion_boson_sim.engine.layout import QubitLayout
from fermion_boson_sim.engine.statevector import qft_matrix
from fermion_boson_sim.oscillator.grid import make_grid
from fermion_boson_sim.synth.polynomial import LinearForm, momentum_form, phase_polynomial, position_form
from fermion_boson_sim.utils.cache import cached
from fermion_boson_sim.utils.linalg import hermitian_eigh

logger = get_logger(__name__)

MAX_XP_SELF_NX = 8
MAX_PRODUCT_ORDER = 4


def synth_X(layout: QubitLayout, site: int, theta: float) -> Circuit:
    """exp(-i theta x) as one PhaseShift per register qubit plus classical phase"""
    return phase_polynomial([position_form(layout.register(site))], theta, layout.n_qubits)


def synth_X2(layout: QubitLayout, site: int, theta: float) -> Circuit:
    """exp(-i theta x^2): n PhaseShift + n(n-1)/2 CPhase"""
    form = position_form(layout.register(site))
    return phase_polynomial([form, form], theta, layout.n_qubits)


def synth_XX(layout: QubitLayout, site_n: int, site_m: int, theta: float) -> Circuit:
    """exp(-i theta x_n x_m): 2n PhaseShift + n^2 CPhase across the two registers"""
    if site_n == site_m:
        raise RouteError(f"XX needs distinct sites, got {site_n} twice; use X2")
    forms = [position_form(layout.register(site_n)), position_form(layout.register(site_m))]
    return phase_polynomial(forms, theta, layout.n_qubits)


def momentum_sandwich(layout: QubitLayout, sites: Sequence[int], core: Circuit) -> Circuit:
    """
    Wrap a diagonal core in inverse and forward QFTs on the given registers

    exp(-i theta f(p)) = F exp(-i theta f(diag p_n)) F^dag with F the uncentered QFT,
    so the inverse transform comes first in circuit order.
    """
    spans = [layout.register(site).qubits for site in sorted(set(sites))]
    circuit = Circuit(layout.n_qubits)
    for span in spans:
        circuit.append(qft_block(span, inverse=True))
    circuit.extend(core)
    for span in reversed(spans):
        circuit.append(qft_block(span, inverse=False))
    return circuit


def synth_boson_product(
    layout: QubitLayout,
    sites: Sequence[int],
    kinds: Sequence[str],
    theta: float,
) -> Circuit:
    """
    exp(-i theta prod_k O_k) with O_k = x or p on sites[k]

    Args:
        layout: Qubit layout
        sites: Oscillator per factor, up to four factors
        kinds: "X" or "P" per factor
        theta: Angle

    Returns:
        Phase-polynomial circuit, QFT-sandwiched on momentum registers
    """
    if len(sites) != len(kinds) or not 1 <= len(sites) <= MAX_PRODUCT_ORDER:
        raise RouteError(f"product needs 1..{MAX_PRODUCT_ORDER} (site, kind) pairs")
    kind_of: Dict[int, str] = {}
    for site, kind in zip(sites, kinds):
        if kind not in ("X", "P"):
            raise RouteError(f"factor kind must be X or P, got {kind}")
        if kind_of.setdefault(site, kind) != kind:
            raise RouteError(f"site {site} mixes X and P; route XP_self terms to synth_xp_self")
    forms: List[LinearForm] = []
    for site, kind in zip(sites, kinds):
        register = layout.register(site)
        forms.append(position_form(register) if kind == "X" else momentum_form(register))
    core = phase_polynomial(forms, theta, layout.n_qubits)
    momentum_sites = [site for site, kind in kind_of.items() if kind == "P"]
    if not momentum_sites:
        return core
    return momentum_sandwich(layout, momentum_sites, core)


def synth_P(layout: QubitLayout, site: int, theta: float) -> Circuit:
    return synth_boson_product(layout, [site], ["P"], theta)


def synth_P2(layout: QubitLayout, site: int, theta: float) -> Circuit:
    return synth_boson_product(layout, [site, site], ["P", "P"], theta)


def synth_PP(layout: QubitLayout, site_n: int, site_m: int, theta: float) -> Circuit:
    if site_n == site_m:
        raise RouteError(f"PP needs distinct sites, got {site_n} twice; use P2")
    return synth_boson_product(layout, [site_n, site_m], ["P", "P"], theta)


def synth_XP_cross(layout: QubitLayout, site_x: int, site_p: int, theta: float) -> Circuit:
    """exp(-i theta x_n p_m); only the momentum-side register is transformed"""
    if site_x == site_p:
        raise RouteError("XP_cross needs distinct sites; use synth_xp_self")
    return synth_boson_product(layout, [site_x, site_p], ["X", "P"], theta)


def synth_momentum_variants(layout: QubitLayout, kind: str, sites: Sequence[int], theta: float) -> Circuit:
    """Dispatch P, P2, PP and XP_cross"""
    if kind == "P":
        return synth_P(layout, sites[0], theta)
    if kind == "P2":
        return synth_P2(layout, sites[0], theta)
    if kind == "PP":
        return synth_PP(layout, sites[0], sites[1], theta)
    if kind == "XP_cross":
        return synth_XP_cross(layout, sites[0], sites[1], theta)
    raise RouteError(f"{kind} is not a momentum variant")


def momentum_matrix(n_x: int) -> np.ndarray:
    """Dense p = F diag(p_n) F^dag on the uncentered Fourier grid"""
    grid = make_grid(n_x)
    fourier = qft_matrix(n_x)
    p = fourier @ np.diag(grid.momenta_uncentered) @ fourier.conj().T
    return 0.5 * (p + p.conj().T)


def xp_operator(n_x: int, u: int, v: int) -> np.ndarray:
    """x^u p^v + p^v x^u on one register"""
    grid = make_grid(n_x)
    x_power = np.diag(grid.positions.astype(complex) ** u)
    p_power = np.linalg.matrix_power(momentum_matrix(n_x), v)
    op = x_power @ p_power + p_power @ x_power
    return 0.5 * (op + op.conj().T)


@cached("xp_self_eigensystem", key_builder=lambda n_x, u, v: f"{n_x}:{u}:{v}")
def xp_eigensystem(n_x: int, u: int, v: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigenpairs of x^u p^v + p^v x^u

    Args:
        n_x: Register width, at most 8
        u: Position power, >= 1
        v: Momentum power, >= 1

    Returns:
        Ascending real eigenvalues and unitary eigenvector matrix
    """
    if not 2 <= n_x <= MAX_XP_SELF_NX:
        raise ConfigurationError(f"XP_self synthesis supports n_x <= {MAX_XP_SELF_NX}, got {n_x}")
    if u < 1 or v < 1:
        raise ConfigurationError(f"XP_self exponents must be >= 1, got ({u}, {v})")
    values, vectors = hermitian_eigh(xp_operator(n_x, u, v))
    values.setflags(write=False)
    vectors.setflags(write=False)
    return values, vectors


def synth_xp_self(layout: QubitLayout, site: int, u: int, v: int, theta: float) -> Circuit:
    """
    exp(-i theta (x^u p^v + p^v x^u)) as V . diag(exp(-i theta E)) . V^dag

    The eigenbasis change is classical preprocessing; both basis-change blocks
    are flagged as conjugating so phase estimation can leave them uncontrolled.
    """
    register = layout.register(site)
    values, vectors = xp_eigensystem(register.width, u, v)
    span = register.qubits
    circuit = Circuit(layout.n_qubits)
    circuit.append(Gate(GateKind.DENSE_UNITARY, targets=span, matrix=vectors.conj().T, conjugating=True))
    circuit.append(Gate(GateKind.DENSE_UNITARY, targets=span, matrix=np.diag(np.exp(-1j * theta * values))))
    circuit.append(Gate(GateKind.DENSE_UNITARY, targets=span, matrix=np.array(vectors), conjugating=True))
    return circuit
