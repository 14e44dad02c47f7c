"""Full-register matrices of discrete Hamiltonians.

These are the reference operators behind every circuit check: each term is
assembled as a sparse matrix over the qubit layout with the same bit order as
the state-vector engine, then exponentiated or diagonalized densely.
"""
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from fermion_boson_sim.core.config import settings
from fermion_boson_sim.core.errors import DimensionError, LayoutError, UnsupportedFeatureError
from fermion_boson_sim.core.logging import get_logger
from fermion_boson_sim.engine.layout import QubitLayout
from fermion_boson_sim.oscillator.grid import make_grid, sample_basis
from fermion_boson_sim.schemas.hamiltonian_models import HamiltonianSpec, Term, TermKind
from fermion_boson_sim.synth.boson import momentum_matrix, xp_operator
from fermion_boson_sim.utils.linalg import expm_hermitian, hermitian_eigh

logger = get_logger(__name__)

_SIGMA_MINUS = np.array([[0, 1], [0, 0]], dtype=complex)
_Z = np.diag([1.0, -1.0]).astype(complex)


def embed(operator: np.ndarray, low: int, width: int, n_qubits: int) -> sp.csr_matrix:
    """I (x) operator (x) I with operator on qubits low .. low + width - 1"""
    if low < 0 or low + width > n_qubits:
        raise LayoutError(f"span [{low}, {low + width}) outside {n_qubits} qubits")
    high = sp.identity(2 ** (n_qubits - low - width), dtype=complex, format="csr")
    lower = sp.identity(2 ** low, dtype=complex, format="csr")
    return sp.kron(high, sp.kron(sp.csr_matrix(operator), lower, format="csr"), format="csr")


def qubit_product(factors: Dict[int, np.ndarray], n_qubits: int) -> sp.csr_matrix:
    """Tensor product of single-qubit matrices keyed by qubit, identity elsewhere"""
    result = sp.identity(1, dtype=complex, format="csr")
    for qubit in range(n_qubits - 1, -1, -1):
        factor = factors.get(qubit)
        block = sp.identity(2, dtype=complex, format="csr") if factor is None else sp.csr_matrix(factor)
        result = sp.kron(result, block, format="csr")
    return result


def annihilator(layout: QubitLayout, orbital: int) -> sp.csr_matrix:
    """Jordan-Wigner c_i = Z_0 ... Z_{i-1} sigma^-_i"""
    qubit = layout.fermion_qubit(orbital)
    factors = {layout.fermion_qubit(k): _Z for k in range(orbital)}
    factors[qubit] = _SIGMA_MINUS
    return qubit_product(factors, layout.n_qubits)


def _register_op(layout: QubitLayout, site: int, local: np.ndarray) -> sp.csr_matrix:
    register = layout.register(site)
    return embed(local, register.low, register.width, layout.n_qubits)


def position_op(layout: QubitLayout, site: int, power: int = 1) -> sp.csr_matrix:
    grid = layout.grid(site)
    return _register_op(layout, site, np.diag(grid.positions.astype(complex) ** power))


def momentum_op(layout: QubitLayout, site: int, power: int = 1) -> sp.csr_matrix:
    local = np.linalg.matrix_power(momentum_matrix(layout.register(site).width), power)
    return _register_op(layout, site, local)


def _fermion_ops(layout: QubitLayout, term: Term) -> sp.csr_matrix:
    if term.kind in (TermKind.DENS, TermKind.DENS_X, TermKind.DENS_P):
        c = annihilator(layout, term.orbitals[0])
        return c.conj().T @ c
    i, j = term.orbitals
    ci, cj = annihilator(layout, i), annihilator(layout, j)
    forward = ci.conj().T @ cj
    if term.kind in (TermKind.CUR_X, TermKind.CUR_P):
        return 1j * (forward - forward.conj().T)
    return forward + forward.conj().T


def term_matrix(term: Term, layout: QubitLayout) -> sp.csr_matrix:
    """
    Sparse matrix of coeff * O for one term

    Args:
        term: Hamiltonian term
        layout: Qubit layout fixing the bit order

    Returns:
        Hermitian sparse matrix of dimension 2**layout.n_qubits
    """
    kind, sites = term.kind, term.sites
    if kind == TermKind.TWO_BODY:
        raise UnsupportedFeatureError("two-body fermion terms are not assembled on the grid")
    if kind == TermKind.X:
        op = position_op(layout, sites[0])
    elif kind == TermKind.X2:
        op = position_op(layout, sites[0], 2)
    elif kind == TermKind.P:
        op = momentum_op(layout, sites[0])
    elif kind == TermKind.P2:
        op = momentum_op(layout, sites[0], 2)
    elif kind == TermKind.XX:
        op = position_op(layout, sites[0]) @ position_op(layout, sites[1])
    elif kind == TermKind.PP:
        op = momentum_op(layout, sites[0]) @ momentum_op(layout, sites[1])
    elif kind == TermKind.XP_CROSS:
        op = position_op(layout, sites[0]) @ momentum_op(layout, sites[1])
    elif kind == TermKind.XP_SELF:
        u, v = term.exponents
        op = _register_op(layout, sites[0], xp_operator(layout.register(sites[0]).width, u, v))
    elif kind == TermKind.XK_PRODUCT:
        op = sp.identity(2 ** layout.n_qubits, dtype=complex, format="csr")
        for site, letter in zip(sites, term.factors):
            op = op @ (position_op(layout, site) if letter == "X" else momentum_op(layout, site))
    elif kind == TermKind.HOP_MULTI_X:
        boson = sum(w * position_op(layout, s) for s, w in zip(sites, term.weights))
        identity = sp.identity(2 ** layout.n_qubits, dtype=complex, format="csr")
        return _fermion_ops(layout, term) @ (term.coeff * identity + boson)
    else:
        op = _fermion_ops(layout, term)
        if kind in (TermKind.DENS_X, TermKind.HOP_X, TermKind.CUR_X):
            op = op @ position_op(layout, sites[0])
        elif kind in (TermKind.DENS_P, TermKind.HOP_P, TermKind.CUR_P):
            op = op @ momentum_op(layout, sites[0])
    return (term.coeff * op).tocsr()


def hamiltonian_matrix(spec: HamiltonianSpec, layout: QubitLayout, include_shift: bool = True) -> sp.csr_matrix:
    """Sum of term matrices plus shift * I"""
    dim = 2 ** layout.n_qubits
    total = sp.csr_matrix((dim, dim), dtype=complex)
    for term in spec.terms:
        total = total + term_matrix(term, layout)
    if include_shift and spec.shift:
        total = total + spec.shift * sp.identity(dim, dtype=complex, format="csr")
    return total.tocsr()


def dense_propagator(spec: HamiltonianSpec, layout: QubitLayout, t: float) -> np.ndarray:
    """
    exp(-i H t) by Hermitian eigendecomposition

    Args:
        spec: Hamiltonian
        layout: Layout with at most MAX_DENSE_QUBITS qubits
        t: Time

    Returns:
        Dense unitary
    """
    if layout.n_qubits > settings.MAX_DENSE_QUBITS:
        raise DimensionError(f"dense propagator limited to {settings.MAX_DENSE_QUBITS} qubits, got {layout.n_qubits}")
    matrix = hamiltonian_matrix(spec, layout).toarray()
    return expm_hermitian(0.5 * (matrix + matrix.conj().T), t)


def product_propagator(terms: Sequence[Term], layout: QubitLayout, dt: float, shift: float = 0.0) -> np.ndarray:
    """prod_m exp(-i H_m dt) in sweep order, the exact Trotter-step oracle"""
    if layout.n_qubits > settings.MAX_DENSE_QUBITS:
        raise DimensionError(f"dense propagator limited to {settings.MAX_DENSE_QUBITS} qubits")
    dim = 2 ** layout.n_qubits
    result = np.exp(-1j * shift * dt) * np.eye(dim, dtype=complex)
    for term in terms:
        result = expm_hermitian(term_matrix(term, layout).toarray(), dt) @ result
    return result


def fermion_sector(layout: QubitLayout, n_particles: int) -> np.ndarray:
    """Flat indices whose fermion bits hold n_particles ones"""
    index = np.arange(2 ** layout.n_qubits)
    count = np.zeros_like(index)
    for qubit in layout.fermion_qubits:
        count += (index >> qubit) & 1
    return index[count == n_particles]


def sector_eigensystem(
    spec: HamiltonianSpec,
    layout: QubitLayout,
    n_particles: int,
    k: Optional[int] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Lowest eigenpairs of H restricted to a fixed fermion number

    Args:
        spec: Hamiltonian (number conserving)
        layout: Layout without ancillas
        n_particles: Fermion number of the sector
        k: Number of eigenpairs (all when None)

    Returns:
        Eigenvalues, sector eigenvectors as columns, and the sector's flat indices
    """
    indices = fermion_sector(layout, n_particles)
    if indices.size > settings.MAX_SECTOR_DIMENSION:
        raise DimensionError(f"sector dimension {indices.size} exceeds {settings.MAX_SECTOR_DIMENSION}")
    block = hamiltonian_matrix(spec, layout)[indices][:, indices].toarray()
    block = 0.5 * (block + block.conj().T)
    if np.max(np.abs(block.imag), initial=0.0) == 0.0:
        block = block.real
    subset = None if k is None else (0, min(k, indices.size) - 1)
    logger.info("Sector eigensolve", dimension=int(indices.size), particles=n_particles)
    values, vectors = hermitian_eigh(block, subset_by_index=subset)
    return values, vectors, indices


def sector_state(layout: QubitLayout, indices: np.ndarray, vector: np.ndarray) -> np.ndarray:
    """Scatter a sector vector into a full-register amplitude array"""
    amplitudes = np.zeros(2 ** layout.n_qubits, dtype=complex)
    amplitudes[indices] = vector
    return amplitudes


def load_fock_state(fock_vector: np.ndarray, layout: QubitLayout, n_ph: int) -> np.ndarray:
    """
    Map a one-electron Fock-basis vector onto the grid registers

    The Fock index is (electron site, n_0, n_1, ...) in C order; each
    occupation n_s becomes the sampled Hermite-Gauss column chi_{n_s}.

    Args:
        fock_vector: Amplitudes of length sites * (n_ph + 1)**sites
        layout: Layout with one orbital and one register per site
        n_ph: Per-site occupation cutoff

    Returns:
        Normalized full-register amplitudes
    """
    sites = layout.n_oscillators
    if layout.n_orbitals != sites:
        raise LayoutError("Fock loading needs one orbital per oscillator")
    shape = (sites,) + (n_ph + 1,) * sites
    tensor = np.asarray(fock_vector, dtype=complex).reshape(shape)
    widths = {r.width for r in layout.boson_registers}
    if len(widths) != 1:
        raise LayoutError("Fock loading needs equal register widths")
    chi = sample_basis(make_grid(widths.pop()), n_ph + 1).chi
    n_points = chi.shape[0]
    amplitudes = np.zeros(2 ** layout.n_qubits, dtype=complex)
    for electron in range(sites):
        block = tensor[electron]
        for axis in range(sites):
            block = np.tensordot(block, chi, axes=([0], [1]))
        # axes now run site 0 .. S-1; the flat index has the highest site slowest
        block = np.transpose(block, list(range(sites - 1, -1, -1)))
        fermion_bit = 1 << layout.fermion_qubit(electron)
        lows = [r.low for r in layout.boson_registers]
        grid_index = np.zeros((n_points,) * sites, dtype=np.int64)
        for axis, site in enumerate(range(sites - 1, -1, -1)):
            shape_axis = [1] * sites
            shape_axis[axis] = n_points
            grid_index = grid_index + (np.arange(n_points).reshape(shape_axis) << lows[site])
        amplitudes[grid_index.reshape(-1) | fermion_bit] += block.reshape(-1)
    norm = np.linalg.norm(amplitudes)
    if norm == 0:
        raise DimensionError("loaded state vanished on the grid")
    return amplitudes / norm
