"""Exact diagonalization in a truncated Fock basis."""
import functools
import itertools
import math
import operator
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import scipy.sparse as sp

from fermion_boson_sim.core.config import settings
from fermion_boson_sim.core.errors import ConfigurationError, DimensionError
from fermion_boson_sim.core.logging import get_logger
from fermion_boson_sim.model.hamiltonian import INTERACTION_PATTERNS, coupling_for_alpha
from fermion_boson_sim.schemas.hamiltonian_models import HamiltonianSpec, TermKind
from fermion_boson_sim.schemas.run_models import GoldenRecord
from fermion_boson_sim.utils.linalg import hermitian_eigh
from fermion_boson_sim.workers.pool import ordered_map

logger = get_logger(__name__)

GOLDEN_ALPHAS = (0.25, 0.5, 1.0, 1.5, 2.0, 3.0)
GOLDEN_NPH = 45
GOLDEN_NPH_CHECK = 60


@dataclass(frozen=True)
class FockBasis:
    """One electron on a chain with per-site phonon cutoff n_ph"""
    n_sites: int
    n_ph: int

    @property
    def levels(self) -> int:
        return self.n_ph + 1

    @property
    def shape(self) -> tuple:
        return (self.n_sites,) + (self.levels,) * self.n_sites

    @property
    def dimension(self) -> int:
        return self.n_sites * self.levels ** self.n_sites

    def phonon_totals(self) -> np.ndarray:
        """Total phonon number of every basis state, flattened in C order"""
        grids = np.meshgrid(*([np.arange(self.levels)] * self.n_sites), indexing="ij")
        totals = sum(grids)
        return np.broadcast_to(totals, self.shape).reshape(-1)


@dataclass
class EDResult:
    basis: FockBasis
    eigenvalues: np.ndarray
    ground: np.ndarray
    z: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def ground_energy(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def quasiparticle_weight(self) -> float:
        return float(self.z[0])


def ladder(levels: int) -> sp.csr_matrix:
    """Truncated annihilation operator b"""
    return sp.diags(np.sqrt(np.arange(1, levels)), offsets=1, format="csr")


def holstein_fock_matrix(
    t: float,
    g: float,
    omega: float,
    sites: int = 2,
    n_ph: int = GOLDEN_NPH,
    periodic: bool = True,
) -> sp.csr_matrix:
    """
    One-electron Holstein Hamiltonian in the (site, n_0, n_1, ...) basis

    H = -t sum_<ij> |i><j| + sum_i omega (b_i^dag b_i + 1/2) + g sum_i |i><i| (b_i + b_i^dag)/sqrt(2 omega)
    """
    basis = FockBasis(sites, n_ph)
    levels = basis.levels
    b = ladder(levels)
    number = sp.diags(np.arange(levels, dtype=float), format="csr")
    position = (b + b.T) / math.sqrt(2.0 * omega)
    eye_b = sp.identity(levels, format="csr")

    def on_site(site: int, op: sp.csr_matrix) -> sp.csr_matrix:
        result = sp.identity(1, format="csr")
        for s in range(sites):
            result = sp.kron(result, op if s == site else eye_b, format="csr")
        return result

    boson_eye = sp.identity(levels ** sites, format="csr")
    hop = sp.lil_matrix((sites, sites))
    bonds = [(i, i + 1) for i in range(sites - 1)]
    if periodic and sites > 2:
        bonds.append((0, sites - 1))
    for i, j in bonds:
        hop[i, j] -= t
        hop[j, i] -= t
    matrix = sp.kron(hop.tocsr(), boson_eye, format="csr")
    phonons = omega * (sum(on_site(s, number) for s in range(sites)) + 0.5 * sites * boson_eye)
    matrix = matrix + sp.kron(sp.identity(sites, format="csr"), phonons, format="csr")
    for s in range(sites):
        projector = sp.csr_matrix(([1.0], ([s], [s])), shape=(sites, sites))
        matrix = matrix + g * sp.kron(projector, on_site(s, position), format="csr")
    return matrix.tocsr()


def phonon_marginals(basis: FockBasis, vector: np.ndarray) -> np.ndarray:
    """Z(n): weight of the state on total phonon number n"""
    weights = np.abs(np.asarray(vector).reshape(-1)) ** 2
    return np.bincount(basis.phonon_totals(), weights=weights, minlength=basis.n_sites * basis.n_ph + 1)


def ed_holstein(
    t: float,
    g: float,
    omega: float,
    sites: int = 2,
    n_ph: int = GOLDEN_NPH,
    k: int = 1,
) -> EDResult:
    """
    Lowest eigenpairs of the one-electron Holstein chain

    Args:
        t: Hopping
        g: Coupling
        omega: Phonon frequency
        sites: Chain length
        n_ph: Per-site phonon cutoff
        k: Number of eigenvalues kept

    Returns:
        EDResult with Z(n) of the ground state
    """
    if n_ph < 1:
        raise ConfigurationError(f"n_ph must be at least 1, got {n_ph}")
    basis = FockBasis(sites, n_ph)
    if basis.dimension > settings.MAX_FOCK_DIMENSION:
        raise DimensionError(f"Fock dimension {basis.dimension} exceeds {settings.MAX_FOCK_DIMENSION}")
    dense = holstein_fock_matrix(t, g, omega, sites, n_ph).toarray()
    values, vectors = hermitian_eigh(dense, subset_by_index=(0, min(k, basis.dimension) - 1))
    ground = vectors[:, 0]
    ground = ground * np.sign(ground[np.argmax(np.abs(ground))])
    z = phonon_marginals(basis, ground)
    logger.info("Holstein ED complete", sites=sites, n_ph=n_ph, g=g, energy=float(values[0]))
    return EDResult(basis=basis, eigenvalues=values, ground=ground, z=z)


def ed_zn(result: EDResult) -> np.ndarray:
    """Phonon-number distribution of the ground state"""
    return result.z


def golden_record(alpha: float, n_ph: int = GOLDEN_NPH, n_check: int = GOLDEN_NPH_CHECK) -> GoldenRecord:
    """ED at two cutoffs for one coupling, omega = t = 1"""
    g = coupling_for_alpha(alpha)
    primary = ed_holstein(1.0, g, 1.0, n_ph=n_ph)
    check = ed_holstein(1.0, g, 1.0, n_ph=n_check)
    return GoldenRecord(
        alpha=alpha,
        E0=primary.ground_energy,
        Z=primary.z.tolist(),
        nph=n_ph,
        E0_check=check.ground_energy,
        nph_check=n_check,
        delta_45_60=abs(primary.ground_energy - check.ground_energy),
    )


def generate_golden(
    alphas: Sequence[float] = GOLDEN_ALPHAS,
    n_ph: int = GOLDEN_NPH,
    n_check: int = GOLDEN_NPH_CHECK,
) -> List[GoldenRecord]:
    """Golden ED records over an alpha grid, in input order"""
    return ordered_map(lambda a: golden_record(a, n_ph, n_check), alphas, label="golden")


class FockOperators:
    """
    Fermion and boson operators on 2**M (x) (cutoff)**N

    Orbital i is bit i of the fermion index; oscillator 0 is the slowest
    boson factor.
    """

    def __init__(self, n_orbitals: int, n_oscillators: int, cutoff: int):
        self.n_orbitals = n_orbitals
        self.n_oscillators = n_oscillators
        self.cutoff = cutoff
        self.boson_dim = cutoff ** n_oscillators
        self.fermion_dim = 2 ** n_orbitals
        self.dimension = self.fermion_dim * self.boson_dim
        if self.dimension > settings.MAX_FOCK_DIMENSION:
            raise DimensionError(f"Fock dimension {self.dimension} exceeds {settings.MAX_FOCK_DIMENSION}")
        self.identity = sp.identity(self.dimension, dtype=complex, format="csr")
        self._b = [self._boson(n) for n in range(n_oscillators)]
        self._c = [self._fermion(i) for i in range(n_orbitals)]

    def _boson(self, site: int) -> sp.csr_matrix:
        result = sp.identity(self.fermion_dim, dtype=complex, format="csr")
        for s in range(self.n_oscillators):
            factor = ladder(self.cutoff) if s == site else sp.identity(self.cutoff, format="csr")
            result = sp.kron(result, factor, format="csr")
        return result

    def _fermion(self, orbital: int) -> sp.csr_matrix:
        z = sp.diags([1.0, -1.0], format="csr")
        lower = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
        result = sp.identity(1, format="csr")
        for q in range(self.n_orbitals - 1, -1, -1):
            if q == orbital:
                factor = lower
            elif q < orbital:
                factor = z
            else:
                factor = sp.identity(2, format="csr")
            result = sp.kron(result, factor, format="csr")
        return sp.kron(result, sp.identity(self.boson_dim, format="csr"), format="csr").astype(complex)

    def b(self, site: int) -> sp.csr_matrix:
        return self._b[site]

    def c(self, orbital: int) -> sp.csr_matrix:
        return self._c[orbital]

    def position(self, site: int, scale: float) -> sp.csr_matrix:
        b = self._b[site]
        return (b + b.conj().T) / math.sqrt(2.0 * scale)

    def momentum(self, site: int, scale: float) -> sp.csr_matrix:
        b = self._b[site]
        return 1j * math.sqrt(scale / 2.0) * (b.conj().T - b)

    def low_block(self, n_max: int) -> np.ndarray:
        """Flat indices whose per-site occupations are all <= n_max"""
        occupations = np.indices((self.cutoff,) * self.n_oscillators).reshape(self.n_oscillators, -1)
        keep = np.all(occupations <= n_max, axis=0)
        boson = np.nonzero(keep)[0]
        return (np.arange(self.fermion_dim)[:, None] * self.boson_dim + boson[None, :]).reshape(-1)


def second_quantized_matrix(
    ops: FockOperators,
    xi: np.ndarray,
    zeta: Optional[np.ndarray] = None,
    lam: Optional[np.ndarray] = None,
    tensors: Optional[Dict[str, np.ndarray]] = None,
    hopping: Optional[np.ndarray] = None,
    coupling: Optional[np.ndarray] = None,
    two_body: Optional[np.ndarray] = None,
) -> sp.csr_matrix:
    """Second-quantized Hamiltonian assembled directly from ladder operators"""
    n_osc, n_orb = ops.n_oscillators, ops.n_orbitals
    b = [ops.b(n) for n in range(n_osc)]
    bd = [x.conj().T for x in b]
    total = sp.csr_matrix((ops.dimension, ops.dimension), dtype=complex)
    for m, n in itertools.product(range(n_osc), repeat=2):
        total = total + xi[m, n] * (bd[m] @ b[n])
    if zeta is not None:
        for n in range(n_osc):
            op = zeta[n] * bd[n]
            total = total + op + op.conj().T
    if lam is not None:
        for n, m in itertools.product(range(n_osc), repeat=2):
            op = lam[n, m] * (bd[n] @ bd[m])
            total = total + op + op.conj().T
    for name, tensor in (tensors or {}).items():
        pattern = INTERACTION_PATTERNS[name]
        for index in zip(*np.nonzero(tensor)):
            op = tensor[index] * ops.identity
            for site, creation in zip(index, pattern):
                op = op @ (bd[site] if creation else b[site])
            total = total + op + op.conj().T
    c = [ops.c(i) for i in range(n_orb)]
    cd = [x.conj().T for x in c]
    if hopping is not None:
        for i, j in itertools.product(range(n_orb), repeat=2):
            total = total + hopping[i, j] * (cd[i] @ c[j])
    if coupling is not None:
        for i, j, n in itertools.product(range(n_orb), range(n_orb), range(n_osc)):
            op = coupling[i, j, n] * (cd[i] @ c[j] @ bd[n])
            total = total + op + op.conj().T
    if two_body is not None:
        for i, j, k, l in zip(*np.nonzero(two_body)):
            total = total + two_body[i, j, k, l] * (cd[i] @ cd[j] @ c[k] @ c[l])
    return total.tocsr()


def spec_fock_matrix(spec: HamiltonianSpec, ops: FockOperators, scales: Sequence[float]) -> sp.csr_matrix:
    """
    Rebuild an X/P-form Hamiltonian from ladder operators

    Products of truncated operators are exact only well below the cutoff;
    compare low_block entries.
    """
    x = [ops.position(n, scales[n]) for n in range(ops.n_oscillators)]
    p = [ops.momentum(n, scales[n]) for n in range(ops.n_oscillators)]
    c = [ops.c(i) for i in range(ops.n_orbitals)]
    total = spec.shift * ops.identity
    for term in spec.terms:
        s, o, kind = term.sites, term.orbitals, term.kind
        if kind == TermKind.X:
            op = x[s[0]]
        elif kind == TermKind.P:
            op = p[s[0]]
        elif kind == TermKind.X2:
            op = x[s[0]] @ x[s[0]]
        elif kind == TermKind.P2:
            op = p[s[0]] @ p[s[0]]
        elif kind == TermKind.XX:
            op = x[s[0]] @ x[s[1]]
        elif kind == TermKind.PP:
            op = p[s[0]] @ p[s[1]]
        elif kind == TermKind.XP_CROSS:
            op = x[s[0]] @ p[s[1]]
        elif kind == TermKind.XP_SELF:
            u, v = term.exponents
            xu = functools.reduce(operator.matmul, [x[s[0]]] * u)
            pv = functools.reduce(operator.matmul, [p[s[0]]] * v)
            op = xu @ pv + pv @ xu
        elif kind == TermKind.XK_PRODUCT:
            op = ops.identity
            for site, letter in zip(s, term.factors):
                op = op @ (x[site] if letter == "X" else p[site])
        elif kind == TermKind.TWO_BODY:
            i, j, k, l = o
            op = c[i].conj().T @ c[j].conj().T @ c[k] @ c[l]
        else:
            if kind in (TermKind.DENS, TermKind.DENS_X, TermKind.DENS_P):
                fermion = c[o[0]].conj().T @ c[o[0]]
            else:
                forward = c[o[0]].conj().T @ c[o[1]]
                if kind in (TermKind.CUR_X, TermKind.CUR_P):
                    fermion = 1j * (forward - forward.conj().T)
                else:
                    fermion = forward + forward.conj().T
            if kind == TermKind.HOP_MULTI_X:
                boson = sum(w * x[site] for site, w in zip(s, term.weights))
                total = total + fermion @ (term.coeff * ops.identity + boson)
                continue
            if kind in (TermKind.DENS_X, TermKind.HOP_X, TermKind.CUR_X):
                op = fermion @ x[s[0]]
            elif kind in (TermKind.DENS_P, TermKind.HOP_P, TermKind.CUR_P):
                op = fermion @ p[s[0]]
            else:
                op = fermion
        total = total + term.coeff * op
    return total.tocsr()
