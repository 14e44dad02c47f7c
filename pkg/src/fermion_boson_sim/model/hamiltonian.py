import itertools
import math
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from fermion_boson_sim.core.errors import ModelError
from fermion_boson_sim.core.logging import get_logger
from fermion_boson_sim.schemas.hamiltonian_models import HamiltonianSpec, Term, TermKind

logger = get_logger(__name__)

HERMITIAN_TOL = 1e-12

# Creation (True) / annihilation (False) pattern of each boson interaction tensor
INTERACTION_PATTERNS: Dict[str, Tuple[bool, ...]] = {
    "U": (True, True, False),
    "V": (True, True, True),
    "T": (True, True, False, False),
    "W": (True, True, True, False),
    "Y": (True, True, True, True),
}


class HamiltonianBuilder:
    """Accumulates terms, merging repeats of the same operator"""

    def __init__(self, n_orbitals: int = 0, n_oscillators: int = 0):
        self.n_orbitals = n_orbitals
        self.n_oscillators = n_oscillators
        self.shift = 0.0
        self._terms: Dict[Tuple, Dict[str, Any]] = {}

    def add(
        self,
        kind: TermKind,
        coeff: float,
        sites: Sequence[int] = (),
        orbitals: Sequence[int] = (),
        **extra: Any,
    ) -> "HamiltonianBuilder":
        """Add coeff * O; zero coefficients are skipped"""
        if coeff == 0:
            return self
        key = (kind, tuple(sites), tuple(orbitals), tuple(sorted((k, repr(v)) for k, v in extra.items())))
        if key in self._terms:
            self._terms[key]["coeff"] += float(coeff)
        else:
            self._terms[key] = {
                "kind": kind,
                "coeff": float(coeff),
                "sites": tuple(sites),
                "orbitals": tuple(orbitals),
                **extra,
            }
        return self

    def add_shift(self, value: float) -> "HamiltonianBuilder":
        self.shift += float(value)
        return self

    def build(self, metadata: Optional[Dict[str, Any]] = None) -> HamiltonianSpec:
        try:
            terms = [Term(**fields) for fields in self._terms.values() if fields["coeff"] != 0]
            return HamiltonianSpec(
                n_orbitals=self.n_orbitals,
                n_oscillators=self.n_oscillators,
                terms=terms,
                shift=self.shift,
                metadata=metadata or {},
            )
        except ValidationError as e:
            logger.error("Invalid Hamiltonian", error=str(e))
            raise ModelError(str(e)) from e


def coupling_for_alpha(alpha: float, t: float = 1.0, omega: float = 1.0) -> float:
    """g with alpha = g^2 / (2 omega^2 t)"""
    if alpha < 0 or t <= 0 or omega <= 0:
        raise ModelError(f"need alpha >= 0, t > 0, omega > 0; got alpha={alpha}, t={t}, omega={omega}")
    return omega * math.sqrt(2.0 * alpha * t)


def holstein(
    t: float,
    g: float,
    omega: float,
    sites: int = 2,
    periodic: bool = True,
) -> HamiltonianSpec:
    """
    Single-band Holstein chain in X/P form

    H = -t sum_<ij> (c_i^dag c_j + h.c.) + sum_i (P_i^2 + omega^2 X_i^2) / 2 + g sum_i n_i X_i

    Args:
        t: Hopping
        g: Electron-phonon coupling
        omega: Phonon frequency
        sites: Site count, >= 2
        periodic: Close the ring (only adds a bond for more than two sites)

    Returns:
        HamiltonianSpec with one orbital and one oscillator per site
    """
    if sites < 2:
        raise ModelError(f"Holstein chain needs at least 2 sites, got {sites}")
    if omega <= 0:
        raise ModelError(f"omega must be positive, got {omega}")
    builder = HamiltonianBuilder(n_orbitals=sites, n_oscillators=sites)
    bonds = [(i, i + 1) for i in range(sites - 1)]
    if periodic and sites > 2:
        bonds.append((0, sites - 1))
    for i, j in bonds:
        builder.add(TermKind.HOP, -t, orbitals=(i, j))
    for i in range(sites):
        builder.add(TermKind.DENS_X, g, sites=(i,), orbitals=(i,))
    for i in range(sites):
        builder.add(TermKind.P2, 0.5, sites=(i,))
        builder.add(TermKind.X2, 0.5 * omega * omega, sites=(i,))
    alpha = g * g / (2.0 * omega * omega * t) if t else float("inf")
    return builder.build({
        "model": "holstein",
        "t": t,
        "g": g,
        "omega": omega,
        "alpha": alpha,
        "sites": sites,
        "periodic": periodic,
    })


def holstein_alpha(alpha: float, t: float = 1.0, omega: float = 1.0, sites: int = 2) -> HamiltonianSpec:
    return holstein(t, coupling_for_alpha(alpha, t, omega), omega, sites)


def free_phonons(omega: float, sites: int) -> HamiltonianSpec:
    """sum_i (P_i^2 + omega^2 X_i^2) / 2 on oscillators only"""
    if omega <= 0 or sites < 1:
        raise ModelError(f"need omega > 0 and sites >= 1, got omega={omega}, sites={sites}")
    builder = HamiltonianBuilder(n_oscillators=sites)
    for i in range(sites):
        builder.add(TermKind.P2, 0.5, sites=(i,))
        builder.add(TermKind.X2, 0.5 * omega * omega, sites=(i,))
    return builder.build({"model": "free_phonons", "omega": omega, "sites": sites})


def driven_oscillator(omega: float, g: float) -> HamiltonianSpec:
    """(P^2 + omega^2 X^2) / 2 + g X on one oscillator"""
    if omega <= 0:
        raise ModelError(f"omega must be positive, got {omega}")
    builder = HamiltonianBuilder(n_oscillators=1)
    builder.add(TermKind.P2, 0.5, sites=(0,))
    builder.add(TermKind.X2, 0.5 * omega * omega, sites=(0,))
    builder.add(TermKind.X, g, sites=(0,))
    return builder.build({"model": "driven_oscillator", "omega": omega, "g": g})


def _as_array(value: Any, shape: Tuple[int, ...], name: str) -> np.ndarray:
    array = np.zeros(shape, dtype=complex) if value is None else np.asarray(value, dtype=complex)
    if array.shape != shape:
        raise ModelError(f"{name} has shape {array.shape}, expected {shape}")
    if not np.all(np.isfinite(array)):
        raise ModelError(f"{name} has non-finite entries")
    return array


def from_second_quantized(
    xi: Any,
    zeta: Any = None,
    lam: Any = None,
    tensors: Optional[Mapping[str, Any]] = None,
    scales: Optional[Sequence[float]] = None,
    hopping: Any = None,
    coupling: Any = None,
    two_body: Any = None,
) -> HamiltonianSpec:
    """
    Rewrite a second-quantized fermion-boson Hamiltonian in X/P form

    With X = (b + b^dag)/sqrt(2l) and P = i sqrt(l/2)(b^dag - b) the inputs mean
        sum_mn xi_mn b_m^dag b_n + sum_n (zeta_n b_n^dag + h.c.)
        + sum_nm (lam_nm b_n^dag b_m^dag + h.c.)
        + sum over U, V, T, W, Y of the boson interaction products + h.c.
        + sum_ij t_ij c_i^dag c_j + sum_ijkl U_ijkl c_i^dag c_j^dag c_k c_l
        + sum_ijn (g_ijn c_i^dag c_j b_n^dag + h.c.)

    Args:
        xi: Hermitian (N, N) matrix
        zeta: Length-N linear drive
        lam: Symmetric (N, N) pairing matrix
        tensors: Mapping of "U", "V", "T", "W", "Y" to dense tensors; only
            all-distinct index tuples may be nonzero
        scales: l_n > 0 per oscillator; defaults to Re xi_nn
        hopping: Real symmetric (M, M) fermion hopping
        coupling: (M, M, N) fermion-boson couplings g_ijn
        two_body: (M, M, M, M) fermion interaction, stored only

    Returns:
        HamiltonianSpec whose shift collects the zero-point constants
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=complex))
    n_osc = xi.shape[0]
    if xi.shape != (n_osc, n_osc) or np.max(np.abs(xi - xi.conj().T), initial=0.0) > HERMITIAN_TOL:
        raise ModelError("xi must be a Hermitian square matrix")
    zeta = _as_array(zeta, (n_osc,), "zeta")
    lam = _as_array(lam, (n_osc, n_osc), "lambda")
    if np.max(np.abs(lam - lam.T), initial=0.0) > HERMITIAN_TOL:
        raise ModelError("lambda must be symmetric")
    l = np.asarray(scales if scales is not None else xi.diagonal().real, dtype=float)
    if l.shape != (n_osc,) or np.any(l <= 0):
        raise ModelError(f"scales l_n must be positive, got {l.tolist()}")

    n_orb = 0
    if hopping is not None:
        n_orb = np.atleast_2d(hopping).shape[0]
    elif coupling is not None:
        n_orb = np.asarray(coupling).shape[0]
    elif two_body is not None:
        n_orb = np.asarray(two_body).shape[0]
    builder = HamiltonianBuilder(n_orbitals=n_orb, n_oscillators=n_osc)

    for n in range(n_osc):
        a = xi[n, n].real
        builder.add(TermKind.P2, a / (2.0 * l[n]), sites=(n,))
        builder.add(TermKind.X2, a * l[n] / 2.0, sites=(n,))
        builder.add_shift(-a / 2.0)
    for m, n in itertools.combinations(range(n_osc), 2):
        a, b = xi[m, n].real, xi[m, n].imag
        root = math.sqrt(l[m] * l[n])
        builder.add(TermKind.XX, a * root, sites=(m, n))
        builder.add(TermKind.PP, a / root, sites=(m, n))
        builder.add(TermKind.XP_CROSS, b * math.sqrt(l[n] / l[m]), sites=(n, m))
        builder.add(TermKind.XP_CROSS, -b * math.sqrt(l[m] / l[n]), sites=(m, n))
    for n in range(n_osc):
        builder.add(TermKind.X, zeta[n].real * math.sqrt(2.0 * l[n]), sites=(n,))
        builder.add(TermKind.P, zeta[n].imag * math.sqrt(2.0 / l[n]), sites=(n,))

    for n in range(n_osc):
        a, b = lam[n, n].real, lam[n, n].imag
        builder.add(TermKind.X2, a * l[n], sites=(n,))
        builder.add(TermKind.P2, -a / l[n], sites=(n,))
        builder.add(TermKind.XP_SELF, b, sites=(n,), exponents=(1, 1))
    for n, m in itertools.combinations(range(n_osc), 2):
        a, b = lam[n, m].real, lam[n, m].imag
        root = math.sqrt(l[n] * l[m])
        builder.add(TermKind.XX, 2.0 * a * root, sites=(n, m))
        builder.add(TermKind.PP, -2.0 * a / root, sites=(n, m))
        builder.add(TermKind.XP_CROSS, 2.0 * b * math.sqrt(l[n] / l[m]), sites=(n, m))
        builder.add(TermKind.XP_CROSS, 2.0 * b * math.sqrt(l[m] / l[n]), sites=(m, n))

    for name, tensor in sorted((tensors or {}).items()):
        _add_interaction(builder, name, tensor, l)

    if hopping is not None:
        _add_hopping(builder, hopping)
    if coupling is not None:
        _add_coupling(builder, coupling, l, n_orb, n_osc)
    if two_body is not None:
        _add_two_body(builder, two_body, n_orb)

    return builder.build({"model": "second_quantized", "scales": l.tolist()})


def _add_interaction(builder: HamiltonianBuilder, name: str, tensor: Any, l: np.ndarray) -> None:
    if name not in INTERACTION_PATTERNS:
        raise ModelError(f"unknown interaction tensor {name}; expected one of {sorted(INTERACTION_PATTERNS)}")
    pattern = INTERACTION_PATTERNS[name]
    n_osc = len(l)
    tensor = _as_array(tensor, (n_osc,) * len(pattern), name)
    for index in zip(*np.nonzero(tensor)):
        index = tuple(int(k) for k in index)
        if len(set(index)) != len(index):
            raise ModelError(f"{name}{list(index)} repeats an oscillator; only distinct-site products are supported")
        value = tensor[index]
        # b^dag = alpha X - i beta P and b = alpha X + i beta P with alpha = sqrt(l/2), beta = 1/sqrt(2l)
        factors = []
        for site, creation in zip(index, pattern):
            alpha, beta = math.sqrt(l[site] / 2.0), 1.0 / math.sqrt(2.0 * l[site])
            factors.append((("X", alpha), ("P", (-1j if creation else 1j) * beta)))
        for choice in itertools.product(*factors):
            coefficient = value
            for _, c in choice:
                coefficient *= c
            letters = tuple(letter for letter, _ in choice)
            builder.add(TermKind.XK_PRODUCT, 2.0 * coefficient.real, sites=index, factors=letters)


def _add_hopping(builder: HamiltonianBuilder, hopping: Any) -> None:
    t = np.atleast_2d(np.asarray(hopping, dtype=complex))
    if np.max(np.abs(t.imag), initial=0.0) > HERMITIAN_TOL or np.max(np.abs(t - t.T), initial=0.0) > HERMITIAN_TOL:
        raise ModelError("hopping must be real symmetric")
    t = t.real
    for i in range(t.shape[0]):
        builder.add(TermKind.DENS, t[i, i], orbitals=(i,))
    for i, j in itertools.combinations(range(t.shape[0]), 2):
        builder.add(TermKind.HOP, t[i, j], orbitals=(i, j))


def _add_coupling(builder: HamiltonianBuilder, coupling: Any, l: np.ndarray, n_orb: int, n_osc: int) -> None:
    g = _as_array(coupling, (n_orb, n_orb, n_osc), "coupling")
    for i, j, n in itertools.product(range(n_orb), range(n_orb), range(n_osc)):
        a, b = g[i, j, n].real, g[i, j, n].imag
        if a == 0 and b == 0:
            continue
        if i == j:
            builder.add(TermKind.DENS_X, a * math.sqrt(2.0 * l[n]), sites=(n,), orbitals=(i,))
            builder.add(TermKind.DENS_P, b * math.sqrt(2.0 / l[n]), sites=(n,), orbitals=(i,))
            continue
        lo, hi = min(i, j), max(i, j)
        # c_j^dag c_i flips the current relative to c_i^dag c_j
        current_sign = 1.0 if i < j else -1.0
        builder.add(TermKind.HOP_X, a * math.sqrt(l[n] / 2.0), sites=(n,), orbitals=(lo, hi))
        builder.add(TermKind.HOP_P, b / math.sqrt(2.0 * l[n]), sites=(n,), orbitals=(lo, hi))
        builder.add(TermKind.CUR_X, current_sign * b * math.sqrt(l[n] / 2.0), sites=(n,), orbitals=(lo, hi))
        builder.add(TermKind.CUR_P, -current_sign * a / math.sqrt(2.0 * l[n]), sites=(n,), orbitals=(lo, hi))


def _add_two_body(builder: HamiltonianBuilder, two_body: Any, n_orb: int) -> None:
    u = _as_array(two_body, (n_orb,) * 4, "two_body")
    if np.max(np.abs(u.imag), initial=0.0) > HERMITIAN_TOL:
        raise ModelError("two-body tensor must be real")
    for index in zip(*np.nonzero(u)):
        index = tuple(int(k) for k in index)
        if len(set(index[:2])) < 2 or len(set(index[2:])) < 2:
            continue
        builder.add(TermKind.TWO_BODY, u[index].real, orbitals=index)


def load_model(path: Union[str, Path]) -> HamiltonianSpec:
    """Read a model JSON file"""
    try:
        return HamiltonianSpec.model_validate_json(Path(path).read_text())
    except ValidationError as e:
        logger.error("Invalid model file", path=str(path), error=str(e))
        raise ModelError(f"invalid model file {path}: {e}") from e


def save_model(spec: HamiltonianSpec, path: Union[str, Path]) -> None:
    Path(path).write_text(spec.to_json() + "\n")


def model_summary(spec: HamiltonianSpec) -> Dict[str, Any]:
    """Term counts by kind plus sizes, for logs and reports"""
    counts: Dict[str, int] = {}
    for term in spec.terms:
        counts[term.kind.value] = counts.get(term.kind.value, 0) + 1
    return {
        "orbitals": spec.n_orbitals,
        "oscillators": spec.n_oscillators,
        "terms": dict(sorted(counts.items())),
        "shift": spec.shift,
    }
