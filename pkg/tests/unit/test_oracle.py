import cmath
import itertools
import math

import numpy as np
import pytest
from scipy.linalg import expm
from scipy.special import comb

from fermion_boson_sim.core.errors import ConfigurationError, DimensionError, UnsupportedFeatureError
from fermion_boson_sim.engine.layout import QubitLayout
from fermion_boson_sim.model.hamiltonian import coupling_for_alpha, holstein_alpha
from fermion_boson_sim.oracle.coherent import (
    DisplacedState,
    constant_drive_zeta,
    cutoff_certified,
    cutoff_estimate,
    displaced_overlap,
    displacement_matrix,
    forced_circuit_overlap,
    forced_evolution,
    poisson_row,
    tail_mass,
)
from fermion_boson_sim.oracle.condensate import condensate_distribution, condensate_local_distribution, poisson_bound
from fermion_boson_sim.oracle.fock import (
    FockBasis,
    ed_holstein,
    golden_record,
    holstein_fock_matrix,
    ladder,
)
from fermion_boson_sim.oracle.operators import (
    annihilator,
    dense_propagator,
    fermion_sector,
    hamiltonian_matrix,
    load_fock_state,
    sector_eigensystem,
    sector_state,
    term_matrix,
)
from fermion_boson_sim.schemas.hamiltonian_models import Term, TermKind


def test_annihilators_anticommute():
    """
    Test canonical anticommutation of Jordan-Wigner operators
    """
    layout = QubitLayout.standard(3, 0, 2)
    ops = [annihilator(layout, i) for i in range(3)]
    for i, j in itertools.product(range(3), repeat=2):
        anti = (ops[i] @ ops[j].conj().T + ops[j].conj().T @ ops[i]).toarray()
        assert np.allclose(anti, np.eye(8) if i == j else 0.0)
        assert np.allclose((ops[i] @ ops[j] + ops[j] @ ops[i]).toarray(), 0.0)


def test_term_matrices_hermitian(mixed_layout):
    """
    Test Hermiticity of a current term, which carries an explicit i
    """
    term = Term(kind=TermKind.CUR_X, orbitals=(0, 2), sites=(1,), coeff=0.4)
    matrix = term_matrix(term, mixed_layout)
    assert abs(matrix - matrix.conj().T).max() < 1e-14
    with pytest.raises(UnsupportedFeatureError):
        term_matrix(Term(kind=TermKind.TWO_BODY, orbitals=(0, 1, 2, 1), coeff=1.0), mixed_layout)


def test_dense_propagator_unitary(small_holstein):
    """
    Test unitarity and the dimension guard of the dense propagator
    """
    layout = QubitLayout.standard(2, 2, 2)
    u = dense_propagator(small_holstein, layout, 0.7)
    assert np.allclose(u.conj().T @ u, np.eye(u.shape[0]))
    with pytest.raises(DimensionError):
        dense_propagator(small_holstein, QubitLayout.standard(2, 2, 6), 0.7)


def test_sector_eigensystem_matches_full(small_holstein):
    """
    Test that the one-electron sector holds the lowest one-electron levels
    """
    layout = QubitLayout.standard(2, 2, 2)
    values, vectors, indices = sector_eigensystem(small_holstein, layout, 1, k=4)
    assert indices.size == 2 * 16
    assert set(indices) == set(fermion_sector(layout, 1))
    block = hamiltonian_matrix(small_holstein, layout).toarray()[np.ix_(indices, indices)]
    full = np.linalg.eigvalsh(block)
    assert np.allclose(values, full[:4])
    assert np.allclose(vectors.conj().T @ vectors, np.eye(4))
    ground = sector_state(layout, indices, vectors[:, 0])
    h = hamiltonian_matrix(small_holstein, layout)
    assert np.allclose(h @ ground, values[0] * ground)


def test_ed_free_electron():
    """
    Test the uncoupled two-site chain: bonding level plus zero-point energy
    """
    result = ed_holstein(1.0, 0.0, 1.0, sites=2, n_ph=4)
    assert result.ground_energy == pytest.approx(0.0, abs=1e-12)
    assert result.quasiparticle_weight == pytest.approx(1.0)
    assert result.z.sum() == pytest.approx(1.0)


def test_fock_matrix_shape_and_symmetry():
    """
    Test the Holstein Fock matrix dimension and symmetry
    """
    basis = FockBasis(2, 5)
    matrix = holstein_fock_matrix(1.0, 0.8, 1.0, 2, 5)
    assert matrix.shape == (basis.dimension, basis.dimension)
    assert abs(matrix - matrix.T).max() < 1e-14
    assert np.allclose(ladder(4).toarray()[0, 1], 1.0)


def test_ed_guards():
    """
    Test cutoff and dimension checks
    """
    with pytest.raises(ConfigurationError):
        ed_holstein(1.0, 0.5, 1.0, n_ph=0)
    with pytest.raises(DimensionError):
        ed_holstein(1.0, 0.5, 1.0, sites=3, n_ph=40)


def test_ed_matches_grid_sector():
    """
    Test Fock-basis ED against the grid Hamiltonian at weak coupling
    """
    spec = holstein_alpha(0.25)
    layout = QubitLayout.standard(2, 2, 5)
    values, _, _ = sector_eigensystem(spec, layout, 1, k=1)
    result = ed_holstein(1.0, coupling_for_alpha(0.25), 1.0, n_ph=20)
    assert values[0] == pytest.approx(result.ground_energy, abs=1e-5)


def test_ed_energy_decreases_with_coupling():
    """
    Test the polaron binding trend and falling quasiparticle weight
    """
    weak = ed_holstein(1.0, coupling_for_alpha(0.5), 1.0, n_ph=20)
    strong = ed_holstein(1.0, coupling_for_alpha(2.0), 1.0, n_ph=20)
    assert strong.ground_energy < weak.ground_energy
    assert strong.quasiparticle_weight < weak.quasiparticle_weight


def test_golden_record_fields():
    """
    Test a reduced-cutoff golden record
    """
    record = golden_record(0.5, n_ph=10, n_check=14)
    assert record.nph == 10 and record.nph_check == 14
    assert record.delta_45_60 == pytest.approx(abs(record.E0 - record.E0_check))
    assert len(record.Z) == 2 * 10 + 1


def test_load_fock_state_uncoupled():
    """
    Test that the zero-phonon Fock state loads as Gaussians on the grid
    """
    result = ed_holstein(1.0, 0.0, 1.0, n_ph=3)
    layout = QubitLayout.standard(2, 2, 4)
    amplitudes = load_fock_state(result.ground, layout, 3)
    assert np.linalg.norm(amplitudes) == pytest.approx(1.0)
    assert set(np.nonzero(np.abs(amplitudes) > 1e-12)[0] & 3) == {1, 2}


def test_displaced_overlap_matches_expm():
    """
    Test the Laguerre closed form against a truncated matrix exponential
    """
    z = 0.7 - 0.4j
    cutoff = 80
    b = np.diag(np.sqrt(np.arange(1, cutoff)), 1)
    d = expm(z * b.T - np.conj(z) * b)
    assert np.max(np.abs(displacement_matrix(z, 12) - d[:12, :12])) < 1e-10


def test_poisson_rows():
    """
    Test |<n|z>|^2 against the coherent-state overlap
    """
    z = 1.3 + 0.5j
    for n in range(12):
        assert poisson_row(n, z) == pytest.approx(abs(displaced_overlap(n, 0, z)) ** 2, abs=1e-10)
    assert poisson_row(0, 0j) == 1.0


def test_displacement_unitary_block():
    """
    Test near-unitarity of a well-converged truncated block
    """
    d = displacement_matrix(0.5, 40)
    assert np.allclose(d[:10].conj() @ d[:10].T, np.eye(10), atol=1e-10)


def test_cutoff_estimate_and_certified():
    """
    Test the heuristic estimate against the scanned cutoff
    """
    assert cutoff_estimate(0, 1.0, 1e-6) == 7
    assert tail_mass(0, 1.0, 7) > 1e-6
    assert cutoff_certified(0, 1.0, 1e-6) == 9
    assert tail_mass(0, 1.0, 9) <= 1e-6
    with pytest.raises(ConfigurationError):
        cutoff_estimate(0, 1.0, 0.0)


def test_constant_drive_closed_forms():
    """
    Test zeta and beta for a constant drive
    """
    f, omega, t = 0.3 - 0.2j, 1.4, 2.1
    final, phases, history = forced_evolution(DisplacedState(0, 0j), lambda u: np.full(u.shape, f), omega, t)
    assert history.final_zeta == pytest.approx(constant_drive_zeta(f, omega, t), abs=1e-10)
    beta = abs(f) ** 2 * (omega * t - math.sin(omega * t)) / omega ** 2
    assert phases["beta"] == pytest.approx(beta, abs=1e-10)
    assert history.final_beta == phases["beta"]
    assert phases["total"] == pytest.approx(phases["gamma"] + beta - 0.5 * omega * t, abs=1e-10)


def test_forced_evolution_matches_propagator():
    """
    Test the closed-form orbit, phase included, against exp(-i H t) in a truncated Fock space
    """
    f, omega, t = 0.4 - 0.1j, 1.3, 0.9
    state = DisplacedState(1, 0.3 + 0.2j)
    final, phases, _ = forced_evolution(state, lambda u: np.full(u.shape, f), omega, t)
    cutoff = 70
    b = np.diag(np.sqrt(np.arange(1, cutoff)), 1).astype(complex)
    h = omega * (b.T @ b + 0.5 * np.eye(cutoff)) + f * b + np.conj(f) * b.T
    evolved = expm(-1j * h * t) @ state.amplitudes(cutoff)
    expected = cmath.exp(1j * phases["total"]) * final.amplitudes(30)
    assert np.max(np.abs(evolved[:30] - expected)) < 1e-8


def test_forced_evolution_rejects_odd_panels():
    """
    Test the Simpson panel requirement
    """
    with pytest.raises(ConfigurationError):
        forced_evolution(DisplacedState(0, 0j), lambda u: u, 1.0, 1.0, panels=7)


def test_forced_circuit_overlap():
    """
    Test the Trotterized grid circuit against the analytic displaced state
    """
    assert forced_circuit_overlap(g=0.5, t=1.0, n_x=6, steps=256) >= 1 - 1e-3


def _brute_force_condensate(n):
    weights = np.zeros(n + 1)
    # stars and bars: every occupation tuple of n bosons on n sites
    for bars in itertools.combinations(range(2 * n - 1), n - 1):
        edges = (-1,) + bars + (2 * n - 1,)
        occupations = [edges[k + 1] - edges[k] - 1 for k in range(n)]
        multinomial = math.factorial(n)
        for count in occupations:
            multinomial //= math.factorial(count)
        weights[occupations[0]] += multinomial / n ** n
    return weights


@pytest.mark.parametrize("n", range(2, 9))
def test_condensate_matches_brute_force(n):
    """
    Test the closed form against a multinomial enumeration
    """
    assert np.allclose(condensate_distribution(n), _brute_force_condensate(n), atol=1e-12, rtol=0)


def test_condensate_two_sites():
    """
    Test the two-site distribution
    """
    assert np.allclose(condensate_distribution(2), [0.25, 0.5, 0.25])
    assert condensate_local_distribution(1, 1) == 1.0
    with pytest.raises(ConfigurationError):
        condensate_local_distribution(3, 4)


def test_condensate_large_limit():
    """
    Test convergence to 1 / (p! e) at a million sites
    """
    for p in range(10):
        value = condensate_local_distribution(10 ** 6, p)
        assert value == pytest.approx(poisson_bound(p), abs=1e-5)
        assert value == pytest.approx(comb(10 ** 6, p) * 1e-6 ** p * (1 - 1e-6) ** (10 ** 6 - p), rel=1e-6)
