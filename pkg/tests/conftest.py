import numpy as np
import pytest

from fermion_boson_sim.engine.layout import QubitLayout
from fermion_boson_sim.model.hamiltonian import holstein, holstein_alpha
from fermion_boson_sim.services.storage_service import LocalStorageService


@pytest.fixture
def rng():
    """
    Seeded generator for random test states
    """
    return np.random.default_rng(1234)


@pytest.fixture
def boson_layout():
    """
    One oscillator on a 3-qubit register
    """
    return QubitLayout.standard(0, 1, 3)


@pytest.fixture
def pair_layout():
    """
    Two oscillators on 3-qubit registers
    """
    return QubitLayout.standard(0, 2, 3)


@pytest.fixture
def mixed_layout():
    """
    Three orbitals and two 2-qubit registers
    """
    return QubitLayout.standard(3, 2, 2)


@pytest.fixture
def holstein_spec():
    """
    Two-site Holstein model at alpha = 1
    """
    return holstein_alpha(1.0)


@pytest.fixture
def small_holstein():
    """
    Two-site Holstein model with a non-trivial coupling, for dense checks
    """
    return holstein(1.0, 0.7, 1.0, sites=2)


@pytest.fixture
def storage(tmp_path):
    """
    Local storage rooted in a temporary directory
    """
    return LocalStorageService(str(tmp_path))


def random_state(rng, n_qubits):
    psi = rng.normal(size=2 ** n_qubits) + 1j * rng.normal(size=2 ** n_qubits)
    return psi / np.linalg.norm(psi)


@pytest.fixture
def random_state_factory(rng):
    """
    Normalized random complex amplitudes of a given qubit count
    """
    return lambda n_qubits: random_state(rng, n_qubits)
