import numpy as np
import pytest

from fermion_boson_sim.core.errors import ModelError, PlanError
from fermion_boson_sim.model.hamiltonian import (
    coupling_for_alpha,
    driven_oscillator,
    free_phonons,
    from_second_quantized,
    holstein,
    load_model,
    model_summary,
    save_model,
)
from fermion_boson_sim.model.trotter import order_terms, trotter_plan
from fermion_boson_sim.oracle.fock import FockOperators, second_quantized_matrix, spec_fock_matrix
from fermion_boson_sim.schemas.hamiltonian_models import HamiltonianSpec, Term, TermCategory, TermKind


def _fock_blocks(spec, ops, reference, n_max):
    keep = ops.low_block(n_max)
    built = spec_fock_matrix(spec, ops, spec.metadata["scales"]).toarray()[np.ix_(keep, keep)]
    return built, reference.toarray()[np.ix_(keep, keep)]


def test_coupling_for_alpha():
    """
    Test alpha = g^2 / (2 omega^2 t)
    """
    g = coupling_for_alpha(1.5, t=2.0, omega=0.5)
    assert g * g / (2 * 0.25 * 2.0) == pytest.approx(1.5)
    with pytest.raises(ModelError):
        coupling_for_alpha(-1.0)


def test_holstein_terms():
    """
    Test the two-site Holstein term list
    """
    spec = holstein(1.0, 0.5, 2.0, sites=2)
    kinds = sorted(term.kind.value for term in spec.terms)
    assert kinds == ["DensX", "DensX", "Hop", "P2", "P2", "X2", "X2"]
    hop = next(t for t in spec.terms if t.kind == TermKind.HOP)
    assert hop.coeff == -1.0
    x2 = next(t for t in spec.terms if t.kind == TermKind.X2)
    assert x2.coeff == pytest.approx(2.0)
    assert spec.metadata["alpha"] == pytest.approx(0.5 ** 2 / (2 * 4.0))


def test_holstein_ring_bonds():
    """
    Test that a ring of three sites closes its last bond and two sites do not double
    """
    assert sum(t.kind == TermKind.HOP for t in holstein(1.0, 0.1, 1.0, sites=3).terms) == 3
    assert sum(t.kind == TermKind.HOP for t in holstein(1.0, 0.1, 1.0, sites=2).terms) == 1
    with pytest.raises(ModelError):
        holstein(1.0, 0.1, 1.0, sites=1)


def test_term_validation():
    """
    Test arity and ordering checks on terms
    """
    with pytest.raises(ValueError):
        Term(kind=TermKind.XX, sites=(0, 0), coeff=1.0)
    with pytest.raises(ValueError):
        Term(kind=TermKind.XP_SELF, sites=(0,), coeff=1.0)
    with pytest.raises(ValueError):
        Term(kind=TermKind.HOP_MULTI_X, sites=(0, 1), orbitals=(0, 1), coeff=1.0, weights=(1.0,))
    with pytest.raises(ValueError):
        HamiltonianSpec(n_orbitals=1, terms=[Term(kind=TermKind.DENS, orbitals=(2,), coeff=1.0)])


def test_model_file_round_trip(tmp_path, holstein_spec):
    """
    Test saving and loading a model file
    """
    path = tmp_path / "holstein.json"
    save_model(holstein_spec, path)
    assert '"orbitals": 2' in path.read_text()
    loaded = load_model(path)
    assert loaded == holstein_spec


def test_load_model_rejects_bad_file(tmp_path):
    """
    Test a malformed model file
    """
    path = tmp_path / "bad.json"
    path.write_text('{"orbitals": 1, "terms": [{"kind": "Hop", "orbitals": [0], "coeff": 1.0}]}')
    with pytest.raises(ModelError):
        load_model(path)


def test_model_summary(holstein_spec):
    """
    Test term counts by kind
    """
    summary = model_summary(holstein_spec)
    assert summary["terms"]["DensX"] == 2
    assert summary["oscillators"] == 2


def test_free_and_driven_builders():
    """
    Test the oscillator-only builders
    """
    assert len(free_phonons(1.0, 3).terms) == 6
    driven = driven_oscillator(1.0, 0.5)
    assert {t.kind for t in driven.terms} == {TermKind.P2, TermKind.X2, TermKind.X}
    with pytest.raises(ModelError):
        free_phonons(0.0, 1)


def test_quadratic_model_matches_fock_operators():
    """
    Test the X/P rewrite of a two-mode quadratic model with fermions
    """
    xi = np.array([[1.2, 0.3 + 0.2j], [0.3 - 0.2j, 0.8]])
    zeta = np.array([0.4 - 0.1j, 0.2 + 0.3j])
    lam = np.array([[0.1 + 0.05j, 0.07 - 0.02j], [0.07 - 0.02j, -0.06]])
    hopping = np.array([[0.5, -1.0], [-1.0, -0.3]])
    coupling = np.zeros((2, 2, 2), dtype=complex)
    coupling[0, 0, 0] = 0.3 + 0.1j
    coupling[0, 1, 1] = 0.2 - 0.4j
    coupling[1, 0, 0] = -0.1 + 0.25j
    spec = from_second_quantized(xi, zeta, lam, hopping=hopping, coupling=coupling)
    ops = FockOperators(2, 2, 12)
    reference = second_quantized_matrix(ops, xi, zeta, lam, hopping=hopping, coupling=coupling)
    built, expected = _fock_blocks(spec, ops, reference, 8)
    assert np.max(np.abs(built - expected)) < 1e-10


def test_interaction_tensors_match_fock_operators():
    """
    Test the X/P rewrite of cubic and quartic boson products on distinct sites
    """
    xi = np.diag([1.0, 1.5, 0.7])
    u = np.zeros((3, 3, 3), dtype=complex)
    u[0, 1, 2] = 0.2 + 0.1j
    v = np.zeros((3, 3, 3), dtype=complex)
    v[2, 1, 0] = -0.15 + 0.05j
    tensors = {"U": u, "V": v}
    spec = from_second_quantized(xi, tensors=tensors)
    ops = FockOperators(0, 3, 10)
    reference = second_quantized_matrix(ops, xi, tensors=tensors)
    built, expected = _fock_blocks(spec, ops, reference, 6)
    assert np.max(np.abs(built - expected)) < 1e-10


def test_interaction_rejects_repeated_sites():
    """
    Test that repeated oscillators in an interaction tensor are refused
    """
    u = np.zeros((2, 2, 2))
    u[0, 0, 1] = 1.0
    with pytest.raises(ModelError):
        from_second_quantized(np.eye(2), tensors={"U": u})


def test_second_quantized_input_checks():
    """
    Test Hermiticity and scale checks
    """
    with pytest.raises(ModelError):
        from_second_quantized(np.array([[1.0, 0.5], [0.1, 1.0]]))
    with pytest.raises(ModelError):
        from_second_quantized(np.eye(1), scales=[-1.0])


def test_two_body_is_stored():
    """
    Test that fermion two-body terms are kept in the model
    """
    u = np.zeros((2, 2, 2, 2))
    u[0, 1, 1, 0] = 0.5
    spec = from_second_quantized(np.eye(1), two_body=u)
    assert [t.kind for t in spec.terms if t.category == TermCategory.FERMION] == [TermKind.TWO_BODY]


def test_trotter_plan_order(holstein_spec):
    """
    Test sweep categories and step size
    """
    plan = trotter_plan(holstein_spec, 1.0, 8)
    assert plan.dt == pytest.approx(0.125)
    categories = [t.category for t in plan.ordered_terms]
    assert categories == sorted(categories, key=[
        TermCategory.FERMION, TermCategory.FERMION_BOSON, TermCategory.BOSON_LOCAL, TermCategory.BOSON_CROSS,
    ].index)
    assert order_terms(list(reversed(holstein_spec.terms))) == plan.ordered_terms


@pytest.mark.parametrize("steps", [0, -1, 1.5])
def test_trotter_plan_rejects_steps(holstein_spec, steps):
    """
    Test invalid step counts
    """
    with pytest.raises(PlanError):
        trotter_plan(holstein_spec, 1.0, steps)


def test_trotter_plan_accepts_numpy_steps(holstein_spec):
    """
    Test that numpy integer step counts build the same plan
    """
    plan = trotter_plan(holstein_spec, 1.0, np.int64(4))
    assert plan.steps == 4
    assert type(plan.steps) is int
    assert plan == trotter_plan(holstein_spec, 1.0, 4)
