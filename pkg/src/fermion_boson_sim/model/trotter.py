import operator
from typing import List, Tuple

from pydantic import BaseModel, Field

from fermion_boson_sim.core.errors import PlanError
from fermion_boson_sim.core.logging import get_logger
from fermion_boson_sim.schemas.hamiltonian_models import HamiltonianSpec, Term, TermCategory, TermKind

logger = get_logger(__name__)

CATEGORY_ORDER: Tuple[TermCategory, ...] = (
    TermCategory.FERMION,
    TermCategory.FERMION_BOSON,
    TermCategory.BOSON_LOCAL,
    TermCategory.BOSON_CROSS,
)

KIND_RANK = {kind: rank for rank, kind in enumerate([
    TermKind.DENS,
    TermKind.HOP,
    TermKind.TWO_BODY,
    TermKind.DENS_X,
    TermKind.DENS_P,
    TermKind.HOP_X,
    TermKind.HOP_P,
    TermKind.CUR_X,
    TermKind.CUR_P,
    TermKind.HOP_MULTI_X,
    TermKind.X,
    TermKind.X2,
    TermKind.P,
    TermKind.P2,
    TermKind.XP_SELF,
    TermKind.XX,
    TermKind.PP,
    TermKind.XP_CROSS,
    TermKind.XK_PRODUCT,
])}


class TrotterPlan(BaseModel):
    """First-order product formula: steps sweeps of ordered_terms with step dt"""
    dt: float = Field(..., description="Time step")
    steps: int = Field(..., ge=1, description="Number of sweeps")
    total_time: float = Field(..., description="steps * dt")
    ordered_terms: List[Term] = Field(default_factory=list, description="Sweep order")
    shift: float = Field(0.0, description="Scalar energy offset of the model")
    n_orbitals: int = Field(0, ge=0)
    n_oscillators: int = Field(0, ge=0)

    class Config:
        frozen = True


def sweep_key(term: Term) -> Tuple:
    """(category, indices, kind) ordering of a term inside one sweep"""
    category = CATEGORY_ORDER.index(term.category)
    if term.category == TermCategory.FERMION:
        indices: Tuple = (term.orbitals,)
    elif term.category == TermCategory.FERMION_BOSON:
        indices = (term.orbitals, term.sites)
    else:
        indices = (term.sites,)
    return (category,) + indices + (KIND_RANK[term.kind], term.factors)


def order_terms(terms: List[Term]) -> List[Term]:
    return sorted(terms, key=sweep_key)


def trotter_plan(h: HamiltonianSpec, total_t: float, steps: int) -> TrotterPlan:
    """
    Build the first-order Trotter plan

    Args:
        h: Hamiltonian
        total_t: Total evolution time
        steps: Number of steps, >= 1

    Returns:
        TrotterPlan with dt = total_t / steps and the fixed sweep order
    """
    try:
        steps = operator.index(steps)
    except TypeError:
        raise PlanError(f"Trotter steps must be a positive integer, got {steps}") from None
    if steps < 1:
        raise PlanError(f"Trotter steps must be a positive integer, got {steps}")
    dt = total_t / steps
    plan = TrotterPlan(
        dt=dt,
        steps=steps,
        total_time=total_t,
        ordered_terms=order_terms(list(h.terms)),
        shift=h.shift,
        n_orbitals=h.n_orbitals,
        n_oscillators=h.n_oscillators,
    )
    logger.debug("Built Trotter plan", steps=steps, dt=dt, terms=len(plan.ordered_terms))
    return plan
