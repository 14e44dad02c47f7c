from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, model_validator, validator


class TermKind(str, Enum):
    """Hamiltonian term kind in X/P form"""
    X = "X"
    X2 = "X2"
    XX = "XX"
    P = "P"
    P2 = "P2"
    PP = "PP"
    XP_CROSS = "XP_cross"
    XP_SELF = "XP_self"
    XK_PRODUCT = "Xk_product"
    DENS = "Dens"
    DENS_X = "DensX"
    DENS_P = "DensP"
    HOP = "Hop"
    HOP_X = "HopX"
    HOP_P = "HopP"
    CUR_X = "CurX"
    CUR_P = "CurP"
    HOP_MULTI_X = "HopMultiX"
    TWO_BODY = "TwoBody"


class TermCategory(str, Enum):
    """Trotter sweep category"""
    FERMION = "fermion"
    FERMION_BOSON = "fermion_boson"
    BOSON_LOCAL = "boson_local"
    BOSON_CROSS = "boson_cross"


# (sites, orbitals) arity per kind; None means variable
TERM_ARITY: Dict[TermKind, Tuple[Optional[int], Optional[int]]] = {
    TermKind.X: (1, 0),
    TermKind.X2: (1, 0),
    TermKind.P: (1, 0),
    TermKind.P2: (1, 0),
    TermKind.XX: (2, 0),
    TermKind.PP: (2, 0),
    TermKind.XP_CROSS: (2, 0),
    TermKind.XP_SELF: (1, 0),
    TermKind.XK_PRODUCT: (None, 0),
    TermKind.DENS: (0, 1),
    TermKind.DENS_X: (1, 1),
    TermKind.DENS_P: (1, 1),
    TermKind.HOP: (0, 2),
    TermKind.HOP_X: (1, 2),
    TermKind.HOP_P: (1, 2),
    TermKind.CUR_X: (1, 2),
    TermKind.CUR_P: (1, 2),
    TermKind.HOP_MULTI_X: (None, 2),
    TermKind.TWO_BODY: (0, 4),
}

TERM_CATEGORY: Dict[TermKind, TermCategory] = {
    TermKind.DENS: TermCategory.FERMION,
    TermKind.HOP: TermCategory.FERMION,
    TermKind.TWO_BODY: TermCategory.FERMION,
    TermKind.DENS_X: TermCategory.FERMION_BOSON,
    TermKind.DENS_P: TermCategory.FERMION_BOSON,
    TermKind.HOP_X: TermCategory.FERMION_BOSON,
    TermKind.HOP_P: TermCategory.FERMION_BOSON,
    TermKind.CUR_X: TermCategory.FERMION_BOSON,
    TermKind.CUR_P: TermCategory.FERMION_BOSON,
    TermKind.HOP_MULTI_X: TermCategory.FERMION_BOSON,
    TermKind.X: TermCategory.BOSON_LOCAL,
    TermKind.X2: TermCategory.BOSON_LOCAL,
    TermKind.P: TermCategory.BOSON_LOCAL,
    TermKind.P2: TermCategory.BOSON_LOCAL,
    TermKind.XP_SELF: TermCategory.BOSON_LOCAL,
    TermKind.XX: TermCategory.BOSON_CROSS,
    TermKind.PP: TermCategory.BOSON_CROSS,
    TermKind.XP_CROSS: TermCategory.BOSON_CROSS,
    TermKind.XK_PRODUCT: TermCategory.BOSON_CROSS,
}


class Term(BaseModel):
    """One Hermitian term; evolution over dt applies exp(-i coeff dt O)"""
    kind: TermKind = Field(..., description="Operator kind")
    sites: Tuple[int, ...] = Field((), description="Oscillator indices")
    orbitals: Tuple[int, ...] = Field((), description="Fermion orbital indices")
    coeff: float = Field(..., description="Real angle-generating coefficient")
    exponents: Optional[Tuple[int, int]] = Field(
        None, description="Powers (u, v) of x^u p^v + p^v x^u for XP_self"
    )
    factors: Tuple[str, ...] = Field(
        (), description="Per-site operator letters X or P for Xk_product"
    )
    weights: Tuple[float, ...] = Field(
        (), description="Per-site position couplings for HopMultiX"
    )

    class Config:
        frozen = True
        use_enum_values = False

    @validator("factors")
    def factor_letters(cls, v: Tuple[str, ...]) -> Tuple[str, ...]:
        bad = [f for f in v if f not in ("X", "P")]
        if bad:
            raise ValueError(f"factors must be X or P, got {bad}")
        return v

    @model_validator(mode="after")
    def check_arity(self) -> "Term":
        n_sites, n_orbitals = TERM_ARITY[self.kind]
        if n_sites is not None and len(self.sites) != n_sites:
            raise ValueError(f"{self.kind.value} needs {n_sites} site(s), got {len(self.sites)}")
        if n_orbitals is not None and len(self.orbitals) != n_orbitals:
            raise ValueError(f"{self.kind.value} needs {n_orbitals} orbital(s), got {len(self.orbitals)}")
        if self.kind in (TermKind.XX, TermKind.PP, TermKind.XP_CROSS) and self.sites[0] == self.sites[1]:
            raise ValueError(f"{self.kind.value} needs two distinct sites")
        if n_orbitals == 2 and self.orbitals[0] == self.orbitals[1]:
            raise ValueError(f"{self.kind.value} needs two distinct orbitals")
        if self.kind == TermKind.XP_SELF:
            if self.exponents is None or min(self.exponents) < 1:
                raise ValueError("XP_self needs exponents (u, v) with u, v >= 1")
        if self.kind == TermKind.XK_PRODUCT:
            if not 1 <= len(self.sites) <= 4 or len(self.factors) != len(self.sites):
                raise ValueError("Xk_product needs 1..4 sites with one factor letter each")
        if self.kind == TermKind.HOP_MULTI_X:
            if not self.sites or len(self.weights) != len(self.sites):
                raise ValueError("HopMultiX needs one weight per site")
        return self

    @property
    def category(self) -> TermCategory:
        return TERM_CATEGORY[self.kind]


class HamiltonianSpec(BaseModel):
    """Term list over fermion orbitals and oscillator sites"""
    n_orbitals: int = Field(0, alias="orbitals", ge=0, description="Fermion orbital count")
    n_oscillators: int = Field(0, alias="oscillators", ge=0, description="Oscillator count")
    terms: List[Term] = Field(default_factory=list, description="Hermitian terms")
    shift: float = Field(0.0, description="Scalar energy offset added to every eigenvalue")
    metadata: Dict[str, Any] = Field(default_factory=dict, description="Model provenance")

    class Config:
        frozen = True
        populate_by_name = True

    @model_validator(mode="after")
    def check_indices(self) -> "HamiltonianSpec":
        for term in self.terms:
            for site in term.sites:
                if not 0 <= site < self.n_oscillators:
                    raise ValueError(f"site {site} out of range for {self.n_oscillators} oscillators")
            for orbital in term.orbitals:
                if not 0 <= orbital < self.n_orbitals:
                    raise ValueError(f"orbital {orbital} out of range for {self.n_orbitals} orbitals")
        return self

    def to_json(self) -> str:
        """Serialize with the file-format field names"""
        return self.model_dump_json(by_alias=True, exclude_none=True, indent=2)
