import math
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator, validator


class EvolutionMode(str, Enum):
    """How the controlled evolution inside QPE is realized"""
    TROTTER = "trotter"
    DENSE = "dense"


class OutputFormat(str, Enum):
    """Artifact format"""
    CSV = "csv"
    JSON = "json"


# Subcommands whose output depends on a random stream
STOCHASTIC_COMMANDS = {("prep", "gaussian"), ("qpe", "polaron"), ("qpe", "zn")}


class QpeConfig(BaseModel):
    """Quantum phase estimation run parameters"""
    ancillas: int = Field(8, ge=1, le=12, description="Ancilla register width a")
    mode: EvolutionMode = Field(EvolutionMode.TROTTER, description="Controlled evolution strategy")
    e_min: float = Field(-4.0, description="Lower edge of the energy window")
    e_max: float = Field(0.0, description="Upper edge of the energy window")
    t0: Optional[float] = Field(None, gt=0, description="Base evolution time; defaults to 2pi / width")
    steps_per_unit: int = Field(64, ge=1, description="First-order Trotter steps per unit time")
    shots: int = Field(4096, ge=1, description="Measurement shots")
    seed: int = Field(..., description="Sampling seed")

    @validator("e_max")
    def window_ordered(cls, v: float, values: Dict[str, Any]) -> float:
        lower = values.get("e_min")
        if lower is not None and v <= lower:
            raise ValueError("e_max must exceed e_min")
        return v

    @property
    def width(self) -> float:
        return self.e_max - self.e_min

    @property
    def evolution_time(self) -> float:
        return self.t0 if self.t0 is not None else 2.0 * math.pi / self.width

    @property
    def n_bins(self) -> int:
        return 2 ** self.ancillas

    @property
    def resolution(self) -> float:
        return 2.0 * math.pi / (self.n_bins * self.evolution_time)

    @property
    def steps_per_application(self) -> int:
        return max(1, math.ceil(self.steps_per_unit * self.evolution_time - 1e-9))


class VariationalSchedule(BaseModel):
    """Angles of an N_S-step Gaussian preparation ansatz"""
    n_x: int = Field(..., ge=2, description="Register width")
    steps: int = Field(..., ge=0, description="Ansatz step count N_S")
    theta_z: List[List[float]] = Field(default_factory=list, description="Per-step z angles")
    theta_x: List[List[float]] = Field(default_factory=list, description="Per-step x angles")
    theta_y: List[List[float]] = Field(default_factory=list, description="Per-step y angles")
    rho_p: List[float] = Field(default_factory=list, description="Per-step p^2 angle")
    rho_x: List[float] = Field(default_factory=list, description="Per-step x^2 angle")
    seed: Optional[int] = Field(None, description="Seed of the winning optimizer run")
    fidelity: Optional[float] = Field(None, description="Achieved |<phi_v|chi_0>|^2")
    spsa: Dict[str, float] = Field(default_factory=dict, description="Optimizer hyperparameters")

    @model_validator(mode="after")
    def check_shapes(self) -> "VariationalSchedule":
        for name in ("theta_z", "theta_x", "theta_y"):
            rows = getattr(self, name)
            if len(rows) != self.steps or any(len(r) != self.n_x for r in rows):
                raise ValueError(f"{name} must be {self.steps} x {self.n_x}")
            if not all(math.isfinite(a) for r in rows for a in r):
                raise ValueError(f"{name} has non-finite angles")
        for name in ("rho_p", "rho_x"):
            values = getattr(self, name)
            if len(values) != self.steps or not all(math.isfinite(a) for a in values):
                raise ValueError(f"{name} must hold {self.steps} finite values")
        return self


class GoldenRecord(BaseModel):
    """Exact-diagonalization reference for one coupling"""
    alpha: float
    E0: float
    Z: List[float]
    nph: int
    E0_check: float
    nph_check: int
    delta_45_60: float = Field(..., description="|E0(nph) - E0(nph_check)|")


class ResourceReport(BaseModel):
    """Gate census of a synthesized Trotter step"""
    n_x: int
    per_kind: Dict[str, Dict[str, int]] = Field(default_factory=dict)
    totals: Dict[str, int] = Field(default_factory=dict)
    lowered: Dict[str, int] = Field(default_factory=dict)


class RunConfig(BaseModel):
    """One CLI invocation, echoed into every artifact"""
    command: str
    action: str
    params: Dict[str, Any] = Field(default_factory=dict)
    out: Optional[str] = None
    format: OutputFormat = OutputFormat.CSV

    @model_validator(mode="after")
    def seed_required(self) -> "RunConfig":
        if (self.command, self.action) in STOCHASTIC_COMMANDS and self.params.get("seed") is None:
            raise ValueError(f"{self.command} {self.action} requires --seed")
        return self
