from typing import List, Optional, Tuple

from pydantic import BaseModel, Field, model_validator

from fermion_boson_sim.core.config import settings
from fermion_boson_sim.core.errors import LayoutError
from fermion_boson_sim.oscillator.grid import GridSpec, make_grid


class BosonRegister(BaseModel):
    """Contiguous little-endian qubit span holding one oscillator"""
    site: int = Field(..., ge=0, description="Oscillator index")
    qubits: Tuple[int, ...] = Field(..., description="Ascending qubit indices, LSB first")

    class Config:
        frozen = True

    @property
    def width(self) -> int:
        return len(self.qubits)

    @property
    def low(self) -> int:
        return self.qubits[0]


class QubitLayout(BaseModel):
    """
    Assignment of fermion orbitals, oscillator registers and ancillas to qubits.

    Qubit q is bit q of the flat amplitude index.
    """
    fermion_qubits: Tuple[int, ...] = Field((), description="Qubit of orbital i, Jordan-Wigner order")
    boson_registers: Tuple[BosonRegister, ...] = Field((), description="Registers by oscillator id")
    ancilla_qubits: Tuple[int, ...] = Field((), description="Phase-estimation ancillas, LSB first")

    class Config:
        frozen = True

    @model_validator(mode="after")
    def check_spans(self) -> "QubitLayout":
        used: List[int] = list(self.fermion_qubits) + list(self.ancilla_qubits)
        for register in self.boson_registers:
            lo = register.low
            if list(register.qubits) != list(range(lo, lo + register.width)):
                raise LayoutError(f"register of site {register.site} is not contiguous: {register.qubits}")
            used.extend(register.qubits)
        if len(set(used)) != len(used):
            raise LayoutError("qubit spans overlap")
        if any(q < 0 for q in used):
            raise LayoutError("negative qubit index")
        if self.n_qubits > settings.MAX_QUBITS:
            raise LayoutError(f"layout needs {self.n_qubits} qubits, maximum is {settings.MAX_QUBITS}")
        sites = [r.site for r in self.boson_registers]
        if len(set(sites)) != len(sites):
            raise LayoutError("oscillator assigned to two registers")
        return self

    @classmethod
    def standard(
        cls,
        n_orbitals: int,
        n_oscillators: int,
        n_x: int,
        n_ancillas: int = 0,
    ) -> "QubitLayout":
        """
        Fermions on the lowest qubits, then one register per oscillator, ancillas on top

        Args:
            n_orbitals: Fermion orbital count
            n_oscillators: Oscillator count
            n_x: Register width
            n_ancillas: Ancilla count

        Returns:
            QubitLayout
        """
        if n_oscillators:
            make_grid(n_x)
        registers = tuple(
            BosonRegister(site=s, qubits=tuple(range(n_orbitals + s * n_x, n_orbitals + (s + 1) * n_x)))
            for s in range(n_oscillators)
        )
        top = n_orbitals + n_oscillators * n_x
        return cls(
            fermion_qubits=tuple(range(n_orbitals)),
            boson_registers=registers,
            ancilla_qubits=tuple(range(top, top + n_ancillas)),
        )

    @property
    def n_qubits(self) -> int:
        spans = list(self.fermion_qubits) + list(self.ancilla_qubits)
        for register in self.boson_registers:
            spans.extend(register.qubits)
        return max(spans) + 1 if spans else 0

    @property
    def n_orbitals(self) -> int:
        return len(self.fermion_qubits)

    @property
    def n_oscillators(self) -> int:
        return len(self.boson_registers)

    def fermion_qubit(self, orbital: int) -> int:
        if not 0 <= orbital < len(self.fermion_qubits):
            raise LayoutError(f"orbital {orbital} not in layout with {len(self.fermion_qubits)} orbitals")
        return self.fermion_qubits[orbital]

    def register(self, site: int) -> BosonRegister:
        for register in self.boson_registers:
            if register.site == site:
                return register
        raise LayoutError(f"oscillator {site} has no register")

    def grid(self, site: int) -> GridSpec:
        return make_grid(self.register(site).width)

    def is_register_span(self, span: Tuple[int, ...]) -> bool:
        """True when span is exactly one boson register or the ancilla register"""
        span = tuple(span)
        if self.ancilla_qubits and span == tuple(self.ancilla_qubits):
            return True
        return any(span == r.qubits for r in self.boson_registers)

    def with_ancillas(self, count: int) -> "QubitLayout":
        """Copy with count ancillas placed above every other qubit"""
        top = self.n_qubits - len(self.ancilla_qubits) if self.ancilla_qubits else self.n_qubits
        return QubitLayout(
            fermion_qubits=self.fermion_qubits,
            boson_registers=self.boson_registers,
            ancilla_qubits=tuple(range(top, top + count)),
        )

    def without_ancillas(self) -> "QubitLayout":
        return self.model_copy(update={"ancilla_qubits": ()})

    def describe(self, extra: Optional[dict] = None) -> dict:
        record = {
            "fermion_qubits": list(self.fermion_qubits),
            "boson_registers": {str(r.site): list(r.qubits) for r in self.boson_registers},
            "ancilla_qubits": list(self.ancilla_qubits),
        }
        record.update(extra or {})
        return record
