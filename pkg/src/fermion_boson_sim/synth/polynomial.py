"""Binary phase polynomials.

Every diagonal operator the synthesizers need is a product of integer linear
forms in register bits, times a real scale. Expanding the product with b*b = b
gives a multilinear polynomial whose monomials map one-to-one onto phase gates:
the empty monomial becomes classical phase, one bit a PhaseShift, two bits a
CPhase and more bits a MultiCPhase.
"""
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from fermion_boson_sim.engine.circuit import Circuit
from fermion_boson_sim.engine.gates import phase_shift
from fermion_boson_sim.engine.layout import BosonRegister
from fermion_boson_sim.oscillator.grid import make_grid
from fermion_boson_sim.utils.cache import cached

Monomial = Tuple[int, ...]


@dataclass(frozen=True)
class LinearForm:
    """scale * (offset + sum_r weights[r] * b_{qubits[r]}) with integer weights"""
    qubits: Tuple[int, ...]
    weights: Tuple[int, ...]
    offset: int
    scale: float

    @property
    def structure(self) -> Tuple[Tuple[int, ...], Tuple[int, ...], int]:
        return self.qubits, self.weights, self.offset


def position_form(register: BosonRegister) -> LinearForm:
    """x_j = delta * (j - N/2) with j the register value"""
    width = register.width
    return LinearForm(
        qubits=register.qubits,
        weights=tuple(2 ** r for r in range(width)),
        offset=-(2 ** (width - 1)),
        scale=make_grid(width).delta,
    )


def momentum_form(register: BosonRegister) -> LinearForm:
    """p_n = delta * n for n < N/2 and delta * (n - N) otherwise, n the Fourier index"""
    width = register.width
    weights = [2 ** r for r in range(width)]
    weights[-1] = -(2 ** (width - 1))
    return LinearForm(
        qubits=register.qubits,
        weights=tuple(weights),
        offset=0,
        scale=make_grid(width).delta,
    )


def number_form(qubit: int) -> LinearForm:
    """Occupation n_i of one fermion qubit"""
    return LinearForm(qubits=(qubit,), weights=(1,), offset=0, scale=1.0)


def _structure_key(structures: Sequence[Tuple]) -> str:
    return repr(tuple(structures))


@cached("phase_polynomial", key_builder=lambda structures: _structure_key(structures))
def _expand(structures: Tuple[Tuple[Tuple[int, ...], Tuple[int, ...], int], ...]) -> Tuple[Tuple[Monomial, int], ...]:
    polynomial: Dict[Monomial, int] = {(): 1}
    for qubits, weights, offset in structures:
        factor: List[Tuple[Monomial, int]] = [((), offset)] + [((q,), w) for q, w in zip(qubits, weights)]
        product: Dict[Monomial, int] = {}
        for monomial, coefficient in polynomial.items():
            for bits, weight in factor:
                if weight == 0:
                    continue
                key = tuple(sorted(set(monomial) | set(bits)))
                product[key] = product.get(key, 0) + coefficient * weight
        polynomial = product
    terms = [(m, c) for m, c in polynomial.items() if c != 0]
    return tuple(sorted(terms, key=lambda item: (len(item[0]), item[0])))


def expand_product(forms: Sequence[LinearForm]) -> Tuple[Tuple[Monomial, int], ...]:
    """
    Multilinear integer expansion of a product of linear forms

    Args:
        forms: Factors

    Returns:
        (monomial, integer coefficient) pairs ordered by degree then qubits;
        monomials whose coefficient cancels exactly are dropped
    """
    return _expand(tuple(form.structure for form in forms))


def phase_polynomial(forms: Sequence[LinearForm], theta: float, n_qubits: int) -> Circuit:
    """
    Circuit for exp(-i theta prod(forms))

    Args:
        forms: Linear-form factors
        theta: Angle
        n_qubits: Circuit width

    Returns:
        Circuit with phase gates plus the constant monomial as classical phase
    """
    scale = 1.0
    for form in forms:
        scale *= form.scale
    circuit = Circuit(n_qubits)
    for monomial, coefficient in expand_product(forms):
        angle = theta * scale * coefficient
        if not monomial:
            circuit.add_phase(angle)
            continue
        target = monomial[-1]
        circuit.append(phase_shift(target, angle, controls=monomial[:-1]))
    return circuit


def monomial_count(widths: Sequence[int]) -> int:
    """Non-constant monomials of a product of position forms, prod(n + 1) - 1"""
    count = 1
    for width in widths:
        count *= width + 1
    return count - 1
