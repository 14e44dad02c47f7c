"""Variational Gaussian preparation on one oscillator register.

Each ansatz step applies exp(-i rho_p p^2), then exp(-i rho_x x^2), then
per-qubit Rz, Rx and Ry rotations. The start state is the grid point x = 0,
basis index N_x / 2.
"""
from typing import List, Optional, Tuple

import numpy as np

from fermion_boson_sim.core.config import settings
from fermion_boson_sim.core.errors import ConfigurationError
from fermion_boson_sim.core.logging import get_logger
from fermion_boson_sim.engine.circuit import Circuit
from fermion_boson_sim.engine.gates import Gate, GateKind
from fermion_boson_sim.engine.layout import QubitLayout
from fermion_boson_sim.engine.statevector import StateVector
from fermion_boson_sim.oscillator.grid import make_grid
from fermion_boson_sim.prep.gaussian import gaussian_amplitudes
from fermion_boson_sim.prep.spsa import SPSA, SpsaResult
from fermion_boson_sim.schemas.run_models import VariationalSchedule
from fermion_boson_sim.synth.boson import momentum_matrix, synth_P2, synth_X2
from fermion_boson_sim.utils.linalg import hermitian_eigh
from fermion_boson_sim.workers.pool import ordered_map

logger = get_logger(__name__)

MIN_NX, MAX_NX = 4, 8
INITIAL_RHO = 0.1


def _check_width(n_x: int) -> None:
    if not MIN_NX <= n_x <= MAX_NX:
        raise ConfigurationError(f"variational preparation needs n_x in [{MIN_NX}, {MAX_NX}], got {n_x}")


def n_parameters(n_x: int, steps: int) -> int:
    return steps * (2 + 3 * n_x)


def unpack(params: np.ndarray, n_x: int, steps: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split a flat vector into rho (steps, 2) and angles (steps, 3, n_x) ordered z, x, y"""
    blocks = np.asarray(params, dtype=float).reshape(steps, 2 + 3 * n_x)
    return blocks[:, 0], blocks[:, 1], blocks[:, 2:].reshape(steps, 3, n_x)


def to_schedule(params: np.ndarray, n_x: int, steps: int, **extra) -> VariationalSchedule:
    rho_p, rho_x, angles = unpack(params, n_x, steps)
    return VariationalSchedule(
        n_x=n_x,
        steps=steps,
        theta_z=angles[:, 0].tolist(),
        theta_x=angles[:, 1].tolist(),
        theta_y=angles[:, 2].tolist(),
        rho_p=rho_p.tolist(),
        rho_x=rho_x.tolist(),
        **extra,
    )


def from_schedule(schedule: VariationalSchedule) -> np.ndarray:
    n_x, steps = schedule.n_x, schedule.steps
    blocks = np.zeros((steps, 2 + 3 * n_x))
    for s in range(steps):
        blocks[s, 0] = schedule.rho_p[s]
        blocks[s, 1] = schedule.rho_x[s]
        blocks[s, 2:] = np.concatenate([schedule.theta_z[s], schedule.theta_x[s], schedule.theta_y[s]])
    return blocks.reshape(-1)


def initial_parameters(n_x: int, steps: int) -> np.ndarray:
    blocks = np.zeros((steps, 2 + 3 * n_x))
    blocks[:, :2] = INITIAL_RHO
    return blocks.reshape(-1)


def ansatz_circuit(schedule: VariationalSchedule) -> Circuit:
    """Gate-level ansatz acting on |0...0>"""
    n_x = schedule.n_x
    layout = QubitLayout.standard(0, 1, n_x)
    circuit = Circuit(n_x)
    circuit.append(Gate(GateKind.PAULI_X, targets=(n_x - 1,)))
    for s in range(schedule.steps):
        circuit.extend(synth_P2(layout, 0, schedule.rho_p[s]))
        circuit.extend(synth_X2(layout, 0, schedule.rho_x[s]))
        for q in range(n_x):
            circuit.append(Gate(GateKind.RZ, targets=(q,), theta=schedule.theta_z[s][q]))
            circuit.append(Gate(GateKind.RX, targets=(q,), theta=schedule.theta_x[s][q]))
            circuit.append(Gate(GateKind.RY, targets=(q,), theta=schedule.theta_y[s][q]))
    return circuit


class AnsatzEvaluator:
    """Vectorized ansatz state and fidelity, equal to the circuit path up to a global phase"""

    def __init__(self, n_x: int, steps: int):
        _check_width(n_x)
        self.n_x = n_x
        self.steps = steps
        grid = make_grid(n_x)
        self.x2 = grid.positions ** 2
        p = momentum_matrix(n_x)
        self.p2_values, self.p2_vectors = hermitian_eigh(p @ p)
        self.target = gaussian_amplitudes(n_x)
        self.start = np.zeros(grid.n_points, dtype=complex)
        self.start[grid.n_points // 2] = 1.0

    @staticmethod
    def _rotation(kind: GateKind, theta: float) -> np.ndarray:
        return Gate(kind, targets=(0,), theta=theta).single_qubit_matrix()

    def state(self, params: np.ndarray) -> np.ndarray:
        n = self.n_x
        rho_p, rho_x, angles = unpack(params, n, self.steps)
        psi = self.start.copy()
        for s in range(self.steps):
            psi = self.p2_vectors @ (np.exp(-1j * rho_p[s] * self.p2_values) * (self.p2_vectors.conj().T @ psi))
            psi = psi * np.exp(-1j * rho_x[s] * self.x2)
            tensor = psi.reshape((2,) * n)
            for q in range(n):
                u = (
                    self._rotation(GateKind.RY, angles[s, 2, q])
                    @ self._rotation(GateKind.RX, angles[s, 1, q])
                    @ self._rotation(GateKind.RZ, angles[s, 0, q])
                )
                axis = n - 1 - q
                tensor = np.moveaxis(np.tensordot(u, tensor, axes=([1], [axis])), 0, axis)
            psi = tensor.reshape(-1)
        return psi

    def fidelity(self, params: np.ndarray) -> float:
        return float(abs(np.vdot(self.target, self.state(params))) ** 2)

    def loss(self, params: np.ndarray) -> float:
        return 1.0 - self.fidelity(params)


def _restart(args: Tuple[int, int, int, int]) -> Tuple[int, SpsaResult]:
    n_x, steps, seed, budget = args
    evaluator = AnsatzEvaluator(n_x, steps)
    result = SPSA(seed=seed).minimize(evaluator.loss, initial_parameters(n_x, steps), budget=budget)
    return seed, result


def prepare_gaussian_variational(
    n_x: int,
    steps: int,
    seed: int,
    restarts: Optional[int] = None,
    budget: Optional[int] = None,
) -> Tuple[VariationalSchedule, StateVector]:
    """
    Optimize the ansatz toward chi_0 with SPSA restarts

    Restart r uses seed + r; the run with the highest fidelity wins, ties
    going to the lowest seed.

    Args:
        n_x: Register width in [4, 8]
        steps: Ansatz steps N_S >= 0
        seed: Base seed
        restarts: Restart count (defaults to settings.SPSA_RESTARTS)
        budget: Objective evaluations per restart (defaults to settings.SPSA_BUDGET)

    Returns:
        Winning schedule with its fidelity and the circuit-prepared state
    """
    _check_width(n_x)
    if steps < 0:
        raise ConfigurationError(f"ansatz steps must be non-negative, got {steps}")
    restarts = settings.SPSA_RESTARTS if restarts is None else restarts
    budget = settings.SPSA_BUDGET if budget is None else budget
    hyper = {"a": settings.SPSA_A, "c": settings.SPSA_C, "alpha": settings.SPSA_ALPHA,
             "gamma": settings.SPSA_GAMMA, "budget": float(budget), "restarts": float(restarts)}

    if steps == 0:
        params, winner = np.zeros(0), seed
    else:
        runs: List[Tuple[int, SpsaResult]] = ordered_map(
            _restart,
            [(n_x, steps, seed + r, budget) for r in range(max(1, restarts))],
            label="spsa_restarts",
        )
        winner, best = min(runs, key=lambda run: (run[1].best_value, run[0]))
        params = best.best_params

    evaluator = AnsatzEvaluator(n_x, steps)
    fidelity = evaluator.fidelity(params)
    schedule = to_schedule(params, n_x, steps, seed=winner, fidelity=fidelity, spsa=hyper)
    state = StateVector(n_x).apply_circuit(ansatz_circuit(schedule))
    logger.info("Variational preparation complete", n_x=n_x, steps=steps, seed=winner, fidelity=fidelity)
    return schedule, state
