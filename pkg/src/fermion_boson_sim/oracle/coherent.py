"""Displaced number states and the forced harmonic oscillator.

A constant or time-dependent force only displaces an oscillator, so its
evolution has a closed form in terms of two integrals of the drive. These
validators compare that closed form with the Trotterized grid circuit.
"""
import cmath
import math
from dataclasses import dataclass
from typing import Callable, Dict, Tuple, Union

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.special import eval_genlaguerre, gammaln

from fermion_boson_sim.core.errors import ConfigurationError, NumericError
from fermion_boson_sim.core.logging import get_logger
from fermion_boson_sim.engine.layout import QubitLayout
from fermion_boson_sim.engine.program import compile_circuit
from fermion_boson_sim.engine.statevector import StateVector
from fermion_boson_sim.model.hamiltonian import driven_oscillator
from fermion_boson_sim.model.trotter import trotter_plan
from fermion_boson_sim.oscillator.grid import make_grid, occupation_cutoff, sample_basis
from fermion_boson_sim.synth.trotter import synth_trotter_step

logger = get_logger(__name__)

MAX_LEVEL = 120
DEFAULT_PANELS = 10_000

Drive = Union[Callable[[np.ndarray], np.ndarray], np.ndarray]


@dataclass(frozen=True)
class DisplacedState:
    """D(z)|n>"""
    n: int
    z: complex

    def __post_init__(self):
        if self.n < 0:
            raise ConfigurationError(f"level must be non-negative, got {self.n}")
        if not cmath.isfinite(self.z):
            raise ConfigurationError(f"displacement must be finite, got {self.z}")

    def amplitudes(self, cutoff: int) -> np.ndarray:
        """<m|n, z> for m < cutoff"""
        return np.array([displaced_overlap(m, self.n, self.z) for m in range(cutoff)])


@dataclass(frozen=True)
class ForcedEvolution:
    """Sampled drive and the derived displacement and phase histories"""
    times: np.ndarray
    drive: np.ndarray
    omega: float
    zeta: np.ndarray
    beta: np.ndarray
    gamma: float

    @property
    def final_zeta(self) -> complex:
        return complex(self.zeta[-1])

    @property
    def final_beta(self) -> float:
        return float(self.beta[-1])


def displaced_overlap(m: int, n: int, z: complex) -> complex:
    """
    <m|D(z)|n> from the associated Laguerre polynomial

    For m >= n this is sqrt(n!/m!) z^(m-n) e^(-|z|^2/2) L_n^(m-n)(|z|^2);
    m < n uses <m|D(z)|n> = conj(<n|D(-z)|m>).

    Args:
        m: Row level
        n: Column level
        z: Displacement

    Returns:
        Complex matrix element
    """
    if m < 0 or n < 0 or m > MAX_LEVEL or n > MAX_LEVEL:
        raise ConfigurationError(f"levels must be in [0, {MAX_LEVEL}], got ({m}, {n})")
    if m < n:
        return complex(np.conj(displaced_overlap(n, m, -z)))
    r2 = abs(z) ** 2
    if r2 == 0.0:
        return 1.0 + 0j if m == n else 0j
    k = m - n
    log_mag = 0.5 * (gammaln(n + 1) - gammaln(m + 1)) + k * math.log(abs(z)) - 0.5 * r2
    laguerre = eval_genlaguerre(n, k, r2)
    value = math.exp(log_mag) * laguerre * cmath.exp(1j * k * cmath.phase(z))
    if not cmath.isfinite(value):
        raise NumericError(f"overflow in <{m}|D(z)|{n}> at |z|={abs(z)}")
    return complex(value)


def displacement_matrix(z: complex, cutoff: int) -> np.ndarray:
    """Truncated block <m|D(z)|n>, m, n < cutoff"""
    return np.array([[displaced_overlap(m, n, z) for n in range(cutoff)] for m in range(cutoff)])


def poisson_row(n: int, z: complex) -> float:
    """|<n|z>|^2 = e^(-|z|^2) |z|^(2n) / n!"""
    r2 = abs(z) ** 2
    if r2 == 0.0:
        return 1.0 if n == 0 else 0.0
    return math.exp(-r2 + n * math.log(r2) - gammaln(n + 1))


def cutoff_estimate(n: int, z_max: float, eps: float) -> int:
    """n + |z|^2 + |z| sqrt(2 (2n + 1) ln(1/eps)), rounded up"""
    if not 0.0 < eps < 1.0:
        raise ConfigurationError(f"eps must be in (0, 1), got {eps}")
    z = abs(z_max)
    return math.ceil(n + z * z + z * math.sqrt(2.0 * (2 * n + 1) * math.log(1.0 / eps)) - 1e-12)


def tail_mass(n: int, z: complex, cutoff: int) -> float:
    """Probability of D(z)|n> above level cutoff"""
    kept = sum(abs(displaced_overlap(m, n, z)) ** 2 for m in range(min(cutoff, MAX_LEVEL) + 1))
    return max(0.0, 1.0 - kept)


def cutoff_certified(n: int, z: complex, eps: float) -> int:
    """Smallest N with tail_mass(n, z, N) <= eps by direct scan"""
    if not 0.0 < eps < 1.0:
        raise ConfigurationError(f"eps must be in (0, 1), got {eps}")
    kept = 0.0
    for level in range(MAX_LEVEL + 1):
        kept += abs(displaced_overlap(level, n, z)) ** 2
        if level >= n and 1.0 - kept <= eps:
            return level
    raise NumericError(f"tail of D({z})|{n}> not below {eps} within {MAX_LEVEL} levels")


def _sample_drive(drive: Drive, times: np.ndarray) -> np.ndarray:
    if callable(drive):
        values = np.asarray(drive(times), dtype=complex)
        if values.shape == ():
            values = np.full(times.shape, complex(values))
    else:
        values = np.asarray(drive, dtype=complex)
    if values.shape != times.shape:
        raise ConfigurationError(f"drive samples have shape {values.shape}, expected {times.shape}")
    return values


def _cumulative(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    real = cumulative_simpson(values.real, x=times, initial=0.0)
    imag = cumulative_simpson(values.imag, x=times, initial=0.0)
    return real + 1j * imag


def forced_history(drive: Drive, omega: float, t: float, panels: int = DEFAULT_PANELS) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    zeta(u) = -i int_0^u f*(s) e^{i omega s} ds and
    beta(u) = -Im int_0^u f(s) e^{-i omega s} int_0^s f*(r) e^{i omega r} dr ds
    on a uniform grid, by composite Simpson quadrature
    """
    if panels < 2 or panels % 2:
        raise ConfigurationError(f"panels must be an even count >= 2, got {panels}")
    times = np.linspace(0.0, t, panels + 1)
    f = _sample_drive(drive, times)
    inner = _cumulative(np.conj(f) * np.exp(1j * omega * times), times)
    zeta = -1j * inner
    beta = -_cumulative(f * np.exp(-1j * omega * times) * inner, times).imag
    return times, f, zeta, beta


def forced_evolution(
    state: DisplacedState,
    drive: Drive,
    omega: float,
    t: float,
    panels: int = DEFAULT_PANELS,
) -> Tuple[DisplacedState, Dict[str, float], ForcedEvolution]:
    """
    Evolve |n, z> under omega (b^dag b + 1/2) + f(t) b + f*(t) b^dag

    The result is e^{i phase} |n, (zeta + z) e^{-i omega t}> with
    phase = gamma + beta - n omega t - omega t / 2 and gamma = Im(zeta z*).

    Args:
        state: Initial displaced number state
        drive: Callable f(u) or samples on the panels + 1 point grid
        omega: Oscillator frequency
        t: Evolution time
        panels: Even Simpson panel count

    Returns:
        Final state, phase dictionary and the sampled history
    """
    if omega <= 0:
        raise ConfigurationError(f"omega must be positive, got {omega}")
    times, f, zeta, beta = forced_history(drive, omega, t, panels)
    zeta_t = complex(zeta[-1])
    gamma = (zeta_t * np.conj(state.z)).imag
    final = DisplacedState(state.n, (zeta_t + state.z) * cmath.exp(-1j * omega * t))
    phases = {
        "gamma": float(gamma),
        "beta": float(beta[-1]),
        "dynamic": -state.n * omega * t,
        "zero_point": -0.5 * omega * t,
    }
    phases["total"] = sum(phases.values())
    history = ForcedEvolution(times=times, drive=f, omega=omega, zeta=zeta, beta=beta, gamma=float(gamma))
    return final, phases, history


def constant_drive_zeta(f: complex, omega: float, t: float) -> complex:
    """Closed form of zeta for a constant drive: -f* (e^{i omega t} - 1) / omega"""
    return -np.conj(f) * (cmath.exp(1j * omega * t) - 1.0) / omega


def forced_circuit_overlap(g: float = 0.5, t: float = 1.0, n_x: int = 6, steps: int = 256) -> float:
    """
    |<0, w|psi>| between the Trotterized grid evolution of chi_0 under
    (P^2 + X^2)/2 + g X and the analytic displaced state

    Args:
        g: Linear force on X
        t: Evolution time
        n_x: Register width
        steps: Trotter steps

    Returns:
        Overlap magnitude
    """
    layout = QubitLayout.standard(0, 1, n_x)
    plan = trotter_plan(driven_oscillator(1.0, g), t, steps)
    program = compile_circuit(synth_trotter_step(plan, layout).circuit)
    grid = make_grid(n_x)
    levels = min(occupation_cutoff(grid), grid.n_points - 1)
    chi = sample_basis(grid, levels).chi

    state = StateVector(layout.n_qubits, chi[:, 0], layout=layout).normalize()
    program.run(state, repetitions=steps)

    # X = (b + b^dag) / sqrt(2) at omega = 1, so f = g / sqrt(2)
    final, _, _ = forced_evolution(DisplacedState(0, 0j), lambda u: np.full_like(u, g / math.sqrt(2.0)), 1.0, t)
    target = chi @ final.amplitudes(levels)
    target /= np.linalg.norm(target)
    overlap = abs(np.vdot(target, state.amplitudes))
    logger.info("Forced oscillator check", g=g, t=t, n_x=n_x, steps=steps, overlap=overlap)
    return float(overlap)
