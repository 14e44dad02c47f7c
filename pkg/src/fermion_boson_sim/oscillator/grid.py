"""Sampled Hermite-Gauss basis and discrete position/momentum operators.

A register of n_x qubits stores one oscillator on N_x = 2**n_x grid points
x_i = (i - N_x/2) * delta with delta = sqrt(2 pi / N_x). The same points serve
as momentum eigenvalues, so the centered unitary DFT maps one grid onto the
other.
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field
from scipy import integrate, optimize

from fermion_boson_sim.core.config import settings
from fermion_boson_sim.core.errors import ConfigurationError, DimensionError, UnsupportedOrderError
from fermion_boson_sim.core.logging import get_logger
from fermion_boson_sim.utils.cache import cached
from fermion_boson_sim.utils.linalg import fix_phases, hermitian_eigh

logger = get_logger(__name__)

MAX_HG_ORDER = 128
MIN_NX = 2
MAX_NX = 14
DEFAULT_EPS = 1e-8


class GridSpec(BaseModel):
    """Discretization geometry of one oscillator register"""
    n_x: int = Field(..., description="Qubits per oscillator")
    n_points: int = Field(..., description="Grid size N_x = 2**n_x")
    delta: float = Field(..., description="Grid spacing sqrt(2 pi / N_x)")
    half_width: float = Field(..., description="L = N_x * delta / 2")

    class Config:
        frozen = True

    @property
    def positions(self) -> np.ndarray:
        """Ascending grid values (i - N_x/2) * delta; also the momentum grid"""
        return (np.arange(self.n_points) - self.n_points // 2) * self.delta

    @property
    def momenta_uncentered(self) -> np.ndarray:
        """Momentum eigenvalue of uncentered Fourier index n"""
        n = np.arange(self.n_points)
        return np.where(n < self.n_points // 2, n, n - self.n_points) * self.delta


@dataclass(frozen=True)
class SampledBasis:
    grid: GridSpec
    chi: np.ndarray
    n_reliable: int

    @property
    def reliable(self) -> np.ndarray:
        """Per-column flag: True for n below the occupation cutoff"""
        return np.arange(self.chi.shape[1]) < self.n_reliable


@dataclass(frozen=True)
class DiscreteOperators:
    grid: GridSpec
    x_op: np.ndarray
    p_op: np.ndarray
    h_op: np.ndarray
    fourier: np.ndarray


def hermite_gauss(n: int, x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """
    Evaluate the normalized Hermite-Gauss function phi_n(x)

    Args:
        n: Order, 0 <= n <= 128
        x: Point or array of points

    Returns:
        phi_n(x) with the same shape as x
    """
    table = hermite_gauss_table(n + 1, x)
    value = table[..., n]
    return float(value) if np.ndim(value) == 0 else value


def hermite_gauss_table(count: int, x: Union[float, np.ndarray]) -> np.ndarray:
    """
    All orders 0..count-1 of phi_n at x, stacked on the last axis

    Args:
        count: Number of orders
        x: Point or array of points

    Returns:
        Array of shape x.shape + (count,)
    """
    if count < 1:
        raise ConfigurationError(f"order count must be positive, got {count}")
    if count - 1 > MAX_HG_ORDER:
        raise UnsupportedOrderError(
            f"Hermite-Gauss order {count - 1} exceeds supported maximum {MAX_HG_ORDER}"
        )
    x = np.asarray(x, dtype=float)
    table = np.empty(x.shape + (count,))
    table[..., 0] = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    if count > 1:
        table[..., 1] = math.sqrt(2.0) * x * table[..., 0]
    for k in range(1, count - 1):
        table[..., k + 1] = (
            x * math.sqrt(2.0 / (k + 1)) * table[..., k]
            - math.sqrt(k / (k + 1)) * table[..., k - 1]
        )
    return table


def make_grid(n_x: int) -> GridSpec:
    """
    Build the grid geometry for an n_x-qubit register

    Args:
        n_x: Qubit count, 2 <= n_x <= 14

    Returns:
        GridSpec with N_x = 2**n_x, delta = sqrt(2 pi / N_x)
    """
    if not isinstance(n_x, (int, np.integer)) or not MIN_NX <= n_x <= MAX_NX:
        raise ConfigurationError(f"n_x must be an integer in [{MIN_NX}, {MAX_NX}], got {n_x}")
    n_points = 2 ** int(n_x)
    delta = math.sqrt(2.0 * math.pi / n_points)
    return GridSpec(
        n_x=int(n_x),
        n_points=n_points,
        delta=delta,
        half_width=0.5 * n_points * delta,
    )


def sample_basis(grid: GridSpec, n_max: int, eps: float = DEFAULT_EPS) -> SampledBasis:
    """
    Sample chi_n = sqrt(delta) phi_n(x_i) for n < n_max

    Args:
        grid: Grid geometry
        n_max: Number of columns, must be below N_x
        eps: Residual tolerance defining the reliable count

    Returns:
        SampledBasis with columns beyond the occupation cutoff flagged
    """
    if n_max < 1 or n_max >= grid.n_points:
        raise DimensionError(f"n_max={n_max} must be in [1, {grid.n_points})")
    chi = math.sqrt(grid.delta) * hermite_gauss_table(n_max, grid.positions)
    chi.setflags(write=False)
    n_reliable = occupation_cutoff(grid, eps) if grid.n_x <= settings.MAX_DIAGNOSTIC_NX else n_max
    return SampledBasis(grid=grid, chi=chi, n_reliable=min(n_reliable, n_max))


def centered_dft(grid: GridSpec) -> np.ndarray:
    """F[m, i] = exp(-i x_i p_m) / sqrt(N_x)"""
    x = grid.positions
    return np.exp(-1j * np.outer(x, x)) / math.sqrt(grid.n_points)


def build_operators(grid: GridSpec) -> DiscreteOperators:
    """
    Materialize x_op, p_op = F^dag diag(p) F and h_op = (p_op^2 + x_op^2)/2

    Args:
        grid: Grid geometry (dense diagnostics are capped by MAX_DIAGNOSTIC_NX)

    Returns:
        DiscreteOperators
    """
    if grid.n_x > settings.MAX_DIAGNOSTIC_NX:
        raise DimensionError(
            f"dense operators limited to n_x <= {settings.MAX_DIAGNOSTIC_NX}, got {grid.n_x}"
        )
    x = grid.positions
    fourier = centered_dft(grid)
    x_op = np.diag(x).astype(complex)
    p_op = fourier.conj().T @ (x[:, np.newaxis] * fourier)
    p_op = 0.5 * (p_op + p_op.conj().T)
    h_op = 0.5 * (p_op @ p_op + np.diag(x * x))
    h_op = 0.5 * (h_op + h_op.conj().T)
    return DiscreteOperators(grid=grid, x_op=x_op, p_op=p_op, h_op=h_op, fourier=fourier)


def spectrum(ops: DiscreteOperators) -> Tuple[np.ndarray, np.ndarray]:
    """
    All eigenpairs of the discrete oscillator Hamiltonian

    Args:
        ops: Discrete operators

    Returns:
        Ascending eigenvalues and phase-fixed column eigenvectors
    """
    values, vectors = hermitian_eigh(ops.h_op)
    return values, fix_phases(vectors)


@cached("grid_spectrum", key_builder=lambda n_x: str(n_x))
def grid_spectrum(n_x: int) -> Tuple[np.ndarray, np.ndarray]:
    """Cached spectrum of the n_x-qubit oscillator"""
    values, vectors = spectrum(build_operators(make_grid(n_x)))
    values.setflags(write=False)
    vectors.setflags(write=False)
    return values, vectors


@cached("commutator_residuals", key_builder=lambda n_x: str(n_x))
def _residuals(n_x: int) -> np.ndarray:
    grid = make_grid(n_x)
    ops = build_operators(grid)
    _, vectors = grid_spectrum(n_x)
    defect = ops.x_op @ ops.p_op - ops.p_op @ ops.x_op - 1j * np.eye(grid.n_points)
    norms = np.linalg.norm(defect @ vectors, axis=0)
    norms.setflags(write=False)
    return norms


def commutator_residual(grid: GridSpec, n: int) -> float:
    """
    Norm of ([x, p] - i) applied to the n-th eigenvector of h_op

    Args:
        grid: Grid geometry
        n: Level, below N_x

    Returns:
        Residual 2-norm
    """
    if not 0 <= n < grid.n_points:
        raise DimensionError(f"level {n} outside [0, {grid.n_points})")
    return float(_residuals(grid.n_x)[n])


def commutator_residuals(grid: GridSpec) -> np.ndarray:
    """Residuals for every level of the grid"""
    return _residuals(grid.n_x)


def envelope(n_points: int, n: Union[int, np.ndarray]) -> Union[float, np.ndarray]:
    """Empirical error law 10 exp(-(0.51 N_x - 0.765 n))"""
    return 10.0 * np.exp(-(0.51 * n_points - 0.765 * np.asarray(n, dtype=float)))


def occupation_cutoff(grid: GridSpec, eps: float = DEFAULT_EPS) -> int:
    """
    Operational N_ph: count of leading levels whose commutator residual stays below eps

    Args:
        grid: Grid geometry
        eps: Tolerance

    Returns:
        Number of faithfully represented low-energy levels
    """
    residuals = commutator_residuals(grid)
    failing = np.nonzero(residuals >= eps)[0]
    return int(failing[0]) if failing.size else grid.n_points


def nyquist_bound(n_ph: int) -> float:
    """Sampling-theorem estimate (4/pi) N_ph + 2/pi of the required grid size"""
    return 4.0 / math.pi * n_ph + 2.0 / math.pi


def min_grid_for_cutoff(n_ph: int) -> int:
    """
    Smallest power-of-two grid exceeding the Nyquist bound, at least 4

    Args:
        n_ph: Occupation cutoff, >= 1

    Returns:
        Minimum N_x
    """
    if n_ph < 1:
        raise ConfigurationError(f"N_ph must be >= 1, got {n_ph}")
    bound = nyquist_bound(n_ph)
    n_points = 2 ** max(MIN_NX, math.ceil(math.log2(bound)))
    if n_points <= bound:
        n_points *= 2
    return n_points


def min_grid_empirical(n_ph: int, eps: float, max_nx: Optional[int] = None) -> int:
    """
    Smallest N_x whose measured residual is below eps for every n < n_ph

    Args:
        n_ph: Occupation cutoff
        eps: Residual tolerance
        max_nx: Largest register scanned (defaults to MAX_DIAGNOSTIC_NX)

    Returns:
        Minimum N_x found by the scan
    """
    limit = max_nx or settings.MAX_DIAGNOSTIC_NX
    for n_x in range(MIN_NX, limit + 1):
        grid = make_grid(n_x)
        if n_ph <= grid.n_points and occupation_cutoff(grid, eps) >= n_ph:
            return grid.n_points
    raise DimensionError(f"no grid up to n_x={limit} holds {n_ph} levels at eps={eps}")


def dft_deviation(basis: SampledBasis) -> np.ndarray:
    """Per-column ||F chi_n - (-i)^n chi_n||"""
    fourier = centered_dft(basis.grid)
    orders = np.arange(basis.chi.shape[1])
    expected = basis.chi * ((-1j) ** orders)[np.newaxis, :]
    return np.linalg.norm(fourier @ basis.chi - expected, axis=0)


def dft_eigencheck(basis: SampledBasis) -> float:
    """
    Largest deviation from the DFT eigenrelation over reliable columns

    Args:
        basis: Sampled basis

    Returns:
        max_n ||F chi_n - (-i)^n chi_n|| for n below the cutoff
    """
    deviations = dft_deviation(basis)[basis.reliable]
    return float(deviations.max()) if deviations.size else float("nan")


def ladder_residual(basis: SampledBasis, n: int) -> float:
    """||x chi_n - (sqrt(n+1) chi_{n+1} + sqrt(n) chi_{n-1}) / sqrt(2)||"""
    if not 0 <= n < basis.chi.shape[1] - 1:
        raise DimensionError(f"ladder check needs columns n and n+1, got n={n}")
    chi = basis.chi
    target = math.sqrt(n + 1) * chi[:, n + 1]
    if n > 0:
        target = target + math.sqrt(n) * chi[:, n - 1]
    return float(np.linalg.norm(basis.grid.positions * chi[:, n] - target / math.sqrt(2.0)))


def eigen_overlaps(grid: GridSpec, n_max: int) -> np.ndarray:
    """|<phi~_n|chi_n>| for n < n_max"""
    basis = sample_basis(grid, n_max)
    _, vectors = grid_spectrum(grid.n_x)
    return np.abs(np.einsum("in,in->n", vectors[:, :n_max].conj(), basis.chi))


def half_width_for_level(n: int, eps: float) -> float:
    """
    Half-width L with 1 - integral_{-L}^{L} |phi_n|^2 dx = eps

    Args:
        n: Hermite-Gauss order
        eps: Excluded probability

    Returns:
        L
    """
    if not 0 < eps < 1:
        raise ConfigurationError(f"eps must lie in (0, 1), got {eps}")

    def tail(L: float) -> float:
        value, _ = integrate.quad(lambda x: hermite_gauss(n, x) ** 2, L, np.inf, limit=200)
        return 2.0 * value - eps

    upper = math.sqrt(2 * n + 1) + 2.0
    while tail(upper) > 0:
        upper *= 1.5
    return float(optimize.brentq(tail, 0.0, upper, xtol=1e-12))
