import math

import numpy as np
import pytest

from fermion_boson_sim.core.errors import ConfigurationError, DimensionError, UnsupportedOrderError
from fermion_boson_sim.oscillator.grid import (
    build_operators,
    commutator_residual,
    commutator_residuals,
    dft_eigencheck,
    eigen_overlaps,
    envelope,
    grid_spectrum,
    half_width_for_level,
    hermite_gauss,
    hermite_gauss_table,
    ladder_residual,
    make_grid,
    min_grid_empirical,
    min_grid_for_cutoff,
    nyquist_bound,
    occupation_cutoff,
    sample_basis,
)


def test_make_grid_geometry():
    """
    Test grid spacing and half-width
    """
    grid = make_grid(6)
    assert grid.n_points == 64
    assert grid.delta == pytest.approx(math.sqrt(2 * math.pi / 64))
    assert grid.half_width == pytest.approx(math.sqrt(2 * math.pi * 64) / 2)
    assert grid.positions[32] == 0.0
    assert grid.positions[0] == pytest.approx(-grid.half_width)


@pytest.mark.parametrize("n_x", [1, 15, 3.5])
def test_make_grid_rejects_bad_width(n_x):
    """
    Test register widths outside the supported range
    """
    with pytest.raises(ConfigurationError):
        make_grid(n_x)


def test_hermite_gauss_low_orders():
    """
    Test closed forms of phi_0 and phi_1
    """
    x = np.linspace(-3, 3, 7)
    phi0 = math.pi ** -0.25 * np.exp(-x * x / 2)
    assert np.allclose(hermite_gauss(0, x), phi0)
    assert np.allclose(hermite_gauss(1, x), math.sqrt(2.0) * x * phi0)
    assert hermite_gauss(3, 0.0) == pytest.approx(0.0, abs=1e-15)


def test_hermite_gauss_normalized():
    """
    Test that high orders stay normalized on a fine quadrature
    """
    x = np.linspace(-25, 25, 20001)
    table = hermite_gauss_table(101, x)
    norms = np.trapz(table ** 2, x, axis=0)
    assert np.allclose(norms, 1.0, atol=1e-8)


def test_hermite_gauss_order_limit():
    """
    Test that orders above the maximum are rejected
    """
    with pytest.raises(UnsupportedOrderError):
        hermite_gauss(129, 0.0)


def test_discrete_spectrum_matches_oscillator():
    """
    Test that the 16 lowest levels at n_x = 6 are n + 1/2
    """
    values, _ = grid_spectrum(6)
    assert np.max(np.abs(values[:16] - (np.arange(16) + 0.5))) <= 1e-6


def test_operators_hermitian():
    """
    Test that x, p and h are Hermitian
    """
    ops = build_operators(make_grid(4))
    for op in (ops.x_op, ops.p_op, ops.h_op):
        assert np.allclose(op, op.conj().T)


def test_dft_eigenrelation():
    """
    Test F chi_n = (-i)^n chi_n for the reliable columns
    """
    basis = sample_basis(make_grid(6), 16)
    assert dft_eigencheck(basis) <= 1e-6


def test_sample_basis_orthonormal():
    """
    Test orthonormality of the sampled columns below the cutoff
    """
    basis = sample_basis(make_grid(6), 16)
    gram = basis.chi.T @ basis.chi
    assert np.allclose(gram, np.eye(16), atol=1e-8)
    assert not basis.chi.flags.writeable


def test_sample_basis_rejects_too_many_columns():
    """
    Test that n_max must be below N_x
    """
    with pytest.raises(DimensionError):
        sample_basis(make_grid(3), 8)


@pytest.mark.parametrize("n_x", [5, 6, 7])
def test_commutator_residuals_below_envelope(n_x):
    """
    Test the exponential error law for every level below the cutoff
    """
    grid = make_grid(n_x)
    residuals = commutator_residuals(grid)
    n_ph = occupation_cutoff(grid, 1e-3)
    n = np.arange(n_ph)
    assert np.all(residuals[:n_ph] <= envelope(grid.n_points, n) + 1e-10)


def test_occupation_cutoff_grows_with_grid():
    """
    Test that larger grids hold more levels
    """
    cutoffs = [occupation_cutoff(make_grid(n_x), 1e-3) for n_x in (4, 5, 6)]
    assert cutoffs == sorted(cutoffs)
    assert cutoffs[-1] > cutoffs[0]


def test_nyquist_bound_and_min_grid():
    """
    Test the sampling estimate and its power-of-two rounding
    """
    assert nyquist_bound(0) == pytest.approx(2 / math.pi)
    assert min_grid_for_cutoff(1) == 4
    for n_ph in (5, 12, 40):
        n_points = min_grid_for_cutoff(n_ph)
        assert n_points > nyquist_bound(n_ph)
        assert n_points / 2 <= nyquist_bound(n_ph) or n_points == 4
    with pytest.raises(ConfigurationError):
        min_grid_for_cutoff(0)


def test_single_level_residual():
    """
    Test the per-level accessor and its range check
    """
    grid = make_grid(5)
    assert commutator_residual(grid, 3) == pytest.approx(commutator_residuals(grid)[3])
    with pytest.raises(DimensionError):
        commutator_residual(grid, grid.n_points)


def test_min_grid_empirical():
    """
    Test that the scanned grid holds the requested levels and is the smallest such grid
    """
    n_points = min_grid_empirical(10, 1e-3)
    n_x = int(math.log2(n_points))
    assert occupation_cutoff(make_grid(n_x), 1e-3) >= 10
    assert occupation_cutoff(make_grid(n_x - 1), 1e-3) < 10 or n_points // 2 < 10
    with pytest.raises(DimensionError):
        min_grid_empirical(10 ** 4, 1e-3, max_nx=4)


def test_ladder_residual_small():
    """
    Test the position recurrence on sampled columns
    """
    basis = sample_basis(make_grid(6), 12)
    assert max(ladder_residual(basis, n) for n in range(10)) < 1e-8


def test_eigen_overlaps_near_one():
    """
    Test that discrete eigenvectors match sampled HG functions
    """
    overlaps = eigen_overlaps(make_grid(6), 12)
    assert np.all(overlaps > 1 - 1e-8)


def test_half_width_for_level():
    """
    Test the excluded tail of phi_0 against erfc
    """
    eps = 1e-3
    L = half_width_for_level(0, eps)
    assert math.erfc(L) == pytest.approx(eps, rel=1e-6)
    assert half_width_for_level(10, eps) > math.sqrt(21)
