"""Data tables behind the figure subcommands."""
import math
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from fermion_boson_sim.core.logging import get_logger
from fermion_boson_sim.model.hamiltonian import coupling_for_alpha
from fermion_boson_sim.oracle.fock import ed_holstein
from fermion_boson_sim.oscillator.grid import (
    commutator_residuals,
    eigen_overlaps,
    envelope,
    grid_spectrum,
    half_width_for_level,
    make_grid,
    min_grid_empirical,
    min_grid_for_cutoff,
    nyquist_bound,
    occupation_cutoff,
)
from fermion_boson_sim.workers.pool import ordered_map

logger = get_logger(__name__)

Table = Tuple[List[str], List[Dict[str, Any]]]


def fig1(n_x: int = 6, levels: int = 16) -> Table:
    """Discrete spectrum against n + 1/2, and eigenvector overlaps with sampled HG functions"""
    grid = make_grid(n_x)
    values, _ = grid_spectrum(n_x)
    levels = min(levels, grid.n_points - 1)
    overlaps = eigen_overlaps(grid, levels)
    rows = [
        {
            "n": n,
            "energy": float(values[n]),
            "exact": n + 0.5,
            "error": abs(float(values[n]) - (n + 0.5)),
            "overlap": float(overlaps[n]),
        }
        for n in range(levels)
    ]
    return ["n", "energy", "exact", "error", "overlap"], rows


def fig2(widths: Sequence[int], eps: float = 1e-3) -> Table:
    """Commutator residual per level with the exponential bound, for each register width"""
    rows = []
    for n_x in widths:
        grid = make_grid(n_x)
        residuals = commutator_residuals(grid)
        for n in range(occupation_cutoff(grid, eps)):
            rows.append({
                "n_x": n_x,
                "N_x": grid.n_points,
                "n": n,
                "residual": float(residuals[n]),
                "bound": float(envelope(grid.n_points, n)),
            })
    return ["n_x", "N_x", "n", "residual", "bound"], rows


def fig3(widths: Sequence[int], levels: Sequence[int], eps: float = 1e-3) -> Table:
    """
    Panel a: measured N_ph per grid against the sampling bound.
    Panel b: half-width holding level n against the turning point.
    """
    rows: List[Dict[str, Any]] = []
    for n_x in widths:
        grid = make_grid(n_x)
        n_ph = occupation_cutoff(grid, eps)
        rows.append({
            "panel": "a",
            "x": grid.n_points,
            "value": n_ph,
            "reference": nyquist_bound(n_ph),
            "extra": min_grid_for_cutoff(max(1, n_ph)),
            "empirical": min_grid_empirical(max(1, n_ph), eps),
        })
    for n in levels:
        rows.append({
            "panel": "b",
            "x": n,
            "value": half_width_for_level(n, eps),
            "reference": math.sqrt(2 * n + 1),
            "extra": "",
            "empirical": "",
        })
    return ["panel", "x", "value", "reference", "extra", "empirical"], rows


def _ed_point(args: Tuple[float, int]) -> Dict[str, Any]:
    alpha, n_ph = args
    result = ed_holstein(1.0, coupling_for_alpha(alpha), 1.0, n_ph=n_ph)
    return {"alpha": alpha, "E0": result.ground_energy, "Z": result.z}


def fig9(alphas: Sequence[float], n_ph: int = 45, n_show: int = 15) -> Table:
    """Polaron energy, quasiparticle weight and phonon distribution over alpha"""
    points = ordered_map(_ed_point, [(a, n_ph) for a in alphas], label="fig9")
    rows = []
    for point in points:
        z = np.asarray(point["Z"])
        for n in range(min(n_show, z.size)):
            rows.append({
                "alpha": point["alpha"],
                "E0": point["E0"],
                "Z0": float(z[0]),
                "n": n,
                "Zn": float(z[n]),
            })
    logger.info("Figure data generated", figure="fig9", points=len(points))
    return ["alpha", "E0", "Z0", "n", "Zn"], rows
