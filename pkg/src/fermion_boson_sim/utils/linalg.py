from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from fermion_boson_sim.core.errors import NumericError
from fermion_boson_sim.utils.retry import sync_retry


@sync_retry(variants=[{"driver": "evr"}, {"driver": "evd"}, {"driver": "evx"}])
def hermitian_eigh(
    matrix: np.ndarray,
    driver: Optional[str] = None,
    subset_by_index: Optional[Tuple[int, int]] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Hermitian eigendecomposition with LAPACK driver fallback

    Args:
        matrix: Dense Hermitian matrix
        driver: LAPACK driver name
        subset_by_index: Inclusive index range of eigenpairs to keep

    Returns:
        Ascending eigenvalues and column eigenvectors
    """
    values, vectors = scipy.linalg.eigh(
        matrix,
        driver=driver,
        subset_by_index=subset_by_index,
        check_finite=True,
    )
    if not (np.all(np.isfinite(values)) and np.all(np.isfinite(vectors))):
        raise np.linalg.LinAlgError("non-finite eigenpairs")
    return values, vectors


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude component is real positive"""
    fixed = np.array(vectors, dtype=complex, copy=True)
    pivots = np.argmax(np.abs(fixed), axis=0)
    anchors = fixed[pivots, np.arange(fixed.shape[1])]
    norms = np.abs(anchors)
    if np.any(norms == 0):
        raise NumericError("zero eigenvector column")
    fixed *= (norms / anchors)[np.newaxis, :]
    return fixed


def expm_hermitian(matrix: np.ndarray, theta: float) -> np.ndarray:
    """Return exp(-i theta H) for a Hermitian H via its eigendecomposition"""
    values, vectors = hermitian_eigh(np.asarray(matrix, dtype=complex))
    return (vectors * np.exp(-1j * theta * values)) @ vectors.conj().T
