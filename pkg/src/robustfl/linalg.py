"""Dense real-matrix helpers.

Singular values follow the ascending convention used throughout the package:
``sigma[0]`` is the *smallest* singular value.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, ValidationError


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Return ``m`` as a finite 2-D float array, raising on anything else."""
    a = np.array(m, dtype=float)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} has non-finite entries")
    return a


def singular_values(m) -> np.ndarray:
    """All ``min(rows, cols)`` singular values of ``m`` in ascending order."""
    a = as_matrix(m)
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)[::-1].copy()


def min_singular_value(m) -> float:
    """Smallest singular value; 0 for a wide matrix with a zero row."""
    s = singular_values(m)
    return float(s[0]) if s.size else 0.0


def max_singular_value(m) -> float:
    s = singular_values(m)
    return float(s[-1]) if s.size else 0.0


def spectral_norm(m) -> float:
    return max_singular_value(m)


def pseudoinverse(m) -> np.ndarray:
    """Moore-Penrose pseudoinverse. Rank-deficient inputs are fine."""
    a = as_matrix(m)
    return np.linalg.pinv(a)


def default_rank_tol(m) -> float:
    a = np.asarray(m)
    return np.finfo(float).eps * max(a.shape)


def numerical_rank(m, rel_tol: float | None = None) -> int:
    """Number of singular values above ``rel_tol * sigma_max``.

    The default tolerance is machine epsilon times the largest dimension.
    """
    a = as_matrix(m)
    if rel_tol is None:
        rel_tol = default_rank_tol(a)
    if not rel_tol > 0:
        raise ValidationError("rel_tol must be positive")
    s = singular_values(a)
    if s.size == 0 or s[-1] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[-1]))
