"""Input validation helpers shared across the package.

All public entry points funnel array-like inputs through these functions so
that shape and finiteness errors surface with a consistent message instead of
propagating as downstream linear-algebra failures.
"""

import numpy as np

__all__ = [
    "as_vector",
    "as_point_set",
    "as_matrix",
    "check_seed",
    "InfeasibleError",
]


class InfeasibleError(ValueError):
    """Raised when a guarded combinatorial or size limit would be exceeded."""


def as_vector(x, name="x"):
    """Coerce to a finite 1-d float array."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-d, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_point_set(points, name="points", min_points=1):
    """Coerce to a finite 2-d float array with rows as points."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-d (rows are points), got shape {arr.shape}")
    if arr.shape[0] < min_points:
        raise ValueError(f"{name} needs at least {min_points} point(s), got {arr.shape[0]}")
    if arr.shape[1] == 0:
        raise ValueError(f"{name} has zero ambient dimension")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_matrix(A, name="A"):
    """Coerce to a finite 2-d float array."""
    arr = np.asarray(A, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-d, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_seed(seed):
    """Validate a 64-bit integer seed and reduce it modulo 2**64."""
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    return int(seed) % (1 << 64)
