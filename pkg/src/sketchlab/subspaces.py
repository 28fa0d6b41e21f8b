"""Subspaces, principal angles, and the Finsler metric on projector space.

A subspace is stored as an orthonormal basis.  The Finsler distance between
two subspaces is the operator norm of the difference of their orthogonal
projectors; at equal dimensions it coincides with the sine of the largest
principal angle.  Parametrized families of subspaces carry an optional
covering profile of their parameter space under this metric.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .validation import as_matrix

__all__ = [
    "Subspace",
    "UoSFamily",
    "projector",
    "principal_angles",
    "finsler_distance",
    "joint_subspace",
    "rotating_plane_family",
    "random_subspace",
]

_ORTHO_TOL = 1e-12
_RANK_REL_TOL = 1e-10


@dataclass(frozen=True)
class Subspace:
    """An n x k orthonormal basis; columns span the subspace."""

    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        B = as_matrix(self.basis, name="basis")
        if B.shape[1] == 0:
            raise ValueError("subspace must have dimension >= 1")
        if B.shape[0] < B.shape[1]:
            raise ValueError(f"basis is {B.shape}: more columns than ambient dimension")
        gram_err = np.abs(B.T @ B - np.eye(B.shape[1])).max()
        if gram_err > _ORTHO_TOL:
            raise ValueError(
                f"basis columns are not orthonormal (max Gram deviation {gram_err:.2e}); "
                "use Subspace.from_span to orthonormalize"
            )
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @classmethod
    def from_span(cls, A):
        """Orthonormalize the columns of A (QR with column pivoting, rank
        threshold 1e-10 relative) and return the spanned subspace."""
        A = as_matrix(A, name="A")
        Q, R, _ = scipy.linalg.qr(A, mode="economic", pivoting=True)
        diag = np.abs(np.diag(R))
        if diag.size == 0 or diag[0] == 0.0:
            raise ValueError("A has rank 0")
        rank = int(np.sum(diag > _RANK_REL_TOL * diag[0]))
        return cls(Q[:, :rank])

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    @property
    def dim(self):
        return self.basis.shape[1]


def projector(S):
    """Orthogonal projector P = B B^T onto the subspace."""
    B = S.basis
    return B @ B.T


def principal_angles(U, V):
    """Principal angles between two subspaces, largest first.

    Computed as arccos of the singular values of B_U^T B_V, clipped to [0, 1]
    to guard rounding; the sequence has length min(dim U, dim V).
    """
    if U.ambient_dim != V.ambient_dim:
        raise ValueError("subspaces live in different ambient dimensions")
    sigma = np.linalg.svd(U.basis.T @ V.basis, compute_uv=False)
    return np.arccos(np.clip(sigma, 0.0, 1.0))[::-1]


def finsler_distance(U, V):
    """Operator-norm distance ||P_U - P_V|| between the projectors.

    Always in [0, 1]; for dim U = dim V this equals the sine of the largest
    principal angle.
    """
    if U.ambient_dim != V.ambient_dim:
        raise ValueError("subspaces live in different ambient dimensions")
    d = np.linalg.norm(projector(U) - projector(V), ord=2)
    return float(min(d, 1.0))


def joint_subspace(U, V):
    """Orthonormal basis of span(U ∪ V)."""
    if U.ambient_dim != V.ambient_dim:
        raise ValueError("subspaces live in different ambient dimensions")
    return Subspace.from_span(np.hstack([U.basis, V.basis]))


@dataclass(frozen=True)
class UoSFamily:
    """Union of subspaces over a parameter domain.

    Parameters
    ----------
    domain : tuple or sequence
        Either an interval ``(lo, hi)`` of floats or a finite sequence of
        parameter values.
    subspace_of : callable
        Maps a parameter value to a :class:`Subspace`.
    K : int
        Maximum subspace dimension over the domain.
    finsler_profile : tuple or None
        Optional ``(K_Fin, c, N0)`` covering profile of the parameter space
        under the Finsler metric.
    """

    domain: object
    subspace_of: object = field(repr=False)
    K: int
    finsler_profile: tuple | None = None

    @property
    def is_finite(self):
        return not (
            isinstance(self.domain, tuple)
            and len(self.domain) == 2
            and all(isinstance(v, float) for v in self.domain)
        )

    def parameters(self):
        """The parameter list for finite families."""
        if not self.is_finite:
            raise ValueError("family has a continuous parameter domain")
        return list(self.domain)

    def sample_parameter(self, rng):
        if self.is_finite:
            params = self.parameters()
            return params[rng.integers(0, len(params))]
        lo, hi = self.domain
        return float(rng.uniform(lo, hi))


def rotating_plane_family(n):
    """The family theta in [0, pi/2] -> span{cos(theta) e1 + sin(theta) e2, e3}.

    A concrete one-parameter plane family in R^n (n >= 3): the Finsler
    distance between parameters theta, theta' is sin|theta - theta'|, so the
    parameter space has covering profile (K_Fin, c, N0) = (1, pi/2, 1).
    """
    if n < 3:
        raise ValueError(f"rotating plane family needs ambient n >= 3, got {n}")

    def subspace_of(theta):
        B = np.zeros((n, 2))
        B[0, 0] = math.cos(theta)
        B[1, 0] = math.sin(theta)
        B[2, 1] = 1.0
        return Subspace(B)

    return UoSFamily((0.0, math.pi / 2.0), subspace_of, 2, (1, math.pi / 2.0, 1.0))


def random_subspace(n, k, rng):
    """Uniformly distributed k-dimensional subspace of R^n."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    A = rng.standard_normal((n, k))
    Q, _ = np.linalg.qr(A)
    return Subspace(Q[:, :k])
