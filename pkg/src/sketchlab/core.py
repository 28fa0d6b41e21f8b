"""Point-set primitives and the subgaussian norm estimator.

A point set is a plain 2-d float array with one point per row.  The helpers
here derive the secondary sets that distortion measurements run over (chords,
normalized chords, normalized vectors) and estimate the subgaussian scale of
scalar samples.  Sets use value semantics: duplicate rows are merged and zero
rows are dropped where the definition requires it.
"""

import numpy as np

from .validation import as_point_set, as_vector

__all__ = [
    "chords",
    "normalized_chords",
    "normalized_vectors",
    "euclidean",
    "check_semimetric",
    "psi2_norm_estimate",
]


def _dedupe_rows(arr):
    # np.unique sorts rows; ordering is irrelevant under set semantics and
    # the sort keeps output deterministic.
    return np.unique(arr, axis=0)


def chords(points):
    """Return the difference set {x - y : x, y in P, x != y}.

    Parameters
    ----------
    points : array_like, shape (N, n)
        Point set with at least two points.

    Returns
    -------
    ndarray, shape (M, n)
        Deduplicated nonzero differences.  Pairs with equal values produce a
        zero difference and are skipped.

    Raises
    ------
    ValueError
        If the input has fewer than two points or every pair coincides.
    """
    P = as_point_set(points, min_points=2)
    diffs = (P[:, None, :] - P[None, :, :]).reshape(-1, P.shape[1])
    norms = np.linalg.norm(diffs, axis=1)
    diffs = diffs[norms > 0]
    if diffs.shape[0] == 0:
        raise ValueError("all points identical: chord set is empty")
    return _dedupe_rows(diffs)


def normalized_chords(points):
    """Return the set of unit-normalized chords {(x - y)/||x - y||}.

    Deduplication happens after normalization, so chords that differ only in
    length collapse to one direction.
    """
    C = chords(points)
    return _dedupe_rows(C / np.linalg.norm(C, axis=1, keepdims=True))


def normalized_vectors(points):
    """Return {x/||x|| : x in P, x != 0}, deduplicated after normalization.

    Raises
    ------
    ValueError
        If every point is zero.
    """
    P = as_point_set(points)
    norms = np.linalg.norm(P, axis=1)
    P = P[norms > 0]
    if P.shape[0] == 0:
        raise ValueError("all points are zero: nothing to normalize")
    return _dedupe_rows(P / np.linalg.norm(P, axis=1, keepdims=True))


def euclidean(x, y):
    """Euclidean distance, the default semimetric."""
    return float(np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)))


def check_semimetric(dist, points, trials=200, seed=0, rtol=1e-9):
    """Spot-check symmetry and the triangle inequality on sampled triples.

    Parameters
    ----------
    dist : callable
        Candidate semimetric ``dist(x, y) -> float``.
    points : array_like, shape (N, n)
        Points to sample triples from.
    trials : int
        Number of sampled triples.
    seed : int
        Seed for triple selection.
    rtol : float
        Relative slack allowed in both checks.

    Raises
    ------
    ValueError
        On a negative value, asymmetry, or triangle violation.
    """
    P = as_point_set(points)
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, P.shape[0], size=(trials, 3))
    for i, j, k in idx:
        dij, dji = dist(P[i], P[j]), dist(P[j], P[i])
        if dij < 0:
            raise ValueError(f"negative distance {dij}")
        if abs(dij - dji) > rtol * max(abs(dij), abs(dji), 1e-300):
            raise ValueError(f"asymmetric distance: d(i,j)={dij}, d(j,i)={dji}")
        dik, dkj = dist(P[i], P[k]), dist(P[k], P[j])
        if dij > dik + dkj + rtol * max(dij, 1.0):
            raise ValueError(f"triangle violation: {dij} > {dik} + {dkj}")


def psi2_norm_estimate(samples, rel_tol=1e-12):
    """Estimate the subgaussian norm of scalar samples.

    The subgaussian norm of a random variable X is the smallest C > 0 with
    E exp(X^2 / C^2) <= 2.  This returns the empirical analogue: the smallest
    C at which the sample mean of exp(x_i^2 / C^2) drops to 2, located by
    bisection.  The mean is strictly decreasing in C for any nonzero sample,
    so the root is unique.

    Parameters
    ----------
    samples : array_like, shape (N,)
        Observed draws of X.
    rel_tol : float
        Relative width at which the bisection bracket stops.  The default is
        far below the estimator's statistical error and tight enough that the
        estimate scales exactly with the samples to ~1e-12 relative.

    Returns
    -------
    float
        The empirical subgaussian norm; 0.0 when every sample is zero.
    """
    x = as_vector(samples, name="samples")
    m = np.abs(x).max()
    if m == 0.0:
        return 0.0
    sq = x * x

    def mean_exp(C):
        with np.errstate(over="ignore"):
            return np.exp(sq / (C * C)).mean()

    lo, hi = 1e-12 * m, 10.0 * m
    # mean_exp(hi) <= exp(1/100) < 2, so the root is inside the bracket.
    if mean_exp(lo) <= 2.0:
        return lo
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if mean_exp(mid) > 2.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
