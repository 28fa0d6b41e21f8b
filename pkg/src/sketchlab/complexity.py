"""Covering profiles, entropy integrals, and Monte-Carlo Gaussian width.

These are the computable surrogates for the chaining functional gamma_2: the
Dudley entropy integral upper-bounds it, the Gaussian width of a sampled set
lower-bounds the width of the full set, and `gamma2_upper` takes the better
of the entropy integral and the finite-set bound diam * sqrt(log |T|).
"""

import math
from dataclasses import dataclass

import numpy as np

from .validation import as_point_set

__all__ = [
    "AnalyticProfile",
    "EmpiricalProfile",
    "ComplexityEstimate",
    "unit_ball_profile",
    "greedy_net",
    "dudley_integral",
    "dudley_closed_form",
    "gaussian_width_mc",
    "gamma2_upper",
]

_GRID_POINTS = 2048
_LOWER_CLIP = 1e-6


@dataclass(frozen=True)
class AnalyticProfile:
    """Covering law N(u * diam) <= N0 * (c/u)^K for u in (0, 1]."""

    K: float
    c: float
    N0: float = 1.0

    def __post_init__(self):
        if not (self.K > 0 and math.isfinite(self.K)):
            raise ValueError(f"covering dimension K must be positive and finite, got {self.K}")
        if not (self.c > 0 and math.isfinite(self.c)):
            raise ValueError(f"covering parameter c must be positive and finite, got {self.c}")
        if not (self.N0 > 0 and math.isfinite(self.N0)):
            raise ValueError(f"base covering N0 must be positive and finite, got {self.N0}")

    def log_covering(self, v):
        """log N at scaled radius v = u/diam, floored at 0 so N >= 1."""
        v = np.asarray(v, dtype=float)
        return np.maximum(0.0, math.log(self.N0) + self.K * np.log(self.c / v))


@dataclass(frozen=True)
class EmpiricalProfile:
    """Measured net sizes at an increasing grid of radii.

    Sizes must be nonincreasing in the radius and at least 1.  Between grid
    points the size at the nearest smaller radius applies; below the smallest
    radius the first size is extended (an understatement of N there).
    """

    radii: tuple
    sizes: tuple

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        sizes = tuple(float(s) for s in self.sizes)
        if len(radii) == 0 or len(radii) != len(sizes):
            raise ValueError("radii and sizes must be equal-length and nonempty")
        if any(not (r > 0 and math.isfinite(r)) for r in radii):
            raise ValueError("radii must be positive and finite")
        if any(d <= 0 for d in np.diff(radii)):
            raise ValueError("radii must be strictly increasing")
        if any(not (s >= 1 and math.isfinite(s)) for s in sizes):
            raise ValueError("net sizes must be finite and >= 1")
        if any(d > 0 for d in np.diff(sizes)):
            raise ValueError("net sizes must be nonincreasing in the radius")
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "sizes", sizes)


@dataclass(frozen=True)
class ComplexityEstimate:
    """Bundle of complexity surrogates for one set."""

    dudley_value: float
    gaussian_width: float
    stderr: float
    diameter: float

    def __post_init__(self):
        if self.dudley_value < 0 or self.gaussian_width < 0 or self.stderr < 0:
            raise ValueError("complexity values must be nonnegative")


def unit_ball_profile(K):
    """Profile of the unit ball of R^K: N(u) <= (1 + 2/u)^K <= (3/u)^K for
    u <= 1, recorded in the (c/u)^K form with c = 3."""
    return AnalyticProfile(float(K), 3.0, 1.0)


def greedy_net(points, u, metric=None):
    """Farthest-point greedy u-net of a finite point set.

    Starts from the first point and repeatedly adds the point farthest from
    the current net until every point lies within u.  The net size is an
    upper-bound proxy for the covering number N(P, d, u).

    Parameters
    ----------
    points : array_like, shape (N, n)
    u : float
        Net radius, > 0.
    metric : callable, optional
        Semimetric ``d(x, y) -> float``; Euclidean when omitted (vectorized).

    Returns
    -------
    ndarray
        The net points (a subset of the rows of `points`).
    """
    P = as_point_set(points)
    if not u > 0:
        raise ValueError(f"net radius must be positive, got {u}")

    if metric is None:
        dist_to = lambda j: np.linalg.norm(P - P[j], axis=1)
    else:
        dist_to = lambda j: np.array([metric(P[i], P[j]) for i in range(P.shape[0])])

    chosen = [0]
    mind = dist_to(0)
    while True:
        far = int(np.argmax(mind))
        if mind[far] <= u:
            break
        chosen.append(far)
        mind = np.minimum(mind, dist_to(far))
    return P[chosen]


def _dudley_analytic(profile, diameter):
    # substitute u = diameter * v; log-spaced grid tames the endpoint slope
    v = np.geomspace(_LOWER_CLIP, 1.0, _GRID_POINTS)
    vals = np.sqrt(profile.log_covering(v))
    return diameter * float(np.trapezoid(vals, v))


def _dudley_empirical(profile, diameter):
    # N(u) is a step function (size at the largest measured radius <= u,
    # first size extended below the grid), so the integral is an exact sum.
    edges = [0.0, *profile.radii, math.inf]
    values = [profile.sizes[0], *profile.sizes]
    total = 0.0
    for lo, hi, size in zip(edges[:-1], edges[1:], values):
        total += math.sqrt(math.log(size)) * max(0.0, min(hi, diameter) - min(lo, diameter))
    return total


def dudley_integral(profile, diameter):
    """Entropy integral int_0^diam sqrt(log N(u)) du for a covering profile.

    Analytic profiles integrate numerically on a 2048-point log-spaced
    trapezoid grid clipped at 1e-6 * diam (the endpoint is integrable but
    steep); empirical step profiles sum exactly.
    """
    if diameter < 0 or not math.isfinite(diameter):
        raise ValueError(f"diameter must be finite and >= 0, got {diameter}")
    if diameter == 0.0:
        return 0.0
    if isinstance(profile, AnalyticProfile):
        return _dudley_analytic(profile, diameter)
    if isinstance(profile, EmpiricalProfile):
        return _dudley_empirical(profile, diameter)
    raise TypeError(f"not a covering profile: {type(profile).__name__}")


def dudley_closed_form(profile, diameter):
    """Closed-form upper bound diam * (sqrt(log N0) + sqrt(K) sqrt(log(ec)))
    for an analytic profile, from int_0^1 log^(1/2)(c/u) du <= log^(1/2)(ec).

    Used as a cross-check: the numeric integral never exceeds it.
    """
    if not isinstance(profile, AnalyticProfile):
        raise TypeError("closed form applies to analytic profiles")
    base = math.sqrt(max(0.0, math.log(profile.N0)))
    tail = math.sqrt(profile.K) * math.sqrt(max(0.0, math.log(math.e * profile.c)))
    return diameter * (base + tail)


def gaussian_width_mc(points, g_trials=1000, seed=0, block=256):
    """Monte-Carlo Gaussian width of a sampled set.

    Averages sup_{x in P} |<g, x>| over fresh standard normal draws g.  The
    same point sample is used for every draw, so the estimate is the exact
    width of the sampled polytope and hence a statistical lower bound for the
    width of the underlying set.

    Returns
    -------
    (estimate, stderr) : pair of floats
    """
    P = as_point_set(points)
    if g_trials < 100:
        raise ValueError(f"need g_trials >= 100, got {g_trials}")
    rng = np.random.default_rng(seed)
    sup = np.empty(g_trials)
    for start in range(0, g_trials, block):
        stop = min(start + block, g_trials)
        G = rng.standard_normal((stop - start, P.shape[1]))
        sup[start:stop] = np.abs(G @ P.T).max(axis=1)
    est = float(np.mean(sup))
    stderr = float(np.std(sup, ddof=1) / math.sqrt(g_trials)) if g_trials > 1 else 0.0
    return est, stderr


def gamma2_upper(profile=None, diameter=None, cardinality=None):
    """Best available upper surrogate for gamma_2.

    Takes the minimum of the Dudley integral (when a profile is given) and
    the finite-set bound diam * sqrt(log |T|) (when a cardinality is given).
    """
    if diameter is None or diameter < 0:
        raise ValueError("a nonnegative diameter is required")
    candidates = []
    if profile is not None:
        candidates.append(dudley_integral(profile, diameter))
    if cardinality is not None:
        if cardinality < 1:
            raise ValueError(f"cardinality must be >= 1, got {cardinality}")
        candidates.append(diameter * math.sqrt(math.log(cardinality)))
    if not candidates:
        raise ValueError("need a covering profile or a cardinality")
    return min(candidates)
