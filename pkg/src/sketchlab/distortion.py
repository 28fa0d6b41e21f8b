"""Distortion measurement: kappa, delta, epsilon, zeta, and curve lengths.

For a sketch Phi and a set S, kappa is sup_{x in S} |  ||Phi x||^2 - ||x||^2 |.
The named constants are kappa over derived sets: delta on normalized vectors
(the restricted isometry constant), epsilon on normalized chords
(multiplicative pairwise error), zeta on raw chords (additive pairwise
error).  Enumerable instances are measured exactly; everything else by Monte
Carlo, reported as a lower bound of the supremum together with the sample
count.  Chord-geometry property checks and the seeded failure-rate harness
live here too.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .core import normalized_chords, normalized_vectors
from .sets import manifold_curve, tangent_projector
from .sketch import SketchSpec, build_sketch
from .validation import InfeasibleError, as_point_set

__all__ = [
    "DistortionReport",
    "kappa_points",
    "kappa_mc",
    "exact_sparse_rip",
    "exact_subspace_rip",
    "epsilon_mc",
    "zeta_mc",
    "eps_no_squares",
    "curve_length_distortion",
    "measure_report",
    "wilson_interval",
    "DistortionExperiment",
    "FailureReport",
    "failure_rate",
    "chord_map",
    "check_chord_perturbation",
    "check_reach_chord_bounds",
    "iota_empirical",
]


@dataclass(frozen=True)
class DistortionReport:
    """Measured distortion constants for one sketch/set pair.

    Fields left as None were not requested.  Monte-Carlo values are lower
    bounds of the true suprema; `mode` records "exact" or "monte_carlo" and
    `samples` the per-measure sample count (None for exact enumerations).
    """

    kappa: float | None
    delta: float | None
    epsilon: float | None
    zeta: float | None
    mode: str
    samples: int | None
    seed: int | None

    def __post_init__(self):
        if self.mode not in ("exact", "monte_carlo"):
            raise ValueError(f"mode must be exact or monte_carlo, got {self.mode!r}")
        for name in ("kappa", "delta", "epsilon", "zeta"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"{name} must be nonnegative, got {v}")


def _sq_norms(X):
    return np.einsum("ij,ij->i", X, X)


def kappa_points(sk, points):
    """Exact kappa over a finite list of points: max |  ||Phi x||^2 - ||x||^2 |."""
    P = as_point_set(points)
    PX = P @ sk.matrix.T
    return float(np.max(np.abs(_sq_norms(PX) - _sq_norms(P))))


def kappa_mc(sk, structured_set, samples, seed, unit=None):
    """Monte-Carlo kappa over a structured set (lower bound of the sup).

    Draws `samples` points with the set's sampler (its default normalization
    unless `unit` overrides) and evaluates the exact kappa of that sample.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    return kappa_points(sk, structured_set.sample(samples, seed, unit=unit))


def exact_sparse_rip(sk, s):
    """Exact restricted isometry constant over all s-sparse supports.

    delta_s = max over supports S of || Phi_S^T Phi_S - I ||; guarded to
    C(n, s) <= 10^5 support enumerations.
    """
    n = sk.spec.n
    if not 1 <= s <= n:
        raise ValueError(f"need 1 <= s <= n, got s={s}")
    total = math.comb(n, s)
    if total > 10 ** 5:
        raise InfeasibleError(f"C({n},{s}) = {total} exceeds the 10^5 enumeration guard")
    gram = sk.matrix.T @ sk.matrix
    eye = np.eye(s)
    worst = 0.0
    for support in itertools.combinations(range(n), s):
        sub = gram[np.ix_(support, support)] - eye
        ev = np.linalg.eigvalsh(sub)
        worst = max(worst, abs(ev[0]), abs(ev[-1]))
    return worst


def exact_subspace_rip(sk, subspaces):
    """Exact delta over a finite union of subspaces.

    max over the list of || B^T Phi^T Phi B - I || with B an orthonormal
    basis; this is the restricted isometry constant of the union.
    """
    if not subspaces:
        raise ValueError("need at least one subspace")
    worst = 0.0
    for S in subspaces:
        B = S.basis
        M = (sk.matrix @ B).T @ (sk.matrix @ B) - np.eye(S.dim)
        ev = np.linalg.eigvalsh(M)
        worst = max(worst, abs(ev[0]), abs(ev[-1]))
    return worst


def _pair_distances(sk, points):
    P = as_point_set(points, min_points=2)
    d = pdist(P)
    keep = d > 0.0
    if not np.any(keep):
        raise ValueError("all points identical: no chords to measure")
    dP = pdist(P @ sk.matrix.T)
    return d[keep], dP[keep]


def epsilon_mc(sk, points):
    """Multiplicative pairwise distortion over a finite point set.

    max over pairs x != y of |  ||Phi(x-y)||^2 / ||x-y||^2 - 1 |; exact over
    the given points (every pair is visited), coincident pairs skipped.
    """
    d, dP = _pair_distances(sk, points)
    return float(np.max(np.abs((dP / d) ** 2 - 1.0)))


def zeta_mc(sk, points):
    """Additive pairwise distortion: max |  ||Phi(x-y)||^2 - ||x-y||^2 |."""
    d, dP = _pair_distances(sk, points)
    return float(np.max(np.abs(dP ** 2 - d ** 2)))


def eps_no_squares(eps_hat):
    """Squared-form budget that guarantees an unsquared distortion eps_hat.

    If the squared pairwise error is at most 2*eps_hat - eps_hat^2, then
    distances themselves are preserved within a factor 1 +- eps_hat.
    """
    if not 0.0 < eps_hat <= 1.0:
        raise ValueError(f"eps_hat must lie in (0, 1], got {eps_hat}")
    return 2.0 * eps_hat - eps_hat ** 2


def _polyline_length(P):
    return float(np.sum(np.linalg.norm(np.diff(P, axis=0), axis=1)))


def curve_length_distortion(sk, spec, t_grid, rel_tol=1e-6, max_refinements=14):
    """|L(Phi gamma) / L(gamma) - 1| for a curve manifold polyline.

    The parameter grid is refined by midpoint insertion until the measured
    ratio changes by less than `rel_tol` relatively.
    """
    ts = np.asarray(t_grid, dtype=float)
    if ts.size < 2:
        raise ValueError("need at least two grid points")

    def measure(grid):
        P = manifold_curve(spec, grid)
        L = _polyline_length(P)
        if L <= 0.0:
            raise ValueError("degenerate grid: zero polyline length")
        return abs(_polyline_length(P @ sk.matrix.T) / L - 1.0)

    value = measure(ts)
    for _ in range(max_refinements):
        mids = 0.5 * (ts[:-1] + ts[1:])
        ts = np.sort(np.concatenate([ts, mids]))
        refined = measure(ts)
        done = math.isclose(refined, value, rel_tol=rel_tol, abs_tol=1e-12)
        value = refined
        if done:
            break
    return value


def measure_report(sk, structured_set=None, points=None, samples=None, seed=None):
    """Measure delta/epsilon/zeta (plus raw kappa) on one target.

    Pass either a structured set (sampled with `samples`, `seed`) or an
    explicit point cloud.  Structured-set reports are Monte-Carlo; point
    clouds are exact enumerations over the given points.
    """
    if (structured_set is None) == (points is None):
        raise ValueError("pass exactly one of structured_set or points")
    if structured_set is not None:
        if samples is None or seed is None:
            raise ValueError("structured sets need samples and seed")
        raw = structured_set.sample(samples, seed)
        mode, n_samples = "monte_carlo", samples
    else:
        raw = as_point_set(points)
        mode, n_samples, seed = "exact", None, None
    kappa = kappa_points(sk, raw)
    delta = kappa_points(sk, normalized_vectors(raw))
    if raw.shape[0] >= 2:
        epsilon = epsilon_mc(sk, raw)
        zeta = zeta_mc(sk, raw)
    else:
        epsilon = zeta = None
    return DistortionReport(kappa, delta, epsilon, zeta, mode, n_samples, seed)


# ---------------------------------------------------------------------------
# failure-rate harness


def wilson_interval(failures, trials, z=1.959963984540054):
    """Wilson 95% score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = failures / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class DistortionExperiment:
    """Repeated-sketch distortion experiment against a fixed target.

    The measured quantity is chosen by `metric`: 'delta' (kappa of the
    normalized sample), 'epsilon'/'zeta' (pairwise over the sample cloud), or
    'kappa' (raw sample).  The set is sampled once with `seed`; trial t uses
    sketch seed `seed + t`, so trials are paired across different m.
    """

    structured_set: object
    family: str
    m: int
    metric: str
    target: float
    trials: int
    seed: int
    samples: int = 256
    q: float | None = None

    def __post_init__(self):
        if self.metric not in ("delta", "epsilon", "zeta", "kappa"):
            raise ValueError(f"unknown metric {self.metric!r}")
        if self.trials < 10:
            raise ValueError(f"need trials >= 10, got {self.trials}")
        if self.target < 0:
            raise ValueError("target must be nonnegative")


@dataclass(frozen=True)
class FailureReport:
    rate: float
    wilson_low: float
    wilson_high: float
    failures: int
    trials: int
    values: tuple


def _measure_metric(sk, metric, raw, unit_rows):
    if metric == "kappa":
        return kappa_points(sk, raw)
    if metric == "delta":
        return kappa_points(sk, unit_rows)
    if metric == "epsilon":
        return epsilon_mc(sk, raw)
    return zeta_mc(sk, raw)


def _experiment_sample(exp):
    raw = exp.structured_set.sample(exp.samples, exp.seed)
    norms = np.linalg.norm(raw, axis=1, keepdims=True)
    unit_rows = raw[norms[:, 0] > 0] / norms[norms[:, 0] > 0]
    return raw, unit_rows


def trial_values(exp, m=None, jobs=None):
    """Measured distortion per trial (sketch seeds seed+0 .. seed+trials-1).

    Trials run on a thread pool when jobs > 1, merged in trial order, so
    parallelism never changes the values.
    """
    m = exp.m if m is None else m
    raw, unit_rows = _experiment_sample(exp)
    n = raw.shape[1]

    def one(t):
        sk = build_sketch(SketchSpec(exp.family, m, n, exp.seed + t, exp.q))
        return _measure_metric(sk, exp.metric, raw, unit_rows)

    if jobs and jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return np.array(list(pool.map(one, range(exp.trials))))
    return np.array([one(t) for t in range(exp.trials)])


def failure_rate(exp, jobs=None):
    """Fraction of sketch draws whose measured distortion exceeds the target,
    with its Wilson 95% interval and the per-trial values."""
    values = trial_values(exp, jobs=jobs)
    failures = int(np.sum(values > exp.target))
    lo, hi = wilson_interval(failures, exp.trials)
    return FailureReport(failures / exp.trials, lo, hi, failures, exp.trials, tuple(values))


# ---------------------------------------------------------------------------
# chord geometry checks


def chord_map(X, Y):
    """Normalized chords (y - x) / ||y - x|| for paired rows of X and Y.

    Raises on any pair closer than 1e-12; callers filter first.
    """
    X, Y = np.atleast_2d(np.asarray(X, float)), np.atleast_2d(np.asarray(Y, float))
    diff = Y - X
    norms = np.linalg.norm(diff, axis=1, keepdims=True)
    if np.any(norms < 1e-12):
        raise ValueError("chord map undefined for pairs at distance < 1e-12")
    return diff / norms


def check_chord_perturbation(quadruples, dim, seed):
    """Stability of the chord map under endpoint perturbation.

    For random quadruples (x1, x2, y1, y2) with t = ||x1 - x2||, verifies
    ||Ch(x1,x2) - Ch(y1,y2)|| <= (2/t) (||x1-y1|| + ||x2-y2||) and returns
    (violations, checked, worst_ratio) where worst_ratio is the largest
    left/right quotient observed.
    """
    rng = np.random.default_rng(seed)
    checked = 0
    violations = 0
    worst = 0.0
    block = 20000
    while checked < quadruples:
        k = min(block, quadruples - checked)
        x1, x2, y1, y2 = (rng.standard_normal((k, dim)) for _ in range(4))
        t = np.linalg.norm(x1 - x2, axis=1)
        d2 = np.linalg.norm(y1 - y2, axis=1)
        keep = (t >= 1e-12) & (d2 >= 1e-12)
        lhs = np.linalg.norm(chord_map(x1[keep], x2[keep]) - chord_map(y1[keep], y2[keep]), axis=1)
        rhs = (2.0 / t[keep]) * (
            np.linalg.norm(x1[keep] - y1[keep], axis=1) + np.linalg.norm(x2[keep] - y2[keep], axis=1)
        )
        ratio = lhs / rhs
        violations += int(np.sum(ratio > 1.0 + 1e-12))
        worst = max(worst, float(ratio.max(initial=0.0)))
        checked += int(np.sum(keep))
    return violations, checked, worst


def check_reach_chord_bounds(spec, pairs, seed):
    """Reach-based chord/tangent bounds on a circle of radius R (reach = R).

    Over sampled point pairs, verifies both
    (a) ||Ch - P_x1 Ch|| <= (2/R) ||x1 - x2||  (chord-to-tangent deviation),
    (b) d_Fin(x1, x2) <= 2 sqrt(2) R^(-1/2) ||x1 - x2||^(1/2),
    with tangent projectors taken analytically from the parametrization.
    Returns (violations, checked, worst_ratio).
    """
    if spec.kind != "circle":
        raise ValueError("reach bounds are certified for the circle only")
    R = spec.radius
    rng = np.random.default_rng(seed)
    t1 = rng.uniform(0.0, 2.0 * math.pi, pairs)
    t2 = rng.uniform(0.0, 2.0 * math.pi, pairs)
    keep = np.abs(t1 - t2) > 1e-9
    t1, t2 = t1[keep], t2[keep]
    x1 = np.column_stack([R * np.cos(t1), R * np.sin(t1)])
    x2 = np.column_stack([R * np.cos(t2), R * np.sin(t2)])
    if spec.ambient > 2:
        pad = np.zeros((x1.shape[0], spec.ambient - 2))
        x1, x2 = np.hstack([x1, pad]), np.hstack([x2, pad])
    dist = np.linalg.norm(x1 - x2, axis=1)
    ch = chord_map(x1, x2)
    # tangent direction at parameter t is (-sin t, cos t, 0, ...)
    tang = np.zeros_like(x1)
    tang[:, 0], tang[:, 1] = -np.sin(t1), np.cos(t1)
    proj = np.einsum("ij,ij->i", ch, tang)[:, None] * tang
    dev = np.linalg.norm(ch - proj, axis=1)
    ratio_a = dev / ((2.0 / R) * dist)
    # tangent lines at angle t and t': d_Fin = |sin(t - t')|
    dfin = np.abs(np.sin(t1 - t2))
    ratio_b = dfin / (2.0 * math.sqrt(2.0) / math.sqrt(R) * np.sqrt(dist))
    ratios = np.concatenate([ratio_a, ratio_b])
    violations = int(np.sum(ratios > 1.0 + 1e-12))
    return violations, int(t1.size), float(ratios.max(initial=0.0))


def iota_empirical(spec, pairs, seed):
    """Empirical lower bound for the chord-to-tangent constant iota.

    Samples parameter pairs on a curve manifold and returns the largest
    observed ||Ch - P_x1 Ch|| / ||x1 - x2||.  For the circle this equals
    1/(2R) for every pair; for the helix no closed form is certified and the
    value is a reported lower bound only.
    """
    if spec.kind not in ("circle", "helix"):
        raise ValueError("iota probe supports curve manifolds only")
    rng = np.random.default_rng(seed)
    lo, hi = 0.0, 2.0 * math.pi
    t1 = rng.uniform(lo, hi, pairs)
    t2 = rng.uniform(lo, hi, pairs)
    keep = np.abs(t1 - t2) > 1e-9
    t1, t2 = t1[keep], t2[keep]
    worst = 0.0
    for a, b in zip(t1, t2):
        x1 = manifold_curve(spec, [min(a, b), max(a, b)])
        x2 = x1[1]
        x1 = x1[0]
        dist = float(np.linalg.norm(x1 - x2))
        if dist < 1e-12:
            continue
        ch = (x2 - x1) / dist
        P = tangent_projector(spec, min(a, b))
        dev = float(np.linalg.norm(ch - P @ ch))
        worst = max(worst, dev / dist)
    return worst
