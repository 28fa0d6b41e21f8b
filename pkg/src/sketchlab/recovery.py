"""Model-based recovery: projective Landweber iterations over a model set.

The iteration x_{k+1} = Project(x_k + mu Phi^T (y - Phi x_k)) recovers
signals from sketched measurements whenever the sketch is a good enough
bilipschitz embedding of the model; hard thresholding is the sparse special
case.  Finite unions of subspaces are projected by exhaustive search;
infinite families must be discretized by the caller.
"""

import math
from dataclasses import dataclass

import numpy as np

from .sets import SparseSet, UoSSet
from .sketch import Sketch
from .validation import as_vector

__all__ = [
    "hard_threshold",
    "project_uos",
    "RecoveryProblem",
    "RecoveryResult",
    "landweber_recover",
    "iht_recover",
    "sparse_success_rate",
    "calibrate_step",
]


def hard_threshold(x, s):
    """Best s-sparse approximation: keep the s largest-magnitude entries.

    Ties are broken toward the lower index.
    """
    x = as_vector(x)
    if not 1 <= s <= x.size:
        raise ValueError(f"need 1 <= s <= {x.size}, got s={s}")
    order = np.argsort(-np.abs(x), kind="stable")
    out = np.zeros_like(x)
    keep = order[:s]
    out[keep] = x[keep]
    return out


def project_uos(x, subspaces):
    """Nearest-subspace projection over a finite list of subspaces.

    Returns P_theta x for the theta maximizing ||P_theta x||; ties go to the
    first index in the list.
    """
    if not subspaces:
        raise ValueError("need at least one subspace")
    x = as_vector(x)
    best = None
    best_norm = -1.0
    for S in subspaces:
        proj = S.basis @ (S.basis.T @ x)
        norm = float(proj @ proj)
        if norm > best_norm:
            best, best_norm = proj, norm
    return best


@dataclass(frozen=True)
class RecoveryProblem:
    """Measurements y = Phi x + e together with the model x lives in."""

    sketch: Sketch
    y: np.ndarray
    model: object
    noise_level: float = 0.0

    def __post_init__(self):
        y = as_vector(self.y)
        object.__setattr__(self, "y", y)
        if y.size != self.sketch.spec.m:
            raise ValueError(
                f"y has dimension {y.size}, sketch produces {self.sketch.spec.m}"
            )
        if self.noise_level < 0:
            raise ValueError("noise_level must be nonnegative")


@dataclass(frozen=True)
class RecoveryResult:
    """Estimate plus run diagnostics.

    status is one of "converged" (residual met tol), "max_iters", or
    "diverged" (residual grew 10x from its running minimum).  `warnings`
    records soft checks such as a bilipschitz ratio too large for the
    contraction argument.
    """

    estimate: np.ndarray
    iterations: int
    residuals: tuple
    status: str
    warnings: tuple = ()
    trace: tuple | None = None

    def __post_init__(self):
        if self.status not in ("converged", "max_iters", "diverged"):
            raise ValueError(f"bad status {self.status!r}")
        if self.iterations < 0 or self.iterations != len(self.residuals):
            raise ValueError("iterations must match the residual history length")


def _model_projector(model):
    if isinstance(model, SparseSet):
        return lambda x: hard_threshold(x, model.s)
    if isinstance(model, UoSSet):
        family = model.family
        if not family.is_finite:
            raise ValueError(
                "infinite subspace families must be discretized before recovery"
            )
        subspaces = [family.subspace_of(theta) for theta in family.parameters()]
        return lambda x: project_uos(x, subspaces)
    if callable(model):
        return model
    raise ValueError(
        "model must be a SparseSet, a finite UoSSet, or a projection callable"
    )


def landweber_recover(problem, step=1.0, max_iters=100, tol=1e-10,
                      eps_estimate=None, keep_trace=False):
    """Projective Landweber iteration from x0 = 0.

    Stops when ||y - Phi x|| <= tol, after max_iters, or on divergence
    (residual 10x above its running minimum).  When an estimate of the
    model's pairwise distortion is supplied, the contraction condition
    (1 + eps)/(1 - eps) < 3/2 is checked and a warning recorded if violated.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    project = _model_projector(problem.model)
    warnings = []
    if eps_estimate is not None:
        if not 0.0 < eps_estimate < 1.0:
            raise ValueError("eps_estimate must lie in (0, 1)")
        if (1.0 + eps_estimate) / (1.0 - eps_estimate) >= 1.5:
            warnings.append(
                "bilipschitz ratio (1+eps)/(1-eps) >= 3/2: contraction not guaranteed"
            )
    A = problem.sketch.matrix
    y = problem.y
    x = np.zeros(problem.sketch.spec.n)
    residuals = []
    trace = [] if keep_trace else None
    status = "max_iters"
    best = math.inf
    iterations = 0
    for _ in range(max_iters):
        x = project(x + step * (A.T @ (y - A @ x)))
        iterations += 1
        r = float(np.linalg.norm(y - A @ x))
        residuals.append(r)
        if keep_trace:
            trace.append(x.copy())
        best = min(best, r)
        if r <= tol:
            status = "converged"
            break
        if best > 0 and r > 10.0 * best:
            status = "diverged"
            break
    return RecoveryResult(
        x, iterations, tuple(residuals), status, tuple(warnings),
        tuple(trace) if keep_trace else None,
    )


def iht_recover(sketch, y, s, step=1.0, max_iters=100, tol=1e-10, **kwargs):
    """Iterative hard thresholding: Landweber over the s-sparse model."""
    problem = RecoveryProblem(sketch, y, SparseSet(sketch.spec.n, s))
    return landweber_recover(problem, step=step, max_iters=max_iters, tol=tol, **kwargs)


def sparse_success_rate(family, n, s, m, trials, seed, step=1.0, max_iters=100,
                        rel_err=1e-6, q=None):
    """Fraction of seeded noiseless trials recovered to relative error rel_err.

    Trial t draws an s-sparse gaussian-coefficient signal from seed+t and a
    fresh sketch from seed+trials+t, then runs hard-thresholded Landweber.
    """
    from .sketch import SketchSpec, build_sketch

    wins = 0
    for t in range(trials):
        rng = np.random.default_rng(seed + t)
        x = np.zeros(n)
        support = rng.choice(n, s, replace=False)
        x[support] = rng.standard_normal(s)
        while np.linalg.norm(x) < 1e-9:
            x[support] = rng.standard_normal(s)
        sk = build_sketch(SketchSpec(family, m, n, seed + trials + t, q))
        out = iht_recover(sk, sk.matrix @ x, s, step=step, max_iters=max_iters,
                          tol=1e-12)
        if np.linalg.norm(out.estimate - x) <= rel_err * np.linalg.norm(x):
            wins += 1
    return wins / trials


def calibrate_step(family, n, s, m, trials, seed,
                   grid=(1.0, 0.8, 0.65, 0.5, 0.35), q=None):
    """Pick the Landweber step empirically: the grid value with the highest
    seeded success rate, ties going to the larger (faster) step."""
    best_step, best_rate = None, -1.0
    for step in sorted(grid, reverse=True):
        rate = sparse_success_rate(family, n, s, m, trials, seed, step=step, q=q)
        if rate > best_rate:
            best_step, best_rate = step, rate
    return best_step, best_rate
