"""Structured-set catalogue: samplers and exact membership tests.

Each set kind couples a Monte-Carlo sampler with the membership test that
certifies its samples: support count for sparse vectors, analysis nullity for
cosparse signals, singular-value rank for matrices, multilinear rank for
Tucker tensors, subspace residual for unions, and the parametric identity for
manifolds.  Matrix and tensor samples are returned flattened row-major so
sketches apply uniformly; membership reshapes internally.

Cone-shaped kinds (sparse, cosparse, lowrank, tucker, uos) normalize samples
to unit norm by default, since distortion suprema over cones are attained on
the sphere.  Finite clouds and manifolds return points as they are.
"""

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .subspaces import Subspace, UoSFamily, projector, rotating_plane_family
from .validation import InfeasibleError, as_matrix, as_point_set, as_vector, check_seed

__all__ = [
    "StructuredSet",
    "FiniteSet",
    "SparseSet",
    "CosparseSet",
    "LowRankSet",
    "TuckerSet",
    "UoSSet",
    "ManifoldSet",
    "ManifoldSpec",
    "sample",
    "membership",
    "enumerate_supports",
    "finite_difference_operator",
    "manifold_curve",
    "curve_tangent",
    "tangent_projector",
    "set_from_config",
    "set_to_config",
    "save_point_set",
    "load_point_set",
]

_TOL = 1e-10


# ---------------------------------------------------------------------------
# manifolds


@dataclass(frozen=True)
class ManifoldSpec:
    """A manifold from the fixed catalogue: circle, 2-sphere, or helix.

    ``circle(radius, ambient)`` lives in the first two coordinates,
    ``sphere2(radius, ambient)`` in the first three, and
    ``helix(a, b, ambient)`` traces (a cos t, a sin t, b t).  Circle and
    sphere have reach equal to their radius; the helix reach is left unknown
    and probed empirically elsewhere.
    """

    kind: str
    ambient: int
    radius: float | None = None
    a: float | None = None
    b: float | None = None

    def __post_init__(self):
        if self.kind not in ("circle", "sphere2", "helix"):
            raise ValueError(f"unknown manifold kind {self.kind!r}")
        min_ambient = {"circle": 2, "sphere2": 3, "helix": 3}[self.kind]
        if self.ambient < min_ambient:
            raise ValueError(f"{self.kind} needs ambient >= {min_ambient}, got {self.ambient}")
        if self.kind in ("circle", "sphere2"):
            if self.radius is None or not self.radius > 0:
                raise ValueError(f"{self.kind} needs a positive radius")
            if self.a is not None or self.b is not None:
                raise ValueError("a, b apply only to the helix")
        else:
            if self.a is None or self.b is None or self.a <= 0 or self.b <= 0:
                raise ValueError("helix needs positive a and b")
            if self.radius is not None:
                raise ValueError("radius applies only to circle/sphere2")

    @property
    def dim(self):
        return 2 if self.kind == "sphere2" else 1

    @property
    def reach(self):
        """Known reach, or None when the catalogue does not certify one."""
        return self.radius if self.kind in ("circle", "sphere2") else None


def _embed(block, ambient):
    out = np.zeros((block.shape[0], ambient))
    out[:, : block.shape[1]] = block
    return out


def manifold_curve(spec, t_grid):
    """Evaluate a curve manifold on a strictly increasing parameter grid.

    Returns the polyline vertices as a point set; only circle and helix are
    curves.  Circle points satisfy ||x|| = R exactly up to rounding.
    """
    ts = as_vector(t_grid, name="t_grid")
    if ts.size >= 2 and np.any(np.diff(ts) <= 0):
        raise ValueError("t_grid must be strictly increasing")
    if spec.kind == "circle":
        block = spec.radius * np.column_stack([np.cos(ts), np.sin(ts)])
    elif spec.kind == "helix":
        block = np.column_stack([spec.a * np.cos(ts), spec.a * np.sin(ts), spec.b * ts])
    else:
        raise ValueError(f"{spec.kind} is not a curve")
    return _embed(block, spec.ambient)


def curve_tangent(spec, t_grid):
    """Unit tangent vectors of a curve manifold at the given parameters."""
    ts = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if spec.kind == "circle":
        block = np.column_stack([-np.sin(ts), np.cos(ts)])
    elif spec.kind == "helix":
        scale = 1.0 / math.hypot(spec.a, spec.b)
        block = scale * np.column_stack(
            [-spec.a * np.sin(ts), spec.a * np.cos(ts), np.full_like(ts, spec.b)]
        )
    else:
        raise ValueError(f"{spec.kind} is not a curve")
    return _embed(block, spec.ambient)


def tangent_projector(spec, t):
    """Projector onto the tangent space at parameter t (curves) or at a
    point (sphere2, where t is the point itself)."""
    if spec.kind in ("circle", "helix"):
        u = curve_tangent(spec, [t])[0]
        return np.outer(u, u)
    x = as_vector(t, name="point")
    if x.shape[0] != spec.ambient:
        raise ValueError("point dimension does not match ambient")
    radial = x / np.linalg.norm(x)
    P = np.zeros((spec.ambient, spec.ambient))
    P[:3, :3] = np.eye(3)
    return P - np.outer(radial, radial)


# ---------------------------------------------------------------------------
# structured sets


class StructuredSet:
    """Base for the set catalogue; concrete kinds implement `_draw`,
    `contains`, and `set_to_config` support."""

    kind = None
    default_unit = True

    @property
    def ambient_dim(self):
        raise NotImplementedError

    def sample(self, count, seed, unit=None):
        """Draw `count` points; `unit=None` applies the kind's default."""
        if count < 1:
            raise ValueError(f"count must be >= 1, got {count}")
        rng = np.random.default_rng(check_seed(seed))
        unit = self.default_unit if unit is None else bool(unit)
        out = self._draw(count, rng)
        if unit:
            if not self.default_unit:
                raise ValueError(f"{self.kind} samples cannot be renormalized in place")
            out /= np.linalg.norm(out, axis=1, keepdims=True)
        return out

    def _draw(self, count, rng):
        raise NotImplementedError

    def contains(self, x, tol=_TOL):
        raise NotImplementedError


def sample(structured_set, count, seed, unit=None):
    """Functional alias for :meth:`StructuredSet.sample`."""
    return structured_set.sample(count, seed, unit=unit)


def membership(structured_set, x, tol=_TOL):
    """Functional alias for :meth:`StructuredSet.contains`."""
    return structured_set.contains(x, tol=tol)


@dataclass(frozen=True)
class FiniteSet(StructuredSet):
    """A finite point cloud; sampling draws rows uniformly with replacement."""

    points: np.ndarray = field(repr=False)
    kind = "finite"
    default_unit = False

    def __post_init__(self):
        P = as_point_set(self.points)
        P.setflags(write=False)
        object.__setattr__(self, "points", P)

    @property
    def ambient_dim(self):
        return self.points.shape[1]

    def _draw(self, count, rng):
        idx = rng.integers(0, self.points.shape[0], size=count)
        return self.points[idx].copy()

    def contains(self, x, tol=_TOL):
        x = as_vector(x)
        return bool(np.any(np.linalg.norm(self.points - x, axis=1) <= tol))


@dataclass(frozen=True)
class SparseSet(StructuredSet):
    """Vectors in R^n with at most s nonzero entries."""

    n: int
    s: int
    kind = "sparse"

    def __post_init__(self):
        if not 1 <= self.s <= self.n:
            raise ValueError(f"need 1 <= s <= n, got s={self.s}, n={self.n}")

    @property
    def ambient_dim(self):
        return self.n

    def _draw(self, count, rng):
        out = np.zeros((count, self.n))
        for i in range(count):
            support = rng.choice(self.n, size=self.s, replace=False)
            vals = rng.standard_normal(self.s)
            while np.linalg.norm(vals) < 1e-12:
                vals = rng.standard_normal(self.s)
            out[i, support] = vals
        return out

    def contains(self, x, tol=_TOL):
        x = as_vector(x)
        return int(np.sum(np.abs(x) > tol)) <= self.s


@dataclass(frozen=True)
class CosparseSet(StructuredSet):
    """Signals whose analysis coefficients Upsilon @ x vanish on >= l rows."""

    operator: np.ndarray = field(repr=False)
    l: int
    kind = "cosparse"

    def __post_init__(self):
        op = as_matrix(self.operator, name="operator")
        if not 0 <= self.l <= op.shape[0]:
            raise ValueError(f"need 0 <= l <= p={op.shape[0]}, got l={self.l}")
        op.setflags(write=False)
        object.__setattr__(self, "operator", op)

    @property
    def ambient_dim(self):
        return self.operator.shape[1]

    def _draw(self, count, rng):
        p = self.operator.shape[0]
        out = np.empty((count, self.ambient_dim))
        for i in range(count):
            null = None
            for _ in range(64):
                rows = np.sort(rng.choice(p, size=self.l, replace=False)) if self.l else []
                basis = scipy.linalg.null_space(self.operator[rows]) if self.l else np.eye(self.ambient_dim)
                if basis.shape[1] > 0:
                    null = basis
                    break
            if null is None:
                raise ValueError("cosparse null space trivial for every sampled row subset")
            coeff = rng.standard_normal(null.shape[1])
            while np.linalg.norm(coeff) < 1e-12:
                coeff = rng.standard_normal(null.shape[1])
            out[i] = null @ coeff
        return out

    def contains(self, x, tol=_TOL):
        x = as_vector(x)
        resid = np.abs(self.operator @ x)
        return int(np.sum(resid <= tol * max(1.0, float(np.linalg.norm(x))))) >= self.l


@dataclass(frozen=True)
class LowRankSet(StructuredSet):
    """n1 x n2 matrices of rank <= r, flattened row-major."""

    n1: int
    n2: int
    r: int
    kind = "lowrank"

    def __post_init__(self):
        if not 1 <= self.r <= min(self.n1, self.n2):
            raise ValueError(f"need 1 <= r <= min(n1, n2), got r={self.r}")

    @property
    def ambient_dim(self):
        return self.n1 * self.n2

    def _draw(self, count, rng):
        out = np.empty((count, self.ambient_dim))
        for i in range(count):
            U = rng.standard_normal((self.n1, self.r))
            V = rng.standard_normal((self.n2, self.r))
            out[i] = (U @ V.T).reshape(-1)
        return out

    def contains(self, x, tol=_TOL):
        X = as_vector(x).reshape(self.n1, self.n2)
        sigma = np.linalg.svd(X, compute_uv=False)
        if self.r >= sigma.size:
            return True
        return bool(sigma[self.r] <= tol * max(1.0, sigma[0]))


@dataclass(frozen=True)
class TuckerSet(StructuredSet):
    """Tensors with multilinear (Tucker) rank <= ranks, flattened row-major.

    Samples are a gaussian core contracted with orthonormal factor matrices,
    so each mode-i unfolding has rank <= r_i by construction.
    """

    dims: tuple
    ranks: tuple
    kind = "tucker"

    def __post_init__(self):
        dims, ranks = tuple(self.dims), tuple(self.ranks)
        if len(dims) < 1 or len(dims) != len(ranks):
            raise ValueError("dims and ranks must be equal-length nonempty tuples")
        for n_i, r_i in zip(dims, ranks):
            if not 1 <= r_i <= n_i:
                raise ValueError(f"need 1 <= r_i <= n_i, got r={r_i}, n={n_i}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "ranks", ranks)

    @property
    def ambient_dim(self):
        return int(np.prod(self.dims))

    def _draw(self, count, rng):
        out = np.empty((count, self.ambient_dim))
        for i in range(count):
            core = rng.standard_normal(self.ranks)
            X = core
            for axis, (n_i, r_i) in enumerate(zip(self.dims, self.ranks)):
                Q, _ = np.linalg.qr(rng.standard_normal((n_i, r_i)))
                X = np.moveaxis(np.tensordot(Q, X, axes=(1, axis)), 0, axis)
            out[i] = X.reshape(-1)
        return out

    def contains(self, x, tol=_TOL):
        X = as_vector(x).reshape(self.dims)
        for axis, r_i in enumerate(self.ranks):
            unfold = np.moveaxis(X, axis, 0).reshape(self.dims[axis], -1)
            sigma = np.linalg.svd(unfold, compute_uv=False)
            if r_i < sigma.size and sigma[r_i] > tol * max(1.0, sigma[0]):
                return False
        return True


@dataclass(frozen=True)
class UoSSet(StructuredSet):
    """Union of subspaces driven by a parametrized family."""

    family: UoSFamily
    config_name: str | None = None
    kind = "uos"

    @property
    def ambient_dim(self):
        probe = self.family.subspace_of(
            self.family.parameters()[0] if self.family.is_finite else self.family.domain[0]
        )
        return probe.ambient_dim

    def _draw(self, count, rng):
        out = np.empty((count, self.ambient_dim))
        for i in range(count):
            S = self.family.subspace_of(self.family.sample_parameter(rng))
            coeff = rng.standard_normal(S.dim)
            while np.linalg.norm(coeff) < 1e-12:
                coeff = rng.standard_normal(S.dim)
            out[i] = S.basis @ coeff
        return out

    def contains(self, x, tol=_TOL):
        if not self.family.is_finite:
            raise ValueError("membership test requires a finite parameter family")
        x = as_vector(x)
        scale = max(1.0, float(np.linalg.norm(x)))
        for theta in self.family.parameters():
            P = projector(self.family.subspace_of(theta))
            if np.linalg.norm(x - P @ x) <= tol * scale:
                return True
        return False


@dataclass(frozen=True)
class ManifoldSet(StructuredSet):
    """Uniform-parameter sampler over a catalogue manifold."""

    spec: ManifoldSpec
    kind = "manifold"
    default_unit = False

    @property
    def ambient_dim(self):
        return self.spec.ambient

    def _draw(self, count, rng):
        spec = self.spec
        if spec.kind == "circle":
            return manifold_curve(spec, np.sort(rng.uniform(0.0, 2.0 * math.pi, count)))
        if spec.kind == "helix":
            return manifold_curve(spec, np.sort(rng.uniform(0.0, 2.0 * math.pi, count)))
        g = rng.standard_normal((count, 3))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        return _embed(spec.radius * g, spec.ambient)

    def contains(self, x, tol=_TOL):
        x = as_vector(x)
        if x.shape[0] != self.spec.ambient:
            return False
        spec = self.spec
        if spec.kind == "circle":
            flat = np.abs(x[2:]).max() if x.size > 2 else 0.0
            return abs(np.hypot(x[0], x[1]) - spec.radius) <= tol and flat <= tol
        if spec.kind == "sphere2":
            flat = np.abs(x[3:]).max() if x.size > 3 else 0.0
            return abs(np.linalg.norm(x[:3]) - spec.radius) <= tol and flat <= tol
        t = x[2] / spec.b
        model = np.array([spec.a * math.cos(t), spec.a * math.sin(t), spec.b * t])
        flat = np.abs(x[3:]).max() if x.size > 3 else 0.0
        return bool(np.linalg.norm(x[:3] - model) <= tol and flat <= tol)


# ---------------------------------------------------------------------------
# combinatorial helpers


def enumerate_supports(n, s):
    """All s-element supports of {0, ..., n-1} in lexicographic order.

    Guarded: requires s <= n <= 25 and C(n, s) <= 10^6.
    """
    if not 1 <= s <= n:
        raise ValueError(f"need 1 <= s <= n, got s={s}, n={n}")
    if n > 25:
        raise InfeasibleError(f"support enumeration capped at n <= 25, got n={n}")
    total = math.comb(n, s)
    if total > 10 ** 6:
        raise InfeasibleError(f"C({n},{s}) = {total} exceeds the 10^6 enumeration guard")
    return list(itertools.combinations(range(n), s))


def finite_difference_operator(n):
    """The (n-1) x n first-difference analysis operator with rows e_{i+1} - e_i."""
    if n < 2:
        raise ValueError(f"finite differences need n >= 2, got n={n}")
    op = np.zeros((n - 1, n))
    idx = np.arange(n - 1)
    op[idx, idx] = -1.0
    op[idx, idx + 1] = 1.0
    return op


# ---------------------------------------------------------------------------
# serialization


def save_point_set(path, points):
    """Write a point set as CSV, one point per row, 17 significant digits."""
    P = as_point_set(points)
    with open(path, "w", newline="\n") as fh:
        for row in P:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")


def load_point_set(path):
    """Read a point set written by :func:`save_point_set`."""
    return np.loadtxt(path, delimiter=",", ndmin=2)


_UOS_REGISTRY = {"rotating_plane": rotating_plane_family}


def set_from_config(config):
    """Build a StructuredSet from a JSON-style config document.

    The document carries ``kind`` plus kind-specific parameters, e.g.
    ``{"kind": "sparse", "n": 256, "s": 5}``.  The cosparse operator is
    either the string ``"finite_difference"`` with ``n``, or an explicit
    matrix.  Union families are referenced by registry name
    (``{"kind": "uos", "family": "rotating_plane", "n": 8}``).
    """
    if isinstance(config, str):
        config = json.loads(config)
    cfg = dict(config)
    kind = cfg.pop("kind", None)
    if kind == "finite":
        return FiniteSet(np.asarray(cfg["points"], dtype=float))
    if kind == "sparse":
        return SparseSet(int(cfg["n"]), int(cfg["s"]))
    if kind == "cosparse":
        op = cfg["operator"]
        if op == "finite_difference":
            op = finite_difference_operator(int(cfg["n"]))
        else:
            op = np.asarray(op, dtype=float)
        return CosparseSet(op, int(cfg["l"]))
    if kind == "lowrank":
        return LowRankSet(int(cfg["n1"]), int(cfg["n2"]), int(cfg["r"]))
    if kind == "tucker":
        return TuckerSet(tuple(int(d) for d in cfg["dims"]), tuple(int(r) for r in cfg["ranks"]))
    if kind == "uos":
        name = cfg["family"]
        if name not in _UOS_REGISTRY:
            raise ValueError(f"unknown uos family {name!r}; known: {sorted(_UOS_REGISTRY)}")
        return UoSSet(_UOS_REGISTRY[name](int(cfg["n"])), config_name=name)
    if kind == "manifold":
        return ManifoldSet(
            ManifoldSpec(
                cfg["id"],
                int(cfg["ambient"]),
                radius=cfg.get("radius"),
                a=cfg.get("a"),
                b=cfg.get("b"),
            )
        )
    raise ValueError(f"unknown set kind {kind!r}")


def set_to_config(structured_set):
    """Inverse of :func:`set_from_config` where a faithful document exists."""
    s = structured_set
    if isinstance(s, FiniteSet):
        return {"kind": "finite", "points": s.points.tolist()}
    if isinstance(s, SparseSet):
        return {"kind": "sparse", "n": s.n, "s": s.s}
    if isinstance(s, CosparseSet):
        return {"kind": "cosparse", "operator": s.operator.tolist(), "l": s.l}
    if isinstance(s, LowRankSet):
        return {"kind": "lowrank", "n1": s.n1, "n2": s.n2, "r": s.r}
    if isinstance(s, TuckerSet):
        return {"kind": "tucker", "dims": list(s.dims), "ranks": list(s.ranks)}
    if isinstance(s, UoSSet):
        if s.config_name is None:
            raise ValueError("union family was not built from a registry name")
        return {"kind": "uos", "family": s.config_name, "n": s.ambient_dim}
    if isinstance(s, ManifoldSet):
        cfg = {"kind": "manifold", "id": s.spec.kind, "ambient": s.spec.ambient}
        if s.spec.radius is not None:
            cfg["radius"] = s.spec.radius
        if s.spec.a is not None:
            cfg.update(a=s.spec.a, b=s.spec.b)
        return cfg
    raise TypeError(f"not a structured set: {type(s).__name__}")
