"""Seeded subgaussian sketch construction.

A sketch is an m x n matrix Phi = Phi_tilde / sqrt(m) whose unnormalized
entries are iid, zero mean, and unit variance, drawn from one of three
families:

- ``gaussian``: standard normal entries, subgaussian parameter alpha = 8/3.
- ``rademacher``: +-1 entries, alpha = max(1, 1/ln 2).
- ``achlioptas``: +-sqrt(q) with probability 1/(2q) each and 0 otherwise,
  alpha = q.  q = 1 collapses to the rademacher law; q = 3 is the classic
  sparse variant with two thirds of the entries zero.

Rows are generated with a counter-based generator keyed on (seed, row), so
entry (i, j) is a pure function of (seed, i, j): matrices are bit-identical
across platforms and runs, rows can be produced independently, and growing m
extends a matrix without disturbing existing rows.
"""

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .validation import as_matrix, as_vector, check_seed

__all__ = [
    "SketchSpec",
    "Sketch",
    "family_alpha",
    "build_sketch",
    "apply",
    "apply_flat",
    "to_csv",
    "from_csv",
    "Psi2Probe",
    "psi2_row_probe",
]

FAMILIES = ("gaussian", "rademacher", "achlioptas")


def family_alpha(family, q=None):
    """Subgaussian parameter alpha assigned to an entry family."""
    if family == "gaussian":
        return 8.0 / 3.0
    if family == "rademacher":
        return max(1.0, 1.0 / math.log(2.0))
    if family == "achlioptas":
        if q is None:
            raise ValueError("achlioptas family needs q")
        return float(q)
    raise ValueError(f"unknown family {family!r}")


@dataclass(frozen=True)
class SketchSpec:
    """Complete description of a sketch; two equal specs give equal matrices."""

    family: str
    m: int
    n: int
    seed: int
    q: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if not (isinstance(self.m, (int, np.integer)) and self.m >= 1):
            raise ValueError(f"m must be a positive integer, got {self.m!r}")
        if not (isinstance(self.n, (int, np.integer)) and self.n >= 1):
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "seed", check_seed(self.seed))
        if self.family == "achlioptas":
            if self.q is None:
                raise ValueError("achlioptas family needs q")
            q = float(self.q)
            if not (q >= 1.0 and math.isfinite(q)):
                raise ValueError(f"achlioptas q must be >= 1, got {q}")
            object.__setattr__(self, "q", q)
        elif self.q is not None:
            raise ValueError(f"q only applies to the achlioptas family, got q={self.q!r}")

    @property
    def alpha(self):
        return family_alpha(self.family, self.q)


@dataclass(frozen=True)
class Sketch:
    """A realized sketch: the spec plus its m x n matrix (already / sqrt(m))."""

    spec: SketchSpec
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        M = as_matrix(self.matrix, name="matrix")
        if M.shape != (self.spec.m, self.spec.n):
            raise ValueError(
                f"matrix shape {M.shape} does not match spec ({self.spec.m}, {self.spec.n})"
            )
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @property
    def alpha(self):
        return self.spec.alpha

    @property
    def shape(self):
        return self.matrix.shape


def _row_rng(seed, row):
    key = np.array([row, seed], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _raw_row(spec, row):
    # Unit-variance unnormalized row; pure function of (seed, row).
    rng = _row_rng(spec.seed, row)
    if spec.family == "gaussian":
        return rng.standard_normal(spec.n)
    if spec.family == "rademacher":
        return 1.0 - 2.0 * rng.integers(0, 2, size=spec.n).astype(float)
    u = rng.random(spec.n)
    half = 0.5 / spec.q
    root = math.sqrt(spec.q)
    return np.where(u < half, -root, np.where(u >= 1.0 - half, root, 0.0))


def build_sketch(spec):
    """Materialize the matrix for a spec.

    Parameters
    ----------
    spec : SketchSpec

    Returns
    -------
    Sketch
        With ``matrix = rows / sqrt(m)``, rows generated per family law.
    """
    rows = np.empty((spec.m, spec.n))
    for i in range(spec.m):
        rows[i] = _raw_row(spec, i)
    return Sketch(spec, rows / math.sqrt(spec.m))


def apply(sketch, x):
    """Apply the sketch to a vector: returns ``Phi @ x`` of length m."""
    v = as_vector(x)
    if v.shape[0] != sketch.spec.n:
        raise ValueError(f"x has dimension {v.shape[0]}, sketch expects {sketch.spec.n}")
    return sketch.matrix @ v


def apply_flat(sketch, X):
    """Apply the sketch to a matrix or tensor after row-major flattening."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim < 2:
        raise ValueError("apply_flat expects an array with at least 2 dimensions")
    return apply(sketch, arr.reshape(-1))


def _family_token(spec):
    if spec.family == "achlioptas":
        return f"achlioptas(q={spec.q!r})"
    return spec.family


_ACHLIOPTAS_RE = re.compile(r"^achlioptas\(q=([^)]+)\)$")


def _parse_family_token(token):
    m = _ACHLIOPTAS_RE.match(token)
    if m:
        return "achlioptas", float(m.group(1))
    if token in ("gaussian", "rademacher"):
        return token, None
    raise ValueError(f"unrecognized family token {token!r}")


def to_csv(sketch, path):
    """Write a sketch to CSV: one header line ``m,n,family,seed`` followed by
    m rows of n entries at 17 significant digits (exact float round-trip)."""
    spec = sketch.spec
    with open(path, "w", newline="\n") as fh:
        fh.write(f"{spec.m},{spec.n},{_family_token(spec)},{spec.seed}\n")
        for row in sketch.matrix:
            fh.write(",".join(format(v, ".17g") for v in row) + "\n")


def from_csv(path):
    """Read a sketch written by :func:`to_csv`; matrices round-trip bitwise."""
    with open(path, "r", newline="") as fh:
        header = fh.readline().strip().split(",", 3)
        if len(header) != 4:
            raise ValueError(f"malformed sketch header: {header!r}")
        m, n = int(header[0]), int(header[1])
        family, q = _parse_family_token(header[2])
        seed = int(header[3])
        matrix = np.loadtxt(fh, delimiter=",", ndmin=2)
    spec = SketchSpec(family, m, n, seed, q)
    if matrix.shape != (m, n):
        raise ValueError(f"sketch body has shape {matrix.shape}, header says {(m, n)}")
    return Sketch(spec, matrix)


@dataclass(frozen=True)
class Psi2Probe:
    """Measured subgaussian scale of row dot products against the nominal
    sqrt(alpha) claimed for the family."""

    family: str
    q: float | None
    measured: float
    nominal: float

    @property
    def exceeded(self):
        return self.measured > self.nominal


def psi2_row_probe(family, x, rows=4096, seed=0, q=None):
    """Estimate the subgaussian norm of <row, x> over fresh unnormalized rows.

    The family's alpha is calibrated to the entry law; for spread directions
    the dot product approaches a standard gaussian, whose subgaussian norm
    sqrt(8/3) can exceed sqrt(alpha) for the discrete families.  This probe
    measures rather than asserts, so callers can record violations.
    """
    from .core import psi2_norm_estimate

    v = as_vector(x)
    spec = SketchSpec(family, int(rows), v.shape[0], seed, q)
    samples = math.sqrt(spec.m) * (build_sketch(spec).matrix @ v)
    return Psi2Probe(family, spec.q, float(psi2_norm_estimate(samples)),
                     math.sqrt(spec.alpha))
