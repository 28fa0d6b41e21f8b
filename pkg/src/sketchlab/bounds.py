"""Target-dimension bounds: m = ceil(C alpha^2 err^-2 max{complexity, tail}).

Every variant evaluates one closed-form sufficient condition on the sketch
dimension m, with the universal constant C exposed (default 1) and the
subgaussian parameter alpha taken from the sketch family.  Natural
logarithms throughout; log_+ means max(log, 0).  The `calibrate_C` helper
searches a geometric grid for the smallest C whose predicted m empirically
meets a failure-rate target, so no number here masquerades as a universal
constant.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .complexity import gamma2_upper
from .distortion import epsilon_mc
from .sketch import FAMILIES, SketchSpec, build_sketch, family_alpha
from .validation import check_seed

__all__ = [
    "VARIANTS",
    "BoundModel",
    "BoundResult",
    "target_dimension",
    "ball_volume",
    "CalibrationConfig",
    "CalibrationResult",
    "calibrate_C",
    "DEFAULT_C_GRID",
]


def _log_plus(x):
    return max(math.log(x), 0.0)


# per-variant required parameter names (gamma2 may instead arrive as a
# profile plus diameter, resolved by _resolve_gamma2)
VARIANTS = {
    "jl_finite": ("points", "eps", "eta"),
    "master": ("kappa", "diameter", "gamma2", "eta"),
    "rip_gamma2": ("delta", "gamma2", "eta"),
    "eps_gamma2": ("eps", "gamma2", "eta"),
    "zeta_gamma2": ("zeta", "diameter", "gamma2", "eta"),
    "cov_dim": ("delta", "k", "n0", "c", "K", "eta"),
    "subspace_union_finite": ("delta", "k", "K", "eta"),
    "sparse": ("delta", "n", "s", "eta"),
    "cosparse": ("delta", "p", "l", "n", "eta"),
    "matrix": ("delta", "n1", "n2", "r", "eta"),
    "tensor": ("delta", "dims", "ranks", "eta"),
    "uos_rip": ("delta", "K", "gamma2", "eta"),
    "uos_embed": ("eps", "K", "gamma2", "eta"),
    "manifold_curves": ("eps", "K", "gamma2", "eta"),
    "manifold_additive": ("zeta", "diameter", "doubling_dim", "eta"),
    "manifold_linearization": ("eps", "k", "K", "eta"),
    "manifold_iota": ("eps", "K2", "K_fin", "K", "iota", "diameter2", "eta"),
    "manifold_reach": ("eps", "K2", "K", "tau", "diameter2", "eta"),
    "manifold_volume": ("eps", "K", "tau", "volume", "eta"),
}

_OPEN_UNIT = ("eps", "delta", "zeta", "eta")
_POSITIVE = (
    "kappa", "diameter", "gamma2", "k", "n0", "c", "K", "n", "s", "p", "l",
    "r", "n1", "n2", "points", "doubling_dim", "K2", "K_fin", "iota",
    "diameter2", "tau", "volume",
)


@dataclass(frozen=True)
class BoundModel:
    """One target-dimension formula, selected by variant name."""

    variant: str

    def __post_init__(self):
        if self.variant not in VARIANTS:
            known = ", ".join(sorted(VARIANTS))
            raise ValueError(f"unknown variant {self.variant!r}; known: {known}")

    @property
    def required(self):
        return VARIANTS[self.variant]


@dataclass(frozen=True)
class BoundResult:
    """Evaluated bound: the integer m, which max-argument was active, and an
    echo of every input so no constant is implicit."""

    m: int
    dominated_term: str
    variant: str
    C: float
    alpha: float
    inputs: dict = field(compare=False)

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.dominated_term not in ("complexity", "tail"):
            raise ValueError(f"bad dominated_term {self.dominated_term!r}")


def _resolve_gamma2(params):
    """gamma2 either given directly or as a (profile, diameter) Dudley bound."""
    if "gamma2" in params:
        return float(params["gamma2"]), "supplied"
    if "profile" in params:
        g2 = gamma2_upper(
            params["profile"], params["diameter"], params.get("cardinality")
        )
        return float(g2), "dudley"
    raise ValueError("missing parameter gamma2 (or profile + diameter)")


def _validated(variant, params):
    out = dict(params)
    needs_gamma2 = "gamma2" in VARIANTS[variant]
    gamma2_source = None
    if needs_gamma2:
        out["gamma2"], gamma2_source = _resolve_gamma2(out)
        out.pop("profile", None)
    missing = [k for k in VARIANTS[variant] if k not in out]
    if missing:
        raise ValueError(f"{variant} missing parameter(s): {', '.join(missing)}")
    for key in VARIANTS[variant]:
        v = out[key]
        if key in ("dims", "ranks"):
            v = tuple(int(x) for x in v)
            if len(v) < 1 or any(x < 1 for x in v):
                raise ValueError(f"{key} must be a nonempty tuple of positive ints")
            out[key] = v
        elif key in _OPEN_UNIT:
            if not 0.0 < float(v) < 1.0:
                raise ValueError(f"{key} must lie in (0, 1), got {v}")
            out[key] = float(v)
        elif key in _POSITIVE:
            if not float(v) > 0 or not math.isfinite(float(v)):
                raise ValueError(f"{key} must be positive and finite, got {v}")
            out[key] = float(v)
    if variant == "tensor" and len(out["dims"]) != len(out["ranks"]):
        raise ValueError("dims and ranks must have equal length")
    if variant == "sparse" and out["s"] > out["n"]:
        raise ValueError("need s <= n")
    if variant == "cosparse" and (out["l"] > out["p"] or out["l"] > out["n"]):
        raise ValueError("need l <= p and l <= n")
    return out, gamma2_source


def _terms(variant, p):
    """(error_factor, complexity_term, tail_term) for one variant."""
    log_eta = math.log(1.0 / p["eta"]) if "eta" in p else 0.0
    if variant == "jl_finite":
        return p["eps"] ** -2, math.log(p["points"]), log_eta
    if variant == "master":
        d2 = p["diameter"] ** 2
        return p["kappa"] ** -2 * d2, p["gamma2"] ** 2, d2 * log_eta
    if variant == "rip_gamma2":
        return p["delta"] ** -2, p["gamma2"] ** 2, log_eta
    if variant == "eps_gamma2":
        return p["eps"] ** -2, p["gamma2"] ** 2, log_eta
    if variant == "zeta_gamma2":
        d2 = p["diameter"] ** 2
        return p["zeta"] ** -2 * d2, p["gamma2"] ** 2, d2 * log_eta
    if variant == "cov_dim":
        comp = math.log(p["k"]) + math.log(p["n0"]) + p["K"] * math.log(p["c"])
        return p["delta"] ** -2, comp, log_eta
    if variant == "subspace_union_finite":
        return p["delta"] ** -2, math.log(p["k"]) + p["K"], log_eta
    if variant == "sparse":
        return p["delta"] ** -2, p["s"] * math.log(math.e * p["n"] / p["s"]), log_eta
    if variant == "cosparse":
        comp = p["l"] * math.log(math.e * p["p"] / p["l"]) + (p["n"] - p["l"])
        return p["delta"] ** -2, comp, log_eta
    if variant == "matrix":
        return p["delta"] ** -2, p["r"] * (p["n1"] + p["n2"] + 1), log_eta
    if variant == "tensor":
        comp = (math.prod(p["ranks"]) + sum(n * r for n, r in zip(p["dims"], p["ranks"]))) * math.log(len(p["dims"]))
        return p["delta"] ** -2, comp, log_eta
    if variant == "uos_rip":
        return p["delta"] ** -2, p["K"] + p["gamma2"] ** 2, log_eta
    if variant == "uos_embed":
        return p["eps"] ** -2, p["K"] + p["gamma2"] ** 2, log_eta
    if variant == "manifold_curves":
        eff = 2.0 * p["eps"] - p["eps"] ** 2
        return eff ** -2, p["K"] + p["gamma2"] ** 2, log_eta
    if variant == "manifold_additive":
        d4 = p["diameter"] ** 4
        return p["zeta"] ** -2 * d4, p["doubling_dim"], log_eta
    if variant == "manifold_linearization":
        return p["eps"] ** -2, math.log(p["k"]) + p["K"], log_eta
    if variant == "manifold_iota":
        comp = p["K2"] * _log_plus(p["iota"] * p["diameter2"]) + p["K_fin"] + p["K"]
        return p["eps"] ** -2, comp, log_eta
    if variant == "manifold_reach":
        comp = p["K2"] * _log_plus(p["diameter2"] / p["tau"]) + p["K"]
        return p["eps"] ** -2, comp, log_eta
    if variant == "manifold_volume":
        comp = p["K"] * _log_plus(p["K"] / p["tau"]) + p["K"] + _log_plus(p["volume"])
        return p["eps"] ** -2, comp, log_eta
    raise AssertionError(variant)


def target_dimension(model, params, C=1.0, alpha=1.0):
    """Evaluate one bound: m = ceil(C alpha^2 err^-2 max{complexity, tail}).

    `model` is a BoundModel or variant name; `params` a dict of that
    variant's parameters.  gamma2-type inputs may be supplied directly or as
    a covering profile (`profile` plus `diameter`); the resolved value and
    its provenance are echoed in the result.
    """
    if isinstance(model, str):
        model = BoundModel(model)
    if not C > 0:
        raise ValueError(f"C must be positive, got {C}")
    if not alpha >= 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    p, gamma2_source = _validated(model.variant, params)
    err_factor, comp, tail = _terms(model.variant, p)
    dominated = "complexity" if comp >= tail else "tail"
    m = math.ceil(C * alpha ** 2 * err_factor * max(comp, tail))
    echo = dict(p)
    if gamma2_source is not None:
        echo["gamma2_source"] = gamma2_source
    return BoundResult(max(int(m), 1), dominated, model.variant, C, alpha, echo)


def ball_volume(K):
    """Volume of the unit euclidean ball in dimension K: pi^(K/2)/Gamma(K/2+1)."""
    if not K >= 1:
        raise ValueError(f"K must be >= 1, got {K}")
    return math.pi ** (K / 2.0) / math.gamma(K / 2.0 + 1.0)


DEFAULT_C_GRID = tuple(2.0 ** k / 4.0 for k in range(7))  # 0.25 .. 16


@dataclass(frozen=True)
class CalibrationConfig:
    """Desk-scale experiment used to pick C empirically.

    A fixed random cloud of `points` rows in R^n is drawn once from `seed`;
    trial t applies a fresh sketch with seed `seed + t` and fails when the
    measured pairwise distortion exceeds eps.  family "identity" short
    circuits the measurement to zero (grid-search plumbing check).
    """

    n: int
    points: int
    eps: float
    eta: float
    family: str = "gaussian"
    trials: int = 50
    seed: int = 0
    q: float | None = None
    grid: tuple = DEFAULT_C_GRID
    jobs: int | None = None

    def __post_init__(self):
        if self.n < 1 or self.points < 2:
            raise ValueError("need n >= 1 and points >= 2")
        if not 0.0 < self.eps < 1.0 or not 0.0 < self.eta < 1.0:
            raise ValueError("eps and eta must lie in (0, 1)")
        if self.family != "identity" and self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.trials < 10:
            raise ValueError("need trials >= 10")
        if len(self.grid) < 1 or any(c <= 0 for c in self.grid) or list(self.grid) != sorted(self.grid):
            raise ValueError("grid must be positive and ascending")
        check_seed(self.seed)


@dataclass(frozen=True)
class CalibrationResult:
    """Outcome of the grid search; `converged` False means no grid point met
    the failure target and C echoes the last one tried.  `within_ambient`
    False (m > n) is reported, not fatal."""

    C: float
    m: int
    failure_rate: float
    within_ambient: bool
    converged: bool
    table: tuple  # (C, m, failure_rate) per grid point tried
    grid: tuple
    variant: str
    eta: float
    alpha: float


def _calibration_trial(config, cloud, m, t):
    if config.family == "identity":
        return 0.0
    spec = SketchSpec(config.family, m, config.n, config.seed + t, config.q)
    return epsilon_mc(build_sketch(spec), cloud)


def calibrate_C(variant, config):
    """Smallest grid C whose predicted m keeps the empirical failure rate of
    the eps target at or below eta.

    Only jl_finite has a desk-scale experiment wired up.  Trials for one C
    run in parallel when config.jobs is set, merged in trial order.
    """
    if variant != "jl_finite":
        raise ValueError(f"no executable calibration experiment for {variant!r}")
    alpha = 1.0 if config.family == "identity" else family_alpha(config.family, config.q)
    rng = np.random.default_rng(config.seed)
    cloud = rng.standard_normal((config.points, config.n))
    table = []
    for C in config.grid:
        m = target_dimension(
            "jl_finite",
            {"points": config.points, "eps": config.eps, "eta": config.eta},
            C=C,
            alpha=alpha,
        ).m
        if config.jobs and config.jobs > 1:
            with ThreadPoolExecutor(max_workers=config.jobs) as pool:
                values = list(
                    pool.map(lambda t: _calibration_trial(config, cloud, m, t), range(config.trials))
                )
        else:
            values = [_calibration_trial(config, cloud, m, t) for t in range(config.trials)]
        rate = sum(v > config.eps for v in values) / config.trials
        table.append((C, m, rate))
        if rate <= config.eta:
            return CalibrationResult(
                C, m, rate, m <= config.n, True, tuple(table), config.grid,
                variant, config.eta, alpha,
            )
    C, m, rate = table[-1]
    return CalibrationResult(
        C, m, rate, m <= config.n, False, tuple(table), config.grid,
        variant, config.eta, alpha,
    )
