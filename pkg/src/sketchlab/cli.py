"""Command-line front end: seeded experiments emitting stable CSV tables.

Subcommands: bound (evaluate a target-dimension formula), distort (measure
kappa/delta/epsilon/zeta), phase (distortion vs m sweep), width (Monte-Carlo
gaussian width or Dudley integral), recover (sparse recovery from sketched
measurements), calibrate (empirical search for the constant C), and props
(chord-geometry property suites).

Outputs are byte-reproducible for a fixed config: CSV with a header row, 17
significant digits, '.' decimal, LF line endings, and every row echoing the
seed, C, and alpha that produced it.  Exit codes: 0 success, 2 configuration
error, 3 infeasible experiment, 1 internal error.
"""

import argparse
import json
import math
import os
import sys
import traceback

import numpy as np

from .bounds import (
    VARIANTS,
    CalibrationConfig,
    calibrate_C,
    target_dimension,
)
from .complexity import AnalyticProfile, dudley_closed_form, dudley_integral, gaussian_width_mc
from .distortion import (
    DistortionExperiment,
    check_chord_perturbation,
    check_reach_chord_bounds,
    exact_sparse_rip,
    iota_empirical,
    measure_report,
    trial_values,
    wilson_interval,
)
from .recovery import RecoveryProblem, landweber_recover
from .sets import (
    FiniteSet,
    ManifoldSpec,
    SparseSet,
    load_point_set,
    save_point_set,
    set_from_config,
    set_to_config,
)
from .sketch import SketchSpec, build_sketch, family_alpha, from_csv
from .validation import InfeasibleError

__all__ = ["main"]

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3


class ConfigError(ValueError):
    pass


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, np.floating):
        return f"{float(value):.17g}"
    return str(value)


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        cells = [_fmt(v) for v in row]
        for cell in cells:
            if "," in cell or "\n" in cell:
                raise ValueError(f"cell {cell!r} would corrupt the CSV")
        lines.append(",".join(cells))
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _parse_m_grid(text):
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"m-grid must be start:stop:step, got {text!r}")
        start, stop, step = (int(p) for p in parts)
        if start < 1 or stop < start or step < 1:
            raise ConfigError(f"bad m-grid {text!r}")
        return list(range(start, stop + 1, step))
    m = int(text)
    if m < 1:
        raise ConfigError(f"bad m-grid {text!r}")
    return [m]


def _resolve_seed(args, required=True):
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    env = os.environ.get("SKETCHLAB_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"SKETCHLAB_SEED must be an integer, got {env!r}") from exc
    if required:
        raise ConfigError("a seed is required: pass --seed or set SKETCHLAB_SEED")
    return None


def _merge_config(args, known_dests):
    if getattr(args, "config", None) is None:
        return
    with open(args.config) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ConfigError("--config must contain a JSON object")
    for key, value in data.items():
        dest = key.replace("-", "_")
        if dest not in known_dests:
            raise ConfigError(f"unknown config key {key!r} for this command")
        if getattr(args, dest, None) is None:
            setattr(args, dest, value)


def _compact(value):
    if isinstance(value, (tuple, list)):
        return "x".join(str(v) for v in value)
    return str(value)


def _set_id(structured_set):
    if isinstance(structured_set, FiniteSet):
        pts = structured_set.points
        return f"finite(count={pts.shape[0]};n={pts.shape[1]})"
    config = set_to_config(structured_set)
    kind = config.pop("kind")
    inner = ";".join(f"{k}={_compact(v)}" for k, v in sorted(config.items()))
    return f"{kind}({inner})" if inner else kind


def _sketch_from_args(args, n=None):
    if getattr(args, "sketch_csv", None) is not None:
        return from_csv(args.sketch_csv)
    for name in ("family", "m"):
        if getattr(args, name, None) is None:
            raise ConfigError(f"--{name} is required when --sketch-csv is absent")
    n = n if n is not None else getattr(args, "n", None)
    if n is None:
        raise ConfigError("--n is required when --sketch-csv is absent")
    seed = _resolve_seed(args)
    return build_sketch(SketchSpec(args.family, int(args.m), int(n), seed,
                                   getattr(args, "q", None)))


def _structured_set_from_args(args):
    if getattr(args, "set_config", None) is not None:
        text = args.set_config
        if os.path.exists(text):
            with open(text) as fh:
                text = fh.read()
        return set_from_config(text)
    kind = getattr(args, "set", None)
    if kind == "sparse":
        if args.n is None or args.s is None:
            raise ConfigError("--set sparse needs --n and --s")
        return SparseSet(int(args.n), int(args.s))
    if kind == "finite":
        if getattr(args, "points_csv", None) is None:
            raise ConfigError("--set finite needs --points-csv")
        return FiniteSet(load_point_set(args.points_csv))
    raise ConfigError("specify a target: --set sparse|finite or --set-config")


# ---------------------------------------------------------------------------
# subcommands


_BOUND_PARAM_FLAGS = sorted({name for names in VARIANTS.values() for name in names})


def cmd_bound(args):
    if args.model is None:
        raise ConfigError("--model is required")
    C = 1.0 if args.C is None else float(args.C)
    if args.alpha is not None:
        alpha = float(args.alpha)
    elif args.family is not None:
        alpha = family_alpha(args.family, getattr(args, "q", None))
    else:
        alpha = 1.0
    params = {}
    for name in VARIANTS[args.model]:
        value = getattr(args, name, None)
        if value is None:
            continue
        if name in ("dims", "ranks"):
            value = tuple(int(v) for v in str(value).split(","))
        params[name] = value
    result = target_dimension(args.model, params, C=C, alpha=alpha)
    print(f"m={result.m} dominated_term={result.dominated_term} "
          f"C={_fmt(result.C)} alpha={_fmt(result.alpha)}")
    if args.out is not None:
        header = ["model", "m", "dominated_term"] + list(VARIANTS[args.model]) + [
            "seed", "C", "alpha"]
        row = [result.variant, result.m, result.dominated_term]
        row += [_compact(result.inputs.get(k)) for k in VARIANTS[args.model]]
        row += [None, result.C, result.alpha]
        _write_csv(args.out, header, [row])
    print(f"bound {result.variant}: m={result.m} ({result.dominated_term})",
          file=sys.stderr)
    return EXIT_OK


def cmd_distort(args):
    header = ["set_id", "family", "m", "n", "mode", "samples", "kappa", "delta",
              "epsilon", "zeta", "seed", "C", "alpha"]
    mode = args.mode
    if getattr(args, "points_csv", None) is not None and getattr(args, "set", None) is None:
        points = load_point_set(args.points_csv)
        sk = _sketch_from_args(args, n=points.shape[1])
        report = measure_report(sk, points=points)
        set_id = f"finite(count={points.shape[0]};n={points.shape[1]})"
        row_tail = [report.mode, report.samples, report.kappa, report.delta,
                    report.epsilon, report.zeta, sk.spec.seed]
    else:
        target = _structured_set_from_args(args)
        set_id = _set_id(target)
        sk = _sketch_from_args(args, n=target.ambient_dim)
        if mode == "exact":
            if isinstance(target, FiniteSet):
                report = measure_report(sk, points=target.points)
                row_tail = [report.mode, None, report.kappa, report.delta,
                            report.epsilon, report.zeta, sk.spec.seed]
            elif isinstance(target, SparseSet):
                delta = exact_sparse_rip(sk, target.s)
                row_tail = ["exact", None, delta, delta, None, None,
                            sk.spec.seed]
            else:
                raise ConfigError(
                    "exact mode supports sparse and finite targets only")
        else:
            samples = 256 if args.samples is None else int(args.samples)
            seed = _resolve_seed(args)
            report = measure_report(sk, structured_set=target, samples=samples,
                                    seed=seed)
            row_tail = [report.mode, report.samples, report.kappa, report.delta,
                        report.epsilon, report.zeta, report.seed]
    spec = sk.spec
    row = [set_id, spec.family, spec.m, spec.n] + row_tail + [None, sk.alpha]
    _write_csv(args.out, header, [row])
    print(f"distort {set_id}: kappa={_fmt(row[6])} mode={row[4]}",
          file=sys.stderr)
    return EXIT_OK


def cmd_phase(args):
    target = _structured_set_from_args(args)
    family = "gaussian" if args.family is None else args.family
    if args.m_grid is None:
        raise ConfigError("--m-grid is required")
    grid = _parse_m_grid(args.m_grid)
    trials = 50 if args.trials is None else int(args.trials)
    samples = 256 if args.samples is None else int(args.samples)
    metric = "epsilon" if args.metric is None else args.metric
    target_value = 0.25 if args.target is None else float(args.target)
    seed = _resolve_seed(args)
    jobs = args.jobs if args.jobs is None else int(args.jobs)
    exp = DistortionExperiment(
        target, family, grid[0], metric, target_value, trials, seed,
        samples=samples, q=getattr(args, "q", None),
    )
    alpha = family_alpha(family, getattr(args, "q", None))
    set_id = _set_id(target)
    header = ["set_id", "family", "n", "metric", "target", "m", "trials",
              "samples", "median", "failure_rate", "wilson_low", "wilson_high",
              "seed", "C", "alpha"]
    rows = []
    for m in grid:
        values = trial_values(exp, m=m, jobs=jobs)
        failures = int(np.sum(values > target_value))
        lo, hi = wilson_interval(failures, trials)
        rows.append([set_id, family, target.ambient_dim, metric, target_value,
                     m, trials, samples, float(np.median(values)),
                     failures / trials, lo, hi, seed, None, alpha])
    _write_csv(args.out, header, rows)
    print(f"phase {set_id}: {len(grid)} m values, trials={trials}", file=sys.stderr)
    return EXIT_OK


def cmd_width(args):
    mode = "mc" if args.mode is None else args.mode
    header = ["mode", "value", "stderr", "closed_form", "count", "dim",
              "trials", "K", "c", "n0", "diameter", "seed", "C", "alpha"]
    if mode == "mc":
        if getattr(args, "points_csv", None) is None:
            raise ConfigError("width --mode mc needs --points-csv")
        points = load_point_set(args.points_csv)
        trials = 1000 if args.trials is None else int(args.trials)
        seed = _resolve_seed(args)
        value, err = gaussian_width_mc(points, g_trials=trials, seed=seed)
        row = ["mc", value, err, None, points.shape[0], points.shape[1],
               trials, None, None, None, None, seed, None, None]
        summary = f"width mc: {value:.6g} +- {err:.2g}"
    elif mode == "dudley":
        for name in ("profile_K", "profile_c", "profile_n0", "diameter"):
            if getattr(args, name, None) is None:
                raise ConfigError(f"width --mode dudley needs --{name.replace('_', '-')}")
        profile = AnalyticProfile(float(args.profile_K), float(args.profile_c),
                                  float(args.profile_n0))
        value = dudley_integral(profile, float(args.diameter))
        closed = dudley_closed_form(profile, float(args.diameter))
        row = ["dudley", value, None, closed, None, None, None,
               profile.K, profile.c, profile.N0, float(args.diameter),
               None, None, None]
        summary = f"width dudley: {value:.6g} (closed form {closed:.6g})"
    else:
        raise ConfigError(f"unknown width mode {mode!r}")
    _write_csv(args.out, header, [row])
    print(summary, file=sys.stderr)
    return EXIT_OK


def cmd_recover(args):
    if getattr(args, "y_csv", None) is None:
        raise ConfigError("--y-csv is required")
    if args.out is None:
        raise ConfigError("--out is required (destination for the estimate CSV)")
    if args.s is None:
        raise ConfigError("--s is required")
    y = load_point_set(args.y_csv).reshape(-1)
    sk = _sketch_from_args(args)
    if y.size != sk.spec.m:
        raise ConfigError(f"y has {y.size} entries, sketch produces {sk.spec.m}")
    problem = RecoveryProblem(sk, y, SparseSet(sk.spec.n, int(args.s)))
    result = landweber_recover(
        problem,
        step=1.0 if args.step is None else float(args.step),
        max_iters=100 if args.max_iters is None else int(args.max_iters),
        tol=1e-10 if args.tol is None else float(args.tol),
        eps_estimate=getattr(args, "eps_estimate", None),
    )
    save_point_set(args.out, result.estimate[None, :])
    summary = {
        "status": result.status,
        "iterations": result.iterations,
        "residuals": list(result.residuals),
        "warnings": list(result.warnings),
        "seed": sk.spec.seed,
        "family": sk.spec.family,
        "alpha": sk.alpha,
        "out": args.out,
    }
    if getattr(args, "x_csv", None) is not None:
        truth = load_point_set(args.x_csv).reshape(-1)
        scale = float(np.linalg.norm(truth))
        rel = float(np.linalg.norm(result.estimate - truth)) / scale if scale else math.inf
        summary["rel_error"] = rel
    print(json.dumps(summary, sort_keys=True))
    print(f"recover: {result.status} after {result.iterations} iterations",
          file=sys.stderr)
    return EXIT_OK


def cmd_calibrate(args):
    variant = "jl_finite" if args.variant is None else args.variant
    for name in ("n", "points", "eps", "eta"):
        if getattr(args, name, None) is None:
            raise ConfigError(f"--{name} is required")
    seed = _resolve_seed(args)
    grid = CalibrationConfig.__dataclass_fields__["grid"].default
    if args.grid is not None:
        grid = tuple(float(v) for v in str(args.grid).split(","))
    config = CalibrationConfig(
        n=int(args.n), points=int(args.points), eps=float(args.eps),
        eta=float(args.eta),
        family="gaussian" if args.family is None else args.family,
        trials=50 if args.trials is None else int(args.trials),
        seed=seed, q=getattr(args, "q", None), grid=grid,
        jobs=args.jobs if args.jobs is None else int(args.jobs),
    )
    result = calibrate_C(variant, config)
    print(f"C={_fmt(result.C)} m={result.m} failure_rate={_fmt(result.failure_rate)} "
          f"within_ambient={_fmt(result.within_ambient)} converged={_fmt(result.converged)}")
    header = ["variant", "C", "m", "failure_rate", "chosen", "within_ambient",
              "eta", "trials", "points", "n", "family", "seed", "alpha"]
    rows = [
        [result.variant, C, m, rate, C == result.C and result.converged,
         m <= config.n, config.eta, config.trials, config.points, config.n,
         config.family, seed, result.alpha]
        for C, m, rate in result.table
    ]
    if args.out is not None:
        _write_csv(args.out, header, rows)
    print(f"calibrate {variant}: C={_fmt(result.C)} "
          f"(converged={_fmt(result.converged)})", file=sys.stderr)
    return EXIT_OK


def cmd_props(args):
    if args.suite is None:
        raise ConfigError("--suite is required: chords, reach, or iota")
    samples = 100_000 if args.samples is None else int(args.samples)
    seed = _resolve_seed(args)
    radius = 1.0 if args.radius is None else float(args.radius)
    ambient = 3 if args.ambient is None else int(args.ambient)
    header = ["suite", "detail", "violations", "checked", "worst_ratio",
              "samples", "seed", "C", "alpha"]
    if args.suite == "chords":
        dim = 8 if args.dim is None else int(args.dim)
        violations, checked, worst = check_chord_perturbation(samples, dim, seed)
        detail = f"dim={dim}"
    elif args.suite == "reach":
        spec = ManifoldSpec("circle", ambient=ambient, radius=radius)
        violations, checked, worst = check_reach_chord_bounds(spec, samples, seed)
        detail = f"circle(radius={_fmt(radius)};ambient={ambient})"
    elif args.suite == "iota":
        manifold = "circle" if args.manifold is None else args.manifold
        if manifold == "circle":
            spec = ManifoldSpec("circle", ambient=ambient, radius=radius)
            detail = f"circle(radius={_fmt(radius)};ambient={ambient})"
        elif manifold == "helix":
            a = 1.0 if args.a is None else float(args.a)
            b = 0.5 if args.b is None else float(args.b)
            spec = ManifoldSpec("helix", ambient=ambient, a=a, b=b)
            detail = f"helix(a={_fmt(a)};b={_fmt(b)};ambient={ambient})"
        else:
            raise ConfigError(f"unknown manifold {manifold!r}")
        worst = iota_empirical(spec, samples, seed)
        violations, checked = None, samples
    else:
        raise ConfigError(f"unknown suite {args.suite!r}")
    row = [args.suite, detail, violations, checked, worst, samples, seed,
           None, None]
    _write_csv(args.out, header, [row])
    if args.suite == "iota":
        print(f"props iota {detail}: lower bound {worst:.6g}", file=sys.stderr)
    else:
        print(f"props {args.suite}: {violations} violations in {checked} checks",
              file=sys.stderr)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_common(sub):
    sub.add_argument("--config", help="JSON file whose keys mirror the flags")
    sub.add_argument("--seed", type=int, help="seed (or set SKETCHLAB_SEED)")
    sub.add_argument("--out", help="CSV destination (default: stdout)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sketchlab",
        description="Seeded subgaussian sketching experiments",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("bound", help="evaluate a target-dimension formula")
    _add_common(p)
    p.add_argument("--model", choices=sorted(VARIANTS))
    p.add_argument("--C", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--family")
    p.add_argument("--q", type=float)
    for name in _BOUND_PARAM_FLAGS:
        flag = "--" + name.replace("_", "-")
        if name in ("dims", "ranks"):
            p.add_argument(flag, dest=name, help="comma-separated integers")
        elif name in ("points", "k", "n0", "K", "K2", "K_fin", "n", "s", "p",
                      "l", "r", "n1", "n2"):
            p.add_argument(flag, dest=name, type=int)
        else:
            p.add_argument(flag, dest=name, type=float)

    p = commands.add_parser("distort", help="measure distortion constants")
    _add_common(p)
    p.add_argument("--sketch-csv")
    p.add_argument("--family")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--q", type=float)
    p.add_argument("--set", choices=["sparse", "finite"])
    p.add_argument("--set-config")
    p.add_argument("--s", type=int)
    p.add_argument("--points-csv")
    p.add_argument("--samples", type=int)
    p.add_argument("--mode", choices=["mc", "exact"])

    p = commands.add_parser("phase", help="distortion sweep over m")
    _add_common(p)
    p.add_argument("--set", choices=["sparse", "finite"])
    p.add_argument("--set-config")
    p.add_argument("--n", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--points-csv")
    p.add_argument("--family")
    p.add_argument("--q", type=float)
    p.add_argument("--m-grid", dest="m_grid", help="start:stop:step (stop inclusive)")
    p.add_argument("--trials", type=int)
    p.add_argument("--samples", type=int)
    p.add_argument("--metric", choices=["delta", "epsilon", "zeta", "kappa"])
    p.add_argument("--target", type=float)
    p.add_argument("--jobs", type=int)

    p = commands.add_parser("width", help="gaussian width / Dudley integral")
    _add_common(p)
    p.add_argument("--mode", choices=["mc", "dudley"])
    p.add_argument("--points-csv")
    p.add_argument("--trials", type=int)
    p.add_argument("--profile-K", dest="profile_K", type=float)
    p.add_argument("--profile-c", dest="profile_c", type=float)
    p.add_argument("--profile-n0", dest="profile_n0", type=float)
    p.add_argument("--diameter", type=float)

    p = commands.add_parser("recover", help="sparse recovery from measurements")
    _add_common(p)
    p.add_argument("--sketch-csv")
    p.add_argument("--family")
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--q", type=float)
    p.add_argument("--s", type=int)
    p.add_argument("--y-csv")
    p.add_argument("--x-csv")
    p.add_argument("--step", type=float)
    p.add_argument("--max-iters", dest="max_iters", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--eps-estimate", dest="eps_estimate", type=float)

    p = commands.add_parser("calibrate", help="search for the constant C")
    _add_common(p)
    p.add_argument("--variant", choices=["jl_finite"])
    p.add_argument("--n", type=int)
    p.add_argument("--points", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--family")
    p.add_argument("--q", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--grid", help="comma-separated ascending C values")
    p.add_argument("--jobs", type=int)

    p = commands.add_parser("props", help="chord-geometry property suites")
    _add_common(p)
    p.add_argument("--suite", choices=["chords", "reach", "iota"])
    p.add_argument("--samples", type=int)
    p.add_argument("--dim", type=int)
    p.add_argument("--radius", type=float)
    p.add_argument("--ambient", type=int)
    p.add_argument("--manifold", choices=["circle", "helix"])
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)

    return parser


_DISPATCH = {
    "bound": cmd_bound,
    "distort": cmd_distort,
    "phase": cmd_phase,
    "width": cmd_width,
    "recover": cmd_recover,
    "calibrate": cmd_calibrate,
    "props": cmd_props,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    dests = {action.dest for action in parser._subparsers._group_actions[0]
             .choices[args.command]._actions}
    try:
        _merge_config(args, dests)
        return _DISPATCH[args.command](args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, ValueError, TypeError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
