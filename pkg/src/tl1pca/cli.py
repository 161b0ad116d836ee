"""Command-line interface: fit, toy, eval, convergence.

Every command is a deterministic function of its flags and seed; outputs
are written atomically with 17 significant digits and the manifest
records enough (input hash, full resolved config) to replay a run.
Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric
failure.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .datasets import (FILL_MODES, SplitSpec, load_csv, save_csv,
                       toy_generate)
from .errors import ConfigError, DataError, NumericError
from .estimators import METHOD_NAMES, build_estimator
from .evaluation import (DEFAULT_A_GRID, DEFAULT_P_GRID, accuracy_curve,
                         angle_to, convergence_curve, write_curves_csv,
                         write_report_json)
from .ioutils import atomic_write, dump_json, fmt17
from .norms import check_p_exponent, check_shape_param
from .solver import SolverConfig, write_trace_csv
from .deflation import write_projection_csv

#: Toy-experiment parameter panels.
TOY_A_VALUES = (100.0, 1.0, 0.01)
TOY_P_VALUES = (1.0, 0.5, 0.01)

THREADS_ENV = "TL1PCA_THREADS"


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tl1pca",
        description="Robust PCA by bounded-dispersion maximization on the sphere.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit components on a CSV dataset")
    _add_method_flags(fit)
    fit.add_argument("--m", type=int, default=1,
                     help="number of components (default 1)")
    fit.add_argument("--input", required=True, help="input dataset CSV")
    _add_common_flags(fit)
    fit.set_defaults(func=cmd_fit)

    toy = sub.add_parser(
        "toy", help="run the 2-D outlier toy experiment and tabulate angles"
    )
    _add_method_flags(toy, required=False)
    _add_common_flags(toy)
    toy.set_defaults(func=cmd_toy)

    ev = sub.add_parser(
        "eval", help="accuracy-vs-dimension benchmark over a parameter grid"
    )
    _add_method_flags(ev, required=False)
    ev.add_argument("--input", required=True, help="input dataset CSV")
    ev.add_argument("--dims", default=None,
                    help="projection dimensions, e.g. 1..10 or 1,2,5")
    ev.add_argument("--block", type=int, default=0,
                    help="block-noise size applied to training images")
    ev.add_argument("--fill", choices=FILL_MODES, default="random",
                    help="block fill mode (default random)")
    ev.add_argument("--repeats", type=int, default=15,
                    help="number of random splits (default 15)")
    ev.add_argument("--train-fraction", type=float, default=0.7,
                    help="training fraction per class (default 0.7)")
    ev.add_argument("--refit-per-dim", action="store_true",
                    help="refit at every dimension instead of reusing prefixes")
    _add_common_flags(ev)
    ev.set_defaults(func=cmd_eval)

    conv = sub.add_parser(
        "convergence", help="objective trace of the first component's ascent"
    )
    _add_method_flags(conv)
    conv.add_argument("--input", default=None,
                      help="input dataset CSV (default: generated toy data)")
    _add_common_flags(conv)
    conv.set_defaults(func=cmd_convergence)
    return parser


def _add_method_flags(p, required=True):
    p.add_argument("--method", choices=METHOD_NAMES, required=required,
                   default=None, help="projection objective")
    p.add_argument("--a", type=float, default=None,
                   help="shape parameter for tl1")
    p.add_argument("--p", type=float, default=None,
                   help="exponent for lp, in (0,1]")


def _add_common_flags(p):
    p.add_argument("--seed", type=int, default=None,
                   help="master seed (default 0; toy generation has its own "
                        "frozen default draw)")
    p.add_argument("--theta0", type=float, default=float(np.pi / 4),
                   help="initial step angle in radians")
    p.add_argument("--rel-tol", type=float, default=1e-8,
                   help="relative objective-gain stopping tolerance")
    p.add_argument("--max-iter", type=int, default=500,
                   help="outer iteration cap per component")
    p.add_argument("--out-dir", default=".", help="output directory")


def _solver_config(args) -> SolverConfig:
    seed = 0 if args.seed is None else args.seed
    return SolverConfig(theta0=args.theta0, rel_tol=args.rel_tol,
                        max_iter=args.max_iter, seed=seed)


def _validate_method_params(method, a, p):
    """Eager flag validation so config errors beat data errors."""
    if a is not None:
        if method != "tl1":
            raise ConfigError("--a is only valid with --method tl1")
        check_shape_param(a)
    if p is not None:
        if method != "lp":
            raise ConfigError("--p is only valid with --method lp")
        check_p_exponent(p)
    if method == "tl1" and a is None:
        check_shape_param(1.0)
    if method == "lp" and p is None:
        check_p_exponent(0.5)


def _ensure_out_dir(args) -> str:
    out = args.out_dir
    os.makedirs(out, exist_ok=True)
    return out


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _parse_dims(text, d) -> tuple:
    if text is None:
        return tuple(range(1, min(d, 10) + 1))
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..")
            dims = tuple(range(int(lo), int(hi) + 1))
        else:
            dims = tuple(int(tok) for tok in text.split(","))
    except ValueError as exc:
        raise ConfigError(
            f"cannot parse --dims {text!r}: use 'LO..HI' or a comma list"
        ) from exc
    if not dims:
        raise ConfigError("--dims is empty")
    return dims


def cmd_fit(args) -> None:
    if args.method is None:
        raise ConfigError("--method is required")
    _validate_method_params(args.method, args.a, args.p)
    if args.m < 1:
        raise ConfigError(f"--m must be >= 1, got {args.m}")
    config = _solver_config(args)
    out = _ensure_out_dir(args)

    dataset = load_csv(args.input)
    est = build_estimator(args.method, args.m, a=args.a, p=args.p,
                          config=config)
    est.fit(dataset.data.values.T)

    write_projection_csv(est.components_.T, os.path.join(out, "W.csv"))
    results = {"n_components": int(est.n_components_),
               "truncated": bool(est.truncated_)}
    if args.method == "l2":
        results["eigenvalues"] = [float(v) for v in est.eigenvalues_]
    else:
        for j, trace in enumerate(est.traces_):
            write_trace_csv(trace, os.path.join(out, f"trace_{j}.csv"))
        results["objective_values"] = [
            float(t.objectives[-1]) for t in est.traces_
        ]
        results["iterations"] = [int(t.iterations) for t in est.traces_]
        results["halt_reasons"] = [t.halt_reason for t in est.traces_]

    _write_manifest(out, "fit", args,
                    inputs={args.input: _sha256(args.input)},
                    results=results)


def _toy_panel(args):
    if args.method is not None:
        if args.method == "tl1":
            return [("tl1", a) for a in
                    ([args.a] if args.a is not None else TOY_A_VALUES)]
        if args.method == "lp":
            return [("lp", p) for p in
                    ([args.p] if args.p is not None else TOY_P_VALUES)]
        return [(args.method, None)]
    panel = [("l2", None), ("l1", None)]
    panel += [("lp", p) for p in TOY_P_VALUES]
    panel += [("tl1", a) for a in TOY_A_VALUES]
    return panel


def cmd_toy(args) -> None:
    _validate_method_params(args.method, args.a, args.p)
    config = _solver_config(args)
    out = _ensure_out_dir(args)

    dataset = toy_generate(args.seed)
    toy_path = os.path.join(out, "toy.csv")
    save_csv(dataset, toy_path)
    ref = np.array([1.0, 1.0]) / np.sqrt(2.0)

    rows = []
    angles = {}
    for method, param in _toy_panel(args):
        a = param if method == "tl1" else None
        p = param if method == "lp" else None
        est = build_estimator(method, 1, a=a, p=p, config=config)
        est.fit(dataset.data.values.T)
        angle = angle_to(est.components_[0], ref)
        label = method if param is None else f"{method}({fmt17(param)})"
        angles[label] = angle
        rows.append((method, "" if param is None else fmt17(param), angle))

    lines = ["method,param,angle_deg"]
    lines += [f"{m},{q},{fmt17(angle)}" for m, q, angle in rows]
    atomic_write(os.path.join(out, "angles.csv"), "\n".join(lines) + "\n")

    _write_manifest(out, "toy", args,
                    inputs={"toy.csv": _sha256(toy_path)},
                    results={"angles_deg": angles})


def _eval_grid(args):
    if args.method is not None:
        if args.method == "tl1":
            return [("tl1", a) for a in
                    ([args.a] if args.a is not None else DEFAULT_A_GRID)]
        if args.method == "lp":
            return [("lp", p) for p in
                    ([args.p] if args.p is not None else DEFAULT_P_GRID)]
        return [(args.method, None)]
    grid = [("l2", None), ("l1", None)]
    grid += [("lp", p) for p in DEFAULT_P_GRID]
    grid += [("tl1", a) for a in DEFAULT_A_GRID]
    return grid


def _thread_count(n_tasks) -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        cap = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise ConfigError(f"{THREADS_ENV} must be >= 1, got {cap}")
    return min(cap, n_tasks)


def cmd_eval(args) -> None:
    _validate_method_params(args.method, args.a, args.p)
    if args.repeats < 1:
        raise ConfigError(f"--repeats must be >= 1, got {args.repeats}")
    config = _solver_config(args)
    out = _ensure_out_dir(args)

    dataset = load_csv(args.input)
    dims = _parse_dims(args.dims, dataset.data.d)
    if args.block and dataset.image_shape is None:
        raise ConfigError("--block requires a dataset with image_shape metadata")
    if args.block:
        h, w = dataset.image_shape
        if args.block < 0 or args.block > min(h, w):
            raise ConfigError(
                f"--block must be in [0, {min(h, w)}] for {h}x{w} images, "
                f"got {args.block}"
            )
    split_spec = SplitSpec(train_fraction=args.train_fraction,
                           n_repeats=args.repeats,
                           seed=0 if args.seed is None else args.seed)
    grid = _eval_grid(args)

    def run(point):
        method, param = point
        return accuracy_curve(
            dataset, method, dims, split_spec,
            a=param if method == "tl1" else None,
            p=param if method == "lp" else None,
            config=config, block_size=args.block, fill=args.fill,
            refit_per_dim=args.refit_per_dim,
        )

    workers = _thread_count(len(grid))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run, grid))
    else:
        reports = [run(point) for point in grid]

    write_report_json(reports, os.path.join(out, "report.json"))
    write_curves_csv(reports, os.path.join(out, "curves.csv"))
    _write_manifest(out, "eval", args,
                    inputs={args.input: _sha256(args.input)},
                    results={"best": {r.label: r.best() for r in reports}})


def cmd_convergence(args) -> None:
    if args.method is None:
        raise ConfigError("--method is required")
    if args.method == "l2":
        raise ConfigError("convergence traces apply to the iterative methods only")
    _validate_method_params(args.method, args.a, args.p)
    config = _solver_config(args)
    out = _ensure_out_dir(args)

    if args.input is None:
        dataset = toy_generate(args.seed)
        inputs = {"generated": "toy"}
    else:
        dataset = load_csv(args.input)
        inputs = {args.input: _sha256(args.input)}

    trace = convergence_curve(dataset, args.method, a=args.a, p=args.p,
                              config=config)
    write_trace_csv(trace, os.path.join(out, "trace.csv"))
    _write_manifest(out, "convergence", args, inputs=inputs,
                    results={"iterations": int(trace.iterations),
                             "converged": bool(trace.converged),
                             "halt_reason": trace.halt_reason,
                             "final_objective": float(trace.objectives[-1])})


def _write_manifest(out, command, args, *, inputs, results) -> None:
    config = {
        k: v for k, v in sorted(vars(args).items())
        if k not in ("func", "command") and not k.startswith("_")
    }
    manifest = {
        "command": command,
        "config": config,
        "inputs": inputs,
        "results": results,
    }
    dump_json(manifest, os.path.join(out, "manifest.json"))


if __name__ == "__main__":
    sys.exit(main())
