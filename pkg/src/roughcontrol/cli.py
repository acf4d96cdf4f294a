"""Command-line experiment runner.

Subcommands:
    benchmark  analytic reference values (tracking quadrature, TWAP)
    run        train a signature policy and report test cost
    linearize  quadratic-program solution of the execution problem
    sigdump    signature stream of a seeded driver path as CSV

All output is CSV; result rows carry seed, dt, and path-count provenance
columns.  Exit codes: 0 success, 2 configuration error, 3 numeric error,
4 simulation error.  ROUGHCONTROL_WORKERS caps the linear-algebra thread
pool when set.
"""

import argparse
import dataclasses
import os
import sys

import numpy as np

from . import benchmark as bench
from .config import ExperimentConfig, emit_config, load_config
from .dynamics import execution_problem, tracking_problem
from .errors import ConfigError, RoughControlError
from .linearize import (build_objective, expected_signature, refined_mc_cost,
                        solve_linearized)
from .noise import FbmSampler, scale_shift
from .optim import make_streams, train
from .policy import init_policy
from .signature import stream_signatures


def _apply_worker_limit():
    workers = os.environ.get("ROUGHCONTROL_WORKERS")
    if not workers:
        return
    try:
        count = int(workers)
        if count < 1:
            raise ValueError
    except ValueError:
        raise ConfigError(
            f"ROUGHCONTROL_WORKERS must be a positive integer, "
            f"got {workers!r}")
    try:
        import threadpoolctl
        threadpoolctl.threadpool_limits(count)
    except ImportError:
        pass


def _merged_config(args):
    """Config file values overridden by any explicitly given CLI flags."""
    config = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {
        "problem": args.problem,
        "policy": getattr(args, "policy", None),
        "hurst": getattr(args, "hurst", None),
        "level": getattr(args, "level", None),
        "dt": getattr(args, "dt", None),
        "refinement": getattr(args, "refinement", None),
        "n_train": getattr(args, "n_train", None),
        "n_test": getattr(args, "n_test", None),
        "n_steps": getattr(args, "n_steps", None),
        "batch_size": getattr(args, "batch_size", None),
        "lr": getattr(args, "lr", None),
        "seed": args.seed,
        "output": args.out,
    }
    updates = {k: v for k, v in overrides.items() if v is not None}
    return dataclasses.replace(config, **updates).validate()


def _emit(config, header, rows):
    text = ",".join(header) + "\n"
    for row in rows:
        text += ",".join(_fmt(v) for v in row) + "\n"
    if config.output:
        with open(config.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".10g")
    return str(value)


def _make_problem(config):
    if config.problem == "tracking":
        return tracking_problem()
    return execution_problem()


def cmd_benchmark(args):
    config = _merged_config(args)
    rows = []
    if config.problem == "tracking":
        for h in config.hurst:
            value = bench.tracking_optimum(h)
            rows.append(("tracking", h, "optimal_cost", value,
                         None, None, None, None))
    else:
        rate, value = bench.twap()
        rows.append(("execution", None, "twap_rate", rate,
                     None, None, None, None))
        rows.append(("execution", None, "twap_value", value,
                     None, None, None, None))
    _emit(config, ("problem", "hurst", "quantity", "value",
                   "seed", "dt", "n_train", "n_test"), rows)
    return 0


def cmd_run(args):
    config = _merged_config(args)
    problem = _make_problem(config)
    lr = config.lr if config.lr > 0 else None
    rows = []
    for h in config.hurst:
        for n in config.level:
            train_stream, test_stream = make_streams(
                problem, h, n, config.dt, config.refinement,
                config.n_train, config.n_test, seed=config.seed)
            policy = init_policy(config.policy, train_stream.dim, n,
                                 problem.n_controls, seed=config.seed)
            _, (test_mean, test_se) = train(
                problem, policy, train_stream, test_stream,
                n_steps=config.n_steps, batch_size=config.batch_size,
                lr=lr, seed=config.seed)
            improvement = None
            if config.problem == "execution":
                _, j_ref = bench.twap()
                improvement = (-test_mean - j_ref) / j_ref * 100.0
            rows.append((config.problem, config.policy, h, n,
                         test_mean, test_se, improvement, config.seed,
                         config.dt, config.n_train, config.n_test))
    _emit(config, ("problem", "policy", "hurst", "level", "test_cost",
                   "test_se", "improvement_pct", "seed", "dt",
                   "n_train", "n_test"), rows)
    return 0


def cmd_linearize(args):
    config = _merged_config(args)
    problem = execution_problem()
    horizon = config.horizon
    n = int(round(horizon / config.dt))
    grid = np.linspace(0.0, horizon, n + 1)
    _, j_ref = bench.twap()
    rows = []
    for h in config.hurst:
        sampler = FbmSampler(grid[1:], h, seed=config.seed)
        driver = scale_shift(
            sampler.sample_paths_with_origin(config.n_test, 0),
            problem.params["sigma"], problem.params["x0"])
        for level in config.level:
            stream = stream_signatures(
                grid, driver, np.array([grid[0], grid[-1]]), 2 * level + 2)
            objective = build_objective(level, expected_signature(stream))
            ell, j_lin = solve_linearized(objective)
            policy = init_policy("linear", 2, level, problem.n_controls)
            policy.coeffs[0] = ell
            mc, se = refined_mc_cost(problem, grid, driver, policy,
                                     refinement=args.eval_refinement)
            improvement = (-j_lin - j_ref) / j_ref * 100.0
            rows.append((h, level, j_lin, mc, se, improvement, config.seed,
                         config.dt, config.n_test))
    _emit(config, ("hurst", "level", "j_lin", "mc_cost", "mc_se",
                   "improvement_pct", "seed", "dt", "n_paths"), rows)
    return 0


def cmd_sigdump(args):
    config = _merged_config(args)
    h = config.hurst[0]
    level = config.level[0]
    n = int(round(config.horizon / config.dt))
    grid = np.linspace(0.0, config.horizon, n + 1)
    sampler = FbmSampler(grid[1:], h, seed=config.seed)
    driver = sampler.sample_paths_with_origin(1, args.path_index)
    stream = stream_signatures(grid, driver, grid, level)
    if config.output:
        stream.to_csv(config.output)
    else:
        import tempfile
        with tempfile.NamedTemporaryFile("w+", suffix=".csv") as tmp:
            stream.to_csv(tmp.name)
            tmp.seek(0)
            sys.stdout.write(tmp.read())
    return 0


def _add_common(parser):
    parser.add_argument("--config", help="key = value config file")
    parser.add_argument("--problem", choices=("tracking", "execution"))
    parser.add_argument("--H", dest="hurst", type=float, action="append",
                        help="Hurst index (repeatable)")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", help="output CSV path (default stdout)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="roughcontrol",
        description="signature-policy stochastic control experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("benchmark", help="analytic reference values")
    _add_common(p)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("run", help="train a policy, report test cost")
    _add_common(p)
    p.add_argument("--policy", choices=("linear", "deep"))
    p.add_argument("--N", dest="level", type=int, action="append",
                   help="signature truncation level (repeatable)")
    p.add_argument("--dt", type=float)
    p.add_argument("--refinement", type=int)
    p.add_argument("--n-train", type=int)
    p.add_argument("--n-test", type=int)
    p.add_argument("--n-steps", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--lr", type=float)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("linearize", help="quadratic-program execution solver")
    _add_common(p)
    p.add_argument("--N", dest="level", type=int, action="append")
    p.add_argument("--dt", type=float)
    p.add_argument("--n-test", type=int,
                   help="number of Monte Carlo paths")
    p.add_argument("--eval-refinement", type=int, default=8,
                   help="grid refinement for the Monte Carlo check")
    p.set_defaults(func=cmd_linearize)

    p = sub.add_parser("sigdump", help="dump a signature stream as CSV")
    _add_common(p)
    p.add_argument("--level", dest="level", type=int, action="append")
    p.add_argument("--dt", type=float)
    p.add_argument("--path-index", type=int, default=0)
    p.set_defaults(func=cmd_sigdump)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_worker_limit()
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except RoughControlError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
