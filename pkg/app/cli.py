"""
Command-line front end.

    glmb-tgs [--seed N] [--out DIR] [--config FILE] [--log-level LEVEL] COMMAND ...
    glmb-tgs --print-defaults

Commands: ``simulate``, ``filter``, ``sample``, ``bench``, ``oracle-check``,
``experiment`` and ``serve``. Scenario and truncation settings come from the
experiment config (``--config``, defaults otherwise); ``--seed`` overrides
every seed in it and ``--out`` its output directory. Toolkit errors are
logged and end the process with exit code 2.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
from pydantic import ValidationError

from app.core.config import settings
from app.core.exceptions import DomainError, GlmbToolkitError
from app.core.logging import setup_logging
from app.core.run_context import new_run_id, set_run_id
from app.schemas.experiment import (
    ExperimentConfig,
    config_error,
    dump_experiment_config,
    load_experiment_config,
)
from app.schemas.sampler import SamplerConfig, SamplerVariant
from app.services.assignment.core import random_cost_matrix
from app.services.assignment.io import read_cost_matrix
from app.services.bench.experiment import run_experiment, summarize
from app.services.bench.kernels import bench_kernels
from app.services.filter.tracker import run_filter
from app.services.gibbs.diagnostics import iterate_log_weights, oracle_distance, unique_sample_count
from app.services.gibbs.samplers import run_sampler
from app.services.models.gaussian import ModelSet
from app.services.scenario import mean_ospa, ospa2, simulate_scenario, tracks_from_estimates, tracks_from_truth
from app.services.scenario.io import (
    fmt,
    read_measurements_csv,
    read_truth_csv,
    write_diagnostics_csv,
    write_estimates_csv,
    write_measurements_csv,
    write_rows,
    write_truth_csv,
)

logger = logging.getLogger(__name__)

SAMPLE_COLUMNS = ["iter", "gamma", "log_weight", "importance_log_weight"]


def _parse_map(text: str) -> List[int]:
    try:
        return [int(tok) for tok in text.replace(";", ",").split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"association map must be integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glmb-tgs",
        description="GLMB tracking with Gibbs-sampler truncation: simulation, filtering and benchmarks.",
    )
    parser.add_argument("--seed", type=int, default=None, help="Root seed; overrides every seed in the config")
    parser.add_argument("--out", type=Path, default=None, help="Output directory (default: config output_dir)")
    parser.add_argument("--config", type=Path, default=None, help="Experiment config file (TOML)")
    parser.add_argument("--print-defaults", action="store_true", help="Print the default config and exit")
    parser.add_argument(
        "--log-level",
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help=f"Log level (default: {settings.LOG_LEVEL})",
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    sub.add_parser("simulate", help="Simulate truth and measurements to CSV")

    p = sub.add_parser("filter", help="Run the GLMB filter on simulated or recorded measurements")
    p.add_argument("--measurements", type=Path, default=None, help="Measurement CSV (default: simulate)")
    p.add_argument("--truth", type=Path, default=None, help="Truth CSV used for OSPA reporting")
    p.add_argument("--variant", type=SamplerVariant, choices=list(SamplerVariant), default=None)
    p.add_argument("--iterations", type=int, default=None)

    p = sub.add_parser("sample", help="Run one sampler on a cost-matrix file and write every iterate")
    p.add_argument("--cost-matrix", type=Path, required=True)
    p.add_argument("--variant", type=SamplerVariant, choices=list(SamplerVariant), default=SamplerVariant.TGS_PLUS)
    p.add_argument("--iterations", type=int, default=settings.DEFAULT_ITERATIONS)
    p.add_argument("--alpha", type=float, default=settings.DEFAULT_ALPHA)
    p.add_argument("--beta", type=float, default=settings.DEFAULT_BETA)
    p.add_argument("--initial", type=_parse_map, default=None, help="Initial map, e.g. '0,1,-1'")

    p = sub.add_parser("bench", help="Time the sampler kernels on random cost matrices")
    p.add_argument("--P", dest="Ps", type=int, nargs="+", default=[200, 400])
    p.add_argument("--M", dest="Ms", type=int, nargs="+", default=[200, 400])
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--variants", type=SamplerVariant, nargs="+", default=list(SamplerVariant))
    p.add_argument("--repetitions", type=int, default=5)
    p.add_argument("--paired", action="store_true", help="Zip P and M lists instead of crossing them")

    p = sub.add_parser("oracle-check", help="Compare a sampler with the enumerated distribution")
    p.add_argument("--cost-matrix", type=Path, default=None, help="Cost-matrix file (default: random)")
    p.add_argument("--P", type=int, default=3)
    p.add_argument("--M", type=int, default=2)
    p.add_argument("--variant", type=SamplerVariant, choices=list(SamplerVariant), default=SamplerVariant.TGS_PLUS)
    p.add_argument("--iterations", type=int, default=100_000)
    p.add_argument("--alpha", type=float, default=settings.DEFAULT_ALPHA)
    p.add_argument("--beta", type=float, default=settings.DEFAULT_BETA)
    p.add_argument("--tolerance", type=float, default=0.02)

    p = sub.add_parser("experiment", help="Monte Carlo experiment over the config's sweep")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--workers", type=int, default=None, help=f"Worker processes (default: {settings.MAX_WORKERS})")

    p = sub.add_parser("serve", help="Serve the HTTP API")
    p.add_argument("--host", default=settings.API_HOST)
    p.add_argument("--port", type=int, default=settings.API_PORT)

    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_experiment_config(args.config)
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise DomainError(f"--seed must lie in [0, 2**64), got {args.seed}")
        cfg = cfg.model_copy(
            update={
                "seed": args.seed,
                "scenario": cfg.scenario.model_copy(update={"seed": args.seed}),
                "truncation": cfg.truncation.model_copy(
                    update={"sampler": cfg.truncation.sampler.model_copy(update={"seed": args.seed})}
                ),
            }
        )
    if args.out is not None:
        cfg = cfg.model_copy(update={"output_dir": args.out})
    return cfg


def cmd_simulate(args: argparse.Namespace, cfg: ExperimentConfig) -> int:
    truth, frames = simulate_scenario(cfg.scenario)
    out = Path(cfg.output_dir)
    write_truth_csv(truth, out / "truth.csv")
    write_measurements_csv(frames, out / "measurements.csv")
    print(f"{len(truth.tracks)} trajectories, {sum(len(f) for f in frames)} measurements -> {out}")
    return 0


def cmd_filter(args: argparse.Namespace, cfg: ExperimentConfig) -> int:
    scenario = cfg.scenario
    models = ModelSet.from_params(scenario)
    truth = None
    if args.measurements is not None:
        frames = read_measurements_csv(args.measurements, duration=scenario.duration)
        if args.truth is not None:
            truth = read_truth_csv(args.truth, duration=len(frames))
    else:
        truth, frames = simulate_scenario(scenario, models)

    sampler_update = {}
    if args.variant is not None:
        sampler_update["variant"] = args.variant
    if args.iterations is not None:
        sampler_update["iterations"] = args.iterations
    budget = cfg.truncation
    if sampler_update:
        budget = budget.model_copy(update={"sampler": SamplerConfig(**{**budget.sampler.model_dump(), **sampler_update})})

    result = run_filter(frames, models, budget, seed=cfg.seed)
    out = Path(cfg.output_dir)
    write_estimates_csv(result.estimates, out / "estimates.csv")
    write_diagnostics_csv(result.diagnostics, out / "diagnostics.csv")
    unique = np.mean([d.n_unique_samples for d in result.diagnostics]) if result.diagnostics else 0.0
    print(f"{len(frames)} scans, {len(result.trajectories)} tracks, {unique:.1f} unique maps per scan")
    if truth is not None:
        c, p = cfg.metrics.cutoff, cfg.metrics.order
        o2 = ospa2(tracks_from_truth(truth), tracks_from_estimates(result.estimates), p=p, c=c)
        print(f"mean OSPA {mean_ospa(truth, result.estimates, p=p, c=c):.3f}, OSPA2 {o2:.3f}")
    return 0


def cmd_sample(args: argparse.Namespace, cfg: ExperimentConfig) -> int:
    eta = read_cost_matrix(args.cost_matrix)
    sampler = SamplerConfig(
        variant=args.variant, iterations=args.iterations, alpha=args.alpha, beta=args.beta, seed=cfg.seed
    )
    batch = run_sampler(args.initial, eta, sampler)
    log_w = iterate_log_weights(batch)
    imp = batch.importance_log_weights
    rows = [
        [t + 1, ";".join(str(int(v)) for v in gamma), float(log_w[t]), "" if imp is None else float(imp[t])]
        for t, gamma in enumerate(batch.iterates)
    ]
    path = write_rows(Path(cfg.output_dir) / "samples.csv", SAMPLE_COLUMNS, rows)
    print(f"{len(batch)} iterates, {unique_sample_count(batch)} unique maps -> {path}")
    return 0


def cmd_bench(args: argparse.Namespace, cfg: ExperimentConfig) -> int:
    path = Path(cfg.output_dir) / "kernels.csv"
    timings = bench_kernels(
        args.Ps, args.Ms, args.iterations, args.variants,
        repetitions=args.repetitions, seed=cfg.seed, paired=args.paired, out=path,
    )
    for t in timings:
        print(f"{t.variant:>12} P={t.P:<5} M={t.M:<5} {fmt(t.median_seconds_per_iteration * 1e6)} us/iter")
    return 0


def cmd_oracle_check(args: argparse.Namespace, cfg: ExperimentConfig) -> int:
    if args.cost_matrix is not None:
        eta = read_cost_matrix(args.cost_matrix)
    else:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([cfg.seed, args.P, args.M])))
        eta = random_cost_matrix(args.P, args.M, rng)
    sampler = SamplerConfig(
        variant=args.variant, iterations=args.iterations, alpha=args.alpha, beta=args.beta, seed=cfg.seed
    )
    distance = oracle_distance(run_sampler(None, eta, sampler))
    passed = distance <= args.tolerance
    print(f"{sampler.variant.value} P={eta.P} M={eta.M}: total variation {distance:.5f} "
          f"({'ok' if passed else 'above'} tolerance {args.tolerance})")
    return 0 if passed else 1


def cmd_experiment(args: argparse.Namespace, cfg: ExperimentConfig) -> int:
    if args.trials is not None:
        cfg = cfg.model_copy(update={"trials": args.trials})
    report = run_experiment(cfg, workers=args.workers)
    for variant, metrics in summarize(report).items():
        summary = ", ".join(f"{k}={v:.4g}" for k, v in metrics.items())
        print(f"{variant}: {summary}")
    print(f"reports written to {report.output_dir}")
    return 0


def cmd_serve(args: argparse.Namespace, cfg: ExperimentConfig) -> int:
    import uvicorn

    uvicorn.run("main:app", host=args.host, port=args.port, log_config=None)
    return 0


COMMANDS: Dict[str, Callable[[argparse.Namespace, ExperimentConfig], int]] = {
    "simulate": cmd_simulate,
    "filter": cmd_filter,
    "sample": cmd_sample,
    "bench": cmd_bench,
    "oracle-check": cmd_oracle_check,
    "experiment": cmd_experiment,
    "serve": cmd_serve,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.print_defaults:
        sys.stdout.write(dump_experiment_config())
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2

    setup_logging(level=args.log_level)
    set_run_id(new_run_id())
    try:
        return COMMANDS[args.command](args, resolve_config(args))
    except ValidationError as exc:
        err = config_error(exc)
        logger.error(f"{args.command} failed: {err}")
        print(f"error: {err}", file=sys.stderr)
        return 2
    except GlmbToolkitError as exc:
        logger.error(f"{args.command} failed: {exc}")
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
