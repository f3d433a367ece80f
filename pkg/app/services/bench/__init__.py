from app.services.bench.experiment import ExperimentReport, derive_seed, run_experiment, run_trial, summarize
from app.services.bench.kernels import KernelTiming, bench_kernels, scaling_ratio
from app.services.bench.reports import aggregate_results

__all__ = [
    "ExperimentReport",
    "KernelTiming",
    "aggregate_results",
    "bench_kernels",
    "derive_seed",
    "run_experiment",
    "run_trial",
    "scaling_ratio",
    "summarize",
]
