"""Experiment harness: configs, sweeps, statistics, figures and the CLI."""

from womp.harness.config import Level, Setting, SweepConfig
from womp.harness.stats import EmptyTable, NonPositiveSample, best_lambda, log_stats, summarize
from womp.harness.sweeps import (
    ITER_COLUMNS,
    LAMBDA_COLUMNS,
    derive_seed,
    make_instance,
    sweep_iterations,
    sweep_lambda,
    write_csv,
)

__all__ = [
    "EmptyTable",
    "ITER_COLUMNS",
    "LAMBDA_COLUMNS",
    "Level",
    "NonPositiveSample",
    "Setting",
    "SweepConfig",
    "best_lambda",
    "derive_seed",
    "log_stats",
    "make_instance",
    "summarize",
    "sweep_iterations",
    "sweep_lambda",
    "write_csv",
]
