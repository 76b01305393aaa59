"""Python access to the GBA-POMDP / BADDr experiment harness."""

from ._core import (
    AGGREGATE_CSV_HEADER,
    RUN_CSV_HEADER,
    ExperimentConfig,
    aggregate,
    run_experiment,
    run_single,
)

__all__ = ["AGGREGATE_CSV_HEADER", "RUN_CSV_HEADER", "ExperimentConfig", "aggregate", "run_experiment", "run_single"]
