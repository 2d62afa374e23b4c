"""Data ingestion, training, evaluation and ablations."""

from dagn.harness.config import ExperimentConfig, load_config
from dagn.harness.data import IngestionError, QASample, load_logiqa, load_reclor
from dagn.harness.experiment import (
    ABLATION_ROWS,
    EvalReport,
    TrainingError,
    evaluate,
    run_ablation,
    train,
)
from dagn.harness.synthetic import generate_synthetic

__all__ = [
    "ABLATION_ROWS",
    "EvalReport",
    "ExperimentConfig",
    "IngestionError",
    "QASample",
    "TrainingError",
    "evaluate",
    "generate_synthetic",
    "load_config",
    "load_logiqa",
    "load_reclor",
    "run_ablation",
    "train",
]
