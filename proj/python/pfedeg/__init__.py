"""Personalized federated knowledge graph embedding (simulator bindings)."""

from ._pfedeg import (
    ConfigError,
    Dataset,
    EvalError,
    InvalidInputError,
    LoadError,
    RunResult,
    aggregate,
    cli,
    evaluate,
    generate_synthetic,
    load_dataset,
    metrics,
    residual_combine,
    save_dataset,
    scale_rows,
    score,
    train,
    weights_ratio,
    weights_uniform,
)

__all__ = [
    "ConfigError",
    "Dataset",
    "EvalError",
    "InvalidInputError",
    "LoadError",
    "RunResult",
    "aggregate",
    "cli",
    "evaluate",
    "generate_synthetic",
    "load_dataset",
    "metrics",
    "residual_combine",
    "save_dataset",
    "scale_rows",
    "score",
    "train",
    "weights_ratio",
    "weights_uniform",
]

__version__ = "0.1.0"
