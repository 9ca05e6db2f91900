"""Proximity-driven streaming random forest."""

from ._core import (
    Block,
    BlockMetrics,
    DriftKind,
    DriftStreamSpec,
    LabeledSample,
    PdsrfConfig,
    StreamSchema,
    StreamingForest,
    UpdateReport,
    chunk,
    classifier_weight,
    evaluate,
    generate_drift_stream,
    gini_impurity,
    make_pdsrf,
    make_rf_rtl,
    mean_accuracy,
    read_csv,
    temporal_weight,
)

__all__ = [
    "Block",
    "BlockMetrics",
    "DriftKind",
    "DriftStreamSpec",
    "LabeledSample",
    "PdsrfConfig",
    "StreamSchema",
    "StreamingForest",
    "UpdateReport",
    "chunk",
    "classifier_weight",
    "evaluate",
    "generate_drift_stream",
    "gini_impurity",
    "make_pdsrf",
    "make_rf_rtl",
    "mean_accuracy",
    "read_csv",
    "temporal_weight",
]
