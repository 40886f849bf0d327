"""Per-class epistemic uncertainty from sampled class-probability vectors."""

from ._epuc import (
    DimensionError,
    DomainError,
    EpucError,
    LabelError,
    ParseError,
    SampleTensor,
    SimplexError,
    analytic_eu_dirichlet,
    analytic_eu_mixture,
    analytic_eu_vertex,
    auroc,
    bootstrap,
    entropy,
    ingest,
    mean_ratio,
    report,
    risk_curve,
    run_cli,
    save,
    self_test,
    sweep,
    synth_classifier,
)

__all__ = [
    "DimensionError",
    "DomainError",
    "EpucError",
    "LabelError",
    "ParseError",
    "SampleTensor",
    "SimplexError",
    "analytic_eu_dirichlet",
    "analytic_eu_mixture",
    "analytic_eu_vertex",
    "auroc",
    "bootstrap",
    "entropy",
    "ingest",
    "mean_ratio",
    "report",
    "risk_curve",
    "run_cli",
    "save",
    "self_test",
    "sweep",
    "synth_classifier",
]
