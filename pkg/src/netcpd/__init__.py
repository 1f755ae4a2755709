"""Change-point detection for sequences of dependent Bernoulli networks.

The pipeline samples random candidate intervals, scores each by the peak
operator norm of its matrix CUSUM, keeps the high scorers via a
clustering-selected threshold, distills the survivors into disjoint seed
intervals (one per change-point), and refines each seed interval with a
denoised subsampled CUSUM localizer.  A Markov-chain simulator and an
evaluation harness reproduce the reference simulation designs.
"""

__version__ = "0.1.0"

from .cusum import SequenceSums, cusum, interval_argmax, interval_signal, subsampled_cusum
from .distill import (
    DistillResult,
    SignalRecord,
    distill,
    evaluate_signals,
    filter_by_threshold,
    run_distillation,
    sample_intervals,
)
from .linalg import frobenius_norm, inner_product, operator_norm, sym_eigen, usvt
from .localize import LocalizeParams, LocalizeTrace, localize_naive, localize_susvt
from .metrics import EvalRow, ari, evaluate, hausdorff, segmentation_labels, summarize
from .netseq import (
    AdjacencySequence,
    ContactRecord,
    FormatError,
    aggregate_contacts,
    read_contacts,
    read_dnmt,
    read_edgelist,
    write_dnmt,
)
from .pipeline import DetectionReport, detect_change_points
from .simulate import GroundTruth, ScenarioConfig, derive_seed, diagnostics, kernel, scenario, simulate
from .threshold import DegenerateDataError, ThresholdDiagnostics, density_peaks, select_tau, tau_ref

__all__ = [
    "AdjacencySequence",
    "ContactRecord",
    "DegenerateDataError",
    "DetectionReport",
    "DistillResult",
    "EvalRow",
    "FormatError",
    "GroundTruth",
    "LocalizeParams",
    "LocalizeTrace",
    "ScenarioConfig",
    "SequenceSums",
    "SignalRecord",
    "ThresholdDiagnostics",
    "aggregate_contacts",
    "ari",
    "cusum",
    "density_peaks",
    "derive_seed",
    "detect_change_points",
    "diagnostics",
    "distill",
    "evaluate",
    "evaluate_signals",
    "filter_by_threshold",
    "frobenius_norm",
    "hausdorff",
    "inner_product",
    "interval_argmax",
    "interval_signal",
    "kernel",
    "localize_naive",
    "localize_susvt",
    "operator_norm",
    "read_contacts",
    "read_dnmt",
    "read_edgelist",
    "run_distillation",
    "sample_intervals",
    "scenario",
    "segmentation_labels",
    "select_tau",
    "simulate",
    "subsampled_cusum",
    "summarize",
    "sym_eigen",
    "tau_ref",
    "usvt",
    "write_dnmt",
]
