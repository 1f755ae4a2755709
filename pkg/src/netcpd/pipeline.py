"""End-to-end change-point detection: sample, threshold, distill, localize.

``detect_change_points`` wires the stages together around a single
prefix-sum cache and returns a DetectionReport carrying the estimates
together with every intermediate quantity the diagnostics files expose.
"""

from __future__ import annotations

import csv
import math
import os
import time
from dataclasses import dataclass

from .cusum import SequenceSums
from .distill import DistillResult, SignalRecord, distill, evaluate_signals, filter_by_threshold, sample_intervals
from .localize import LocalizeParams, LocalizeTrace, localize_naive, localize_susvt
from .netseq import AdjacencySequence
from .threshold import ThresholdDiagnostics, select_tau

REFINERS = ("susvt", "naive", "none")


def default_tau2(n: int, T: int, scale: float = 0.6) -> float:
    """Spectral denoising threshold scale * (sqrt(n) + sqrt(ln T))."""
    return scale * (math.sqrt(n) + math.sqrt(math.log(T)))


def default_tau3(T: int) -> float:
    """Grid-spacing coefficient 3 / ln T (gives g = 3)."""
    return 3.0 / math.log(T)


def resolve_threads(threads: int | None) -> int:
    """--threads value, else NETCPD_THREADS, else the CPU count."""
    if threads is not None:
        if threads < 1:
            raise ValueError(f"threads must be >= 1, got {threads}")
        return threads
    env = os.environ.get("NETCPD_THREADS", "").strip()
    if env:
        try:
            val = int(env)
        except ValueError:
            raise ValueError(f"NETCPD_THREADS must be an integer, got {env!r}") from None
        if val < 1:
            raise ValueError(f"NETCPD_THREADS must be >= 1, got {val}")
        return val
    return os.cpu_count() or 1


@dataclass(frozen=True)
class DetectionReport:
    """Final estimates plus the evidence each stage produced."""

    change_points: tuple[int, ...]
    k_hat: int
    tau: float
    threshold: ThresholdDiagnostics | None
    records: tuple[SignalRecord, ...]
    distilled: DistillResult
    traces: tuple[LocalizeTrace, ...]
    refine: str
    norm: str
    runtime_seconds: float


def detect_change_points(
    seq: AdjacencySequence,
    M: int = 500,
    tau: float | str = "auto",
    seed: int = 0,
    norm: str = "operator",
    refine: str = "susvt",
    tau2: float | None = None,
    tau3: float | None = None,
    trim: float = 0.01,
    threads: int | None = None,
) -> DetectionReport:
    """Run the full detector on a network sequence.

    ``tau="auto"`` selects the threshold by clustering the sampled
    signals; a numeric ``tau`` is used as given.  ``refine`` chooses the
    localization step: "susvt" (denoised subsampled refinement), "naive"
    (full-CUSUM peak), or "none" (report seed-interval midpoints).
    """
    if refine not in REFINERS:
        raise ValueError(f"refine must be one of {REFINERS}, got {refine!r}")
    t0 = time.perf_counter()
    sums = SequenceSums(seq)
    nthreads = resolve_threads(threads)
    records = evaluate_signals(sums, sample_intervals(sums.T, M, seed), norm, nthreads)

    thr: ThresholdDiagnostics | None = None
    if tau == "auto":
        thr = select_tau(records, sums, norm=norm)
        tau_value = thr.tau_selected
    elif isinstance(tau, str):
        raise ValueError(f"tau must be a number or 'auto', got {tau!r}")
    else:
        tau_value = float(tau)
        if tau_value < 0:
            raise ValueError(f"tau must be >= 0, got {tau_value}")

    result = distill(filter_by_threshold(records, tau_value))
    intervals = list(result.intervals)

    traces: tuple[LocalizeTrace, ...] = ()
    if refine == "susvt":
        params = LocalizeParams(
            tau2=default_tau2(seq.n, seq.T) if tau2 is None else tau2,
            tau3=default_tau3(seq.T) if tau3 is None else tau3,
            trim=trim,
        )
        estimates, tr = localize_susvt(sums, intervals, params)
        traces = tuple(tr)
    elif refine == "naive":
        estimates = localize_naive(sums, intervals)
    else:
        estimates = [(l + r) // 2 for l, r in intervals]

    return DetectionReport(
        change_points=tuple(sorted(estimates)),
        k_hat=result.k_hat,
        tau=tau_value,
        threshold=thr,
        records=tuple(records),
        distilled=result,
        traces=traces,
        refine=refine,
        norm=norm,
        runtime_seconds=time.perf_counter() - t0,
    )


def write_changepoints_csv(report: DetectionReport, path: str) -> None:
    """Estimates with their seed intervals: header ``k,eta_hat,l,r``."""
    rows = sorted(
        zip(report.distilled.intervals, _aligned_estimates(report)),
        key=lambda x: x[1],
    )
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "eta_hat", "l", "r"])
        for k, ((l, r), eta) in enumerate(rows, start=1):
            w.writerow([k, eta, l, r])


def _aligned_estimates(report: DetectionReport) -> list[int]:
    if report.refine == "susvt":
        return [t.eta_hat for t in report.traces]
    # naive/none keep interval order; change_points is the sorted copy.
    return list(report.change_points)


def write_signals_csv(records, path: str) -> None:
    """Sampled-interval diagnostics: header ``m,s,e,signal``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["m", "s", "e", "signal"])
        for r in records:
            w.writerow([r.m, r.s, r.e, repr(r.signal)])


def write_threshold_csv(records, thr: ThresholdDiagnostics, path: str) -> None:
    """Per-interval clustering diagnostics plus one trailing summary row.

    Data rows are ``m,s,e,signal,rho,delta,label``; the summary row keys
    the selected threshold, the reference threshold, the boundary (empty
    when absent), and whether the fallback fired.
    """
    c = thr.clustering
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["m", "s", "e", "signal", "rho", "delta", "label"])
        for i, r in enumerate(records):
            if c is None:
                w.writerow([r.m, r.s, r.e, repr(r.signal), "", "", ""])
            else:
                w.writerow([
                    r.m, r.s, r.e, repr(r.signal),
                    repr(float(c.rho[i])), repr(float(c.delta[i])), int(c.labels[i]),
                ])
        w.writerow([
            "summary",
            f"tau_selected={thr.tau_selected!r}",
            f"tau_ref={thr.tau_ref!r}",
            f"boundary={'' if thr.boundary is None else repr(thr.boundary)}",
            f"fallback_used={thr.fallback_used}",
            f"bandwidth={'' if c is None else repr(c.bandwidth)}",
            "",
        ])


def write_traces_csv(traces, path: str) -> None:
    """Localization audit rows:
    ``k,l,r,s,e,v,delta_hat,delta_tilde,eta_star,eta_hat,fallback``."""
    def cell(v):
        return "" if v is None else (repr(v) if isinstance(v, float) else v)

    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "l", "r", "s", "e", "v",
                    "delta_hat", "delta_tilde", "eta_star", "eta_hat", "fallback"])
        for t in traces:
            w.writerow([
                t.k, t.l, t.r, cell(t.s), cell(t.e), cell(t.v),
                repr(t.delta_hat), cell(t.delta_tilde), cell(t.eta_star),
                t.eta_hat, int(t.fallback),
            ])
