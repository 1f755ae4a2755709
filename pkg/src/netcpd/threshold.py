"""Data-driven threshold selection for interval filtering.

Two ingredients:

* ``tau_ref``: a rule-of-thumb threshold from short sliding windows,
  tau_ref = max_j max_{j < t < j+h} ||C(j, t, j+h)|| * e_T with
  h = floor(3 ln T) and e_T = ln(ln T) / 2.  Change-points more than h
  apart leave most short windows change-free, so this scales like the
  largest no-change signal.

* density-peaks clustering of the M sampled-interval signals into a low
  (no-change) and a high (change-bearing) group; the selected threshold
  is the midpoint of the gap between the groups, accepted only when it
  falls inside [0.1 * tau_ref, 10 * tau_ref] and the gap is wider than
  the kernel bandwidth used to estimate densities.  Any failure falls
  back to tau_ref.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cusum import _as_sums, interval_signal
from .distill import SignalRecord


class DegenerateDataError(ValueError):
    """The input sequence is too degenerate to support threshold selection."""


@dataclass(frozen=True)
class DensityPeaksResult:
    """Per-point clustering diagnostics over the signal values."""

    rho: np.ndarray
    delta: np.ndarray
    gamma: np.ndarray
    labels: np.ndarray  # 0 = low cluster, 1 = high cluster
    centers: tuple[int, int]  # (low-center index, high-center index)
    bandwidth: float


@dataclass(frozen=True)
class ThresholdDiagnostics:
    """Outcome of select_tau, with the clustering evidence attached."""

    tau_ref: float
    tau_selected: float
    boundary: float | None
    fallback_used: bool
    clustering: DensityPeaksResult | None


def tau_ref(seq, norm: str = "operator") -> float:
    """Sliding-window reference threshold; raises on sequences too short
    for any window (T - floor(3 ln T) < 1 or fewer than 3 points per window)."""
    sums = _as_sums(seq)
    T = sums.T
    if T < 2:
        raise ValueError(f"T={T} is too small for any sliding window")
    h = int(math.floor(3.0 * math.log(T)))
    if h < 2 or T - h < 1:
        raise ValueError(f"T={T} is too small for any sliding window (h={h})")
    e_T = math.log(math.log(T)) / 2.0
    peak = max(interval_signal(sums, j, j + h, norm) for j in range(1, T - h + 1))
    return peak * e_T


def silverman_bandwidth(x: np.ndarray) -> float:
    """Rule-of-thumb Gaussian KDE bandwidth 1.06 * std(x) * len(x)^(-1/5)."""
    x = np.asarray(x, dtype=np.float64)
    if x.size < 2:
        raise ValueError("bandwidth needs at least 2 points")
    sd = float(np.std(x, ddof=1))
    return 1.06 * sd * x.size ** (-0.2)


def density_peaks(signals: np.ndarray, bandwidth: float | None = None) -> DensityPeaksResult:
    """Two-cluster density-peaks split of scalar signal values.

    rho_m is a Gaussian kernel density estimate at each point; delta_m is
    the distance to the nearest strictly denser point (the largest
    pairwise distance when none is denser).  The two points with the
    largest gamma = rho * delta become cluster centers, and the rest
    join, in order of decreasing density, the cluster of the nearest
    point of higher density.  Centers are labeled so that cluster 0 is
    the one whose center has the smaller signal value.
    """
    x = np.asarray(signals, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ValueError(f"need a 1-d array of at least 2 signals, got shape {x.shape}")
    M = x.size
    if np.ptp(x) == 0.0:
        raise DegenerateDataError("all signals identical; no cluster structure")
    h = silverman_bandwidth(x) if bandwidth is None else float(bandwidth)
    if h <= 0:
        raise ValueError(f"bandwidth must be > 0, got {h}")

    dist = np.abs(x[:, None] - x[None, :])
    rho = np.exp(-0.5 * (dist / h) ** 2).sum(axis=1) / (M * h * math.sqrt(2 * math.pi))

    delta = np.empty(M)
    for m in range(M):
        denser = rho > rho[m]
        delta[m] = dist[m, denser].min() if denser.any() else dist[m].max()
    gamma = rho * delta

    top = np.lexsort((np.arange(M), -gamma))[:2]
    c_low, c_high = (top[0], top[1]) if x[top[0]] <= x[top[1]] else (top[1], top[0])

    labels = np.full(M, -1, dtype=np.int64)
    labels[c_low], labels[c_high] = 0, 1
    order = np.lexsort((np.arange(M), -rho))
    rank = np.empty(M, dtype=np.int64)
    rank[order] = np.arange(M)
    for m in order:
        if labels[m] >= 0:
            continue
        senior = (rho > rho[m]) | ((rho == rho[m]) & (rank < rank[m]))
        if senior.any():
            cand = np.flatnonzero(senior)
            nearest = cand[np.lexsort((cand, dist[m, cand]))[0]]
            labels[m] = labels[nearest]
        else:
            # Densest point overall but not a center: join the nearest center.
            labels[m] = 0 if dist[m, c_low] <= dist[m, c_high] else 1
    return DensityPeaksResult(
        rho=rho,
        delta=delta,
        gamma=gamma,
        labels=labels,
        centers=(int(c_low), int(c_high)),
        bandwidth=h,
    )


def select_tau(
    records: list[SignalRecord], seq, norm: str = "operator"
) -> ThresholdDiagnostics:
    """Select the filtering threshold from scored intervals.

    Falls back to tau_ref (with ``fallback_used=True``) whenever the
    clustering is degenerate: all signals identical, the two clusters
    interleave in signal value, or the between-cluster gap is narrower
    than the KDE bandwidth (two groups closer than the density
    resolution are one effective cluster).  A clean boundary is still
    rejected when it leaves the candidate range
    [0.1 * tau_ref, 10 * tau_ref].
    """
    ref = tau_ref(seq, norm)
    if ref == 0.0:
        raise DegenerateDataError(
            "tau_ref is 0: every short window is constant; no threshold exists"
        )
    x = np.asarray([r.signal for r in records], dtype=np.float64)
    if x.size < 2:
        return ThresholdDiagnostics(ref, ref, None, True, None)
    try:
        clust = density_peaks(x)
    except DegenerateDataError:
        return ThresholdDiagnostics(ref, ref, None, True, None)

    lo_max = float(x[clust.labels == 0].max())
    hi_min = float(x[clust.labels == 1].min())
    if hi_min - lo_max <= clust.bandwidth:
        return ThresholdDiagnostics(ref, ref, None, True, clust)
    boundary = (lo_max + hi_min) / 2.0
    if 0.1 * ref <= boundary <= 10.0 * ref:
        return ThresholdDiagnostics(ref, boundary, boundary, False, clust)
    return ThresholdDiagnostics(ref, ref, boundary, True, clust)
