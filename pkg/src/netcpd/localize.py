"""Change-point localization inside distilled seed intervals.

``localize_naive`` places the estimate at the peak of the full CUSUM
norm inside each seed interval.  ``localize_susvt`` is the refined
procedure: each seed interval is padded, the sequence inside it is
subsampled on two interleaved grids with spacing 2g (g absorbs the
dependence length), a denoised projection direction is built from the
even grid by spectral thresholding with an entrywise clip, the odd-grid
CUSUM is matched against that direction to get a coarse estimate, and a
final full-resolution CUSUM peak inside a +-2g window sharpens it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cusum import _as_sums, grid_times, interval_argmax
from .linalg import inner_product, usvt


@dataclass(frozen=True)
class LocalizeParams:
    """Tuning constants for localize_susvt.

    tau2 is the spectral threshold of the denoising step (of order
    sqrt(n) + sqrt(ln T)); tau3 sets the grid spacing g = round(tau3 * ln T);
    trim is the fraction of each padded interval excluded at both ends
    of the coarse search.
    """

    tau2: float
    tau3: float
    trim: float = 0.01

    def __post_init__(self) -> None:
        if self.tau2 < 0:
            raise ValueError(f"tau2 must be >= 0, got {self.tau2}")
        if self.tau3 <= 0:
            raise ValueError(f"tau3 must be > 0, got {self.tau3}")
        if not (0 <= self.trim < 0.5):
            raise ValueError(f"trim must be in [0, 0.5), got {self.trim}")

    def grid_gap(self, T: int) -> int:
        """Grid spacing g for a length-T sequence, at least 1."""
        return max(1, round(self.tau3 * math.log(T)))


@dataclass(frozen=True)
class LocalizeTrace:
    """Audit record for one seed interval's refinement."""

    k: int
    l: int
    r: int
    s: int | None
    e: int | None
    v: int | None
    delta_hat: float
    delta_tilde: float | None
    eta_star: int | None
    eta_hat: int
    fallback: bool


def _naive_one(sums, l: int, r: int) -> int:
    # Degenerate [l, l+1] has no interior split; report the right endpoint.
    if r - l < 2:
        return r
    return interval_argmax(sums, l, r, "operator")[0]


def localize_naive(seq, intervals: list[tuple[int, int]]) -> list[int]:
    """Peak full-CUSUM estimate inside each [l, r]; ties take the smallest t."""
    sums = _as_sums(seq)
    return [_naive_one(sums, l, r) for l, r in intervals]


def _check_intervals(intervals, T: int) -> None:
    prev_end = 0
    for l, r in intervals:
        if not (0 < l < r <= T):
            raise ValueError(f"seed interval [{l}, {r}] outside (0, {T}]")
        # Consecutive seeds may share one endpoint; their interiors must not cross.
        if l < prev_end:
            raise ValueError("seed intervals must be sorted with non-crossing interiors")
        prev_end = r


def localize_susvt(
    seq, intervals: list[tuple[int, int]], params: LocalizeParams
) -> tuple[list[int], list[LocalizeTrace]]:
    """Refined localization of one change-point per seed interval.

    Returns (estimates, traces).  A seed interval whose padded window is
    too short to carry both subsampling grids falls back to the naive
    estimate for that interval, flagged in its trace.
    """
    sums = _as_sums(seq)
    T = sums.T
    _check_intervals(intervals, T)
    if not intervals:
        return [], []
    g = params.grid_gap(T)

    mids = [(l + r) / 2.0 for l, r in intervals]
    spacings = [b - a for a, b in zip(mids, mids[1:])]
    delta_hat = min(spacings + [T + 1 - mids[-1], mids[0] - 1.0])

    estimates: list[int] = []
    traces: list[LocalizeTrace] = []
    for k, (l, r) in enumerate(intervals, start=1):
        est, trace = _refine_one(sums, k, l, r, delta_hat, g, params)
        estimates.append(est)
        traces.append(trace)
    return estimates, traces


def _refine_one(sums, k, l, r, delta_hat, g, params):
    T = sums.T
    pad = delta_hat / 16.0
    s = max(0, math.floor(l - pad))
    e = min(T, math.floor(r + pad))
    v = (l + r) // 2

    def bail(s=None, e=None, v=None, dt=None):
        est = _naive_one(sums, l, r)
        return est, LocalizeTrace(
            k=k, l=l, r=r, s=s, e=e, v=v, delta_hat=delta_hat,
            delta_tilde=dt, eta_star=None, eta_hat=est, fallback=True,
        )

    if e - s < 2:
        return bail(s, e, v)
    if (e - s - 1) // g % 2 == 1:
        e = e + g if e + g <= T else e - g
    if not s < v < e:
        return bail(s, e, v)

    # Even grid: block contrast split at v, then denoise.
    a_e = (v - s - 1) // (2 * g)
    b_e = (e - s - 1) // (2 * g)
    if a_e >= b_e:
        return bail(s, e, v)
    delta_tilde = math.sqrt((a_e + 1) * (b_e - a_e) / (b_e + 1))
    even = sums.frames[grid_times(s, g, "even", b_e + 1) - 1]
    left = even[: a_e + 1].sum(axis=0)
    right = even[a_e + 1 :].sum(axis=0)
    y = delta_tilde * (left / (a_e + 1) - right / (b_e - a_e))
    y_hat = usvt(y, params.tau2, delta_tilde)

    # Odd grid: match the CUSUM against the denoised direction.
    b = (e - s - 1 - g) // (2 * g)
    if b < 1:
        return bail(s, e, v, delta_tilde)
    lo = max(math.floor(s + (e - s) * params.trim) + 1, s + 1 + g)
    hi = min(math.floor(e - (e - s) * params.trim), s + g + 2 * g * b)
    if lo > hi:
        return bail(s, e, v, delta_tilde)
    odd = sums.frames[grid_times(s, g, "odd", b + 1) - 1]
    ips = np.array([inner_product(f, y_hat) for f in odd])
    pref = np.cumsum(ips)
    total = pref[-1]

    best_val = -math.inf
    eta_star = lo
    for t in range(lo, hi + 1):
        a = (t - s - 1 - g) // (2 * g)
        w1 = math.sqrt((b - a) / ((1 + b) * (1 + a)))
        w2 = math.sqrt((1 + a) / ((1 + b) * (b - a)))
        val = w1 * pref[a] - w2 * (total - pref[a])
        if val > best_val:
            best_val = val
            eta_star = t

    ws = max(eta_star - 2 * g, 0)
    we = min(eta_star + 2 * g, T)
    eta_hat = interval_argmax(sums, ws, we, "operator")[0] if we - ws >= 2 else eta_star
    return eta_hat, LocalizeTrace(
        k=k, l=l, r=r, s=s, e=e, v=v, delta_hat=delta_hat,
        delta_tilde=delta_tilde, eta_star=eta_star, eta_hat=eta_hat, fallback=False,
    )
