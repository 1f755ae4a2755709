"""Random interval distillation.

Candidate intervals are sampled by drawing both endpoints independently
and uniformly from {1, ..., T}; the pair is canonicalized to
(s, e] = (min, max].  Each interval is scored by the peak CUSUM norm
over its interior split points, intervals scoring above a threshold tau
are kept, and the kept set is distilled into K disjoint seed intervals
[l_j, r_j]:

* right pass: repeatedly take the smallest right endpoint r present,
  let u* be the largest left endpoint among intervals ending at r, and
  discard every interval overlapping (u*, r];
* left pass: the mirror image on the original kept set, harvesting the
  largest left endpoints.

Both passes peel off one interval per round of a maximum set of pairwise
disjoint intervals, so they find the same count K, and pairing the i-th
smallest right endpoint with the i-th smallest left endpoint always
yields l_j < r_j.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cusum import SequenceSums, _as_sums, interval_signal


@dataclass(frozen=True)
class SignalRecord:
    """A sampled interval (s, e] and its peak CUSUM norm."""

    m: int
    s: int
    e: int
    signal: float


@dataclass(frozen=True)
class DistillResult:
    """Distilled seed intervals, closed form [l, r], sorted and disjoint."""

    k_hat: int
    intervals: tuple[tuple[int, int], ...]


def sample_intervals(T: int, M: int, seed: int) -> list[tuple[int, int]]:
    """Draw M candidate intervals over {1..T}, canonicalized to (min, max].

    Degenerate draws with both endpoints equal are kept; they carry zero
    signal and can never pass a positive threshold.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if M < 1:
        raise ValueError(f"M must be >= 1, got {M}")
    rng = np.random.default_rng(seed)
    ends = rng.integers(1, T + 1, size=(M, 2))
    lo = np.minimum(ends[:, 0], ends[:, 1])
    hi = np.maximum(ends[:, 0], ends[:, 1])
    return [(int(a), int(b)) for a, b in zip(lo, hi)]


def evaluate_signals(
    seq,
    intervals: list[tuple[int, int]],
    norm: str = "operator",
    threads: int | None = None,
) -> list[SignalRecord]:
    """Score every interval by its peak CUSUM norm.

    Intervals are independent, so they may be scored on a thread pool;
    each interval's computation is a fixed serial code path and results
    are gathered by index, which makes the output identical for any
    thread count.
    """
    sums = _as_sums(seq)

    def score(item: tuple[int, tuple[int, int]]) -> SignalRecord:
        m, (s, e) = item
        return SignalRecord(m=m, s=s, e=e, signal=interval_signal(sums, s, e, norm))

    items = list(enumerate(intervals))
    if threads is not None and threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(score, items))
    return [score(it) for it in items]


def filter_by_threshold(records: list[SignalRecord], tau: float) -> list[SignalRecord]:
    """Keep the records with signal strictly above tau, preserving order."""
    if not (tau >= 0):
        raise ValueError(f"tau must be a number >= 0, got {tau!r}")
    return [r for r in records if r.signal > tau]


def _overlaps(a: tuple[int, int], b: tuple[int, int]) -> bool:
    # Half-open (s, e] intervals intersect iff each starts before the other ends.
    return a[0] < b[1] and b[0] < a[1]


def distill(kept: list[SignalRecord] | list[tuple[int, int]]) -> DistillResult:
    """Distill kept intervals into disjoint seed intervals [l_j, r_j]."""
    ivs: list[tuple[int, int]] = []
    for item in kept:
        s, e = (item.s, item.e) if isinstance(item, SignalRecord) else item
        if not s < e:
            raise ValueError(f"intervals must satisfy s < e, got ({s}, {e}]")
        ivs.append((s, e))
    if not ivs:
        return DistillResult(k_hat=0, intervals=())

    rights: list[int] = []
    pool = list(ivs)
    while pool:
        r = min(e for _, e in pool)
        u_star = max(s for s, e in pool if e == r)
        rights.append(r)
        pool = [iv for iv in pool if not _overlaps(iv, (u_star, r))]

    lefts: list[int] = []
    pool = list(ivs)
    while pool:
        l = max(s for s, _ in pool)
        v_star = min(e for s, e in pool if s == l)
        lefts.append(l)
        pool = [iv for iv in pool if not _overlaps(iv, (l, v_star))]
    lefts.reverse()

    if len(lefts) != len(rights):
        raise AssertionError(
            f"pass disagreement: {len(lefts)} lefts vs {len(rights)} rights"
        )
    out = tuple(zip(lefts, rights))
    for l, r in out:
        if not l < r:
            raise AssertionError(f"paired interval [{l}, {r}] is not increasing")
    return DistillResult(k_hat=len(out), intervals=out)


def run_distillation(
    seq,
    M: int,
    tau: float | str,
    seed: int,
    norm: str = "operator",
    threads: int | None = None,
) -> tuple[DistillResult, list[SignalRecord]]:
    """Sample, score, threshold, and distill in one call.

    ``tau`` may be a number or the string ``"auto"``, in which case the
    threshold is selected from the scored intervals by clustering (see
    threshold.select_tau).  Signals are computed once and shared between
    threshold selection and filtering.
    """
    sums = seq if isinstance(seq, SequenceSums) else SequenceSums(seq)
    records = evaluate_signals(sums, sample_intervals(sums.T, M, seed), norm, threads)
    if tau == "auto":
        from .threshold import select_tau

        tau_value = select_tau(records, sums, norm=norm).tau_selected
    elif isinstance(tau, str):
        raise ValueError(f"tau must be a number or 'auto', got {tau!r}")
    else:
        tau_value = float(tau)
    result = distill(filter_by_threshold(records, tau_value))
    return result, records
