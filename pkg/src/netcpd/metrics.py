"""Evaluation measures for estimated change-point sets.

Distances are reported as Hausdorff distance normalized by T, with the
convention that an empty estimate against a nonempty truth (or vice
versa) scores 1 and empty-vs-empty scores 0.  Segmentation agreement is
the adjusted Rand index between the partitions of {1..T} induced by the
two change-point sets.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

K_DIFF_BINS = ("<=-2", "-1", "0", "1", "2", ">=3")


def hausdorff(truth: list[int], estimate: list[int], T: int) -> float:
    """Normalized Hausdorff distance between two change-point sets.

    max over either set of the distance to the nearest point of the
    other, divided by T.  One empty side scores 1.0; both empty, 0.0.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    a = np.asarray(sorted(truth), dtype=np.float64)
    b = np.asarray(sorted(estimate), dtype=np.float64)
    if a.size == 0 and b.size == 0:
        return 0.0
    if a.size == 0 or b.size == 0:
        return 1.0
    d_ab = np.abs(a[:, None] - b[None, :])
    directed = max(d_ab.min(axis=1).max(), d_ab.min(axis=0).max())
    return float(directed) / T


def segmentation_labels(change_points: list[int], T: int) -> np.ndarray:
    """Segment index of each time point 1..T under the given change-points."""
    cps = np.asarray(sorted(change_points), dtype=np.int64)
    if cps.size and not (1 < cps[0] and cps[-1] <= T):
        raise ValueError(f"change points must lie in (1, T]: {change_points}")
    return np.searchsorted(cps, np.arange(1, T + 1), side="right")


def ari(labels_a: np.ndarray, labels_b: np.ndarray) -> float:
    """Adjusted Rand index between two label vectors.

    Pair-counting form: (sum_ij C(n_ij,2) - E) / (max - E) with
    E = sum_i C(a_i,2) sum_j C(b_j,2) / C(N,2).  Returns 1.0 when the
    denominator vanishes (both partitions trivial), matching the usual
    convention.
    """
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if a.shape != b.shape or a.ndim != 1 or a.size < 2:
        raise ValueError(f"need two equal-length label vectors, got {a.shape}, {b.shape}")
    N = a.size
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)

    def comb2(x):
        return x * (x - 1) / 2.0

    index = comb2(table).sum()
    sum_a = comb2(table.sum(axis=1)).sum()
    sum_b = comb2(table.sum(axis=0)).sum()
    expected = sum_a * sum_b / comb2(N)
    denom = (sum_a + sum_b) / 2.0 - expected
    if denom == 0.0:
        return 1.0
    return float((index - expected) / denom)


@dataclass(frozen=True)
class EvalRow:
    """One repetition's scores against the ground truth."""

    k_true: int
    k_hat: int
    hausdorff_norm: float
    hausdorff_star: float | None  # present iff k_hat == k_true
    ari: float
    runtime_seconds: float
    used_empty_convention: bool

    @property
    def k_diff(self) -> int:
        return self.k_hat - self.k_true


def evaluate(
    truth: list[int], estimate: list[int], T: int, runtime_seconds: float = 0.0
) -> EvalRow:
    """Score one estimated change-point set against the truth."""
    h = hausdorff(truth, estimate, T)
    k_true, k_hat = len(truth), len(estimate)
    return EvalRow(
        k_true=k_true,
        k_hat=k_hat,
        hausdorff_norm=h,
        hausdorff_star=h if k_hat == k_true else None,
        ari=ari(segmentation_labels(truth, T), segmentation_labels(estimate, T)),
        runtime_seconds=runtime_seconds,
        used_empty_convention=(k_true == 0) != (k_hat == 0),
    )


@dataclass(frozen=True)
class BenchmarkTable:
    """Aggregate of EvalRows in the layout of the simulation tables.

    Hausdorff means are scaled by 100 (they read as 10^2 * H / T).  The
    plain Hausdorff mean is blanked when any contributing row scored an
    empty-vs-nonempty comparison by convention, since the convention
    value would dominate the average.
    """

    reps: int
    k_diff_counts: tuple[int, int, int, int, int, int]
    mean_hausdorff100: float | None
    mean_hausdorff_star100: float | None
    mean_ari: float
    mean_runtime_seconds: float

    @property
    def prop_k_correct(self) -> float:
        return self.k_diff_counts[2] / self.reps


def summarize(rows: list[EvalRow]) -> BenchmarkTable:
    if not rows:
        raise ValueError("cannot summarize zero rows")
    counts = [0] * 6
    for r in rows:
        d = r.k_diff
        counts[max(0, min(5, d + 3))] += 1
    stars = [r.hausdorff_star for r in rows if r.hausdorff_star is not None]
    blank_h = any(r.used_empty_convention for r in rows)
    return BenchmarkTable(
        reps=len(rows),
        k_diff_counts=tuple(counts),
        mean_hausdorff100=None if blank_h else 100.0 * float(np.mean([r.hausdorff_norm for r in rows])),
        mean_hausdorff_star100=100.0 * float(np.mean(stars)) if stars else None,
        mean_ari=float(np.mean([r.ari for r in rows])),
        mean_runtime_seconds=float(np.mean([r.runtime_seconds for r in rows])),
    )


def _fmt(v, nd=3) -> str:
    if v is None:
        return ""
    return f"{v:.{nd}f}"


def write_table_csv(table: BenchmarkTable, path: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["reps", *["k_diff_" + b for b in K_DIFF_BINS],
                    "mean_h100", "mean_hstar100", "mean_ari", "mean_runtime_s"])
        w.writerow([
            table.reps,
            *table.k_diff_counts,
            _fmt(table.mean_hausdorff100),
            _fmt(table.mean_hausdorff_star100),
            _fmt(table.mean_ari),
            _fmt(table.mean_runtime_seconds),
        ])


def format_table(table: BenchmarkTable) -> str:
    """Aligned text rendering of a benchmark summary."""
    head = [*K_DIFF_BINS, "H*100", "H* *100", "ARI", "time(s)"]
    vals = [
        *[str(c) for c in table.k_diff_counts],
        _fmt(table.mean_hausdorff100),
        _fmt(table.mean_hausdorff_star100),
        _fmt(table.mean_ari),
        _fmt(table.mean_runtime_seconds, 2),
    ]
    widths = [max(len(h), len(v)) for h, v in zip(head, vals)]
    line1 = "  ".join(h.rjust(w) for h, w in zip(head, widths))
    line2 = "  ".join(v.rjust(w) for v, w in zip(vals, widths))
    return f"reps={table.reps}\n{line1}\n{line2}\n"
