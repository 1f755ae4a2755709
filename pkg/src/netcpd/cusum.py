"""CUSUM statistics over network sequences.

The core object is the matrix CUSUM over a candidate interval (s, e]
split at an interior time t:

    C(s, t, e) = sqrt((e-t) / ((e-s)(t-s))) * sum_{r=s+1..t} A(r)
               - sqrt((t-s) / ((e-s)(e-t))) * sum_{r=t+1..e} A(r)

plus subsampled variants that evaluate the same two-block contrast over
an arithmetic grid of times with spacing 2g, laid out either on
s+1, s+1+2g, s+1+4g, ... (the "even" grid) or on s+1+g, s+1+3g, ...
(the "odd" grid).

All functions accept an AdjacencySequence, a raw (T, n, n) float array,
or a SequenceSums instance.  SequenceSums caches the O(T n^2) prefix
sums once so each CUSUM evaluation is O(n^2).
"""

from __future__ import annotations

import math

import numpy as np

from .linalg import frobenius_norm, operator_norm
from .netseq import AdjacencySequence

NORMS = ("operator", "frobenius")


class DegenerateGridError(ValueError):
    """A subsampled split left one side of the contrast without any grid point."""


class SequenceSums:
    """Prefix sums of a network sequence, shared across CUSUM evaluations."""

    def __init__(self, seq: AdjacencySequence | np.ndarray):
        if isinstance(seq, AdjacencySequence):
            data = seq.data
        else:
            data = np.asarray(seq)
            if data.ndim != 3 or data.shape[1] != data.shape[2]:
                raise ValueError(f"expected a (T, n, n) array, got shape {data.shape}")
        self.T = data.shape[0]
        self.n = data.shape[1]
        self.frames = np.asarray(data, dtype=np.float64)
        # prefix[t] = sum of A(1..t); block sums are differences of two rows.
        self.prefix = np.zeros((self.T + 1, self.n, self.n), dtype=np.float64)
        np.cumsum(self.frames, axis=0, out=self.prefix[1:])

    def block_sum(self, a: int, b: int) -> np.ndarray:
        """Sum of A(a+1..b)."""
        return self.prefix[b] - self.prefix[a]


def _as_sums(seq) -> SequenceSums:
    return seq if isinstance(seq, SequenceSums) else SequenceSums(seq)


def validate_triple(s: int, t: int, e: int, T: int) -> None:
    for name, v in (("s", s), ("t", t), ("e", e)):
        if not isinstance(v, (int, np.integer)):
            raise ValueError(f"{name} must be an integer, got {v!r}")
    if not (0 <= s < t < e <= T):
        raise ValueError(f"need 0 <= s < t < e <= T, got s={s}, t={t}, e={e}, T={T}")


def cusum(seq, s: int, t: int, e: int) -> np.ndarray:
    """Matrix CUSUM of the interval (s, e] split at t, with s < t < e."""
    sums = _as_sums(seq)
    validate_triple(s, t, e, sums.T)
    w1 = math.sqrt((e - t) / ((e - s) * (t - s)))
    w2 = math.sqrt((t - s) / ((e - s) * (e - t)))
    return w1 * sums.block_sum(s, t) - w2 * sums.block_sum(t, e)


def _norm_fn(norm: str):
    if norm == "operator":
        return operator_norm
    if norm == "frobenius":
        return frobenius_norm
    raise ValueError(f"unknown norm {norm!r}, expected one of {NORMS}")


def _scan(sums: SequenceSums, s: int, e: int, norm: str) -> np.ndarray:
    """Norms of C(s, t, e) for every interior t = s+1 .. e-1, in order."""
    ts = np.arange(s + 1, e, dtype=np.float64)
    w1 = np.sqrt((e - ts) / ((e - s) * (ts - s)))
    w2 = np.sqrt((ts - s) / ((e - s) * (e - ts)))
    left = sums.prefix[s + 1 : e] - sums.prefix[s]
    right = sums.prefix[e] - sums.prefix[s + 1 : e]
    mats = w1[:, None, None] * left - w2[:, None, None] * right
    if norm == "operator":
        return np.max(np.abs(np.linalg.eigvalsh(mats)), axis=1)
    if norm == "frobenius":
        return np.sqrt(np.sum(mats * mats, axis=(1, 2)))
    raise ValueError(f"unknown norm {norm!r}, expected one of {NORMS}")


def interval_signal(seq, s: int, e: int, norm: str = "operator") -> float:
    """max over interior t of ||C(s, t, e)||; 0.0 when e - s <= 1."""
    sums = _as_sums(seq)
    if not (0 <= s <= e <= sums.T):
        raise ValueError(f"need 0 <= s <= e <= T, got s={s}, e={e}, T={sums.T}")
    if e - s <= 1:
        return 0.0
    _norm_fn(norm)
    return float(np.max(_scan(sums, s, e, norm)))


def interval_argmax(seq, s: int, e: int, norm: str = "operator") -> tuple[int, float]:
    """(t*, value) maximizing ||C(s, t, e)|| over s < t < e; ties take the smallest t."""
    sums = _as_sums(seq)
    if e - s < 2:
        raise ValueError(f"no interior split point in (s, e] = ({s}, {e}]")
    validate_triple(s, s + 1, e, sums.T)
    vals = _scan(sums, s, e, norm)
    k = int(np.argmax(vals))
    return s + 1 + k, float(vals[k])


def _grid_params(s: int, e: int, t: int, g: int, parity: str) -> tuple[int, int]:
    """(a, b): index of the last grid point <= t and of the last grid point <= e."""
    if parity == "even":
        return (t - s - 1) // (2 * g), (e - s - 1) // (2 * g)
    if parity == "odd":
        return (t - s - 1 - g) // (2 * g), (e - s - 1 - g) // (2 * g)
    raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")


def grid_times(s: int, g: int, parity: str, count: int) -> np.ndarray:
    """First ``count`` grid times: s+1+2gi (even) or s+1+g(2i+1) (odd)."""
    i = np.arange(count)
    return s + 1 + 2 * g * i if parity == "even" else s + 1 + g * (2 * i + 1)


def subsampled_cusum(seq, s: int, e: int, t: int, g: int, parity: str) -> np.ndarray:
    """CUSUM contrast over the spacing-2g grid inside (s, e], split at t.

    With a = index of the last grid point <= t and b = index of the last
    grid point <= e, returns

        sqrt((b-a) / ((1+b)(1+a))) * sum_{i=0..a} A(grid_i)
      - sqrt((1+a) / ((1+b)(b-a))) * sum_{i=a+1..b} A(grid_i)

    which is the plain CUSUM of the extracted grid subsequence split
    after its (a+1)-th element.  Raises DegenerateGridError when either
    side of the split holds no grid point (a < 0 or a >= b).
    """
    sums = _as_sums(seq)
    validate_triple(s, t, e, sums.T)
    if not isinstance(g, (int, np.integer)) or g < 1:
        raise ValueError(f"g must be an integer >= 1, got {g!r}")
    a, b = _grid_params(s, e, t, g, parity)
    if a < 0 or a >= b:
        raise DegenerateGridError(
            f"split t={t} leaves an empty block on the {parity} grid of (s, e]="
            f"({s}, {e}] with g={g}: a={a}, b={b}"
        )
    times = grid_times(s, g, parity, b + 1)
    frames = sums.frames[times - 1]
    left = frames[: a + 1].sum(axis=0)
    right = frames[a + 1 :].sum(axis=0)
    w1 = math.sqrt((b - a) / ((1 + b) * (1 + a)))
    w2 = math.sqrt((1 + a) / ((1 + b) * (b - a)))
    return w1 * left - w2 * right
