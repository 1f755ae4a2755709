"""Adjacency-sequence container and on-disk formats.

A network sequence is an ordered series of simple undirected graphs on a
fixed node set {1, ..., n}, stored as symmetric 0/1 adjacency matrices
A(1), ..., A(T).  Three interchange formats are supported:

* DNMT: a dense ASCII text format, bit-exact under round-trip.
* Edge list CSV: sparse ``t,i,j`` rows, 1-based.
* Contact CSV: raw ``timestamp,i,j`` contact events, aggregated into
  fixed-width windows.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np


class FormatError(ValueError):
    """Raised when an input file violates its documented format."""


@dataclass(frozen=True)
class ContactRecord:
    """One undirected contact event between nodes i and j at a timestamp."""

    timestamp: float
    i: int
    j: int

    def __post_init__(self) -> None:
        if self.i < 1 or self.j < 1:
            raise ValueError(f"node ids must be >= 1, got ({self.i}, {self.j})")


@dataclass(frozen=True)
class AdjacencySequence:
    """A length-T sequence of symmetric binary adjacency matrices.

    Parameters
    ----------
    T : int
        Number of time points, >= 1.
    n : int
        Number of nodes, >= 2.
    data : np.ndarray
        uint8 array of shape (T, n, n); ``data[t - 1]`` is A(t).
    self_loops : bool
        Whether diagonal entries may be nonzero.  When False every
        diagonal entry must be 0.
    """

    T: int
    n: int
    data: np.ndarray
    self_loops: bool = True

    def __post_init__(self) -> None:
        arr = np.ascontiguousarray(self.data, dtype=np.uint8)
        if arr.shape != (self.T, self.n, self.n):
            raise ValueError(
                f"data shape {arr.shape} does not match (T, n, n)="
                f"({self.T}, {self.n}, {self.n})"
            )
        if self.T < 1:
            raise ValueError(f"T must be >= 1, got {self.T}")
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        bad = (arr > 1).nonzero()
        if bad[0].size:
            t, i, j = bad[0][0], bad[1][0], bad[2][0]
            raise ValueError(
                f"entry at (t={t + 1}, i={i + 1}, j={j + 1}) is not in {{0, 1}}"
            )
        mism = (arr != arr.transpose(0, 2, 1)).nonzero()
        if mism[0].size:
            t, i, j = mism[0][0], mism[1][0], mism[2][0]
            raise ValueError(
                f"asymmetric matrix at (t={t + 1}, i={i + 1}, j={j + 1})"
            )
        if not self.self_loops:
            diag = np.einsum("tii->ti", arr)
            bad_d = diag.nonzero()
            if bad_d[0].size:
                t, i = bad_d[0][0], bad_d[1][0]
                raise ValueError(
                    f"self_loops=False but A_{{{i + 1},{i + 1}}}({t + 1}) != 0"
                )
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_array(cls, data: np.ndarray, self_loops: bool | None = None) -> "AdjacencySequence":
        """Build a sequence from a (T, n, n) array, inferring the loop flag.

        When ``self_loops`` is None it is inferred as True iff any diagonal
        entry is nonzero.
        """
        arr = np.asarray(data)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
            raise ValueError(f"expected a (T, n, n) array, got shape {arr.shape}")
        if self_loops is None:
            self_loops = bool(np.einsum("tii->ti", arr.astype(np.uint8)).any())
        return cls(T=arr.shape[0], n=arr.shape[1], data=arr, self_loops=self_loops)


def read_dnmt(path: str) -> AdjacencySequence:
    """Read a DNMT file.

    Layout: a header line ``"<T> <n>"`` followed by T blocks of n lines,
    each line exactly n characters from {0, 1}.  Every line is
    LF-terminated and there are no blank lines.  The self-loop flag is
    inferred: True iff any diagonal entry is 1 (the byte format does not
    carry the flag, and inference keeps write(read(f)) == f).
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        text = raw.decode("ascii")
    except UnicodeDecodeError as exc:
        raise FormatError(f"{path}: not ASCII ({exc})") from None
    if not text.endswith("\n"):
        raise FormatError(f"{path}: file must end with a newline")
    lines = text.split("\n")[:-1]
    if not lines:
        raise FormatError(f"{path}: empty file")
    head = lines[0].split(" ")
    if len(head) != 2 or not all(p.isdigit() for p in head):
        raise FormatError(f"{path}: malformed header {lines[0]!r}, expected '<T> <n>'")
    T, n = int(head[0]), int(head[1])
    if T < 1 or n < 2:
        raise FormatError(f"{path}: header T={T}, n={n} out of range (T >= 1, n >= 2)")
    need = 1 + T * n
    if len(lines) < need:
        raise FormatError(
            f"{path}: truncated, expected {need - 1} matrix lines, found {len(lines) - 1}"
        )
    if len(lines) > need:
        raise FormatError(f"{path}: trailing data after block t={T}")
    body = lines[1:]
    arr = np.empty((T, n, n), dtype=np.uint8)
    for t in range(T):
        for r in range(n):
            line = body[t * n + r]
            if len(line) != n:
                raise FormatError(
                    f"{path}: line length {len(line)} != n={n} at (t={t + 1}, row={r + 1})"
                )
            row = np.frombuffer(line.encode("ascii"), dtype=np.uint8) - ord("0")
            if (row > 1).any():
                c = int((row > 1).nonzero()[0][0])
                raise FormatError(
                    f"{path}: character {line[c]!r} not in {{0,1}} at "
                    f"(t={t + 1}, row={r + 1}, col={c + 1})"
                )
            arr[t, r] = row
        blk = arr[t]
        mism = (blk != blk.T).nonzero()
        if mism[0].size:
            order = np.lexsort((mism[1], mism[0]))
            i, j = int(mism[0][order[0]]), int(mism[1][order[0]])
            raise FormatError(
                f"{path}: asymmetric block at (t={t + 1}, row={i + 1}): "
                f"entry ({i + 1},{j + 1})={blk[i, j]} but ({j + 1},{i + 1})={blk[j, i]}"
            )
    return AdjacencySequence.from_array(arr)


def write_dnmt(seq: AdjacencySequence, path: str) -> None:
    """Write a sequence in DNMT layout (see read_dnmt); bit-exact round-trip."""
    digits = seq.data + ord("0")
    with open(path, "wb") as fh:
        fh.write(f"{seq.T} {seq.n}\n".encode("ascii"))
        rows = digits.reshape(seq.T * seq.n, seq.n)
        out = np.empty((rows.shape[0], seq.n + 1), dtype=np.uint8)
        out[:, :-1] = rows
        out[:, -1] = ord("\n")
        fh.write(out.tobytes())


def read_edgelist(path: str, T: int, n: int) -> AdjacencySequence:
    """Read a sparse edge-list CSV with header ``t,i,j`` (all 1-based).

    Each row sets A_ij(t) = A_ji(t) = 1; absent pairs are 0.  Duplicate
    rows are idempotent.  The self-loop flag is inferred from the data.
    """
    if T < 1 or n < 2:
        raise ValueError(f"need T >= 1 and n >= 2, got T={T}, n={n}")
    arr = np.zeros((T, n, n), dtype=np.uint8)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty file") from None
        if header != ["t", "i", "j"]:
            raise FormatError(f"{path}: expected header 't,i,j', got {','.join(header)!r}")
        for ln, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise FormatError(f"{path}:{ln}: expected 3 fields, got {len(row)}")
            try:
                t, i, j = (int(x) for x in row)
            except ValueError:
                raise FormatError(f"{path}:{ln}: non-integer field in {row!r}") from None
            if not (1 <= t <= T):
                raise FormatError(f"{path}:{ln}: t={t} outside [1, {T}]")
            if not (1 <= i <= n and 1 <= j <= n):
                raise FormatError(f"{path}:{ln}: node id outside [1, {n}] in {row!r}")
            arr[t - 1, i - 1, j - 1] = 1
            arr[t - 1, j - 1, i - 1] = 1
    return AdjacencySequence.from_array(arr)


def read_contacts(path: str) -> list[ContactRecord]:
    """Read raw contact events from a CSV with header ``timestamp,i,j``."""
    records: list[ContactRecord] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty file") from None
        if header != ["timestamp", "i", "j"]:
            raise FormatError(
                f"{path}: expected header 'timestamp,i,j', got {','.join(header)!r}"
            )
        for ln, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise FormatError(f"{path}:{ln}: expected 3 fields, got {len(row)}")
            try:
                ts = float(row[0])
                i, j = int(row[1]), int(row[2])
            except ValueError:
                raise FormatError(f"{path}:{ln}: malformed row {row!r}") from None
            try:
                records.append(ContactRecord(timestamp=ts, i=i, j=j))
            except ValueError as exc:
                raise FormatError(f"{path}:{ln}: {exc}") from None
    return records


def aggregate_contacts(
    records: list[ContactRecord], window_seconds: float, n: int
) -> AdjacencySequence:
    """Aggregate contact events into a network sequence.

    Window indexing is anchored at the minimum timestamp: an event at
    time ``ts`` lands in window ``t = floor((ts - min_ts) / window) + 1``,
    and T is the window index of the maximum timestamp.  Within a window,
    any contact between i and j sets A_ij(t) = A_ji(t) = 1.

    Parameters
    ----------
    records : list of ContactRecord
        Nonempty list of events.
    window_seconds : float
        Window width, > 0, in the records' time unit.
    n : int
        Number of nodes; all ids must lie in [1, n].
    """
    if not records:
        raise ValueError("cannot aggregate an empty record list")
    if window_seconds <= 0:
        raise ValueError(f"window_seconds must be > 0, got {window_seconds}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    anchor = min(r.timestamp for r in records)
    last = max(r.timestamp for r in records)
    T = int(math.floor((last - anchor) / window_seconds)) + 1
    arr = np.zeros((T, n, n), dtype=np.uint8)
    for r in records:
        if r.i > n or r.j > n:
            raise ValueError(f"node id ({r.i}, {r.j}) exceeds n={n}")
        t = int(math.floor((r.timestamp - anchor) / window_seconds)) + 1
        arr[t - 1, r.i - 1, r.j - 1] = 1
        arr[t - 1, r.j - 1, r.i - 1] = 1
    return AdjacencySequence.from_array(arr)
