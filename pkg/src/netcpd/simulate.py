"""Markov-chain simulator for sequences of dependent Bernoulli networks.

Each edge indicator A_ij(t) follows a two-state Markov chain whose
stationary mean at time t is a prescribed probability Theta_ij(t), with
the mean piecewise constant between change-points.  The one-step kernel
with target mean theta and mixing rate m is

    P = [[1 - m*theta,     m*theta        ],
         [m - m*theta,     1 - m + m*theta]]

(rows: from state 0 / 1).  Its stationary distribution puts mass theta
on state 1, and a chain started at mean theta keeps mean theta, with
lag-1 autocorrelation 1 - m.  At a change-point the entries are redrawn
independently from the new mean (the kernel reaches a new stationary
mean only asymptotically); ``carry_kernel_at_change=True`` flips this
and pushes the old state through the kernel of the new mean instead,
for sensitivity analysis.

Distinct edges use independently derived RNG substreams, so generation
order cannot affect the output.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import frobenius_norm, operator_norm
from .netseq import AdjacencySequence

# Substream roles for seed derivation (see derive_seed).
_ROLE_MIXING = 0
_ROLE_PAIR = 1

SUPPORTED_BLOCK_ROWS = {
    # T: (delta, K) for the block-constant scenarios 2 and 3.
    160: (40, 3),
    250: (50, 4),
    360: (50, 5),
}

_Q1 = np.array([[0.4, 1.0, 0.4], [1.0, 0.4, 0.4], [0.4, 0.4, 0.4]])
_Q2 = np.array([[0.4, 0.4, 1.0], [0.4, 0.4, 0.4], [1.0, 0.4, 0.4]])


def derive_seed(base: int, *parts: int) -> int:
    """Mix a base seed with role/index parts into a fresh 64-bit seed.

    Implemented as numpy's SeedSequence over the entropy tuple
    ``(base, *parts)``; stable across platforms.  The benchmark driver
    seeds rep r with (seed, r, 0) for simulation and (seed, r, 1) for
    detection.
    """
    return int(np.random.SeedSequence((base, *parts)).generate_state(1, np.uint64)[0])


def kernel(theta: float, m: float) -> np.ndarray:
    """One-step transition matrix with stationary mean theta and mixing m."""
    if not (0.0 <= theta <= 1.0):
        raise ValueError(f"theta must be in [0, 1], got {theta}")
    if not (0.0 <= m <= 1.0):
        raise ValueError(f"m must be in [0, 1], got {m}")
    return np.array(
        [
            [1.0 - m * theta, m * theta],
            [m - m * theta, 1.0 - m + m * theta],
        ]
    )


@dataclass(eq=False)
class ScenarioConfig:
    """Everything the simulator needs to generate one sequence.

    ``thetas`` holds one (n, n) symmetric probability matrix per segment
    (K + 1 of them); ``mixing`` holds m(t) for t = 1..T-1.  For scenarios
    with random mixing the realized draws are materialized here and
    ``scenario_seed`` records the substream they came from.
    """

    scenario_id: int
    n: int
    T: int
    change_points: tuple[int, ...]
    thetas: tuple[np.ndarray, ...]
    mixing: np.ndarray
    self_loops: bool = True
    carry_kernel_at_change: bool = False
    scenario_seed: int | None = None

    @property
    def K(self) -> int:
        return len(self.change_points)

    def __post_init__(self) -> None:
        if len(self.thetas) != self.K + 1:
            raise ValueError(
                f"need K+1={self.K + 1} theta matrices, got {len(self.thetas)}"
            )
        if list(self.change_points) != sorted(set(self.change_points)):
            raise ValueError(f"change points must be strictly increasing: {self.change_points}")
        if self.change_points and not (
            1 < self.change_points[0] and self.change_points[-1] <= self.T
        ):
            raise ValueError(f"change points must lie in (1, T]: {self.change_points}")
        self.mixing = np.asarray(self.mixing, dtype=np.float64)
        if self.mixing.shape != (max(self.T - 1, 0),):
            raise ValueError(
                f"mixing must have shape (T-1,)=({self.T - 1},), got {self.mixing.shape}"
            )
        if self.mixing.size and not ((self.mixing >= 0) & (self.mixing <= 1)).all():
            raise ValueError("mixing rates must lie in [0, 1]")
        for th in self.thetas:
            if th.shape != (self.n, self.n):
                raise ValueError(f"theta matrix shape {th.shape} != ({self.n}, {self.n})")
            if not np.allclose(th, th.T):
                raise ValueError("theta matrices must be symmetric")
            if th.min() < 0 or th.max() > 1:
                raise ValueError("theta entries must be probabilities in [0, 1]")


@dataclass(frozen=True)
class GroundTruth:
    """Sidecar record of what a simulated sequence actually contains."""

    scenario_id: int
    seed: int
    T: int
    n: int
    K: int
    change_points: tuple[int, ...]
    kappa: float | None
    kappa2: float | None
    xi: float
    delta: int | None
    scenario_seed: int | None = None


def _scenario1_thetas(n: int) -> tuple[np.ndarray, np.ndarray]:
    u = np.arange(1, n + 1, dtype=np.float64)
    f_outer = np.sin(u / n)
    f_mid = np.where(u <= 20, np.sin((21 - u) / n), np.sin(u / n))

    def theta_of(f: np.ndarray) -> np.ndarray:
        return 0.6 * np.sin(f[:, None] + f[None, :])

    return theta_of(f_outer), theta_of(f_mid)


def _block_thetas(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n == 50:
        rho = 1.0 / 3.0
    elif n == 150:
        rho = 1.0 / 8.0
    else:
        raise ValueError(f"block scenarios support n in {{50, 150}}, got {n}")
    b = n // 3
    z = np.repeat([0, 1, 2], [b, b, n - 2 * b])
    ix = np.ix_(z, z)
    return rho * _Q1[ix], rho * _Q2[ix]


def scenario(scenario_id: int, n: int, T: int, seed: int) -> ScenarioConfig:
    """Build one of the documented simulation designs.

    0: constant mean (no change-points), block-structured Theta, m(t) = 0.2.
    1: two change-points at (T/4, 3T/4), smooth sinusoidal Theta,
       m(t) i.i.d. Uniform(0.3, 0.6) from a substream of ``seed``.
    2: equally spaced change-points (T in {160, 250, 360}), alternating
       block-structured Theta, m(t) = 0.1 + 0.8 t (T - t) / T^2.
    3: as 2 but with constant mixing m(t) = 0.2.
    """
    if T < 2:
        raise ValueError(f"T must be >= 2, got {T}")
    if scenario_id == 0:
        th1, _ = _block_thetas(n)
        return ScenarioConfig(
            scenario_id=0,
            n=n,
            T=T,
            change_points=(),
            thetas=(th1,),
            mixing=np.full(T - 1, 0.2),
        )
    if scenario_id == 1:
        if T % 4 != 0 or T < 8:
            raise ValueError(f"scenario 1 needs T divisible by 4 and >= 8, got {T}")
        delta = T // 4
        th_outer, th_mid = _scenario1_thetas(n)
        mix_seed = derive_seed(seed, _ROLE_MIXING)
        rng = np.random.default_rng(mix_seed)
        mixing = rng.uniform(0.3, 0.6, size=T - 1)
        return ScenarioConfig(
            scenario_id=1,
            n=n,
            T=T,
            change_points=(delta, 3 * delta),
            thetas=(th_outer, th_mid, th_outer),
            mixing=mixing,
            scenario_seed=mix_seed,
        )
    if scenario_id in (2, 3):
        if T not in SUPPORTED_BLOCK_ROWS:
            raise ValueError(
                f"scenarios 2-3 support T in {sorted(SUPPORTED_BLOCK_ROWS)}, got {T}"
            )
        delta, K = SUPPORTED_BLOCK_ROWS[T]
        th1, th2 = _block_thetas(n)
        cps = tuple(k * delta + 1 for k in range(1, K + 1))
        thetas = tuple(th1 if s % 2 == 0 else th2 for s in range(K + 1))
        if scenario_id == 2:
            t = np.arange(1, T, dtype=np.float64)
            mixing = 0.1 + 0.8 * t * (T - t) / T**2
        else:
            mixing = np.full(T - 1, 0.2)
        return ScenarioConfig(
            scenario_id=scenario_id,
            n=n,
            T=T,
            change_points=cps,
            thetas=thetas,
            mixing=mixing,
        )
    raise ValueError(f"unknown scenario id {scenario_id}, expected 0-3")


def diagnostics(config: ScenarioConfig) -> dict:
    """Population quantities of a configuration: kappa, kappa2, xi, delta.

    kappa (kappa2) is the smallest operator (Frobenius) norm of a jump
    between consecutive segments; delta is the minimal spacing between
    consecutive change-points with the sequence boundaries included.
    Both are None when there is no change-point.
    """
    if config.K:
        jumps = [
            config.thetas[k] - config.thetas[k - 1] for k in range(1, config.K + 1)
        ]
        kappa = min(operator_norm(j) for j in jumps)
        kappa2 = min(frobenius_norm(j) for j in jumps)
        fences = (1,) + config.change_points + (config.T + 1,)
        delta = min(b - a for a, b in zip(fences, fences[1:]))
    else:
        kappa = kappa2 = delta = None
    xi = float(1.0 - config.mixing.min()) if config.mixing.size else 0.0
    return {"kappa": kappa, "kappa2": kappa2, "xi": xi, "delta": delta}


def simulate(config: ScenarioConfig, seed: int) -> tuple[AdjacencySequence, GroundTruth]:
    """Generate one sequence from ``config``.

    Edge (i, j) uses the RNG substream derived from
    ``(seed, 1, pair_index)`` where pair_index enumerates the upper
    triangle row-major, so the output is independent of generation order.
    """
    n, T = config.n, config.T
    iu, ju = np.triu_indices(n, k=0 if config.self_loops else 1)
    n_pairs = iu.size

    theta_flat = np.stack([th[iu, ju] for th in config.thetas])  # (K+1, n_pairs)
    seg = np.searchsorted(config.change_points, np.arange(1, T + 1), side="right")

    u = np.empty((T, n_pairs), dtype=np.float64)
    for p in range(n_pairs):
        rng = np.random.default_rng(np.random.SeedSequence((seed, _ROLE_PAIR, p)))
        u[:, p] = rng.random(T)

    cps = set(config.change_points)
    states = np.empty((T, n_pairs), dtype=bool)
    states[0] = u[0] < theta_flat[seg[0]]
    for t in range(2, T + 1):
        theta = theta_flat[seg[t - 1]]
        if t in cps and not config.carry_kernel_at_change:
            states[t - 1] = u[t - 1] < theta
            continue
        m = config.mixing[t - 2]
        p11 = 1.0 - m + m * theta
        p10 = m * theta
        prev = states[t - 2]
        states[t - 1] = np.where(prev, u[t - 1] < p11, u[t - 1] < p10)

    data = np.zeros((T, n, n), dtype=np.uint8)
    data[:, iu, ju] = states
    data[:, ju, iu] = states
    seq = AdjacencySequence(T=T, n=n, data=data, self_loops=config.self_loops)

    d = diagnostics(config)
    truth = GroundTruth(
        scenario_id=config.scenario_id,
        seed=seed,
        T=T,
        n=n,
        K=config.K,
        change_points=config.change_points,
        kappa=d["kappa"],
        kappa2=d["kappa2"],
        xi=d["xi"],
        delta=d["delta"],
        scenario_seed=config.scenario_seed,
    )
    return seq, truth


_TRUTH_FIELDS = (
    "scenario_id",
    "seed",
    "T",
    "n",
    "K",
    "change_points",
    "kappa",
    "kappa2",
    "xi",
    "delta",
    "scenario_seed",
)


def write_truth(truth: GroundTruth, path: str) -> None:
    """Write the ground-truth sidecar as a two-column key,value CSV."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["key", "value"])
        for name in _TRUTH_FIELDS:
            v = getattr(truth, name)
            if name == "change_points":
                v = " ".join(str(c) for c in v)
            elif v is None:
                v = ""
            w.writerow([name, v])


def read_truth(path: str) -> GroundTruth:
    """Read a sidecar written by write_truth."""
    from .netseq import FormatError

    got: dict[str, str] = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["key", "value"]:
            raise FormatError(f"{path}: expected header 'key,value', got {header}")
        for row in reader:
            if len(row) != 2:
                raise FormatError(f"{path}: malformed row {row!r}")
            got[row[0]] = row[1]
    missing = [f for f in _TRUTH_FIELDS if f not in got]
    if missing:
        raise FormatError(f"{path}: missing fields {missing}")

    def opt_float(s: str) -> float | None:
        return None if s == "" else float(s)

    def opt_int(s: str) -> int | None:
        return None if s == "" else int(s)

    cps = tuple(int(c) for c in got["change_points"].split()) if got["change_points"] else ()
    return GroundTruth(
        scenario_id=int(got["scenario_id"]),
        seed=int(got["seed"]),
        T=int(got["T"]),
        n=int(got["n"]),
        K=int(got["K"]),
        change_points=cps,
        kappa=opt_float(got["kappa"]),
        kappa2=opt_float(got["kappa2"]),
        xi=float(got["xi"]),
        delta=opt_int(got["delta"]),
        scenario_seed=opt_int(got["scenario_seed"]),
    )
