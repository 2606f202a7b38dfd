"""Monte Carlo estimation of normed-sum moments S_n(t) = n^(-1/2) sum_i xi_i(t).

Replications are partitioned into fixed-size chunks; each replication draws
from its own derived stream, and chunk results are assembled in index order,
so the estimate is bit-identical for any thread count.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .discretize import GridSpace, lp_norms
from .fieldgen import FieldSpec, sample_sequence
from .rng import SeedLike, seed_path

# 99% two-sided normal quantile, used for every confidence interval here.
CI_Z = 2.5758293035489004

# Chunk size is fixed (not derived from the thread count) so serial and
# parallel runs sum identical partial results in identical order.
CHUNK = 256

KURTOSIS_WARN = 100.0

MIN_REPS = 100


@dataclass(frozen=True)
class MomentEstimate:
    """Estimate of E ||S_n||_p^s with a 99% normal-approximation interval."""

    value: float
    ci_low: float
    ci_high: float
    std_error: float
    reps: int
    n: int
    s: float
    p: float
    heavy_tail: bool


def default_n_schedule() -> tuple:
    """Doubling schedule 2^4 .. 2^12 used to probe growth in n."""
    return tuple(2**j for j in range(4, 13))


def _thread_count(threads: int) -> int:
    if threads < 0:
        raise ValueError("threads must be nonnegative (0 = auto)")
    return os.cpu_count() or 1 if threads == 0 else threads


def simulate_sn(spec: FieldSpec, n: int, grid: GridSpace, seed: SeedLike) -> np.ndarray:
    """One normalized-sum path on the grid."""
    rows = sample_sequence(spec, n, grid, seed)
    return rows.sum(axis=0) / math.sqrt(n)


def _norms_chunk(
    spec: FieldSpec, n: int, p: float, grid: GridSpace, seed: SeedLike, lo: int, hi: int
) -> np.ndarray:
    block = np.empty((hi - lo, grid.size))
    for i, rep in enumerate(range(lo, hi)):
        block[i] = simulate_sn(spec, n, grid, seed_path(seed, rep))
    return lp_norms(block, p, grid)


def run_chunked(worker, reps: int, threads: int) -> list:
    """worker(lo, hi) over fixed chunks; results always in chunk order.

    The chunk layout never depends on the thread count, which is what makes
    parallel runs reproduce serial results exactly.
    """
    spans = [(lo, min(lo + CHUNK, reps)) for lo in range(0, reps, CHUNK)]
    nthreads = _thread_count(threads)
    if nthreads <= 1 or len(spans) == 1:
        return [worker(lo, hi) for lo, hi in spans]
    with ThreadPoolExecutor(max_workers=nthreads) as pool:
        futures = [pool.submit(worker, lo, hi) for lo, hi in spans]
        return [f.result() for f in futures]


def replicate_norms(
    spec: FieldSpec,
    n: int,
    p: float,
    grid: GridSpace,
    reps: int,
    seed: SeedLike,
    threads: int = 1,
) -> np.ndarray:
    """||S_n||_p over replications, one derived stream per replication."""
    if int(reps) != reps or reps < MIN_REPS:
        raise ValueError(f"needs at least {MIN_REPS} replications")
    reps = int(reps)
    chunks = run_chunked(lambda lo, hi: _norms_chunk(spec, n, p, grid, seed, lo, hi), reps, threads)
    return np.concatenate(chunks)


def summarize_norm_powers(norms: np.ndarray, n: int, s: float, p: float) -> MomentEstimate:
    """CI assembly for mean(||S_n||_p^s), with a heavy-tail flag via kurtosis."""
    powered = np.asarray(norms, dtype=float) ** s
    reps = powered.size
    value = float(np.mean(powered))
    centered = powered - value
    var = float(np.sum(centered**2)) / (reps - 1)
    se = math.sqrt(var / reps)
    if var > 0.0:
        kurt = float(np.mean(centered**4)) / (float(np.mean(centered**2)) ** 2)
    else:
        kurt = 0.0
    return MomentEstimate(
        value=value,
        ci_low=value - CI_Z * se,
        ci_high=value + CI_Z * se,
        std_error=se,
        reps=reps,
        n=int(n),
        s=float(s),
        p=float(p),
        heavy_tail=kurt > KURTOSIS_WARN,
    )


def estimate_moment(
    spec: FieldSpec,
    n: int,
    s: float,
    p: float,
    grid: GridSpace,
    reps: int,
    seed: SeedLike,
    threads: int = 1,
) -> MomentEstimate:
    """Monte Carlo estimate of E ||S_n||_p^s with a 99% CI."""
    if s < 1.0:
        raise ValueError("requires s >= 1")
    norms = replicate_norms(spec, n, p, grid, reps, seed, threads)
    return summarize_norm_powers(norms, n, s, p)


def empirical_cov(
    spec: FieldSpec,
    n: int,
    grid: GridSpace,
    reps: int,
    seed: SeedLike,
    threads: int = 1,
) -> np.ndarray:
    """Second-moment matrix mean_r[S_n S_n^T] over replications.

    S_n has mean zero by construction, so no sample-mean centering is applied;
    the weighted trace of this matrix is then algebraically identical to
    estimate_moment(s=2, p=2) on the same seeds.
    """
    if int(reps) != reps or reps < MIN_REPS:
        raise ValueError(f"needs at least {MIN_REPS} replications")
    reps = int(reps)

    def worker(lo: int, hi: int) -> np.ndarray:
        block = np.empty((hi - lo, grid.size))
        for i, rep in enumerate(range(lo, hi)):
            block[i] = simulate_sn(spec, n, grid, seed_path(seed, rep))
        return block.T @ block

    chunks = run_chunked(worker, reps, threads)
    acc = chunks[0].copy()
    for part in chunks[1:]:
        acc += part
    return acc / float(reps)


def write_norms_csv(path: str, n: int, p: float, s: float, norms: np.ndarray) -> None:
    """Per-replication records: rep, n, p, s, norm_value."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rep", "n", "p", "s", "norm_value"])
        for rep, val in enumerate(norms):
            writer.writerow([rep, n, p, s, repr(float(val))])
