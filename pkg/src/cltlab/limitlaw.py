"""Gaussian limit field of S_n: covariance assembly, factorization, sampling.

The limit covariance on the grid is R(t, u) = sum_{k,l} Lambda_{kl} phi_k(t)
phi_l(u) with Lambda the long-run covariance of the driver components. R is
factored by Cholesky with an escalating jitter schedule and a pivoted fallback;
degeneracy raises, it never produces silent NaNs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg.lapack import dpstrf

from .discretize import GridSpace, lp_norms
from .fieldgen import FieldSpec, long_run_covariance
from .montecarlo import run_chunked
from .rng import SeedLike, stream

JITTERS = (0.0, 1e-12, 1e-10, 1e-8)

# Acceptance threshold for ||F F^T - (R + jitter I)||_F relative to ||R + jitter I||_F.
FACTOR_RTOL = 1e-8

# Eigenvalues below -1e-10 * max diagonal mean the matrix is indefinite, which
# jitter must not paper over.
EIG_RTOL = 1e-10


class DegenerateCovarianceError(Exception):
    """The covariance could not be factored within the jitter schedule."""


@dataclass(frozen=True)
class LimitField:
    covariance: np.ndarray
    factor: np.ndarray
    jitter: float


def _factor_error(factor: np.ndarray, target: np.ndarray) -> float:
    denom = float(np.linalg.norm(target))
    if denom == 0.0:
        return float(np.linalg.norm(factor @ factor.T))
    return float(np.linalg.norm(factor @ factor.T - target)) / denom


def factorize_covariance(cov: np.ndarray) -> LimitField:
    """Lower-triangular-style factor F with F F^T = cov + jitter I.

    Tries plain Cholesky over the jitter schedule, then a pivoted Cholesky at
    the top jitter (the factor is then row-permuted lower triangular). Raises
    DegenerateCovarianceError when the matrix is indefinite beyond tolerance or
    no candidate reproduces the target within 1e-8 relative Frobenius error.
    """
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] == 0:
        raise ValueError("covariance must be a square matrix")
    if not np.all(np.isfinite(cov)):
        raise ValueError("covariance entries must be finite")
    if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(cov).max()))):
        raise ValueError("covariance must be symmetric")
    cov = (cov + cov.T) / 2.0
    if not cov.any():
        return LimitField(covariance=cov, factor=np.zeros_like(cov), jitter=0.0)
    eye = np.eye(cov.shape[0])
    checked_spectrum = False
    for jitter in JITTERS:
        target = cov + jitter * eye
        try:
            factor = np.linalg.cholesky(target)
        except np.linalg.LinAlgError:
            if not checked_spectrum:
                floor = -EIG_RTOL * float(np.diag(cov).max())
                if float(np.linalg.eigvalsh(cov).min()) < floor:
                    raise DegenerateCovarianceError(
                        "covariance is indefinite beyond tolerance; refusing to jitter it away"
                    )
                checked_spectrum = True
            continue
        if _factor_error(factor, target) <= FACTOR_RTOL:
            return LimitField(covariance=cov, factor=factor, jitter=jitter)
    jitter = JITTERS[-1]
    target = cov + jitter * eye
    c, piv, rank, _info = dpstrf(target, lower=1)
    tri = np.tril(c)
    tri[:, rank:] = 0.0
    factor = np.empty_like(tri)
    factor[piv - 1] = tri
    if _factor_error(factor, target) <= FACTOR_RTOL:
        return LimitField(covariance=cov, factor=factor, jitter=jitter)
    raise DegenerateCovarianceError(
        "covariance factorization failed at max jitter "
        f"{jitter:g}; the matrix is numerically degenerate"
    )


def limit_covariance(spec: FieldSpec, grid: GridSpace) -> LimitField:
    """Assemble and factor the limit covariance of S_n on the grid."""
    if spec.basis.shape[1] != grid.size:
        raise ValueError("basis was evaluated on a different grid size")
    lam = long_run_covariance(spec)
    cov = spec.basis.T @ lam @ spec.basis
    return factorize_covariance(cov)


def sample_limit_norms(
    field: LimitField,
    p: float,
    grid: GridSpace,
    reps: int,
    seed: SeedLike,
    threads: int = 1,
) -> np.ndarray:
    """||S||_p over replications of the limit field S = factor z, z standard normal.

    One derived stream per replication, fixed chunking, so serial and parallel
    runs agree bit for bit.
    """
    if field.factor.shape[0] != grid.size:
        raise ValueError("limit field lives on a different grid size")
    if int(reps) != reps or reps < 1:
        raise ValueError("reps must be a positive integer")
    reps = int(reps)
    g = grid.size

    def worker(lo: int, hi: int) -> np.ndarray:
        z = np.empty((hi - lo, g))
        for i, rep in enumerate(range(lo, hi)):
            z[i] = stream(seed, rep).standard_normal(g)
        return lp_norms(z @ field.factor.T, p, grid)

    return np.concatenate(run_chunked(worker, reps, threads))
