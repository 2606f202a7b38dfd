"""Explicit moment and tail bounds for normed sums under mixing.

Everything here is a closed-form constant or a certified series evaluation:
the even-order combinatorial constant a_s (exact integer arithmetic), the
mixing-weighted series constant Z (truncated with analytic tail remainders),
the L^p(T)-integrated moment bound W, the superstrong-mixing constant K_N, and
the Chebyshev tail table Q(y) <= min(1, W/y^s).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .mixing import (
    ALPHA_CAP,
    BETA_M_DEPENDENT_VALUE,
    Explicit,
    Geometric,
    MDependent,
    MixingProfile,
    Polynomial,
    series_converges,
    series_converges_beta,
    value_at,
)

MAX_ORDER = 64

# Hard cap on summed tail terms. Convergent series that cannot meet the
# relative tolerance within the cap (decay pathologically close to flat) are
# returned as partial sum PLUS the analytic tail bound, which keeps the result
# a valid upper bound; the remainder field reports the added bound.
MAX_TERMS = 1 << 24

_BLOCK = 4096


@dataclass(frozen=True)
class UtevConstant:
    """Exact even-order constant and its s-th root."""

    s: int
    value: int
    root: float


@dataclass(frozen=True)
class KuCheck:
    s: int
    lhs: float
    rhs: float
    holds: bool


@dataclass(frozen=True)
class BoundReport:
    s: int
    v: float
    z_value: float
    y_value: Optional[float]
    bound: Optional[float]
    truncation_terms: int
    truncation_remainder: float


@dataclass(frozen=True)
class TailReport:
    w: float
    s: float
    y: tuple
    q_bound: tuple


@dataclass(frozen=True)
class VOptimum:
    v_star: Optional[float]
    bound: float
    evaluations: tuple


def _require_even_order(s: int) -> int:
    if int(s) != s or s % 2 != 0 or not (2 <= s <= MAX_ORDER):
        raise ValueError(f"order must be an even integer in [2, {MAX_ORDER}]")
    return int(s)


def utev_a(s: int) -> UtevConstant:
    """a_s = 12 (1 + 2s/3)(s - 1) 3^s (s!)^2 / ((s/2)!)^2, an exact integer.

    12 (1 + 2s/3) = 4 (3 + 2s), so the whole product stays in integer
    arithmetic; the s-th root is attached for direct use in norm bounds.
    """
    s = _require_even_order(s)
    value = 4 * (3 + 2 * s) * (s - 1) * 3**s * (math.factorial(s) // math.factorial(s // 2)) ** 2
    return UtevConstant(s=s, value=value, root=float(value) ** (1.0 / s))


def ku_constant() -> float:
    """The constant 2^(-5/12) * 3 * sqrt(7) * e^(2/e - 23/24) in double precision.

    Note: this evaluates to 4.7596854635..., not the commonly quoted decimal
    4.760327; the quoted decimal is inconsistent with the defining formula by
    about 1.3e-4 relative. The formula value is returned.
    """
    return 2.0 ** (-5.0 / 12.0) * 3.0 * math.sqrt(7.0) * math.exp(2.0 / math.e - 23.0 / 24.0)


def ku_check(s: int) -> KuCheck:
    """Audit of the claimed root growth bound a_s^(1/s) <= K_U * s at order s."""
    c = utev_a(s)
    lhs = c.root
    rhs = ku_constant() * s
    return KuCheck(s=c.s, lhs=lhs, rhs=rhs, holds=lhs <= rhs)


def ku_crossover(s_max: int = MAX_ORDER) -> Optional[int]:
    """Smallest even order from which the K_U growth bound holds through s_max.

    The bound fails at small orders (2 through 8) and holds from 10 on; this
    computes the crossover rather than assuming the claim.
    """
    orders = range(2, s_max + 1, 2)
    checks = [ku_check(s) for s in orders]
    crossover = None
    for chk in reversed(checks):
        if chk.holds:
            crossover = chk.s
        else:
            break
    return crossover


@dataclass(frozen=True)
class _SeriesSum:
    total: float
    terms: int
    remainder: float
    diverged: bool = False


def _sum_geometric_tail(
    amp: float, q: float, d: float, r_start: int, tol: float, base: float, min_terms: int
) -> _SeriesSum:
    """Sum amp * q^r * (r+1)^d for r >= r_start with a ratio-bound tail remainder.

    Requires 0 < q < 1 and d >= 0. When d == 0 the tail is a plain geometric
    series and is summed in closed form (remainder exactly 0).
    """
    if amp == 0.0 or q == 0.0:
        return _SeriesSum(total=0.0, terms=0, remainder=0.0)
    if d == 0.0:
        return _SeriesSum(total=amp * q**r_start / (1.0 - q), terms=0, remainder=0.0)
    total = 0.0
    r = r_start
    terms = 0
    while terms < MAX_TERMS:
        block = np.arange(r, r + _BLOCK, dtype=float)
        vals = amp * q**block * (block + 1.0) ** d
        csum = np.cumsum(vals)
        # tail bound after index R: next term / (1 - kappa), kappa a ratio bound
        last = r + _BLOCK - 1
        for idx in range(_BLOCK):
            R = r + idx
            if terms + idx + 1 < min_terms:
                continue
            kappa = q * ((R + 3.0) / (R + 2.0)) ** d
            if kappa >= 1.0:
                continue
            nxt = amp * q ** (R + 1) * (R + 2.0) ** d
            tail = nxt / (1.0 - kappa)
            partial = base + total + csum[idx]
            if tail <= tol * partial:
                return _SeriesSum(total=total + float(csum[idx]), terms=terms + idx + 1, remainder=float(tail))
        total += float(csum[-1])
        terms += _BLOCK
        r = last + 1
    kappa = q * ((r + 2.0) / (r + 1.0)) ** d
    tail = amp * q**r * (r + 1.0) ** d / max(1.0 - kappa, 1e-300)
    return _SeriesSum(total=total + tail, terms=terms, remainder=float(tail))


def _sum_polynomial_tail(
    amp: float, p: float, r_start: int, tol: float, base: float, min_terms: int
) -> _SeriesSum:
    """Sum amp * (r+1)^(-p) for r >= r_start with an integral-test tail remainder.

    Requires p > 1; the tail after R is bounded by amp * (R+1)^(1-p) / (p-1).
    """
    if amp == 0.0:
        return _SeriesSum(total=0.0, terms=0, remainder=0.0)
    total = 0.0
    r = r_start
    terms = 0
    while terms < MAX_TERMS:
        block = np.arange(r, r + _BLOCK, dtype=float)
        vals = amp * (block + 1.0) ** (-p)
        csum = np.cumsum(vals)
        for idx in range(_BLOCK):
            R = r + idx
            if terms + idx + 1 < min_terms:
                continue
            tail = amp * (R + 1.0) ** (1.0 - p) / (p - 1.0)
            partial = base + total + csum[idx]
            if tail <= tol * partial:
                return _SeriesSum(total=total + float(csum[idx]), terms=terms + idx + 1, remainder=float(tail))
        total += float(csum[-1])
        terms += _BLOCK
        r += _BLOCK
    tail = amp * float(r) ** (1.0 - p) / (p - 1.0)
    return _SeriesSum(total=total + tail, terms=terms, remainder=float(tail))


def _alpha_series(profile: MixingProfile, s: int, v: float, tol: float, min_terms: int) -> _SeriesSum:
    """sum_{r>=0} alpha(r)^(1-s/v) (r+1)^(s/2-1), with alpha(0) = 1/4.

    The r = 0 term always uses the universal bound alpha(0) = 1/4, which is
    what reduces the independent case to the closed form a_s (1/4)^(1-s/v).
    """
    e = 1.0 - s / v
    d = s / 2.0 - 1.0
    total = ALPHA_CAP**e
    terms = 1
    dec = profile.decay
    if isinstance(dec, Explicit):
        for r in range(1, len(dec.values) + 1):
            total += value_at(profile, r) ** e * (r + 1.0) ** d
        return _SeriesSum(total=total, terms=terms + len(dec.values), remainder=0.0)
    if isinstance(dec, MDependent):
        for r in range(1, dec.m + 1):
            total += ALPHA_CAP**e * (r + 1.0) ** d
        return _SeriesSum(total=total, terms=terms + dec.m, remainder=0.0)
    if isinstance(dec, Geometric):
        if dec.c == 0.0 or dec.rho == 0.0:
            return _SeriesSum(total=total, terms=terms, remainder=0.0)
        r0 = 1
        while dec.c * dec.rho**r0 > ALPHA_CAP:
            total += ALPHA_CAP**e * (r0 + 1.0) ** d
            terms += 1
            r0 += 1
        tail = _sum_geometric_tail(dec.c**e, dec.rho**e, d, r0, tol, total, min_terms)
        return _SeriesSum(total=total + tail.total, terms=terms + tail.terms, remainder=tail.remainder)
    # polynomial decay
    if not series_converges(profile, s, v):
        return _SeriesSum(total=math.inf, terms=0, remainder=math.inf, diverged=True)
    if dec.c == 0.0:
        return _SeriesSum(total=total, terms=terms, remainder=0.0)
    p = dec.theta * e - d
    r0 = 1
    while dec.c * (r0 + 1.0) ** (-dec.theta) > ALPHA_CAP:
        total += ALPHA_CAP**e * (r0 + 1.0) ** d
        terms += 1
        r0 += 1
    tail = _sum_polynomial_tail(dec.c**e, p, r0, tol, total, min_terms)
    return _SeriesSum(total=total + tail.total, terms=terms + tail.terms, remainder=tail.remainder)


def _beta_series(profile: MixingProfile, s: float, tol: float, min_terms: int) -> _SeriesSum:
    """sum_{k>=1} beta(k) (k+1)^((s-2)/2); the sum starts at lag 1 and is empty
    for 0-dependent profiles."""
    d = (s - 2.0) / 2.0
    dec = profile.decay
    if isinstance(dec, Explicit):
        total = 0.0
        for k in range(1, len(dec.values) + 1):
            total += dec.values[k - 1] * (k + 1.0) ** d
        return _SeriesSum(total=total, terms=len(dec.values), remainder=0.0)
    if isinstance(dec, MDependent):
        total = 0.0
        for k in range(1, dec.m + 1):
            total += BETA_M_DEPENDENT_VALUE * (k + 1.0) ** d
        return _SeriesSum(total=total, terms=dec.m, remainder=0.0)
    if isinstance(dec, Geometric):
        if dec.c == 0.0 or dec.rho == 0.0:
            return _SeriesSum(total=0.0, terms=0, remainder=0.0)
        return _sum_geometric_tail(dec.c, dec.rho, d, 1, tol, 0.0, min_terms)
    if not series_converges_beta(profile, s):
        return _SeriesSum(total=math.inf, terms=0, remainder=math.inf, diverged=True)
    if dec.c == 0.0:
        return _SeriesSum(total=0.0, terms=0, remainder=0.0)
    return _sum_polynomial_tail(dec.c, dec.theta - d, 1, tol, 0.0, min_terms)


def z_value(
    profile: MixingProfile, s: int, v: float, tol: float = 1e-10, min_terms: int = 0
) -> BoundReport:
    """Mixing-series constant Z = (a_s * sum_r alpha^(1-s/v)(r) (r+1)^(s/2-1))^(1/s).

    Returns a report fragment (y_value and bound unset). Divergent series give
    z_value = +inf, never an exception. min_terms forces at least that many
    summed tail terms before the tolerance stop, which exists so truncation
    stability can be probed directly.
    """
    s = _require_even_order(s)
    if profile.kind != "alpha":
        raise ValueError("z_value needs an alpha profile")
    if not (v > s):
        raise ValueError("requires v > s")
    if not (tol > 0.0):
        raise ValueError("tolerance must be positive")
    ssum = _alpha_series(profile, s, float(v), tol, int(min_terms))
    z = math.inf if ssum.diverged else (float(utev_a(s).value) * ssum.total) ** (1.0 / s)
    return BoundReport(
        s=s,
        v=float(v),
        z_value=z,
        y_value=None,
        bound=None,
        truncation_terms=ssum.terms,
        truncation_remainder=ssum.remainder,
    )


def with_y_value(report: BoundReport, y_value: float) -> BoundReport:
    """Complete a z_value fragment with the uniform v-norm level Y and the bound Z*Y."""
    return replace(report, y_value=float(y_value), bound=normed_sum_bound(y_value, report.z_value))


def sum_bound(per_term_v_norms: Sequence[float], z: float) -> float:
    """Bound Z * sqrt(sum_i ||X_i||_v^2) on the L^s norm of the raw sum."""
    norms = np.asarray(per_term_v_norms, dtype=float)
    if norms.ndim != 1 or norms.size == 0:
        raise ValueError("need a nonempty 1-d sequence of norms")
    if np.any(norms < 0.0) or not np.all(np.isfinite(norms)):
        raise ValueError("norms must be finite and nonnegative")
    if z < 0.0:
        raise ValueError("z must be nonnegative")
    rms = math.sqrt(math.fsum((norms * norms).tolist()))
    return normed_sum_bound(rms, z)


def normed_sum_bound(y: float, z: float) -> float:
    """Bound Z * Y on sup_n of the normalized-sum L^s norm; 0 * inf resolves to 0."""
    y = float(y)
    if y < 0.0 or math.isnan(y):
        raise ValueError("y must be nonnegative")
    if z < 0.0 or math.isnan(z):
        raise ValueError("z must be nonnegative")
    if y == 0.0:
        return 0.0
    return z * y


def default_v_grid(s: int) -> tuple:
    """Search grid s + 0.5, s + 1, ..., 2s, plus 3s."""
    grid = [s + 0.5 * k for k in range(1, 2 * s + 1)]
    grid.append(3.0 * s)
    return tuple(grid)


def optimize_over_v(
    profile: MixingProfile,
    s: int,
    x_vnorm: Callable[[float], float],
    v_grid: Optional[Sequence[float]] = None,
    tol: float = 1e-10,
) -> VOptimum:
    """Minimize Z[alpha](s, v) * ||X||_v over a finite grid of v > s.

    x_vnorm must be nondecreasing in v (Lyapunov on a probability space); the
    trade-off is that larger v shrinks Z but grows the norm. Returns +inf with
    v_star None when every grid point diverges.
    """
    s = _require_even_order(s)
    grid = tuple(float(v) for v in (default_v_grid(s) if v_grid is None else v_grid))
    if len(grid) == 0:
        raise ValueError("v grid must be nonempty")
    if any(not (v > s) for v in grid):
        raise ValueError("every grid v must exceed s")
    evaluations = []
    best_v, best = None, math.inf
    for v in grid:
        z = z_value(profile, s, v, tol=tol).z_value
        val = normed_sum_bound(x_vnorm(v), z)
        evaluations.append((v, val))
        if val < best:
            best_v, best = v, val
    return VOptimum(v_star=best_v, bound=best, evaluations=tuple(evaluations))


def lp_moment_bound(
    profile: MixingProfile, s: int, v: float, sup_v_norm_integral: float, tol: float = 1e-10
) -> float:
    """Bound W = Z^s * I^(s/v) on sup_n E ||S_n||_{L^s(T)}^s.

    I is the integral over T of the supremum over i of E|xi_i(t)|^v. A null
    field (I = 0) gives 0 even when the series diverges.
    """
    s = _require_even_order(s)
    integral = float(sup_v_norm_integral)
    if integral < 0.0 or math.isnan(integral):
        raise ValueError("sup_v_norm_integral must be nonnegative")
    if integral == 0.0:
        return 0.0
    if profile.kind != "alpha":
        raise ValueError("lp_moment_bound needs an alpha profile")
    if not (v > s):
        raise ValueError("requires v > s")
    ssum = _alpha_series(profile, s, float(v), tol, 0)
    if ssum.diverged:
        return math.inf
    return float(utev_a(s).value) * ssum.total * integral ** (s / float(v))


def nachapetyan_k(profile: MixingProfile, s: float, tol: float = 1e-10, min_terms: int = 0) -> float:
    """Superstrong-mixing constant K_N = 2s * (sum_{k>=1} beta(k) (k+1)^((s-2)/2))^(1/s).

    +inf when the series diverges; 0 when beta vanishes from lag 1 on.
    """
    if profile.kind != "beta":
        raise ValueError("nachapetyan_k needs a beta profile")
    s = float(s)
    if not (s >= 2.0):
        raise ValueError("requires s >= 2")
    if not (tol > 0.0):
        raise ValueError("tolerance must be positive")
    ssum = _beta_series(profile, s, tol, int(min_terms))
    if ssum.diverged:
        return math.inf
    return 2.0 * s * ssum.total ** (1.0 / s)


def nachapetyan_bound(k_n: float, sup_s_norm: float) -> float:
    """Bound K_N * sup_i ||X_i||_s on the normalized-sum L^s norm."""
    return normed_sum_bound(sup_s_norm, k_n)


def chebyshev_tail(w: float, s: float, y_grid: Sequence[float]) -> TailReport:
    """Tail table Q(y) <= min(1, W / y^s) for y >= 1; a probability, so capped at 1."""
    w = float(w)
    s = float(s)
    if w < 0.0 or math.isnan(w):
        raise ValueError("w must be nonnegative")
    if not (s >= 2.0):
        raise ValueError("requires s >= 2")
    y = np.asarray(y_grid, dtype=float)
    if y.ndim != 1 or y.size == 0:
        raise ValueError("y grid must be a nonempty 1-d sequence")
    if np.any(y < 1.0) or not np.all(np.isfinite(y)):
        raise ValueError("tail levels must be finite and >= 1")
    with np.errstate(over="ignore"):
        q = np.minimum(1.0, w / y**s)
    return TailReport(w=w, s=s, y=tuple(y.tolist()), q_bound=tuple(q.tolist()))


def effective_even_order(s: float, unit_mass: bool = True) -> int:
    """Smallest even integer >= s, for lifting a fractional order to an even one.

    The lift relies on norm monotonicity, which needs total mass 1; callers on
    non-probability grids get a warning rather than a silent wrong answer.
    """
    s = float(s)
    if not (s >= 2.0) or math.isinf(s):
        raise ValueError("requires 2 <= s < inf")
    if not unit_mass:
        warnings.warn(
            "effective even order lift assumes total mass 1; rescale the measure first",
            stacklevel=2,
        )
    return int(math.ceil(s / 2.0)) * 2
