"""Quadrature grids on [0, 1] and weighted L^p norms of grid functions."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import fsum
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class GridSpace:
    """Discretization of ([0,1], Lebesgue): points, positive weights, total mass."""

    points: np.ndarray
    weights: np.ndarray
    total_mass: float = field(init=False)

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        wts = np.asarray(self.weights, dtype=float)
        if pts.ndim != 1 or wts.ndim != 1 or pts.size != wts.size or pts.size == 0:
            raise ValueError("points and weights must be 1-d arrays of equal positive length")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(wts))):
            raise ValueError("grid points and weights must be finite")
        if np.any(wts <= 0.0):
            raise ValueError("quadrature weights must be strictly positive")
        pts.flags.writeable = False
        wts.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", wts)
        object.__setattr__(self, "total_mass", fsum(wts.tolist()))

    @property
    def size(self) -> int:
        return self.points.size


def uniform_grid(n: int) -> GridSpace:
    """Midpoint rule with n cells: points (2j+1)/(2n), weights 1/n."""
    n = int(n)
    if n < 2:
        raise ValueError("uniform grid needs at least 2 points")
    j = np.arange(n, dtype=float)
    return GridSpace(points=(2.0 * j + 1.0) / (2.0 * n), weights=np.full(n, 1.0 / n))


def custom_grid(points: Sequence[float], weights: Sequence[float]) -> GridSpace:
    return GridSpace(points=np.asarray(points, dtype=float), weights=np.asarray(weights, dtype=float))


def grid_from_config(obj: object) -> GridSpace:
    """Build a grid from the JSON config form {"uniform": N} or {"custom": {...}}."""
    if isinstance(obj, dict) and set(obj) == {"uniform"}:
        return uniform_grid(obj["uniform"])
    if isinstance(obj, dict) and set(obj) == {"custom"}:
        inner = obj["custom"]
        if not isinstance(inner, dict) or set(inner) != {"points", "weights"}:
            raise ValueError('custom grid config must be {"custom": {"points": [...], "weights": [...]}}')
        return custom_grid(inner["points"], inner["weights"])
    raise ValueError('grid config must be {"uniform": N} or {"custom": {...}}')


def lp_norm(values: Sequence[float], p: float, grid: GridSpace) -> float:
    """Weighted L^p norm (sum_j w_j |f_j|^p)^(1/p).

    Accumulates with compensated summation so the result is reproducible to
    1e-13 regardless of summation order.
    """
    p = float(p)
    if p < 1.0:
        raise ValueError("lp_norm requires p >= 1")
    vals = np.asarray(values, dtype=float)
    if vals.ndim != 1 or vals.size != grid.size:
        raise ValueError("values must be a 1-d array matching the grid size")
    if not np.all(np.isfinite(vals)):
        raise ValueError("values must be finite")
    terms = grid.weights * np.abs(vals) ** p
    return fsum(terms.tolist()) ** (1.0 / p)


def lp_norms(matrix: np.ndarray, p: float, grid: GridSpace) -> np.ndarray:
    """Row-wise lp_norm of a (reps x grid) matrix, same accumulation as lp_norm."""
    p = float(p)
    if p < 1.0:
        raise ValueError("lp_norms requires p >= 1")
    mat = np.asarray(matrix, dtype=float)
    if mat.ndim != 2 or mat.shape[1] != grid.size:
        raise ValueError("matrix must be 2-d with one column per grid point")
    if not np.all(np.isfinite(mat)):
        raise ValueError("matrix entries must be finite")
    terms = grid.weights * np.abs(mat) ** p
    out = np.empty(mat.shape[0])
    # same accumulation and scalar power as lp_norm, so the two paths agree bitwise
    for i in range(mat.shape[0]):
        out[i] = fsum(terms[i].tolist()) ** (1.0 / p)
    return out
