"""Uniform periodic grids and the elementary difference/average operators.

Grid functions are plain 1-D float arrays of length ``grid.K``; index
``k`` wraps modulo ``K``.  Every operator here is an O(K) stencil evaluated
with ``np.roll`` so that the module doubles as a reference implementation
for the spectral versions in :mod:`mhs_scheme.spectral`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class GridError(ValueError):
    """Invalid grid parameters or a grid function that does not fit its grid."""


@dataclass(frozen=True)
class Grid:
    """Uniform mesh of ``K`` cells on the periodic interval ``[0, L)``."""

    L: float
    K: int

    def __post_init__(self):
        if not isinstance(self.K, (int, np.integer)) or self.K < 2:
            raise GridError(f"K must be an integer >= 2, got {self.K!r}")
        if not (math.isfinite(self.L) and self.L > 0):
            raise GridError(f"L must be positive and finite, got {self.L!r}")

    @property
    def dx(self) -> float:
        return self.L / self.K

    @property
    def x(self) -> np.ndarray:
        """Node coordinates ``k * dx`` for ``k = 0..K-1``."""
        return np.arange(self.K) * self.dx

    def ones(self) -> np.ndarray:
        return np.ones(self.K)

    def check(self, v) -> np.ndarray:
        """Return ``v`` as a float array, rejecting wrong length or non-finite entries."""
        v = np.asarray(v, dtype=float)
        if v.shape != (self.K,):
            raise GridError(f"grid function has shape {v.shape}, expected ({self.K},)")
        if not np.all(np.isfinite(v)):
            raise GridError("grid function has non-finite entries")
        return v


class DiffKind(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"
    CENTRAL = "central"
    SECOND_CENTRAL = "second_central"


class AvgKind(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


def _next(v):
    # v_{k+1}
    return np.roll(v, -1)


def _prev(v):
    # v_{k-1}
    return np.roll(v, 1)


def apply_diff(kind: DiffKind, v, grid: Grid) -> np.ndarray:
    v = grid.check(v)
    dx = grid.dx
    if kind is DiffKind.FORWARD:
        return (_next(v) - v) / dx
    if kind is DiffKind.BACKWARD:
        return (v - _prev(v)) / dx
    if kind is DiffKind.CENTRAL:
        return (_next(v) - _prev(v)) / (2 * dx)
    if kind is DiffKind.SECOND_CENTRAL:
        return (_next(v) - 2 * v + _prev(v)) / dx**2
    raise TypeError(f"unknown difference kind {kind!r}")


def apply_avg(kind: AvgKind, v, grid: Grid) -> np.ndarray:
    v = grid.check(v)
    if kind is AvgKind.FORWARD:
        return (_next(v) + v) / 2
    if kind is AvgKind.BACKWARD:
        return (v + _prev(v)) / 2
    raise TypeError(f"unknown average kind {kind!r}")


# Short aliases used throughout the solver.
def dfwd(v, grid):
    return apply_diff(DiffKind.FORWARD, v, grid)


def dbwd(v, grid):
    return apply_diff(DiffKind.BACKWARD, v, grid)


def dcen(v, grid):
    return apply_diff(DiffKind.CENTRAL, v, grid)


def d2(v, grid):
    return apply_diff(DiffKind.SECOND_CENTRAL, v, grid)


def afwd(v, grid):
    return apply_avg(AvgKind.FORWARD, v, grid)


def abwd(v, grid):
    return apply_avg(AvgKind.BACKWARD, v, grid)


def hadamard(v, w, grid: Grid) -> np.ndarray:
    return grid.check(v) * grid.check(w)


def norm(v, grid: Grid, p=2) -> float:
    """Discrete L^p norm with quadrature weight ``dx``; ``p`` is 1, 2 or ``np.inf``."""
    v = grid.check(v)
    if p == np.inf or p == "inf":
        return float(np.max(np.abs(v)))
    if p == 1:
        return float(np.sum(np.abs(v)) * grid.dx)
    if p == 2:
        return float(math.sqrt(np.dot(v, v) * grid.dx))
    raise ValueError(f"unsupported norm order {p!r}")


def inner(v, w, grid: Grid) -> float:
    return float(np.dot(grid.check(v), grid.check(w)) * grid.dx)


def h1_norm(v, grid: Grid) -> float:
    return math.hypot(norm(v, grid), norm(dfwd(v, grid), grid))


def mean(v, grid: Grid) -> float:
    """Grid average ``(1/L) sum v_k dx``."""
    return float(np.sum(grid.check(v)) * grid.dx / grid.L)


def sobolev_constant(L: float) -> float:
    """Constant of the discrete Sobolev embedding ``|v|_inf <= c |v|_{H^1}``."""
    return math.sqrt(2) * max(1 / math.sqrt(L), math.sqrt(L))


def kato_constant(L: float) -> float:
    """Constant ``C`` in ``|(pinv(d-) v) * w| <= C |v| |w|``."""
    return sobolev_constant(L) / 4 * math.sqrt(L**2 + 16)

