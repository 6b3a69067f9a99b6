"""Discrete conserved quantities, the uniform bound they imply, and blow-up observables."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid_ops import Grid, d2, dfwd, mean


def _check_omega(omega):
    if omega == 0 or not math.isfinite(omega):
        raise ValueError(f"omega must be a nonzero finite number, got {omega!r}")


def hamiltonian(u, grid: Grid) -> float:
    """``H_d(u) = 1/2 sum (D+ u_k)^2 dx``."""
    du = dfwd(u, grid)
    return 0.5 * float(np.dot(du, du)) * grid.dx


def constraint_functional(u, grid: Grid, omega: float) -> float:
    """``F_d(u) = sum (2 omega u_k + 1/2 (D+ u_k)^2) dx``."""
    _check_omega(omega)
    return 2 * omega * float(np.sum(grid.check(u))) * grid.dx + hamiltonian(u, grid)


def linf_bound(h_d: float, omega: float, L: float) -> float:
    """Uniform bound ``L sqrt(|4 omega h_d|) + |h_d|`` on every iterate with mean ``h_d``."""
    return L * math.sqrt(abs(4 * omega * h_d)) + abs(h_d)


@dataclass(frozen=True)
class InvariantReport:
    hd: float
    fd: float
    mean: float
    sup_u: float
    sup_ux: float
    sup_uxx: float
    linf_bound: float


def report(u, grid: Grid, omega: float) -> InvariantReport:
    u = grid.check(u)
    h = mean(u, grid)
    return InvariantReport(
        hd=hamiltonian(u, grid),
        fd=constraint_functional(u, grid, omega),
        mean=h,
        sup_u=float(np.max(np.abs(u))),
        sup_ux=float(np.max(np.abs(dfwd(u, grid)))),
        sup_uxx=float(np.max(np.abs(d2(u, grid)))),
        linf_bound=linf_bound(h, omega, grid.L),
    )
