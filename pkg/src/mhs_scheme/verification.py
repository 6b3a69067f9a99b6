"""Executable checks of the operator algebra and the discrete inequalities.

Each check returns a :class:`Check` holding the worst observed value of a
normalised quantity and whether it stays within its limit.  The oracle
checks compare FFT-applied symbols with dense circulant matrices and are
limited to small grids; the inequality checks run at any size.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import grid_ops as go
from .grid_ops import Grid
from .spectral import (
    DENSE_MAX_K,
    OPERATORS,
    OperatorBank,
    SymbolError,
    apply_symbol,
    build_bank,
    dense_oracle,
    pinv_norm_bound_check,
)

ORACLE_RTOL = 1e-11
IDENTITY_RTOL = 1e-13
INEQUALITY_SLACK = 1e-12


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    limit: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.limit)


def check_oracle(bank: OperatorBank) -> list[Check]:
    """Spectral application of every operator vs the dense matrix, on all basis vectors."""
    grid = bank.grid
    eye = np.eye(grid.K)
    out = []
    for name in OPERATORS:
        dense = dense_oracle(name, grid)
        try:
            spectral = np.column_stack([apply_symbol(bank, name, e) for e in eye])
            dev = np.max(np.abs(spectral - dense)) / max(1.0, np.max(np.abs(dense)))
        except SymbolError:
            dev = math.inf
        out.append(Check(f"oracle[{name}] K={grid.K} L={grid.L:g}", float(dev), ORACLE_RTOL))
    return out


def check_pinv_identities(bank: OperatorBank) -> list[Check]:
    """``A pinv(A) = pinv(A) A = P`` as dense matrices built from the symbols."""
    grid = bank.grid
    eye = np.eye(grid.K)
    P = dense_oracle("proj", grid)

    def mat(name):
        return np.column_stack([bank.apply(name, e) for e in eye])

    out = []
    for base in ("fwd", "bwd", "sec"):
        A, Ai = mat(base), mat("pinv_" + base)
        dev = max(np.max(np.abs(A @ Ai - P)), np.max(np.abs(Ai @ A - P)))
        out.append(Check(f"pinv[{base}] projector K={grid.K}", float(dev), ORACLE_RTOL))
    return out


def check_pinv_norm(Ks=range(2, 65), L: float = 1.0) -> list[Check]:
    """``|pinv(D+)|_2 = dx / (2 sin(pi/K)) <= L/4``; the value checked is the excess over both."""
    out = []
    for K in Ks:
        grid = Grid(L, K)
        val = pinv_norm_bound_check(build_bank(grid))
        exact = grid.dx / (2 * math.sin(math.pi / K))
        dev = max(abs(val - exact), val - L / 4)
        out.append(Check(f"pinv norm K={K}", float(dev), 1e-12))
    return out


def random_inputs(grid: Grid, rng: np.random.Generator, n: int):
    """Mix of Gaussian noise, single Fourier modes and smooth bumps, randomly scaled and shifted."""
    x = grid.x / grid.L
    for i in range(n):
        kind = i % 3
        if kind == 0:
            v = rng.standard_normal(grid.K)
        elif kind == 1:
            j = rng.integers(0, grid.K // 2 + 1)
            v = np.cos(2 * np.pi * j * x + rng.uniform(0, 2 * np.pi))
        else:
            c = rng.uniform()
            v = np.exp(-((np.mod(x - c + 0.5, 1) - 0.5) ** 2) / rng.uniform(1e-3, 0.1))
        yield 10.0 ** rng.uniform(-3, 3) * v + rng.normal() * rng.uniform(0, 2)


def check_inequalities(grid: Grid, rng: np.random.Generator, n: int = 1000,
                       bank: OperatorBank | None = None) -> list[Check]:
    """Worst ratio lhs/rhs of each discrete inequality over ``n`` random pairs (limit 1)."""
    bank = bank or build_bank(grid)
    dx, L = grid.dx, grid.L
    Lhat = go.sobolev_constant(L)
    C = go.kato_constant(L)
    nrm = lambda v: go.norm(v, grid)  # noqa: E731
    worst = {}

    def rec(name, lhs, rhs, ref=0.0):
        # ref: input magnitude; lhs below 1e-13 * ref is roundoff (e.g. constant v)
        lhs = max(0.0, lhs - 1e-13 * ref)
        r = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
        worst[name] = max(worst.get(name, 0.0), r)

    vs = list(random_inputs(grid, rng, n))
    ws = list(random_inputs(grid, rng, n))
    for v, w in zip(vs, ws):
        rec("hadamard |v*w| <= |v||w|/sqrt(dx)", nrm(v * w), nrm(v) * nrm(w) / math.sqrt(dx))
        rec("average |M+-v| <= |v|", max(nrm(go.afwd(v, grid)), nrm(go.abwd(v, grid))), nrm(v))
        rec("difference |D+-v| <= 2|v|/dx", max(nrm(go.dfwd(v, grid)), nrm(go.dbwd(v, grid))), 2 * nrm(v) / dx)
        rec("projector |Pv| <= |v|", nrm(bank.apply("proj", v)), nrm(v))
        rec("pinv |pinv(D+-)v| <= L|v|/4",
            max(nrm(bank.apply("pinv_fwd", v)), nrm(bank.apply("pinv_bwd", v))), L / 4 * nrm(v))
        rec("Poincare-Wirtinger |v-mean|_inf <= sqrt(L)|D+v|",
            go.norm(v - go.mean(v, grid), grid, np.inf), math.sqrt(L) * nrm(go.dfwd(v, grid)),
            go.norm(v, grid, np.inf))
        rec("Sobolev |v|_inf <= Lhat |v|_H1", go.norm(v, grid, np.inf), Lhat * go.h1_norm(v, grid))
        rec("product |v*w| <= Lhat |v|_H1 |w|", nrm(v * w), Lhat * go.h1_norm(v, grid) * nrm(w))
        rec("Kato |pinv(D-)v * w| <= C|v||w|", nrm(bank.apply("pinv_bwd", v) * w), C * nrm(v) * nrm(w))
    return [Check(f"{name} K={grid.K}", r, 1 + INEQUALITY_SLACK) for name, r in worst.items()]


def check_identities(grid: Grid, rng: np.random.Generator, n: int = 100) -> list[Check]:
    """Product rule, summation by parts, symmetry and operator compositions (relative to input size)."""
    worst = {}

    def rec(name, dev, scale):
        worst[name] = max(worst.get(name, 0.0), dev / scale if scale > 0 else dev)

    for _ in range(n):
        v, w = rng.standard_normal(grid.K), rng.standard_normal(grid.K)
        sv, sw = go.norm(v, grid), go.norm(w, grid)
        inf = lambda a: float(np.max(np.abs(a)))  # noqa: E731
        lhs = go.dfwd(v * w, grid)
        rhs = go.afwd(v, grid) * go.dfwd(w, grid) + go.dfwd(v, grid) * go.afwd(w, grid)
        rec("product rule", inf(lhs - rhs), inf(v) * inf(w) / grid.dx)
        rec("summation by parts",
            abs(go.inner(go.dfwd(v, grid), w, grid) + go.inner(v, go.dbwd(w, grid), grid)), sv * sw / grid.dx)
        rec("central skew-symmetry",
            abs(go.inner(go.dcen(v, grid), w, grid) + go.inner(v, go.dcen(w, grid), grid)), sv * sw / grid.dx)
        rec("second difference symmetry",
            abs(go.inner(go.d2(v, grid), w, grid) - go.inner(v, go.d2(w, grid), grid)), sv * sw / grid.dx**2)
        rec("D2 = D+ D-", inf(go.d2(v, grid) - go.dfwd(go.dbwd(v, grid), grid)), inf(v) / grid.dx**2)
        rec("D1 = D+ M-", inf(go.dcen(v, grid) - go.dfwd(go.abwd(v, grid), grid)), inf(v) / grid.dx)
        rec("D1 = D- M+", inf(go.dcen(v, grid) - go.dbwd(go.afwd(v, grid), grid)), inf(v) / grid.dx)
    return [Check(f"{name} K={grid.K}", r, IDENTITY_RTOL) for name, r in worst.items()]


def verify_operators(K: int = 16, L: float = 1.0, seed: int = 0, n_random: int = 1000,
                     bank: OperatorBank | None = None) -> list[Check]:
    """Full operator gate on one grid: oracle, projector identities, norm table, inequalities, identities."""
    grid = Grid(L, K)
    if K > DENSE_MAX_K:
        raise ValueError(f"verify-operators runs dense oracles and needs K <= {DENSE_MAX_K}")
    bank = bank or build_bank(grid)
    rng = np.random.default_rng(seed)
    checks = check_oracle(bank) + check_pinv_identities(bank) + check_pinv_norm(L=L)
    checks += check_inequalities(grid, rng, n_random, bank)
    checks += check_identities(grid, rng)
    return checks
