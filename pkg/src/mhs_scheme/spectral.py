"""Fourier symbols of the periodic difference/average operators and their pseudo-inverses.

All operators in :mod:`mhs_scheme.grid_ops` are circulant, so the length-K
DFT diagonalises them.  With numpy's convention ``V_j = sum_k v_k
exp(-2 pi i j k / K)`` the shift ``v_k -> v_{k+1}`` has symbol
``exp(2 pi i j / K)`` and every symbol below follows from that.

Pseudo-inverse symbols reciprocate the non-zero modes.  The zero modes are
fixed by index (DC for every difference operator, plus ``j = K/2`` for the
central difference and the averages when ``K`` is even) instead of by a
magnitude threshold, which would misclassify the smallest genuine modes on
fine grids.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .grid_ops import Grid, GridError

DIFFERENCES = ("fwd", "bwd", "cen", "sec")
AVERAGES = ("avg_fwd", "avg_bwd")
PSEUDO_INVERSES = {"pinv_fwd": "fwd", "pinv_bwd": "bwd", "pinv_cen": "cen", "pinv_sec": "sec"}
OPERATORS = DIFFERENCES + AVERAGES + tuple(PSEUDO_INVERSES) + ("proj",)

# (A v)_k = sum(coeff * v_{k + offset}), coefficients in units of dx**-power
STENCILS = {
    "fwd": ({1: 1.0, 0: -1.0}, 1),
    "bwd": ({0: 1.0, -1: -1.0}, 1),
    "cen": ({1: 0.5, -1: -0.5}, 1),
    "sec": ({1: 1.0, 0: -2.0, -1: 1.0}, 2),
    "avg_fwd": ({1: 0.5, 0: 0.5}, 0),
    "avg_bwd": ({0: 0.5, -1: 0.5}, 0),
}

DENSE_MAX_K = 64


class SymbolError(RuntimeError):
    """A spectral application left an imaginary residue, i.e. the symbol is not that of a real operator."""


def zero_modes(name: str, K: int) -> list[int]:
    """Analytically known kernel modes of operator ``name`` on a K-point grid."""
    base = PSEUDO_INVERSES.get(name, name)
    even = K % 2 == 0
    if base in ("fwd", "bwd", "sec", "proj"):
        return [0]
    if base == "cen":
        return [0, K // 2] if even else [0]
    if base in AVERAGES:
        return [K // 2] if even else []
    raise KeyError(name)


def _raw_symbols(grid: Grid) -> dict[str, np.ndarray]:
    K, dx = grid.K, grid.dx
    j = np.arange(K)
    theta = 2 * np.pi * j / K
    shift = np.exp(1j * theta)
    half = 2 * np.sin(np.pi * j / K)
    sym = {
        # (e^{i theta} - 1) = 2i sin(theta/2) e^{i theta/2}
        "fwd": 1j * half * np.exp(0.5j * theta) / dx,
        "bwd": 1j * half * np.exp(-0.5j * theta) / dx,
        "cen": 1j * np.sin(theta) / dx,
        "sec": -(half / dx) ** 2 + 0j,
        "avg_fwd": (shift + 1) / 2,
        "avg_bwd": (1 + np.conj(shift)) / 2,
        "proj": np.ones(K, dtype=complex),
    }
    for name, s in sym.items():
        s[zero_modes(name, K)] = 0.0
    for name, base in PSEUDO_INVERSES.items():
        s = np.zeros(K, dtype=complex)
        nz = np.ones(K, dtype=bool)
        nz[zero_modes(base, K)] = False
        s[nz] = 1 / sym[base][nz]
        sym[name] = s
    return sym


@dataclass(frozen=True)
class OperatorBank:
    """Precomputed Fourier symbols for one grid.  Immutable; safe to share."""

    grid: Grid
    symbols: dict[str, np.ndarray]
    _half: dict[str, np.ndarray] = field(repr=False, compare=False, default_factory=dict)

    def symbol(self, *names: str) -> np.ndarray:
        """Symbol of the composition ``names[0] o names[1] o ...``."""
        out = np.ones(self.grid.K, dtype=complex)
        for n in names:
            out = out * self.symbols[n]
        return out

    def apply(self, which, v: np.ndarray) -> np.ndarray:
        """Fast real-to-real application through ``rfft``; ``which`` is a name, tuple of names, or half-spectrum array."""
        if isinstance(which, np.ndarray):
            half = which
        else:
            key = which if isinstance(which, tuple) else (which,)
            half = self._half.get(key)
            if half is None:
                half = self.symbol(*key)[: self.grid.K // 2 + 1]
                self._half[key] = half
        return np.fft.irfft(half * np.fft.rfft(v), n=self.grid.K)


def build_bank(grid: Grid) -> OperatorBank:
    if grid.K < 2:
        raise GridError("K must be >= 2")
    return OperatorBank(grid, _raw_symbols(grid))


def apply_symbol(bank: OperatorBank, which: str, v, rtol: float = 1e-11) -> np.ndarray:
    """Checked full-spectrum application; raises :class:`SymbolError` on an imaginary residue."""
    v = bank.grid.check(v)
    out = np.fft.ifft(bank.symbols[which] * np.fft.fft(v))
    residue = np.sqrt(np.sum(out.imag**2) * bank.grid.dx)
    scale = np.sqrt(np.sum(v**2) * bank.grid.dx)
    if residue > rtol * max(scale, np.finfo(float).tiny):
        raise SymbolError(f"symbol {which!r} left imaginary residue {residue:.3e}")
    return out.real


def dense_operator(which: str, grid: Grid) -> np.ndarray:
    """Explicit circulant matrix of a difference/average operator or the projector."""
    K = grid.K
    if which == "proj":
        return np.eye(K) - np.full((K, K), 1.0 / K)
    stencil, power = STENCILS[which]
    col = np.zeros(K)
    for offset, coeff in stencil.items():
        # A[k, k+offset] = coeff  ->  first column entry at (-offset) mod K
        col[(-offset) % K] += coeff
    return scipy.linalg.circulant(col) / grid.dx**power


def dense_pinv_oracle(which: str, grid: Grid, rcond: float = 1e-10) -> np.ndarray:
    """Moore-Penrose inverse of the dense operator by SVD (validation only, K <= 64)."""
    if grid.K > DENSE_MAX_K:
        raise GridError(f"dense oracle limited to K <= {DENSE_MAX_K}, got {grid.K}")
    base = PSEUDO_INVERSES.get(which, which)
    return np.linalg.pinv(dense_operator(base, grid), rcond=rcond)


def dense_oracle(which: str, grid: Grid) -> np.ndarray:
    """Dense counterpart of any name in :data:`OPERATORS`."""
    if which in PSEUDO_INVERSES:
        return dense_pinv_oracle(which, grid)
    if grid.K > DENSE_MAX_K:
        raise GridError(f"dense oracle limited to K <= {DENSE_MAX_K}, got {grid.K}")
    return dense_operator(which, grid)


def pinv_norm_bound_check(bank: OperatorBank) -> float:
    """Operator 2-norm of pinv(forward difference); equals ``dx / (2 sin(pi/K))`` and never exceeds ``L/4``."""
    return float(np.max(np.abs(bank.symbols["pinv_fwd"])))
