"""Conservative one-step method for the periodic modified Hunter-Saxton equation.

The scheme

    D2 (u^{m+1} - u^m)/dt = A_d(u^{m+1/2}) u^{m+1/2},   F_d(u^{m+1}) = F_d(u^0),
    A_d(v) = (omega - D2 v) D1 + D1 (omega - D2 v)

is advanced in the derivative variable ``v = D- u``.  Because the mean of
``u`` is an invariant, ``u = pinv(D-) v + h_d`` with ``h_d`` fixed by the
initial data, and each step reduces to the fixed point ``w* = phi_v(w*)``
with ``v^{m+1} = 2 w* - v^m``.  ``w*`` is the midpoint value of ``v``.

Step sizes below ``min(eps1(p, r), eps2(p, r))`` with ``r = |v^0|`` make
``phi_v`` a contraction of the ball of radius ``p r``, so plain fixed-point
iteration converges.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .grid_ops import Grid, kato_constant
from .spectral import OperatorBank

log = logging.getLogger(__name__)

MAX_HALVINGS = 5


class NoConvergence(RuntimeError):
    """Fixed-point iteration did not reach the tolerance within the iteration budget."""


class Diverged(FloatingPointError):
    """A non-finite value appeared while solving a step."""


@dataclass(frozen=True)
class FixedDt:
    dt: float


@dataclass(frozen=True)
class AutoEpsilon:
    """``dt = safety * min(eps1, eps2)``; with ``optimize_p`` the ball factor solves ``eps1 = eps2``."""

    safety: float = 0.99
    optimize_p: bool = False


@dataclass(frozen=True)
class Adaptive:
    """``dt_{m+1} = min(dt_m, alpha / |D2 u^m|_inf)`` with ``alpha = factor * dt0 * |D2 u^0|_inf``."""

    dt0: float = 1e-4
    factor: float = 1.5


@dataclass(frozen=True)
class SchemeConfig:
    omega: float = 0.5
    fp_tol: float = 1e-13
    fp_max_iter: int = 200
    p: float = 2.0
    dt_policy: FixedDt | AutoEpsilon | Adaptive = field(default_factory=AutoEpsilon)

    def __post_init__(self):
        if self.omega == 0 or not math.isfinite(self.omega):
            raise ValueError("omega must be nonzero")
        if not self.p > 1:
            raise ValueError("ball factor p must exceed 1")
        if not self.fp_tol > 0:
            raise ValueError("fp_tol must be positive")
        if self.fp_max_iter < 1:
            raise ValueError("fp_max_iter must be at least 1")


@dataclass(frozen=True)
class SchemeState:
    m: int
    t: float
    v: np.ndarray
    h_d: float
    last_dt: float = 0.0
    last_fp_iters: int = 0


@dataclass(frozen=True)
class StepSizePlan:
    p: float
    r: float
    eps1: float
    eps2: float
    dt: float


# -- small stencil helpers (no validation: inner-loop use) --------------------

def _fwd(v, dx):
    return (np.roll(v, -1) - v) / dx


def _bwd(v, dx):
    return (v - np.roll(v, 1)) / dx


def _cen(v, dx):
    return (np.roll(v, -1) - np.roll(v, 1)) / (2 * dx)


def _sec(v, dx):
    return (np.roll(v, -1) - 2 * v + np.roll(v, 1)) / dx**2


def _avg_bwd(v):
    return (v + np.roll(v, 1)) / 2


def _l2(v, dx):
    return math.sqrt(float(np.dot(v, v)) * dx)


# -- state conversions ---------------------------------------------------------

def initial_state(u0, grid: Grid) -> SchemeState:
    u0 = grid.check(u0)
    return SchemeState(m=0, t=0.0, v=_bwd(u0, grid.dx), h_d=float(np.mean(u0)))


def recover_u(bank: OperatorBank, state: SchemeState) -> np.ndarray:
    """``u = pinv(D-) v + h_d``."""
    return bank.apply("pinv_bwd", state.v) + state.h_d


# -- operators of the scheme -----------------------------------------------------

def apply_Ad(bank: OperatorBank, v, w, omega: float) -> np.ndarray:
    """``(omega - D2 v) * D1 w + D1((omega - D2 v) * w)``; skew-adjoint in ``w``."""
    dx = bank.grid.dx
    a = omega - _sec(np.asarray(v, dtype=float), dx)
    w = np.asarray(w, dtype=float)
    return a * _cen(w, dx) + _cen(a * w, dx)


def psi(bank: OperatorBank, w, h_d: float) -> np.ndarray:
    """``w^2 + 2 M-((pinv(D-) w + h_d) * D+ w)``."""
    w = np.asarray(w, dtype=float)
    q = (bank.apply("pinv_bwd", w) + h_d) * _fwd(w, bank.grid.dx)
    return w * w + 2 * _avg_bwd(q)


def phi(bank: OperatorBank, v, w, dt: float, omega: float, h_d: float) -> np.ndarray:
    """Fixed-point map ``v + omega dt pinv(D+) M+ w - dt/4 P psi(w)``."""
    v = np.asarray(v, dtype=float)
    return (
        v
        + omega * dt * bank.apply(("pinv_fwd", "avg_fwd"), w)
        - dt / 4 * bank.apply("proj", psi(bank, w, h_d))
    )


class _PhiMap:
    """phi with the half-spectrum symbols hoisted; two rfft and two irfft per call."""

    def __init__(self, bank, v, dt, omega, h_d):
        K = bank.grid.K
        n = K // 2 + 1
        self.K, self.dx, self.v, self.h_d = K, bank.grid.dx, v, h_d
        self.pinv_bwd = bank.symbol("pinv_bwd")[:n]
        self.lin = omega * dt * bank.symbol("pinv_fwd", "avg_fwd")[:n]
        self.nonlin = -dt / 4 * bank.symbol("proj")[:n]

    def __call__(self, w):
        W = np.fft.rfft(w)
        u = np.fft.irfft(self.pinv_bwd * W, n=self.K) + self.h_d
        q = u * _fwd(w, self.dx)
        psi_w = w * w + 2 * _avg_bwd(q)
        return self.v + np.fft.irfft(self.lin * W + self.nonlin * np.fft.rfft(psi_w), n=self.K)


def _iterate(func, x0, tol, max_iter, dx, history=None):
    """Picard iteration ``x <- func(x)`` with relative change test; returns ``(x, iters)``."""
    x = x0
    for it in range(1, max_iter + 1):
        x_new = func(x)
        if not np.all(np.isfinite(x_new)):
            raise Diverged(f"non-finite iterate after {it} fixed-point iterations")
        change = _l2(x_new - x, dx)
        if history is not None:
            history.append(change)
        if change <= tol * max(1.0, _l2(x, dx)):
            return x_new, it
        x = x_new
    raise NoConvergence(f"fixed-point change {change:.3e} after {max_iter} iterations")


def fixed_point_solve(bank: OperatorBank, v, dt: float, omega: float, h_d: float,
                      cfg: SchemeConfig, history=None):
    """Solve ``w = phi_v(w)`` starting from ``w = v``.

    Returns ``(w_star, iters)``.  Raises :class:`NoConvergence` when the
    budget ``cfg.fp_max_iter`` is exhausted and :class:`Diverged` on
    non-finite iterates.  ``history``, if a list, receives the successive
    L2 changes.
    """
    v = np.asarray(v, dtype=float)
    return _iterate(_PhiMap(bank, v, dt, omega, h_d), v, cfg.fp_tol, cfg.fp_max_iter,
                    bank.grid.dx, history)


# -- step-size planning -------------------------------------------------------------

def epsilon1(p: float, r: float, grid: Grid, omega: float, h_d: float) -> float:
    """Largest dt for which phi maps the ball of radius ``p r`` into itself."""
    if not p > 1:
        raise ValueError("p must exceed 1")
    dx, C = grid.dx, kato_constant(grid.L)
    denom = abs(omega) * grid.L * dx + p * r * math.sqrt(dx) + 4 * abs(h_d) + 4 * C * p * r
    return 4 * (p - 1) * dx / (p * denom)


def epsilon2(p: float, r: float, grid: Grid, omega: float, h_d: float) -> float:
    """dt below which phi is a contraction on the ball of radius ``p r``."""
    if not p > 1:
        raise ValueError("p must exceed 1")
    dx, C = grid.dx, kato_constant(grid.L)
    denom = abs(omega) * grid.L * dx + 2 * p * r * math.sqrt(dx) + 4 * abs(h_d) + 8 * C * p * r
    return 4 * dx / denom


def balanced_p(r: float, grid: Grid, omega: float, h_d: float, p_max: float = 100.0) -> float:
    """Root of ``eps1(p) = eps2(p)`` on ``(1, p_max]``, maximising ``min(eps1, eps2)``."""
    def gap(p):
        return epsilon1(p, r, grid, omega, h_d) - epsilon2(p, r, grid, omega, h_d)

    lo = 1 + 1e-12
    if gap(p_max) <= 0:
        return p_max
    return brentq(gap, lo, p_max, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def plan_dt(cfg: SchemeConfig, grid: Grid, v0, h_d: float) -> StepSizePlan:
    """Step size from the unique-solvability thresholds evaluated on the initial data."""
    r = _l2(np.asarray(v0, dtype=float), grid.dx)
    policy = cfg.dt_policy
    p = cfg.p
    if isinstance(policy, AutoEpsilon) and policy.optimize_p and r > 0:
        p = balanced_p(r, grid, cfg.omega, h_d)
    e1 = epsilon1(p, r, grid, cfg.omega, h_d)
    e2 = epsilon2(p, r, grid, cfg.omega, h_d)
    if isinstance(policy, FixedDt):
        dt = policy.dt
    elif isinstance(policy, Adaptive):
        dt = policy.dt0
    else:
        dt = policy.safety * min(e1, e2)
    if not isinstance(policy, AutoEpsilon) and dt >= min(e1, e2):
        log.warning("dt=%.4g is outside the guaranteed regime min(eps1, eps2)=%.4g", dt, min(e1, e2))
    return StepSizePlan(p=p, r=r, eps1=e1, eps2=e2, dt=dt)


def adaptive_dt(sup_uxx: float, dt_prev: float, alpha: float) -> float:
    """``min(dt_prev, alpha / |D2 u|_inf)``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if sup_uxx <= 0:
        return dt_prev
    return min(dt_prev, alpha / sup_uxx)


# -- steppers --------------------------------------------------------------------------

def step_proposed(bank: OperatorBank, state: SchemeState, dt: float, cfg: SchemeConfig,
                  history=None) -> SchemeState:
    w, iters = fixed_point_solve(bank, state.v, dt, cfg.omega, state.h_d, cfg, history)
    return SchemeState(m=state.m + 1, t=state.t + dt, v=2 * w - state.v, h_d=state.h_d,
                       last_dt=dt, last_fp_iters=iters)


def step_with_retry(bank: OperatorBank, state: SchemeState, dt: float, cfg: SchemeConfig,
                    max_halvings: int = MAX_HALVINGS) -> SchemeState:
    """:func:`step_proposed`, halving ``dt`` on :class:`NoConvergence` up to ``max_halvings`` times."""
    for attempt in range(max_halvings + 1):
        try:
            return step_proposed(bank, state, dt, cfg)
        except NoConvergence:
            if attempt == max_halvings:
                raise
            log.info("step %d rejected at dt=%.4g; halving", state.m, dt)
            dt = dt / 2


def step_mcfm(bank: OperatorBank, u, dt: float, cfg: SchemeConfig, history=None):
    """One step of ``(u^{m+1} - u^m)/dt = pinv(D2)(A_d(u^{m+1/2}) u^{m+1/2})``.

    Iterates ``y <- u + dt/2 pinv(D2)(A_d(y) y)`` for the midpoint value
    ``y`` and returns ``(u^{m+1}, iters)``.
    """
    u = np.asarray(u, dtype=float)
    pinv_sec = bank.symbol("pinv_sec")[: bank.grid.K // 2 + 1]

    def midpoint(y):
        return u + dt / 2 * bank.apply(pinv_sec, apply_Ad(bank, y, y, cfg.omega))

    y, iters = _iterate(midpoint, u, cfg.fp_tol, cfg.fp_max_iter, bank.grid.dx, history)
    return 2 * y - u, iters
