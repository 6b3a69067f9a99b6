"""Simulation driver, grid-refinement study and blow-up time extrapolation."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .grid_ops import Grid
from .invariants import report
from .scheme import (
    Adaptive,
    AutoEpsilon,
    Diverged,
    FixedDt,
    NoConvergence,
    SchemeConfig,
    adaptive_dt,
    initial_state,
    plan_dt,
    recover_u,
    step_with_retry,
)
from .spectral import build_bank

log = logging.getLogger(__name__)

TIMESERIES_COLUMNS = ("m", "t", "dt", "hd", "fd", "mean", "sup_u", "sup_ux", "sup_uxx", "fp_iters")


def sample_initial(a: float, grid: Grid) -> np.ndarray:
    """``a sin(2 pi x / L) - (pi a)^2`` on the grid nodes; the constant makes the continuum constraint vanish for L = 1."""
    return a * np.sin(2 * np.pi * grid.x / grid.L) - (np.pi * a) ** 2


@dataclass
class RunRecord:
    grid: Grid
    rows: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)  # (m, t, u)
    u_final: np.ndarray | None = None
    status: str = "ok"  # "ok", "diverged" or "no_convergence"
    message: str = ""

    def column(self, name: str) -> np.ndarray:
        i = TIMESERIES_COLUMNS.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)

    @property
    def t_final(self) -> float:
        return self.rows[-1][1]


def _row(m, t, dt, u, grid, omega, iters):
    rep = report(u, grid, omega)
    return (m, t, dt, rep.hd, rep.fd, rep.mean, rep.sup_u, rep.sup_ux, rep.sup_uxx, iters)


def run_simulation(cfg: SchemeConfig, grid: Grid, u0, n_steps: int | None = None,
                   t_end: float | None = None, snapshot_every: int = 800, bank=None) -> RunRecord:
    """Advance ``u0`` and record invariants and sup-norms after every step.

    Give ``n_steps``, ``t_end`` or both.  With :class:`FixedDt` and only
    ``t_end`` the run takes ``round(t_end / dt)`` steps; with
    :class:`AutoEpsilon` and ``t_end`` the planned step is shrunk so that
    an integer number of steps lands on ``t_end``.  Adaptive runs stop at
    whichever limit comes first.  Divergence or repeated non-convergence
    ends the run early with ``status`` set; rows up to the failure are kept.
    """
    if n_steps is None and t_end is None:
        raise ValueError("give n_steps or t_end")
    if n_steps is not None and n_steps < 1:
        raise ValueError("n_steps must be positive")
    if t_end is not None and not t_end > 0:
        raise ValueError("t_end must be positive")
    bank = bank or build_bank(grid)
    u0 = grid.check(u0)
    state = initial_state(u0, grid)
    plan = plan_dt(cfg, grid, state.v, state.h_d)
    policy = cfg.dt_policy
    dt = plan.dt
    alpha = None
    if isinstance(policy, Adaptive):
        alpha = policy.factor * policy.dt0 * report(u0, grid, cfg.omega).sup_uxx
        n_max = n_steps if n_steps is not None else math.inf
    else:
        if t_end is not None and n_steps is None:
            n_steps = max(1, round(t_end / dt)) if isinstance(policy, FixedDt) else math.ceil(t_end / dt)
            if isinstance(policy, AutoEpsilon):
                dt = t_end / n_steps
        n_max = n_steps

    rec = RunRecord(grid=grid)
    rec.rows.append(_row(0, 0.0, 0.0, u0, grid, cfg.omega, 0))
    rec.snapshots.append((0, 0.0, u0.copy()))
    u = u0
    while state.m < n_max:
        if t_end is not None and isinstance(policy, Adaptive) and state.t >= t_end:
            break
        try:
            state = step_with_retry(bank, state, dt, cfg)
        except Diverged as exc:
            rec.status, rec.message = "diverged", str(exc)
            break
        except NoConvergence as exc:
            rec.status, rec.message = "no_convergence", str(exc)
            break
        u = recover_u(bank, state)
        row = _row(state.m, state.t, state.last_dt, u, grid, cfg.omega, state.last_fp_iters)
        if not all(math.isfinite(x) for x in row):
            rec.status, rec.message = "diverged", f"non-finite observables at step {state.m}"
            break
        rec.rows.append(row)
        if snapshot_every and state.m % snapshot_every == 0:
            rec.snapshots.append((state.m, state.t, u.copy()))
        dt = state.last_dt
        if alpha is not None:
            dt = adaptive_dt(row[8], dt, alpha)
    rec.u_final = u
    if snapshot_every and rec.snapshots[-1][0] != state.m:
        rec.snapshots.append((state.m, state.t, u.copy()))
    if rec.status != "ok":
        log.warning("run stopped at step %d: %s", state.m, rec.message)
    return rec


# -- grid refinement ----------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceRow:
    K: int
    M: int
    dx: float
    dt: float
    linf_error: float
    observed_order: float  # NaN on the first row


def _final_state(args):
    cfg, L, K, M, T, a = args
    grid = Grid(L, K)
    rec = run_simulation(SchemeConfig(cfg.omega, cfg.fp_tol, cfg.fp_max_iter, cfg.p, FixedDt(T / M)),
                         grid, sample_initial(a, grid), n_steps=M, snapshot_every=0)
    if rec.status != "ok":
        raise RuntimeError(f"run K={K}, M={M} failed: {rec.message}")
    return rec.u_final


def convergence_study(a: float, ladder, reference, T: float, cfg: SchemeConfig | None = None,
                      L: float = 1.0, jobs: int = 1, reference_u=None):
    """L-infinity error of each ``(K, M)`` run at time ``T`` against a fine reference run.

    The reference is restricted to each coarse grid by taking every
    ``K_ref / K``-th node, so every ``K`` must divide ``K_ref``.  Returns
    ``(rows, reference_u)``.
    """
    cfg = cfg or SchemeConfig()
    K_ref, M_ref = reference
    ladder = sorted((int(K), int(M)) for K, M in ladder)
    for K, M in ladder:
        if K_ref % K:
            raise ValueError(f"K={K} does not divide reference K={K_ref}; grids do not nest")
        if K > K_ref or M > M_ref:
            raise ValueError(f"ladder entry ({K}, {M}) is not coarser than the reference")
    tasks = [(cfg, L, K, M, T, a) for K, M in ladder]
    if reference_u is None:
        tasks.append((cfg, L, K_ref, M_ref, T, a))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            finals = list(pool.map(_final_state, tasks))
    else:
        finals = [_final_state(t) for t in tasks]
    if reference_u is None:
        reference_u = finals.pop()
    rows = []
    for (K, M), u in zip(ladder, finals):
        err = float(np.max(np.abs(u - reference_u[:: K_ref // K])))
        order = math.log2(rows[-1].linf_error / err) if rows and err > 0 else math.nan
        rows.append(ConvergenceRow(K, M, L / K, T / M, err, order))
    return rows, reference_u


# -- blow-up extrapolation ---------------------------------------------------------------

@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r_squared: float
    estimated_root: float  # NaN when the fitted line is too flat to extrapolate
    window: float
    n_points: int


def linear_regression(xs, ys, window: float = 2 / 3, flat_tol: float = 1e-3) -> RegressionFit:
    """Least-squares line through the trailing ``window`` fraction of the samples.

    The root ``-intercept / slope`` is reported as NaN when
    ``|slope| < flat_tol * mean(|y|) / (x span)``, i.e. the data are too flat
    to extrapolate meaningfully.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("xs and ys must be 1-D arrays of equal length")
    if not 0 < window <= 1:
        raise ValueError("window must lie in (0, 1]")
    n = len(xs)
    start = n - int(round(window * n))
    x, y = xs[start:], ys[start:]
    if len(x) < 3:
        raise ValueError("need at least 3 points in the regression window")
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    if sxx == 0:
        raise ValueError("xs have zero variance")
    slope = np.sum((x - xm) * (y - ym)) / sxx
    intercept = ym - slope * xm
    ss_res = np.sum((y - (intercept + slope * x)) ** 2)
    ss_tot = np.sum((y - ym) ** 2)
    r2 = 1.0 if ss_tot == 0 else float(min(1.0, max(0.0, 1 - ss_res / ss_tot)))
    span = x[-1] - x[0]
    flat = abs(slope) < flat_tol * np.mean(np.abs(y)) / abs(span) if span else True
    root = math.nan if flat else float(-intercept / slope)
    return RegressionFit(float(slope), float(intercept), r2, root, window, len(x))


def blowup_study(a: float, K: int, dt0: float = 1e-4, factor: float = 1.5, n_steps: int = 80000,
                 cfg: SchemeConfig | None = None, L: float = 1.0, window: float = 2 / 3,
                 snapshot_every: int = 8000):
    """Adaptive run followed by regressions of ``|D+ u|^-1`` and ``|D2 u|^-1/2`` against time.

    Returns ``(record, fit_ux, fit_uxx)``; the roots of the two fits
    estimate the blow-up times of ``u_x`` and ``u_xx``.
    """
    cfg = cfg or SchemeConfig()
    cfg = SchemeConfig(cfg.omega, cfg.fp_tol, cfg.fp_max_iter, cfg.p, Adaptive(dt0, factor))
    grid = Grid(L, K)
    rec = run_simulation(cfg, grid, sample_initial(a, grid), n_steps=n_steps,
                         snapshot_every=snapshot_every)
    t = rec.column("t")
    fit_ux = linear_regression(t, rec.column("sup_ux") ** -1, window)
    fit_uxx = linear_regression(t, rec.column("sup_uxx") ** -0.5, window)
    return rec, fit_ux, fit_uxx
