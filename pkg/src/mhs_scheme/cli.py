"""Command-line front end: ``mhs {simulate,converge,blowup,verify-operators}``.

Every subcommand accepts ``--config FILE`` (flat ``key = value`` lines
using the long option names) with command-line flags taking precedence.

Exit codes: 0 ok, 1 operator verification failed, 2 configuration error,
3 fixed-point non-convergence, 4 divergence, 5 I/O error.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import csvio
from .experiments import (
    TIMESERIES_COLUMNS,
    blowup_study,
    convergence_study,
    run_simulation,
    sample_initial,
)
from .grid_ops import Grid, GridError
from .scheme import Adaptive, AutoEpsilon, FixedDt, SchemeConfig
from .spectral import OPERATORS, build_bank
from .verification import verify_operators

log = logging.getLogger("mhs_scheme")

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_NO_CONVERGENCE, EXIT_DIVERGED, EXIT_IO = 0, 1, 2, 3, 4, 5
DEFAULT_LADDER = "32:100,64:200,128:400,256:800,512:1600,1024:3200"


class ConfigError(ValueError):
    pass


def _common(p):
    p.add_argument("--config", type=Path, help="key = value file; flags override it")
    p.add_argument("--omega", type=float, default=0.5)
    p.add_argument("--length", type=float, default=1.0, help="domain length L")
    p.add_argument("--fp-tol", type=float, default=1e-13)
    p.add_argument("--fp-max-iter", type=int, default=200)
    p.add_argument("--p", type=float, default=2.0, help="ball factor p > 1 for the step-size thresholds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=Path("out"))
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mhs", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    parser.subcommands = sub.choices

    p = sub.add_parser("simulate", help="run the scheme and write timeseries.csv and snapshots")
    _common(p)
    p.add_argument("--K", type=int, default=128)
    p.add_argument("--a", type=float, default=0.01, help="amplitude of the sine initial data")
    p.add_argument("--u0", type=Path, help="initial data file (one value per line, or CSV with a 'u' column)")
    p.add_argument("--dt-policy", choices=["fixed", "auto", "adaptive"], default="auto")
    p.add_argument("--dt", type=float, help="step size (fixed) or initial step (adaptive)")
    p.add_argument("--factor", type=float, default=1.5, help="adaptive: alpha = factor * dt0 * |D2 u0|")
    p.add_argument("--steps", type=int)
    p.add_argument("--t-end", type=float)
    p.add_argument("--snapshot-every", type=int, default=800)

    p = sub.add_parser("converge", help="grid-refinement study against a fine reference run")
    _common(p)
    p.add_argument("--a", type=float, default=0.01)
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--ladder", default=DEFAULT_LADDER, help="comma-separated K:M pairs")
    p.add_argument("--reference", default="2048:6400", help="K:M of the reference run")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("blowup", help="adaptive run with blow-up time extrapolation")
    _common(p)
    p.add_argument("--K", type=int, default=2048)
    p.add_argument("--a", type=float, default=0.1)
    p.add_argument("--dt", type=float, default=1e-4, help="initial step dt0")
    p.add_argument("--factor", type=float, default=1.5)
    p.add_argument("--steps", type=int, default=80000)
    p.add_argument("--window", type=float, default=2 / 3)
    p.add_argument("--snapshot-every", type=int, default=8000)

    p = sub.add_parser("verify-operators", help="spectral vs dense oracle gate and inequality suite")
    _common(p)
    p.add_argument("--K", type=int, default=16)
    p.add_argument("--n-random", type=int, default=1000)
    p.add_argument("--corrupt", choices=OPERATORS, help="test hook: perturb one symbol before checking")
    return parser


def _config_defaults(sub: argparse.ArgumentParser, path: Path) -> dict:
    """Convert a config file into typed defaults for subparser ``sub``."""
    try:
        values = csvio.read_config(path)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    actions = {a.dest: a for a in sub._actions}
    out = {}
    for key, raw in values.items():
        action = actions.get(key)
        if action is None or key in ("help", "config"):
            raise ConfigError(f"{path}: unknown key {key!r}")
        try:
            value = action.type(raw) if action.type else raw
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{path}: bad value for {key}: {raw!r}") from exc
        if action.choices and value not in action.choices:
            raise ConfigError(f"{path}: {key} must be one of {sorted(action.choices)}")
        out[key] = value
    return out


def _scheme_config(args, policy) -> SchemeConfig:
    try:
        return SchemeConfig(omega=args.omega, fp_tol=args.fp_tol, fp_max_iter=args.fp_max_iter,
                            p=args.p, dt_policy=policy)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _grid(L, K) -> Grid:
    try:
        return Grid(L, K)
    except GridError as exc:
        raise ConfigError(str(exc)) from exc


def _pairs(text):
    try:
        return [tuple(int(x) for x in item.split(":")) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected K:M pairs, got {text!r}") from exc


def _read_u0(path: Path, grid: Grid) -> np.ndarray:
    text = path.read_text().strip().splitlines()
    if text and "," in text[0]:
        header, rows = csvio.read_csv(path)
        if "u" not in header:
            raise ConfigError(f"{path}: CSV initial data needs a 'u' column")
        u = np.array([r[header.index("u")] for r in rows], dtype=float)
    else:
        u = np.array([float(s) for s in text if s.strip()])
    try:
        return grid.check(u)
    except GridError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _write_snapshots(out: Path, grid: Grid, snapshots):
    for i, (m, t, u) in enumerate(snapshots):
        csvio.write_csv(out / f"snapshot_{i:04d}_m{m}.csv", csvio.SNAPSHOT_COLUMNS, zip(grid.x, u))


def _status_code(status: str) -> int:
    return {"ok": EXIT_OK, "diverged": EXIT_DIVERGED, "no_convergence": EXIT_NO_CONVERGENCE}[status]


def cmd_simulate(args) -> int:
    grid = _grid(args.length, args.K)
    if args.steps is None and args.t_end is None:
        raise ConfigError("simulate needs --steps or --t-end")
    if args.steps is not None and args.steps < 1:
        raise ConfigError("--steps must be positive")
    if args.dt_policy == "fixed":
        if args.dt is None or not args.dt > 0:
            raise ConfigError("--dt-policy fixed needs a positive --dt")
        policy = FixedDt(args.dt)
    elif args.dt_policy == "adaptive":
        policy = Adaptive(args.dt if args.dt is not None else 1e-4, args.factor)
    else:
        policy = AutoEpsilon()
    cfg = _scheme_config(args, policy)
    u0 = _read_u0(args.u0, grid) if args.u0 else sample_initial(args.a, grid)
    rec = run_simulation(cfg, grid, u0, n_steps=args.steps, t_end=args.t_end,
                         snapshot_every=args.snapshot_every)
    args.out.mkdir(parents=True, exist_ok=True)
    csvio.write_csv(args.out / "timeseries.csv", TIMESERIES_COLUMNS, rec.rows)
    _write_snapshots(args.out, grid, rec.snapshots)
    print(f"{len(rec.rows) - 1} steps, t = {rec.t_final:.6g}, status {rec.status}")
    return _status_code(rec.status)


def cmd_converge(args) -> int:
    ladder = _pairs(args.ladder)
    ref = _pairs(args.reference)
    if len(ref) != 1 or len(ladder) < 1:
        raise ConfigError("need one --reference K:M and at least one ladder entry")
    for K, M in ladder + ref:
        _grid(args.length, K)
        if M < 1:
            raise ConfigError(f"M must be positive, got {M}")
    cfg = _scheme_config(args, AutoEpsilon())
    try:
        rows, _ = convergence_study(args.a, ladder, ref[0], args.t_end, cfg, L=args.length, jobs=args.jobs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    args.out.mkdir(parents=True, exist_ok=True)
    csvio.write_csv(args.out / "convergence.csv", csvio.CONVERGENCE_COLUMNS,
                    [(r.K, r.M, r.dx, r.dt, r.linf_error, r.observed_order) for r in rows])
    K_ref, M_ref = ref[0]
    csvio.write_csv(args.out / "reference.csv", ("K", "M", "dx", "dt", "t_end"),
                    [(K_ref, M_ref, args.length / K_ref, args.t_end / M_ref, args.t_end)])
    for r in rows:
        print(f"K={r.K:5d} M={r.M:5d} error={r.linf_error:.4e} order={r.observed_order:.3f}")
    return EXIT_OK


def cmd_blowup(args) -> int:
    if args.steps < 1:
        raise ConfigError("--steps must be positive")
    _grid(args.length, args.K)
    if not args.dt > 0:
        raise ConfigError("--dt must be positive")
    cfg = _scheme_config(args, Adaptive(args.dt, args.factor))
    rec, fit_ux, fit_uxx = blowup_study(args.a, args.K, args.dt, args.factor, args.steps, cfg,
                                        L=args.length, window=args.window,
                                        snapshot_every=args.snapshot_every)
    args.out.mkdir(parents=True, exist_ok=True)
    csvio.write_csv(args.out / "norms.csv", TIMESERIES_COLUMNS, rec.rows)
    csvio.write_csv(args.out / "fits.csv", csvio.FITS_COLUMNS, [
        (q, f.slope, f.intercept, f.r_squared, f.estimated_root, f.window)
        for q, f in (("inv_sup_ux", fit_ux), ("inv_sqrt_sup_uxx", fit_uxx))
    ])
    _write_snapshots(args.out, rec.grid, rec.snapshots)
    print(f"t = {rec.t_final:.6g}  T2 = {fit_ux.estimated_root:.4f} (R2 {fit_ux.r_squared:.5f})  "
          f"Tinf = {fit_uxx.estimated_root:.4f} (R2 {fit_uxx.r_squared:.5f})")
    return _status_code(rec.status)


def cmd_verify_operators(args) -> int:
    if args.K > 64:
        raise ConfigError("verify-operators needs K <= 64")
    grid = _grid(args.length, args.K)
    bank = build_bank(grid)
    if args.corrupt:
        sym = dict(bank.symbols)
        bad = sym[args.corrupt].copy()
        bad[1 % grid.K] += 1e-3 * (1 + abs(bad).max())
        sym[args.corrupt] = bad
        bank = replace(bank, symbols=sym, _half={})
    log.info("seed %d", args.seed)
    checks = verify_operators(args.K, args.length, args.seed, args.n_random, bank)
    width = max(len(c.name) for c in checks)
    for c in checks:
        print(f"{c.name:<{width}}  {c.value:.3e}  (limit {c.limit:.1e})  {'PASS' if c.passed else 'FAIL'}")
    failed = [c for c in checks if not c.passed]
    if failed:
        print(f"FAILED: {failed[0].name}", file=sys.stderr)
        return EXIT_CHECK
    print(f"all {len(checks)} checks passed (seed {args.seed})")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "converge": cmd_converge,
    "blowup": cmd_blowup,
    "verify-operators": cmd_verify_operators,
}


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.config:
            sub = parser.subcommands[args.command]
            sub.set_defaults(**_config_defaults(sub, args.config))
            args = parser.parse_args(argv)
        if args.fp_max_iter < 1 or not math.isfinite(args.omega) or args.omega == 0:
            raise ConfigError("omega must be nonzero and fp-max-iter positive")
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
