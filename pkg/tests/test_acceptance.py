"""Acceptance criteria, each at its stated tolerance.

Every test records a PASS/FAIL line that is printed in the pytest summary.
"""
import math
import time

import numpy as np
import pytest

from mhs_scheme.cli import main
from mhs_scheme.experiments import blowup_study, convergence_study, run_simulation, sample_initial
from mhs_scheme.grid_ops import Grid
from mhs_scheme.invariants import linf_bound
from mhs_scheme.scheme import FixedDt, SchemeConfig, epsilon1, initial_state, recover_u, step_mcfm, step_proposed
from mhs_scheme.spectral import OPERATORS, apply_symbol, build_bank, dense_oracle, pinv_norm_bound_check
from mhs_scheme.verification import check_inequalities

OMEGA = 0.5
LADDER = [(32, 100), (64, 200), (128, 400), (256, 800), (512, 1600), (1024, 3200)]
REFERENCE = (2048, 6400)
BLOWUP_STEPS = 80000  # the 8,000 quoted alongside T ~ 2.054 cannot reach t > 0.8 with dt <= 1e-4
TABLE1 = {128: (3.0467, 2.5323), 2048: (2.7648, 2.4390)}


def test_c1_oracle_equivalence(criterion):
    t0 = time.perf_counter()
    worst = 0.0
    for L in (1.0, 2.5):
        for K in (2, 3, 4, 8, 16, 32, 64):
            g = Grid(L, K)
            bank = build_bank(g)
            for name in OPERATORS:
                D = dense_oracle(name, g)
                S = np.column_stack([apply_symbol(bank, name, e) for e in np.eye(K)])
                worst = max(worst, np.max(np.abs(S - D)) / max(1.0, np.max(np.abs(D))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-11 and elapsed < 10
    criterion("C1 oracle equivalence", ok, f"max rel dev {worst:.2e} (tol 1e-11), {elapsed:.2f}s (< 10s)")
    assert ok


def test_c2_pinv_norm(criterion):
    t0 = time.perf_counter()
    dev, over = 0.0, 0.0
    for K in range(2, 65):
        g = Grid(1.0, K)
        val = pinv_norm_bound_check(build_bank(g))
        dev = max(dev, abs(val - g.dx / (2 * math.sin(math.pi / K))) / val)
        over = max(over, val - g.L / 4)
    at2 = pinv_norm_bound_check(build_bank(Grid(1.0, 2)))
    elapsed = time.perf_counter() - t0
    ok = dev <= 1e-12 and over <= 0 and abs(at2 - 0.25) <= 1e-15 and elapsed < 1
    criterion("C2 pinv norm bound", ok,
              f"max rel dev from dx/(2 sin(pi/K)) {dev:.1e} (tol 1e-12), max excess over L/4 {over:.3f}, "
              f"K=2 value {at2!r}, {elapsed:.2f}s (< 1s)")
    assert ok


def test_c3_inequalities(criterion):
    t0 = time.perf_counter()
    checks = []
    for K in (8, 64, 512):
        checks += check_inequalities(Grid(1.0, K), np.random.default_rng(K), n=1000)
    elapsed = time.perf_counter() - t0
    failed = [c.name for c in checks if not c.passed]
    worst = max(c.value for c in checks)
    ok = not failed and elapsed < 30
    criterion("C3 inequality suite", ok,
              f"{len(checks)} inequality/grid pairs x 1000 inputs, worst lhs/rhs {worst:.4f}, "
              f"failures {failed or 'none'}, {elapsed:.1f}s (< 30s)")
    assert ok


def test_c4_conservation(criterion):
    t0 = time.perf_counter()
    g = Grid(1.0, 128)
    u0 = sample_initial(0.01, g)
    st = initial_state(u0, g)
    r = math.sqrt(float(np.dot(st.v, st.v)) * g.dx)
    dt = epsilon1(2, r, g, OMEGA, st.h_d)
    rec = run_simulation(SchemeConfig(dt_policy=FixedDt(dt)), g, u0, n_steps=1000, snapshot_every=0)
    elapsed = time.perf_counter() - t0
    hd, fd, mean, sup = (rec.column(c) for c in ("hd", "fd", "mean", "sup_u"))
    d_hd = np.max(np.abs(hd - hd[0])) / abs(hd[0])
    d_mean = np.max(np.abs(mean - mean[0])) / abs(mean[0])
    # F_d(u0) ~ -2e-7 is a cancellation of two O(1e-3) terms, so its drift is measured
    # against max(1, |F_d|) and against the size of those terms, not against F_d itself
    abs_fd = np.max(np.abs(fd - fd[0]))
    d_fd = abs_fd / max(1.0, abs(fd[0]))
    d_fd_terms = abs_fd / (abs(2 * OMEGA * mean[0] * g.L) + hd[0])
    bound = linf_bound(st.h_d, OMEGA, g.L)
    ok = (rec.status == "ok" and len(rec.rows) == 1001 and max(d_hd, d_fd, d_fd_terms, d_mean) <= 1e-11
          and np.all(sup <= bound + 1e-10) and elapsed < 30)
    criterion("C4 conservation", ok,
              f"rel drift H_d {d_hd:.1e}, mean {d_mean:.1e}; F_d abs drift {abs_fd:.1e}, "
              f"vs max(1,|F_d|) {d_fd:.1e}, vs term scale {d_fd_terms:.1e}, vs |F_d(u0)| "
              f"{abs_fd / abs(fd[0]):.1e} (tol 1e-11); max|u| {sup.max():.5f} <= bound {bound:.5f}; "
              f"{elapsed:.1f}s (< 30s)")
    assert ok


@pytest.fixture(scope="module")
def ladder_convergence():
    t0 = time.perf_counter()
    rows, _ = convergence_study(0.01, LADDER, REFERENCE, 10.0)
    return rows, time.perf_counter() - t0


def test_c5_convergence_orders(criterion, ladder_convergence):
    rows, elapsed = ladder_convergence
    errs = [r.linf_error for r in rows]
    orders = [r.observed_order for r in rows[1:]]
    monotone = all(b < a for a, b in zip(errs, errs[1:]))
    in_band = all(1.8 <= q <= 2.2 for q in orders)
    ok = monotone and in_band
    criterion("C5 convergence orders", ok,
              f"orders {', '.join(f'{q:.3f}' for q in orders)} (band [1.8, 2.2]), "
              f"errors monotone {monotone}, {elapsed:.1f}s")
    assert monotone
    assert in_band, f"observed orders {orders} leave [1.8, 2.2]"


def test_c5_companion_reference_bias(criterion, ladder_convergence):
    # a second-order error against a reference at K_ref measures c (h^2 - h_ref^2);
    # dividing by (1 - (K/K_ref)^2) removes that bias
    rows, _ = ladder_convergence
    K_ref = REFERENCE[0]
    corrected = [r.linf_error / (1 - (r.K / K_ref) ** 2) for r in rows]
    orders = [math.log2(a / b) for a, b in zip(corrected, corrected[1:])]
    predicted_last = math.log2((16 - 1) / (4 - 1))
    ok = all(1.8 <= q <= 2.2 for q in orders) and abs(rows[-1].observed_order - predicted_last) < 1e-2
    criterion("C5 companion (reference-bias corrected)", ok,
              f"corrected orders {', '.join(f'{q:.3f}' for q in orders)}; raw last order "
              f"{rows[-1].observed_order:.4f} vs predicted log2(5) = {predicted_last:.4f}")
    assert ok


def test_c6_scheme_equivalence(criterion):
    t0 = time.perf_counter()
    g = Grid(1.0, 64)
    bank = build_bank(g)
    cfg = SchemeConfig(fp_tol=1e-14)
    st = initial_state(sample_initial(0.01, g), g)
    r = math.sqrt(float(np.dot(st.v, st.v)) * g.dx)
    dt = 0.99 * epsilon1(2, r, g, OMEGA, st.h_d)
    u = recover_u(bank, st)
    worst = 0.0
    for _ in range(100):
        st = step_proposed(bank, st, dt, cfg)
        u, _ = step_mcfm(bank, u, dt, cfg)
        worst = max(worst, float(np.max(np.abs(recover_u(bank, st) - u))))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 10
    criterion("C6 proposed vs MCFM", ok, f"max sup-norm difference {worst:.1e} (tol 1e-9), {elapsed:.2f}s (< 10s)")
    assert ok


@pytest.fixture(scope="module")
def blowup_fits():
    out = {}
    for K in (128, 256, 512, 1024, 2048):
        rec, fux, fuxx = blowup_study(0.1, K, dt0=1e-4, factor=1.5, n_steps=BLOWUP_STEPS, snapshot_every=0)
        out[K] = (rec.status, rec.t_final, fux, fuxx)
    return out


@pytest.mark.slow
@pytest.mark.parametrize("K", [2048, 128])
def test_c7_blowup_table(criterion, blowup_fits, K):
    status, t_final, fux, fuxx = blowup_fits[K]
    T2, Tinf = TABLE1[K]
    if K == 2048:
        ok = (abs(fux.estimated_root - T2) <= 0.02 and fux.r_squared >= 0.999
              and abs(fuxx.estimated_root - Tinf) <= 0.03 and fuxx.r_squared >= 0.998)
        tol = "+-0.02 R2>=0.999 / +-0.03 R2>=0.998"
    else:
        ok = abs(fux.estimated_root - T2) <= 0.05 and abs(fuxx.estimated_root - Tinf) <= 0.05
        tol = "+-0.05 / +-0.05"
    ok = ok and status == "ok"
    criterion(f"C7 blow-up K={K}", ok,
              f"t_final {t_final:.4f}, T2 {fux.estimated_root:.4f} (R2 {fux.r_squared:.5f}) vs {T2}, "
              f"Tinf {fuxx.estimated_root:.4f} (R2 {fuxx.r_squared:.5f}) vs {Tinf} [{tol}], "
              f"{BLOWUP_STEPS} steps")
    assert ok


@pytest.mark.slow
def test_c7_uxx_blows_up_first(criterion, blowup_fits):
    pairs = {K: (f[2].estimated_root, f[3].estimated_root) for K, f in blowup_fits.items() if K >= 256}
    ok = all(tinf < t2 for t2, tinf in pairs.values())
    criterion("C7 Tinf < T2 for K >= 256", ok,
              "; ".join(f"K={K}: {tinf:.4f} < {t2:.4f}" for K, (t2, tinf) in sorted(pairs.items())))
    assert ok


@pytest.mark.slow
def test_c7_literal_step_count_info(criterion):
    # informational: the step count as literally quoted stops far short of the blow-up
    rec, fux, fuxx = blowup_study(0.1, 2048, n_steps=8000, snapshot_every=0)
    criterion("C7 info (8000 steps, K=2048, not a criterion)", True,
              f"t_final {rec.t_final:.4f}, T2 {fux.estimated_root:.4f}, Tinf {fuxx.estimated_root:.4f}")
    assert rec.t_final < 0.81


@pytest.mark.parametrize("argv", [
    ["simulate", "--K", "64", "--steps", "200", "--snapshot-every", "50", "--seed", "3"],
    ["converge", "--ladder", "16:50,32:100", "--reference", "64:200", "--t-end", "1", "--seed", "3"],
    ["blowup", "--K", "64", "--steps", "1000", "--snapshot-every", "250", "--seed", "3"],
    ["verify-operators", "--K", "16", "--seed", "3"],
])
def test_c8_determinism(criterion, tmp_path, capsys, argv):
    dirs, stdout = [], []
    for name in ("first", "second"):
        out = tmp_path / name
        out.mkdir()
        capsys.readouterr()
        assert main([*argv, "--out", str(out)]) == 0
        stdout.append(capsys.readouterr().out)
        dirs.append(out)
    files = sorted(p.name for p in dirs[0].iterdir())
    same = files == sorted(p.name for p in dirs[1].iterdir()) and all(
        (dirs[0] / f).read_bytes() == (dirs[1] / f).read_bytes() for f in files)
    same = same and stdout[0] == stdout[1]
    criterion(f"C8 determinism ({argv[0]})", same,
              f"{len(files)} CSV files and stdout byte-identical across two runs")
    assert same
