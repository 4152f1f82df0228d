"""End-to-end acceptance gates for the shipped physics.

One test per gate, each printing a single PASS/FAIL line with the
measured numbers; the lines are replayed in the terminal summary so
they show up for passing gates too.  Gates 3 and 4 share one
session-scoped force grid; gate 9 reuses the 3-by-3 state grid of
gate 6.
"""

import math
import time

import numpy as np
import pytest

import conftest

from neqcp.constants import K_BOLTZMANN
from neqcp.equilibrium import (NanoparticleSpec, equilibrium_force,
                               lifshitz_tilde_force, polarizability)
from neqcp.errors import BracketError
from neqcp.graphene import (polarization_reduced,
                            polarization_reduced_matsubara,
                            reflection_reduced, reflection_reduced_matsubara)
from neqcp.nonequilibrium import cross_check_representation, noneq_force
from neqcp.sweep import RunConfig, find_zero_crossing, render_csv, run_sweep

from oracles import oracle_pi_far, oracle_pi_interval, oracle_pi_matsubara

METAL = NanoparticleSpec(radius=2.5e-9)   # d = 5 nm sphere
VT = 1.0 / 300.0
T_ENV = 300.0
GRID_A = (0.3e-6, 0.8e-6, 2.0e-6)         # 3x3 state grid, separations
GRID_TG = (77.0, 500.0, 700.0)            # 3x3 state grid, sheet temps


def _report(gate, ok, detail):
    line = f"ACCEPTANCE {gate}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    # The terminal-summary hook replays these after capture is torn down,
    # so passing gates stay visible in a plain `pytest -v` log.
    conftest.REPORT_LINES.append(line)


@pytest.fixture(scope="session")
def force_grid():
    """20 log-spaced separations in [0.2, 2] um: F_eq(300 K) and
    F_neq for sheet temperatures 77/500/700 K, at force rel_tol 1e-4
    (ordering margins are O(0.1..1), far above this resolution)."""
    gaps = np.geomspace(0.2e-6, 2.0e-6, 20)
    data = {"a": gaps}
    t0 = time.monotonic()
    data["f_eq"] = np.array([
        equilibrium_force(a, T_ENV, METAL, rel_tol=1e-4).force
        for a in gaps])
    for t_g in GRID_TG:
        data[t_g] = np.array([
            noneq_force(a, T_ENV, t_g, METAL, rel_tol=1e-4).force
            for a in gaps])
    data["seconds"] = time.monotonic() - t0
    return data


def test_gate_1_equal_temperature_reduction():
    worst = 0.0
    for a in GRID_A:
        neq = noneq_force(a, T_ENV, T_ENV, METAL).force
        eq = equilibrium_force(a, T_ENV, METAL).force
        worst = max(worst, abs(neq - eq))
    ok = worst == 0.0
    _report(1, ok, f"equal-temperature reduction exact; worst abs "
                   f"difference {worst:.3e} N over a = 0.3/0.8/2 um")
    assert ok


def test_gate_2_cold_sheet_zero_crossing():
    config = RunConfig(spec=METAL, t_environment=T_ENV,
                       t_sheet_values=(77.0,))
    t0 = time.monotonic()
    try:
        out = find_zero_crossing(config, (0.3e-6, 2.0e-6))
    except BracketError as err:
        elapsed = time.monotonic() - t0
        _report(2, False, f"no sign change found in [0.3, 2] um at default "
                          f"tolerances ({elapsed:.0f} s): {err}")
        pytest.fail(f"expected a zero crossing at 0.8 +- 0.1 um, found "
                    f"none: {err}")
    elapsed = time.monotonic() - t0
    ok = abs(out.separation - 0.8e-6) <= 0.1e-6 and elapsed < 600.0
    _report(2, ok, f"crossing at {out.separation * 1e6:.3f} um "
                   f"(target 0.8 +- 0.1), {elapsed:.0f} s single-threaded")
    assert abs(out.separation - 0.8e-6) <= 0.1e-6
    assert elapsed < 600.0


def test_gate_3_ratio_ordering_and_sign_change(force_grid):
    ratio = {t: force_grid[t] / force_grid["f_eq"] for t in GRID_TG}
    order_ok = bool(np.all(ratio[700.0] > ratio[500.0])
                    and np.all(ratio[500.0] > 1.0)
                    and np.all(1.0 > ratio[77.0]))
    flips = int(np.count_nonzero(np.diff(np.sign(ratio[77.0]))))
    sign_ok = flips == 1
    _report(3, order_ok and sign_ok,
            f"ordering ratio(700) > ratio(500) > 1 > ratio(77) "
            f"{'holds' if order_ok else 'VIOLATED'} at all 20 points; "
            f"ratio(77) sign changes = {flips} (need exactly 1), "
            f"ratio(77) spans [{ratio[77.0].min():.3f}, "
            f"{ratio[77.0].max():.3f}] "
            f"(grid {force_grid['seconds']:.0f} s)")
    assert order_ok, "ratio ordering violated"
    assert sign_ok, (f"ratio(77 K) should cross zero exactly once on "
                     f"[0.2, 2] um, found {flips} sign changes")


def test_gate_4_heated_sheet_strengthens_attraction(force_grid):
    f_eq = force_grid["f_eq"]
    f700, f500 = force_grid[700.0], force_grid[500.0]
    all_negative = bool(np.all(f700 < 0.0) and np.all(f500 < 0.0)
                        and np.all(f_eq < 0.0))
    order_ok = bool(np.all(np.abs(f700) > np.abs(f500))
                    and np.all(np.abs(f500) > np.abs(f_eq)))
    ok = all_negative and order_ok
    margin = float(np.min(np.abs(f500) / np.abs(f_eq)))
    _report(4, ok, f"|F(700)| > |F(500)| > |F_eq(300)| pointwise "
                   f"{'holds' if order_ok else 'VIOLATED'}; all attractive: "
                   f"{all_negative}; tightest 500/eq margin {margin:.3f}")
    assert ok


def test_gate_5_classical_limit():
    gap = 10e-6
    expected = -3.0 * K_BOLTZMANN * T_ENV * polarizability(METAL) \
        / (4.0 * gap ** 4)
    got = equilibrium_force(gap, T_ENV, METAL, rel_tol=1e-5).force
    rel = abs(got - expected) / abs(expected)
    ok = rel < 0.10
    _report(5, ok, f"a = 10 um vs -3 k_B T alpha0 / (4 a^4): relative "
                   f"deviation {rel:.3%} (gate 10%)")
    assert ok


def test_gate_6_representation_equivalence():
    worst_force, worst_half = 0.0, 0.0
    t0 = time.monotonic()
    for a in GRID_A:
        for t_g in GRID_TG:
            report = cross_check_representation(a, T_ENV, t_g, METAL,
                                                tolerance=1e-4)
            worst_force = max(worst_force, report.force_mismatch)
            worst_half = max(worst_half, report.half_difference_mismatch)
    elapsed = time.monotonic() - t0
    ok = worst_force <= 1e-4 and worst_half <= 1e-4
    _report(6, ok, f"3x3 grid: worst assembled-force mismatch "
                   f"{worst_force:.2e}, worst half-difference mismatch "
                   f"{worst_half:.2e} (gate 1e-4 each, {elapsed:.0f} s)")
    assert ok


def test_gate_7_tensor_oracle_and_boundary():
    rng = np.random.default_rng(2024)
    worst = 0.0

    def check(r, gam):
        nonlocal worst
        want00, wantp = (oracle_pi_far if r < VT
                         else oracle_pi_interval)(r, gam, VT)
        z00, zp, t00, tp = polarization_reduced(
            np.array([r]), np.array([gam]), rel_tol=1e-10)
        worst = max(worst,
                    abs((z00 + t00)[0] - want00) / abs(want00),
                    abs((zp + tp)[0] - wantp) / abs(wantp))

    for _ in range(50):  # sheet-wave interval
        check(10.0 ** rng.uniform(math.log10(1.05 * VT), 0.0),
              10.0 ** rng.uniform(-0.5, 2.3))
    for _ in range(50):  # far evanescent
        check(VT * 10.0 ** rng.uniform(-2.5, -0.02),
              10.0 ** rng.uniform(-0.5, 2.3))
    for _ in range(50):  # traveling waves
        check(10.0 ** rng.uniform(0.0, 0.9),
              10.0 ** rng.uniform(-0.5, 2.3))
    for _ in range(50):  # imaginary axis
        rho, gam = 10.0 ** rng.uniform(-2, 1.3), 10.0 ** rng.uniform(-0.5, 2.3)
        want00, wantp = oracle_pi_matsubara(rho, gam, VT)
        z00, zp, t00, tp = polarization_reduced_matsubara(
            np.array([rho]), np.array([gam]), rel_tol=1e-10)
        worst = max(worst, abs((z00 + t00)[0] - want00) / abs(want00),
                    abs((zp + tp)[0] - wantp) / abs(wantp))

    # regime-boundary continuity at the sheet-wave cone, delta = 1e-3
    delta, gamma0 = 1e-3, 45.0
    r = np.array([VT / (1.0 - delta), VT / (1.0 + delta)])
    g = np.array([gamma0 * (1.0 - delta), gamma0 * (1.0 + delta)])
    r_tm, r_te = reflection_reduced(r, g, rel_tol=1e-10)
    gap = (math.hypot(abs(r_tm[0] - r_tm[1]), abs(r_te[0] - r_te[1]))
           / math.hypot(abs(r_tm[1]), abs(r_te[1])))
    ok = worst <= 1e-8 and gap < 1e-2
    _report(7, ok, f"200 randomized points vs dense oracle: worst relative "
                   f"gap {worst:.2e} (gate 1e-8); cone continuity gap "
                   f"{gap:.2e} at delta 1e-3 (gate 1e-2)")
    assert worst <= 1e-8
    assert gap < 1e-2


def test_gate_8_matsubara_reflection_bounds():
    rng = np.random.default_rng(7)
    rho = 10.0 ** rng.uniform(-3.0, 2.0, size=10000)
    gam = 10.0 ** rng.uniform(-2.0, 3.0, size=10000)
    r_tm, r_te = reflection_reduced_matsubara(rho, gam)
    ok = bool(np.all((r_tm > 0.0) & (r_tm < 1.0))
              and np.all((r_te > -1.0) & (r_te < 0.0)))
    _report(8, ok, f"1e4 samples: r_tm in ({r_tm.min():.3e}, "
                   f"{r_tm.max():.6f}), r_te in ({r_te.min():.6f}, "
                   f"{r_te.max():.3e}) (need (0,1) and (-1,0))")
    assert ok


def test_gate_9_numerical_robustness():
    worst = 0.0
    t0 = time.monotonic()
    for a in GRID_A:
        for t_g in GRID_TG:
            coarse = noneq_force(a, T_ENV, t_g, METAL, rel_tol=1e-6).force
            fine = noneq_force(a, T_ENV, t_g, METAL, rel_tol=5e-7).force
            worst = max(worst, abs(fine - coarse) / abs(fine))
    elapsed = time.monotonic() - t0

    config = RunConfig(spec=METAL, t_environment=T_ENV,
                       t_sheet_values=(300.0,), a_min=0.3e-6, a_max=0.6e-6,
                       points=2, force_rel_tol=1e-4)
    identical = render_csv(run_sweep(config)) == render_csv(run_sweep(config))
    ok = worst < 1e-3 and identical
    _report(9, ok, f"tolerance halving moves F_neq by at most {worst:.2e} "
                   f"relative on the 3x3 grid (gate 1e-3, {elapsed:.0f} s); "
                   f"repeated CSV byte-identical: {identical}")
    assert worst < 1e-3
    assert identical
