"""The ten acceptance criteria at desk scale.

Each test prints one ``PASS``/``FAIL`` line and the same lines are repeated in
the terminal summary.  Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE, L, profile
from hdch.darcy import ViscositySpec, korteweg_consistency
from hdch.diagnostics import (
    energy_balance_residual, gronwall_log_bound, records_array, uniform_gronwall_bound, window_sup,
)
from hdch.elliptic import solve_log_elliptic, solve_variable_neumann
from hdch.experiments import continuous_dependence_experiment, decay_experiment
from hdch.grid import Grid
from hdch.potential import PotentialSpec, convex_part
from hdch.stepper import StepConfig, make_scenario, prepare_initial_data, simulate, smooth_random_field
from hdch.verify import run_suite

SPEC = PotentialSpec(theta=1.0, theta0=2.0)
VISC = ViscositySpec(1.0, 2.0)


def report(number, passed, detail):
    line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    assert passed, line


def spinodal64():
    g = Grid(64, 64, L, L)
    return g, make_scenario("spinodal", g, mean=0.0, amplitude=0.2, seed=7)


@pytest.fixture(scope="module")
def reference_run():
    g, phi0 = spinodal64()
    t0 = time.perf_counter()
    recs, _, _ = simulate(g, phi0, SPEC, VISC, StepConfig(dt=1e-4), 0.1)
    return recs, time.perf_counter() - t0


def test_criterion_1_mass(reference_run):
    recs, seconds = reference_run
    mass = records_array(recs, "mass")
    drift = float(np.max(np.abs(mass - mass[0])))
    report(1, drift <= 1e-12 and seconds <= 120,
           f"max mass drift {drift:.2e} <= 1e-12 over {len(recs) - 1} steps, {seconds:.1f} s <= 120 s")


def test_criterion_2_energy_dissipation(reference_run):
    recs, _ = reference_run
    dE = np.diff(records_array(recs, "E"))
    coupled = float(np.max(dE[3:]))  # increments E(n+1) - E(n) for n >= 3
    g, phi0 = spinodal64()
    worst_ch = {}
    for dt in (1e-3, 1e-4):
        ch, _, _ = simulate(g, phi0, SPEC, VISC, StepConfig(dt=dt, transport=False), 0.1)
        worst_ch[dt] = float(np.max(np.diff(records_array(ch, "E"))))
    ok = coupled <= 1e-10 and all(v <= 0 for v in worst_ch.values())
    report(2, ok, f"coupled max dE (n>=3) {coupled:.2e} <= 1e-10; Cahn-Hilliard max dE "
                  f"{worst_ch[1e-3]:.2e} (dt=1e-3), {worst_ch[1e-4]:.2e} (dt=1e-4) <= 0")


def test_criterion_3_energy_balance():
    g, phi0 = spinodal64()
    t0 = time.perf_counter()
    res = [energy_balance_residual(simulate(g, phi0, SPEC, VISC, StepConfig(dt=dt), 0.05)[0])
           for dt in (1e-3, 5e-4, 2.5e-4)]
    seconds = time.perf_counter() - t0
    ratios = [res[0] / res[1], res[1] / res[2]]
    report(3, min(ratios) >= 1.7 and seconds <= 300,
           f"residuals {res[0]:.2e}, {res[1]:.2e}, {res[2]:.2e}; ratios {ratios[0]:.2f}, {ratios[1]:.2f} "
           f">= 1.7; {seconds:.1f} s")


def test_criterion_4_separation():
    # every log-potential run in the verify suites checks separation > 0 at each record
    suite_checks = [c for name in ("scheme", "theorems") for c in run_suite(name)[0] if "phi" in c.name or
                    "separation" in c.name]
    g = Grid(64, 64, L, L)
    phi0 = make_scenario("spinodal", g, amplitude=0.95, seed=7)
    recs, _, _ = simulate(g, phi0, SPEC, VISC, StepConfig(dt=1e-3), 0.5)
    sep = float(np.min(records_array(recs, "separation")))
    ok = all(c.passed for c in suite_checks) and len(suite_checks) >= 3 and sep >= 1e-4
    report(4, ok, f"{len(suite_checks)} verify separation checks passed; run from |phi0|=0.95 to T=0.5 "
                  f"keeps separation {sep:.4f} >= 1e-4")


def _manufactured(n):
    g = Grid(n, n, L, L)
    X, Y = g.coords()
    (px, dpx, d2px), (py, dpy, d2py) = profile(X / L), profile(Y / L)
    u = 0.6 * (px - 0.5) + 0.3 * (py - 0.5)
    ux, uy = 0.6 * dpx / L, 0.3 * dpy / L
    lap = 0.6 * d2px / L**2 + 0.3 * d2py / L**2
    c = math.pi / L
    K = 1.5 + 0.5 * np.cos(c * X) * np.cos(c * Y)
    Kx = -0.5 * c * np.sin(c * X) * np.cos(c * Y)
    Ky = -0.5 * c * np.cos(c * X) * np.sin(c * Y)
    return g, u, lap, K, g.project_mean_zero(-(K * lap + Kx * ux + Ky * uy))


def test_criterion_5_elliptic():
    t0 = time.perf_counter()
    g = Grid(64, 64, L, L)
    slack = -np.inf
    for seed in range(20):
        f = (0.5 + 0.25 * seed) * smooth_random_field(g, 500 + seed) + 0.05 * (seed % 7 - 3)
        _, fp = solve_log_elliptic(g, SPEC, f)
        for p in (2, 4, 8, np.inf):
            slack = max(slack, g.lp(fp, p) / g.lp(f, p) - 1.0)
    var_err, log_err = [], []
    for n in (32, 64, 128):
        mg, u, lap, K, rhs = _manufactured(n)
        var_err.append(mg.l2(solve_variable_neumann(mg, K, rhs) - mg.project_mean_zero(u)))
        log_err.append(mg.l2(solve_log_elliptic(mg, SPEC, -lap + convex_part(SPEC, u, 1))[0] - u))
    seconds = time.perf_counter() - t0
    dec = lambda e: e[0] > e[1] > e[2]
    ok = slack <= 1e-8 and dec(var_err) and dec(log_err) and seconds <= 180
    report(5, ok, f"worst ||F'(u)||_p/||f||_p - 1 = {slack:.2e} <= 1e-8 over 20 fields; manufactured errors "
                  f"variable {var_err[0]:.2e}>{var_err[1]:.2e}>{var_err[2]:.2e}, log {log_err[0]:.2e}>"
                  f"{log_err[1]:.2e}>{log_err[2]:.2e}; {seconds:.1f} s")


def test_criterion_6_continuous_dependence():
    t0 = time.perf_counter()
    g = Grid(64, 64, L, L)
    pert = smooth_random_field(g, 11)
    spreads = {}
    for mode, spec, column in (("log", SPEC, "R_v0dual"), ("polynomial", PotentialSpec(mode="polynomial"), "R_l2")):
        phi0 = make_scenario("spinodal", g, amplitude=0.2, seed=7, spec=spec)
        rows = continuous_dependence_experiment(
            g, phi0, pert, [1e-2, 1e-3, 1e-4], 0.1, spec, VISC, StepConfig(dt=1e-3)
        )
        r = [getattr(row, column) for row in rows]
        spreads[mode] = (r, max(r) / min(r))
    seconds = time.perf_counter() - t0
    ok = all(s <= 3.0 for _, s in spreads.values()) and seconds <= 600
    detail = "; ".join(f"{m} {', '.join(f'{v:.4f}' for v in r)} spread {s:.3f} <= 3"
                       for m, (r, s) in spreads.items())
    report(6, ok, f"{detail}; {seconds:.1f} s")


def test_criterion_7_decay():
    t0 = time.perf_counter()
    g = Grid(64, 64, L, L)
    full = decay_experiment(g, 0.01, 5.0, SPEC, VISC, StepConfig(dt=1e-2))
    half = decay_experiment(g, 0.005, 5.0, SPEC, VISC, StepConfig(dt=1e-2))
    seconds = time.perf_counter() - t0
    factor = full.c0 / half.c0
    ok = full.rate > 0 and full.monotone and 2.5 <= factor <= 6 and full.min_separation > 0 and seconds <= 600
    report(7, ok, f"rate {full.rate:.3f} > 0, H monotone on fit window {full.monotone}, fit residual "
                  f"{full.fit_residual:.1e}, c0 ratio {factor:.3f} in [2.5, 6]; {seconds:.1f} s")


def test_criterion_8_identities():
    vort, kort = [], []
    for n in (32, 64, 128):
        g = Grid(n, n, L, L)
        X, Y = g.coords()
        c = math.pi / L
        phi0 = 0.9 * np.tanh(6 * (np.cos(c * X) * np.cos(c * Y) + 0.3 * np.cos(2 * c * X)))
        _, st, _ = simulate(g, phi0, SPEC, VISC, StepConfig(dt=1e-3), 0.01)
        vort.append(st.vorticity_residual)
        kort.append(korteweg_consistency(g, st.phi, SPEC))
    ok = vort[0] > vort[1] > vort[2] and kort[0] > kort[1] > kort[2]
    report(8, ok, f"vorticity {vort[0]:.1e} > {vort[1]:.1e} > {vort[2]:.1e}; Korteweg {kort[0]:.1e} > "
                  f"{kort[1]:.1e} > {kort[2]:.1e} (32, 64, 128)")


def _rk4(f0, g, h, t):
    f = np.empty_like(t)
    f[0] = f0
    rhs = lambda s, y: g(s) * y * math.log(math.e + y) + h(s)
    for i in range(t.size - 1):
        s, dt, y = t[i], t[i + 1] - t[i], f[i]
        k1 = rhs(s, y)
        k2 = rhs(s + dt / 2, y + dt / 2 * k1)
        k3 = rhs(s + dt / 2, y + dt / 2 * k2)
        k4 = rhs(s + dt, y + dt * k3)
        f[i + 1] = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return f


def test_criterion_9_gronwall():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    t = np.linspace(0.0, 2.0, 2001)
    r = 0.5
    worst_finite, worst_uniform = np.inf, np.inf
    for _ in range(20):
        f0, g0, h0 = rng.uniform(0.05, 3.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)
        w = rng.uniform(0.5, 6.0)
        g = lambda s: g0 * (1 + 0.5 * math.sin(w * s))
        h = lambda s: h0 * (1 + 0.5 * math.cos(w * s))
        f = _rk4(f0, g, h, t)
        gs, hs = np.array([g(s) for s in t]), np.array([h(s) for s in t])
        finite = gronwall_log_bound(f0, gs, hs, t)
        worst_finite = min(worst_finite, float(np.min(finite / f)))
        uni = uniform_gronwall_bound(window_sup(f, t, r), window_sup(gs, t, r), window_sup(hs, t, r), r)
        worst_uniform = min(worst_uniform, float(uni / np.max(f[t >= r])))
    seconds = time.perf_counter() - t0
    ok = worst_finite >= 1 and worst_uniform >= 1 and seconds <= 10
    report(9, ok, f"min bound/RK4 over 20 triples on [0, 2]: finite horizon {worst_finite:.3f}, "
                  f"uniform (t >= {r}) {worst_uniform:.3f}, both >= 1; {seconds:.1f} s")


def test_criterion_10_initial_data():
    g = Grid(64, 64, L, L)
    X, Y = g.coords()
    c = math.pi / L
    prof = np.tanh(10 * (np.cos(c * X) * np.cos(c * Y) + 0.3 * np.cos(2 * c * X)))
    phi0 = 0.999 * prof / np.max(np.abs(prof))
    deltas, dist = {}, []
    for k in (1, 5, 25, 125):
        prep = prepare_initial_data(g, phi0, k, SPEC)
        deltas[k] = prep.delta
        dist.append(g.h1(prep.phi0 - phi0))
    ok = all(deltas[k] > 0 for k in (1, 5, 25)) and all(a >= b for a, b in zip(dist, dist[1:]))
    report(10, ok, "delta " + ", ".join(f"k={k}: {d:.2e}" for k, d in deltas.items())
                   + "; H1 distance " + " >= ".join(f"{d:.3g}" for d in dist))
