"""Property suites behind ``hdch verify``; each check is run at a fixed desk-scale size."""

import math
import time
from dataclasses import dataclass

import numpy as np

from .darcy import ViscositySpec, korteweg_consistency, solve_darcy
from .diagnostics import energy_balance_residual, records_array, shifted_energy
from .elliptic import solve_log_elliptic, solve_variable_neumann
from .experiments import continuous_dependence_experiment, decay_experiment
from .grid import Grid
from .potential import PotentialSpec, convex_part, find_beta, potential
from .stepper import StepConfig, make_scenario, make_state, simulate, smooth_random_field, step

L = 4 * math.pi


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


def _check(name, value, bound, fmt="{:.3e}"):
    return Check(name, bool(value <= bound), f"{fmt.format(value)} <= {fmt.format(bound)}")


def _rand(grid, seed):
    return smooth_random_field(grid, seed)


def operators():
    g = Grid(32, 32, 2.0, 3.0)
    f, h = _rand(g, 1), _rand(g, 2)
    gx, gy = g.gradient(f)
    hx, hy = g.gradient(h)
    adj = abs(g.inner(g.divergence(hx, hy), f) + g.inner(gx, hx) + g.inner(gy, hy))
    lap = g.l2(-g.divergence(gx, gy) - g.laplacian_neumann(f)) / g.l2(g.laplacian_neumann(f))
    inv = g.l2(g.laplacian_neumann(g.inv_laplacian_neumann(f)) - f) / g.l2(f)
    curl = g.l2(g.curl2d(gx, gy)) / g.h1_semi(f)
    fine = Grid(64, 64, 2.0, 3.0)
    back = fine.resample(g.resample(f, fine), g)
    X, Y = g.coords()
    mode = np.cos(2 * np.pi * X / g.lx) * np.cos(np.pi * Y / g.ly)
    lam = (2 * np.pi / g.lx) ** 2 + (np.pi / g.ly) ** 2
    return [
        _check("divergence is minus the adjoint of gradient", adj, 1e-10),
        _check("div grad equals -A", lap, 1e-12),
        _check("A A^-1 is the identity on mean-zero fields", inv, 1e-12),
        _check("curl grad vanishes", curl, 1e-12),
        _check("resampling round trip", g.l2(back - f) / g.l2(f), 1e-13),
        _check("cosine modes are eigenfunctions", g.l2(g.laplacian_neumann(mode) - lam * mode), 1e-10),
        _check("Laplacian has zero mean", abs(g.mean(g.laplacian_neumann(f))), 1e-14),
    ]


def potential_suite():
    spec = PotentialSpec()
    root = find_beta(spec)
    s = np.linspace(-0.99, 0.99, 199)
    h = 1e-6
    worst = 0.0
    for order in range(4):
        fd = (convex_part(spec, s + h, order) - convex_part(spec, s - h, order)) / (2 * h)
        exact = convex_part(spec, s, order + 1)
        worst = max(worst, float(np.max(np.abs(fd - exact) / (1 + np.abs(exact)))))
    reg = PotentialSpec(epsilon=1e-2, mode="eps")
    inside = np.linspace(-0.99, 0.99, 101)
    match = float(np.max(np.abs(convex_part(reg, inside, 1) - convex_part(spec, inside, 1))))
    wide = np.linspace(-3, 3, 3001)
    psi_min = float(np.min(potential(spec, s, 0)))
    return [
        _check("beta solves the well equation", root.residual, 1e-12),
        _check("closed-form derivatives match differences", worst, 1e-5),
        _check("regularised part agrees inside the cut", match, 1e-12),
        Check("regularised part is uniformly convex", bool(np.min(convex_part(reg, wide, 2)) > 0)),
        _check("psi(beta) is the minimum", float(potential(spec, root.beta, 0)) - psi_min, 1e-12),
    ]


def elliptic_suite():
    g = Grid(64, 64, L, L)
    spec = PotentialSpec()
    worst = -np.inf
    for seed in range(5):
        f = 3.0 * _rand(g, 100 + seed) + 0.2
        _, fp = solve_log_elliptic(g, spec, f)
        for p in (2, 4, 8, np.inf):
            worst = max(worst, g.lp(fp, p) / g.lp(f, p) - 1.0)
    K = 1.5 + np.tanh(3 * _rand(g, 7))
    rhs = g.project_mean_zero(_rand(g, 8))
    u = solve_variable_neumann(g, K, rhs)
    gx, gy = g.gradient(u)
    res = g.l2(-g.divergence(K * gx, K * gy) - rhs) / g.l2(rhs)
    return [
        _check("F'(u) is dominated by f in Lp", worst, 1e-8),
        _check("variable-coefficient residual", res, 1e-9),
    ]


def darcy_suite():
    g = Grid(64, 64, L, L)
    spec = PotentialSpec()
    visc = ViscositySpec(1.0, 2.0)
    X, Y = g.coords()
    phi = 0.9 * np.tanh(6 * (np.cos(np.pi * X / L) * np.cos(np.pi * Y / L) + 0.3 * np.cos(2 * np.pi * X / L)))
    st = make_state(g, phi, spec, visc, StepConfig(dt=1.0))
    beta = find_beta(spec).beta
    flat = solve_darcy(g, np.full(g.shape, beta), np.zeros(g.shape), visc)
    return [
        _check("discrete divergence of u", st.div_residual, 1e-8),
        _check("vorticity identity at 64^2", st.vorticity_residual, 0.1),
        _check("Korteweg identity at 64^2", korteweg_consistency(g, phi, spec), 0.1),
        _check("constant state has no flow", float(np.hypot(g.l2(flat.u[0]), g.l2(flat.u[1]))), 1e-14),
    ]


def scheme_suite():
    g = Grid(32, 32, L, L)
    spec = PotentialSpec()
    visc = ViscositySpec(1.0, 2.0)
    phi0 = make_scenario("spinodal", g, amplitude=0.5, seed=3)
    out = []
    for transport in (True, False):
        recs, _, _ = simulate(g, phi0, spec, visc, StepConfig(dt=1e-3, transport=transport), 0.05)
        mass = records_array(recs, "mass")
        dE = np.diff(records_array(recs, "E"))
        label = "coupled" if transport else "Cahn-Hilliard"
        out.append(_check(f"mass drift ({label})", float(np.max(np.abs(mass - mass[0]))), 1e-12))
        tail = dE[2:] if transport else dE
        out.append(_check(f"energy increments ({label})", float(np.max(tail)), 1e-10 if transport else 0.0))
        out.append(Check(f"|phi| < 1 ({label})", bool(np.min(records_array(recs, "separation")) > 0)))
    beta = find_beta(spec).beta
    cfg = StepConfig(dt=1e-2)
    st = make_state(g, np.full(g.shape, beta), spec, visc, cfg)
    nxt = step(g, st, cfg, spec, visc)
    out.append(_check("constant state beta is stationary", float(np.max(np.abs(nxt.phi - beta))), 1e-10))
    return out


def theorems_suite():
    g = Grid(64, 64, L, L)
    spec = PotentialSpec()
    visc = ViscositySpec(1.0, 2.0)
    phi0 = make_scenario("spinodal", g, amplitude=0.2, seed=7)
    res = []
    for dt in (2e-3, 1e-3):
        recs, _, _ = simulate(g, phi0, spec, visc, StepConfig(dt=dt), 0.05)
        res.append(energy_balance_residual(recs))
    ratio = res[0] / res[1]
    out = [Check("energy balance improves when dt halves", bool(ratio >= 1.7), f"ratio {ratio:.3f} >= 1.7")]
    wide = make_scenario("spinodal", g, amplitude=0.95, seed=7)
    recs, _, _ = simulate(g, wide, spec, visc, StepConfig(dt=1e-3), 0.2)
    out.append(Check("separation kept from |phi0| = 0.95", bool(np.min(records_array(recs, "separation")) > 0)))
    rows = continuous_dependence_experiment(
        g, phi0, smooth_random_field(g, 11), [1e-2, 1e-3], 0.05, spec, visc, StepConfig(dt=1e-3)
    )
    r = [row.R_v0dual for row in rows]
    out.append(_check("dependence ratios agree within 3x", max(r) / min(r), 3.0, "{:.3f}"))
    dec = decay_experiment(g, 0.01, 1.0, spec, visc, StepConfig(dt=1e-2))
    out.append(Check("small data decay", bool(dec.rate > 0 and dec.monotone), f"rate {dec.rate:.3f}"))
    beta_state = np.full(g.shape, find_beta(spec).beta)
    out.append(_check("shifted energy of beta vanishes", abs(shifted_energy(g, beta_state, spec)), 1e-10))
    return out


SUITES = {
    "operators": operators,
    "potential": potential_suite,
    "elliptic": elliptic_suite,
    "darcy": darcy_suite,
    "scheme": scheme_suite,
    "theorems": theorems_suite,
}


def run_suite(name):
    """Run one suite; returns ``(checks, seconds)``."""
    t0 = time.perf_counter()
    checks = SUITES[name]()
    return checks, time.perf_counter() - t0
