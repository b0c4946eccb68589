"""Monitored quantities of a run and the Gronwall-type bound evaluators."""

import csv
from dataclasses import astuple, dataclass, fields

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from .errors import EmptyTrajectory, NegativeInput, OutOfRange
from .potential import beta_value, potential

CSV_COLUMNS = ("t", "mass", "E", "E_tilde", "grad_mu_l2", "u_l2", "H", "separation", "div_res", "vort_res")


@dataclass(frozen=True)
class DiagRecord:
    t: float
    mass: float
    E: float
    E_tilde: float
    grad_mu_l2: float
    u_l2: float
    H: float
    separation: float
    div_res: float
    vort_res: float


def energy(grid, phi, spec):
    """Ginzburg-Landau energy ``int |grad phi|^2 / 2 + psi(phi)`` by midpoint quadrature."""
    if spec.singular and np.max(np.abs(phi)) >= 1.0:
        raise OutOfRange("energy of the logarithmic potential needs |phi| < 1")
    return 0.5 * grid.h1_semi(phi) ** 2 + grid.integrate(potential(spec, phi, 0))


def well_depth(spec):
    """``|psi(beta)|``, the constant that makes the shifted density nonnegative."""
    return abs(float(potential(spec, beta_value(spec), 0)))


def shifted_energy(grid, phi, spec):
    return energy(grid, phi, spec) + grid.area * well_depth(spec)


def higher_order_energy(grid, state, visc):
    """``H = ||grad mu||^2 / 2 + int nu(phi) |u|^2 / 2``."""
    ux, uy = state.u
    kinetic = grid.integrate(visc.nu(state.phi) * (ux * ux + uy * uy))
    return 0.5 * grid.h1_semi(state.mu) ** 2 + 0.5 * kinetic


def sandwich_constant(visc):
    """Constant ``C`` with ``(|grad mu|^2 + |u|^2) / C <= H <= C (|grad mu|^2 + |u|^2)``."""
    return 2.0 * max(1.0, visc.nu_max) / min(1.0, visc.nu_min)


def make_record(grid, state, spec, visc):
    ux, uy = state.u
    return DiagRecord(
        t=float(state.t),
        mass=grid.mean(state.phi),
        E=energy(grid, state.phi, spec),
        E_tilde=shifted_energy(grid, state.phi, spec),
        grad_mu_l2=grid.h1_semi(state.mu),
        u_l2=float(np.hypot(grid.l2(ux), grid.l2(uy))),
        H=higher_order_energy(grid, state, visc),
        separation=1.0 - grid.linf(state.phi),
        div_res=float(state.div_residual),
        vort_res=float(state.vorticity_residual),
    )


def energy_balance_residual(records):
    """Normalised defect of ``E(t) - E(0) + int_0^t (|grad mu|^2 + int nu |u|^2)``.

    The dissipation rate is ``2 H`` at each record; the time integral uses the
    trapezoidal rule over the recorded times.
    """
    if not records:
        raise EmptyTrajectory("no records")
    t = np.array([r.t for r in records])
    rate = 2.0 * np.array([r.H for r in records])
    dissipated = float(trapezoid(rate, t)) if len(records) > 1 else 0.0
    e0, et = records[0].E, records[-1].E
    return abs(et - e0 + dissipated) / (abs(e0) + 1.0)


# -- CSV ---------------------------------------------------------------------

def write_diag_csv(path, records):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for rec in records:
            fh.write(",".join("%.17g" % v for v in astuple(rec)) + "\n")


def read_diag_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected diag.csv header {header}")
        return [DiagRecord(*map(float, row)) for row in reader if row]


def records_array(records, name):
    if name not in {f.name for f in fields(DiagRecord)}:
        raise KeyError(name)
    return np.array([getattr(r, name) for r in records])


# -- Gronwall bounds ---------------------------------------------------------

def gronwall_log_bound(f0, g, h, t):
    """Bound for ``f' <= g f log(e + f) + h``, ``f(0) = f0``, sampled on ``t``.

    Evaluates ``(e + f0)^{exp(int_0^t g)} exp(int_0^t exp(int_s^t g) h(s) ds)``
    with trapezoidal quadrature.
    """
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    t = np.asarray(t, dtype=float)
    if f0 <= 0 or np.any(g < 0) or np.any(h < 0):
        raise NegativeInput("need f0 > 0 and g, h >= 0")
    G = cumulative_trapezoid(g, t, initial=0.0)
    forcing = np.exp(G) * cumulative_trapezoid(np.exp(-G) * h, t, initial=0.0)
    return np.exp(np.log(np.e + f0) * np.exp(G) + forcing)


def window_sup(values, t, r):
    """``sup_s int_s^{s+r} values`` over windows lying inside the sample range."""
    values = np.asarray(values, dtype=float)
    cum = cumulative_trapezoid(values, t, initial=0.0)
    ends = np.searchsorted(t, t + r - 1e-12)
    ok = ends < len(t)
    if not np.any(ok):
        raise ValueError("window length exceeds the sampled interval")
    idx = np.nonzero(ok)[0]
    return float(np.max(cum[ends[idx]] - cum[idx]))


def uniform_gronwall_bound(a1, a2, a3, r):
    """``exp((a1 / r + a3) e^{a2})``, valid for ``t >= r``."""
    if min(a1, a2, a3) < 0 or r <= 0:
        raise NegativeInput("window integrals must be nonnegative and r positive")
    with np.errstate(over="ignore"):
        return float(np.exp((a1 / r + a3) * np.exp(a2)))
