"""Continuous-dependence and small-data decay experiments."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .diagnostics import records_array
from .stepper import make_scenario, simulate


@dataclass(frozen=True)
class DependenceRow:
    a: float
    R_v0dual: float
    R_l2: float


def _trajectory(grid, phi0, spec, visc, cfg, t_end):
    fields = []
    simulate(grid, phi0, spec, visc, cfg, t_end, on_record=lambda n, s, r: fields.append(s.phi.copy()))
    return fields


def _pair_ratio(args):
    grid, base, perturbation, a, spec, visc, cfg, t_end = args
    d0 = a * perturbation
    v0, l0 = grid.v0_dual(d0), grid.l2(d0)
    if a == 0 or v0 == 0:
        return DependenceRow(a, 0.0, 0.0)
    other = _trajectory(grid, base[0] + d0, spec, visc, cfg, t_end)
    rv = max(grid.v0_dual(grid.project_mean_zero(p2 - p1)) for p1, p2 in zip(base, other))
    rl = max(grid.l2(p2 - p1) for p1, p2 in zip(base, other))
    return DependenceRow(a, rv / v0, rl / l0)


def continuous_dependence_experiment(grid, base_phi0, perturbation, amplitudes, t_end, spec, visc, cfg, jobs=1):
    """Ratios ``sup_t ||phi_1 - phi_2|| / ||phi_01 - phi_02||`` for each amplitude.

    The pair is ``(base, base + a * perturbation)``; the perturbation must be
    mean-zero so both runs carry the same mass.  Both the dual and the l2
    ratio are reported.
    """
    grid.assert_mean_zero(perturbation, "perturbation")
    base = _trajectory(grid, base_phi0, spec, visc, cfg, t_end)
    tasks = [(grid, base, perturbation, float(a), spec, visc, cfg, t_end) for a in amplitudes]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_pair_ratio, tasks))
    return [_pair_ratio(t) for t in tasks]


@dataclass(frozen=True)
class DecayResult:
    rate: float
    c0: float
    fit_residual: float
    min_separation: float
    monotone: bool
    t: np.ndarray
    H: np.ndarray


def fit_decay(t, H):
    """Least-squares fit of ``log H = log c0 - rate t`` over the second half of ``[0, T]``.

    Returns ``(rate, c0, rms residual, monotone on window)``; a vanishing ``H``
    gives ``rate = inf``.
    """
    t = np.asarray(t, dtype=float)
    H = np.asarray(H, dtype=float)
    window = t >= 0.5 * t[-1]
    tw, hw = t[window], H[window]
    if np.all(hw == 0):
        return np.inf, 0.0, 0.0, True
    if np.any(hw <= 0):
        raise ValueError("H vanishes on part of the fit window")
    slope, intercept = np.polyfit(tw, np.log(hw), 1)
    resid = np.log(hw) - (slope * tw + intercept)
    monotone = bool(np.all(np.diff(hw) < 0))
    return float(-slope), float(np.exp(intercept)), float(np.sqrt(np.mean(resid**2))), monotone


def decay_experiment(grid, a, t_end, spec, visc, cfg, record_every=1):
    """Run from the perturbed constant state ``beta + a cos cos`` and fit the decay of H."""
    phi0 = make_scenario("perturbed_beta", grid, amplitude=a, spec=spec)
    records, _, _ = simulate(grid, phi0, spec, visc, cfg, t_end, record_every=record_every)
    t = records_array(records, "t")
    H = records_array(records, "H")
    rate, c0, resid, monotone = fit_decay(t, H)
    return DecayResult(
        rate=rate, c0=c0, fit_residual=resid,
        min_separation=float(np.min(records_array(records, "separation"))),
        monotone=monotone, t=t, H=H,
    )
