"""Convex-splitting time stepper, initial-data preparation and scenarios.

One step advances the phase field by

    (phi' - phi) / dt + div(u phi) = Delta mu',
    mu' = -Delta phi' + F'(phi') - c phi,

with the convex part ``F`` implicit and the concave part ``-c/2 s^2`` explicit.
The velocity is lagged; transport is written in conservative form so the zero
mode of the update vanishes identically.  Afterwards the chemical potential
``-Delta phi' + psi'(phi')`` and the Darcy fields are recomputed at the new
state.

The Newton iteration works on mean-zero increments with the symmetric positive
operator ``A^{-1}/dt + A + P0 F''(phi)``, obtained by applying ``A^{-1}/dt`` to
the step residual.
"""

from dataclasses import dataclass, field

import numpy as np

from .darcy import chemical_potential, solve_darcy
from .elliptic import NewtonConfig, PcgConfig, boundary_step, pcg, solve_log_elliptic
from .errors import InvalidParams, NewtonDiverged, NoConvergence, OutOfRange
from .potential import PotentialSpec, convex_part, find_beta


@dataclass
class SimState:
    t: float
    phi: np.ndarray
    mu: np.ndarray
    p: np.ndarray
    u: tuple
    div_residual: float = 0.0
    vorticity_residual: float = 0.0


@dataclass(frozen=True)
class StepConfig:
    dt: float
    transport: bool = True  # False forces u = 0 (pure Cahn-Hilliard)
    newton: NewtonConfig = field(default_factory=NewtonConfig)
    pcg: PcgConfig = field(default_factory=PcgConfig)

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidParams("dt must be positive")


def make_state(grid, phi, spec, visc, cfg, t=0.0):
    """Complete a phase field into a state: chemical potential and Darcy fields."""
    phi = grid.check(phi).copy()
    if spec.singular and np.max(np.abs(phi)) >= 1.0:
        raise OutOfRange("logarithmic runs need |phi| < 1")
    mu = chemical_potential(grid, phi, spec)
    if not cfg.transport:
        zero = grid.zeros()
        return SimState(t, phi, mu, zero, (zero, zero.copy()))
    out = solve_darcy(grid, phi, mu, visc, cfg.pcg)
    return SimState(t, phi, mu, out.p, out.u, out.div_residual, out.vorticity_residual)


def step(grid, state, cfg, spec, visc):
    """Advance ``state`` by ``cfg.dt``; raises ``NewtonDiverged`` on failure."""
    dt = cfg.dt
    phi_n = state.phi
    c = spec.concave_coefficient
    if cfg.transport:
        ux, uy = state.u
        transport = grid.divergence(ux * phi_n, uy * phi_n)
    else:
        transport = 0.0
    lam = grid.eigenvalues

    def residual(phi):
        mu_split = grid.laplacian_neumann(phi) + convex_part(spec, phi, 1) - c * phi_n
        return phi - phi_n + dt * transport + dt * grid.laplacian_neumann(mu_split)

    scale = max(1.0, grid.l2(phi_n))
    target = cfg.newton.tol * scale
    phi = phi_n.copy()
    g = residual(phi)
    gn = grid.l2(g)
    with np.errstate(divide="ignore"):
        inv_dt_lam = np.where(lam > 0, 1.0 / (dt * lam), 0.0)
    for it in range(cfg.newton.max_iter + 1):
        if gn <= target:
            break
        if it == cfg.newton.max_iter:
            raise NewtonDiverged(
                f"step at t={state.t:.6g} did not converge (residual {gn:.3e}); try a smaller dt",
                residual=gn, iterations=it,
            )
        d2 = convex_part(spec, phi, 2)
        shift = float(np.mean(d2))
        symbol = np.zeros_like(lam)
        symbol[lam > 0] = 1.0 / (inv_dt_lam[lam > 0] + lam[lam > 0] + shift)

        def op(v):
            return (
                grid.inv_laplacian_neumann(v, check=False) / dt
                + grid.laplacian_neumann(v)
                + grid.project_mean_zero(d2 * v)
            )

        rhs = -grid.inv_laplacian_neumann(grid.project_mean_zero(g), check=False) / dt
        eta = min(1e-3, gn / scale)
        try:
            delta, _ = pcg(
                op, rhs, lambda v: grid.apply_symbol(v, symbol), grid.inner,
                max(eta, 1e-14), cfg.pcg.iterations_for(grid),
                project=grid.project_mean_zero,
            )
        except NoConvergence as exc:
            raise NewtonDiverged(f"linear solve failed at t={state.t:.6g}: {exc}") from exc
        delta = grid.project_mean_zero(delta)
        t = boundary_step(phi, delta) if spec.singular else 1.0
        for _ in range(60):
            trial = phi + t * delta
            g_trial = residual(trial)
            gt = grid.l2(g_trial)
            if gt < gn:
                break
            t *= 0.5
        else:
            raise NewtonDiverged(f"line search failed at t={state.t:.6g}; try a smaller dt", residual=gn)
        phi, g, gn = trial, g_trial, gt
    return make_state(grid, phi, spec, visc, cfg, t=state.t + dt)


def simulate(grid, phi0, spec, visc, cfg, t_end, record_every=1, keep_states=False, on_record=None):
    """Run from ``phi0`` to ``t_end``; returns ``(records, final_state, states)``.

    ``records`` holds a ``DiagRecord`` for t = 0 and every ``record_every``-th
    step (the final step is always recorded).  ``states`` is filled only when
    ``keep_states`` is set.
    """
    from .diagnostics import make_record

    n_steps = int(round(t_end / cfg.dt))
    state = make_state(grid, phi0, spec, visc, cfg)
    records = [make_record(grid, state, spec, visc)]
    states = [state] if keep_states else []
    if on_record:
        on_record(0, state, records[-1])
    for n in range(1, n_steps + 1):
        state = step(grid, state, cfg, spec, visc)
        state.t = n * cfg.dt
        if n % record_every == 0 or n == n_steps:
            records.append(make_record(grid, state, spec, visc))
            if keep_states:
                states.append(state)
            if on_record:
                on_record(n, state, records[-1])
    return records, state, states


# -- initial data ------------------------------------------------------------

@dataclass
class InitPrep:
    k: float
    phi0: np.ndarray
    delta: float
    truncated: bool


def truncate(values, k):
    """Globally Lipschitz cut-off ``h_k``: identity on ``[-k, k]``, constant outside."""
    return np.clip(values, -k, k)


def prepare_initial_data(grid, phi0_raw, k, spec, newton=NewtonConfig(), pcg_cfg=PcgConfig()):
    """Strictly separated approximation of ``phi0_raw``.

    Computes ``mu0 = -Delta phi0 + F'(phi0)``, truncates it to ``[-k, k]`` and
    solves ``-Delta phi + F'(phi) = h_k(mu0)``.
    """
    phi0_raw = grid.check(phi0_raw)
    if not k > 0:
        raise InvalidParams("truncation level must be positive")
    if np.max(np.abs(phi0_raw)) >= 1.0:
        raise OutOfRange("initial datum must satisfy |phi0| < 1")
    mu0 = grid.laplacian_neumann(phi0_raw) + convex_part(spec, phi0_raw, 1)
    mu_k = truncate(mu0, k)
    phi_k, _ = solve_log_elliptic(grid, spec, mu_k, newton, pcg_cfg)
    return InitPrep(
        k=k, phi0=phi_k, delta=float(1.0 - np.max(np.abs(phi_k))),
        truncated=bool(np.max(np.abs(mu0)) > k),
    )


SCENARIOS = ("spinodal", "bubble", "perturbed_beta")


def smooth_random_field(grid, seed, kmax=8):
    """Seeded low-mode cosine field, mean zero, scaled to unit max norm."""
    # the coefficient block is drawn in full so a seed names one function on every grid
    coef = np.random.default_rng(seed).standard_normal((kmax + 1, kmax + 1))
    X, Y = grid.coords()
    field_ = np.zeros(grid.shape)
    for k in range(min(kmax, grid.nx // 4) + 1):
        for l in range(min(kmax, grid.ny // 4) + 1):
            if k == 0 and l == 0:
                continue
            amp = coef[k, l] / (1.0 + k * k + l * l)
            field_ += amp * np.cos(np.pi * k * X / grid.lx) * np.cos(np.pi * l * Y / grid.ly)
    field_ -= field_.mean()
    peak = np.max(np.abs(field_))
    return field_ / peak if peak > 0 else field_


def make_scenario(name, grid, mean=None, amplitude=0.0, seed=0, spec=PotentialSpec(), radius=None, width=1.0):
    """Initial phase field for one of the named scenarios."""
    if name not in SCENARIOS:
        raise InvalidParams(f"unknown scenario {name!r}; choose from {SCENARIOS}")
    if amplitude < 0:
        raise InvalidParams("amplitude must be nonnegative")
    X, Y = grid.coords()
    if name == "spinodal":
        m = 0.0 if mean is None else mean
        if not abs(m) + amplitude < 1.0:
            raise InvalidParams("spinodal data need |mean| + amplitude < 1")
        phi = m + amplitude * smooth_random_field(grid, seed)
    elif name == "bubble":
        beta = find_beta(spec).beta if spec.mode != "polynomial" else 1.0
        r0 = min(grid.lx, grid.ly) / 4 if radius is None else radius
        r = np.hypot(X - grid.lx / 2, Y - grid.ly / 2)
        phi = beta * np.tanh((r0 - r) / (np.sqrt(2.0) * width))
        if mean is not None:
            phi = phi - phi.mean() + mean
    else:
        beta = find_beta(spec).beta
        phi = beta + amplitude * np.cos(np.pi * X / grid.lx) * np.cos(np.pi * Y / grid.ly)
        if mean is not None:
            phi = phi - phi.mean() + mean
    if spec.singular and np.max(np.abs(phi)) >= 1.0:
        raise InvalidParams("scenario leaves (-1, 1); lower the amplitude or shift the mean")
    return phi
