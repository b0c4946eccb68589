"""Neumann solvers: variable-coefficient diffusion and the logarithmic semilinear problem."""

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
import scipy.sparse as sps
from scipy.sparse.linalg import splu

from .errors import NoConvergence, NotPositiveCoefficient
from .potential import convex_part


@dataclass(frozen=True)
class PcgConfig:
    rel_tol: float = 1e-10
    max_iter: Optional[int] = None  # None -> 10 * (nx + ny)

    def iterations_for(self, grid):
        return self.max_iter if self.max_iter is not None else 10 * (grid.nx + grid.ny)


@dataclass(frozen=True)
class NewtonConfig:
    tol: float = 1e-11
    max_iter: int = 50
    clamp: float = 1.0 - 1e-12
    start_bound: float = 0.99


@dataclass
class SolveInfo:
    iterations: int
    residual: float


def pcg(apply_op, b, precond, inner, rel_tol, max_iter, project=None, x0=None):
    """Preconditioned conjugate gradients for a symmetric positive operator.

    ``project`` (if given) is applied to every residual, which keeps the
    iteration on a subspace such as the mean-zero fields.  Returns
    ``(x, SolveInfo)``; raises ``NoConvergence`` when the budget runs out.
    """
    proj = project if project is not None else (lambda v: v)
    b = proj(b)
    bnorm = np.sqrt(inner(b, b))
    x = np.zeros_like(b) if x0 is None else x0.copy()
    if bnorm == 0.0:
        return np.zeros_like(b), SolveInfo(0, 0.0)
    r = b - apply_op(x) if x0 is not None else b.copy()
    r = proj(r)
    z = proj(precond(r))
    p = z.copy()
    rz = inner(r, z)
    rnorm = np.sqrt(inner(r, r))
    for it in range(1, max_iter + 1):
        if rnorm <= rel_tol * bnorm:
            return x, SolveInfo(it - 1, rnorm / bnorm)
        ap = apply_op(p)
        pap = inner(p, ap)
        if pap <= 0:
            break
        step = rz / pap
        x = x + step * p
        r = proj(r - step * ap)
        rnorm = np.sqrt(inner(r, r))
        z = proj(precond(r))
        rz_new = inner(r, z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    if rnorm <= rel_tol * bnorm:
        return x, SolveInfo(max_iter, rnorm / bnorm)
    raise NoConvergence(
        f"PCG stopped after {max_iter} iterations, relative residual {rnorm / bnorm:.3e}",
        residual=rnorm / bnorm, iterations=max_iter, last=x,
    )


def variable_operator(grid, coeff):
    """The map ``u -> -div(coeff grad u)``."""
    def apply(u):
        gx, gy = grid.gradient(u)
        return -grid.divergence(coeff * gx, coeff * gy)
    return apply


def solve_variable_neumann(grid, coeff, f, cfg=PcgConfig(), return_info=False):
    """Mean-zero ``u`` with ``-div(coeff grad u) = f`` and ``du/dn = 0``.

    Preconditioned by the constant-coefficient inverse scaled by ``mean(coeff)``.
    """
    coeff = grid.check(coeff)
    f = grid.check(f)
    if not np.min(coeff) > 0:
        raise NotPositiveCoefficient(f"coefficient minimum {np.min(coeff):.3e} is not positive")
    grid.assert_mean_zero(f, "right-hand side")
    kbar = float(np.mean(coeff))
    u, info = pcg(
        variable_operator(grid, coeff),
        f,
        lambda r: grid.inv_laplacian_neumann(r, check=False) / kbar,
        grid.inner,
        cfg.rel_tol,
        cfg.iterations_for(grid),
        project=grid.project_mean_zero,
    )
    u = grid.project_mean_zero(u)
    return (u, info) if return_info else u


@lru_cache(maxsize=8)
def fd_neumann_matrix(grid):
    """Five-point finite-difference ``-Delta`` with reflecting walls, as CSC."""
    def second_difference(n, h):
        main = np.full(n, 2.0)
        main[[0, -1]] = 1.0
        off = -np.ones(n - 1)
        return sps.diags([off, main, off], [-1, 0, 1]) / h**2

    lap = sps.kron(second_difference(grid.nx, grid.hx), sps.eye(grid.ny)) + sps.kron(
        sps.eye(grid.nx), second_difference(grid.ny, grid.hy)
    )
    return lap.tocsc()


def fd_shifted_preconditioner(grid, diag):
    """Exact inverse of ``A_fd + diag``; spectrally equivalent to ``A + diag``."""
    lu = splu((fd_neumann_matrix(grid) + sps.diags(diag.ravel())).tocsc())
    return lambda v: lu.solve(v.ravel()).reshape(grid.shape)


def boundary_step(u, delta, keep=0.1):
    """Largest step in ``(0, 1]`` keeping each gap ``1 - |u|`` above ``keep`` times its value."""
    bound = 1.0 - keep * (1.0 - np.abs(u))
    with np.errstate(divide="ignore", invalid="ignore"):
        t_up = np.where(delta > 0, (bound - u) / delta, np.inf)
        t_dn = np.where(delta < 0, (bound + u) / -delta, np.inf)
    return float(min(1.0, np.min(t_up), np.min(t_dn)))


def log_elliptic_residual(grid, spec, u, f):
    return grid.laplacian_neumann(u) + convex_part(spec, u, 1) - f


def solve_log_elliptic(grid, spec, f, cfg=NewtonConfig(), pcg_cfg=PcgConfig(), return_info=False):
    """Solve ``-Delta u + F'(u) = f`` with ``du/dn = 0`` by damped Newton.

    ``F`` is the convex part selected by ``spec``.  In the logarithmic mode
    every iterate is clipped to ``|u| <= cfg.clamp``, and a step is halved until
    the residual decreases.  The Newton systems ``(A + F''(u)) d = -r`` are
    solved by PCG preconditioned with a sparse LU of the finite-difference
    analogue, which keeps the iteration count bounded however widely
    ``F''(u)`` varies near the pure phases.  Returns ``(u, F'(u))``.
    """
    f = grid.check(f)
    bound = cfg.clamp if spec.singular else np.inf

    def clip(v):
        return np.clip(v, -bound, bound) if spec.singular else v

    def resnorm(v):
        return grid.l2(log_elliptic_residual(grid, spec, v, f))

    target = cfg.tol * max(1.0, grid.l2(f))
    u = grid.solve_shifted(f, spec.theta)
    if spec.singular:
        u = np.clip(u, -cfg.start_bound, cfg.start_bound)
    r = log_elliptic_residual(grid, spec, u, f)
    rn = grid.l2(r)
    total_cg = 0
    for it in range(cfg.max_iter + 1):
        if rn <= target:
            info = SolveInfo(it, rn)
            fp = convex_part(spec, u, 1)
            return (u, fp, info) if return_info else (u, fp)
        if it == cfg.max_iter:
            break
        d2 = convex_part(spec, u, 2)
        eta = min(1e-3, rn / max(1.0, grid.l2(f)))
        delta, cg_info = pcg(
            lambda v: grid.laplacian_neumann(v) + d2 * v,
            -r,
            fd_shifted_preconditioner(grid, d2),
            grid.inner,
            max(eta, 1e-14),
            pcg_cfg.iterations_for(grid),
        )
        total_cg += cg_info.iterations
        t = boundary_step(u, delta) if spec.singular else 1.0
        for _ in range(60):
            trial = clip(u + t * delta)
            rt = resnorm(trial)
            if rt < rn:
                break
            t *= 0.5
        else:
            break
        u = trial
        r = log_elliptic_residual(grid, spec, u, f)
        rn = grid.l2(r)
    raise NoConvergence(
        f"Newton did not converge: residual {rn:.3e} > {target:.3e}",
        residual=rn, iterations=cfg.max_iter, last=u,
    )
