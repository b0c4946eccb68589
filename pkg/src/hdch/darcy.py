"""Darcy law with phase-dependent viscosity.

Given the phase field and chemical potential, the pressure solves the
``1/nu``-weighted Neumann problem ``-div(grad p / nu) = -div(mu grad phi / nu)``
and the velocity follows pointwise from ``nu u = mu grad phi - grad p``.
"""

from dataclasses import dataclass

import numpy as np

from .elliptic import PcgConfig, solve_variable_neumann
from .errors import InvalidParams, OutOfRange
from .potential import potential


@dataclass(frozen=True)
class ViscositySpec:
    """Linear blend ``nu1 (1+s)/2 + nu2 (1-s)/2`` of the pure-fluid viscosities.

    Outside ``[-1, 1]`` the blend is frozen at the pure values.  The switch is
    rounded over ``|s| in [1 - width, 1 + width]`` so that ``nu'`` is continuous;
    ``width = 0`` gives the hard clamp.
    """

    nu1: float = 1.0
    nu2: float = 1.0
    width: float = 1e-3

    def __post_init__(self):
        if not (self.nu1 > 0 and self.nu2 > 0):
            raise InvalidParams("viscosities must be positive")
        if not 0 <= self.width < 0.5:
            raise InvalidParams("smoothing width must lie in [0, 0.5)")

    @property
    def nu_min(self):
        return min(self.nu1, self.nu2)

    @property
    def nu_max(self):
        return max(self.nu1, self.nu2)

    @property
    def matched(self):
        return self.nu1 == self.nu2

    def _clamp(self, s):
        s = np.asarray(s, dtype=float)
        w = self.width
        a = np.abs(s)
        if w == 0:
            return np.clip(s, -1.0, 1.0), (a <= 1.0).astype(float)
        # quadratic blend on [1-w, 1+w]: value and slope match at both ends
        inner = a <= 1 - w
        outer = a >= 1 + w
        mid = ~(inner | outer)
        val = np.where(inner, a, 1.0)
        slope = np.where(inner, 1.0, 0.0)
        d = a[mid] - (1 - w)
        val[mid] = a[mid] - d * d / (4 * w)
        slope[mid] = 1 - d / (2 * w)
        return np.sign(s) * val, slope

    def nu(self, s):
        c, _ = self._clamp(s)
        return 0.5 * self.nu1 * (1 + c) + 0.5 * self.nu2 * (1 - c)

    def dnu(self, s):
        _, slope = self._clamp(s)
        return 0.5 * (self.nu1 - self.nu2) * slope


@dataclass
class DarcyOutput:
    p: np.ndarray
    u: tuple
    div_residual: float
    vorticity_residual: float
    iterations: int = 0


def capillary_force(grid, phi, mu):
    gx, gy = grid.gradient(phi)
    return mu * gx, mu * gy


def solve_darcy(grid, phi, mu, visc, cfg=PcgConfig()):
    """Pressure and velocity for the given ``(phi, mu)``.

    The pressure is mean-zero.  ``div_residual`` is ``||div u|| / ||u||``
    (0 when ``u`` vanishes); it is reported, not projected away.
    """
    phi = grid.check(phi)
    mu = grid.check(mu)
    nu = visc.nu(phi)
    fx, fy = capillary_force(grid, phi, mu)
    rhs = -grid.divergence(fx / nu, fy / nu)
    rhs = grid.project_mean_zero(rhs)
    if grid.l2(rhs) == 0.0:
        p, iters = grid.zeros(), 0
    else:
        p, info = solve_variable_neumann(grid, 1.0 / nu, rhs, cfg, return_info=True)
        iters = info.iterations
    px, py = grid.gradient(p)
    u = ((fx - px) / nu, (fy - py) / nu)
    unorm = np.hypot(grid.l2(u[0]), grid.l2(u[1]))
    div_res = grid.l2(grid.divergence(*u)) / unorm if unorm > 0 else 0.0
    vort = vorticity_residual(grid, phi, mu, u, visc)
    return DarcyOutput(p=p, u=u, div_residual=div_res, vorticity_residual=vort, iterations=iters)


def vorticity_residual(grid, phi, mu, u, visc):
    """l2 norm of ``nu curl u + nu' grad phi . u_perp - grad mu . (grad phi)_perp``.

    Here ``v_perp = (v2, -v1)``.  The identity is the curl of the Darcy law.
    """
    ux, uy = u
    px, py = grid.gradient(phi)
    mx, my = grid.gradient(mu)
    res = (
        visc.nu(phi) * grid.curl2d(ux, uy)
        + visc.dnu(phi) * (px * uy - py * ux)
        - (mx * py - my * px)
    )
    return grid.l2(res)


def chemical_potential(grid, phi, spec):
    """``mu = -Delta phi + psi'(phi)`` for the potential selected by ``spec``."""
    return grid.laplacian_neumann(phi) + potential(spec, phi, 1)


def korteweg_consistency(grid, phi, spec):
    """l2 norm of ``mu grad phi - grad(|grad phi|^2/2 + psi(phi)) + div(grad phi (x) grad phi)``."""
    phi = grid.check(phi)
    if spec.singular and np.max(np.abs(phi)) >= 1.0:
        raise OutOfRange("Korteweg identity needs |phi| < 1")
    mu = chemical_potential(grid, phi, spec)
    px, py = grid.gradient(phi)
    scalar = 0.5 * (px * px + py * py) + potential(spec, phi, 0)
    sx, sy = grid.gradient(scalar)
    # row i of div(grad phi (x) grad phi) is sum_j d_j (d_i phi d_j phi)
    tx = grid.diff(px * px, 0, "even") + grid.diff(px * py, 1, "odd")
    ty = grid.diff(py * px, 0, "odd") + grid.diff(py * py, 1, "even")
    rx = mu * px - sx + tx
    ry = mu * py - sy + ty
    return float(np.hypot(grid.l2(rx), grid.l2(ry)))


def pressure_from_velocity(grid, phi, mu, u, visc):
    """Pressure read off the unweighted problem ``-Delta p = -div(mu grad phi - nu u)``.

    Agrees with the weighted solve of ``solve_darcy`` whenever ``u`` is its
    velocity; with matched viscosities and ``u`` omitted it is the oracle
    ``A^{-1}(-div(mu grad phi))``.
    """
    fx, fy = capillary_force(grid, phi, mu)
    if u is not None:
        nu = visc.nu(phi)
        fx, fy = fx - nu * u[0], fy - nu * u[1]
    return grid.inv_laplacian_neumann(grid.project_mean_zero(-grid.divergence(fx, fy)), check=False)


def modified_pressure(grid, phi, p, spec):
    """``p* = p - (|grad phi|^2/2 + psi(phi))``, shifted back to mean zero."""
    px, py = grid.gradient(phi)
    scalar = 0.5 * (px * px + py * py) + potential(spec, phi, 0)
    return grid.project_mean_zero(p - scalar)


def modified_darcy_residual(grid, phi, p, u, visc, spec):
    """l2 norm of ``nu u + grad p* + div(grad phi (x) grad phi)``."""
    pstar = modified_pressure(grid, phi, p, spec)
    px, py = grid.gradient(phi)
    sx, sy = grid.gradient(pstar)
    tx = grid.diff(px * px, 0, "even") + grid.diff(px * py, 1, "odd")
    ty = grid.diff(py * px, 0, "odd") + grid.diff(py * py, 1, "even")
    nu = visc.nu(phi)
    rx = nu * u[0] + sx + tx
    ry = nu * u[1] + sy + ty
    return float(np.hypot(grid.l2(rx), grid.l2(ry)))
