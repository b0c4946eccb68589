"""Cell-centred rectangular grid with cosine-spectral Neumann operators.

A field is a float array of shape ``(nx, ny)``; entry ``[i, j]`` is the value at
the cell centre ``((i + 1/2) hx, (j + 1/2) hy)``.  Scalar fields are expanded in
the cosine basis ``cos(pi k x / lx) cos(pi l y / ly)`` (DCT-II), which satisfies
the homogeneous Neumann condition exactly.  Differentiating along an axis turns
cosines into sines (DST-II) and back, so each velocity component is a
sine series across the wall it is normal to and ``u . n = 0`` holds by
construction.

Transforms use the unnormalised scipy convention throughout.  With that choice
the cosine index ``k >= 1`` and the sine index ``k - 1`` carry identical
weights, so ``divergence`` is exactly minus the adjoint of ``gradient`` in the
midpoint inner product, and ``divergence(gradient(f)) == -laplacian_neumann(f)``
mode by mode.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import fft

from .errors import InvalidParams, NonZeroMean

MEAN_ZERO_RTOL = 1e-10


def _along(ndim, axis, index):
    sl = [slice(None)] * ndim
    sl[axis] = index
    return tuple(sl)


@dataclass(frozen=True)
class Grid:
    nx: int
    ny: int
    lx: float = 1.0
    ly: float = 1.0
    eigenvalues: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for n in (self.nx, self.ny):
            if int(n) != n or n < 4 or n % 2:
                raise InvalidParams(f"cell counts must be even integers >= 4, got {self.nx}x{self.ny}")
        if not (self.lx > 0 and self.ly > 0):
            raise InvalidParams("domain lengths must be positive")
        object.__setattr__(self, "nx", int(self.nx))
        object.__setattr__(self, "ny", int(self.ny))
        object.__setattr__(self, "lx", float(self.lx))
        object.__setattr__(self, "ly", float(self.ly))
        kx, ky = self.wavenumbers
        lam = kx[:, None] ** 2 + ky[None, :] ** 2
        lam.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def hx(self):
        return self.lx / self.nx

    @property
    def hy(self):
        return self.ly / self.ny

    @property
    def area(self):
        return self.lx * self.ly

    @property
    def cell_area(self):
        return self.hx * self.hy

    @property
    def wavenumbers(self):
        return (np.pi * np.arange(self.nx) / self.lx, np.pi * np.arange(self.ny) / self.ly)

    @property
    def lambda_min(self):
        """Smallest nonzero eigenvalue of the Neumann operator."""
        return min(self.eigenvalues[1, 0], self.eigenvalues[0, 1])

    @property
    def poincare_constant(self):
        return 1.0 / np.sqrt(self.lambda_min)

    def coords(self):
        x = (np.arange(self.nx) + 0.5) * self.hx
        y = (np.arange(self.ny) + 0.5) * self.hy
        return np.meshgrid(x, y, indexing="ij")

    def zeros(self):
        return np.zeros(self.shape)

    def check(self, f):
        f = np.asarray(f, dtype=float)
        if f.shape != self.shape:
            raise InvalidParams(f"field shape {f.shape} does not match grid {self.shape}")
        return f

    # -- transforms ---------------------------------------------------------

    def dct(self, f):
        return fft.dctn(f, type=2)

    def idct(self, c):
        return fft.idctn(c, type=2)

    def apply_symbol(self, f, symbol):
        """Multiply the cosine coefficients of ``f`` by ``symbol`` (shape nx, ny)."""
        return fft.idctn(symbol * fft.dctn(f, type=2), type=2)

    # -- integrals and inner products ---------------------------------------

    def mean(self, f):
        return float(np.mean(f))

    def integrate(self, f):
        return float(np.sum(f)) * self.cell_area

    def inner(self, f, g):
        return float(np.vdot(f, g)) * self.cell_area

    def assert_mean_zero(self, f, what="field"):
        m = self.mean(f)
        rms = np.sqrt(np.mean(np.square(f)))
        if abs(m) > MEAN_ZERO_RTOL * rms:
            raise NonZeroMean(f"{what} has mean {m:.3e} (rms {rms:.3e})")

    # -- Neumann operator A = -Laplacian ------------------------------------

    def laplacian_neumann(self, f):
        """Return ``-Delta f`` with homogeneous Neumann conditions."""
        return self.apply_symbol(f, self.eigenvalues)

    def inv_laplacian_neumann(self, f, check=True):
        """Mean-zero solution ``u`` of ``-Delta u = f``; ``f`` must be mean-zero."""
        if check:
            self.assert_mean_zero(f)
        c = fft.dctn(f, type=2)
        c[0, 0] = 0.0
        c[1:, :] /= self.eigenvalues[1:, :]
        c[0, 1:] /= self.eigenvalues[0, 1:]
        return fft.idctn(c, type=2)

    def solve_shifted(self, f, shift):
        """Solve ``(-Delta + shift) u = f`` for a constant ``shift > 0``."""
        return self.apply_symbol(f, 1.0 / (self.eigenvalues + shift))

    def project_mean_zero(self, f):
        return f - np.mean(f)

    # -- first derivatives --------------------------------------------------

    def diff(self, f, axis, parity="even"):
        """Spectral derivative of ``f`` along ``axis``.

        ``parity`` states how ``f`` is expanded along that axis: ``"even"``
        (cosine series, the result is a sine series) or ``"odd"`` (sine
        series, the result is a cosine series).  The highest sine mode has no
        cosine partner on the grid and is dropped.
        """
        n = f.shape[axis]
        length = self.lx if axis == 0 else self.ly
        shape = [1, 1]
        shape[axis] = n - 1
        k = (np.pi * np.arange(1, n) / length).reshape(shape)
        out = np.zeros_like(f, dtype=float)
        if parity == "even":
            c = fft.dct(f, type=2, axis=axis)
            out[_along(2, axis, slice(0, n - 1))] = -k * c[_along(2, axis, slice(1, n))]
            return fft.idst(out, type=2, axis=axis)
        if parity == "odd":
            s = fft.dst(f, type=2, axis=axis)
            out[_along(2, axis, slice(1, n))] = k * s[_along(2, axis, slice(0, n - 1))]
            return fft.idct(out, type=2, axis=axis)
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")

    def gradient(self, f):
        return self.diff(f, 0, "even"), self.diff(f, 1, "even")

    def divergence(self, vx, vy):
        """Divergence of a vector field whose components vanish on their normal walls."""
        return self.diff(vx, 0, "odd") + self.diff(vy, 1, "odd")

    def curl2d(self, vx, vy):
        """Scalar curl ``d vy/dx - d vx/dy`` of a wall-tangent vector field."""
        return self.diff(vy, 0, "even") - self.diff(vx, 1, "even")

    # -- norms --------------------------------------------------------------

    def l2(self, f):
        return float(np.sqrt(np.sum(np.square(f)) * self.cell_area))

    def lp(self, f, p):
        if np.isinf(p):
            return self.linf(f)
        return float((np.sum(np.abs(f) ** p) * self.cell_area) ** (1.0 / p))

    def linf(self, f):
        return float(np.max(np.abs(f)))

    def h1_semi(self, f):
        gx, gy = self.gradient(f)
        return float(np.sqrt(self.inner(gx, gx) + self.inner(gy, gy)))

    def v0_dual(self, f):
        """Dual norm ``||grad A^{-1} f||`` of a mean-zero field."""
        return self.h1_semi(self.inv_laplacian_neumann(f))

    def h1(self, f):
        """Full ``H^1`` norm, used as the ``V`` norm."""
        return float(np.sqrt(self.l2(f) ** 2 + self.h1_semi(f) ** 2))

    def norms(self, f, p=4):
        return {
            "l2": self.l2(f),
            "lp": self.lp(f, p),
            "linf": self.linf(f),
            "h1_semi": self.h1_semi(f),
            "v0_dual": self.v0_dual(f),
        }

    # -- resampling ---------------------------------------------------------

    def resample(self, f, other):
        """Evaluate the cosine interpolant of ``f`` on the cell centres of ``other``.

        Both grids must cover the same rectangle.  Modes absent from the target
        are truncated; missing modes are zero-padded.
        """
        if not (np.isclose(self.lx, other.lx) and np.isclose(self.ly, other.ly)):
            raise InvalidParams("resample requires grids over the same domain")
        def weights(n):
            w = np.full(n, np.sqrt(2.0 / n))
            w[0] = np.sqrt(1.0 / n)
            return w

        # ortho coefficients -> cosine-series amplitudes -> ortho coefficients
        amp = fft.dctn(f, type=2, norm="ortho") * np.outer(weights(self.nx), weights(self.ny))
        out = np.zeros(other.shape)
        mx, my = min(self.nx, other.nx), min(self.ny, other.ny)
        out[:mx, :my] = amp[:mx, :my]
        out /= np.outer(weights(other.nx), weights(other.ny))
        return fft.idctn(out, type=2, norm="ortho")
