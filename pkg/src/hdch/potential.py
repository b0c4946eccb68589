"""Logarithmic free energy, its convex/concave split and regularised variants.

The double-well density is ``psi(s) = F(s) - theta0/2 s^2`` with the convex
entropy part ``F(s) = theta/2 [(1+s) log(1+s) + (1-s) log(1-s)]``.  Three modes
share this interface:

* ``"log"``: the singular potential itself, defined on ``(-1, 1)``;
* ``"eps"``: ``F`` replaced by ``F_eps``, equal to ``F`` on ``[-1+eps, 1-eps]``
  and continued by its fourth-order Taylor polynomial outside;
* ``"polynomial"``: the quartic ``psi = (s^2 - 1)^2`` split as
  ``(s^4 + 1) - 2 s^2``.

All evaluators are vectorised over numpy arrays.  No clamping happens here;
solvers keep their iterates inside ``(-1, 1)``.
"""

from dataclasses import dataclass
from math import factorial
from typing import Optional

import numpy as np

from .errors import InvalidParams, MissingEpsilon, NoRoot, OutOfRange

MODES = ("log", "eps", "polynomial")
POLY_CONCAVE = 4.0  # psi_0 = (s^4 + 1) - (4/2) s^2


@dataclass(frozen=True)
class PotentialSpec:
    theta: float = 1.0
    theta0: float = 2.0
    epsilon: Optional[float] = None
    mode: str = "log"

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidParams(f"unknown potential mode {self.mode!r}")
        if not self.theta > 0:
            raise InvalidParams("theta must be positive")
        if self.mode != "polynomial" and not self.theta < self.theta0:
            raise InvalidParams("need 0 < theta < theta0")
        if self.mode == "eps" and self.epsilon is None:
            raise MissingEpsilon("mode 'eps' needs epsilon")
        if self.epsilon is not None:
            if not 0.0 < self.epsilon < 1.0:
                raise InvalidParams("epsilon must lie in (0, 1)")
            _check_regularised_convexity(self)

    @property
    def alpha(self):
        return self.theta0 - self.theta

    @property
    def singular(self):
        return self.mode == "log"

    @property
    def concave_coefficient(self):
        """Coefficient ``c`` of the explicit part ``-c/2 s^2``."""
        return POLY_CONCAVE if self.mode == "polynomial" else self.theta0


def _order_check(order):
    if order not in (0, 1, 2, 3, 4):
        raise InvalidParams(f"derivative order must be 0..4, got {order}")


def _log_kernel(theta, s, order):
    if order == 0:
        return 0.5 * theta * ((1 + s) * np.log1p(s) + (1 - s) * np.log1p(-s))
    if order == 1:
        return theta * np.arctanh(s)
    q = 1.0 - s * s
    if order == 2:
        return theta / q
    if order == 3:
        return 2.0 * theta * s / q**2
    return 2.0 * theta * (1.0 + 3.0 * s * s) / q**3


def f_log(spec, s, order=0):
    """Derivative ``order`` of the entropy part ``F`` at ``s`` in ``(-1, 1)``."""
    _order_check(order)
    s = np.asarray(s, dtype=float)
    if np.any(np.abs(s) >= 1.0) or not np.all(np.isfinite(s)):
        raise OutOfRange("logarithmic potential evaluated outside (-1, 1)")
    out = _log_kernel(spec.theta, s, order)
    return float(out) if out.ndim == 0 else out


def _taylor(spec, a, s, order):
    # derivative `order` of sum_j F^(j)(a) (s-a)^j / j!, j = 0..4
    d = s - a
    out = np.zeros_like(d)
    for j in range(order, 5):
        out = out + _log_kernel(spec.theta, np.float64(a), j) * d ** (j - order) / factorial(j - order)
    return out


def f_eps(spec, s, order=0, epsilon=None):
    """Regularised convex part ``F_eps``; defined on the whole real line."""
    _order_check(order)
    eps = spec.epsilon if epsilon is None else epsilon
    if eps is None:
        raise MissingEpsilon("f_eps needs an epsilon")
    a = 1.0 - eps
    s = np.asarray(s, dtype=float)
    inner = np.abs(s) <= a
    out = np.empty_like(s)
    out[inner] = _log_kernel(spec.theta, s[inner], order)
    hi = s > a
    lo = s < -a
    out[hi] = _taylor(spec, a, s[hi], order)
    out[lo] = _taylor(spec, -a, s[lo], order)
    return float(out) if out.ndim == 0 else out


def _poly_convex(s, order):
    s = np.asarray(s, dtype=float)
    if order == 0:
        return s**4 + 1.0
    if order == 1:
        return 4.0 * s**3
    if order == 2:
        return 12.0 * s**2
    if order == 3:
        return 24.0 * s
    return np.full_like(s, 24.0)


def convex_part(spec, s, order=0):
    """The convex part of whichever potential ``spec.mode`` selects."""
    _order_check(order)
    if spec.mode == "log":
        return f_log(spec, s, order)
    if spec.mode == "eps":
        return f_eps(spec, s, order)
    out = _poly_convex(s, order)
    return float(out) if np.ndim(out) == 0 else out


def _concave(c, s, order):
    s = np.asarray(s, dtype=float)
    if order == 0:
        return -0.5 * c * s * s
    if order == 1:
        return -c * s
    if order == 2:
        return np.full_like(s, -c)
    return np.zeros_like(s)


def psi(spec, s, order=0):
    """Logarithmic double well ``F - theta0/2 s^2`` and its derivatives."""
    out = f_log(spec, s, order) + _concave(spec.theta0, s, order)
    return float(out) if np.ndim(out) == 0 else out


def psi_eps(spec, s, order=0, epsilon=None):
    out = f_eps(spec, s, order, epsilon) + _concave(spec.theta0, s, order)
    return float(out) if np.ndim(out) == 0 else out


def potential(spec, s, order=0):
    """Double-well density for the mode selected by ``spec``."""
    out = convex_part(spec, s, order) + _concave(spec.concave_coefficient, s, order)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class BetaRoot:
    beta: float
    residual: float


def _beta_equation(theta, theta0, b):
    return theta * np.arctanh(b) - theta0 * b


def find_beta(spec):
    """Positive minimiser of the logarithmic double well.

    Bisection to 1e-12 on ``(0, 1)``, then two Newton polish steps.
    """
    theta, theta0 = spec.theta, spec.theta0
    if not theta < theta0:
        raise NoRoot("double well needs theta < theta0")
    lo, hi = 1e-12, 1.0 - 1e-12
    # g(lo) < 0 because g'(0) = theta - theta0 < 0; g -> +inf at 1
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if _beta_equation(theta, theta0, mid) < 0:
            lo = mid
        else:
            hi = mid
    b = 0.5 * (lo + hi)
    for _ in range(2):
        slope = theta / (1 - b * b) - theta0
        b_new = b - _beta_equation(theta, theta0, b) / slope
        if 0.0 < b_new < 1.0:
            b = b_new
    return BetaRoot(beta=float(b), residual=float(abs(_beta_equation(theta, theta0, b))))


def beta_value(spec):
    """Minimiser location used by the shifted energy (1 for the quartic)."""
    if spec.mode == "polynomial":
        return 1.0
    return find_beta(spec).beta


def _check_regularised_convexity(spec):
    # F_eps'' > 0 on a dense sample of [-3, 3] certifies epsilon <= eps*
    s = np.linspace(-3.0, 3.0, 6001)
    if not np.all(f_eps(spec, s, 2) > 0):
        raise InvalidParams(f"epsilon={spec.epsilon} does not give a convex F_eps")


def growth_constant(spec):
    """A constant ``C`` with ``F''(s) <= C exp(C |F'(s)|)`` on ``(-1, 1)``.

    With ``C theta >= 2`` the right side is at least ``C (1+s)/(1-s)``, which
    dominates ``theta / (1 - s^2)`` once ``C >= theta``.
    """
    return max(1.0, 2.0 / spec.theta, spec.theta)
