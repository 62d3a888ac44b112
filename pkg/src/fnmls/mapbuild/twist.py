"""Twist maps on collars in Fermi coordinates.

Fermi coordinates ``(rho, t)`` about an oriented geodesic: ``rho`` is the
signed distance, ``t`` the foot point as a fraction of the cuff length.  In
the frame where the geodesic is the imaginary axis traversed upward,
``z = exp(t l) (tanh rho + i sech rho)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import hyperbolic as hyp
from ..errors import BoundaryCase, DomainError


def collar_width(cuff_length: float) -> float:
    """Half-width arcsinh(1 / sinh(l / 2)) of the standard collar."""
    if not cuff_length > 0:
        raise DomainError("cuff length must be positive")
    return math.asinh(1.0 / math.sinh(0.5 * cuff_length))


@dataclass(frozen=True)
class TwistMap:
    alpha: float
    w: float
    cuff_length: float = 1.0

    def __post_init__(self):
        if not self.w > 0:
            raise DomainError("collar width must be positive")

    def profile(self, rho):
        """Fraction of the full twist applied at signed distance ``rho``."""
        rho = np.asarray(rho, dtype=float)
        return np.clip((self.w + rho) / (2.0 * self.w), 0.0, 1.0)

    def eval(self, rho, t):
        return rho, t + self.alpha * self.profile(rho)

    def inverse(self) -> "TwistMap":
        return TwistMap(-self.alpha, self.w, self.cuff_length)

    def jacobian(self, rho, t=None):
        """d(rho', t')/d(rho, t) inside the collar."""
        rho = np.asarray(rho, dtype=float)
        if np.any(np.abs(np.abs(rho) - self.w) == 0.0):
            raise BoundaryCase("twist map is not differentiable on the collar rim")
        j = np.zeros(rho.shape + (2, 2))
        j[..., 0, 0] = 1.0
        j[..., 1, 1] = 1.0
        j[..., 1, 0] = np.where(np.abs(rho) < self.w, self.alpha / (2.0 * self.w), 0.0)
        return j


def twist_eval(m: TwistMap, q: hyp.FermiPoint) -> hyp.FermiPoint:
    rho, t = m.eval(q.rho, q.t)
    return hyp.FermiPoint(float(rho), float(t))


def twist_jacobian(m: TwistMap, q: hyp.FermiPoint) -> np.ndarray:
    return m.jacobian(q.rho)


def fermi_to_h(rho, t, cuff_length: float):
    """Fermi coordinates about the upward imaginary axis to the half-plane."""
    return np.exp(np.asarray(t) * cuff_length) * (np.tanh(rho) + 1j / np.cosh(rho))


def h_to_fermi(z, cuff_length: float):
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    return np.arctanh(z.real / r), np.log(r) / cuff_length


def sheared_translation(z, rate, w, offset=0.0):
    """Image and Jacobian of ``z -> exp(L(rho)) z`` with ``L = rate (w + rho)`` on
    ``-w < rho < 0`` (zero for ``rho <= -w``), for ``z`` left of the imaginary axis.

    ``offset`` adds a constant translation.  Returns ``(image, jac)`` with
    ``jac`` of shape (..., 2, 2) in the real coordinates of the half-plane.
    """
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    r = np.abs(z)
    rho = np.arctanh(x / r)
    inside = rho > -w
    length = offset + np.where(inside, rate * (w + rho), 0.0)
    scale = np.exp(length)
    slope = np.where(inside, rate, 0.0)
    # grad rho = (1/r, -x/(r y))
    gx, gy = 1.0 / r, -x / (r * y)
    jac = np.empty(z.shape + (2, 2))
    jac[..., 0, 0] = scale * (1 + x * slope * gx)
    jac[..., 0, 1] = scale * x * slope * gy
    jac[..., 1, 0] = scale * y * slope * gx
    jac[..., 1, 1] = scale * (1 + y * slope * gy)
    return scale * z, jac
