"""Raywise stretch maps between geodesic triangles, in polar charts at the anchor.

A triangle ``(p, A, B)`` is swept by the geodesic rays from the anchor ``p`` to
the points of the opposite side ``AB``.  With ``x`` the arclength along
``AB`` measured from ``A``, ``e = |pA|`` and ``alpha`` the angle at ``A``::

    cosh R(x) = -sinh(e) cos(alpha) sinh(x) + cosh(e) cosh(x)
    sin Theta(x) = sinh(x) sin(alpha) / sinh R(x)

give the polar coordinates at ``p`` of the side point (``Theta`` is measured
from the ray ``pA``).  The stretch map sends the ray through side parameter
``x / a`` (``a`` the side length) to the ray through the same normalized
parameter in the target, at constant speed along each ray.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import hyperbolic as hyp
from ..errors import DomainError
from ..hexagon import GeodesicTriangle

EDGE_TOL = 1e-9


def side_polar(e, alpha, x):
    """(R, Theta) of the point at arclength ``x`` from A along the opposite side."""
    ce, se = math.cosh(e), math.sinh(e)
    x = np.asarray(x, dtype=float)
    r = hyp.arccosh_stable(ce * np.cosh(x) - se * math.cos(alpha) * np.sinh(x))
    theta = np.arctan2(np.sinh(x) * math.sin(alpha) * se, ce * np.cosh(r) - np.cosh(x))
    return r, theta


def side_polar_derivative(e, alpha, x, r):
    """(dR/dx, dTheta/dx) along the opposite side."""
    se = math.sinh(e)
    sr = np.sinh(r)
    dr = (math.cosh(e) * np.sinh(x) - se * np.cosh(x) * math.cos(alpha)) / sr
    dtheta = se * math.sin(alpha) / sr ** 2
    return dr, dtheta


def side_parameter(e, alpha, theta):
    """Arclength from A of the side point seen at polar angle ``theta``."""
    theta = np.asarray(theta, dtype=float)
    cos_g = -np.cos(theta) * math.cos(alpha) + np.sin(theta) * math.sin(alpha) * math.cosh(e)
    sin_g = np.sqrt(np.clip(1.0 - cos_g ** 2, 0.0, None))
    # sin_g > 0 strictly inside a nondegenerate triangle
    return np.arcsinh(math.sinh(e) * np.sin(theta) / sin_g)


@dataclass(frozen=True)
class TriangleData:
    e: float  # |pA|
    alpha: float  # angle at A
    side: float  # |AB|
    apex: float  # angle at p

    @classmethod
    def from_triangle(cls, t: GeodesicTriangle) -> "TriangleData":
        return cls(e=t.sides[2], alpha=t.angles[1], side=t.sides[0], apex=t.angles[0])

    def radius(self, theta):
        """Distance from the anchor to the opposite side along the ray at ``theta``."""
        x = side_parameter(self.e, self.alpha, theta)
        return side_polar(self.e, self.alpha, x)[0]


@dataclass(frozen=True)
class StretchMap:
    """Stretch map between two triangles in their anchor polar charts.

    Coordinates are ``(r, theta)`` with ``theta`` in ``[0, apex]`` measured
    from the ray to the first non-anchor vertex.  ``beta`` in the sine rule is
    the angle at A, the vertex at the start of the opposite side.
    """

    source: GeodesicTriangle
    target: GeodesicTriangle
    src: TriangleData = field(init=False, repr=False)
    dst: TriangleData = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "src", TriangleData.from_triangle(self.source))
        object.__setattr__(self, "dst", TriangleData.from_triangle(self.target))

    @property
    def e(self) -> float:
        return self.src.e

    @property
    def alpha(self) -> float:
        return self.src.alpha

    @property
    def beta(self) -> float:
        return self.src.alpha

    def _check(self, r, theta, strict=False):
        tol = EDGE_TOL
        if np.any(theta < -tol) or np.any(theta > self.src.apex + tol):
            raise DomainError("point outside the source triangle (angle)")
        rmax = self.src.radius(np.clip(theta, 0.0, self.src.apex))
        if np.any(r > rmax + tol) or np.any(r < -tol):
            raise DomainError("point outside the source triangle (radius)")
        if strict:
            if np.any(theta <= 0) or np.any(theta >= self.src.apex) or np.any(r <= 0) or np.any(r >= rmax):
                raise DomainError("Jacobian requested on the triangle boundary")

    def _pieces(self, theta):
        s, d = self.src, self.dst
        x0 = side_parameter(s.e, s.alpha, theta)
        k = d.side / s.side
        x1 = k * x0
        r0, _ = side_polar(s.e, s.alpha, x0)
        r1, th1 = side_polar(d.e, d.alpha, x1)
        return x0, x1, k, r0, r1, th1

    def eval(self, r, theta):
        """Image ``(r', theta')`` of polar points; arrays broadcast."""
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        self._check(r, theta)
        theta = np.clip(theta, 0.0, self.src.apex)
        _, _, _, r0, r1, th1 = self._pieces(theta)
        return r * r1 / r0, th1

    def jacobian(self, r, theta):
        """d(r', theta')/d(r, theta), shape (..., 2, 2)."""
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        self._check(r, theta, strict=True)
        s, d = self.src, self.dst
        x0, x1, k, r0, r1, _ = self._pieces(theta)
        dr0, dth0 = side_polar_derivative(s.e, s.alpha, x0, r0)
        dr1, dth1 = side_polar_derivative(d.e, d.alpha, x1, r1)
        dx0 = 1.0 / dth0
        j = np.empty(np.broadcast(r, theta).shape + (2, 2))
        j[..., 0, 0] = r1 / r0
        j[..., 0, 1] = r * (dr1 * k * r0 - r1 * dr0) / r0 ** 2 * dx0
        j[..., 1, 0] = 0.0
        j[..., 1, 1] = dth1 * k * dx0
        return j


def stretch_eval(m: StretchMap, p):
    """Image of a polar point ``p = (r, theta)``."""
    r, theta = p
    return m.eval(r, theta)


def stretch_jacobian(m: StretchMap, p):
    r, theta = p
    return m.jacobian(r, theta)


@dataclass(frozen=True)
class PolarChart:
    """Geodesic polar coordinates at ``anchor`` in the upper half-plane.

    ``theta = 0`` is the direction ``ref`` (Euclidean angle of the initial
    tangent) and ``theta`` increases counterclockwise when ``orientation`` is
    +1, clockwise when -1.
    """

    anchor: complex
    ref: float
    orientation: int = 1

    @property
    def frame(self) -> np.ndarray:
        return hyp.frame_matrix(self.anchor, self.ref)

    @classmethod
    def toward(cls, anchor: complex, a: complex, b: complex) -> "PolarChart":
        """Chart at ``anchor`` with theta = 0 toward ``a`` and ``b`` at positive theta."""
        ref = hyp.direction_to(anchor, a)
        turn = (hyp.direction_to(anchor, b) - ref) % (2 * math.pi)
        return cls(anchor=complex(anchor), ref=ref, orientation=1 if turn < math.pi else -1)

    def to_h(self, r, theta):
        w = np.tanh(np.asarray(r) / 2.0) * np.exp(1j * self.orientation * np.asarray(theta))
        zeta = 1j * (1 + w) / (1 - w)
        return hyp.mobius(self.frame, zeta)

    def from_h(self, z):
        f = self.frame
        zeta = hyp.mobius(hyp.sl2_inverse(f), np.asarray(z, dtype=complex))
        w = (zeta - 1j) / (zeta + 1j)
        r = 2.0 * np.arctanh(np.clip(np.abs(w), 0.0, 1.0 - 1e-16))
        theta = self.orientation * np.angle(w)
        return r, theta

    def jacobian(self, r, theta):
        """d(x, y)/d(r, theta) of the chart, shape (..., 2, 2)."""
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        rot = np.exp(1j * self.orientation * theta)
        w = np.tanh(r / 2.0) * rot
        zeta = 1j * (1 + w) / (1 - w)
        g = hyp.mobius_derivative(self.frame, zeta) * 2j / (1 - w) ** 2
        dz_dr = g * 0.5 / np.cosh(r / 2.0) ** 2 * rot
        dz_dth = g * 1j * self.orientation * w
        j = np.empty(np.broadcast(r, theta).shape + (2, 2))
        j[..., 0, 0] = dz_dr.real
        j[..., 1, 0] = dz_dr.imag
        j[..., 0, 1] = dz_dth.real
        j[..., 1, 1] = dz_dth.imag
        return j
