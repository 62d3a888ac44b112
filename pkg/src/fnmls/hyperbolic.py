"""Numerics for the upper half-plane model of the hyperbolic plane.

Points are ``HPoint`` records (or complex numbers / complex arrays in the
vectorized helpers), orientation preserving isometries are ``Isometry``
records wrapping a unit-determinant real 2x2 matrix.  Reflections are
carried as real matrices of determinant -1 acting by ``z -> (a conj(z) + b) /
(c conj(z) + d)``.

All lengths are in units of the curvature -1 plane and all angles are in
radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

# Rotation by pi about i, z -> -1/z.
HALF_TURN = np.array([[0.0, -1.0], [1.0, 0.0]])
# Reflection in the imaginary axis, z -> -conj(z).
AXIS_REFLECTION = np.array([[-1.0, 0.0], [0.0, 1.0]])


@dataclass(frozen=True)
class HPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DomainError(f"non-finite point ({self.x}, {self.y})")
        if self.y <= 0:
            raise DomainError(f"point ({self.x}, {self.y}) is not in the upper half-plane")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def from_complex(cls, z) -> "HPoint":
        return cls(float(z.real), float(z.imag))


@dataclass(frozen=True)
class PolarPoint:
    """Normal polar coordinates about a base point; metric dr^2 + sinh^2(r) dtheta^2."""

    r: float
    theta: float

    def __post_init__(self):
        if self.r < 0:
            raise DomainError("polar radius must be >= 0")
        object.__setattr__(self, "theta", math.fmod(self.theta, 2 * math.pi) % (2 * math.pi))


@dataclass(frozen=True)
class FermiPoint:
    """Fermi coordinates about a closed geodesic of length l.

    ``rho`` is the signed distance to the geodesic and ``t`` the foot point in
    units of the full geodesic (so the metric is d rho^2 + l^2 cosh^2(rho) dt^2).
    """

    rho: float
    t: float


@dataclass(frozen=True)
class Isometry:
    a: float
    b: float
    c: float
    d: float

    @classmethod
    def from_matrix(cls, m) -> "Isometry":
        m = np.asarray(m, dtype=float)
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))

    @classmethod
    def identity(cls) -> "Isometry":
        return cls(1.0, 0.0, 0.0, 1.0)

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def normalized(self) -> "Isometry":
        """Scale to determinant one, sign fixed so the trace is >= 0."""
        det = self.det
        if det <= 0:
            raise DomainError("matrix does not define an orientation preserving isometry")
        s = 1.0 / math.sqrt(det)
        if self.a + self.d < 0:
            s = -s
        return Isometry(self.a * s, self.b * s, self.c * s, self.d * s)

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return Isometry.from_matrix(self.matrix @ other.matrix)

    def inverse(self) -> "Isometry":
        det = self.det
        return Isometry(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def __call__(self, p: HPoint) -> HPoint:
        return apply(self, p)

    @property
    def trace(self) -> float:
        return self.a + self.d

    def translation_length(self) -> float:
        """Translation length of a hyperbolic element (0 for elliptic/parabolic)."""
        n = self.normalized()
        return translation_length_from_trace(n.trace)


def apply(T: Isometry, p: HPoint) -> HPoint:
    """Moebius action of ``T`` on ``p``."""
    return HPoint.from_complex(mobius(T.matrix, p.z))


def dist(p: HPoint, q: HPoint) -> float:
    return float(dist_z(p.z, q.z))


# ---------------------------------------------------------------------------
# vectorized helpers on complex arrays


def arccosh_stable(x):
    """arccosh that stays accurate for arguments just above 1.

    Values below 1 by at most 1e-12 (rounding) are clamped to 1.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 1.0 - 1e-12):
        raise DomainError(f"arccosh argument below 1: {np.min(x)!r}")
    u = np.maximum(x - 1.0, 0.0)
    out = np.where(u < 1e-4, np.log1p(u + np.sqrt(u * (u + 2.0))), np.arccosh(np.maximum(x, 1.0)))
    return out if out.ndim else float(out)


def translation_length_from_trace(tr):
    """2 arccosh(|tr|/2); zero when |tr| <= 2."""
    half = np.abs(np.asarray(tr, dtype=float)) / 2.0
    out = 2.0 * arccosh_stable(np.maximum(half, 1.0))
    return out


def dist_z(z, w):
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    # 2 asinh(|z-w| / (2 sqrt(y y'))) is accurate at short range
    out = 2.0 * np.arcsinh(np.abs(z - w) / (2.0 * np.sqrt(z.imag * w.imag)))
    return out if out.ndim else float(out)


def mobius(m, z):
    """Apply a real 2x2 matrix (det > 0) as a Moebius map to complex ``z``."""
    m = np.asarray(m)
    return (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])


def mobius_derivative(m, z):
    m = np.asarray(m)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    return det / (m[1, 0] * z + m[1, 1]) ** 2


def reflect(m, z):
    """Apply a det -1 matrix as the anti-Moebius map z -> m(conj z)."""
    return mobius(m, np.conj(z))


def reflect_jacobian(m, z):
    """Real 2x2 Jacobians (shape (..., 2, 2)) of z -> m(conj z)."""
    m = np.asarray(m)
    zc = np.conj(np.asarray(z, dtype=complex))
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    g = det / (m[1, 0] * zc + m[1, 1]) ** 2
    p, q = g.real, g.imag
    return np.stack([np.stack([p, q], -1), np.stack([q, -p], -1)], -2)


def holomorphic_jacobian(g):
    """Real 2x2 Jacobian of a holomorphic map with complex derivative ``g``."""
    g = np.asarray(g, dtype=complex)
    p, q = g.real, g.imag
    return np.stack([np.stack([p, -q], -1), np.stack([q, p], -1)], -2)


def translation_matrix(length: float) -> np.ndarray:
    """Translation along the imaginary axis moving i to i e^length."""
    h = 0.5 * length
    return np.array([[math.exp(h), 0.0], [0.0, math.exp(-h)]])


def rotation_matrix(angle: float) -> np.ndarray:
    """Rotation about i turning tangent vectors at i counterclockwise by ``angle``."""
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    return np.array([[c, s], [-s, c]])


def frame_matrix(z: complex, direction: float) -> np.ndarray:
    """Isometry sending i to ``z`` and the upward unit vector at i to the
    unit vector at ``z`` with Euclidean argument ``direction``."""
    y = z.imag
    sy = math.sqrt(y)
    lift = np.array([[sy, z.real / sy], [0.0, 1.0 / sy]])
    return lift @ rotation_matrix(direction - math.pi / 2.0)


def direction_to(z: complex, w: complex) -> float:
    """Euclidean argument of the initial unit tangent of the geodesic z -> w."""
    # move z to i; the derivative of the lift is a positive real, so directions agree
    y = z.imag
    zeta = (w - z.real) / y
    # geodesic from i to zeta: Cayley map to the disk, where geodesics through
    # the centre are straight; the Cayley derivative at i is -i/2.
    u = (zeta - 1j) / (zeta + 1j)
    return float(np.angle(u) + math.pi / 2.0)


def point_at(z: complex, direction: float, distance: float) -> complex:
    return complex(mobius(frame_matrix(z, direction) @ translation_matrix(distance), 1j))


def geodesic_frame(z: complex, w: complex) -> np.ndarray:
    """Frame at ``z`` pointing toward ``w``: maps the imaginary axis onto the
    geodesic through z and w with i -> z and upward -> toward w."""
    return frame_matrix(z, direction_to(z, w))


def reflection_in_geodesic(z: complex, w: complex) -> np.ndarray:
    """Det -1 matrix of the reflection in the geodesic through z and w."""
    g = geodesic_frame(z, w)
    return g @ AXIS_REFLECTION @ np.linalg.inv(g)


def angle_at(v: complex, u: complex, w: complex) -> float:
    """Interior angle at ``v`` of the geodesic triangle (u, v, w), from side lengths."""
    a = dist_z(v, u)
    b = dist_z(v, w)
    c = dist_z(u, w)
    cosv = (math.cosh(a) * math.cosh(b) - math.cosh(c)) / (math.sinh(a) * math.sinh(b))
    return math.acos(max(-1.0, min(1.0, cosv)))


def sl2_normalize(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    det = np.linalg.det(m)
    return m / math.sqrt(abs(det))


def sl2_inverse(m) -> np.ndarray:
    """Inverse of a determinant-one matrix via the adjugate (no cancellation)."""
    m = np.asarray(m, dtype=float)
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]])


def identity_deviation(m) -> float:
    """Max entrywise distance of a normalized matrix from +-I."""
    m = sl2_normalize(m)
    eye = np.eye(2)
    return float(min(np.max(np.abs(m - eye)), np.max(np.abs(m + eye))))


# ---------------------------------------------------------------------------
# trigonometry


def _positive(*values, names):
    for v, n in zip(values, names):
        if not (v > 0 and math.isfinite(v)):
            raise DomainError(f"{n} must be a positive finite number, got {v!r}")


def hexagon_sixth_side(c1: float, c2: float, c3: float) -> float:
    """Side of a right-angled hexagon opposite ``c3`` and between ``c1`` and ``c2``,
    given the three alternate sides."""
    _positive(c1, c2, c3, names=("c1", "c2", "c3"))
    # cosh s - 1 without cancellation, then s = 2 asinh(sqrt(x / 2)); short seams keep full precision
    x = (math.cosh(c1 - c2) + math.cosh(c3)) / (math.sinh(c1) * math.sinh(c2))
    return 2.0 * math.asinh(math.sqrt(0.5 * x))


def right_triangle_hypotenuse(a: float, b: float) -> float:
    if a < 0 or b < 0:
        raise DomainError("legs must be non-negative")
    return arccosh_stable(math.cosh(a) * math.cosh(b))


def right_triangle_angles(a: float, b: float, e: float, tol: float = 1e-9):
    """Angles opposite the legs ``a`` and ``b`` of a right triangle with hypotenuse ``e``."""
    _positive(a, b, e, names=("a", "b", "e"))
    ce = math.cosh(e)
    if abs(ce - math.cosh(a) * math.cosh(b)) > tol * ce:
        raise DomainError("side lengths do not form a right triangle")
    se, te = math.sinh(e), math.tanh(e)
    alpha = math.atan2(math.sinh(a) / se, math.tanh(b) / te)
    beta = math.atan2(math.sinh(b) / se, math.tanh(a) / te)
    return alpha, beta


def triangle_solve_sas(b: float, c: float, gamma: float):
    """Two sides and the included angle.

    Returns ``(a, alpha, beta)``: the side ``a`` opposite ``gamma``, the angle
    ``alpha`` opposite ``b`` and the angle ``beta`` opposite ``c``.
    """
    _positive(b, c, names=("b", "c"))
    if not (0.0 < gamma < math.pi):
        raise DomainError("included angle must lie in (0, pi)")
    ca = math.cosh(b) * math.cosh(c) - math.sinh(b) * math.sinh(c) * math.cos(gamma)
    a = arccosh_stable(ca)
    if a <= 0:
        raise DomainError("degenerate triangle")
    sa = math.sinh(a)
    sin_g = math.sin(gamma)
    alpha = math.atan2(math.sinh(b) * sin_g / sa,
                       (ca * math.cosh(c) - math.cosh(b)) / (sa * math.sinh(c)))
    beta = math.atan2(math.sinh(c) * sin_g / sa,
                      (ca * math.cosh(b) - math.cosh(c)) / (sa * math.sinh(b)))
    return a, alpha, beta
