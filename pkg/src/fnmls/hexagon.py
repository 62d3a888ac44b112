"""Right-angled hexagons and their four-triangle decomposition.

Side order (counterclockwise) is ``c1, s3, c2, s2, c3, s1`` where the ``c`` are
half-cuffs and the ``s`` seams: ``s3`` joins c1 to c2, ``s2`` joins c2 to c3
and ``s1`` joins c3 to c1.  Vertex
``V0`` sits between ``s1`` and ``c1`` and is the anchor of the triangulation,
then ``V1 = c1|s3``, ``V2 = s3|c2``, ``V3 = c2|s2``, ``V4 = s2|c3``,
``V5 = c3|s1``.

Triangles (anchor first, then the two other vertices in the order used by the
stretch maps)::

    T0 = (V0, V5, V4)   right angle at V5, legs s1, c3
    T1 = (V0, V4, V3)   inner
    T2 = (V0, V3, V2)   inner
    T3 = (V0, V2, V1)   right angle at V1, legs c1, s3

Diagonals: ``e1 = V0V4``, ``e2 = V0V3``, ``e3 = V0V2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext

import numpy as np

from . import hyperbolic as hyp
from .errors import DomainError

HALF_PI = 0.5 * math.pi

# (anchor, A, B) vertex indices of the four triangles
TRIANGLE_VERTICES = ((0, 5, 4), (0, 4, 3), (0, 3, 2), (0, 2, 1))


@dataclass(frozen=True)
class RightHexagon:
    c: tuple  # half-cuffs c1, c2, c3
    s: tuple  # seams s1, s2, s3
    vertices: tuple = field(repr=False)  # six complex numbers V0..V5

    @property
    def sides(self):
        """The six side lengths in boundary order c1, s3, c2, s2, c3, s1."""
        c1, c2, c3 = self.c
        s1, s2, s3 = self.s
        return (c1, s3, c2, s2, c3, s1)

    @property
    def vertex_array(self) -> np.ndarray:
        return np.array(self.vertices, dtype=complex)

    def area(self) -> float:
        # Gauss-Bonnet: (n - 2) pi - sum of interior angles
        return 4 * math.pi - 6 * HALF_PI


@dataclass(frozen=True)
class GeodesicTriangle:
    """Geodesic triangle with an anchor.

    ``sides[k]`` is the side opposite ``vertex_labels[k]`` and ``angles[k]`` the
    interior angle at it; label 0 is the anchor.
    """

    sides: tuple
    angles: tuple
    vertex_labels: tuple
    realization: tuple = field(repr=False)

    def deficit(self) -> float:
        return math.pi - sum(self.angles)

    def law_of_cosines_residual(self) -> float:
        a = self.sides
        g = self.angles
        worst = 0.0
        for k in range(3):
            i, j = (k + 1) % 3, (k + 2) % 3
            lhs = math.cosh(a[k])
            rhs = math.cosh(a[i]) * math.cosh(a[j]) - math.sinh(a[i]) * math.sinh(a[j]) * math.cos(g[k])
            worst = max(worst, abs(lhs - rhs) / lhs)
        return worst


def hexagon_steps(sides) -> list:
    """Isometries moving the boundary frame along each side and turning left."""
    turn = hyp.rotation_matrix(HALF_PI)
    return [hyp.translation_matrix(L) @ turn for L in sides]


def build_hexagon(c1: float, c2: float, c3: float) -> RightHexagon:
    """Solve and realize the right-angled hexagon with alternate sides c1, c2, c3.

    The anchor V0 is placed at i with c1 running straight up the imaginary
    axis; the interior lies to the left (Re z < 0 near the anchor).
    """
    for name, v in (("c1", c1), ("c2", c2), ("c3", c3)):
        if not (v > 0 and math.isfinite(v)):
            raise DomainError(f"{name} must be positive, got {v!r}")
    s1 = hyp.hexagon_sixth_side(c3, c1, c2)
    s2 = hyp.hexagon_sixth_side(c2, c3, c1)
    s3 = hyp.hexagon_sixth_side(c1, c2, c3)
    verts = _realize(c1, c2, c3)
    return RightHexagon(c=(c1, c2, c3), s=(s1, s2, s3), vertices=tuple(verts))


REALIZE_DIGITS = 40


def _realize(c1: float, c2: float, c3: float) -> list:
    """Vertices of the exact hexagon with half-cuffs c1, c2, c3.

    Seams and frame products are carried in extended precision and each vertex
    is rounded once; a double-precision walk loses up to ~1e-6 when two cuffs
    are long and the seam between them is short.
    """
    with localcontext() as ctx:
        ctx.prec = REALIZE_DIGITS
        one, two = Decimal(1), Decimal(2)
        dc = [Decimal(float(c)) for c in (c1, c2, c3)]

        def cosh(x):
            e = x.exp()
            return (e + one / e) / two

        def sinh(x):
            e = x.exp()
            return (e - one / e) / two

        def sixth(a, b, c):
            x = (cosh(a - b) + cosh(c)) / (sinh(a) * sinh(b))
            y = (x / two).sqrt()
            return two * (y + (y * y + one).sqrt()).ln()

        s1, s2, s3 = sixth(dc[2], dc[0], dc[1]), sixth(dc[1], dc[2], dc[0]), sixth(dc[0], dc[1], dc[2])
        r = two.sqrt() / two
        a, b, c, d = one, Decimal(0), Decimal(0), one
        verts = []
        for L in (dc[0], s3, dc[1], s2, dc[2], s1):
            den = c * c + d * d
            verts.append(complex(float((a * c + b * d) / den), float((a * d - b * c) / den)))
            e = (L / two).exp()
            # frame @ translation(L) @ quarter turn
            a, b, c, d = a * e, b / e, c * e, d / e
            a, b, c, d = r * (a - b), r * (a + b), r * (c - d), r * (c + d)
        return verts


def closure_residual(h: RightHexagon) -> float:
    """Distance from +-I of the product of the six side moves and six right turns.

    Six left turns of pi/2 close up a right-angled hexagon exactly (total
    turning 3 pi), so the product is +-I iff the side data closes.
    """
    prod = np.eye(2)
    for step in hexagon_steps(h.sides):
        prod = prod @ step
    return hyp.identity_deviation(prod)


def realization_residual(h: RightHexagon) -> float:
    """Max deviation of the realized vertices from the stored sides and right angles."""
    v = h.vertex_array
    worst = 0.0
    for k, L in enumerate(h.sides):
        worst = max(worst, abs(hyp.dist_z(v[k], v[(k + 1) % 6]) - L))
    for k in range(6):
        ang = hyp.angle_at(v[k], v[(k - 1) % 6], v[(k + 1) % 6])
        worst = max(worst, abs(ang - HALF_PI))
    return worst


def triangulate(h: RightHexagon) -> list:
    """Split ``h`` into the four triangles T0..T3 by the diagonals from V0."""
    c1, c2, c3 = h.c
    s1, s2, s3 = h.s
    v = h.vertices

    e1 = hyp.right_triangle_hypotenuse(s1, c3)
    ang0_p, ang0_v4 = hyp.right_triangle_angles(c3, s1, e1)
    t0 = GeodesicTriangle(sides=(c3, e1, s1), angles=(ang0_p, HALF_PI, ang0_v4),
                          vertex_labels=(0, 5, 4), realization=(v[0], v[5], v[4]))

    g1 = HALF_PI - ang0_v4
    e2, ang1_v3, ang1_p = hyp.triangle_solve_sas(e1, s2, g1)
    t1 = GeodesicTriangle(sides=(s2, e2, e1), angles=(ang1_p, g1, ang1_v3),
                          vertex_labels=(0, 4, 3), realization=(v[0], v[4], v[3]))

    g2 = HALF_PI - ang1_v3
    e3, ang2_v2, ang2_p = hyp.triangle_solve_sas(e2, c2, g2)
    t2 = GeodesicTriangle(sides=(c2, e3, e2), angles=(ang2_p, g2, ang2_v2),
                          vertex_labels=(0, 3, 2), realization=(v[0], v[3], v[2]))

    e3_outer = hyp.right_triangle_hypotenuse(c1, s3)
    ang3_p, ang3_v2 = hyp.right_triangle_angles(s3, c1, e3_outer)
    t3 = GeodesicTriangle(sides=(s3, c1, e3_outer), angles=(ang3_p, ang3_v2, HALF_PI),
                          vertex_labels=(0, 2, 1), realization=(v[0], v[2], v[1]))
    return [t0, t1, t2, t3]


def diagonals(h: RightHexagon):
    tris = triangulate(h)
    return (tris[0].sides[1], tris[1].sides[1], tris[2].sides[1])


@dataclass(frozen=True)
class HexagonDelta:
    side_rel: tuple
    side_abs: tuple
    diagonal_rel: tuple
    diagonal_abs: tuple
    angle_rel: tuple
    angle_abs: tuple

    @property
    def max_rel(self) -> float:
        return max(max(self.side_rel), max(self.diagonal_rel), max(self.angle_rel))

    @property
    def max_abs(self) -> float:
        return max(max(self.side_abs), max(self.diagonal_abs), max(self.angle_abs))


def _rel(xs, ys):
    return tuple(abs(y / x - 1.0) for x, y in zip(xs, ys))


def _abs(xs, ys):
    return tuple(abs(y - x) for x, y in zip(xs, ys))


def compare_hexagons(h0: RightHexagon, h1: RightHexagon) -> HexagonDelta:
    """Per-side, per-diagonal and per-angle deviations of ``h1`` relative to ``h0``."""
    t0, t1 = triangulate(h0), triangulate(h1)
    a0 = [a for t in t0 for a in t.angles]
    a1 = [a for t in t1 for a in t.angles]
    d0, d1 = diagonals(h0), diagonals(h1)
    return HexagonDelta(
        side_rel=_rel(h0.sides, h1.sides), side_abs=_abs(h0.sides, h1.sides),
        diagonal_rel=_rel(d0, d1), diagonal_abs=_abs(d0, d1),
        angle_rel=_rel(a0, a1), angle_abs=_abs(a0, a1),
    )
