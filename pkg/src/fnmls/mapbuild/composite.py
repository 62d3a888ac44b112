"""The piecewise near-isometry between two Fenchel-Nielsen surfaces.

Points are handled pants by pants in the pants frame of :mod:`fnmls.surface`.
A point of the universal cover of pants ``v`` is stored folded as
``(z_h, steps)``: ``z_h`` in the base hexagon and ``steps`` the seam
reflections (in order) that carry it back, ``P = R[j1] ... R[jK] z_h``.
Unfolding the stretched point with the same seams of the target pants gives
the image, which is equivariant by construction.

Two assemblies of the twist stage are offered:

``"relative"`` (default)
    ``f = T(a1 - a0, w(l1)) o sigma`` where ``sigma`` is the pants-wise stretch
    (it respects any common gluing twist) and the twist map only carries
    twist ``a0`` to ``a1`` in the target collars.
``"literal"``
    ``f = T(a1, w(l1)) o sigma o T(-a0, w(l0))``: untwist in the source
    collars, stretch between the untwisted structures, re-twist in the
    target collars.  The two collar widths differ, so on the band between
    the rims the two shears do not cancel.

On each side of a cuff the twist map is applied in that pants' own Fermi
coordinates (``rho`` in ``[-w, 0]`` toward the cuff) as a translation along
the cuff by ``da * l * (w + rho) / (2 w)``; both sides move by ``da / 2`` at
the cuff, which is the same map as the one-sided formula across the collar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import hyperbolic as hyp
from ..errors import DomainError
from ..hexagon import triangulate
from ..surface import SEAM_VERTICES, FenchelNielsen, PantsData
from .stretch import PolarChart, StretchMap
from .twist import collar_width, sheared_translation

# a seam meeting each cuff slot (s1 meets c1 and c3, s2 meets c2)
SEAM_AT_SLOT = (0, 1, 0)
MIRROR_SEAM = 0
MODES = ("relative", "literal")


def apply_isometry(m, z):
    """Image and real Jacobian of per-point matrices ``m`` (..., 2, 2), det +-1."""
    m = np.asarray(m, dtype=float)
    z = np.asarray(z, dtype=complex)
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    w = np.where(det > 0, z, np.conj(z))
    den = m[..., 1, 0] * w + m[..., 1, 1]
    img = (m[..., 0, 0] * w + m[..., 0, 1]) / den
    g = det / den ** 2
    p, q = g.real, g.imag
    s = np.where(det > 0, 1.0, -1.0)
    jac = np.empty(np.shape(img) + (2, 2))
    jac[..., 0, 0] = p
    jac[..., 0, 1] = -q * s
    jac[..., 1, 0] = q
    jac[..., 1, 1] = p * s
    return img, jac


def inv2(j):
    det = j[..., 0, 0] * j[..., 1, 1] - j[..., 0, 1] * j[..., 1, 0]
    out = np.empty_like(j)
    out[..., 0, 0] = j[..., 1, 1] / det
    out[..., 1, 1] = j[..., 0, 0] / det
    out[..., 0, 1] = -j[..., 0, 1] / det
    out[..., 1, 0] = -j[..., 1, 0] / det
    return out


def _inv_iso(m):
    """Inverse of det +-1 matrices, stacked."""
    det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
    s = np.sign(det)[..., None, None]
    adj = np.empty_like(m)
    adj[..., 0, 0] = m[..., 1, 1]
    adj[..., 1, 1] = m[..., 0, 0]
    adj[..., 0, 1] = -m[..., 0, 1]
    adj[..., 1, 0] = -m[..., 1, 0]
    return adj * s


@dataclass(frozen=True)
class HexagonSide:
    """Seam geometry of one hexagon: side tests and reflections."""

    reflections: np.ndarray  # (3, 2, 2)
    seam_frames_inv: np.ndarray  # (3, 2, 2)
    inside_sign: np.ndarray  # (3,)

    @classmethod
    def build(cls, pants: PantsData, interior: complex) -> "HexagonSide":
        v = pants.hexagon.vertices
        inv = np.array([hyp.sl2_inverse(hyp.geodesic_frame(v[a], v[b])) for a, b in SEAM_VERTICES])
        signs = np.array([np.sign(hyp.mobius(g, interior).real) for g in inv])
        return cls(reflections=np.array(pants.seam_reflections), seam_frames_inv=inv, inside_sign=signs)

    def outside(self, z, tol=1e-12):
        """(N, 3) booleans: strictly across seam j from the hexagon."""
        z = np.asarray(z, dtype=complex)
        out = np.empty(z.shape + (3,), dtype=bool)
        for j in range(3):
            x = hyp.mobius(self.seam_frames_inv[j], z).real
            out[..., j] = x * self.inside_sign[j] < -tol
        return out


@dataclass(frozen=True)
class PantsMap:
    """Stretch map between the base hexagons of one pants in two structures."""

    src: PantsData
    dst: PantsData
    stretch: tuple
    chart0: PolarChart
    chart1: PolarChart
    cum0: np.ndarray
    cum1: np.ndarray
    side0: HexagonSide
    side1: HexagonSide

    @classmethod
    def build(cls, src: PantsData, dst: PantsData) -> "PantsMap":
        t0, t1 = triangulate(src.hexagon), triangulate(dst.hexagon)
        maps = tuple(StretchMap(a, b) for a, b in zip(t0, t1))
        v0, v1 = src.hexagon.vertices, dst.hexagon.vertices
        ch0 = PolarChart.toward(v0[0], v0[5], v0[4])
        ch1 = PolarChart.toward(v1[0], v1[5], v1[4])
        cum0 = np.concatenate([[0.0], np.cumsum([t.angles[0] for t in t0])])
        cum1 = np.concatenate([[0.0], np.cumsum([t.angles[0] for t in t1])])
        mid0 = ch0.to_h(0.5 * maps[1].src.radius(0.5 * maps[1].src.apex), cum0[1] + 0.5 * maps[1].src.apex)
        mid1 = ch1.to_h(0.5 * maps[1].dst.radius(0.5 * maps[1].dst.apex), cum1[1] + 0.5 * maps[1].dst.apex)
        return cls(src=src, dst=dst, stretch=maps, chart0=ch0, chart1=ch1, cum0=cum0, cum1=cum1,
                   side0=HexagonSide.build(src, complex(mid0)), side1=HexagonSide.build(dst, complex(mid1)))

    def triangle_of(self, z_h):
        r, th = self.chart0.from_h(z_h)
        idx = np.clip(np.searchsorted(self.cum0, th, side="right") - 1, 0, 3)
        return idx, r, th

    def sigma(self, z_h, with_jac=True, triangle=None):
        """Stretch a point of the source base hexagon into the target base hexagon."""
        z_h = np.asarray(z_h, dtype=complex)
        idx, r, th = self.triangle_of(z_h)
        if triangle is not None:
            idx = np.broadcast_to(np.asarray(triangle), idx.shape)
        out = np.empty(z_h.shape, dtype=complex)
        jac = np.empty(z_h.shape + (2, 2)) if with_jac else None
        for i in range(4):
            mask = idx == i
            if not np.any(mask):
                continue
            m = self.stretch[i]
            loc = np.clip(th[mask] - self.cum0[i], 0.0, m.src.apex)
            rr = np.minimum(r[mask], m.src.radius(loc))
            r1, t1 = m.eval(rr, loc)
            out[mask] = self.chart1.to_h(r1, t1 + self.cum1[i])
            if with_jac:
                jp = m.jacobian(rr, loc)
                jc1 = self.chart1.jacobian(r1, t1 + self.cum1[i])
                jc0 = self.chart0.jacobian(rr, loc + self.cum0[i])
                jac[mask] = jc1 @ jp @ inv2(jc0)
        return out, jac

    def fold(self, z, max_steps: int = 200):
        """Fold source cover points into the base hexagon.  Returns ``(z_h, steps)``."""
        z = np.array(z, dtype=complex, copy=True)
        steps = []
        for _ in range(max_steps):
            out = self.side0.outside(z)
            bad = out.any(axis=-1)
            if not bad.any():
                break
            j = np.where(bad, np.argmax(out, axis=-1), -1)
            for k in range(3):
                sel = j == k
                if sel.any():
                    z[sel] = hyp.reflect(self.side0.reflections[k], z[sel])
            steps.append(j)
        else:
            raise DomainError("folding did not terminate; point outside the pants")
        steps = np.stack(steps, axis=-1) if steps else np.full(z.shape + (0,), -1)
        return z, steps

    def word_matrix(self, steps, target: bool):
        """``R[j1] ... R[jK]`` per point."""
        refl = (self.side1 if target else self.side0).reflections
        n = steps.shape[:-1]
        w = np.broadcast_to(np.eye(2), n + (2, 2)).copy()
        for k in range(steps.shape[-1]):
            j = steps[..., k]
            for s in range(3):
                sel = j == s
                if sel.any():
                    w[sel] = w[sel] @ refl[s]
        return w


@dataclass(frozen=True)
class MapResult:
    image: np.ndarray
    jac: np.ndarray  # real Jacobian in half-plane coordinates, or None
    rim_gap: np.ndarray  # distance to the nearest active collar rim (inf if none)


@dataclass(frozen=True)
class PiecewiseMap:
    fn0: FenchelNielsen
    fn1: FenchelNielsen
    mode: str = "relative"
    pants: tuple = field(default=None, repr=False)

    def __post_init__(self):
        if self.fn0.graph != self.fn1.graph:
            raise DomainError("surfaces are marked by different pants graphs")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}")
        if self.pants is None:
            pm = tuple(PantsMap.build(a, b) for a, b in zip(self.fn0.frames.pants, self.fn1.frames.pants))
            object.__setattr__(self, "pants", pm)

    @property
    def graph(self):
        return self.fn0.graph

    def _stage(self, which: str):
        """Per pants, per slot ``(rate, w)`` of a twist stage."""
        g = self.graph
        l0, l1 = self.fn0.unit_lengths, self.fn1.unit_lengths
        a0, a1 = self.fn0.twists, self.fn1.twists
        out = []
        for v in range(g.n_pants):
            row = []
            for k in range(3):
                e = g.slot_cuff(v, k)
                if which == "relative":
                    w = collar_width(l1[e])
                    row.append(((a1[e] - a0[e]) * l1[e] / (2 * w), w))
                elif which == "untwist":
                    w = collar_width(l0[e])
                    row.append((-a0[e] * l0[e] / (2 * w), w))
                else:
                    w = collar_width(l1[e])
                    row.append((a1[e] * l1[e] / (2 * w), w))
            out.append(tuple(row))
        return tuple(out)

    def _twist(self, v, z, steps, stage, target: bool, with_jac: bool):
        pm = self.pants[v]
        data = pm.dst if target else pm.src
        side = pm.side1 if target else pm.side0
        w_mat = pm.word_matrix(steps, target)
        odd = (np.sum(steps >= 0, axis=-1) % 2) == 1
        jac = np.broadcast_to(np.eye(2), z.shape + (2, 2)).copy() if with_jac else None
        gap = np.full(z.shape + (3,), np.inf)
        z = z.copy()
        for k in range(3):
            rate, w = stage[v][k]
            if rate == 0.0:
                continue
            frame = np.where(odd[..., None, None],
                             w_mat @ side.reflections[SEAM_AT_SLOT[k]] @ data.cuff_frames[k],
                             w_mat @ data.cuff_frames[k])
            u, ju = apply_isometry(_inv_iso(frame), z)
            rho = np.arctanh(u.real / np.abs(u))
            gap[..., k] = np.abs(rho + w)
            u2, js = sheared_translation(u, rate, w)
            z, jb = apply_isometry(frame, u2)
            if with_jac:
                jac = jb @ js @ ju @ jac
        return z, jac, gap

    def _run(self, v, z_h, steps, with_jac):
        pm = self.pants[v]
        z_h = np.atleast_1d(np.asarray(z_h, dtype=complex))
        steps = np.asarray(steps).reshape(z_h.shape + (-1,))
        gap = np.full(z_h.shape + (3,), np.inf)
        p, jw = apply_isometry(pm.word_matrix(steps, False), z_h)
        pre = inv2(jw) if with_jac else None
        if self.mode == "literal":
            p2, ja, gap = self._twist(v, p, steps, self._stage("untwist"), False, with_jac)
            z_h, steps = pm.fold(p2)
            if with_jac:
                _, jf = apply_isometry(pm.word_matrix(steps, False), z_h)
                pre = inv2(jf) @ ja
        y_h, js = pm.sigma(z_h, with_jac)
        y, ju = apply_isometry(pm.word_matrix(steps, True), y_h)
        stage = self._stage("relative" if self.mode == "relative" else "retwist")
        y2, jt, gap_b = self._twist(v, y, steps, stage, True, with_jac)
        jac = jt @ ju @ js @ pre if with_jac else None
        return y2, jac, np.concatenate([gap, gap_b], axis=-1), z_h

    def evaluate(self, v: int, z_h, steps, with_jac: bool = True) -> MapResult:
        """Image of the folded source point ``(z_h, steps)`` of pants ``v``.

        The Jacobian is taken with respect to the unfolded source point.
        """
        y, jac, gaps, _ = self._run(v, z_h, steps, with_jac)
        return MapResult(image=y, jac=jac, rim_gap=gaps.min(axis=-1))

    def kink_data(self, v: int, z_h, steps):
        """Where the non-smooth loci of the map sit relative to a point.

        Returns ``(z_k, gaps)``: the base-hexagon point whose position decides
        the stretch-map kinks (the folded untwisted point in literal mode) and
        the distances to the six possible collar rims (inf when inactive).
        """
        _, _, gaps, z_k = self._run(v, z_h, steps, False)
        return z_k, gaps

    def evaluate_point(self, v: int, z, with_jac: bool = True) -> MapResult:
        """Image of a source cover point of pants ``v`` given unfolded."""
        z_h, steps = self.pants[v].fold(np.atleast_1d(np.asarray(z, dtype=complex)))
        return self.evaluate(v, z_h, steps, with_jac)

    def _deck(self, v, k, steps, target):
        pm = self.pants[v]
        side = pm.side1 if target else pm.side0
        w_mat = pm.word_matrix(steps, target)
        odd = (np.sum(steps >= 0, axis=-1) % 2) == 1
        return np.where(odd[..., None, None], w_mat @ side.reflections[SEAM_AT_SLOT[k]], w_mat)

    def _glue(self, v, k, target):
        """Isometry taking the neighbour's pants frame to pants ``v``'s, across slot ``k``."""
        fn = self.fn1 if target else self.fn0
        e = self.graph.slot_cuff(v, k)
        ends = self.graph.cuffs[e].ends
        w, j = ends[1] if ends[0] == (v, k) else ends[0]
        pv = fn.frames.pants[v]
        pw = fn.frames.pants[w]
        m = (pv.cuff_frames[k] @ hyp.translation_matrix(fn.twists[e] * fn.unit_lengths[e])
             @ hyp.HALF_TURN @ hyp.sl2_inverse(pw.cuff_frames[j]))
        return w, m

    def evaluate_cover(self, v: int, z, with_jac: bool = True, depth: int = 2) -> MapResult:
        """Like :meth:`evaluate_point` but ``z`` may lie beyond a cuff of pants ``v``;
        such points are evaluated in the neighbouring pants and carried back."""
        pm = self.pants[v]
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        z_h, steps = pm.fold(z)
        slot = np.full(z.shape, -1)
        for k in range(3):
            u = hyp.mobius(hyp.sl2_inverse(pm.src.cuff_frames[k]), z_h)
            slot = np.where((slot < 0) & (u.real > 0), k, slot)
        image = np.empty(z.shape, dtype=complex)
        jac = np.empty(z.shape + (2, 2)) if with_jac else None
        gap = np.empty(z.shape)
        inside = slot < 0
        if inside.any():
            r = self.evaluate(v, z_h[inside], steps[inside], with_jac)
            image[inside], gap[inside] = r.image, r.rim_gap
            if with_jac:
                jac[inside] = r.jac
        for k in range(3):
            sel = slot == k
            if not sel.any():
                continue
            if depth <= 0:
                raise DomainError("point too far outside the pants")
            w, g0 = self._glue(v, k, False)
            _, g1 = self._glue(v, k, True)
            d0 = self._deck(v, k, steps[sel], False) @ g0
            d1 = self._deck(v, k, steps[sel], True) @ g1
            zw, j_in = apply_isometry(_inv_iso(d0), z[sel])
            r = self.evaluate_cover(w, zw, with_jac, depth - 1)
            img, j_out = apply_isometry(d1, r.image)
            image[sel], gap[sel] = img, r.rim_gap
            if with_jac:
                jac[sel] = j_out @ r.jac @ j_in
        return MapResult(image=image, jac=jac, rim_gap=gap)


def continuity_residuals(f: PiecewiseMap, n_per_edge: int = 100) -> dict:
    """Largest two-sided mismatch (hyperbolic distance) on each kind of gluing edge.

    Diagonals compare the two adjacent stretch maps, seams the evaluation from
    the hexagon and from its mirror, cuffs the evaluation in the two adjacent
    pants transported by the source and target gluings.
    """
    u = (np.arange(n_per_edge) + 0.5) / n_per_edge
    worst = {"diagonal": 0.0, "seam": 0.0, "cuff": 0.0}
    for v, pm in enumerate(f.pants):
        for i in (1, 2, 3):
            th = np.full(n_per_edge, pm.cum0[i])
            r = u * pm.stretch[i].src.e
            z = pm.chart0.to_h(r, th)
            a, _ = pm.sigma(z, False, triangle=i - 1)
            b, _ = pm.sigma(z, False, triangle=i)
            worst["diagonal"] = max(worst["diagonal"], float(np.max(hyp.dist_z(a, b))))
        verts = pm.src.hexagon.vertices
        for j, (a_, b_) in enumerate(SEAM_VERTICES):
            d = hyp.dist_z(verts[a_], verts[b_])
            frame = hyp.geodesic_frame(verts[a_], verts[b_])
            z = hyp.mobius(frame, 1j * np.exp(u * d))
            one = f.evaluate(v, z, np.full((n_per_edge, 1), -1), False).image
            two = f.evaluate(v, z, np.full((n_per_edge, 1), j), False).image
            worst["seam"] = max(worst["seam"], float(np.max(hyp.dist_z(one, two))))
    g = f.graph
    for e, c in enumerate(g.cuffs):
        (pu, i), (pw, _) = c.ends
        length = f.fn0.unit_lengths[e]
        z = hyp.mobius(f.pants[pu].src.cuff_frames[i], 1j * np.exp(u * length))
        m0 = f.fn0.frames.gluing(e, f.fn0.twists[e])
        m1 = f.fn1.frames.gluing(e, f.fn1.twists[e])
        a = f.evaluate_point(pu, z, False).image
        b = hyp.mobius(m1, f.evaluate_point(pw, hyp.mobius(hyp.sl2_inverse(m0), z), False).image)
        worst["cuff"] = max(worst["cuff"], float(np.max(hyp.dist_z(a, b))))
    return worst


def compose_f(fn0: FenchelNielsen, fn1: FenchelNielsen, mode: str = "relative") -> PiecewiseMap:
    return PiecewiseMap(fn0, fn1, mode)
