"""Mollification of the piecewise map near its non-smooth loci.

The kinks of ``f`` lie on the triangle diagonals, the seams, the cuffs and
the collar rims of the twist stage, and they meet at the hexagon vertices.
The smoothed map is

    F = bar(chi * L(f_delta) + (1 - chi) * L(f))

where ``L`` lifts the half-plane to the hyperboloid, ``bar`` projects back,
``f_delta`` is the bump-weighted barycentre of ``f`` over the geodesic disk of
radius ``delta`` (Gauss-Legendre in geodesic polar coordinates) and ``chi``
is a smooth cutoff that equals 1 on the vertex balls ``B(p, r/4)`` and on the
bands of half-width ``w_edge / 2`` around every kink, and vanishes outside
``B(p, r/2)`` and the bands of half-width ``w_edge``.  Averaging on the
hyperboloid commutes with isometries, so the construction does not depend on
the chart and reproduces an isometry exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .. import hyperbolic as hyp
from ..errors import DomainError
from ..surface import SEAM_VERTICES
from .composite import MapResult, PiecewiseMap, apply_isometry

QUAD_ORDER = 16
# geodesic lines of the base hexagon carrying kinks: diagonals, then cuffs
_DIAGONALS = ((0, 4), (0, 3), (0, 2))
_CUFF_SIDES = ((0, 1), (2, 3), (4, 5))
CHUNK = 64


def cutoff(t):
    """Smooth step: 1 for ``t <= 1/2``, 0 for ``t >= 1``."""
    t = np.asarray(t, dtype=float)
    a = 1.0 - t
    b = t - 0.5
    ga = np.where(a > 0, np.exp(-1.0 / np.where(a > 0, a, 1.0)), 0.0)
    gb = np.where(b > 0, np.exp(-1.0 / np.where(b > 0, b, 1.0)), 0.0)
    return ga / (ga + gb)


def bump(x):
    """``exp(-1 / (1 - x^2))`` on ``|x| < 1``, zero outside (unnormalized)."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 1
    return np.where(inside, np.exp(-1.0 / np.where(inside, 1.0 - x * x, 1.0)), 0.0)


def quadrature(delta: float, order: int = QUAD_ORDER):
    """Nodes (points of H around i) and weights of the mollifier on the disk of radius ``delta``.

    Tensor Gauss-Legendre in geodesic polar coordinates with area element
    ``sinh(rho) drho dphi``; weights are normalized to sum to one.
    """
    x, wx = np.polynomial.legendre.leggauss(order)
    rho = 0.5 * delta * (x + 1.0)
    w_rho = 0.5 * delta * wx * bump(rho / delta) * np.sinh(rho)
    phi = math.pi * (x + 1.0)
    w_phi = math.pi * wx
    w = (w_rho[:, None] * w_phi[None, :]).ravel()
    disk = (np.tanh(rho / 2)[:, None] * np.exp(1j * phi)[None, :]).ravel()
    nodes = 1j * (1 + disk) / (1 - disk)
    return nodes, w / w.sum()


def lift(z):
    """Half-plane to hyperboloid ``-X0^2 + X1^2 + X2^2 = -1``, with the (..., 3, 2) Jacobian."""
    x, y = z.real, z.imag
    rr = x * x + y * y
    pts = np.stack([(1 + rr) / (2 * y), x / y, (rr - 1) / (2 * y)], axis=-1)
    jac = np.empty(z.shape + (3, 2))
    y2 = 2 * y * y
    jac[..., 0, 0] = x / y
    jac[..., 0, 1] = (y * y - 1 - x * x) / y2
    jac[..., 1, 0] = 1 / y
    jac[..., 1, 1] = -x / (y * y)
    jac[..., 2, 0] = x / y
    jac[..., 2, 1] = (y * y + 1 - x * x) / y2
    return pts, jac


def project(s):
    """Timelike vector to the half-plane point on its ray, with the (..., 2, 3) Jacobian."""
    s0, s1, s2 = s[..., 0], s[..., 1], s[..., 2]
    d = s0 - s2
    q = np.sqrt(s0 * s0 - s1 * s1 - s2 * s2)
    z = s1 / d + 1j * q / d
    jac = np.empty(s.shape[:-1] + (2, 3))
    jac[..., 0, 0] = -s1 / d ** 2
    jac[..., 0, 1] = 1 / d
    jac[..., 0, 2] = s1 / d ** 2
    jac[..., 1, 0] = s0 / (q * d) - q / d ** 2
    jac[..., 1, 1] = -s1 / (q * d)
    jac[..., 1, 2] = -s2 / (q * d) + q / d ** 2
    return z, jac


def vertex_ball_radius(f: PiecewiseMap) -> float:
    """Half the smallest distance between distinct vertices of the kink graph.

    Vertices are the seam feet.  Inside a hexagon all pairs are compared; on a
    cuff the feet of the two sides are offset by the source twist (they
    coincide in the untwisted structure used by the literal mode).
    """
    fn = f.fn0
    best = math.inf
    for pm in f.pants:
        v = pm.src.hexagon.vertices
        for a in range(6):
            for b in range(a + 1, 6):
                best = min(best, hyp.dist_z(v[a], v[b]))
    if f.mode == "relative":
        for e, length in enumerate(fn.unit_lengths):
            off = fn.twists[e] % 0.5
            d = length * min(off, 0.5 - off)
            if d > 1e-12:
                best = min(best, d)
    return 0.5 * best


@dataclass(frozen=True)
class SmoothedMap:
    """The mollified map; evaluated on demand (no precomputed grids)."""

    base: PiecewiseMap
    delta: float
    r: float
    w_edge: float
    nodes: np.ndarray = field(repr=False, default=None)
    weights: np.ndarray = field(repr=False, default=None)
    lines: tuple = field(repr=False, default=None)

    def __post_init__(self):
        if self.nodes is None:
            nodes, weights = quadrature(self.delta)
            object.__setattr__(self, "nodes", nodes)
            object.__setattr__(self, "weights", weights)
        if self.lines is None:
            out = []
            for pm in self.base.pants:
                v = pm.src.hexagon.vertices
                pairs = _DIAGONALS + tuple(SEAM_VERTICES) + _CUFF_SIDES
                out.append(np.array([hyp.sl2_inverse(hyp.geodesic_frame(v[a], v[b])) for a, b in pairs]))
            object.__setattr__(self, "lines", tuple(out))

    @property
    def pants(self):
        return self.base.pants

    @property
    def graph(self):
        return self.base.graph

    @property
    def mode(self):
        return self.base.mode

    # -- cutoff ---------------------------------------------------------------

    def blend_weight(self, v: int, p):
        """``chi`` at unfolded source points ``p`` of pants ``v``."""
        pm = self.pants[v]
        z_h, steps = pm.fold(np.atleast_1d(np.asarray(p, dtype=complex)))
        z_k, gaps = self.base.kink_data(v, z_h, steps)
        keep = np.ones(z_k.shape)
        for g in self.lines[v]:
            u = hyp.mobius(g, z_k)
            d = np.abs(np.arcsinh(u.real / u.imag))
            keep *= 1.0 - cutoff(d / self.w_edge)
        for g in gaps.T:
            keep *= 1.0 - cutoff(g / self.w_edge)
        for vert in pm.src.hexagon.vertices:
            keep *= 1.0 - cutoff(hyp.dist_z(z_k, vert) / (0.5 * self.r))
        return 1.0 - keep

    def _blend_gradient(self, v, p):
        h = 1e-7 * p.imag
        gx = (self.blend_weight(v, p + h) - self.blend_weight(v, p - h)) / (2 * h)
        gy = (self.blend_weight(v, p + 1j * h) - self.blend_weight(v, p - 1j * h)) / (2 * h)
        return np.stack([gx, gy], axis=-1)

    # -- mollified map --------------------------------------------------------

    def mollified(self, v: int, p, with_jac: bool = True):
        """``f_delta`` and its Jacobian at unfolded source points ``p``."""
        p = np.atleast_1d(np.asarray(p, dtype=complex))
        img = np.empty(p.shape, dtype=complex)
        jac = np.empty(p.shape + (2, 2)) if with_jac else None
        zeta = self.nodes
        dq = np.zeros((len(zeta), 2, 2))
        dq[:, 0, 0] = 1.0
        dq[:, 0, 1] = zeta.real
        dq[:, 1, 1] = zeta.imag
        for a in range(0, len(p), CHUNK):
            pc = p[a:a + CHUNK]
            q = pc.real[:, None] + pc.imag[:, None] * zeta[None, :]
            res = self.base.evaluate_cover(v, q.ravel(), with_jac)
            pts, dl = lift(res.image)
            pts = pts.reshape(q.shape + (3,))
            s = np.einsum("q,nqk->nk", self.weights, pts)
            z, dp = project(s)
            img[a:a + CHUNK] = z
            if with_jac:
                terms = (dl @ res.jac).reshape(q.shape + (3, 2)) @ dq[None]
                ds = np.einsum("q,nqkj->nkj", self.weights, terms)
                jac[a:a + CHUNK] = dp @ ds
        return img, jac

    def evaluate(self, v: int, z_h, steps, with_jac: bool = True) -> MapResult:
        pm = self.pants[v]
        z_h = np.atleast_1d(np.asarray(z_h, dtype=complex))
        steps = np.asarray(steps).reshape(z_h.shape + (-1,))
        base = self.base.evaluate(v, z_h, steps, with_jac)
        p, _ = apply_isometry(pm.word_matrix(steps, False), z_h)
        chi = self.blend_weight(v, p)
        image = base.image.copy()
        jac = base.jac.copy() if with_jac else None
        sel = np.flatnonzero(chi > 0)
        if len(sel):
            c = chi[sel]
            fd, jd = self.mollified(v, p[sel], with_jac)
            xd, ld = lift(fd)
            xf, lf = lift(base.image[sel])
            mix = c[:, None] * xd + (1 - c)[:, None] * xf
            z, dp = project(mix)
            image[sel] = z
            if with_jac:
                grad = self._blend_gradient(v, p[sel])
                inner = (c[:, None, None] * (ld @ jd) + (1 - c)[:, None, None] * (lf @ base.jac[sel])
                         + (xd - xf)[:, :, None] * grad[:, None, :])
                jac[sel] = dp @ inner
        return MapResult(image=image, jac=jac, rim_gap=np.full(z_h.shape, np.inf))


def smooth(f: PiecewiseMap, delta: float, w_edge: float = None) -> SmoothedMap:
    """Mollify ``f`` at radius ``delta``; requires ``0 < delta < r/4``."""
    r = vertex_ball_radius(f)
    if not (delta > 0 and delta < r / 4):
        raise DomainError(f"delta must lie in (0, r/4) = (0, {r / 4:.6g}), got {delta!r}")
    if w_edge is None:
        w_edge = 2.0 * delta
    if w_edge < 2.0 * delta:
        raise DomainError("w_edge must be at least 2 delta")
    return SmoothedMap(base=f, delta=float(delta), r=float(r), w_edge=float(w_edge))


@dataclass(frozen=True)
class SmoothingDeviation:
    delta: float
    c0: float  # sup hyperbolic distance between F and f
    c1: float  # sup operator norm of the difference of the metric-normalized Jacobians
    lipschitz: float  # sup singular value of Df over all samples
    n_blend: int  # samples inside the blend region

    @property
    def c0_ratio(self) -> float:
        """``c0 / (L delta)``."""
        return self.c0 / (self.lipschitz * self.delta)


def deviation(F: SmoothedMap, n_samples: int, seed: int, max_rounds: int = 200) -> SmoothingDeviation:
    """C0 and C1 distance between ``F`` and its base map.

    Both vanish outside the blend region, so samples are drawn until
    ``n_samples`` of them fall where ``chi > 0``; the Lipschitz bound of the
    base map uses every sample drawn.
    """
    from .distortion import SampleSet, evaluate_samples, sample_points

    rng = np.random.default_rng(seed)
    kept = []
    lip = 0.0
    count = 0
    for _ in range(max_rounds):
        s = sample_points(F.pants, 4 * n_samples, int(rng.integers(2 ** 63)))
        base = evaluate_samples(F.base, s)
        lip = max(lip, float(base.sv_max[base.valid].max()))
        for v, pm in enumerate(F.pants):
            sel = np.flatnonzero((s.pants == v) & base.valid)
            chi = F.blend_weight(v, base.point[sel])
            kept.append(SampleSet(*(getattr(s, k)[sel[chi > 0]] for k in
                                    ("pants", "parity", "triangle", "r", "theta", "phi"))))
            count += int(np.sum(chi > 0))
        if count >= n_samples:
            break
    s = SampleSet(*(np.concatenate([getattr(k, a) for k in kept])[:n_samples] for a in
                    ("pants", "parity", "triangle", "r", "theta", "phi")))
    if len(s) == 0:
        raise DomainError("no samples landed in the blend region")
    a = evaluate_samples(F, s)
    b = evaluate_samples(F.base, s)
    ok = b.valid
    c0 = float(np.max(hyp.dist_z(a.image[ok], b.image[ok])))
    c1 = float(np.max(np.linalg.norm(a.jac[ok] - b.jac[ok], 2, axis=(1, 2))))
    lip = max(lip, float(b.sv_max[ok].max()))
    return SmoothingDeviation(delta=F.delta, c0=c0, c1=c1, lipschitz=lip, n_blend=int(ok.sum()))
