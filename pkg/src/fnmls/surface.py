"""Closed hyperbolic surfaces in Fenchel-Nielsen coordinates.

Conventions
-----------
Each pants is realized as two copies of the right-angled hexagon with
half-cuffs ``l/2`` (see :mod:`fnmls.hexagon`).  Boundary slot k of a pants is
the hexagon side ``c_{k+1}``; it is oriented along the counterclockwise
boundary of the hexagon (pants on the left) and its ``t = 0`` mark is the
hexagon vertex *preceding* that side (V0, V2, V4 for slots 0, 1, 2).  The
other seam foot on the cuff is then at ``t = 1/2``.

The twist ``alpha`` of a cuff is a fraction of the cuff length and glues
``gamma(t) ~ gamma'(alpha - t)``, both sides parametrized by their own
orientation.  Changing ``alpha`` by 1 is a full Dehn twist.

Surfaces of curvature ``kappa != -1`` are carried in the curvature -1
normalization internally; lengths read and reported at the boundary are in
the surface's own metric (``length_unit = length_kappa * sqrt(-kappa)``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import brentq, least_squares

from . import hyperbolic as hyp
from .errors import DomainError, InconsistentDataError
from .hexagon import build_hexagon
from .pants import CurveWord, PantsGraph, cyclic_reduce, invert, reduce_word

# vertex index of the t = 0 mark and of the far end of each boundary slot
SLOT_MARK = (0, 2, 4)
SLOT_END = (1, 3, 5)
# seams as hexagon vertex pairs: s1 = V5V0, s2 = V3V4, s3 = V1V2
SEAM_VERTICES = ((5, 0), (3, 4), (1, 2))


@dataclass(frozen=True)
class FenchelNielsen:
    graph: PantsGraph
    lengths: tuple
    twists: tuple
    kappa: float = -1.0

    def __post_init__(self):
        n = len(self.graph.cuffs)
        lengths = tuple(float(x) for x in self.lengths)
        twists = tuple(float(x) for x in self.twists)
        if len(lengths) != n or len(twists) != n:
            raise DomainError(f"need {n} lengths and {n} twists")
        if not all(x > 0 and math.isfinite(x) for x in lengths):
            raise DomainError("cuff lengths must be positive and finite")
        if not all(math.isfinite(x) for x in twists):
            raise DomainError("twists must be finite")
        if not self.kappa < 0:
            raise DomainError("curvature must be negative")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "twists", twists)

    @property
    def genus(self) -> int:
        return self.graph.genus

    @property
    def scale(self) -> float:
        """Factor converting surface lengths to curvature -1 units."""
        return math.sqrt(-self.kappa)

    @property
    def unit_lengths(self) -> tuple:
        return tuple(x * self.scale for x in self.lengths)

    def with_twists(self, twists) -> "FenchelNielsen":
        return FenchelNielsen(self.graph, self.lengths, tuple(twists), self.kappa)

    def with_lengths(self, lengths) -> "FenchelNielsen":
        return FenchelNielsen(self.graph, tuple(lengths), self.twists, self.kappa)

    def check_cuff_bounds(self, i0: float, eps: float = 0.0) -> bool:
        """Whether every cuff lies in [(1-eps) 2 i0, (1+eps) 26 (G-1)]."""
        lo = (1 - eps) * 2 * i0
        hi = (1 + eps) * 26 * (self.genus - 1)
        return all(lo <= x <= hi for x in self.lengths)

    @cached_property
    def frames(self) -> "PantsFrames":
        return PantsFrames.build(self.graph, self.unit_lengths)

    @cached_property
    def holonomy(self) -> "Holonomy":
        return holonomy(self)

    @cached_property
    def local_holonomy(self) -> "LocalHolonomy":
        return LocalHolonomy.build(self)


@dataclass(frozen=True)
class PantsData:
    """Twist-independent realization of one pants in its own frame."""

    hexagon: object
    seam_reflections: tuple  # det -1 matrices for s1, s2, s3
    cuff_frames: tuple  # frames N_k: imaginary axis -> cuff k, i -> mark, upward -> orientation
    cuff_lengths: tuple  # full cuff lengths (unit curvature)
    boundary: tuple  # x_k matrices, x0 x1 x2 = 1


@dataclass(frozen=True)
class PantsFrames:
    graph: PantsGraph
    lengths: tuple
    pants: tuple

    @classmethod
    def build(cls, graph: PantsGraph, lengths) -> "PantsFrames":
        slot_len = {}
        for e, c in enumerate(graph.cuffs):
            for end in c.ends:
                slot_len[end] = lengths[e]
        pants = []
        for v in range(graph.n_pants):
            ls = tuple(slot_len[(v, k)] for k in range(3))
            pants.append(pants_data(*ls))
        return cls(graph=graph, lengths=tuple(lengths), pants=tuple(pants))

    def gluing(self, e: int, twist: float) -> np.ndarray:
        """Isometry from the frame of the second end's pants to the first's."""
        (u, i), (w, j) = self.graph.cuffs[e].ends
        length = self.lengths[e]
        nu = self.pants[u].cuff_frames[i]
        nw = self.pants[w].cuff_frames[j]
        return nu @ hyp.translation_matrix(twist * length) @ hyp.HALF_TURN @ hyp.sl2_inverse(nw)


def pants_data(l0: float, l1: float, l2: float) -> PantsData:
    h = build_hexagon(0.5 * l0, 0.5 * l1, 0.5 * l2)
    v = h.vertices
    refl = tuple(hyp.reflection_in_geodesic(v[a], v[b]) for a, b in SEAM_VERTICES)
    r1, r2, r3 = refl
    frames = tuple(hyp.geodesic_frame(v[SLOT_MARK[k]], v[SLOT_END[k]]) for k in range(3))
    # translations along each cuff in its orientation, as products of seam reflections
    a0 = r3 @ r1
    a1 = r2 @ r3
    a2 = r1 @ r2
    boundary = tuple(hyp.sl2_inverse(a) for a in (a0, a1, a2))
    return PantsData(hexagon=h, seam_reflections=refl, cuff_frames=frames,
                     cuff_lengths=(l0, l1, l2), boundary=boundary)


@dataclass(frozen=True)
class Holonomy:
    """Generator images of a surface group representation."""

    graph: PantsGraph
    matrices: np.ndarray  # (n_generators, 2, 2)
    pants_maps: tuple  # g_v: pants frame -> global frame

    @cached_property
    def inverses(self) -> np.ndarray:
        m = self.matrices
        return np.stack([np.stack([m[:, 1, 1], -m[:, 0, 1]], -1), np.stack([-m[:, 1, 0], m[:, 0, 0]], -1)], -2)

    def letter_matrix(self, x: int) -> np.ndarray:
        m = self.matrices[abs(x) - 1]
        return m if x > 0 else self.inverses[abs(x) - 1]

    def evaluate(self, word) -> np.ndarray:
        letters = word.letters if isinstance(word, CurveWord) else word
        out = np.eye(2)
        for x in letters:
            out = out @ self.letter_matrix(x)
        return out

    def trace(self, word) -> float:
        return float(np.trace(self.evaluate(word)))

    def length(self, word) -> float:
        tr = self.trace(word)
        if abs(tr) <= 2.0 + 1e-9:
            raise InconsistentDataError(f"word {word} is not hyperbolic (|tr| = {abs(tr)!r})")
        return float(hyp.translation_length_from_trace(tr))

    def reduced_generator_matrices(self) -> np.ndarray:
        kept, _ = self.graph.reduced_basis
        return np.array([self.matrices[g - 1] for g in kept])


def _tree_steps(fn: FenchelNielsen) -> dict:
    """(x, y) -> transition T with g_y = g_x @ T, for adjacent pants in the tree."""
    graph = fn.graph
    order, parent = graph.tree
    step = {}
    for v in order[1:]:
        u, e = parent[v]
        m = fn.frames.gluing(e, fn.twists[e])
        (a, _), _ = graph.cuffs[e].ends
        t = m if a == u else hyp.sl2_inverse(m)
        step[(u, v)] = t
        step[(v, u)] = hyp.sl2_inverse(t)
    return step


def pants_maps(fn: FenchelNielsen, base: int) -> dict:
    """Frames g_v of every pants relative to the frame of pants ``base``."""
    step = _tree_steps(fn)
    g = {base: np.eye(2)}
    queue = [base]
    while queue:
        x = queue.pop()
        for (a, b), t in step.items():
            if a == x and b not in g:
                g[b] = g[a] @ t
                queue.append(b)
    return g


def local_factors(fn: FenchelNielsen) -> list:
    """Per generator ``(a, L, b)`` with image ``g_a L g_b^-1``."""
    out = []
    for label in fn.graph.generators:
        if label[0] == "x":
            _, v, k = label
            out.append((v, fn.frames.pants[v].boundary[k], v))
        else:
            e = label[1]
            (u, _), (w, _) = fn.graph.cuffs[e].ends
            out.append((u, fn.frames.gluing(e, fn.twists[e]), w))
    return out


def holonomy(fn: FenchelNielsen, base: int = None) -> Holonomy:
    """Representation of the pants-graph presentation realizing ``fn``.

    ``base`` is the pants whose frame serves as the global frame (default:
    the tree root).  Different bases give conjugate representations.
    """
    base = fn.graph.tree[0][0] if base is None else base
    g = pants_maps(fn, base)
    mats = [g[a] @ m @ hyp.sl2_inverse(g[b]) for a, m, b in local_factors(fn)]
    return Holonomy(graph=fn.graph, matrices=np.array(mats),
                    pants_maps=tuple(g[v] for v in range(fn.graph.n_pants)))


def _mul2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product of stacks of 2x2 matrices stored as (2, 2, N)."""
    return np.array([[a[0, 0] * b[0, 0] + a[0, 1] * b[1, 0], a[0, 0] * b[0, 1] + a[0, 1] * b[1, 1]],
                     [a[1, 0] * b[0, 0] + a[1, 1] * b[1, 0], a[1, 0] * b[0, 1] + a[1, 1] * b[1, 1]]])


@dataclass(frozen=True)
class LocalHolonomy:
    """Word evaluation that keeps every factor in its own pants frame.

    A global frame makes generators living far from its base pants into
    matrices with huge entries, and traces of words mixing far-apart pieces
    then lose most of their digits.  Here a letter is ``g_a L g_b^-1`` and a
    cyclic word becomes ``tr(L_1 T(b_1, a_2) L_2 ... L_n T(b_n, a_1))`` with
    ``T(b, a) = g_b^-1 g_a`` built directly along the tree.
    """

    graph: PantsGraph
    local: np.ndarray  # (2 n_gen, 2, 2); inverse letters in the second half
    src: np.ndarray
    dst: np.ndarray
    transition: np.ndarray  # (n_pants, n_pants, 2, 2)

    @classmethod
    def build(cls, fn: FenchelNielsen) -> "LocalHolonomy":
        fac = local_factors(fn)
        local = [m for _, m, _ in fac] + [hyp.sl2_inverse(m) for _, m, _ in fac]
        src = [a for a, _, _ in fac] + [b for _, _, b in fac]
        dst = [b for _, _, b in fac] + [a for a, _, _ in fac]
        n = fn.graph.n_pants
        trans = np.empty((n, n, 2, 2))
        for b in range(n):
            g = pants_maps(fn, b)
            for a in range(n):
                trans[b, a] = g[a]
        return cls(graph=fn.graph, local=np.array(local), src=np.array(src), dst=np.array(dst),
                   transition=trans)

    def _index(self, words: np.ndarray) -> np.ndarray:
        n_gen = len(self.graph.generators)
        w = words.astype(np.int64)
        return np.where(w > 0, w - 1, n_gen - w - 1)

    def traces(self, words: np.ndarray) -> np.ndarray:
        """Traces of a batch of equal-length cyclic words (presentation letters)."""
        words = np.atleast_2d(np.asarray(words))
        idx = self._index(words)
        n = idx.shape[1]
        acc = self.local[idx[:, 0]].transpose(1, 2, 0).copy()
        for k in range(1, n + 1):
            prev, cur = idx[:, k - 1], idx[:, k % n]
            acc = _mul2(acc, self.transition[self.dst[prev], self.src[cur]].transpose(1, 2, 0))
            if k < n:
                acc = _mul2(acc, self.local[cur].transpose(1, 2, 0))
        return acc[0, 0] + acc[1, 1]

    def trace(self, word) -> float:
        letters = word.letters if isinstance(word, CurveWord) else tuple(word)
        return float(self.traces(np.array([letters]))[0])

    def length(self, word) -> float:
        tr = self.trace(word)
        if abs(tr) <= 2.0 + 1e-9:
            raise InconsistentDataError(f"word {word} is not hyperbolic (|tr| = {abs(tr)!r})")
        return float(hyp.translation_length_from_trace(tr))


def curve_length(fn: FenchelNielsen, w) -> float:
    """Length of the closed geodesic in the free homotopy class of ``w``."""
    word = w if isinstance(w, CurveWord) else CurveWord(tuple(w))
    if len(word) == 0:
        raise DomainError("trivial word has no geodesic")
    return fn.local_holonomy.length(cyclic_reduce(word.letters)) / fn.scale


@dataclass(frozen=True)
class NineCurveSystem:
    gammas: tuple
    deltas: tuple
    etas: tuple

    def all_words(self) -> list:
        return list(self.gammas) + list(self.deltas) + list(self.etas)

    def labels(self) -> list:
        n = len(self.gammas)
        return ([f"gamma{j}" for j in range(n)] + [f"delta{j}" for j in range(n)]
                + [f"eta{j}" for j in range(n)])


def nine_curves(graph: PantsGraph) -> NineCurveSystem:
    """Cuffs, one transverse curve per cuff, and its image under a Dehn twist.

    For a cuff between distinct pants u (slot i) and w (slot j) the transverse
    curve is ``x[u,i+2] * B(x[w,j+1])`` where ``B`` carries w's generators to
    the near side (conjugation by the stable letter for non-tree cuffs); the
    four boundary curves of the X-piece multiply to 1 in the cyclic order
    x[u,i+1], x[u,i+2], B(x[w,j+1]), B(x[w,j+2]), and this is a product of
    two consecutive ones, hence simple.  For a self-glued cuff the stable
    letter itself crosses the cuff once.

    The twisted companion satisfies ``eta_j(alpha) = delta_j(alpha + 1)``.
    """
    gammas, deltas, etas = [], [], []
    for e, c in enumerate(graph.cuffs):
        gammas.append(graph.cuff_word(e))
        (u, i), (w, j) = c.ends
        if u == w:
            t = graph.letter(("t", e))
            gam = graph.slot_word(u, i)
            deltas.append(CurveWord((t,)))
            etas.append(CurveWord(invert(gam) + (t,)))
            continue
        if e in graph.tree_cuffs:
            (u, i), (w, j) = graph.parent_side(e)
            far = graph.slot_word(w, (j + 1) % 3)
        else:
            t = graph.letter(("t", e))
            far = (t,) + graph.slot_word(w, (j + 1) % 3) + (-t,)
        near = graph.slot_word(u, (i + 2) % 3)
        gam = graph.slot_word(u, i)
        deltas.append(CurveWord(near + far))
        etas.append(CurveWord(near + invert(gam) + far + gam))
    return NineCurveSystem(tuple(gammas), tuple(deltas), tuple(etas))


def nine_lengths(fn: FenchelNielsen, system: NineCurveSystem = None) -> np.ndarray:
    system = system or nine_curves(fn.graph)
    return np.array([curve_length(fn, w) for w in system.all_words()])


def bounded_word_spectrum(fn: FenchelNielsen, max_len: int, trivial_tol: float = 1e-4):
    """Lengths of every conjugacy class of words of length <= ``max_len``.

    Words are enumerated in the reduced generators (all relations but one
    eliminated), so the classes are those of a free group of rank 2G; the few
    that are trivial in the surface group (conjugates of the remaining
    relator) have ``|tr| = 2`` and are reported with ``mask`` False and length 0.
    Returns ``(words, lengths, mask)`` lists per word length, words in
    presentation letters.
    """
    from .words import cached_classes

    kept = np.array(fn.graph.reduced_basis[0], dtype=np.int64)
    classes = cached_classes(len(kept), max_len)
    words_out, lengths_out, mask_out = [], [], []
    for w in classes:
        pw = np.sign(w) * kept[np.abs(w).astype(np.int64) - 1]
        tr = np.abs(fn.local_holonomy.traces(pw))
        mask = tr > 2.0 + trivial_tol
        lengths = np.zeros(len(pw))
        lengths[mask] = hyp.translation_length_from_trace(tr[mask]) / fn.scale
        words_out.append(pw)
        lengths_out.append(lengths)
        mask_out.append(mask)
    return words_out, lengths_out, mask_out


def mls_epsilon(fn0: FenchelNielsen, fn1: FenchelNielsen, curves) -> float:
    """Smallest eps with 1 - eps <= L1(c) / L0(c) <= 1 + eps over ``curves``."""
    curves = list(curves)
    if not curves:
        raise DomainError("empty curve set")
    if fn0.graph != fn1.graph:
        raise DomainError("surfaces are marked by different pants graphs")
    worst = 0.0
    for w in curves:
        worst = max(worst, abs(curve_length(fn1, w) / curve_length(fn0, w) - 1.0))
    return worst


def mls_epsilon_from_lengths(l0, l1) -> float:
    l0 = np.asarray(l0, dtype=float)
    l1 = np.asarray(l1, dtype=float)
    if l0.size == 0:
        raise DomainError("empty curve set")
    return float(np.max(np.abs(l1 / l0 - 1.0)))


def twist_recovery(fn_target: FenchelNielsen, delta_lengths, eta_lengths,
                   bound: float = 4.0, max_bound: float = 256.0, tol: float = 1e-7) -> tuple:
    """Recover the twists from the lengths of the delta_j and eta_j curves.

    ``fn_target`` supplies the pants graph, cuff lengths and curvature; its
    twists are ignored.  Each delta_j depends on alpha_j only, so each twist is
    found by a one-dimensional scan for ``length(delta_j) = observed``; the
    two mirror-image roots are told apart by eta_j, and the chosen root is
    polished by least squares on both residuals.
    """
    graph = fn_target.graph
    system = nine_curves(graph)
    n = len(graph.cuffs)
    delta_lengths = np.asarray(delta_lengths, dtype=float)
    eta_lengths = np.asarray(eta_lengths, dtype=float)
    if delta_lengths.shape != (n,) or eta_lengths.shape != (n,):
        raise DomainError(f"need {n} delta and {n} eta lengths")
    base = fn_target.with_twists([0.0] * n)
    twists = []
    for j in range(n):
        twists.append(_recover_one(base, system, j, delta_lengths[j], eta_lengths[j],
                                   bound, max_bound, tol))
    return tuple(twists)


def _recover_one(base, system, j, obs_delta, obs_eta, bound, max_bound, tol):
    frames = base.frames
    graph = base.graph
    cache = {}

    def lengths_at(a):
        if a not in cache:
            tw = [0.0] * len(graph.cuffs)
            tw[j] = a
            fn = FenchelNielsen(graph, base.lengths, tuple(tw), base.kappa)
            fn.__dict__["frames"] = frames  # reuse the twist-independent pants
            cache[a] = (curve_length(fn, system.deltas[j]), curve_length(fn, system.etas[j]))
        return cache[a]

    def fd(a):
        return lengths_at(a)[0] - obs_delta

    def fe(a):
        return lengths_at(a)[1] - obs_eta

    b = bound
    while True:
        grid = np.linspace(-b, b, int(round(40 * b)) + 1)
        vals = np.array([fd(a) for a in grid])
        cands = []
        for k in range(len(grid) - 1):
            if vals[k] == 0.0:
                cands.append(grid[k])
            elif vals[k] * vals[k + 1] < 0:
                cands.append(brentq(fd, grid[k], grid[k + 1], xtol=1e-15, rtol=1e-15, maxiter=200))
        kmin = int(np.argmin(vals))
        if 0 < kmin < len(grid) - 1 and abs(vals[kmin]) < 1e-3:
            cands.append(grid[kmin])
        if cands:
            break
        if b >= max_bound:
            raise InconsistentDataError(f"no twist in [-{b}, {b}] reproduces delta_{j} length {obs_delta!r}")
        b *= 2
    best = min(cands, key=lambda a: abs(fe(a)) + abs(fd(a)))
    scale = max(obs_delta, obs_eta, 1.0)
    res = least_squares(lambda x: [fd(float(x[0])) / scale, fe(float(x[0])) / scale], [best],
                        xtol=1e-15, ftol=1e-15, gtol=1e-15, method="lm")
    a = float(res.x[0])
    if max(abs(fd(a)), abs(fe(a))) > tol * scale:
        raise InconsistentDataError(f"delta/eta lengths of cuff {j} are inconsistent "
                                    f"(residual {max(abs(fd(a)), abs(fe(a)))!r})")
    return a


def area(genus: int, kappa: float) -> float:
    """Area 2 pi (2 - 2G) / kappa of a closed surface of constant curvature kappa."""
    if genus < 2:
        raise DomainError("genus must be >= 2")
    if not kappa < 0:
        raise DomainError("kappa must be negative")
    return 2 * math.pi * (2 - 2 * genus) / kappa


def entropy(kappa: float) -> float:
    """Topological entropy sqrt(-kappa) of the geodesic flow."""
    if not kappa < 0:
        raise DomainError("kappa must be negative")
    return math.sqrt(-kappa)


def entropy_bounds(h0: float, eps: float):
    """Interval forced on h(g) by eps-close length spectra."""
    return h0 / (1 + eps), h0 / (1 - eps)


def area_bounds(a0: float, eps: float):
    return (1 - eps) ** 2 * a0, (1 + eps) ** 2 * a0


def random_surface(graph: PantsGraph, rng, length_range=(1.0, 4.0), twist_range=(-0.5, 0.5),
                   kappa: float = -1.0) -> FenchelNielsen:
    n = len(graph.cuffs)
    lengths = rng.uniform(*length_range, size=n)
    twists = rng.uniform(*twist_range, size=n)
    return FenchelNielsen(graph, tuple(lengths), tuple(twists), kappa)
