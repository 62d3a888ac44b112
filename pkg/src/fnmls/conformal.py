"""Sampled-data versions of the conformal-factor estimates.

A :class:`DiskChart` is a square lattice clipped to a Euclidean disk of
radius ``R < 1`` in the Poincare disk model of curvature ``kappa``; the
reference metric is ``e^lambda (dx^2 + dy^2)`` with
``e^lambda = 4 / (-kappa) / (1 - x^2 - y^2)^2``.  Integrals use the reference
area weights rescaled to unit total mass.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from ._io import atomic_write, fmt
from .errors import ConsistencyError, DomainError, PreconditionError, RegimeError, SchemaError

UNIT_BALL_AREA = math.pi  # volume of the unit ball in R^2


def conformal_constant(kappa: float) -> float:
    """``c(kappa)`` with ``e^lambda = c / (1 - |x|^2)^2`` of curvature ``kappa``."""
    if not kappa < 0:
        raise DomainError("kappa must be negative")
    return 4.0 / (-kappa)


@dataclass(frozen=True)
class SampledFunction:
    values: np.ndarray
    weights: np.ndarray  # area element of the reference metric per node
    points: np.ndarray = field(default=None, repr=False)  # complex node positions, optional
    kappa: float = -1.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        w = np.asarray(self.weights, dtype=float).ravel()
        if v.shape != w.shape:
            raise DomainError("values and weights differ in size")
        if v.size == 0:
            raise DomainError("empty sample")
        if not np.all(w > 0):
            raise DomainError("weights must be positive")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "weights", w)
        if self.points is not None:
            object.__setattr__(self, "points", np.asarray(self.points, dtype=complex).ravel())

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    @property
    def mass(self) -> np.ndarray:
        """Unit-total-mass weights."""
        return self.weights / self.total

    def inner(self, a, b) -> float:
        return float(np.sum(self.mass * a * b))

    @property
    def mean(self) -> float:
        return self.inner(self.values, 1.0)

    @property
    def l2(self) -> float:
        return math.sqrt(self.inner(self.values, self.values))

    def with_values(self, values) -> "SampledFunction":
        return SampledFunction(values, self.weights, self.points, self.kappa)


@dataclass(frozen=True)
class DiskChart:
    radius: float
    h: float
    kappa: float = -1.0
    x: np.ndarray = field(init=False, repr=False)
    y: np.ndarray = field(init=False, repr=False)
    mask: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not (0 < self.radius < 1):
            raise DomainError("chart radius must lie in (0, 1)")
        if not self.h > 0:
            raise DomainError("grid spacing must be positive")
        conformal_constant(self.kappa)
        n = int(math.floor(self.radius / self.h))
        ax = self.h * np.arange(-n, n + 1)
        x, y = np.meshgrid(ax, ax, indexing="ij")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "mask", x * x + y * y < self.radius ** 2)

    @property
    def exp_lambda(self) -> np.ndarray:
        return conformal_constant(self.kappa) / (1.0 - self.x ** 2 - self.y ** 2) ** 2

    @property
    def area(self) -> float:
        """Reference-metric area of the disk ``|x| < R``."""
        r2 = self.radius ** 2
        return conformal_constant(self.kappa) * math.pi * r2 / (1.0 - r2)

    @property
    def interior(self) -> np.ndarray:
        """Nodes whose four lattice neighbours are in the chart."""
        m = self.mask
        inner = np.zeros_like(m)
        inner[1:-1, 1:-1] = m[1:-1, 1:-1] & m[2:, 1:-1] & m[:-2, 1:-1] & m[1:-1, 2:] & m[1:-1, :-2]
        return inner

    def node_weights(self, where=None) -> np.ndarray:
        """Lattice area weights rescaled so the chart's weights sum to its area."""
        w = self.exp_lambda * self.h ** 2
        w = w * (self.area / w[self.mask].sum())
        return w[self.mask if where is None else where]

    def points(self, where=None) -> np.ndarray:
        m = self.mask if where is None else where
        return self.x[m] + 1j * self.y[m]

    def sample(self, fn) -> SampledFunction:
        """``fn(x, y)`` on the chart nodes."""
        vals = np.broadcast_to(fn(self.x, self.y), self.x.shape)[self.mask]
        return SampledFunction(vals, self.node_weights(), self.points(), self.kappa)

    def grid(self, s: SampledFunction, where=None) -> np.ndarray:
        """Values of ``s`` (sampled on ``where`` nodes) placed on the full lattice, NaN elsewhere."""
        g = np.full(self.x.shape, np.nan)
        g[self.mask if where is None else where] = s.values
        return g

    def hyperbolic_distance(self, a, b):
        """Distance in the reference metric between disk points."""
        num = 2 * np.abs(a - b) ** 2
        den = (1 - np.abs(a) ** 2) * (1 - np.abs(b) ** 2)
        return np.arccosh(1 + num / den) / math.sqrt(-self.kappa)


def laplacian(chart: DiskChart, values: np.ndarray) -> np.ndarray:
    """Five-point Euclidean Laplacian on interior nodes (NaN elsewhere)."""
    g = values
    out = np.full(g.shape, np.nan)
    c = g[1:-1, 1:-1]
    lap = (g[2:, 1:-1] + g[:-2, 1:-1] + g[1:-1, 2:] + g[1:-1, :-2] - 4 * c) / chart.h ** 2
    out[1:-1, 1:-1] = lap
    out[~chart.interior] = np.nan
    return out


def conformal_curvature(u: SampledFunction, kappa: float, chart: DiskChart) -> SampledFunction:
    """Curvature of ``e^{2u} g1`` at interior nodes, ``g1`` the chart metric of curvature ``kappa``.

    ``K = e^{-2u} (-e^{-lambda} Lap u + kappa)``.
    """
    inner = chart.interior
    if _stencil_width(inner) < 5:
        raise DomainError("grid too small: need a 5x5 block of interior nodes")
    if kappa != chart.kappa:
        raise DomainError("kappa differs from the chart curvature")
    grid = chart.grid(u)
    lap = laplacian(chart, grid)
    k = np.exp(-2 * grid) * (-lap / chart.exp_lambda + kappa)
    return SampledFunction(k[inner], chart.node_weights(inner), chart.points(inner), kappa)


def _stencil_width(inner) -> int:
    best = 0
    for row in inner:
        run = 0
        for v in row:
            run = run + 1 if v else 0
            best = max(best, run)
    rows = int(np.sum(inner.any(axis=1)))
    return min(best, rows)


@dataclass(frozen=True)
class MaxPrincipleResult:
    holds: bool  # None when inconclusive
    witness: int  # index of the maximizer among the interior nodes
    lhs: float  # e^{2 u(p)}
    rhs: float  # kappa / K(p)
    inconclusive: bool


def max_principle_bound(u: SampledFunction, k_g: SampledFunction, kappa: float, chart: DiskChart,
                        tol: float = None) -> MaxPrincipleResult:
    """Check ``e^{2u(p)} <= kappa / K(p)`` at the maximizer ``p`` of ``u``.

    ``k_g`` lives on the interior nodes (as returned by
    :func:`conformal_curvature`).  A maximizer on the outer ring of interior
    nodes is reported as inconclusive.
    """
    if np.any(k_g.values >= 0):
        raise PreconditionError("K_g must be negative everywhere")
    inner = chart.interior
    ug = chart.grid(u)[inner]
    if ug.shape != k_g.values.shape:
        raise DomainError("curvature sample does not match the interior nodes")
    i = int(np.argmax(ug))
    lhs = math.exp(2 * ug[i])
    rhs = kappa / k_g.values[i]
    # interior nodes whose neighbours are interior too
    deep = np.zeros_like(inner)
    deep[1:-1, 1:-1] = (inner[1:-1, 1:-1] & inner[2:, 1:-1] & inner[:-2, 1:-1]
                        & inner[1:-1, 2:] & inner[1:-1, :-2])
    on_edge = not deep[inner][i]
    tol = chart.h if tol is None else tol
    if on_edge:
        return MaxPrincipleResult(holds=None, witness=i, lhs=lhs, rhs=rhs, inconclusive=True)
    return MaxPrincipleResult(holds=bool(lhs <= rhs * (1 + tol)), witness=i, lhs=lhs, rhs=rhs,
                              inconclusive=False)


def cs_defect(rho: SampledFunction, c: float, rtol: float = 1e-12):
    """``(int |rho - mean|, sqrt(1 - c^2) |rho|_2)`` under ``c |rho|_2 <= int rho``."""
    if not (0 < c < 1):
        raise DomainError("c must lie in (0, 1)")
    norm = rho.l2
    mean = rho.mean
    if c * norm > mean * (1 + rtol) + rtol:
        raise PreconditionError("hypothesis c |rho|_2 <= int rho fails for this sample")
    l1 = float(np.sum(rho.mass * np.abs(rho.values - mean)))
    bound = math.sqrt(1 - c * c) * norm
    if l1 > bound * (1 + 1e-9) + 1e-12:
        raise ConsistencyError(f"L1 deviation {l1} exceeds the bound {bound}")
    return l1, bound


def lipschitz_estimate(rho: SampledFunction, kappa: float = None, k: int = 8) -> float:
    """Largest difference quotient over each node's ``k`` nearest neighbours."""
    if rho.points is None:
        raise DomainError("sample has no node positions")
    kappa = rho.kappa if kappa is None else kappa
    pts = np.column_stack([rho.points.real, rho.points.imag])
    k = min(k + 1, len(pts))
    _, idx = cKDTree(pts).query(pts, k=k)
    a = rho.points[:, None]
    b = rho.points[idx[:, 1:]]
    num = 2 * np.abs(a - b) ** 2
    den = (1 - np.abs(a) ** 2) * (1 - np.abs(b) ** 2)
    d = np.arccosh(1 + num / den) / math.sqrt(-kappa)
    dv = np.abs(rho.values[:, None] - rho.values[idx[:, 1:]])
    return float(np.max(dv / d))


def almost_constant_bound(rho: SampledFunction, L: float, i0: float, c: float):
    """``(sup |rho - mean|, C' delta^(1/8))`` with ``delta = (1 - c^2) |rho|_2^2``.

    ``C' = 1 + pi L`` comes from ``delta^(1/4) + L C(2) delta^(1/8)`` for
    ``delta <= 1``; for larger ``delta`` that sum is returned directly.
    """
    if not (0 < c < 1):
        raise DomainError("c must lie in (0, 1)")
    if rho.points is not None:
        est = lipschitz_estimate(rho)
        if est > L * (1 + 1e-9):
            raise PreconditionError(f"sample is not {L}-Lipschitz (estimate {est})")
    delta = (1 - c * c) * rho.l2 ** 2
    eta = UNIT_BALL_AREA * i0 ** 2
    if delta > eta ** 4:
        raise RegimeError(f"delta = {delta:.3g} exceeds eta^4 = {eta ** 4:.3g}")
    dev = float(np.max(np.abs(rho.values - rho.mean)))
    if delta <= 1:
        bound = (1 + UNIT_BALL_AREA * L) * delta ** 0.125
    else:
        bound = delta ** 0.25 + UNIT_BALL_AREA * L * delta ** 0.125
    return dev, bound


def epsilon_delta(epsilon: float) -> float:
    """``1 - (1 - e)^2 / (1 + e)^2 = 4 e / (1 + e)^2``."""
    return 4 * epsilon / (1 + epsilon) ** 2


def epsilon_pipeline(epsilon: float):
    """``(delta(epsilon), C -> C epsilon^(1/8) + 3 epsilon)``."""
    if not (0 <= epsilon < 1):
        raise DomainError("epsilon must lie in [0, 1)")

    def bound(C: float) -> float:
        return C * epsilon ** 0.125 + 3 * epsilon

    return epsilon_delta(epsilon), bound


def almost_isometry_factors(epsilon: float, C: float):
    """Arithmetic band ``((1 - e)(1 - C e^(1/8)), (1 + e)(1 + C e^(1/8)))``."""
    if not (0 <= epsilon < 1):
        raise DomainError("epsilon must lie in [0, 1)")
    t = C * epsilon ** 0.125
    return (1 - epsilon) * (1 - t), (1 + epsilon) * (1 + t)


def write_grid_csv(path, s: SampledFunction):
    """Rows ``x, y, value`` (17 significant digits), written atomically."""
    if s.points is None:
        raise DomainError("sample has no node positions")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "value"])
    for p, v in zip(s.points, s.values):
        w.writerow([fmt(p.real), fmt(p.imag), fmt(v)])
    atomic_write(path, buf.getvalue())


def read_grid_csv(path, chart: DiskChart) -> SampledFunction:
    """Read a grid CSV back onto ``chart`` (nodes matched by position)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["x", "y", "value"]:
        raise SchemaError("expected header x,y,value", line=1)
    vals = {}
    for ln, row in enumerate(rows[1:], start=2):
        try:
            x, y, v = (float(t) for t in row)
        except ValueError:
            raise SchemaError(f"bad row {row!r}", line=ln) from None
        vals[(round(x / chart.h), round(y / chart.h))] = v
    pts = chart.points()
    try:
        out = [vals[(round(p.real / chart.h), round(p.imag / chart.h))] for p in pts]
    except KeyError as exc:
        raise SchemaError(f"missing node {exc}") from None
    return SampledFunction(np.array(out), chart.node_weights(), pts, chart.kappa)


def refinement_study(u, minus_lap_g1, kappa: float = -1.0, radius: float = 0.5, hs=(0.04, 0.02, 0.01)):
    """``(h, max error)`` of :func:`conformal_curvature` against a manufactured solution.

    ``u(x, y)`` and ``minus_lap_g1(x, y) = -Lap_{g1} u`` are callables.
    """
    rows = []
    for h in hs:
        chart = DiskChart(radius, h, kappa)
        k = conformal_curvature(chart.sample(u), kappa, chart)
        inner = chart.interior
        x, y = chart.x[inner], chart.y[inner]
        exact = np.exp(-2 * u(x, y)) * (minus_lap_g1(x, y) + kappa)
        rows.append((h, float(np.max(np.abs(k.values - exact)))))
    return rows
