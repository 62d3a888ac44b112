"""Seeded sampling of the derivative distortion of a map between surfaces.

A sample is a base point of the source surface, drawn pants by pants in the
polar chart at the anchor of one of the two hexagons, and a unit tangent
direction there.  Its ratio is ``|DF v|_{g1} / |v|_{g0}``; the singular
values of the metric-normalized Jacobian bound the ratio over all directions.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from dataclasses import dataclass, field

import numpy as np

from .._io import atomic_write, fmt
from ..errors import DomainError
from .composite import MIRROR_SEAM, apply_isometry

MARGIN = 1e-6
QUANTILES = (0.0, 0.01, 0.1, 0.5, 0.9, 0.99, 1.0)
SCHEMA = "fnmls-distortion/1"
CSV_COLUMNS = ("sample_index", "chart_id", "x1", "x2", "v1", "v2", "ratio")


@dataclass(frozen=True)
class SampleSet:
    pants: np.ndarray
    parity: np.ndarray  # 0 base hexagon, 1 its mirror
    triangle: np.ndarray
    r: np.ndarray  # polar chart at the anchor
    theta: np.ndarray
    phi: np.ndarray  # direction angle against the radial unit vector

    def __len__(self):
        return len(self.pants)

    def chart_ids(self):
        return [f"P{v}{'m' if p else 'h'}T{t}" for v, p, t in zip(self.pants, self.parity, self.triangle)]


def sample_points(pmaps, n: int, seed: int, margin: float = MARGIN) -> SampleSet:
    """Area-weighted base points: uniform pants and parity, triangle by area,
    angle uniform inside the triangle, radius uniform in area along the ray.

    The chart parameters stay ``margin`` away from the triangle edges.
    """
    if n < 1:
        raise DomainError("n_samples must be >= 1")
    rng = np.random.default_rng(seed)
    n_p = len(pmaps)
    pants = rng.integers(n_p, size=n)
    parity = rng.integers(2, size=n)
    u_tri = rng.random(n)
    s = margin + (1 - 2 * margin) * rng.random(n)
    u = margin + (1 - 2 * margin) * rng.random(n)
    phi = rng.uniform(0.0, 2 * np.pi, size=n)
    tri = np.empty(n, dtype=int)
    r = np.empty(n)
    theta = np.empty(n)
    for v, pm in enumerate(pmaps):
        sel = pants == v
        areas = np.array([m.source.deficit() for m in pm.stretch])
        cdf = np.cumsum(areas) / areas.sum()
        t = np.minimum(np.searchsorted(cdf, u_tri[sel], side="right"), 3)
        tri[sel] = t
        apex = np.array([m.src.apex for m in pm.stretch])[t]
        loc = s[sel] * apex
        big_r = np.empty(loc.shape)
        for i in range(4):
            k = t == i
            big_r[k] = pm.stretch[i].src.radius(loc[k])
        r[sel] = np.arccosh(1.0 + u[sel] * (np.cosh(big_r) - 1.0))
        theta[sel] = pm.cum0[t] + loc
    return SampleSet(pants=pants, parity=parity, triangle=tri, r=r, theta=theta, phi=phi)


@dataclass(frozen=True)
class SampleValues:
    ratio: np.ndarray
    sv_min: np.ndarray
    sv_max: np.ndarray
    valid: np.ndarray  # False where the sample sat within the margin of a collar rim
    image: np.ndarray
    point: np.ndarray  # unfolded source point in the pants frame
    jac: np.ndarray  # metric-normalized Jacobian


def evaluate_samples(F, samples: SampleSet, margin: float = MARGIN) -> SampleValues:
    n = len(samples)
    ratio = np.empty(n)
    smin = np.empty(n)
    smax = np.empty(n)
    valid = np.ones(n, dtype=bool)
    image = np.empty(n, dtype=complex)
    point = np.empty(n, dtype=complex)
    jn = np.empty((n, 2, 2))
    for v, pm in enumerate(F.pants):
        sel = np.flatnonzero(samples.pants == v)
        if len(sel) == 0:
            continue
        r, th = samples.r[sel], samples.theta[sel]
        z_h = pm.chart0.to_h(r, th)
        steps = np.where(samples.parity[sel] == 1, MIRROR_SEAM, -1)[:, None]
        res = F.evaluate(v, z_h, steps, True)
        p, jw = apply_isometry(pm.word_matrix(steps, False), z_h)
        # unit vector of dr^2 + sinh^2 r dtheta^2 in the chart, pushed to the cover point
        phi = samples.phi[sel]
        vec = np.stack([np.cos(phi), np.sin(phi) / np.sinh(r)], axis=-1)
        vec = jw @ (pm.chart0.jacobian(r, th) @ vec[..., None])
        img = res.image
        jn_v = res.jac * (p.imag / img.imag)[:, None, None]
        out = res.jac @ vec
        ratio[sel] = (np.linalg.norm(out[..., 0], axis=-1) / img.imag) / (
            np.linalg.norm(vec[..., 0], axis=-1) / p.imag)
        sv = np.linalg.svd(jn_v, compute_uv=False)
        smax[sel], smin[sel] = sv[:, 0], sv[:, 1]
        valid[sel] = res.rim_gap >= margin
        image[sel], point[sel], jn[sel] = img, p, jn_v
    return SampleValues(ratio=ratio, sv_min=smin, sv_max=smax, valid=valid, image=image, point=point, jac=jn)


@dataclass(frozen=True)
class DistortionReport:
    seed: int
    n_samples: int
    config_hash: str
    samples: SampleSet = field(repr=False)
    values: SampleValues = field(repr=False)

    @property
    def ratios(self) -> np.ndarray:
        return self.values.ratio[self.values.valid]

    @property
    def n_used(self) -> int:
        return int(self.values.valid.sum())

    @property
    def inf(self) -> float:
        return float(self.ratios.min())

    @property
    def sup(self) -> float:
        return float(self.ratios.max())

    @property
    def sv_inf(self) -> float:
        """Smallest singular value: the infimum over all directions at the sampled points."""
        return float(self.values.sv_min[self.values.valid].min())

    @property
    def sv_sup(self) -> float:
        return float(self.values.sv_max[self.values.valid].max())

    @property
    def sup_deviation(self) -> float:
        """``max(sv_sup - 1, 1 - sv_inf)``: the smallest eta with a (1+eta)-almost-isometry."""
        return max(self.sv_sup - 1.0, 1.0 - self.sv_inf)

    def quantiles(self) -> dict:
        return {q: float(np.quantile(self.ratios, q)) for q in QUANTILES}

    def histogram(self, bins: int = 20):
        return np.histogram(self.ratios, bins=bins)

    def summary(self) -> str:
        lines = [
            f"schema: {SCHEMA}",
            f"seed: {self.seed}",
            f"config: {self.config_hash}",
            f"samples: {self.n_samples}",
            f"used: {self.n_used}",
            f"inf: {self.inf!r}",
            f"sup: {self.sup!r}",
            f"sv_inf: {self.sv_inf!r}",
            f"sv_sup: {self.sv_sup!r}",
            f"sup_deviation: {self.sup_deviation!r}",
        ]
        lines += [f"q{q:g}: {x!r}" for q, x in self.quantiles().items()]
        counts, edges = self.histogram()
        lines.append("histogram: " + json.dumps({"counts": counts.tolist(), "edges": edges.tolist()}))
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# schema={SCHEMA} seed={self.seed} config={self.config_hash} samples={self.n_samples}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        s, val = self.samples, self.values
        ids = s.chart_ids()
        v1 = np.cos(s.phi)
        v2 = np.sin(s.phi) / np.sinh(s.r)
        for k in np.flatnonzero(val.valid):
            w.writerow([int(k), ids[k], fmt(s.r[k]), fmt(s.theta[k]), fmt(v1[k]), fmt(v2[k]), fmt(val.ratio[k])])
        return buf.getvalue()

    def write(self, directory, stem: str = "distortion"):
        os.makedirs(directory, exist_ok=True)
        atomic_write(os.path.join(directory, stem + ".csv"), self.to_csv())
        atomic_write(os.path.join(directory, stem + "_summary.txt"), self.summary())


def config_hash(F, n_samples: int, seed: int) -> str:
    base = getattr(F, "base", F)
    cfg = {
        "mode": base.mode,
        "graph": [list(map(list, c.ends)) for c in base.graph.cuffs],
        "l0": [float(x).hex() for x in base.fn0.lengths],
        "a0": [float(x).hex() for x in base.fn0.twists],
        "l1": [float(x).hex() for x in base.fn1.lengths],
        "a1": [float(x).hex() for x in base.fn1.twists],
        "kappa": [base.fn0.kappa, base.fn1.kappa],
        "delta": getattr(F, "delta", None),
        "n": n_samples,
        "seed": seed,
    }
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()[:16]


def distortion(F, n_samples: int, seed: int) -> DistortionReport:
    """Sample the distortion of ``F`` (a PiecewiseMap or SmoothedMap)."""
    samples = sample_points(F.pants, n_samples, seed)
    values = evaluate_samples(F, samples)
    return DistortionReport(seed=seed, n_samples=n_samples, config_hash=config_hash(F, n_samples, seed),
                            samples=samples, values=values)
