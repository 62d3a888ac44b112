"""Drivers for the epsilon and delta sweeps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError
from .mapbuild.composite import compose_f
from .mapbuild.distortion import distortion
from .mapbuild.smoothing import deviation, smooth
from .surface import FenchelNielsen, mls_epsilon_from_lengths, nine_lengths


def perturbation(fn0: FenchelNielsen, lam: float, direction) -> FenchelNielsen:
    """Lengths scaled by ``1 + lam d_l``, twists shifted by ``lam d_a``."""
    n = len(fn0.lengths)
    d = np.asarray(direction, dtype=float)
    lengths = np.array(fn0.lengths) * (1.0 + lam * d[:n])
    twists = np.array(fn0.twists) + lam * d[n:]
    return FenchelNielsen(fn0.graph, tuple(lengths), tuple(twists), fn0.kappa)


def random_direction(fn0: FenchelNielsen, seed: int) -> np.ndarray:
    d = np.random.default_rng(seed).normal(size=2 * len(fn0.lengths))
    return d / np.max(np.abs(d))


def perturb_to_epsilon(fn0: FenchelNielsen, epsilon: float, direction, xtol: float = 1e-15):
    """A perturbation of ``fn0`` along ``direction`` whose nine-curve MLS distance is ``epsilon``."""
    if not epsilon > 0:
        raise DomainError("epsilon must be positive")
    l0 = nine_lengths(fn0)

    def gap(lam):
        return mls_epsilon_from_lengths(l0, nine_lengths(perturbation(fn0, lam, direction))) - epsilon

    hi = epsilon
    while gap(hi) < 0:
        hi *= 2
        if hi > 10:
            raise DomainError("could not bracket the requested epsilon")
    lam = brentq(gap, 0.0, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)
    return perturbation(fn0, lam, direction)


def loglog_slope(x, y) -> float:
    return float(np.polyfit(np.log(np.asarray(x)), np.log(np.asarray(y)), 1)[0])


@dataclass(frozen=True)
class EpsilonRow:
    epsilon: float  # measured nine-curve MLS distance
    sup_deviation: float  # max(sv_sup - 1, 1 - sv_inf)
    sup: float  # largest sampled ratio
    inf: float

    @property
    def prefactor(self) -> float:
        return self.sup_deviation / self.epsilon


def epsilon_sweep(fn0: FenchelNielsen, epsilons, n_samples: int, seed: int, mode: str = "relative",
                  direction_seed: int = 0):
    eps = check_sweep(epsilons)
    direction = random_direction(fn0, direction_seed)
    rows = []
    for e in eps:
        fn1 = perturb_to_epsilon(fn0, e, direction)
        rep = distortion(compose_f(fn0, fn1, mode), n_samples, seed)
        measured = mls_epsilon_from_lengths(nine_lengths(fn0), nine_lengths(fn1))
        rows.append(EpsilonRow(measured, rep.sup_deviation, rep.sup, rep.inf))
    return rows


@dataclass(frozen=True)
class DeltaRow:
    delta: float
    c0: float
    c1: float
    lipschitz: float

    def c1_prefactor(self, epsilon: float) -> float:
        return self.c1 / (self.delta + epsilon)


def delta_sweep(fn0: FenchelNielsen, fn1: FenchelNielsen, deltas, n_samples: int, seed: int,
                mode: str = "relative"):
    f = compose_f(fn0, fn1, mode)
    rows = []
    for d in check_sweep(deltas):
        dev = deviation(smooth(f, d), n_samples, seed)
        rows.append(DeltaRow(d, dev.c0, dev.c1, dev.lipschitz))
    return rows


def check_sweep(values) -> list:
    vals = [float(v) for v in values]
    if not vals:
        raise DomainError("empty sweep list")
    if any(not v > 0 for v in vals):
        raise DomainError("sweep values must be positive")
    if any(b >= a for a, b in zip(vals, vals[1:])):
        raise DomainError("sweep values must be strictly decreasing")
    return vals
