import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fnmls import conformal as cf
from fnmls.errors import ConsistencyError, DomainError, PreconditionError, RegimeError, SchemaError


def test_conformal_constant_gives_requested_curvature():
    # K = -e^{-lambda} Lap(lambda) / 2 for the metric e^lambda |dx|^2
    for kappa in (-1.0, -4.0, -0.25):
        c = cf.conformal_constant(kappa)
        h = 1e-3
        x, y = 0.3, -0.2

        def lam(a, b):
            return math.log(c / (1 - a * a - b * b) ** 2)

        lap = (lam(x + h, y) + lam(x - h, y) + lam(x, y + h) + lam(x, y - h) - 4 * lam(x, y)) / h ** 2
        k = -0.5 * lap / math.exp(lam(x, y))
        assert k == pytest.approx(kappa, rel=1e-5)
    with pytest.raises(DomainError):
        cf.conformal_constant(0.0)


def test_chart_area_and_weights():
    chart = cf.DiskChart(0.5, 0.01)
    assert chart.area == pytest.approx(4 * math.pi * 0.25 / 0.75)
    assert chart.node_weights().sum() == pytest.approx(chart.area, rel=1e-13)
    s = chart.sample(lambda x, y: 1.0 + 0 * x)
    assert s.mean == pytest.approx(1.0) and s.l2 == pytest.approx(1.0)
    with pytest.raises(DomainError):
        cf.DiskChart(1.0, 0.1)
    with pytest.raises(DomainError):
        cf.DiskChart(0.5, 0.0)


def test_sampled_function_validation():
    with pytest.raises(DomainError):
        cf.SampledFunction([1.0, 2.0], [1.0])
    with pytest.raises(DomainError):
        cf.SampledFunction([], [])
    with pytest.raises(DomainError):
        cf.SampledFunction([1.0], [0.0])


def test_hyperbolic_distance_from_centre():
    chart = cf.DiskChart(0.5, 0.1)
    # distance from 0 to r in the unit disk is 2 artanh(r)
    assert chart.hyperbolic_distance(0.0, 0.3) == pytest.approx(2 * math.atanh(0.3))


def test_constant_conformal_factor():
    chart = cf.DiskChart(0.5, 0.05)
    k = cf.conformal_curvature(chart.sample(lambda x, y: 0.4 + 0 * x), -1.0, chart)
    assert np.max(np.abs(k.values + math.exp(-0.8))) < 1e-14


def test_curvature_refinement_order():
    def u(x, y):
        return 0.1 * np.sin(2 * x) * np.cos(y)

    def minus_lap(x, y):
        return 5 * u(x, y) * (1 - x * x - y * y) ** 2 / cf.conformal_constant(-1.0)

    rows = cf.refinement_study(u, minus_lap)
    orders = [math.log2(rows[i][1] / rows[i + 1][1]) for i in range(len(rows) - 1)]
    assert orders == pytest.approx([2.0, 2.0], abs=0.1)


def test_curvature_preconditions():
    tiny = cf.DiskChart(0.5, 0.2)
    with pytest.raises(DomainError):
        cf.conformal_curvature(tiny.sample(lambda x, y: 0 * x), -1.0, tiny)
    chart = cf.DiskChart(0.5, 0.05)
    with pytest.raises(DomainError):
        cf.conformal_curvature(chart.sample(lambda x, y: 0 * x), -2.0, chart)


def test_max_principle():
    chart = cf.DiskChart(0.6, 0.02)
    # a bump with its maximum at the centre
    u = chart.sample(lambda x, y: -0.5 * (x * x + y * y))
    k = cf.conformal_curvature(u, -1.0, chart)
    res = cf.max_principle_bound(u, k, -1.0, chart)
    assert not res.inconclusive
    assert res.holds
    assert res.lhs <= res.rhs * (1 + chart.h)
    # maximum on the rim: no conclusion
    edge = chart.sample(lambda x, y: x)
    res = cf.max_principle_bound(edge, cf.conformal_curvature(edge, -1.0, chart), -1.0, chart)
    assert res.inconclusive and res.holds is None
    with pytest.raises(PreconditionError):
        cf.max_principle_bound(u, k.with_values(np.abs(k.values)), -1.0, chart)


@settings(max_examples=200)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.01, 0.99))
def test_cs_defect_bound(seed, frac):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 60))
    rho = cf.SampledFunction(rng.exponential(1.0, n), rng.uniform(0.1, 1.0, n))
    c = frac * rho.mean / rho.l2
    l1, bound = cf.cs_defect(rho, c)
    assert l1 <= bound * (1 + 1e-9) + 1e-12


def test_cs_defect_preconditions():
    rho = cf.SampledFunction([1.0, 3.0], [1.0, 1.0])
    with pytest.raises(DomainError):
        cf.cs_defect(rho, 1.0)
    with pytest.raises(PreconditionError):
        cf.cs_defect(rho, 0.99)
    # a constant meets the bound with equality at l1 = 0
    l1, bound = cf.cs_defect(cf.SampledFunction([2.0, 2.0], [1.0, 3.0]), 0.5)
    assert l1 == 0.0 and bound == pytest.approx(math.sqrt(0.75) * 2)


def test_cs_defect_detects_inconsistent_weights():
    class Broken(cf.SampledFunction):
        @property
        def l2(self):
            return 1e-6

    with pytest.raises(ConsistencyError):
        cf.cs_defect(Broken([0.0, 2.0], [1.0, 1.0]), 0.5)


def test_lipschitz_estimate():
    chart = cf.DiskChart(0.4, 0.02)
    # the distance to the centre is 1-Lipschitz
    d = chart.sample(lambda x, y: 2 * np.arctanh(np.sqrt(x * x + y * y)))
    assert cf.lipschitz_estimate(d) == pytest.approx(1.0, rel=0.02)
    with pytest.raises(DomainError):
        cf.lipschitz_estimate(cf.SampledFunction([1.0], [1.0]))


def test_almost_constant_bound_regimes():
    chart = cf.DiskChart(0.5, 0.04)
    base = chart.sample(lambda x, y: 1.0 + 0.01 * x)
    rho = base.with_values(base.values / base.l2)
    c = rho.mean / rho.l2 * 0.999999
    dev, bound = cf.almost_constant_bound(rho, 1.0, 0.5, c)
    assert dev <= bound
    with pytest.raises(RegimeError):
        cf.almost_constant_bound(rho, 1.0, 0.05, 0.5)
    with pytest.raises(PreconditionError):
        cf.almost_constant_bound(rho, 1e-6, 0.5, c)
    with pytest.raises(DomainError):
        cf.almost_constant_bound(rho, 1.0, 0.5, 1.5)


def test_epsilon_pipeline():
    assert cf.epsilon_delta(0.01) == pytest.approx(4 * 0.01 / 1.01 ** 2)
    assert cf.epsilon_delta(0.01) == pytest.approx(0.0392118, abs=1e-7)
    delta, bound = cf.epsilon_pipeline(0.01)
    assert delta == cf.epsilon_delta(0.01)
    assert bound(2.0) == pytest.approx(2.0 * 0.01 ** 0.125 + 0.03)
    lo, hi = cf.almost_isometry_factors(0.01, 1.0)
    assert lo < 1 < hi
    with pytest.raises(DomainError):
        cf.epsilon_pipeline(1.0)


def test_grid_csv_round_trip(tmp_path):
    chart = cf.DiskChart(0.3, 0.05)
    s = chart.sample(lambda x, y: np.sin(x) + y)
    path = tmp_path / "grid.csv"
    cf.write_grid_csv(path, s)
    back = cf.read_grid_csv(path, chart)
    assert np.array_equal(back.values, s.values)


def test_grid_csv_errors(tmp_path):
    chart = cf.DiskChart(0.3, 0.05)
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y,value\n0,0,1\n0.05,zero,1\n")
    with pytest.raises(SchemaError, match="line 3"):
        cf.read_grid_csv(bad, chart)
    bad.write_text("a,b\n")
    with pytest.raises(SchemaError, match="line 1"):
        cf.read_grid_csv(bad, chart)
    bad.write_text("x,y,value\n0,0,1\n")
    with pytest.raises(SchemaError):
        cf.read_grid_csv(bad, chart)
