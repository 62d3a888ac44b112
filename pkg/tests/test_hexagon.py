import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fnmls import hexagon as hx
from fnmls import hyperbolic as hyp
from fnmls.errors import DomainError

half_cuff = st.floats(0.1, 6)


def test_symmetric_hexagon():
    a = math.acosh(2.0)
    h = hx.build_hexagon(a, a, a)
    assert h.s == pytest.approx((a, a, a), rel=1e-13)


@pytest.mark.parametrize("bad", [(0.0, 1.0, 1.0), (1.0, -2.0, 1.0), (math.nan, 1.0, 1.0)])
def test_build_rejects_bad_input(bad):
    with pytest.raises(DomainError):
        hx.build_hexagon(*bad)


@given(half_cuff, half_cuff, half_cuff)
def test_cyclic_permutation_permutes_seams(c1, c2, c3):
    h = hx.build_hexagon(c1, c2, c3)
    g = hx.build_hexagon(c2, c3, c1)
    assert g.s == pytest.approx((h.s[2], h.s[0], h.s[1]), rel=1e-12)


@settings(max_examples=50)
@given(half_cuff, half_cuff, half_cuff)
def test_realization_is_right_angled(c1, c2, c3):
    h = hx.build_hexagon(c1, c2, c3)
    assert hx.closure_residual(h) <= 1e-9
    assert hx.realization_residual(h) <= 1e-9


def test_anchor_placement():
    h = hx.build_hexagon(1.0, 1.2, 1.4)
    v = h.vertex_array
    assert v[0] == 1j
    assert v[1].real == pytest.approx(0.0, abs=1e-15)
    assert v[2].real < 0


def test_closure_detects_perturbed_seam():
    h = hx.build_hexagon(1.0, 1.5, 2.0)
    bad = hx.RightHexagon(c=h.c, s=(h.s[0] + 0.1, h.s[1], h.s[2]), vertices=h.vertices)
    assert hx.closure_residual(bad) > 1e-3


def test_closure_invariant_under_isometry():
    h = hx.build_hexagon(0.8, 1.1, 2.3)
    m = hyp.sl2_normalize(np.array([[2.0, 1.0], [0.5, 1.0]]))
    moved = hx.RightHexagon(c=h.c, s=h.s, vertices=tuple(complex(hyp.mobius(m, z)) for z in h.vertices))
    assert abs(hx.closure_residual(moved) - hx.closure_residual(h)) <= 1e-10
    assert hx.realization_residual(moved) <= 1e-9


def test_thin_hexagon_stays_accurate():
    # two long cuffs and a very short seam between them
    h = hx.build_hexagon(0.5576, 12.5774, 11.8268)
    assert h.s[1] < 1e-4
    assert hx.closure_residual(h) <= 1e-9
    assert hx.realization_residual(h) <= 1e-9


def test_area_is_pi():
    assert hx.build_hexagon(1, 2, 3).area() == pytest.approx(math.pi)


@settings(max_examples=50)
@given(half_cuff, half_cuff, half_cuff)
def test_triangulation(c1, c2, c3):
    h = hx.build_hexagon(c1, c2, c3)
    tris = hx.triangulate(h)
    assert [t.vertex_labels for t in tris] == [tuple(x) for x in hx.TRIANGLE_VERTICES]
    # angles at the anchor fill the right angle
    assert sum(t.angles[0] for t in tris) == pytest.approx(math.pi / 2, abs=1e-9)
    # Gauss-Bonnet: the deficits add up to the hexagon area
    assert sum(t.deficit() for t in tris) == pytest.approx(math.pi, abs=1e-9)
    # angles at shared interior vertices add up to right angles
    assert tris[0].angles[2] + tris[1].angles[1] == pytest.approx(math.pi / 2, abs=1e-9)
    assert tris[1].angles[2] + tris[2].angles[1] == pytest.approx(math.pi / 2, abs=1e-9)
    assert tris[2].angles[2] + tris[3].angles[1] == pytest.approx(math.pi / 2, abs=1e-9)
    v = h.vertex_array
    for d, k in zip(hx.diagonals(h), (4, 3, 2)):
        assert d == pytest.approx(hyp.dist_z(v[0], v[k]), abs=1e-10 * max(1.0, d))
    for t in tris:
        assert t.law_of_cosines_residual() < 1e-9
    # the outer diagonal is computed twice, once from each side
    assert tris[3].sides[2] == pytest.approx(tris[2].sides[1], rel=1e-9)


def test_compare_identical_hexagons():
    h = hx.build_hexagon(1.0, 2.0, 1.5)
    d = hx.compare_hexagons(h, h)
    assert d.max_rel == 0.0 and d.max_abs == 0.0


def test_compare_hexagons_is_first_order():
    h0 = hx.build_hexagon(1.0, 2.0, 1.5)
    rel = []
    for eps in (1e-3, 1e-4):
        h1 = hx.build_hexagon(1.0 * (1 + eps), 2.0 * (1 - eps), 1.5 * (1 + eps))
        rel.append(hx.compare_hexagons(h0, h1).max_rel / eps)
    # relative changes scale linearly with the cuff perturbation
    assert rel[0] == pytest.approx(rel[1], rel=0.05)
