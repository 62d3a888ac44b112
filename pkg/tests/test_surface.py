import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fnmls import hyperbolic as hyp
from fnmls import surface as sf
from fnmls.errors import DomainError, InconsistentDataError
from fnmls.pants import chain_graph, dumbbell_graph, theta_graph

GRAPHS = [theta_graph(), dumbbell_graph(), chain_graph(3)]


def surface(graph, seed=0, **kw):
    return sf.random_surface(graph, np.random.default_rng(seed), **kw)


@pytest.mark.parametrize("graph", GRAPHS)
def test_cuff_lengths_reproduce_inputs(graph):
    fn = surface(graph, 1)
    system = sf.nine_curves(graph)
    got = [sf.curve_length(fn, w) for w in system.gammas]
    assert got == pytest.approx(list(fn.lengths), rel=1e-11)


@pytest.mark.parametrize("graph", GRAPHS)
def test_holonomy_satisfies_relations(graph):
    fn = surface(graph, 2)
    for rel in graph.relations():
        # rounding grows with the product of the letter norms
        scale = np.prod([np.linalg.norm(fn.holonomy.letter_matrix(x), 2) for x in rel])
        assert hyp.identity_deviation(fn.holonomy.evaluate(rel)) < 1e-14 * scale


@pytest.mark.parametrize("graph", GRAPHS)
def test_local_and_global_holonomy_agree(graph):
    fn = surface(graph, 3)
    for w in sf.nine_curves(graph).all_words():
        assert fn.local_holonomy.length(w.letters) == pytest.approx(fn.holonomy.length(w), rel=1e-9)


def test_length_is_a_class_function():
    fn = surface(theta_graph(), 4)
    w = sf.nine_curves(fn.graph).deltas[0]
    base = sf.curve_length(fn, w)
    for k in range(len(w)):
        assert sf.curve_length(fn, w.rotated(k)) == pytest.approx(base, rel=1e-11)
    assert sf.curve_length(fn, w.inverse()) == pytest.approx(base, rel=1e-11)


@pytest.mark.parametrize("graph", [theta_graph(), dumbbell_graph()])
def test_eta_is_delta_after_a_full_twist(graph):
    fn = surface(graph, 5)
    system = sf.nine_curves(graph)
    for j in range(3):
        tw = list(fn.twists)
        tw[j] += 1.0
        moved = fn.with_twists(tw)
        assert sf.curve_length(moved, system.deltas[j]) == pytest.approx(
            sf.curve_length(fn, system.etas[j]), rel=1e-10)


def test_delta_depends_only_on_its_own_twist():
    fn = surface(theta_graph(), 6)
    system = sf.nine_curves(fn.graph)
    before = sf.curve_length(fn, system.deltas[0])
    after = sf.curve_length(fn.with_twists([fn.twists[0], 0.37, -0.81]), system.deltas[0])
    assert after == pytest.approx(before, rel=1e-11)


def test_curvature_scaling():
    g = theta_graph()
    fn = sf.FenchelNielsen(g, (1.0, 1.5, 2.0), (0.1, 0.2, 0.3), kappa=-1.0)
    fn4 = sf.FenchelNielsen(g, (0.5, 0.75, 1.0), (0.1, 0.2, 0.3), kappa=-4.0)
    for w in sf.nine_curves(g).all_words():
        assert sf.curve_length(fn4, w) == pytest.approx(sf.curve_length(fn, w) / 2, rel=1e-11)


def test_mls_epsilon():
    fn = surface(theta_graph(), 7)
    words = sf.nine_curves(fn.graph).all_words()
    assert sf.mls_epsilon(fn, fn, words) == 0.0
    bigger = fn.with_lengths([x * 1.01 for x in fn.lengths])
    eps = sf.mls_epsilon(fn, bigger, sf.nine_curves(fn.graph).gammas)
    assert eps == pytest.approx(0.01, rel=1e-9)
    with pytest.raises(DomainError):
        sf.mls_epsilon(fn, fn, [])
    l0, l1 = sf.nine_lengths(fn), sf.nine_lengths(bigger)
    assert sf.mls_epsilon_from_lengths(l0, l1) == sf.mls_epsilon(fn, bigger, words)


def test_mls_epsilon_rejects_different_graphs():
    a = sf.FenchelNielsen(theta_graph(), (1, 1, 1), (0, 0, 0))
    b = sf.FenchelNielsen(dumbbell_graph(), (1, 1, 1), (0, 0, 0))
    with pytest.raises(DomainError):
        sf.mls_epsilon(a, b, [(1,)])


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([0, 1]))
def test_twist_recovery_round_trip(seed, which):
    g = [theta_graph(), dumbbell_graph()][which]
    fn = surface(g, seed, length_range=(0.5, 5.0), twist_range=(-1.0, 1.0))
    meas = sf.nine_lengths(fn)
    tw = sf.twist_recovery(fn.with_twists([0, 0, 0]), meas[3:6], meas[6:9])
    assert tw == pytest.approx(fn.twists, abs=1e-8)


def test_twist_recovery_rejects_impossible_lengths():
    fn = surface(theta_graph(), 8)
    meas = sf.nine_lengths(fn)
    # delta curves cross cuffs, so they can never be this short
    with pytest.raises(InconsistentDataError):
        sf.twist_recovery(fn, np.full(3, 1e-3), meas[6:9], max_bound=8)
    with pytest.raises(DomainError):
        sf.twist_recovery(fn, meas[3:5], meas[6:9])


def test_constructor_validation():
    g = theta_graph()
    with pytest.raises(DomainError):
        sf.FenchelNielsen(g, (1, 1), (0, 0, 0))
    with pytest.raises(DomainError):
        sf.FenchelNielsen(g, (1, -1, 1), (0, 0, 0))
    with pytest.raises(DomainError):
        sf.FenchelNielsen(g, (1, 1, 1), (0, math.nan, 0))
    with pytest.raises(DomainError):
        sf.FenchelNielsen(g, (1, 1, 1), (0, 0, 0), kappa=0.0)


def test_cuff_bounds():
    fn = sf.FenchelNielsen(theta_graph(), (0.2, 5.0, 26.0), (0, 0, 0))
    assert fn.check_cuff_bounds(0.1)
    assert not fn.check_cuff_bounds(0.2)
    assert fn.check_cuff_bounds(0.105, eps=0.1)


def test_area_and_entropy():
    assert sf.area(2, -1.0) == pytest.approx(4 * math.pi)
    assert sf.area(3, -4.0) == pytest.approx(2 * math.pi)
    assert sf.entropy(-4.0) == 2.0
    lo, hi = sf.entropy_bounds(1.0, 0.1)
    assert lo < 1.0 < hi
    lo, hi = sf.area_bounds(4 * math.pi, 0.1)
    assert lo < 4 * math.pi < hi
    with pytest.raises(DomainError):
        sf.area(1, -1.0)
    with pytest.raises(DomainError):
        sf.entropy(1.0)


def test_bounded_word_spectrum_shapes():
    fn = surface(theta_graph(), 9)
    ws, ls, ms = sf.bounded_word_spectrum(fn, 4)
    assert len(ws) == len(ls) == len(ms) == 4
    for n, (w, length, m) in enumerate(zip(ws, ls, ms), start=1):
        assert w.shape[1] == n
        assert np.all(length[m] > 0)
        assert np.all(length[~m] == 0)


def test_bounded_word_spectrum_matches_curve_length():
    fn = surface(dumbbell_graph(), 10)
    ws, ls, ms = sf.bounded_word_spectrum(fn, 3)
    for w, length, m in zip(ws, ls, ms):
        for k in range(0, len(w), 7):
            if m[k]:
                assert length[k] == pytest.approx(sf.curve_length(fn, tuple(int(x) for x in w[k])), rel=1e-9)


def test_nine_curve_labels():
    system = sf.nine_curves(theta_graph())
    assert len(system.all_words()) == 9
    assert system.labels()[:3] == ["gamma0", "gamma1", "gamma2"]
