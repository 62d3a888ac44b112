import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fnmls import words
from fnmls.errors import DomainError
from fnmls.pants import (CurveWord, PantsGraph, chain_graph, cyclic_reduce, dumbbell_graph, invert, reduce_word,
                         theta_graph)

letters = st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=12)


@given(letters)
def test_reduce_is_idempotent(w):
    r = reduce_word(w)
    assert reduce_word(r) == r
    assert all(r[i] != -r[i + 1] for i in range(len(r) - 1))


@given(letters)
def test_word_times_inverse_is_trivial(w):
    assert reduce_word(tuple(w) + invert(tuple(w))) == ()


@given(letters, st.integers(0, 20))
def test_cyclic_reduction_is_rotation_invariant(w, k):
    c = cyclic_reduce(w)
    if not c:
        return
    rot = CurveWord(c).rotated(k).letters
    assert len(cyclic_reduce(rot)) == len(c)


def test_curve_word_rejects_zero():
    with pytest.raises(DomainError):
        CurveWord((1, 0))


@pytest.mark.parametrize("graph", [theta_graph(), dumbbell_graph(), chain_graph(3), chain_graph(4)])
def test_graph_counts(graph):
    g = graph.genus
    assert graph.n_pants == 2 * g - 2
    assert len(graph.cuffs) == 3 * g - 3
    kept, subst = graph.reduced_basis
    assert len(kept) == 2 * g
    # every eliminated generator is a word in the kept ones
    for w in subst.values():
        assert all(abs(x) in kept for x in w)


@pytest.mark.parametrize("graph", [theta_graph(), dumbbell_graph(), chain_graph(3)])
def test_one_relation_survives_reduction(graph):
    left = [r for r in graph.relations() if cyclic_reduce(graph.to_reduced(r)) != ()]
    assert len(left) == 1
    # the survivor is a word in the 2G kept generators
    kept = graph.reduced_basis[0]
    assert all(abs(x) in kept for x in graph.to_reduced(left[0]))


def test_graph_validation():
    with pytest.raises(DomainError):
        PantsGraph.from_edges(2, [((0, 0), (1, 0)), ((0, 1), (1, 1)), ((0, 1), (1, 2))])
    with pytest.raises(DomainError):
        PantsGraph.from_edges(1, [])
    with pytest.raises(DomainError):
        PantsGraph.from_edges(2, [((0, 0), (1, 0)), ((0, 1), (1, 1))])


def test_self_glued_cuffs():
    g = dumbbell_graph()
    assert [g.is_self_glued(e) for e in range(3)] == [True, True, False]
    assert not any(theta_graph().is_self_glued(e) for e in range(3))


@pytest.mark.parametrize("rank,max_len", [(1, 6), (2, 6), (3, 4), (4, 4)])
def test_class_enumeration_matches_brute_force(rank, max_len):
    fast = {tuple(int(x) for x in w) for level in words.enumerate_classes(rank, max_len) for w in level}
    assert fast == words.brute_force_classes(rank, max_len)


def test_class_counts_free_group_rank_two():
    # cyclically reduced classes of F2 up to inversion, lengths 1..4
    counts = [len(level) for level in words.enumerate_classes(2, 4)]
    slow = {}
    for w in words.brute_force_classes(2, 4):
        slow[len(w)] = slow.get(len(w), 0) + 1
    assert counts == [slow[n] for n in range(1, 5)]


def test_reduced_words_counts():
    # 2r (2r - 1)^(n - 1) freely reduced words of length n
    for rank in (1, 2, 3):
        for n in (1, 2, 3, 4):
            assert len(words.reduced_words(rank, n)) == 2 * rank * (2 * rank - 1) ** (n - 1)


def test_enumeration_domain():
    with pytest.raises(DomainError):
        words.enumerate_classes(2, 0)
    with pytest.raises(DomainError):
        words.reduced_words(9, 2)
    with pytest.raises(DomainError):
        words.enumerate_classes(8, 25)


def test_batch_traces_match_loop():
    rng = np.random.default_rng(5)
    gens = rng.normal(size=(3, 2, 2))
    gens[np.linalg.det(gens) < 0, 0] *= -1
    gens /= np.sqrt(np.linalg.det(gens))[:, None, None]
    ws = words.reduced_words(3, 4)[:50]
    tr = words.batch_traces(gens, ws)
    for w, t in zip(ws, tr):
        m = np.eye(2)
        for x in w:
            g = gens[abs(x) - 1]
            m = m @ (g if x > 0 else np.linalg.inv(g))
        assert t == pytest.approx(np.trace(m), rel=1e-10, abs=1e-10)


def test_cached_classes_is_stable():
    a = words.cached_classes(2, 5)
    b = words.cached_classes(2, 5)
    assert a is b
