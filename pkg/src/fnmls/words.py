"""Enumeration of conjugacy classes of short words and batched trace evaluation.

Words are int8 arrays with letters in ``{+-1, ..., +-rank}``.  A conjugacy
class of a cyclically reduced word is represented by the lexicographically
smallest encoding among its rotations and the rotations of its inverse, so
every class of the free group appears exactly once per length (a curve and
its reverse have the same length, so they are identified).
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .hyperbolic import translation_length_from_trace


def _codes(words: np.ndarray) -> np.ndarray:
    # 0, 1 for generator 1 and its inverse, 2, 3 for generator 2, ...
    return 2 * (np.abs(words).astype(np.int64) - 1) + (words < 0)


def _keys(codes: np.ndarray, base: int) -> np.ndarray:
    n = codes.shape[1]
    if n * math.log2(base) > 62:
        raise DomainError("words too long for integer class keys")
    weights = base ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return codes @ weights


def reduced_words(rank: int, n: int) -> np.ndarray:
    """All freely reduced words of length ``n``."""
    if rank < 1 or rank > 8:
        raise DomainError("rank must be in 1..8")
    letters = np.array([x for g in range(1, rank + 1) for x in (g, -g)], dtype=np.int8)
    words = letters[:, None]
    for _ in range(n - 1):
        last = words[:, -1]
        ext = np.repeat(words, len(letters), axis=0)
        nxt = np.tile(letters, len(words))
        keep = nxt != -np.repeat(last, len(letters))
        words = np.concatenate([ext[keep], nxt[keep, None]], axis=1)
    return words


@lru_cache(maxsize=8)
def _enumerate_cached(rank: int, max_len: int) -> tuple:
    return tuple(enumerate_classes(rank, max_len))


def cached_classes(rank: int, max_len: int) -> tuple:
    """:func:`enumerate_classes`, memoized (the arrays must not be modified)."""
    return _enumerate_cached(rank, max_len)


def enumerate_classes(rank: int, max_len: int) -> list:
    """Canonical representatives of cyclically reduced classes, per length 1..max_len."""
    if max_len < 1:
        raise DomainError("max_len must be >= 1")
    if max_len * math.log2(2 * rank) > 62:
        raise DomainError("words too long for integer class keys")
    out = []
    for n in range(1, max_len + 1):
        w = reduced_words(rank, n)
        if n > 1:
            w = w[w[:, 0] != -w[:, -1]]
        codes = _codes(w)
        inv_codes = _codes(-w[:, ::-1])
        key = _keys(codes, 2 * rank)
        best = key.copy()
        for k in range(n):
            best = np.minimum(best, _keys(np.roll(codes, -k, axis=1), 2 * rank))
            best = np.minimum(best, _keys(np.roll(inv_codes, -k, axis=1), 2 * rank))
        out.append(w[key == best])
    return out


def brute_force_classes(rank: int, max_len: int) -> set:
    """Slow oracle: the same class set as tuples, built with plain Python."""
    letters = [x for g in range(1, rank + 1) for x in (g, -g)]
    classes = set()
    for n in range(1, max_len + 1):
        for w in itertools.product(letters, repeat=n):
            if any(w[i] == -w[(i + 1) % n] for i in range(n)):
                continue
            inv = tuple(-x for x in reversed(w))
            variants = [w[k:] + w[:k] for k in range(n)] + [inv[k:] + inv[:k] for k in range(n)]
            classes.add(min(variants, key=lambda v: [2 * (abs(x) - 1) + (x < 0) for x in v]))
    return classes


def batch_traces(generators: np.ndarray, words: np.ndarray) -> np.ndarray:
    """Traces of the words evaluated on ``generators`` (rank, 2, 2)."""
    generators = np.asarray(generators, dtype=float)
    inverses = np.stack([np.stack([generators[:, 1, 1], -generators[:, 0, 1]], -1),
                         np.stack([-generators[:, 1, 0], generators[:, 0, 0]], -1)], -2)
    table = np.concatenate([generators, inverses])  # index g-1 or rank+g-1
    rank = len(generators)
    idx = np.where(words > 0, words.astype(np.int64) - 1, rank - words.astype(np.int64) - 1)
    acc = table[idx[:, 0]]
    for k in range(1, words.shape[1]):
        acc = np.matmul(acc, table[idx[:, k]])
    return acc[:, 0, 0] + acc[:, 1, 1]


def batch_lengths(generators: np.ndarray, words: np.ndarray, trivial_tol: float = 1e-6):
    """(lengths, mask) with mask False for words that are not hyperbolic."""
    tr = np.abs(batch_traces(generators, words))
    mask = tr > 2.0 + trivial_tol
    lengths = np.full(len(words), np.nan)
    lengths[mask] = translation_length_from_trace(tr[mask])
    return lengths, mask
