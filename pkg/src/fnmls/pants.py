"""Pants graphs and the fundamental group presentation they induce.

A closed genus-G surface is cut along 3G-3 cuffs into 2G-2 pairs of pants.
Each pants ``v`` has boundary slots 0, 1, 2.  The fundamental group is
presented as a graph of groups over a BFS spanning tree of the pants graph:

* two generators ``x[v,0]``, ``x[v,1]`` per pants, with the third boundary
  ``x[v,2] = (x[v,0] x[v,1])^-1``;
* a stable letter ``t[e]`` for each cuff not in the tree;
* relations ``x[w,j] x[u,i] = 1`` for a tree cuff joining slot i of u to
  slot j of w, and ``t x[w,j] t^-1 x[u,i] = 1`` for the other cuffs.

Words are tuples of non-zero ints: ``k+1`` is generator ``k`` and ``-(k+1)``
its inverse.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

from .errors import DomainError


def reduce_word(word) -> tuple:
    out = []
    for letter in word:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def cyclic_reduce(word) -> tuple:
    w = list(reduce_word(word))
    while len(w) > 1 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


def invert(word) -> tuple:
    return tuple(-x for x in reversed(word))


@dataclass(frozen=True)
class CurveWord:
    """A reduced word in the presentation generators."""

    letters: tuple

    def __post_init__(self):
        object.__setattr__(self, "letters", reduce_word(tuple(int(x) for x in self.letters)))
        if any(x == 0 for x in self.letters):
            raise DomainError("letter 0 is not a generator")

    def __len__(self):
        return len(self.letters)

    def inverse(self) -> "CurveWord":
        return CurveWord(invert(self.letters))

    def __mul__(self, other: "CurveWord") -> "CurveWord":
        return CurveWord(self.letters + other.letters)

    def rotated(self, k: int) -> "CurveWord":
        w = self.letters
        k %= max(len(w), 1)
        return CurveWord(w[k:] + w[:k])

    def as_pairs(self):
        """(generator index, exponent) pairs with runs collapsed."""
        out = []
        for x in self.letters:
            g, e = abs(x) - 1, (1 if x > 0 else -1)
            if out and out[-1][0] == g:
                out[-1] = (g, out[-1][1] + e)
            else:
                out.append((g, e))
        return [p for p in out if p[1] != 0]

    def __str__(self):
        return " ".join(str(x) for x in self.letters) or "1"


@dataclass(frozen=True)
class Cuff:
    ends: tuple  # ((pants, slot), (pants, slot))


@dataclass(frozen=True)
class PantsGraph:
    genus: int
    cuffs: tuple  # tuple of Cuff
    n_pants: int = field(default=None)

    def __post_init__(self):
        g = self.genus
        if not isinstance(g, int) or g < 2:
            raise DomainError("genus must be an integer >= 2")
        n = 2 * g - 2 if self.n_pants is None else self.n_pants
        object.__setattr__(self, "n_pants", n)
        cuffs = tuple(c if isinstance(c, Cuff) else Cuff(tuple(tuple(e) for e in c)) for c in self.cuffs)
        object.__setattr__(self, "cuffs", cuffs)
        if n != 2 * g - 2:
            raise DomainError(f"genus {g} needs {2 * g - 2} pants, got {n}")
        if len(cuffs) != 3 * g - 3:
            raise DomainError(f"genus {g} needs {3 * g - 3} cuffs, got {len(cuffs)}")
        seen = set()
        for c in cuffs:
            if len(c.ends) != 2:
                raise DomainError("each cuff joins exactly two boundary slots")
            for v, k in c.ends:
                if not (0 <= v < n and k in (0, 1, 2)):
                    raise DomainError(f"bad boundary slot ({v}, {k})")
                if (v, k) in seen:
                    raise DomainError(f"boundary slot ({v}, {k}) used twice")
                seen.add((v, k))
        if len(seen) != 3 * n:
            raise DomainError("every pants needs all three slots glued")
        if len(self._bfs()[0]) != n:
            raise DomainError("pants graph is not connected")

    @classmethod
    def from_edges(cls, genus, edges):
        return cls(genus=genus, cuffs=tuple(Cuff(tuple(tuple(e) for e in ed)) for ed in edges))

    def _bfs(self, root: int = 0):
        order, parent = [root], {root: None}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for e, c in enumerate(self.cuffs):
                (a, _), (b, _) = c.ends
                if a == b:
                    continue
                for x, y in ((a, b), (b, a)):
                    if x == u and y not in parent:
                        parent[y] = (u, e)
                        order.append(y)
                        queue.append(y)
        return order, parent

    @cached_property
    def tree(self):
        """(bfs order, {pants: (parent, cuff index) or None}).

        Rooted at a centre of the graph: global holonomy matrices grow
        exponentially with tree depth, so a shallow tree keeps them tame.
        """
        depth = []
        for r in range(self.n_pants):
            order, parent = self._bfs(r)
            depth.append(max(len(self._walk(parent, v)) for v in order))
        return self._bfs(int(min(range(self.n_pants), key=depth.__getitem__)))

    @staticmethod
    def _walk(parent, v):
        path = []
        while parent[v] is not None:
            u, e = parent[v]
            path.append(e)
            v = u
        return path[::-1]

    @cached_property
    def tree_cuffs(self) -> frozenset:
        return frozenset(e for v, pe in self.tree[1].items() if pe is not None for e in [pe[1]])

    def slot_cuff(self, v: int, k: int) -> int:
        for e, c in enumerate(self.cuffs):
            if (v, k) in c.ends:
                return e
        raise KeyError((v, k))

    def is_self_glued(self, e: int) -> bool:
        (a, _), (b, _) = self.cuffs[e].ends
        return a == b

    # -- presentation -------------------------------------------------------

    @cached_property
    def generators(self) -> tuple:
        gens = []
        for v in range(self.n_pants):
            gens.append(("x", v, 0))
            gens.append(("x", v, 1))
        for e in range(len(self.cuffs)):
            if e not in self.tree_cuffs:
                gens.append(("t", e))
        return tuple(gens)

    def letter(self, label, inverse=False) -> int:
        k = self.generators.index(label) + 1
        return -k if inverse else k

    def slot_word(self, v: int, k: int) -> tuple:
        if k == 2:
            return (-self.letter(("x", v, 1)), -self.letter(("x", v, 0)))
        return (self.letter(("x", v, k)),)

    def relations(self) -> list:
        rels = []
        for e, c in enumerate(self.cuffs):
            (u, i), (w, j) = c.ends
            if e in self.tree_cuffs:
                rels.append(reduce_word(self.slot_word(w, j) + self.slot_word(u, i)))
            else:
                t = self.letter(("t", e))
                rels.append(reduce_word((t,) + self.slot_word(w, j) + (-t,) + self.slot_word(u, i)))
        return rels

    def cuff_word(self, e: int) -> CurveWord:
        (u, i), _ = self.cuffs[e].ends
        return CurveWord(self.slot_word(u, i))

    def parent_side(self, e: int):
        """For a tree cuff, the ((pants, slot), (pants, slot)) ends ordered parent first."""
        (a, i), (b, j) = self.cuffs[e].ends
        parent = self.tree[1]
        if parent.get(b) is not None and parent[b] == (a, e):
            return (a, i), (b, j)
        return (b, j), (a, i)

    # -- combinatorial crossings ----------------------------------------------

    def _tree_path(self, v: int) -> list:
        """Cuffs crossed walking from the root pants to ``v`` along the tree."""
        return self._walk(self.tree[1], v)

    def crossing_sequence(self, word) -> list:
        """Cuff crossings of the loop represented by ``word``, cyclically cancelled.

        Each generator is a based loop: walk the tree to its pants (or across a
        stable cuff), go around, walk back.  Tokens are ``("c", cuff)`` for a
        crossing and ``("g", letter)`` for the loop inside a pants; cancelling
        back-and-forth crossings gives the reduced crossing sequence.
        """
        toks = []
        for x in word:
            label = self.generators[abs(x) - 1]
            if label[0] == "x":
                path = self._tree_path(label[1])
                piece = [("c", e) for e in path] + [("g", x)] + [("c", e) for e in reversed(path)]
            else:
                e = label[1]
                (u, _), (w, _) = self.cuffs[e].ends
                piece = ([("c", f) for f in self._tree_path(u)] + [("c", e)]
                         + [("c", f) for f in reversed(self._tree_path(w))])
                if x < 0:
                    piece = piece[::-1]
            toks.extend(piece)
        out = []
        for tk in toks:
            if out and tk[0] == "c" and out[-1] == tk:
                out.pop()
            else:
                out.append(tk)
        while len(out) > 1 and out[0][0] == "c" and out[0] == out[-1]:
            out = out[1:-1]
        return out

    def crossing_count(self, word, e: int) -> int:
        return sum(1 for tk in self.crossing_sequence(word) if tk == ("c", e))

    # -- reduced generating set ---------------------------------------------

    @cached_property
    def reduced_basis(self):
        """Eliminate generators using all but one relation.

        Returns ``(kept, substitution)`` where ``kept`` is a tuple of 2G
        presentation generator indices and ``substitution`` maps every
        eliminated generator index to a word in the kept generators.
        """
        rels = self.relations()
        order = sorted(range(len(rels)), key=lambda e: (e not in self.tree_cuffs, e))
        subst: dict = {}
        target = 3 * self.genus - 4
        for e in order:
            if len(subst) == target:
                break
            r = cyclic_reduce(_substitute(rels[e], subst))
            counts: dict = {}
            for x in r:
                counts[abs(x)] = counts.get(abs(x), 0) + 1
            candidates = [g for g, n in counts.items() if n == 1]
            if not candidates:
                continue
            # prefer eliminating pants generators far from the root
            g = max(candidates)
            k = next(idx for idx, x in enumerate(r) if abs(x) == g)
            rot = r[k:] + r[:k]
            rest = rot[1:]
            value = invert(rest) if rot[0] > 0 else rest
            subst = {h: reduce_word(_substitute(w, {g: value})) for h, w in subst.items()}
            subst[g] = reduce_word(value)
        kept = tuple(g for g in range(1, len(self.generators) + 1) if g not in subst)
        return kept, subst

    def to_reduced(self, word) -> tuple:
        """Rewrite a presentation word in the reduced generators (as presentation letters)."""
        return reduce_word(_substitute(tuple(word), self.reduced_basis[1]))


def _substitute(word, subst) -> tuple:
    out = []
    for x in word:
        g = abs(x)
        if g in subst:
            w = subst[g]
            out.extend(w if x > 0 else invert(w))
        else:
            out.append(x)
    return tuple(out)


def theta_graph() -> PantsGraph:
    """Genus 2: two pants glued slot-to-slot along three cuffs."""
    return PantsGraph.from_edges(2, [((0, 0), (1, 0)), ((0, 1), (1, 1)), ((0, 2), (1, 2))])


def dumbbell_graph() -> PantsGraph:
    """Genus 2: two one-holed tori joined by a separating cuff (cuff 2)."""
    return PantsGraph.from_edges(2, [((0, 0), (0, 1)), ((1, 0), (1, 1)), ((0, 2), (1, 2))])


def chain_graph(genus: int) -> PantsGraph:
    """Genus-G chain: a one-holed torus at each end, pants pairs joined by double cuffs."""
    if genus == 2:
        return dumbbell_graph()
    n = 2 * genus - 2
    edges = [((0, 0), (0, 1)), ((0, 2), (1, 0))]
    for k in range(1, n - 1, 2):
        edges.append(((k, 1), (k + 1, 0)))
        edges.append(((k, 2), (k + 1, 1)))
        if k + 2 <= n - 1:
            edges.append(((k + 1, 2), (k + 2, 0)))
    edges.append(((n - 1, 1), (n - 1, 2)))
    return PantsGraph.from_edges(genus, edges)
