"""Compositions, block permutations, shuffles and coset representatives.

Permutations are 0-based: ``images[j]`` is the image of position ``j``.
Products follow function composition, ``(s * t)(j) = s(t(j))``.
"""

from __future__ import annotations

import itertools
import math
from typing import Iterable, Sequence

from .errors import BadSplit, InvalidArgs, ShapeMismatch, TooLarge

MAX_GROUP_ORDER = math.factorial(10)
DEFAULT_INDEX_BOUND = 10**6


class Composition(tuple):
    """A tuple of non-negative integers; zero parts are kept."""

    def __new__(cls, parts: Iterable[int] = ()):
        parts = tuple(int(x) for x in parts)
        if any(x < 0 for x in parts):
            raise InvalidArgs("composition parts must be non-negative")
        return super().__new__(cls, parts)

    @property
    def n(self) -> int:
        return sum(self)

    @property
    def starts(self) -> tuple[int, ...]:
        out, acc = [], 0
        for x in self:
            out.append(acc)
            acc += x
        return tuple(out)

    def blocks(self) -> list[range]:
        return [range(s, s + x) for s, x in zip(self.starts, self)]

    def __repr__(self):
        return f"Composition{tuple(self)}"


class Permutation:
    __slots__ = ("images",)

    def __init__(self, images: Sequence[int]):
        images = tuple(int(x) for x in images)
        if sorted(images) != list(range(len(images))):
            raise InvalidArgs(f"{images} is not a permutation of 0..{len(images) - 1}")
        self.images = images

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(range(n))

    @classmethod
    def from_one_based(cls, images: Sequence[int]) -> "Permutation":
        return cls([x - 1 for x in images])

    @classmethod
    def transposition(cls, n: int, i: int, j: int) -> "Permutation":
        im = list(range(n))
        im[i], im[j] = im[j], im[i]
        return cls(im)

    @property
    def n(self) -> int:
        return len(self.images)

    def one_based(self) -> tuple[int, ...]:
        return tuple(x + 1 for x in self.images)

    def __call__(self, j: int) -> int:
        return self.images[j]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if other.n != self.n:
            raise ShapeMismatch("permutations of different degree")
        return Permutation(self.images[j] for j in other.images)

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for j, x in enumerate(self.images):
            inv[x] = j
        return Permutation(inv)

    def is_identity(self) -> bool:
        return all(j == x for j, x in enumerate(self.images))

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __lt__(self, other):
        return self.images < other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Permutation{self.one_based()}"


def _as_comp(r) -> Composition:
    return r if isinstance(r, Composition) else Composition(r)


def compose_split(r, i: int, l: int, l2: int) -> Composition:
    """Replace part ``i`` (0-based) by the two parts ``(l, l2)``."""
    r = _as_comp(r)
    if not 0 <= i < len(r):
        raise ShapeMismatch("part index out of range")
    if l < 0 or l2 < 0 or l + l2 != r[i]:
        raise BadSplit(f"{l}+{l2} does not split part {r[i]}")
    return Composition(r[:i] + (l, l2) + r[i + 1:])


def refine(q, r) -> Composition:
    """q ▷ r: sum consecutive parts of r in groups of sizes given by q."""
    q, r = _as_comp(q), _as_comp(r)
    if q.n != len(r):
        raise ShapeMismatch(f"q sums to {q.n} but r has {len(r)} parts")
    out, pos = [], 0
    for size in q:
        out.append(sum(r[pos:pos + size]))
        pos += size
    return Composition(out)


def diamond(r, qs: Sequence) -> Composition:
    """r ⋄ (q_1..q_s): part i contributes (r_i q_{i1}, ..., r_i q_{iu_i})."""
    r = _as_comp(r)
    qs = [_as_comp(q) for q in qs]
    if len(qs) != len(r):
        raise ShapeMismatch("need one composition per part of r")
    return Composition(ri * x for ri, q in zip(r, qs) for x in q)


def permute_parts(rho: Permutation, r) -> Composition:
    """r^rho with (r^rho)_{rho(i)} = r_i."""
    r = _as_comp(r)
    if rho.n != len(r):
        raise ShapeMismatch("rho must act on the parts of r")
    out = [0] * len(r)
    for i, x in enumerate(r):
        out[rho(i)] = x
    return Composition(out)


def block_permutation(rho: Permutation, r) -> Permutation:
    """Move block i (of size r_i) to slot rho(i), keeping order inside blocks."""
    r = _as_comp(r)
    if rho.n != len(r):
        raise ShapeMismatch("rho must act on the parts of r")
    target = permute_parts(rho, r)
    tstart = target.starts
    images = [0] * r.n
    for i, block in enumerate(r.blocks()):
        for t, pos in enumerate(block):
            images[pos] = tstart[rho(i)] + t
    return Permutation(images)


def shuffles(r) -> list[Permutation]:
    """Permutations increasing on each block of r, in lexicographic order."""
    r = _as_comp(r)
    n = r.n
    out = []
    # choose the image set of each block; increasing inside the block
    def rec(i, remaining, images):
        if i == len(r):
            out.append(Permutation(images))
            return
        for chosen in itertools.combinations(remaining, r[i]):
            rest = [x for x in remaining if x not in chosen]
            rec(i + 1, rest, images + list(chosen))
    rec(0, list(range(n)), [])
    out.sort()
    return out


def young_elements(r) -> list[Permutation]:
    """Elements of the Young subgroup Σ_r in lexicographic order."""
    r = _as_comp(r)
    order = 1
    for x in r:
        order *= math.factorial(x)
    if order > MAX_GROUP_ORDER:
        raise TooLarge(f"group of order {order} exceeds 10!")
    out = []
    for choice in itertools.product(*(itertools.permutations(b) for b in r.blocks())):
        out.append(Permutation([x for part in choice for x in part]))
    return out


def wreath_elements(layout: Sequence[tuple[int, int]]) -> list[Permutation]:
    """Elements of prod_j Σ_{d_j} ≀ Σ_{m_j} on consecutive blocks.

    ``layout`` lists pairs (d, m): m consecutive copies of a block of size d.
    The wreath factor permutes the copies as blocks and permutes inside each.
    """
    order = 1
    n = 0
    for d, m in layout:
        order *= math.factorial(d) ** m * math.factorial(m)
        n += d * m
    if order > MAX_GROUP_ORDER:
        raise TooLarge(f"group of order {order} exceeds 10!")
    factors = []
    start = 0
    for d, m in layout:
        elems = []
        for outer in itertools.permutations(range(m)):
            for inner in itertools.product(itertools.permutations(range(d)), repeat=m):
                images = [0] * (d * m)
                for c in range(m):
                    for t in range(d):
                        images[c * d + t] = outer[c] * d + inner[c][t]
                elems.append(tuple(start + x for x in images))
        factors.append(elems)
        start += d * m
    out = [Permutation([x for part in combo for x in part]) for combo in itertools.product(*factors)]
    out.sort()
    return out


def _group_elements(spec) -> list[Permutation]:
    if isinstance(spec, (Composition, tuple)) and all(isinstance(x, (int,)) for x in spec):
        return young_elements(spec)
    return sorted(spec)


def coset_reps(big, small, index_bound: int = DEFAULT_INDEX_BOUND) -> list[Permutation]:
    """Left-coset representatives of ``small`` in ``big`` (lexicographic minima).

    ``big`` and ``small`` are each a composition (meaning the Young subgroup)
    or an explicit collection of permutations.
    """
    big_elems = _group_elements(big)
    small_elems = _group_elements(small)
    if not big_elems or not small_elems:
        raise InvalidArgs("empty group")
    if len(big_elems) % len(small_elems):
        raise ShapeMismatch("small is not a subgroup of big (order does not divide)")
    index = len(big_elems) // len(small_elems)
    if index > index_bound:
        raise TooLarge(f"index {index} exceeds bound {index_bound}")
    small_imgs = [h.images for h in small_elems]
    covered: set = set()
    reps = []
    for g in big_elems:
        if g.images in covered:
            continue
        reps.append(g)
        gi = g.images
        for h in small_imgs:
            covered.add(tuple(gi[x] for x in h))
    if len(reps) != index:
        raise ShapeMismatch("small is not a subgroup of big")
    return reps


def multinomial(n: int, parts: Sequence[int]) -> int:
    out = math.factorial(n)
    for x in parts:
        out //= math.factorial(x)
    return out


def compositions_of(n: int, parts: int, min_part: int = 0) -> Iterable[Composition]:
    """All compositions of n into exactly ``parts`` parts, each >= min_part."""
    if parts == 0:
        if n == 0:
            yield Composition(())
        return
    for first in range(min_part, n - min_part * (parts - 1) + 1):
        for rest in compositions_of(n - first, parts - 1, min_part):
            yield Composition((first,) + tuple(rest))
