"""PBW straightening in U(L) and u(L).

Elements are dicts from sorted letter tuples (PBW words) to field codes.  A
word is put in normal form by swapping the first descent, e_a e_b = e_b e_a +
[e_a, e_b]; in the restricted case a run of p equal letters is replaced by the
p-map image.  Each rewrite either sorts the word further or shortens it, so
the recursion terminates; a step counter guards against bad input.
"""

from __future__ import annotations

import sys
from typing import Iterable

import numpy as np

from .errors import TooLarge
from .field import FieldSpec

MAX_STEPS = 5_000_000


class CodeArith:
    """Scalar arithmetic on integer codes of F_q elements."""

    def __init__(self, field: FieldSpec):
        self.field = field
        self.add_t = field.add_codes
        self.mul_t = field.mul_codes
        self.neg_t = field.to_codes((-field.code_table) % field.p)

    def add(self, a: int, b: int) -> int:
        return int(self.add_t[a, b])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_t[a, b])

    def neg(self, a: int) -> int:
        return int(self.neg_t[a])


def add_into(acc: dict, other: dict, coeff: int, ar: CodeArith) -> None:
    """acc += coeff * other, dropping zeros."""
    if coeff == 0:
        return
    for w, c in other.items():
        v = ar.add(acc.get(w, 0), ar.mul(coeff, c) if coeff != 1 else c)
        if v:
            acc[w] = v
        else:
            acc.pop(w, None)


def vector_to_terms(field: FieldSpec, v) -> list[tuple[int, int]]:
    """Nonzero (index, code) pairs of a coefficient array."""
    codes = field.to_codes(np.asarray(v, dtype=np.int64) % field.p)
    return [(int(i), int(codes[i])) for i in np.flatnonzero(codes)]


class Straightener:
    """Normal forms of words in U(L) (or u(L) when ``pmap`` is given)."""

    def __init__(self, field: FieldSpec, bracket: np.ndarray, pmap: np.ndarray | None = None):
        self.field = field
        self.ar = CodeArith(field)
        n = bracket.shape[0]
        self.n = n
        self.p = field.p
        self._bracket = [[vector_to_terms(field, bracket[a, b]) for b in range(n)] for a in range(n)]
        self._pmap = None if pmap is None else [vector_to_terms(field, pmap[a]) for a in range(n)]
        self._memo: dict = {}
        self.steps = 0

    @property
    def restricted(self) -> bool:
        return self._pmap is not None

    def normal_form(self, word: tuple) -> dict:
        memo = self._memo
        hit = memo.get(word)
        if hit is not None:
            return hit
        self.steps += 1
        if self.steps > MAX_STEPS:
            raise TooLarge("straightening exceeded its step budget")
        ar = self.ar
        res: dict = {}
        descent = -1
        for pos in range(len(word) - 1):
            if word[pos] > word[pos + 1]:
                descent = pos
                break
        if descent < 0:
            run = self._long_run(word)
            if run < 0:
                res = {word: 1}
            else:
                head, tail = word[:run], word[run + self.p:]
                for t, c in self._pmap[word[run]]:
                    add_into(res, self.normal_form(head + (t,) + tail), c, ar)
        else:
            a, b = word[descent], word[descent + 1]
            head, tail = word[:descent], word[descent + 2:]
            add_into(res, self.normal_form(head + (b, a) + tail), 1, ar)
            for t, c in self._bracket[a][b]:
                add_into(res, self.normal_form(head + (t,) + tail), c, ar)
        memo[word] = res
        return res

    def _long_run(self, word: tuple) -> int:
        """Start of the first run of p equal letters in a sorted word, or -1."""
        if self._pmap is None:
            return -1
        p = self.p
        start = 0
        while start < len(word):
            end = start
            while end < len(word) and word[end] == word[start]:
                end += 1
            if end - start >= p:
                return start
            start = end
        return -1

    def product(self, x: dict, y: dict) -> dict:
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(max(old, 20000))
        try:
            out: dict = {}
            ar = self.ar
            for u, cu in x.items():
                for v, cv in y.items():
                    add_into(out, self.normal_form(u + v), ar.mul(cu, cv), ar)
            return out
        finally:
            sys.setrecursionlimit(old)

    def word_of(self, exps: Iterable[int]) -> tuple:
        return tuple(i for i, e in enumerate(exps) for _ in range(e))

    def exps_of(self, word: tuple) -> tuple:
        out = [0] * self.n
        for i in word:
            out[i] += 1
        return tuple(out)

    def element(self, v) -> dict:
        """Embed a Lie algebra vector as a degree-one element."""
        return {(i,): c for i, c in vector_to_terms(self.field, v)}

    def power(self, x: dict, e: int) -> dict:
        out = {(): 1}
        for _ in range(e):
            out = self.product(out, x)
        return out
