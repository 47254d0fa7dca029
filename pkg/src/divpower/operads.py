"""The operads Com and Lie at small arity, with Σ_n actions and compositions.

Lie(n) is realized inside the free associative algebra on n letters.  Its
basis is the left-normed combs [[x_0, x_t1], ..., x_t(n-1)] with t a
permutation of 1..n-1.  The comb coordinates of any multilinear Lie
polynomial are read off as the coefficients of the words beginning with
letter 0, since each comb contributes exactly one such word.

Action convention: (σ·μ)(x_0..x_{n-1}) = μ(x_σ(0), .., x_σ(n-1)), realized on
words by substituting letter i -> σ(i).
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from . import linalg
from .combinatorics import Composition, Permutation
from .errors import ArityTooLarge, InvalidArgs

Word = tuple


def _add_poly(acc: dict, word: Word, coef: int, p: int):
    c = (acc.get(word, 0) + coef) % p
    if c:
        acc[word] = c
    else:
        acc.pop(word, None)


def comb_expansion(letters: tuple, p: int) -> dict:
    """Associative expansion of the left-normed bracket of ``letters``."""
    poly = {(letters[0],): 1}
    for a in letters[1:]:
        nxt: dict = {}
        for w, c in poly.items():
            _add_poly(nxt, w + (a,), c, p)
            _add_poly(nxt, (a,) + w, -c, p)
        poly = nxt
    return poly


class OperadData:
    """An operad with P(n) given for 1 <= n <= max_arity, coefficients in F_p."""

    def __init__(self, name: str, max_arity: int, p: int):
        self.name = name
        self.max_arity = max_arity
        self.p = p
        self._perm_cache: dict = {}

    # subclasses implement these
    def dim(self, n: int) -> int:
        raise NotImplementedError

    def labels(self, n: int) -> list[str]:
        raise NotImplementedError

    def _action(self, n: int, sigma: Permutation) -> np.ndarray:
        raise NotImplementedError

    def _full_composition(self, n: int, degrees: tuple) -> np.ndarray:
        raise NotImplementedError

    def _check_arity(self, *ns):
        for n in ns:
            if n < 1 or n > self.max_arity:
                raise ArityTooLarge(f"arity {n} outside 1..{self.max_arity} for {self.name}")

    def unit(self) -> np.ndarray:
        return np.ones(1, dtype=np.int64)

    def action_matrix(self, n: int, sigma: Permutation) -> np.ndarray:
        """Matrix whose column j is σ·(basis j)."""
        self._check_arity(n)
        key = (n, sigma.images)
        mat = self._perm_cache.get(key)
        if mat is None:
            mat = self._action(n, sigma)
            mat.setflags(write=False)
            self._perm_cache[key] = mat
        return mat

    def act(self, sigma: Permutation, x: np.ndarray) -> np.ndarray:
        """σ·x for a coordinate vector (or (dim, k) coefficient array)."""
        mat = self.action_matrix(sigma.n, sigma)
        x = np.asarray(x, dtype=np.int64)
        if x.ndim == 1:
            return linalg.mod_matmul(mat, x[:, None], self.p)[:, 0]
        return np.stack([linalg.mod_matmul(mat, x[:, c:c + 1], self.p)[:, 0] for c in range(x.shape[1])], axis=1)

    def composition(self, n: int, degrees) -> np.ndarray:
        """Tensor G[x, y_1, .., y_n, z] of the full composition x(y_1, .., y_n)."""
        degrees = tuple(int(d) for d in degrees)
        if len(degrees) != n:
            raise InvalidArgs("need one degree per input")
        self._check_arity(n, *degrees, sum(degrees))
        return self._composition_cached(n, degrees)

    @lru_cache(maxsize=None)
    def _composition_cached(self, n, degrees):
        g = self._full_composition(n, degrees)
        g.setflags(write=False)
        return g

    def partial(self, n: int, m: int, i: int) -> np.ndarray:
        """Tensor T[x, y, z] of x ∘_i y (0-based slot i)."""
        degrees = [1] * n
        degrees[i] = m
        g = self.composition(n, degrees)
        # contract the arity-one slots with the unit of P(1)
        u = self.unit()
        out = g
        # axes: 0 = x, 1..n = inputs, n+1 = z; contract from the last input backwards
        for slot in reversed(range(n)):
            if slot == i:
                continue
            out = np.tensordot(out, u, axes=([slot + 1], [0])) % self.p
        return out

    def compose(self, x, ys) -> np.ndarray:
        """x(y_1, .., y_n) on integer coordinate vectors."""
        n = len(ys)
        degrees = [self.arity_of(y) for y in ys]
        g = self.composition(n, degrees)
        out = np.tensordot(np.asarray(x, dtype=np.int64), g, axes=([0], [0])) % self.p
        for y in ys:
            out = np.tensordot(np.asarray(y, dtype=np.int64), out, axes=([0], [0])) % self.p
        return out

    def arity_of(self, y) -> int:
        d = len(y)
        for n in range(1, self.max_arity + 1):
            if self.dim(n) == d:
                return n
        raise InvalidArgs("cannot infer arity")

    # --- invariants --------------------------------------------------------
    def invariants_subspace(self, n: int, r=None) -> np.ndarray:
        """Basis (rows) of P(n)^{Σ_r}; r defaults to (n,)."""
        self._check_arity(n)
        r = Composition(r if r is not None else (n,))
        if r.n != n:
            raise InvalidArgs("composition must sum to n")
        eqs = []
        eye = np.eye(self.dim(n), dtype=np.int64)
        for block in r.blocks():
            for a in list(block)[:-1]:
                t = Permutation.transposition(n, a, a + 1)
                eqs.append((self.action_matrix(n, t) - eye) % self.p)
        if not eqs:
            return eye
        return linalg.kernel(np.vstack(eqs), self.p)

    def is_invariant(self, n: int, r, x) -> bool:
        r = Composition(r)
        x = np.asarray(x, dtype=np.int64) % self.p
        for block in r.blocks():
            for a in list(block)[:-1]:
                t = Permutation.transposition(n, a, a + 1)
                if not np.array_equal(self.act(t, x) % self.p, x):
                    return False
        return True

    # --- axiom checks ------------------------------------------------------
    def check_axioms(self) -> dict:
        """Associativity (sequential and parallel), unit laws, involutions."""
        p = self.p
        failures = []
        count = 0
        N = self.max_arity
        for n in range(1, N + 1):
            for a in range(n - 1):
                t = self.action_matrix(n, Permutation.transposition(n, a, a + 1))
                count += 1
                if not np.array_equal(linalg.mod_matmul(t, t, p), np.eye(self.dim(n), dtype=np.int64)):
                    failures.append(("involution", n, a))
        u = self.unit()
        for n in range(1, N + 1):
            for i in range(n):
                tab = self.partial(n, 1, i)
                count += 1
                if not np.array_equal(np.tensordot(tab, u, axes=([1], [0])) % p, np.eye(self.dim(n), dtype=np.int64)):
                    failures.append(("right unit", n, i))
            tab = self.partial(1, n, 0)
            count += 1
            if not np.array_equal(np.tensordot(u, tab, axes=([0], [0])) % p, np.eye(self.dim(n), dtype=np.int64)):
                failures.append(("left unit", n))
        for n, m, l in itertools.product(range(1, N + 1), repeat=3):
            if n + m + l - 2 > N:
                continue
            for i in range(n):
                xy = self.partial(n, m, i)
                # sequential: (x∘_i y)∘_{i+j} z = x∘_i (y∘_j z)
                for j in range(m):
                    lhs = np.einsum("abc,cde->abde", xy, self.partial(n + m - 1, l, i + j)) % p
                    rhs = np.einsum("bdf,afe->abde", self.partial(m, l, j), self.partial(n, m + l - 1, i)) % p
                    count += 1
                    if not np.array_equal(lhs, rhs):
                        failures.append(("sequential", n, m, l, i, j))
                # parallel: (x∘_i y)∘_{j+m-1} z = (x∘_j z)∘_i y for i < j
                for j in range(i + 1, n):
                    lhs = np.einsum("abc,cde->abde", xy, self.partial(n + m - 1, l, j + m - 1)) % p
                    xz = self.partial(n, l, j)
                    rhs = np.einsum("adf,fbe->abde", xz, self.partial(n + l - 1, m, i)) % p
                    count += 1
                    if not np.array_equal(lhs, rhs):
                        failures.append(("parallel", n, m, l, i, j))
        return {"checked": count, "failures": failures, "ok": not failures}


class ComOperad(OperadData):
    def __init__(self, max_arity: int, p: int):
        if max_arity > 6:
            raise ArityTooLarge("Com is supported up to arity 6")
        super().__init__("Com", max_arity, p)

    def dim(self, n):
        self._check_arity(n)
        return 1

    def labels(self, n):
        return [f"X_{n}"]

    def _action(self, n, sigma):
        return np.ones((1, 1), dtype=np.int64)

    def _full_composition(self, n, degrees):
        return np.ones((1,) * (n + 2), dtype=np.int64)


class LieOperad(OperadData):
    def __init__(self, max_arity: int, p: int):
        if max_arity > 4:
            raise ArityTooLarge("Lie is supported up to arity 4")
        super().__init__("Lie", max_arity, p)
        self._basis = {}
        self._index = {}
        for n in range(1, max_arity + 1):
            tails = list(itertools.permutations(range(1, n)))
            self._basis[n] = tails
            self._index[n] = {(0,) + t: i for i, t in enumerate(tails)}
        self._expansions = {n: [comb_expansion((0,) + t, p) for t in self._basis[n]]
                            for n in range(1, max_arity + 1)}

    def dim(self, n):
        self._check_arity(n)
        return len(self._basis[n])

    def labels(self, n):
        out = []
        for t in self._basis[n]:
            s = "x1"
            for a in t:
                s = f"[{s},x{a + 1}]"
            out.append(s)
        return out

    def expansion(self, n: int, vec) -> dict:
        poly: dict = {}
        for i, c in enumerate(np.asarray(vec, dtype=np.int64) % self.p):
            if c:
                for w, wc in self._expansions[n][i].items():
                    _add_poly(poly, w, int(c) * wc, self.p)
        return poly

    def coordinates(self, n: int, poly: dict) -> np.ndarray:
        """Comb coordinates of a multilinear Lie polynomial; verifies membership."""
        vec = np.zeros(self.dim(n), dtype=np.int64)
        index = self._index[n]
        for w, c in poly.items():
            if w[0] == 0:
                vec[index[w]] = c % self.p
        back = self.expansion(n, vec)
        if back != {w: c % self.p for w, c in poly.items() if c % self.p}:
            raise InvalidArgs("polynomial is not a Lie element")
        return vec

    def _action(self, n, sigma):
        mat = np.zeros((self.dim(n), self.dim(n)), dtype=np.int64)
        for j, exp in enumerate(self._expansions[n]):
            poly: dict = {}
            for w, c in exp.items():
                _add_poly(poly, tuple(sigma(a) for a in w), c, self.p)
            mat[:, j] = self.coordinates(n, poly)
        return mat

    def _full_composition(self, n, degrees):
        total = sum(degrees)
        starts = np.cumsum((0,) + degrees)[:-1]
        shape = (self.dim(n),) + tuple(self.dim(d) for d in degrees) + (self.dim(total),)
        g = np.zeros(shape, dtype=np.int64)
        for xi, xexp in enumerate(self._expansions[n]):
            for combo in itertools.product(*(range(self.dim(d)) for d in degrees)):
                subs = [self._expansions[d][b] for d, b in zip(degrees, combo)]
                poly: dict = {}
                for w, c in xexp.items():
                    # substitute each letter a of w by the shifted words of input a
                    terms = [((), c)]
                    for a in w:
                        nxt = []
                        for prefix, pc in terms:
                            for sw, sc in subs[a].items():
                                nxt.append((prefix + tuple(starts[a] + x for x in sw), pc * sc))
                        terms = nxt
                    for word, wc in terms:
                        _add_poly(poly, tuple(int(x) for x in word), wc, self.p)
                g[(xi,) + combo] = self.coordinates(total, poly)
        return g


def operad_com(N: int, p: int) -> ComOperad:
    return ComOperad(N, p)


def operad_lie(N: int, p: int) -> LieOperad:
    return LieOperad(N, p)


def invariants_subspace(P: OperadData, n: int, r=None) -> np.ndarray:
    return P.invariants_subspace(n, r)


def lie_fp_element(p: int, operad: LieOperad | None = None) -> np.ndarray:
    """Sum over σ fixing the first input of σ·(left-normed (p-1)-fold bracket)."""
    if p > 4:
        raise ArityTooLarge("Lie is supported up to arity 4")
    P = operad or operad_lie(p, p)
    comb = np.zeros(P.dim(p), dtype=np.int64)
    comb[P._index[p][tuple(range(p))]] = 1
    total = np.zeros(P.dim(p), dtype=np.int64)
    for rest in itertools.permutations(range(1, p)):
        sigma = Permutation((0,) + rest)
        total = (total + P.act(sigma, comb)) % p
    if not P.is_invariant(p, (p,), total):
        raise AssertionError("F_p element is not Σ_p-invariant")
    return total
