"""Independent reference computations used to cross-check the library.

None of these call into divpower beyond reading basis orderings.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np


# --- divided powers through the rational embedding x^(a) -> x^a / a! ---------------------

def _to_poly(coeffs: dict) -> dict:
    """Divided power monomials to ordinary rational monomials."""
    out = {}
    for a, c in coeffs.items():
        denom = math.prod(math.factorial(x) for x in a)
        out[a] = out.get(a, Fraction(0)) + Fraction(c, denom)
    return out


def _poly_mul(f: dict, g: dict, D: int) -> dict:
    out = {}
    for a, c in f.items():
        for b, d in g.items():
            s = tuple(x + y for x, y in zip(a, b))
            if sum(s) <= D:
                out[s] = out.get(s, Fraction(0)) + c * d
    return out


def gamma_oracle(monomials: list, v: list[int], n: int, D: int, p: int) -> list[int]:
    """γ_n(v) in the free divided power algebra, via (Σ c_a x^a/a!)^n / n! over Q."""
    f = _to_poly({a: int(c) for a, c in zip(monomials, v) if c})
    acc = {tuple(0 for _ in monomials[0]): Fraction(1)}
    for _ in range(n):
        acc = _poly_mul(acc, f, D)
    out = []
    for a in monomials:
        val = acc.get(a, Fraction(0)) / math.factorial(n) * math.prod(math.factorial(x) for x in a)
        assert val.denominator % p != 0, "non-integral divided power coefficient"
        out.append(int(val.numerator * pow(val.denominator, -1, p)) % p)
    return out


def product_oracle(monomials: list, u: list[int], v: list[int], D: int, p: int) -> list[int]:
    f = _to_poly({a: int(c) for a, c in zip(monomials, u) if c})
    g = _to_poly({a: int(c) for a, c in zip(monomials, v) if c})
    prod = _poly_mul(f, g, D)
    out = []
    for a in monomials:
        val = prod.get(a, Fraction(0)) * math.prod(math.factorial(x) for x in a)
        out.append(int(val.numerator * pow(val.denominator, -1, p)) % p)
    return out


# --- restricted Lie algebras inside gl_n: the p-map is the matrix p-th power -------------

def matrix_power_mod(m: np.ndarray, e: int, p: int) -> np.ndarray:
    out = np.eye(m.shape[0], dtype=np.int64)
    for _ in range(e):
        out = out @ m % p
    return out


def heisenberg_matrices() -> list[np.ndarray]:
    """x = E12, y = E23, z = E13 in gl_3."""
    def E(i, j):
        m = np.zeros((3, 3), dtype=np.int64)
        m[i, j] = 1
        return m
    return [E(0, 1), E(1, 2), E(0, 2)]


def sl2_matrices(p: int) -> list[np.ndarray]:
    """e, h, f in gl_2 with [h, e] = 2e, [h, f] = -2f, [e, f] = h."""
    return [np.array([[0, 1], [0, 0]]), np.array([[1, 0], [0, p - 1]]), np.array([[0, 0], [1, 0]])]


def coords_in(mats: list[np.ndarray], m: np.ndarray, p: int) -> list[int]:
    """Coordinates of m in the span of mats by brute force (tiny cases only)."""
    for c in itertools.product(range(p), repeat=len(mats)):
        if np.array_equal(sum(ci * mi for ci, mi in zip(c, mats)) % p, m % p):
            return list(c)
    raise AssertionError("matrix outside the span")


# --- brute-force enumeration of linear maps ----------------------------------------

def all_matrices(rows: int, cols: int, p: int):
    for flat in itertools.product(range(p), repeat=rows * cols):
        yield np.array(flat, dtype=np.int64).reshape(rows, cols)


def count_assoc_derivations(table: np.ndarray, left: np.ndarray, right: np.ndarray, p: int) -> int:
    """#{d : d(ab) = a·d(b) + d(a)·b} for a ring with table T[i,j,k] and bimodule actions."""
    n = table.shape[0]
    dim = left.shape[1]
    count = 0
    for d in all_matrices(dim, n, p):
        ok = True
        for i in range(n):
            for j in range(n):
                lhs = d @ table[i, j] % p
                rhs = (left[i] @ d[:, j] + right[j] @ d[:, i]) % p
                if not np.array_equal(lhs, rhs):
                    ok = False
                    break
            if not ok:
                break
        count += ok
    return count


def lucas_reference(n: int, k: int, p: int) -> int:
    return math.comb(n, k) % p


def multinomial_reference(parts: list[int], p: int) -> int:
    n = sum(parts)
    out = math.factorial(n)
    for x in parts:
        out //= math.factorial(x)
    return out % p
