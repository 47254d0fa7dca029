"""Finite fields F_{p^k}, Frobenius-semilinear systems and Lucas arithmetic.

Internally a field element is a length-k coefficient vector in the power
basis 1, w, ..., w^(k-1).  Bulk data (vectors, tensors) are numpy int arrays
whose trailing axis has length k; :class:`FieldElement` is the scalar wrapper
used at API boundaries.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .errors import (DimensionMismatch, DivisionByZero, FieldMismatch,
                     InvalidArgs, NoSolution)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


# --- polynomials over F_p, coefficient lists low-to-high -------------------

def _trim(poly):
    poly = list(poly)
    while poly and poly[-1] == 0:
        poly.pop()
    return poly


def _poly_mod(a, b, p):
    a = _trim(x % p for x in a)
    b = _trim(x % p for x in b)
    inv = pow(b[-1], -1, p)
    while len(a) >= len(b):
        factor = (a[-1] * inv) % p
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - factor * c) % p
        a = _trim(a)
    return a


def _is_irreducible(modulus, p) -> bool:
    k = len(modulus) - 1
    for d in range(1, k // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            if not _poly_mod(modulus, list(tail) + [1], p):
                return False
    return True


def first_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Lexicographically first monic irreducible of degree k (deterministic default)."""
    for tail in itertools.product(range(p), repeat=k):
        cand = tuple(reversed(tail)) + (1,)
        if cand[0] != 0 and _is_irreducible(cand, p):
            return cand
    raise InvalidArgs(f"no irreducible polynomial of degree {k} over F_{p}")


class FieldSpec:
    """The field F_p[w]/(modulus).  Immutable; compares by (p, k, modulus)."""

    def __init__(self, p: int, k: int = 1, modulus: Sequence[int] | None = None):
        if not is_prime(int(p)):
            raise InvalidArgs(f"p={p} is not prime")
        if int(k) < 1:
            raise InvalidArgs("extension degree must be >= 1")
        p, k = int(p), int(k)
        if modulus is None:
            modulus = (0, 1) if k == 1 else first_irreducible(p, k)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != k + 1 or modulus[-1] != 1:
            raise InvalidArgs("modulus must be monic of degree k (k+1 coefficients, low-to-high)")
        if k > 1 and not _is_irreducible(modulus, p):
            raise InvalidArgs(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.k = k
        self.modulus = modulus
        self.q = p**k

    # identity
    def _key(self):
        return (self.p, self.k, self.modulus)

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.k == 1:
            return f"FieldSpec(p={self.p})"
        return f"FieldSpec(p={self.p}, k={self.k}, modulus={list(self.modulus)})"

    @property
    def is_prime_field(self) -> bool:
        return self.k == 1

    # --- precomputed tables ----------------------------------------------
    @cached_property
    def mul_tensor(self) -> np.ndarray:
        """T[a, b, c] = coefficient of w^c in w^a * w^b."""
        k, p = self.k, self.p
        powers = []
        for e in range(2 * k - 1):
            mono = [0] * e + [1]
            red = _poly_mod(mono, self.modulus, p) if e >= k else mono
            powers.append(red + [0] * (k - len(red)))
        t = np.zeros((k, k, k), dtype=np.int64)
        for a in range(k):
            for b in range(k):
                t[a, b] = powers[a + b]
        return t

    @cached_property
    def frob_matrix(self) -> np.ndarray:
        """F with coeffs(x**p) = F @ coeffs(x)."""
        k = self.k
        cols = []
        for j in range(k):
            basis = np.zeros(k, dtype=np.int64)
            basis[j] = 1
            cols.append(self._pow_coeffs(basis, self.p))
        return np.array(cols, dtype=np.int64).T.copy()

    def frob_power_matrix(self, e: int) -> np.ndarray:
        e = e % self.k
        out = np.eye(self.k, dtype=np.int64)
        for _ in range(e):
            out = (self.frob_matrix @ out) % self.p
        return out

    @cached_property
    def _place(self) -> np.ndarray:
        return self.p ** np.arange(self.k, dtype=np.int64)

    @cached_property
    def code_table(self) -> np.ndarray:
        """Row c holds the coefficient vector of the element with code c."""
        codes = np.arange(self.q, dtype=np.int64)
        return (codes[:, None] // self._place[None, :]) % self.p

    @cached_property
    def mul_codes(self) -> np.ndarray:
        t = self.code_table
        return self.to_codes(self.mul(t[:, None, :], t[None, :, :]))

    @cached_property
    def add_codes(self) -> np.ndarray:
        t = self.code_table
        return self.to_codes((t[:, None, :] + t[None, :, :]) % self.p)

    @cached_property
    def inv_codes(self) -> np.ndarray:
        out = np.zeros(self.q, dtype=np.int64)
        mc = self.mul_codes
        for c in range(1, self.q):
            out[c] = int(np.flatnonzero(mc[c] == 1)[0])
        return out

    # --- array-level arithmetic --------------------------------------------
    def to_codes(self, arr) -> np.ndarray:
        arr = np.asarray(arr, dtype=np.int64)
        return arr @ self._place

    def from_codes(self, codes) -> np.ndarray:
        return self.code_table[np.asarray(codes, dtype=np.int64)]

    def zeros(self, shape) -> np.ndarray:
        if isinstance(shape, int):
            shape = (shape,)
        return np.zeros(tuple(shape) + (self.k,), dtype=np.int64)

    def scalar(self, value) -> np.ndarray:
        """Coefficient vector of an int, FieldElement or coefficient list."""
        if isinstance(value, FieldElement):
            if value.spec != self:
                raise FieldMismatch("element from a different field")
            return np.array(value.coeffs, dtype=np.int64)
        if isinstance(value, (int, np.integer)):
            out = np.zeros(self.k, dtype=np.int64)
            out[0] = int(value) % self.p
            return out
        vals = [int(v) % self.p for v in value]
        if len(vals) != self.k:
            raise InvalidArgs(f"scalar needs {self.k} coefficients, got {len(vals)}")
        return np.array(vals, dtype=np.int64)

    def vector(self, values: Iterable) -> np.ndarray:
        vals = list(values)
        if not vals:
            return self.zeros(0)
        return np.stack([self.scalar(v) for v in vals])

    def embed_prime(self, arr) -> np.ndarray:
        """Integer array (prime-field values) -> coefficient array."""
        arr = np.asarray(arr, dtype=np.int64) % self.p
        out = np.zeros(arr.shape + (self.k,), dtype=np.int64)
        out[..., 0] = arr
        return out

    def one(self) -> np.ndarray:
        return self.scalar(1)

    def mul(self, a, b) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.k == 1:
            return (a * b) % self.p
        return np.einsum("...a,...b,abc->...c", a, b, self.mul_tensor) % self.p

    def scale(self, lam, v) -> np.ndarray:
        lam = np.asarray(lam, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        return self.mul(lam.reshape((1,) * (v.ndim - 1) + (self.k,)), v)

    def _pow_coeffs(self, a, n: int) -> np.ndarray:
        result = self.one()
        base = np.asarray(a, dtype=np.int64) % self.p
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def power(self, a, n: int) -> np.ndarray:
        """Elementwise a**n for a coefficient array."""
        a = np.asarray(a, dtype=np.int64)
        if self.k == 1:
            return np.vectorize(lambda x: pow(int(x), n, self.p), otypes=[np.int64])(a) if a.size else a
        out = np.broadcast_to(self.one(), a.shape).copy()
        base = a % self.p
        while n:
            if n & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            n >>= 1
        return out

    def inv(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if not np.any(a):
            raise DivisionByZero("inverse of zero")
        if self.k == 1:
            return np.array([pow(int(a[0]), -1, self.p)], dtype=np.int64)
        return self._pow_coeffs(a, self.q - 2)

    def frob(self, a, e: int = 1) -> np.ndarray:
        """Apply x -> x**(p**e) entrywise."""
        a = np.asarray(a, dtype=np.int64)
        if self.k == 1 or e % self.k == 0:
            return a % self.p
        return (a @ self.frob_power_matrix(e).T) % self.p

    def matmul(self, a, b) -> np.ndarray:
        """(m,n,k) @ (n,l,k) -> (m,l,k); also handles vectors (n,k)."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        vec = b.ndim == 2
        if vec:
            b = b[:, None, :]
        if self.k == 1:
            out = linalg.mod_matmul(a[..., 0], b[..., 0], self.p)[..., None]
        else:
            out = np.einsum("ina,njb,abc->ijc", a, b, self.mul_tensor) % self.p
        return out[:, 0, :] if vec else out

    def identity(self, n: int) -> np.ndarray:
        return self.embed_prime(np.eye(n, dtype=np.int64))

    def random(self, rng: np.random.Generator, shape) -> np.ndarray:
        if isinstance(shape, int):
            shape = (shape,)
        return rng.integers(0, self.p, size=tuple(shape) + (self.k,), dtype=np.int64)

    def random_scalar(self, rng, nonzero=False) -> np.ndarray:
        while True:
            s = self.random(rng, ())
            if not nonzero or np.any(s):
                return s

    # --- restriction of scalars --------------------------------------------
    def restrict(self, a, e: int = 0) -> np.ndarray:
        """F_p matrix of v -> a @ Frob^e(v) on coefficient coordinates.

        Coordinate (i, c) of F_q^n sits at index i*k + c.
        """
        a = np.asarray(a, dtype=np.int64)
        m, n, k = a.shape
        if k == 1:
            return a[..., 0] % self.p
        # mult-by-scalar matrices: M[i, j, c, b] = sum_a a[i,j,a] T[a,b,c]
        blocks = np.einsum("ija,abc->icjb", a, self.mul_tensor) % self.p
        mat = blocks.reshape(m * k, n * k)
        if e % k:
            fb = np.kron(np.eye(n, dtype=np.int64), self.frob_power_matrix(e))
            mat = linalg.mod_matmul(mat, fb, self.p)
        return mat

    def flatten(self, v) -> np.ndarray:
        return np.asarray(v, dtype=np.int64).reshape(-1)

    def unflatten(self, flat, n: int) -> np.ndarray:
        return np.asarray(flat, dtype=np.int64).reshape(n, self.k)

    # --- elements ------------------------------------------------------------
    def element(self, value) -> "FieldElement":
        return FieldElement(self, tuple(int(c) for c in self.scalar(value)))

    def elements(self, arr) -> list["FieldElement"]:
        arr = np.asarray(arr, dtype=np.int64).reshape(-1, self.k)
        return [FieldElement(self, tuple(int(c) for c in row)) for row in arr]

    @property
    def gen(self) -> "FieldElement":
        c = [0] * self.k
        c[min(1, self.k - 1)] = 1
        return FieldElement(self, tuple(c))

    def all_elements(self) -> list["FieldElement"]:
        return self.elements(self.code_table)

    def format_scalar(self, coeffs) -> object:
        c = [int(x) for x in np.asarray(coeffs).reshape(-1)]
        return c[0] if self.k == 1 else c


@dataclass(frozen=True)
class FieldElement:
    spec: FieldSpec
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.spec.k or any(not 0 <= c < self.spec.p for c in self.coeffs):
            raise InvalidArgs("coefficients must be k residues in [0, p)")

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise FieldMismatch("elements over different fields")
            return other
        if isinstance(other, (int, np.integer)):
            return self.spec.element(int(other))
        return NotImplemented

    def _arr(self):
        return np.array(self.coeffs, dtype=np.int64)

    def _wrap(self, arr) -> "FieldElement":
        return FieldElement(self.spec, tuple(int(c) for c in np.asarray(arr).reshape(-1)))

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap((self._arr() + o._arr()) % self.spec.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap((self._arr() - o._arr()) % self.spec.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return self._wrap((-self._arr()) % self.spec.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.spec.mul(self._arr(), o._arr()))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        return self._wrap(self.spec.inv(self._arr()))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return self._wrap(self.spec._pow_coeffs(self._arr(), int(n)))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            other = self.spec.element(int(other))
        return isinstance(other, FieldElement) and other.spec == self.spec and other.coeffs == self.coeffs

    def __hash__(self):
        return hash((self.spec, self.coeffs))

    def __repr__(self):
        if self.spec.k == 1:
            return str(self.coeffs[0])
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                mono = "1" if i == 0 else ("w" if i == 1 else f"w^{i}")
                terms.append(mono if c == 1 and i else f"{c}" if i == 0 else f"{c}*{mono}")
        return " + ".join(reversed(terms)) or "0"


@dataclass(frozen=True)
class Matrix:
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatch("entries length must equal rows*cols")

    @property
    def spec(self) -> FieldSpec | None:
        return self.entries[0].spec if self.entries else None

    @classmethod
    def from_array(cls, spec: FieldSpec, arr) -> "Matrix":
        arr = np.asarray(arr, dtype=np.int64)
        if arr.ndim == 2:
            arr = spec.embed_prime(arr)
        m, n, _ = arr.shape
        return cls(m, n, tuple(spec.elements(arr)))

    @classmethod
    def from_rows(cls, spec: FieldSpec, rows: Sequence[Sequence]) -> "Matrix":
        rows = [list(r) for r in rows]
        m = len(rows)
        n = len(rows[0]) if rows else 0
        if any(len(r) != n for r in rows):
            raise DimensionMismatch("ragged rows")
        return cls(m, n, tuple(spec.element(x) for r in rows for x in r))

    def to_array(self, spec: FieldSpec | None = None) -> np.ndarray:
        spec = spec or self.spec
        if not self.entries:
            return np.zeros((self.rows, self.cols, spec.k if spec else 1), dtype=np.int64)
        return np.array([e.coeffs for e in self.entries], dtype=np.int64).reshape(self.rows, self.cols, -1)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]


@dataclass(frozen=True)
class SemilinearMap:
    """v -> matrix @ Frob^e(v)."""

    matrix: Matrix
    frobenius_power: int = 0

    def __post_init__(self):
        if self.frobenius_power < 0:
            raise InvalidArgs("frobenius_power must be non-negative")

    def apply(self, spec: FieldSpec, v) -> np.ndarray:
        return spec.matmul(self.matrix.to_array(spec), spec.frob(np.asarray(v), self.frobenius_power))

    def restricted(self, spec: FieldSpec) -> np.ndarray:
        return spec.restrict(self.matrix.to_array(spec), self.frobenius_power)


def _same_spec(*elems: FieldElement) -> FieldSpec:
    spec = elems[0].spec
    for e in elems[1:]:
        if e.spec != spec:
            raise FieldMismatch("elements over different fields")
    return spec


def field_arith(a: FieldElement, b, op: str) -> FieldElement:
    if op == "pow":
        if not isinstance(b, (int, np.integer)) or b < 0:
            raise InvalidArgs("pow needs a non-negative integer exponent")
        return a ** int(b)
    if op == "inv":
        if a.is_zero():
            raise DivisionByZero("inverse of zero")
        return a.inverse()
    if isinstance(b, FieldElement):
        _same_spec(a, b)
    ops = {"add": lambda: a + b, "sub": lambda: a - b, "mul": lambda: a * b}
    if op not in ops:
        raise InvalidArgs(f"unknown op {op!r}")
    return ops[op]()


def frobenius(a: FieldElement, e: int) -> FieldElement:
    if e < 0:
        raise InvalidArgs("e must be >= 0")
    return a._wrap(a.spec.frob(a._arr(), e))


def rref_fq(spec: FieldSpec, a) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_q of a coefficient array (m, n, k)."""
    a = np.array(a, dtype=np.int64, copy=True) % spec.p
    if spec.k == 1:
        rows, piv = linalg.rref(a[..., 0], spec.p)
        return rows[..., None], piv
    m, n, _ = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(np.any(a[r:, c], axis=-1))
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        a[r] = spec.scale(spec.inv(a[r, c]), a[r])
        col = a[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(np.any(col, axis=-1))
        if rows.size:
            a[rows] = (a[rows] - spec.mul(col[rows][:, None, :], a[r][None, :, :])) % spec.p
        pivots.append(c)
        r += 1
    return a[:r], pivots


@dataclass(frozen=True)
class LinearSolution:
    solution: tuple
    kernel: tuple


def solve_linear(A: Matrix, b: Sequence) -> LinearSolution:
    spec = A.spec
    if spec is None:
        if len(b):
            raise DimensionMismatch("b length must equal the number of rows")
        return LinearSolution((), ())
    if len(b) != A.rows:
        raise DimensionMismatch("b length must equal the number of rows")
    arr = A.to_array(spec)
    bvec = spec.vector(b)
    aug = np.concatenate([arr, bvec[:, None, :]], axis=1)
    rows, piv = rref_fq(spec, aug)
    n = A.cols
    if piv and piv[-1] == n:
        raise NoSolution("inconsistent system")
    x = spec.zeros(n)
    for i, c in enumerate(piv):
        x[c] = rows[i, n]
    free = [c for c in range(n) if c not in set(piv)]
    kern = []
    for f in free:
        v = spec.zeros(n)
        v[f] = spec.one()
        for i, c in enumerate(piv):
            v[c] = (-rows[i, f]) % spec.p
        kern.append(tuple(spec.elements(v)))
    return LinearSolution(tuple(spec.elements(x)), tuple(kern))


@dataclass(frozen=True)
class KernelResult:
    """F_p-basis of a kernel, each vector given in F_q coordinates."""

    basis: tuple
    dim: int
    k: int


def _equation_terms(eq) -> list[SemilinearMap]:
    if isinstance(eq, SemilinearMap):
        return [eq]
    return list(eq)


def semilinear_kernel(maps: Sequence, spec: FieldSpec | None = None) -> KernelResult:
    """Joint kernel of semilinear equations, each a map or a list of maps summed."""
    equations = [_equation_terms(eq) for eq in maps]
    specs = {t.matrix.spec for eq in equations for t in eq if t.matrix.entries}
    if spec is not None:
        specs.add(spec)
    if len(specs) > 1:
        raise FieldMismatch("equations over different fields")
    if not specs:
        raise InvalidArgs("cannot infer the field; pass spec")
    spec = specs.pop()
    ncols = {t.matrix.cols for eq in equations for t in eq}
    if len(ncols) > 1:
        raise DimensionMismatch("equations have different numbers of unknowns")
    n = ncols.pop() if ncols else 0
    space = linalg.RowSpace(n * spec.k, spec.p)
    for eq in equations:
        rows = {t.matrix.rows for t in eq}
        if len(rows) != 1:
            raise DimensionMismatch("terms of one equation must share a codomain")
        acc = None
        for t in eq:
            r = t.restricted(spec)
            acc = r if acc is None else (acc + r) % spec.p
        space.add(acc)
    kern = space.kernel()
    basis = tuple(tuple(spec.elements(v.reshape(n, spec.k))) for v in kern)
    return KernelResult(basis, len(basis), spec.k)


# --- Lucas arithmetic --------------------------------------------------------

def base_p_digits(n: int, p: int) -> list[int]:
    digits = []
    while n:
        n, d = divmod(n, p)
        digits.append(d)
    return digits


def _small_binomial(n: int, k: int, p: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num = num * (n - i) % p
        den = den * (i + 1) % p
    return num * pow(den, -1, p) % p


def lucas_binomial(n: int, k: int, p: int) -> int:
    if not is_prime(p):
        raise InvalidArgs("p must be prime")
    if n < 0 or k < 0 or k > n:
        raise InvalidArgs("need 0 <= k <= n")
    out = 1
    while n or k:
        n, nd = divmod(n, p)
        k, kd = divmod(k, p)
        if kd > nd:
            return 0
        out = out * _small_binomial(nd, kd, p) % p
    return out


def lucas_multinomial(n: int, parts: Sequence[int], p: int) -> int:
    parts = [int(x) for x in parts]
    if any(x < 0 for x in parts) or sum(parts) != n:
        raise InvalidArgs("parts must be non-negative and sum to n")
    out, acc = 1, 0
    for x in parts:
        acc += x
        out = out * lucas_binomial(acc, x, p) % p
        if not out:
            return 0
    return out


def factorial_mod(n: int, p: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out = out * i % p
    return out


def divided_power_coefficient(k: int, n: int, p: int) -> int:
    """(kn)! / (k! (n!)^k) mod p as a product of binomials C(jn-1, n-1)."""
    if n == 0 or k == 0:
        return 1
    out = 1
    for j in range(1, k + 1):
        out = out * lucas_binomial(j * n - 1, n - 1, p) % p
        if not out:
            return 0
    return out
