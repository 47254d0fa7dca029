"""Dense exact linear algebra over a prime field F_p.

Matrices are int64 numpy arrays with entries in [0, p).  Products go through
float64 BLAS whenever the accumulated sums stay below 2**52, which keeps them
exact; otherwise the inner dimension is chunked in int64.
"""

from __future__ import annotations

import numpy as np

_FLOAT_EXACT = 2**52
_INT_EXACT = 2**62


def as_mod(a, p: int) -> np.ndarray:
    return np.mod(np.asarray(a, dtype=np.int64), p)


def mod_matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Exact ``a @ b mod p`` for reduced operands."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    inner = a.shape[-1]
    if inner == 0:
        return np.zeros(a.shape[:-1] + b.shape[-1:], dtype=np.int64)
    bound = (p - 1) ** 2
    if inner * bound < _FLOAT_EXACT:
        out = np.matmul(a.astype(np.float64), b.astype(np.float64))
        return np.mod(np.rint(out).astype(np.int64), p)
    step = max(1, _INT_EXACT // max(bound, 1))
    out = np.zeros(a.shape[:-1] + b.shape[-1:], dtype=np.int64)
    for start in range(0, inner, step):
        out = np.mod(out + np.matmul(a[..., start:start + step], b[start:start + step]), p)
    return out


def _rref_dense(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Row reduce a copy of ``a``; returns the nonzero rows and pivot columns."""
    a = np.array(a, dtype=np.int64, copy=True)
    m, n = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), -1, p)
        if inv != 1:
            a[r, c:] = (a[r, c:] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            a[np.ix_(rows, np.arange(c, n))] = np.mod(
                a[np.ix_(rows, np.arange(c, n))] - np.outer(col[rows], a[r, c:]), p)
        pivots.append(c)
        r += 1
    return a[:r], pivots


class RowSpace:
    """Incrementally maintained reduced row echelon basis of a row space.

    Blocks of equations are reduced against the current basis with one matrix
    product, so tall systems never materialize in full.
    """

    def __init__(self, ncols: int, p: int):
        self.ncols = ncols
        self.p = p
        self.rows = np.zeros((0, ncols), dtype=np.int64)
        self.pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, block: np.ndarray) -> np.ndarray:
        block = np.mod(np.atleast_2d(np.asarray(block, dtype=np.int64)), self.p)
        if self.pivots and block.size:
            block = np.mod(block - mod_matmul(block[:, self.pivots], self.rows, self.p), self.p)
        return block

    def contains(self, vecs: np.ndarray) -> np.ndarray:
        """Boolean per row: does the row lie in the span."""
        red = self.reduce(vecs)
        return ~np.any(red, axis=1)

    def add(self, block: np.ndarray) -> int:
        """Add rows; returns how much the rank grew."""
        block = np.asarray(block, dtype=np.int64)
        if block.size == 0:
            return 0
        block = self.reduce(block.reshape(-1, self.ncols))
        block = block[np.any(block, axis=1)]
        if block.shape[0] == 0 or self.rank == self.ncols:
            return 0
        new_rows, new_piv = _rref_dense(block, self.p)
        if not new_piv:
            return 0
        if self.pivots:
            self.rows = np.mod(self.rows - mod_matmul(self.rows[:, new_piv], new_rows, self.p), self.p)
        rows = np.vstack([self.rows, new_rows])
        piv = self.pivots + new_piv
        order = np.argsort(piv, kind="stable")
        self.rows = rows[order]
        self.pivots = [piv[i] for i in order]
        return len(new_piv)

    def kernel(self) -> np.ndarray:
        """Canonical basis of the right kernel of the accumulated rows."""
        return _kernel_from_rref(self.rows, self.pivots, self.ncols, self.p)


def _kernel_from_rref(rows, pivots, n, p) -> np.ndarray:
    free = [c for c in range(n) if c not in set(pivots)]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for t, f in enumerate(free):
        basis[t, f] = 1
        if pivots:
            basis[t, pivots] = np.mod(-rows[:, f], p)
    return basis


def rref(a, p: int) -> tuple[np.ndarray, list[int]]:
    a = as_mod(a, p)
    if a.ndim != 2:
        raise ValueError("rref expects a matrix")
    m, n = a.shape
    if m <= 2 * n + 64:
        return _rref_dense(a, p)
    space = RowSpace(n, p)
    step = max(n, 256)
    for start in range(0, m, step):
        space.add(a[start:start + step])
    return space.rows, list(space.pivots)


def rank(a, p: int) -> int:
    a = as_mod(a, p)
    if a.size == 0:
        return 0
    return len(rref(a, p)[1])


def kernel(a, p: int) -> np.ndarray:
    """Basis (as rows) of {x : a x = 0}."""
    a = as_mod(a, p)
    n = a.shape[1]
    if a.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    rows, piv = rref(a, p)
    return _kernel_from_rref(rows, piv, n, p)


def solve(a, b, p: int):
    """Return ``(x, kernel_basis)`` with a x = b, or None when inconsistent."""
    a = as_mod(a, p)
    b = as_mod(b, p).reshape(-1, 1)
    m, n = a.shape
    rows, piv = rref(np.hstack([a, b]), p)
    if piv and piv[-1] == n:
        return None
    x = np.zeros(n, dtype=np.int64)
    if piv:
        x[piv] = rows[:, n]
    return x, _kernel_from_rref(rows[:, :n], piv, n, p)


def row_space_equal(a, b, p: int) -> bool:
    ra, pa = rref(a, p) if np.size(a) else (np.zeros((0, 0)), [])
    rb, pb = rref(b, p) if np.size(b) else (np.zeros((0, 0)), [])
    return pa == pb and np.array_equal(ra, rb)


def complement_columns(rows: np.ndarray, pivots: list[int], n: int) -> list[int]:
    """Non-pivot columns: coordinates of a canonical quotient basis."""
    piv = set(pivots)
    return [c for c in range(n) if c not in piv]


class Quotient:
    """F_p^n modulo a row space; coordinates are the non-pivot columns."""

    def __init__(self, space: RowSpace):
        self.rows = space.rows
        self.pivots = list(space.pivots)
        self.n = space.ncols
        self.p = space.p
        self.free = complement_columns(self.rows, self.pivots, self.n)

    @property
    def dim(self) -> int:
        return len(self.free)

    def project(self, v) -> np.ndarray:
        v = np.mod(np.asarray(v, dtype=np.int64), self.p)
        if self.pivots:
            v = np.mod(v - mod_matmul(v[..., self.pivots].reshape(-1, len(self.pivots)), self.rows,
                                      self.p).reshape(v.shape), self.p)
        return v[..., self.free]

    def lift(self, c) -> np.ndarray:
        out = np.zeros(self.n, dtype=np.int64)
        out[self.free] = c
        return out


def inverse(a, p: int) -> np.ndarray:
    """Inverse of a square matrix over F_p; raises ValueError when singular."""
    a = as_mod(a, p)
    n = a.shape[0]
    rows, piv = rref(np.hstack([a, np.eye(n, dtype=np.int64)]), p)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return rows[:n, n:] % p
