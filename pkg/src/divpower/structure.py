"""Sparse evaluation of bilinear structure constants over F_q."""

from __future__ import annotations

import numpy as np

from .errors import ShapeMismatch
from .field import FieldSpec


def as_table(field: FieldSpec, table, n: int, m: int | None = None, out: int | None = None) -> np.ndarray:
    """Normalize an (n, m, out[, k]) integer table to coefficient form."""
    m = n if m is None else m
    out = n if out is None else out
    t = np.asarray(table, dtype=np.int64)
    if t.size == 0:
        return np.zeros((n, m, out, field.k), dtype=np.int64)
    if t.shape == (n, m, out):
        t = field.embed_prime(t)
    if t.shape != (n, m, out, field.k):
        raise ShapeMismatch(f"table must have shape ({n},{m},{out}[,k]), got {t.shape}")
    return t % field.p


class SparseBilinear:
    """(a, b) -> Σ a_i b_j T[i, j, :] using only the nonzero entries of T."""

    def __init__(self, field: FieldSpec, table: np.ndarray):
        self.field = field
        self.table = table
        self.out_dim = table.shape[2]
        idx = np.nonzero(np.any(table, axis=-1))
        self.i, self.j, self.t = idx
        self.c = table[idx]

    def __call__(self, a, b) -> np.ndarray:
        F = self.field
        p = F.p
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.t.size == 0:
            return F.zeros(self.out_dim)
        if F.k == 1:
            w = a[self.i, 0] * b[self.j, 0] % p * self.c[:, 0]
            out = np.bincount(self.t, weights=w, minlength=self.out_dim)
            return (out.astype(np.int64) % p).reshape(self.out_dim, 1)
        w = F.mul(F.mul(a[self.i], b[self.j]), self.c)
        out = np.zeros((self.out_dim, F.k), dtype=np.int64)
        np.add.at(out, self.t, w)
        return out % p
