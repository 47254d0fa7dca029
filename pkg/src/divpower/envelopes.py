"""Finite-dimensional enveloping rings: u(L), truncated U(L), w(L) and V(A).

A ``FinRing`` stores structure constants on an F_q-basis.  Some rings carry a
Frobenius twist: basis element e_i commutes with scalars as e_i λ = λ^{p^t_i} e_i
(this is how fλ = λ^p f is encoded).  Module-level code works over prime
fields and uses ``FinRing.fp_table``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from . import linalg
from .errors import InvalidArgs, ShapeMismatch, TooLarge, UnsupportedField, UnsupportedSymbol
from .field import FieldSpec
from .pbw import Straightener
from .pdcom import PdComAlgebra
from .reports import CheckReport
from .rlie import LieAlgebra, RestrictedLie
from .structure import SparseBilinear, as_table

MAX_BASIS = 10_000
# structure constants are stored densely, so the cube of the basis size is the real limit
MAX_TABLE_ENTRIES = 50_000_000


class FinRing:
    """Unital associative algebra with a finite basis and optional Frobenius twist."""

    def __init__(self, field: FieldSpec, table, unit, labels: Sequence[str], twist=None,
                 kind: str = "", name: str = "", meta: dict | None = None):
        self.field = field
        n = len(labels)
        self.dim = n
        self.table = as_table(field, table, n)
        u = np.asarray(unit, dtype=np.int64)
        self.unit = field.embed_prime(u) if u.shape == (n,) else u % field.p
        self.labels = list(labels)
        self.twist = np.zeros(n, dtype=np.int64) if twist is None else np.asarray(twist, dtype=np.int64)
        self.kind = kind
        self.name = name
        self.meta = dict(meta or {})
        self._bil = SparseBilinear(field, self.table)
        self._twists = sorted(set(self.twist.tolist()))

    @property
    def p(self) -> int:
        return self.field.p

    def zero(self) -> np.ndarray:
        return self.field.zeros(self.dim)

    def one(self) -> np.ndarray:
        return self.unit.copy()

    def basis(self, i: int) -> np.ndarray:
        v = self.zero()
        v[i] = self.field.one()
        return v

    def mul(self, x, y) -> np.ndarray:
        F = self.field
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        if F.k == 1 or self._twists == [0]:
            return self._bil(x, y)
        out = self.zero()
        for t in self._twists:
            xm = x * (self.twist == t)[:, None]
            if np.any(xm):
                out = (out + self._bil(xm, F.frob(y, t))) % self.p
        return out

    def power(self, x, e: int) -> np.ndarray:
        out = self.one()
        for _ in range(e):
            out = self.mul(out, x)
        return out

    def random(self, rng) -> np.ndarray:
        return self.field.random(rng, self.dim)

    @property
    def fp_table(self) -> np.ndarray:
        """(n, n, n) structure constants over F_p."""
        if self.field.k != 1:
            raise UnsupportedField("module computations need a prime field")
        return self.table[..., 0]

    def left_matrix(self, x) -> np.ndarray:
        """F_p matrix of y ↦ x·y (prime fields)."""
        T = self.fp_table
        x = np.asarray(x, dtype=np.int64).reshape(self.dim, -1)[:, 0]
        return np.einsum("i,ijt->tj", x, T) % self.p

    def right_matrix(self, y) -> np.ndarray:
        T = self.fp_table
        y = np.asarray(y, dtype=np.int64).reshape(self.dim, -1)[:, 0]
        return np.einsum("j,ijt->ti", y, T) % self.p

    def format(self, v) -> str:
        F = self.field
        terms = []
        for i in range(self.dim):
            if np.any(v[i]):
                c = F.format_scalar(v[i])
                terms.append(self.labels[i] if np.array_equal(v[i] % self.p, self.field.one()) else f"{c}*{self.labels[i]}")
        return " + ".join(terms) if terms else "0"

    def check(self, samples: int = 500, seed: int = 0) -> CheckReport:
        """Associativity on basis triples (sampled above dim 27) and unit laws."""
        rng = np.random.default_rng(seed)
        rep = CheckReport(self.name or self.kind).ensure("associative", "unit")
        n = self.dim
        if n <= 27 and self.field.k == 1:
            T = self.table[..., 0]
            lhs = np.einsum("ijs,slt->ijlt", T, T) % self.p
            rhs = np.einsum("jls,ist->ijlt", T, T) % self.p
            bad = np.argwhere(np.any(lhs != rhs, axis=3))
            rep.passes["associative"] += n**3 - len(bad)
            for i, j, l in bad:
                rep.record("associative", False, f"({self.labels[i]})({self.labels[j]})({self.labels[l]})")
            triples = ()
        elif n <= 27:
            triples = itertools.product(range(n), repeat=3)
        else:
            triples = (tuple(int(t) for t in rng.integers(0, n, size=3)) for _ in range(samples))
        basis = [self.basis(i) for i in range(n)]
        left = {}
        for i, j, l in triples:
            if (i, j) not in left:
                left[(i, j)] = self.mul(basis[i], basis[j])
            lhs = self.mul(left[(i, j)], basis[l])
            rhs = self.mul(basis[i], self.mul(basis[j], basis[l]))
            rep.record("associative", np.array_equal(lhs, rhs),
                       lambda: f"({self.labels[i]})({self.labels[j]})({self.labels[l]})")
        for i in range(n):
            rep.record("unit", np.array_equal(self.mul(self.unit, basis[i]), basis[i])
                       and np.array_equal(self.mul(basis[i], self.unit), basis[i]), self.labels[i])
        if self.field.k > 1:
            rep.ensure("twist")
            for _ in range(min(samples, 100)):
                x, y, z = self.random(rng), self.random(rng), self.random(rng)
                good = np.array_equal(self.mul(self.mul(x, y), z), self.mul(x, self.mul(y, z)))
                rep.record("twist", good, "random triple")
        return rep


def _check_size(count: int, k: int = 1) -> None:
    if count > MAX_BASIS:
        raise TooLarge(f"basis of size {count} exceeds {MAX_BASIS}")
    if count**3 * k > MAX_TABLE_ENTRIES:
        raise TooLarge(f"a dense table for a basis of size {count} exceeds {MAX_TABLE_ENTRIES} entries")


def _mono_label(labels: Sequence[str], exps: Sequence[int]) -> str:
    parts = [lab if e == 1 else f"{lab}^{e}" for lab, e in zip(labels, exps) if e]
    return "*".join(parts) if parts else "1"


def _terms_to_vector(field: FieldSpec, terms: dict, index: dict, n: int, exps_of) -> np.ndarray:
    out = np.zeros(n, dtype=np.int64)
    for w, c in terms.items():
        t = index.get(exps_of(w))
        if t is not None:
            out[t] = c
    return field.from_codes(out)


# --- u(L) and U(L) -------------------------------------------------------------------

def u_of(L: RestrictedLie) -> FinRing:
    """Restricted enveloping algebra on the PBW basis with exponents < p."""
    F = L.field
    p = F.p
    n = L.dim
    _check_size(p**n, F.k)
    monos = list(itertools.product(range(p), repeat=n))
    monos.sort(key=lambda m: (sum(m), tuple(-x for x in m)))
    index = {m: i for i, m in enumerate(monos)}
    U = Straightener(F, L.bracket_table, L.pmap_on_basis)
    table = _pbw_table(F, U, monos, index)
    unit = np.zeros(len(monos), dtype=np.int64)
    unit[index[(0,) * n]] = 1
    return FinRing(F, table, unit, [_mono_label(L.labels, m) for m in monos], kind="u",
                   name=f"u({L.name or 'L'})", meta={"monomials": monos, "index": index, "lie": L,
                                                     "straightener": U})


def _pbw_table(F: FieldSpec, U: Straightener, monos, index) -> np.ndarray:
    n = len(monos)
    table = np.zeros((n, n, n, F.k), dtype=np.int64)
    words = [U.word_of(m) for m in monos]
    for a in range(n):
        for b in range(n):
            terms = U.product({words[a]: 1}, {words[b]: 1})
            table[a, b] = _terms_to_vector(F, terms, index, n, U.exps_of)
    return table


def U_of(L: LieAlgebra, D: int) -> FinRing:
    """U(L) on PBW monomials of degree <= D; products drop monomials above D.

    The truncation is not an ideal for non-abelian L, so the result need not be
    associative; ``meta['associative']`` records the outcome of the check.
    """
    F = L.field
    n = L.dim
    if D < 0:
        raise InvalidArgs("D must be >= 0")
    monos = [m for m in itertools.product(range(D + 1), repeat=n) if sum(m) <= D]
    _check_size(len(monos), F.k)
    monos.sort(key=lambda m: (sum(m), tuple(-x for x in m)))
    index = {m: i for i, m in enumerate(monos)}
    U = Straightener(F, L.bracket_table)
    table = _pbw_table(F, U, monos, index)
    unit = np.zeros(len(monos), dtype=np.int64)
    unit[index[(0,) * n]] = 1
    ring = FinRing(F, table, unit, [_mono_label(L.labels, m) for m in monos], kind="U",
                   name=f"U({L.name or 'L'})_{D}", meta={"monomials": monos, "index": index, "lie": L,
                                                          "D": D, "straightener": U,
                                                          "degrees": [sum(m) for m in monos]})
    ring.meta["associative"] = ring.check().ok
    return ring


def lie_embedding(ring: FinRing, v) -> np.ndarray:
    """Image of a Lie algebra vector among the degree-one monomials of u/U/w."""
    L = ring.meta["lie"]
    out = ring.zero()
    offset = ring.meta.get("u_offset", 0)
    index = ring.meta["index"]
    v = np.asarray(v, dtype=np.int64)
    for i in range(L.dim):
        if np.any(v[i]):
            exps = [0] * L.dim
            exps[i] = 1
            out[offset + index[tuple(exps)]] = v[i]
    return out


# --- w(L) and V(A) -------------------------------------------------------------------

def w_of(L: RestrictedLie, N: int) -> FinRing:
    """R_f ⊗ u(L) truncated at f-degree N; basis f^a ⊗ m at index a*dim u + m.

    (f^a⊗u)(f^b⊗v) is f^a⊗uv when b = 0; for b > 0 only the unit part of u
    survives.  Scalars pass f via the twist fλ = λ^p f.
    """
    if N < 0:
        raise InvalidArgs("N must be >= 0")
    u = u_of(L)
    F = L.field
    m = u.dim
    n = (N + 1) * m
    _check_size(n, F.k)
    unit_idx = int(np.flatnonzero(np.any(u.unit, axis=1))[0])
    table = np.zeros((n, n, n, F.k), dtype=np.int64)
    for a in range(N + 1):
        for b in range(N + 1):
            if b == 0:
                table[a * m:(a + 1) * m, 0:m, a * m:(a + 1) * m] = u.table
            elif a + b <= N:
                for v in range(m):
                    table[a * m + unit_idx, b * m + v, (a + b) * m + v] = F.one()
    labels = []
    for a in range(N + 1):
        fa = "" if a == 0 else ("f" if a == 1 else f"f^{a}")
        labels += [lab if not fa else (fa if lab == "1" else f"{fa}*{lab}") for lab in u.labels]
    unit = np.zeros((n, F.k), dtype=np.int64)
    unit[unit_idx] = F.one()
    twist = np.repeat(np.arange(N + 1), m)
    return FinRing(F, table, unit, labels, twist, kind="w", name=f"w({L.name or 'L'})_{N}",
                   meta={"u": u, "N": N, "lie": L, "index": u.meta["index"], "u_offset": 0,
                         "unit_index": unit_idx})


def v_of(A: PdComAlgebra, N: int) -> FinRing:
    """(F ⊕ A₊) ⊗ R_f truncated at f-degree N; basis a ⊗ f^k at index k*(dim A + 1) + a."""
    if N < 0:
        raise InvalidArgs("N must be >= 0")
    F = A.field
    m = A.dim + 1
    n = (N + 1) * m
    _check_size(n, F.k)
    aug = augmented_table(A)
    table = np.zeros((n, n, n, F.k), dtype=np.int64)
    for k in range(N + 1):
        for l in range(N + 1):
            if k == 0:
                table[0:m, l * m:(l + 1) * m, l * m:(l + 1) * m] = aug
            elif k + l <= N:
                for a in range(m):
                    table[k * m + a, l * m, (k + l) * m + a] = F.one()
    base = ["1"] + list(A.labels)
    labels = []
    for k in range(N + 1):
        fk = "" if k == 0 else ("f" if k == 1 else f"f^{k}")
        labels += [b if not fk else (fk if b == "1" else f"{b}*{fk}") for b in base]
    unit = np.zeros((n, F.k), dtype=np.int64)
    unit[0] = F.one()
    twist = np.repeat(np.arange(N + 1), m)
    return FinRing(F, table, unit, labels, twist, kind="V", name=f"V({A.name or 'A'})_{N}",
                   meta={"algebra": A, "N": N})


def augmented_table(A) -> np.ndarray:
    """(n+1)^3 table of F ⊕ A₊ with the unit at index 0."""
    F = A.field
    m = A.dim + 1
    aug = np.zeros((m, m, m, F.k), dtype=np.int64)
    aug[0, 0, 0] = F.one()
    for i in range(1, m):
        aug[0, i, i] = F.one()
        aug[i, 0, i] = F.one()
    aug[1:, 1:, 1:] = A.mult
    return aug


def augmented_ring(A) -> FinRing:
    """F ⊕ A₊ as a FinRing; index 0 is the unit."""
    F = A.field
    unit = np.zeros(A.dim + 1, dtype=np.int64)
    unit[0] = 1
    return FinRing(F, augmented_table(A), unit, ["1"] + list(A.labels), kind="aug",
                   name=f"F+{A.name or 'A'}", meta={"algebra": A})


def f_power(ring: FinRing, a: int = 1) -> np.ndarray:
    """The element f^a of w or V (zero past the truncation)."""
    N = ring.meta["N"]
    out = ring.zero()
    if a > N:
        return out
    if ring.kind == "w":
        out[a * ring.meta["u"].dim + ring.meta["unit_index"]] = ring.field.one()
    elif ring.kind == "V":
        out[a * (ring.meta["algebra"].dim + 1)] = ring.field.one()
    else:
        raise InvalidArgs("f lives in w or V rings")
    return out


def algebra_embedding(ring: FinRing, v) -> np.ndarray:
    """a ↦ a ⊗ f^0 for a ∈ A₊ (V rings and augmented rings)."""
    out = ring.zero()
    v = np.asarray(v, dtype=np.int64)
    out[1:1 + v.shape[0]] = v
    return out


# --- ring maps ----------------------------------------------------------------------

@dataclass
class RingMap:
    """F_p-linear map between FinRings, stored as a (target dim, source dim) matrix."""

    source: FinRing
    target: FinRing
    matrix: np.ndarray
    name: str = ""
    degree_bound: int | None = dc_field(default=None)

    def __call__(self, x) -> np.ndarray:
        F = self.target.field
        x = np.asarray(x, dtype=np.int64)
        return np.einsum("ts,sc->tc", self.matrix, x) % F.p

    def check_multiplicative(self) -> CheckReport:
        """Unit and products of basis pairs (pairs above the degree bound are skipped)."""
        S, T = self.source, self.target
        rep = CheckReport(self.name or "ring map").ensure("unital", "multiplicative")
        rep.record("unital", np.array_equal(self(S.unit), T.unit), "unit not preserved")
        degs = S.meta.get("degrees")
        for i in range(S.dim):
            for j in range(S.dim):
                if self.degree_bound is not None and degs is not None and degs[i] + degs[j] > self.degree_bound:
                    continue
                lhs = self(S.mul(S.basis(i), S.basis(j)))
                rhs = T.mul(self(S.basis(i)), self(S.basis(j)))
                rep.record("multiplicative", np.array_equal(lhs, rhs), lambda: (S.labels[i], S.labels[j]))
        return rep


def theta_lie(L: RestrictedLie, D: int, N: int) -> RingMap:
    """U(L)_D → w(L)_N: straighten a PBW monomial in u(L), place it in f-degree 0."""
    if L.field.k != 1:
        _require_prime(L.field)
    src = U_of(L.plain(), D)
    tgt = w_of(L, N)
    u = tgt.meta["u"]
    S = u.meta["straightener"]
    mat = np.zeros((tgt.dim, src.dim), dtype=np.int64)
    for s, mono in enumerate(src.meta["monomials"]):
        terms = S.normal_form(S.word_of(mono))
        v = _terms_to_vector(L.field, terms, u.meta["index"], u.dim, S.exps_of)
        mat[:u.dim, s] = v[:, 0]
    return RingMap(src, tgt, mat, name="theta: U(L) -> w(L)", degree_bound=D)


def _require_prime(field: FieldSpec):
    raise UnsupportedField("ring maps are stored over F_p; use a prime field")


def theta_com(A: PdComAlgebra, N: int) -> RingMap:
    """F ⊕ A₊ → V(A)_N, a ↦ a ⊗ 1."""
    if A.field.k != 1:
        _require_prime(A.field)
    src = augmented_ring(A)
    tgt = v_of(A, N)
    mat = np.zeros((tgt.dim, src.dim), dtype=np.int64)
    mat[np.arange(src.dim), np.arange(src.dim)] = 1
    return RingMap(src, tgt, mat, name="theta: A -> V(A)")


def w_map(g, L_src: RestrictedLie, L_tgt: RestrictedLie, N: int,
          src: FinRing | None = None, tgt: FinRing | None = None) -> RingMap:
    """w(g): f^a ⊗ e^α ↦ f^a ⊗ Π g(e_i)^{α_i} for a restricted map g (F_p matrix)."""
    src = src or w_of(L_src, N)
    tgt = tgt or w_of(L_tgt, N)
    g = np.asarray(g, dtype=np.int64)
    F = L_tgt.field
    u_src = src.meta["u"]
    m_src, m_tgt = u_src.dim, tgt.meta["u"].dim
    gens = [lie_embedding(tgt, np.einsum("ts,sc->tc", g, L_src.basis(i)) % F.p) for i in range(L_src.dim)]
    images = []
    for mono in u_src.meta["monomials"]:
        x = tgt.one()
        for i, e in enumerate(mono):
            for _ in range(e):
                x = tgt.mul(x, gens[i])
        images.append(x[:m_tgt, 0])
    mat = np.zeros((tgt.dim, src.dim), dtype=np.int64)
    for a in range(N + 1):
        for s, img in enumerate(images):
            mat[a * m_tgt:(a + 1) * m_tgt, a * m_src + s] = img
    return RingMap(src, tgt, mat % F.p, name="w(g)")


def v_map(g, A_src: PdComAlgebra, A_tgt: PdComAlgebra, N: int,
          src: FinRing | None = None, tgt: FinRing | None = None) -> RingMap:
    """V(g): b ⊗ f^k ↦ g(b) ⊗ f^k."""
    src = src or v_of(A_src, N)
    tgt = tgt or v_of(A_tgt, N)
    g = np.asarray(g, dtype=np.int64)
    ms, mt = A_src.dim + 1, A_tgt.dim + 1
    block = np.zeros((mt, ms), dtype=np.int64)
    block[0, 0] = 1
    block[1:, 1:] = g
    mat = np.zeros((tgt.dim, src.dim), dtype=np.int64)
    for k in range(N + 1):
        mat[k * mt:(k + 1) * mt, k * ms:(k + 1) * ms] = block
    return RingMap(src, tgt, mat % A_tgt.p, name="V(g)")


def augmented_map(g, A_src, A_tgt) -> RingMap:
    src, tgt = augmented_ring(A_src), augmented_ring(A_tgt)
    mat = np.zeros((tgt.dim, src.dim), dtype=np.int64)
    mat[0, 0] = 1
    mat[1:, 1:] = np.asarray(g, dtype=np.int64)
    return RingMap(src, tgt, mat % A_tgt.p, name="F+g")


# --- operadic symbols ------------------------------------------------------------------

@dataclass(frozen=True)
class Symbol:
    """β_{x,r}(args, −): operation name, composition r, fixed arguments."""

    operation: str
    composition: tuple
    args: tuple = ()


def operadic_symbol_to_ring(symbol: Symbol, ring: FinRing) -> np.ndarray:
    """Translate a generating symbol into V(A) (Com) or w(L) (Lie).

    Supported: the unit (r = (1)), multiplication or bracket with one fixed
    argument (r = (1,1)), and the p-th power operation (r = (p)).
    """
    op, r = symbol.operation, tuple(symbol.composition)
    p = ring.p
    if op == "unit" and r == (1,):
        return ring.one()
    if ring.kind == "V":
        if op == "mul" and r == (1, 1) and len(symbol.args) == 1:
            return algebra_embedding(ring, symbol.args[0])
        if op == "power" and r == (p,):
            return f_power(ring, 1)
    elif ring.kind == "w":
        if op == "bracket" and r == (1, 1) and len(symbol.args) == 1:
            return lie_embedding(ring, symbol.args[0])
        if op == "power" and r == (p,):
            return f_power(ring, 1)
    else:
        raise InvalidArgs("symbols translate into V or w rings")
    raise UnsupportedSymbol(f"{op} with composition {r} is not a generating symbol for {ring.kind}")


# --- modules --------------------------------------------------------------------------

class RingModule:
    """Left module over a FinRing (prime field): one d×d matrix per ring basis element."""

    def __init__(self, ring: FinRing, dim: int, act, name: str = ""):
        self.ring = ring
        self.dim = int(dim)
        a = np.asarray(act, dtype=np.int64) % ring.p
        if a.size == 0:
            a = np.zeros((ring.dim, self.dim, self.dim), dtype=np.int64)
        if a.shape != (ring.dim, self.dim, self.dim):
            raise ShapeMismatch("need one action matrix per ring basis element")
        self.act = a
        self.name = name

    @property
    def p(self) -> int:
        return self.ring.p

    def action(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64).reshape(self.ring.dim, -1)[:, 0]
        return np.einsum("t,tij->ij", x, self.act) % self.p

    def check(self, report: CheckReport | None = None) -> CheckReport:
        rep = report or CheckReport(self.name or "module")
        rep.ensure("unit_acts", "module_law")
        R = self.ring
        p = self.p
        eye = np.eye(self.dim, dtype=np.int64)
        rep.record("unit_acts", np.array_equal(self.action(R.unit), eye), "unit")
        T = R.fp_table
        for s in range(R.dim):
            for t in range(R.dim):
                lhs = linalg.mod_matmul(self.act[s], self.act[t], p)
                rhs = np.einsum("u,uij->ij", T[s, t], self.act) % p
                rep.record("module_law", np.array_equal(lhs, rhs), lambda: (R.labels[s], R.labels[t]))
        return rep


class Bimodule:
    """R-bimodule over a prime field: left and right action matrices per basis element."""

    def __init__(self, ring: FinRing, dim: int, left, right, name: str = ""):
        self.ring = ring
        self.dim = int(dim)
        self.left = np.asarray(left, dtype=np.int64) % ring.p
        self.right = np.asarray(right, dtype=np.int64) % ring.p
        if self.left.size == 0:
            self.left = np.zeros((ring.dim, self.dim, self.dim), dtype=np.int64)
            self.right = self.left.copy()
        self.name = name

    def commutator_module(self) -> np.ndarray:
        """Action matrices of x·m = xm − mx per ring basis element."""
        return (self.left - self.right) % self.ring.p


def regular_module(R: FinRing) -> RingModule:
    T = R.fp_table
    act = np.transpose(T, (0, 2, 1))  # act[s][t, j] = coefficient of e_t in e_s e_j
    return RingModule(R, R.dim, act, name="regular")


def regular_bimodule(R: FinRing) -> Bimodule:
    T = R.fp_table
    left = np.transpose(T, (0, 2, 1))
    right = np.transpose(T, (1, 2, 0))  # right[s][t, j] = coefficient of e_t in e_j e_s
    return Bimodule(R, R.dim, left, right, name="regular")


def augmentation(R: FinRing) -> np.ndarray:
    """Augmentation on basis elements of u(L) or U(L): the unit monomial ↦ 1."""
    eps = np.zeros(R.dim, dtype=np.int64)
    eps[np.flatnonzero(np.any(R.unit, axis=1))] = 1
    return eps


def trivial_bimodule(R: FinRing, dim: int = 1) -> Bimodule:
    eps = augmentation(R)
    acts = np.einsum("s,ij->sij", eps, np.eye(dim, dtype=np.int64))
    return Bimodule(R, dim, acts, acts.copy(), name="trivial")
