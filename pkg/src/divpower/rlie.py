"""Restricted Lie algebras, their modules, and truncated p-envelopes.

The adjoint action follows the convention ad_l(l') = [l', l].  Vectors are
coefficient arrays of shape (dim, k).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BadCharacteristic, InvalidArgs, ShapeMismatch, TruncationTooSmall
from .field import FieldSpec
from .pbw import Straightener
from .reports import CheckReport
from .structure import SparseBilinear, as_table


class LieAlgebra:
    """Finite-dimensional Lie algebra from structure constants [e_i, e_j] = Σ c_ij^t e_t."""

    def __init__(self, field: FieldSpec, bracket, labels: Sequence[str] | None = None, name: str = ""):
        self.field = field
        b = np.asarray(bracket, dtype=np.int64)
        n = b.shape[0] if b.ndim >= 3 else 0
        self.dim = n
        self.bracket_table = as_table(field, b, n)
        self.labels = list(labels) if labels is not None else [f"e{i + 1}" for i in range(n)]
        if len(self.labels) != n:
            raise ShapeMismatch("one label per basis element")
        self.name = name
        self._bracket = SparseBilinear(field, self.bracket_table)

    @property
    def p(self) -> int:
        return self.field.p

    def zero(self) -> np.ndarray:
        return self.field.zeros(self.dim)

    def basis(self, i: int) -> np.ndarray:
        v = self.zero()
        v[i] = self.field.one()
        return v

    def vec(self, values) -> np.ndarray:
        arr = np.asarray(values, dtype=np.int64)
        if arr.shape == (self.dim,):
            return self.field.embed_prime(arr)
        if arr.shape != (self.dim, self.field.k):
            raise ShapeMismatch(f"expected a vector of length {self.dim}")
        return arr % self.p

    def bracket(self, a, b) -> np.ndarray:
        return self._bracket(a, b)

    def ad_matrix(self, v) -> np.ndarray:
        """(dim, dim, k) matrix of ad_v: x ↦ [x, v]."""
        cols = [self.bracket(self.basis(j), v) for j in range(self.dim)]
        return np.stack(cols, axis=1) if cols else np.zeros((0, 0, self.field.k), dtype=np.int64)

    def random(self, rng) -> np.ndarray:
        return self.field.random(rng, self.dim)

    def format(self, v) -> str:
        terms = []
        for i in range(self.dim):
            if np.any(v[i]):
                c = self.field.format_scalar(v[i])
                terms.append(self.labels[i] if np.array_equal(v[i] % self.p, self.field.one()) else f"{c}*{self.labels[i]}")
        return " + ".join(terms) if terms else "0"

    def check_lie_axioms(self, report: CheckReport) -> None:
        n = self.dim
        T = self.bracket_table
        report.record("alternating", not np.any(T[np.arange(n), np.arange(n)]), "[e,e] != 0")
        report.record("antisymmetric", np.array_equal(T, (-T.transpose(1, 0, 2, 3)) % self.p),
                      "[a,b] != -[b,a]")
        for i, j, l in itertools.product(range(n), repeat=3):
            if not (i < j < l):
                continue
            a, b, c = self.basis(i), self.basis(j), self.basis(l)
            jac = (self.bracket(self.bracket(a, b), c) + self.bracket(self.bracket(b, c), a)
                   + self.bracket(self.bracket(c, a), b)) % self.p
            report.record("jacobi", not np.any(jac), lambda: (self.labels[i], self.labels[j], self.labels[l]))
        if n < 3:
            report.ensure("jacobi")


class RestrictedLie(LieAlgebra):
    """Lie algebra with a p-map given on a basis and extended by Jacobson's formula."""

    def __init__(self, field: FieldSpec, bracket, pmap_on_basis, labels=None, name: str = ""):
        super().__init__(field, bracket, labels, name)
        pm = np.asarray(pmap_on_basis, dtype=np.int64)
        if pm.size == 0:
            pm = np.zeros((self.dim, self.dim, field.k), dtype=np.int64)
        if pm.shape == (self.dim, self.dim):
            pm = field.embed_prime(pm)
        if pm.shape != (self.dim, self.dim, field.k):
            raise ShapeMismatch("pmap_on_basis needs one vector per basis element")
        self.pmap_on_basis = pm % field.p

    def pmap(self, v, order: Sequence[int] | None = None) -> np.ndarray:
        return pmap_extend(self, v, order)

    def plain(self) -> LieAlgebra:
        return LieAlgebra(self.field, self.bracket_table, self.labels, self.name)


def s_i(L: LieAlgebra, l, l2, i: int) -> np.ndarray:
    """Coefficient of λ^{i-1} in ad^{p-1}_{λl+l'}(l), divided by i."""
    p = L.p
    if not 1 <= i <= p - 1:
        raise InvalidArgs("need 1 <= i <= p-1")
    return _s_all(L, l, l2)[i - 1]


def _s_all(L: LieAlgebra, l, l2) -> list[np.ndarray]:
    p = L.p
    X = [np.asarray(l, dtype=np.int64) % p]
    for _ in range(p - 1):
        nxt = []
        for d in range(len(X) + 1):
            term = L.zero()
            if d >= 1:
                term = term + L.bracket(X[d - 1], l)
            if d < len(X):
                term = term + L.bracket(X[d], l2)
            nxt.append(term % p)
        X = nxt
    out = []
    for i in range(1, p):
        coeff = X[i - 1] if i - 1 < len(X) else L.zero()
        out.append((pow(i, -1, p) * coeff) % p)
    return out


def jacobson_correction(L: LieAlgebra, l, l2) -> np.ndarray:
    """Σ_i s_i(l, l')."""
    out = L.zero()
    for s in _s_all(L, l, l2):
        out = (out + s) % L.p
    return out


def pmap_extend(L: RestrictedLie, v, order: Sequence[int] | None = None) -> np.ndarray:
    """v^{[p]} by peeling basis terms: (S + t)^{[p]} = S^{[p]} + t^{[p]} + Σ s_i(S, t)."""
    F = L.field
    v = np.asarray(v, dtype=np.int64) % L.p
    order = range(L.dim) if order is None else order
    acc = L.zero()
    out = L.zero()
    for i in order:
        if not np.any(v[i]):
            continue
        term = L.zero()
        term[i] = v[i]
        t_p = F.scale(F.frob(v[i], 1), L.pmap_on_basis[i])
        if np.any(acc):
            out = (out + t_p + jacobson_correction(L, acc, term)) % L.p
        else:
            out = t_p
        acc = (acc + term) % L.p
    return out


def _matpow(F: FieldSpec, m: np.ndarray, e: int) -> np.ndarray:
    out = F.identity(m.shape[0])
    for _ in range(e):
        out = F.matmul(out, m)
    return out


RLIE_CHECKS = ("alternating", "antisymmetric", "jacobi", "RLeq1", "RLeq2", "RLeq3", "order_independence")


def check_rlie(L: RestrictedLie, trials: int = 100, seed: int = 0) -> CheckReport:
    """Jacobi, (RLeq1) on random scalars, (RLeq2) as matrices, (RLeq3) on pairs."""
    F = L.field
    p = L.p
    rng = np.random.default_rng(seed)
    rep = CheckReport(L.name or "restricted Lie").ensure(*RLIE_CHECKS)
    L.check_lie_axioms(rep)
    n = L.dim
    samples = [L.basis(i) for i in range(n)] + [L.random(rng) for _ in range(trials)]
    for v in samples:
        lam = F.random_scalar(rng)
        lhs = pmap_extend(L, F.scale(lam, v))
        rhs = F.scale(F.frob(lam, 1), pmap_extend(L, v))
        rep.record("RLeq1", np.array_equal(lhs, rhs), lambda: L.format(v))
    for v in samples[:n + min(trials, 20)]:
        lhs = L.ad_matrix(pmap_extend(L, v))
        rhs = _matpow(F, L.ad_matrix(v), p)
        rep.record("RLeq2", np.array_equal(lhs, rhs), lambda: L.format(v))
    pairs = [(L.basis(i), L.basis(j)) for i in range(n) for j in range(n)]
    pairs += [(L.random(rng), L.random(rng)) for _ in range(trials)]
    for a, b in pairs:
        lhs = pmap_extend(L, a + b)
        rhs = (pmap_extend(L, a) + pmap_extend(L, b) + jacobson_correction(L, a, b)) % p
        rep.record("RLeq3", np.array_equal(lhs, rhs), lambda: (L.format(a), L.format(b)))
    for _ in range(min(trials, 50)):
        v = L.random(rng)
        perm = rng.permutation(n).tolist()
        rep.record("order_independence", np.array_equal(pmap_extend(L, v), pmap_extend(L, v, perm)),
                   lambda: (L.format(v), perm))
    return rep


# --- examples ------------------------------------------------------------------------

def _field(field) -> FieldSpec:
    return field if isinstance(field, FieldSpec) else FieldSpec(int(field))


def sl2(field) -> RestrictedLie:
    """sl_2 with basis (e, h, f): [e,f] = h, [h,e] = 2e, [h,f] = -2f."""
    F = _field(field)
    p = F.p
    if p == 2:
        raise BadCharacteristic("sl2 needs p >= 3")
    E, H, Fb = 0, 1, 2
    b = np.zeros((3, 3, 3), dtype=np.int64)
    b[E, Fb, H], b[Fb, E, H] = 1, -1
    b[H, E, E], b[E, H, E] = 2, -2
    b[H, Fb, Fb], b[Fb, H, Fb] = -2, 2
    pm = np.zeros((3, 3), dtype=np.int64)
    pm[H, H] = 1
    return RestrictedLie(F, b % p, pm, ["e", "h", "f"], name=f"sl2(F_{F.q})")


def heisenberg(field) -> RestrictedLie:
    """[x, y] = z central, zero p-map on the basis."""
    F = _field(field)
    b = np.zeros((3, 3, 3), dtype=np.int64)
    b[0, 1, 2], b[1, 0, 2] = 1, F.p - 1
    return RestrictedLie(F, b, np.zeros((3, 3), dtype=np.int64), ["x", "y", "z"],
                         name=f"heisenberg(F_{F.q})")


def abelian(dims: int, pvals, field) -> RestrictedLie:
    """Abelian Lie algebra; ``pvals`` is a (dims, dims) matrix of basis p-map values.

    The strings "zero" and "identity" are accepted as shorthands.
    """
    F = _field(field)
    if isinstance(pvals, str):
        if pvals not in ("zero", "identity"):
            raise InvalidArgs("pvals must be a matrix, 'zero' or 'identity'")
        pm = np.eye(dims, dtype=np.int64) if pvals == "identity" else np.zeros((dims, dims), dtype=np.int64)
    else:
        pm = np.asarray(pvals, dtype=np.int64)
    labels = ["e"] if dims == 1 else [f"e{i + 1}" for i in range(dims)]
    return RestrictedLie(F, np.zeros((dims, dims, dims), dtype=np.int64), pm, labels,
                         name=f"abelian({dims})")


# --- restricted modules ----------------------------------------------------------------

class RestrictedModule:
    """L-module M given by action matrices, with an optional p-semilinear f(m) = F·Frob(m)."""

    def __init__(self, L: LieAlgebra, dim: int, action, f=None, name: str = ""):
        F = L.field
        self.L = L
        self.field = F
        self.dim = int(dim)
        act = np.asarray(action, dtype=np.int64)
        if act.size == 0:
            act = np.zeros((L.dim, self.dim, self.dim, F.k), dtype=np.int64)
        if act.shape == (L.dim, self.dim, self.dim):
            act = F.embed_prime(act)
        if act.shape != (L.dim, self.dim, self.dim, F.k):
            raise ShapeMismatch("action needs one dim x dim matrix per basis element of L")
        self.action = act % F.p
        if f is None:
            self.f = None
        else:
            fm = np.asarray(f, dtype=np.int64)
            if fm.shape == (self.dim, self.dim):
                fm = F.embed_prime(fm)
            if fm.shape != (self.dim, self.dim, F.k):
                raise ShapeMismatch("f must be a dim x dim matrix")
            self.f = fm % F.p
        self.name = name

    def rho(self, l) -> np.ndarray:
        """Action matrix of a vector of L."""
        F = self.field
        l = np.asarray(l, dtype=np.int64)
        out = F.zeros((self.dim, self.dim))
        for i in np.flatnonzero(np.any(l, axis=1)):
            out = (out + F.scale(l[i], self.action[i])) % F.p
        return out

    def act(self, l, m) -> np.ndarray:
        return self.field.matmul(self.rho(l), m)

    def apply_f(self, m) -> np.ndarray:
        F = self.field
        if self.f is None:
            return F.zeros(self.dim)
        return F.matmul(self.f, F.frob(m, 1))

    def f_matrix(self) -> np.ndarray:
        return self.f if self.f is not None else self.field.zeros((self.dim, self.dim))

    def random(self, rng) -> np.ndarray:
        return self.field.random(rng, self.dim)


MODULE_CHECKS = ("module_law", "restricted", "semilinear", "invariant_image")


def check_restricted_module(L: RestrictedLie, M: RestrictedModule, trials: int = 50,
                            seed: int = 0) -> CheckReport:
    F = L.field
    p = L.p
    rng = np.random.default_rng(seed)
    rep = CheckReport(M.name or "restricted module").ensure(*MODULE_CHECKS)
    n = L.dim
    for i in range(n):
        for j in range(n):
            lhs = M.rho(L.bracket(L.basis(i), L.basis(j)))
            rhs = (F.matmul(M.action[i], M.action[j]) - F.matmul(M.action[j], M.action[i])) % p
            rep.record("module_law", np.array_equal(lhs, rhs), lambda: (L.labels[i], L.labels[j]))
    samples = [L.basis(i) for i in range(n)] + [L.random(rng) for _ in range(trials)]
    for v in samples:
        lhs = M.rho(pmap_extend(L, v))
        rhs = _matpow(F, M.rho(v), p)
        rep.record("restricted", np.array_equal(lhs, rhs), lambda: L.format(v))
    if M.f is not None:
        for _ in range(trials):
            m = M.random(rng)
            lam = F.random_scalar(rng)
            lhs = M.apply_f(F.scale(lam, m))
            rhs = F.scale(F.frob(lam, 1), M.apply_f(m))
            rep.record("semilinear", np.array_equal(lhs, rhs), lambda: m.tolist())
        for i in range(n):
            prod = F.matmul(M.action[i], M.f)
            rep.record("invariant_image", not np.any(prod), lambda: f"{L.labels[i]} moves f(M)")
    return rep


def trivial_module(L: LieAlgebra, dim: int = 1, f=None, name: str = "trivial") -> RestrictedModule:
    F = L.field
    return RestrictedModule(L, dim, F.zeros((L.dim, dim, dim)), f, name)


def adjoint_module(L: LieAlgebra, f=None) -> RestrictedModule:
    """M = L with l·m = [l, m]."""
    F = L.field
    act = np.stack([np.stack([L.bracket(L.basis(i), L.basis(j)) for j in range(L.dim)], axis=1)
                    for i in range(L.dim)]) if L.dim else F.zeros((0, 0, 0))
    return RestrictedModule(L, L.dim, act, f, "adjoint")


# --- p-envelopes ----------------------------------------------------------------------

@dataclass
class PEnvelopeResult:
    """L̂ with η: L → L̂ (matrix over F_p) and the U(L) monomial behind each basis vector."""

    hat: RestrictedLie
    eta: np.ndarray
    monomials: list
    N: int

    def apply_eta(self, v) -> np.ndarray:
        return np.einsum("ts,sc->tc", self.eta, np.asarray(v, dtype=np.int64)) % self.hat.p


def p_envelope(L: LieAlgebra, N: int, check_trials: int = 30) -> PEnvelopeResult:
    """Span of e_i^{p^n} (n <= N) inside U(L) with truncated p-map.

    The p-map of the top layer would be e_i^{p^{N+1}}, which is dropped; if the
    result then fails the restricted Lie axioms the truncation is too small.
    """
    if N < 0:
        raise InvalidArgs("N must be >= 0")
    F = L.field
    p = F.p
    n = L.dim
    U = Straightener(F, L.bracket_table)
    monos = []
    labels = []
    for layer in range(N + 1):
        for i in range(n):
            exps = [0] * n
            exps[i] = p**layer
            monos.append(tuple(exps))
            labels.append(L.labels[i] if layer == 0 else f"{L.labels[i]}^{p**layer}")
    index = {m: t for t, m in enumerate(monos)}
    dim = len(monos)
    codes = F.code_table
    table = np.zeros((dim, dim, dim, F.k), dtype=np.int64)
    for a in range(dim):
        wa = U.word_of(monos[a])
        for b in range(a + 1, dim):
            wb = U.word_of(monos[b])
            ab = U.product({wa: 1}, {wb: 1})
            ba = U.product({wb: 1}, {wa: 1})
            diff = dict(ab)
            for w, c in ba.items():
                v = U.ar.add(diff.get(w, 0), U.ar.neg(c))
                if v:
                    diff[w] = v
                else:
                    diff.pop(w, None)
            for w, c in diff.items():
                t = index.get(U.exps_of(w))
                if t is None:
                    raise TruncationTooSmall(f"[{labels[a]}, {labels[b]}] leaves the span of p-th powers")
                table[a, b, t] = codes[c]
                table[b, a, t] = (-codes[c]) % p
    pm = np.zeros((dim, dim), dtype=np.int64)
    for layer in range(N):
        for i in range(n):
            pm[layer * n + i, (layer + 1) * n + i] = 1
    hat = RestrictedLie(F, table, pm, labels, name=f"p-envelope(N={N})")
    rep = check_rlie(hat, trials=check_trials)
    if not rep.ok:
        raise TruncationTooSmall(f"truncated p-map violates {', '.join(rep.failed())}")
    eta = np.zeros((dim, n), dtype=np.int64)
    eta[np.arange(n), np.arange(n)] = 1
    return PEnvelopeResult(hat, eta, monos, N)


def is_lie_hom(src: LieAlgebra, dst: LieAlgebra, matrix) -> bool:
    """Does the F_p matrix (dst.dim x src.dim) preserve brackets on basis pairs?"""
    mat = np.asarray(matrix, dtype=np.int64)
    F = src.field

    def img(v):
        return np.einsum("ts,sc->tc", mat, v) % F.p

    for i in range(src.dim):
        for j in range(src.dim):
            lhs = img(src.bracket(src.basis(i), src.basis(j)))
            rhs = dst.bracket(img(src.basis(i)), img(src.basis(j)))
            if not np.array_equal(lhs, rhs):
                return False
    return True


def is_restricted_hom(src: RestrictedLie, dst: RestrictedLie, matrix) -> bool:
    mat = np.asarray(matrix, dtype=np.int64)
    if not is_lie_hom(src, dst, mat):
        return False
    for i in range(src.dim):
        img = np.einsum("ts,sc->tc", mat, src.basis(i)) % src.p
        lhs = np.einsum("ts,sc->tc", mat, pmap_extend(src, src.basis(i))) % src.p
        if not np.array_equal(lhs, pmap_extend(dst, img)):
            return False
    return True


def semidirect_lie_data(L: LieAlgebra, M_action, m_bracket_zero: bool = True) -> LieAlgebra:
    """Plain Lie algebra L ⋉ M for an L-module given by action matrices (dimL, m, m)."""
    F = L.field
    act = np.asarray(M_action, dtype=np.int64)
    if act.ndim == 3:
        act = F.embed_prime(act)
    nL, m = L.dim, act.shape[1]
    n = nL + m
    T = np.zeros((n, n, n, F.k), dtype=np.int64)
    T[:nL, :nL, :nL] = L.bracket_table
    for i in range(nL):
        for j in range(m):
            T[i, nL + j, nL:] = act[i, :, j]
            T[nL + j, i, nL:] = (-act[i, :, j]) % F.p
    labels = list(L.labels) + [f"m{j + 1}" for j in range(m)]
    return LieAlgebra(F, T, labels, name=f"{L.name} semidirect M")
