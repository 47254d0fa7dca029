"""Kähler differentials, derivation spaces and the comparison maps.

Everything here is linear algebra over a prime field F_p.  An unknown linear
map D: X → M (dim d × n) is vectorized as index r*n + c for the entry D[r, c].
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from . import linalg
from .beckmod import BeckModuleCom, Pushforward, com_to_ring, lie_to_ring, pushforward
from .envelopes import (Bimodule, FinRing, RingMap, RingModule, U_of, algebra_embedding, augmented_ring,
                        f_power, lie_embedding, theta_lie, v_map, v_of, w_map, w_of)
from .errors import InvalidArgs, TruncationMismatch, UnsupportedField, WellDefinednessFailure
from .field import factorial_mod
from .pdcom import PdComAlgebra, pi_extend
from .reports import CheckReport
from .rlie import LieAlgebra, RestrictedLie, RestrictedModule, pmap_extend


def _prime(field) -> None:
    if field.k != 1:
        raise UnsupportedField("derivation and Kähler computations need a prime field")


def wilson_sign(p: int) -> int:
    """(p−1)! mod p, which is p−1 (Wilson); asserted against a direct product."""
    value = factorial_mod(p - 1, p)
    assert value == p - 1, "Wilson's theorem failed"
    return value


# --- presented modules ----------------------------------------------------------------

@dataclass
class PresentedModule:
    """ring^g / (ring-span of the relations); relations have shape (r, g, ring.dim)."""

    ring: FinRing
    generators: list
    relations: np.ndarray
    _quotient: linalg.Quotient | None = dc_field(default=None, repr=False)

    @property
    def ngens(self) -> int:
        return len(self.generators)

    def _submodule(self) -> linalg.RowSpace:
        R = self.ring
        n, g = R.dim, self.ngens
        T = R.fp_table
        space = linalg.RowSpace(g * n, R.p)
        for rel in _relation_stack(self.relations, g, n):
            # rows b·rel for every basis element b: (b·c)_t = Σ_j c_j T[b, j, t]
            block = np.einsum("ij,bjt->bit", rel, T) % R.p
            space.add(block.reshape(n, g * n))
        return space

    @property
    def quotient(self) -> linalg.Quotient:
        if self._quotient is None:
            self._quotient = linalg.Quotient(self._submodule())
        return self._quotient

    @property
    def dim(self) -> int:
        """F_p-dimension of the module at the ring's truncation."""
        return self.quotient.dim

    def contains(self, vecs) -> np.ndarray:
        sub = self._submodule()
        return sub.contains(np.asarray(vecs, dtype=np.int64).reshape(-1, self.ngens * self.ring.dim))

    def to_ring_module(self) -> RingModule:
        R = self.ring
        n = R.dim
        T = R.fp_table
        q = self.quotient
        act = np.zeros((n, q.dim, q.dim), dtype=np.int64)
        for c, col in enumerate(q.free):
            i, t = divmod(col, n)
            vecs = np.zeros((n, self.ngens, n), dtype=np.int64)
            vecs[:, i, :] = T[:, t, :]
            act[:, :, c] = q.project(vecs.reshape(n, -1))
        return RingModule(R, q.dim, act, name="Omega")

    def generator_vector(self, i: int) -> np.ndarray:
        v = np.zeros((self.ngens, self.ring.dim), dtype=np.int64)
        v[i] = self.ring.unit[:, 0]
        return v.reshape(-1)


class _Relations:
    """Accumulates relations Σ_i c_i · dx_i with ring coefficients."""

    def __init__(self, ring: FinRing, ngens: int):
        self.ring = ring
        self.ngens = ngens
        self.rows: list[np.ndarray] = []

    def new(self) -> np.ndarray:
        return np.zeros((self.ngens, self.ring.dim), dtype=np.int64)

    def add(self, rel: np.ndarray) -> None:
        self.rows.append(rel % self.ring.p)

    def array(self) -> np.ndarray:
        if not self.rows:
            return np.zeros((0, self.ngens, self.ring.dim), dtype=np.int64)
        return np.stack(self.rows)


def _ring_vec(ring: FinRing, x) -> np.ndarray:
    return np.asarray(x, dtype=np.int64)[:, 0] % ring.p


def _relation_stack(relations, ngens: int, n: int) -> np.ndarray:
    rels = np.asarray(relations, dtype=np.int64)
    if ngens == 0:
        return np.zeros((0, 0, n), dtype=np.int64)
    return rels.reshape(-1, ngens, n)


def _apply(mat, v, p):
    return np.einsum("ts,sc->tc", np.asarray(mat, dtype=np.int64), v) % p


def kahler_com(g, B: PdComAlgebra, A: PdComAlgebra, N: int = 2, plain: bool = False,
               ring: FinRing | None = None) -> PresentedModule:
    """V(A) ⊗_{V(B)} Ω(B): generators db, relations d(bb') − g(b)db' − g(b')db and
    d(π(b)) − f·db + g(b)^{p−1}·db.  With ``plain`` the ring is F ⊕ A₊ and the
    π-relation is omitted.
    """
    _prime(A.field)
    p = A.p
    if not plain and N < 1:
        raise InvalidArgs("the p-relation needs f, so N >= 1")
    ring = ring or (augmented_ring(A) if plain else v_of(A, N))
    g = np.asarray(g, dtype=np.int64).reshape(A.dim, B.dim)
    rel = _Relations(ring, B.dim)
    gb = [_apply(g, B.basis(j), p) for j in range(B.dim)]
    for i in range(B.dim):
        for j in range(i, B.dim):
            r = rel.new()
            prod = B.mul(B.basis(i), B.basis(j))[:, 0]
            r[:, 0] += prod
            r[j] -= _ring_vec(ring, algebra_embedding(ring, gb[i]))
            r[i] -= _ring_vec(ring, algebra_embedding(ring, gb[j]))
            rel.add(r)
    if not plain:
        f = _ring_vec(ring, f_power(ring, 1))
        for j in range(B.dim):
            r = rel.new()
            r[:, 0] += pi_extend(B, B.basis(j))[:, 0]
            r[j] -= f
            gp = A.power(gb[j], p - 1)
            r[j] += _ring_vec(ring, algebra_embedding(ring, gp))
            rel.add(r)
    return PresentedModule(ring, [f"d{lab}" for lab in B.labels], rel.array())


def omega_com(A: PdComAlgebra, N: int = 2) -> PresentedModule:
    return kahler_com(np.eye(A.dim, dtype=np.int64), A, A, N)


def kahler_lie(g, Lsrc: LieAlgebra, L: LieAlgebra, N: int = 2, plain: bool = False,
               ring: FinRing | None = None, D: int = 3) -> PresentedModule:
    """w(L) ⊗_{w(L')} Ω(L'): generators dl, relations d[l,l'] − g(l)dl' + g(l')dl and
    d(l^{[p]}) − f·dl − g(l)^{p−1}·dl.  With ``plain`` the ring is U(L)_D and
    only the bracket relations are used.
    """
    _prime(L.field)
    p = L.p
    if not plain and N < 1:
        raise InvalidArgs("the p-relation needs f, so N >= 1")
    ring = ring or (U_of(L if not isinstance(L, RestrictedLie) else L.plain(), D) if plain else w_of(L, N))
    g = np.asarray(g, dtype=np.int64).reshape(L.dim, Lsrc.dim)
    rel = _Relations(ring, Lsrc.dim)
    one = _ring_vec(ring, ring.unit)
    gl = [_apply(g, Lsrc.basis(j), p) for j in range(Lsrc.dim)]
    emb = [lie_embedding(ring, v) for v in gl]
    for i in range(Lsrc.dim):
        for j in range(i + 1, Lsrc.dim):
            r = rel.new()
            br = Lsrc.bracket(Lsrc.basis(i), Lsrc.basis(j))[:, 0]
            r += np.outer(br, one)
            r[j] -= _ring_vec(ring, emb[i])
            r[i] += _ring_vec(ring, emb[j])
            rel.add(r)
    if not plain:
        f = _ring_vec(ring, f_power(ring, 1))
        for j in range(Lsrc.dim):
            r = rel.new()
            r += np.outer(pmap_extend(Lsrc, Lsrc.basis(j))[:, 0], one)
            r[j] -= f
            r[j] -= _ring_vec(ring, ring.power(emb[j], p - 1))
            rel.add(r)
    return PresentedModule(ring, [f"d{lab}" for lab in Lsrc.labels], rel.array())


def omega_rlie(L: RestrictedLie, N: int = 2) -> PresentedModule:
    return kahler_lie(np.eye(L.dim, dtype=np.int64), L, L, N)


def relation_stability(X, N: int = 2, modules: Sequence = (), trials: int = 20, seed: int = 0) -> CheckReport:
    """Guard for presenting Ω by basis relations only.

    The Leibniz and p-relations on random elements must already lie in the
    span of the basis relations, and Hom(Ω, M) must not change between f-truncation
    N and N+1 for each module in ``modules``.
    """
    is_lie = isinstance(X, RestrictedLie)
    om = omega_rlie(X, N) if is_lie else omega_com(X, N)
    R = om.ring
    p = R.p
    one = _ring_vec(R, R.unit)
    f = _ring_vec(R, f_power(R, 1))
    rng = np.random.default_rng(seed)
    rep = CheckReport(f"relation stability for {X.name or 'X'}").ensure("random_leibniz", "random_p_relation",
                                                                        "truncation")

    def emb(v):
        return _ring_vec(R, lie_embedding(R, v) if is_lie else algebra_embedding(R, v))

    def times_d(x, v):
        # x·dv = Σ_j v_j x·dx_j
        return np.outer(np.asarray(v)[:, 0], x)

    sub = om._submodule()
    for _ in range(trials):
        a, b = X.random(rng), X.random(rng)
        if is_lie:
            r = np.outer(X.bracket(a, b)[:, 0], one) - times_d(emb(a), b) + times_d(emb(b), a)
            q = (np.outer(pmap_extend(X, a)[:, 0], one) - times_d(f, a)
                 - times_d(_ring_vec(R, R.power(lie_embedding(R, a), p - 1)), a))
        else:
            r = np.outer(X.mul(a, b)[:, 0], one) - times_d(emb(a), b) - times_d(emb(b), a)
            q = (np.outer(pi_extend(X, a)[:, 0], one) - times_d(f, a)
                 + times_d(emb(X.power(a, p - 1)), a))
        rep.record("random_leibniz", sub.contains((r % p).reshape(1, -1))[0], lambda: X.format(a))
        rep.record("random_p_relation", sub.contains((q % p).reshape(1, -1))[0], lambda: X.format(a))
    to_ring = lie_to_ring if is_lie else com_to_ring
    nxt = omega_rlie(X, N + 1) if is_lie else omega_com(X, N + 1)
    for M in modules:
        here = hom_module(om, to_ring(M, N, om.ring)).dim
        there = hom_module(nxt, to_ring(M, N + 1, nxt.ring)).dim
        rep.record("truncation", here == there, f"{getattr(M, 'name', 'module')}: {here} vs {there}")
    return rep



# --- Hom and derivation spaces ---------------------------------------------------------

@dataclass
class DerivationSpace:
    """Basis of derivations as F_p matrices (dim M × dim source)."""

    basis: list
    dim: int
    system: np.ndarray | None = dc_field(default=None, repr=False)

    def vectors(self) -> np.ndarray:
        if not self.basis:
            return np.zeros((0, 0), dtype=np.int64)
        return np.stack([b.reshape(-1) for b in self.basis])


def _same_ring(a: FinRing, b: FinRing) -> bool:
    if a is b:
        return True
    return (a.kind == b.kind and a.dim == b.dim and a.meta.get("N") == b.meta.get("N")
            and np.array_equal(a.table, b.table))


def hom_module(omega: PresentedModule, M: RingModule) -> DerivationSpace:
    """Module maps Ω → M, as generator images (d × #generators) killing every relation."""
    if not _same_ring(omega.ring, M.ring):
        raise TruncationMismatch("Ω and M live over different rings or truncations")
    p = M.p
    d, g = M.dim, omega.ngens
    if g == 0:
        return DerivationSpace([], 0)
    rels = np.asarray(omega.relations, dtype=np.int64).reshape(-1, g, omega.ring.dim)
    space = linalg.RowSpace(d * g, p)
    for rel in rels:
        # Σ_i act(c_i) m_i = 0; unknown m_i[r] at index r*g + i
        coef = np.einsum("it,tsr->sri", rel, M.act) % p
        space.add(coef.reshape(d, d * g))
    ker = space.kernel()
    return DerivationSpace([k.reshape(d, g) for k in ker], len(ker))


def hom_ring_modules(X: RingModule, M: RingModule) -> DerivationSpace:
    """Module maps φ: X → M, i.e. φ·act_X(s) = act_M(s)·φ for every basis s."""
    if not _same_ring(X.ring, M.ring):
        raise TruncationMismatch("modules live over different rings")
    p = M.p
    d, e = M.dim, X.dim
    space = linalg.RowSpace(d * e, p)
    eye_d, eye_e = np.eye(d, dtype=np.int64), np.eye(e, dtype=np.int64)
    for s in range(X.ring.dim):
        # vec(φ A) − vec(B φ) with row-major vec: (I ⊗ A^T) − (B ⊗ I)
        block = np.kron(eye_d, X.act[s].T) - np.kron(M.act[s], eye_e)
        space.add(block % p)
    ker = space.kernel()
    return DerivationSpace([k.reshape(d, e) for k in ker], len(ker))


class _System:
    """Linear equations on an unknown d × n matrix D."""

    def __init__(self, d: int, n: int, p: int):
        self.d, self.n, self.p = d, n, p
        self.space = linalg.RowSpace(d * n, p)
        self.blocks: list[np.ndarray] = []

    def equation(self, terms: Sequence[tuple]) -> None:
        """Σ op @ D[:, c] = 0 for (op, c) in terms; op is d×d or a scalar."""
        block = np.zeros((self.d, self.d, self.n), dtype=np.int64)
        for op, c in terms:
            op = np.asarray(op, dtype=np.int64)
            block[:, :, c] += op if op.ndim == 2 else op * np.eye(self.d, dtype=np.int64)
        rows = block.reshape(self.d, self.d * self.n) % self.p
        self.blocks.append(rows)
        self.space.add(rows)

    def image(self, v) -> list:
        """Terms for D @ v."""
        v = np.asarray(v, dtype=np.int64).reshape(-1) % self.p
        return [(int(v[c]), c) for c in np.flatnonzero(v)]

    def solve(self) -> DerivationSpace:
        ker = self.space.kernel()
        system = np.vstack(self.blocks) if self.blocks else np.zeros((0, self.d * self.n), dtype=np.int64)
        return DerivationSpace([k.reshape(self.d, self.n) for k in ker], len(ker), system)


def _neg(op, p):
    return (-np.asarray(op, dtype=np.int64)) % p


def derivations_com(g, B: PdComAlgebra, M: BeckModuleCom) -> DerivationSpace:
    """d: B₊ → M with d(bb') = g(b)·db' + g(b')·db and d(π b) = π_M(db) − g(b)^{p−1}·db."""
    A = M.A
    _prime(A.field)
    p = A.p
    d, n = M.dim, B.dim
    g = np.asarray(g, dtype=np.int64).reshape(A.dim, B.dim)
    sys_ = _System(d, n, p)
    gb = [_apply(g, B.basis(j), p) for j in range(n)]
    rho = [M.rho(v)[..., 0] for v in gb]
    for i in range(n):
        for j in range(i, n):
            terms = sys_.image(B.mul(B.basis(i), B.basis(j))[:, 0])
            terms += [(_neg(rho[i], p), j), (_neg(rho[j], p), i)]
            sys_.equation(terms)
    for j in range(n):
        terms = sys_.image(pi_extend(B, B.basis(j))[:, 0])
        terms.append((_neg(M.pi[..., 0], p), j))
        terms.append((M.rho(A.power(gb[j], p - 1))[..., 0], j))
        sys_.equation(terms)
    return sys_.solve()


def derivations_rlie(g, Lsrc: RestrictedLie, M: RestrictedModule) -> DerivationSpace:
    """d: L' → M with d[l,l'] = g(l)·dl' − g(l')·dl and d(l^{[p]}) = g(l)^{p−1}·dl + f(dl)."""
    L = M.L
    _prime(L.field)
    p = L.p
    d, n = M.dim, Lsrc.dim
    g = np.asarray(g, dtype=np.int64).reshape(L.dim, Lsrc.dim)
    sys_ = _System(d, n, p)
    rho = [M.rho(_apply(g, Lsrc.basis(j), p))[..., 0] for j in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            terms = sys_.image(Lsrc.bracket(Lsrc.basis(i), Lsrc.basis(j))[:, 0])
            terms += [(_neg(rho[i], p), j), (rho[j], i)]
            sys_.equation(terms)
    fm = M.f_matrix()[..., 0]
    for j in range(n):
        terms = sys_.image(pmap_extend(Lsrc, Lsrc.basis(j))[:, 0])
        terms.append((_neg(_matpow(rho[j], p - 1, p), p), j))
        terms.append((_neg(fm, p), j))
        sys_.equation(terms)
    return sys_.solve()


def _matpow(m, e, p):
    out = np.eye(m.shape[0], dtype=np.int64)
    for _ in range(e):
        out = linalg.mod_matmul(out, m, p)
    return out


def derivations_assoc(R: FinRing, M: Bimodule) -> DerivationSpace:
    """d: R → M with d(ab) = a·d(b) + d(a)·b on all basis pairs."""
    T = R.fp_table
    p = R.p
    n, d = R.dim, M.dim
    space = linalg.RowSpace(d * n, p)
    eye = np.eye(d, dtype=np.int64)
    ar = np.arange(n)
    for i in range(n):
        # block[j, s, r, c] = T[i,j,c] δ_sr − L_i[s,r] δ_cj − R_j[s,r] δ_ci
        block = np.einsum("jc,sr->jsrc", T[i], eye)
        block[ar, :, :, ar] -= M.left[i][None]
        block[:, :, :, i] -= M.right
        space.add(block.reshape(n * d, d * n) % p)
    ker = space.kernel()
    return DerivationSpace([k.reshape(d, n) for k in ker], len(ker))


def adjoint_restricted_module(L: RestrictedLie, M: Bimodule) -> RestrictedModule:
    """{}_{u(L)}M: l·m = lm − ml, with f = 0."""
    u = M.ring
    comm = M.commutator_module()
    action = np.stack([np.einsum("t,tij->ij", lie_embedding(u, L.basis(i))[:, 0], comm) % L.p
                       for i in range(L.dim)])
    return RestrictedModule(L, M.dim, action, None, name=f"ad({M.name})")


def restriction_to_lie(space: DerivationSpace, u: FinRing) -> np.ndarray:
    """Columns of each derivation at the degree-one monomials, flattened (basis × d·dimL)."""
    L = u.meta["lie"]
    idx = [int(np.flatnonzero(lie_embedding(u, L.basis(i))[:, 0])[0]) for i in range(L.dim)]
    if not space.basis:
        return np.zeros((0, 0), dtype=np.int64)
    return np.stack([b[:, idx].reshape(-1) for b in space.basis])


def satisfies(space_system: np.ndarray, vectors: np.ndarray, p: int) -> bool:
    """Does every vector solve the homogeneous system?"""
    if vectors.size == 0:
        return True
    return not np.any(linalg.mod_matmul(space_system, vectors.T, p))


# --- comparison maps -------------------------------------------------------------------

@dataclass
class Comparison:
    """Generator map db ↦ f^0 db between two presentations with checked containment."""

    source: PresentedModule
    target: PresentedModule
    ring_map: RingMap
    checked: int
    matrix: np.ndarray  # on materialized quotients, (dim target, dim source)


def _map_relation(rel: np.ndarray, phi: RingMap) -> np.ndarray:
    return np.einsum("ts,is->it", phi.matrix, rel) % phi.target.p


def comparison(source: PresentedModule, target: PresentedModule, phi: RingMap,
               degree_bound: int | None = None) -> Comparison:
    """Check that every ring multiple s·r of a source relation maps into the target relations.

    Multiples are formed in the source ring; with ``degree_bound`` only basis
    elements s whose degree keeps s·r inside the truncation are used.
    """
    if source.ngens != target.ngens:
        raise InvalidArgs("generator sets differ")
    S = source.ring
    T = S.fp_table
    p = S.p
    sub = target._submodule()
    degs = S.meta.get("degrees")
    checked = 0
    for k, rel in enumerate(_relation_stack(source.relations, source.ngens, S.dim)):
        for s in range(S.dim):
            if degree_bound is not None and degs is not None and degs[s] + 1 > degree_bound:
                continue
            mult = np.einsum("ij,jt->it", rel, T[s]) % p
            img = _map_relation(mult, phi)
            if not sub.contains(img.reshape(1, -1))[0]:
                raise WellDefinednessFailure("a source relation leaves the target relations",
                                             {"relation": k, "multiplier": S.labels[s]})
            checked += 1
    qs, qt = source.quotient, target.quotient
    mat = np.zeros((qt.dim, qs.dim), dtype=np.int64)
    for c, col in enumerate(qs.free):
        i, t = divmod(col, S.dim)
        v = np.zeros((source.ngens, S.dim), dtype=np.int64)
        v[i, t] = 1
        mat[:, c] = qt.project(_map_relation(v, phi).reshape(-1))
    return Comparison(source, target, phi, checked, mat)


def comparison_omega_com(g, B: PdComAlgebra, A: PdComAlgebra, N: int = 2) -> Comparison:
    """(F⊕A₊) ⊗ Ω¹(B) → V(A) ⊗ Ω(B), a db ↦ a f^0 db."""
    src_ring = augmented_ring(A)
    tgt_ring = v_of(A, N)
    phi = RingMap(src_ring, tgt_ring, np.eye(tgt_ring.dim, src_ring.dim, dtype=np.int64), name="theta")
    src = kahler_com(g, B, A, N, plain=True, ring=src_ring)
    tgt = kahler_com(g, B, A, N, ring=tgt_ring)
    return comparison(src, tgt, phi)


def comparison_omega_lie(g, Lsrc: RestrictedLie, L: RestrictedLie, N: int = 2, D: int = 3) -> Comparison:
    """U(L) ⊗ Ω¹(L') → w(L) ⊗ Ω(L'), l dh ↦ f^0 l dh."""
    theta = theta_lie(L, D, N)
    src = kahler_lie(g, Lsrc, L, plain=True, ring=theta.source)
    tgt = kahler_lie(g, Lsrc, L, N, ring=theta.target)
    return comparison(src, tgt, theta, degree_bound=D)


def naturality_com(h, X: PdComAlgebra, Y: PdComAlgebra, N: int = 2) -> bool:
    """Generator chase for h: X → Y: comparison_Y ∘ Ω¹(h) = Ω(h) ∘ comparison_X.

    Both base-change maps dx ↦ d(h x) are first checked to be well defined.
    """
    h = np.asarray(h, dtype=np.int64).reshape(Y.dim, X.dim)
    cx = comparison_omega_com(np.eye(X.dim, dtype=np.int64), X, X, N)
    cy = comparison_omega_com(np.eye(Y.dim, dtype=np.int64), Y, Y, N)
    plain_map = _base_change(cx.source, cy.source, h, _aug_ring_map(h, cx.source.ring, cy.source.ring))
    pd_map = _base_change(cx.target, cy.target, h, v_map(h, X, Y, N, cx.target.ring, cy.target.ring))
    left = linalg.mod_matmul(cy.matrix, plain_map, Y.p)
    right = linalg.mod_matmul(pd_map, cx.matrix, Y.p)
    return np.array_equal(left, right)


def naturality_lie(h, X: RestrictedLie, Y: RestrictedLie, N: int = 2, D: int = 3) -> bool:
    """Same chase for a restricted map h: X → Y."""
    h = np.asarray(h, dtype=np.int64).reshape(Y.dim, X.dim)
    cx = comparison_omega_lie(np.eye(X.dim, dtype=np.int64), X, X, N, D)
    cy = comparison_omega_lie(np.eye(Y.dim, dtype=np.int64), Y, Y, N, D)
    plain_map = _base_change(cx.source, cy.source, h, _u_ring_map(h, X, Y, cx.source.ring, cy.source.ring),
                             degree_bound=D)
    pd_map = _base_change(cx.target, cy.target, h, w_map(h, X, Y, N, cx.target.ring, cy.target.ring))
    left = linalg.mod_matmul(cy.matrix, plain_map, Y.p)
    right = linalg.mod_matmul(pd_map, cx.matrix, Y.p)
    return np.array_equal(left, right)


def _aug_ring_map(h, src: FinRing, tgt: FinRing) -> RingMap:
    mat = np.zeros((tgt.dim, src.dim), dtype=np.int64)
    mat[0, 0] = 1
    mat[1:, 1:] = h
    return RingMap(src, tgt, mat % src.p)


def _u_ring_map(h, X, Y, src: FinRing, tgt: FinRing) -> RingMap:
    """U(h) on monomials: product of images of generators, truncated."""
    gens = [lie_embedding(tgt, np.einsum("ts,sc->tc", h, X.basis(i)) % X.p) for i in range(X.dim)]
    mat = np.zeros((tgt.dim, src.dim), dtype=np.int64)
    for s, mono in enumerate(src.meta["monomials"]):
        x = tgt.one()
        for i, e in enumerate(mono):
            for _ in range(e):
                x = tgt.mul(x, gens[i])
        mat[:, s] = x[:, 0]
    return RingMap(src, tgt, mat % X.p)


def _base_change(src: PresentedModule, tgt: PresentedModule, h, phi: RingMap,
                 degree_bound: int | None = None) -> np.ndarray:
    """Matrix of c·dx ↦ φ(c)·d(h x) on materialized quotients, after checking relations."""
    p = src.ring.p
    S = src.ring
    n_s = S.dim

    def image(v):
        v = v.reshape(src.ngens, n_s)
        coeff = np.einsum("ts,is->it", phi.matrix, v) % p  # (gens_x, n_t)
        return np.einsum("yi,it->yt", h, coeff) % p  # generator x ↦ Σ h[y,x] dy

    sub = tgt._submodule()
    T = S.fp_table
    degs = S.meta.get("degrees")
    for k, rel in enumerate(_relation_stack(src.relations, src.ngens, n_s)):
        for s in range(n_s):
            if degree_bound is not None and degs is not None and degs[s] + 1 > degree_bound:
                continue
            mult = np.einsum("ij,jt->it", rel, T[s]) % p
            if not sub.contains(image(mult).reshape(1, -1))[0]:
                raise WellDefinednessFailure("base change does not respect relations",
                                             {"relation": k, "multiplier": S.labels[s]})
    qs, qt = src.quotient, tgt.quotient
    mat = np.zeros((qt.dim, qs.dim), dtype=np.int64)
    for c, col in enumerate(qs.free):
        v = np.zeros(src.ngens * n_s, dtype=np.int64)
        v[col] = 1
        mat[:, c] = qt.project(image(v).reshape(-1))
    return mat


# --- abelianization ------------------------------------------------------------------

@dataclass
class Abelianization:
    """V(A) ⊗_{V(B)} Ω(B) with the universal derivation b ↦ [1 ⊗ db]."""

    pushed: Pushforward
    derivation: np.ndarray  # (dim module, dim B)

    @property
    def module(self) -> RingModule:
        return self.pushed.module


def abelianization_com(g, B: PdComAlgebra, A: PdComAlgebra, N: int = 2) -> Abelianization:
    omega_b = omega_com(B, N)
    X = omega_b.to_ring_module()
    phi = v_map(g, B, A, N, omega_b.ring)
    push = pushforward(phi, X)
    q = omega_b.quotient
    univ = np.stack([q.project(omega_b.generator_vector(j)) for j in range(B.dim)], axis=1) \
        if B.dim else np.zeros((X.dim, 0), dtype=np.int64)
    return Abelianization(push, linalg.mod_matmul(push.unit_map, univ, A.p) if B.dim else
                          np.zeros((push.module.dim, 0), dtype=np.int64))


def abelianization_lie(g, Lsrc: RestrictedLie, L: RestrictedLie, N: int = 2) -> Abelianization:
    omega_b = omega_rlie(Lsrc, N)
    X = omega_b.to_ring_module()
    phi = w_map(g, Lsrc, L, N, omega_b.ring)
    push = pushforward(phi, X)
    q = omega_b.quotient
    univ = np.stack([q.project(omega_b.generator_vector(j)) for j in range(Lsrc.dim)], axis=1)
    return Abelianization(push, linalg.mod_matmul(push.unit_map, univ, L.p))
