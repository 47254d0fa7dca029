"""Beck modules over divided power algebras and restricted Lie algebras.

Concrete forms: (M, π_M) over A with A₊ acting and π_M p-semilinear, and
(M, f) over L with f p-semilinear into M^L.  The ring forms are modules over
V(A) and w(L); conversions, base change and semidirect products live here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .envelopes import (FinRing, RingMap, RingModule, augmented_ring, f_power, lie_embedding,
                        u_of, v_of, w_of)
from .errors import (AxiomViolation, InvalidArgs, NotSplit, NotSquareZero, ShapeMismatch,
                     TruncationMismatch, UnsupportedField)
from .field import FieldSpec
from .pdcom import PdComAlgebra, check_pdcom, gamma_from_pi, pi_extend
from .reports import CheckReport
from .rlie import RestrictedLie, RestrictedModule, check_restricted_module, check_rlie, pmap_extend


# --- Com flavor ----------------------------------------------------------------------

class BeckModuleCom:
    """A₊ acts by ``action`` (dimA, d, d[, k]); π_M(m) = Pi · Frob(m)."""

    def __init__(self, A: PdComAlgebra, dim: int, action, pi, name: str = ""):
        F = A.field
        self.A = A
        self.field = F
        self.dim = int(dim)
        act = np.asarray(action, dtype=np.int64)
        if act.size == 0:
            act = np.zeros((A.dim, self.dim, self.dim, F.k), dtype=np.int64)
        if act.shape == (A.dim, self.dim, self.dim):
            act = F.embed_prime(act)
        if act.shape != (A.dim, self.dim, self.dim, F.k):
            raise ShapeMismatch("action needs one dim x dim matrix per basis element of A")
        self.action = act % F.p
        pm = np.asarray(pi, dtype=np.int64)
        if pm.size == 0:
            pm = np.zeros((self.dim, self.dim, F.k), dtype=np.int64)
        if pm.shape == (self.dim, self.dim):
            pm = F.embed_prime(pm)
        if pm.shape != (self.dim, self.dim, F.k):
            raise ShapeMismatch("pi must be a dim x dim matrix")
        self.pi = pm % F.p
        self.name = name

    def rho(self, a) -> np.ndarray:
        F = self.field
        out = F.zeros((self.dim, self.dim))
        a = np.asarray(a, dtype=np.int64)
        for i in np.flatnonzero(np.any(a, axis=1)):
            out = (out + F.scale(a[i], self.action[i])) % F.p
        return out

    def act(self, a, m) -> np.ndarray:
        return self.field.matmul(self.rho(a), m)

    def apply_pi(self, m) -> np.ndarray:
        F = self.field
        return F.matmul(self.pi, F.frob(m, 1))

    def random(self, rng) -> np.ndarray:
        return self.field.random(rng, self.dim)

    def same_data(self, other: "BeckModuleCom") -> bool:
        return (self.dim == other.dim and np.array_equal(self.action, other.action)
                and np.array_equal(self.pi, other.pi))


BECK_COM_CHECKS = ("module_law", "pi_kills_action", "semilinear")


def check_beck_com(M: BeckModuleCom, trials: int = 30, seed: int = 0) -> CheckReport:
    A, F = M.A, M.field
    rng = np.random.default_rng(seed)
    rep = CheckReport(M.name or "Beck module").ensure(*BECK_COM_CHECKS)
    for i in range(A.dim):
        for j in range(A.dim):
            lhs = M.rho(A.mul(A.basis(i), A.basis(j)))
            rhs = F.matmul(M.action[i], M.action[j])
            rep.record("module_law", np.array_equal(lhs, rhs), lambda: (A.labels[i], A.labels[j]))
        for j in range(M.dim):
            m = F.zeros(M.dim)
            m[j] = F.one()
            rep.record("pi_kills_action", not np.any(M.apply_pi(M.act(A.basis(i), m))),
                       lambda: (A.labels[i], j))
    for _ in range(trials):
        m = M.random(rng)
        lam = F.random_scalar(rng)
        rep.record("semilinear", np.array_equal(M.apply_pi(F.scale(lam, m)),
                                                F.scale(F.frob(lam, 1), M.apply_pi(m))), lambda: m.tolist())
    return rep


@dataclass
class Semidirect:
    """B = X ⋉ M with projection pr: B → X and zero-section z: X → B (F_p matrices)."""

    algebra: object
    base: object
    pr: np.ndarray
    z: np.ndarray
    report: CheckReport | None = None


def semidirect_com(A: PdComAlgebra, M: BeckModuleCom, check: bool = True, trials: int = 30) -> Semidirect:
    """A ⊕ M with (a,m)(a',m') = (aa', am' + a'm) and π(a,m) = (π(a), π_M(m) − a^{p−1}m).

    π is stored on the basis; its extension to sums follows from the sum rule
    and is compared with the closed formula in the tests.
    """
    F = A.field
    n, d = A.dim, M.dim
    N = n + d
    mult = np.zeros((N, N, N, F.k), dtype=np.int64)
    mult[:n, :n, :n] = A.mult
    for i in range(n):
        for j in range(d):
            col = M.action[i][:, j]
            mult[i, n + j, n:] = col
            mult[n + j, i, n:] = col
    pi = np.zeros((N, N, F.k), dtype=np.int64)
    pi[:n, :n] = A.pi_on_basis
    for j in range(d):
        pi[n + j, n:] = M.pi[:, j]
    labels = list(A.labels) + [f"m{j + 1}" for j in range(d)]
    B = PdComAlgebra(F, mult, pi, labels, name=f"{A.name or 'A'} semidirect {M.name or 'M'}")
    pr = np.zeros((n, N), dtype=np.int64)
    pr[:, :n] = np.eye(n, dtype=np.int64)
    rep = check_pdcom(B, trials=trials) if check else None
    if rep is not None and not rep.ok:
        raise AxiomViolation(f"semidirect product fails {', '.join(rep.failed())}", rep)
    return Semidirect(B, A, pr, pr.T.copy(), rep)


def semidirect_pi_formula(A: PdComAlgebra, M: BeckModuleCom, a, m) -> tuple:
    """(π(a), π_M(m) − a^{p−1}·m) computed directly."""
    F = A.field
    p = A.p
    first = pi_extend(A, a)
    if p == 2:
        apow_m = M.act(a, m)
    else:
        apow_m = M.act(A.power(a, p - 1), m)
    return first, (M.apply_pi(m) - apow_m) % F.p


def one_slot_consistency(M: BeckModuleCom, max_arity: int = 4, trials: int = 20, seed: int = 0) -> CheckReport:
    """Diagnostic: divided powers of A⋉M with one module input come from the module data.

    γ_n(a + m) in the semidirect product must equal γ_n(a) + Σ_k γ_{n−k}(a)·γ_k(m),
    where γ_k(m) is π_M^j(m) for k = p^j and zero otherwise (M² = 0).  The
    checkers for Beck modules only test the action and π_M; this compares them
    with the operations of arity up to ``max_arity`` that the generic definition
    constrains.  It never blocks a run.
    """
    A, F = M.A, M.field
    p = F.p
    n = A.dim
    B = semidirect_com(A, M, check=False).algebra
    rng = np.random.default_rng(seed)
    rep = CheckReport("one-slot operations").ensure("one_slot")
    for _ in range(trials):
        a, m = A.random(rng), M.random(rng)
        gm = {1: m}
        k, cur = p, m
        while k <= max_arity:
            cur = M.apply_pi(cur)
            gm[k] = cur
            k *= p
        for arity in range(1, max_arity + 1):
            lhs = gamma_from_pi(B, arity, np.concatenate([a, m]))
            first = A.gamma(arity, a)
            second = F.zeros(M.dim)
            for k, mk in gm.items():
                if k > arity:
                    continue
                second = (second + (mk if k == arity else M.act(A.gamma(arity - k, a), mk))) % p
            good = np.array_equal(lhs, np.concatenate([first, second]))
            rep.record("one_slot", good, lambda: (arity, A.format(a)))
    return rep


def _kernel(pr: np.ndarray, dim: int, p: int) -> np.ndarray:
    if pr.shape[0] == 0:
        return np.eye(dim, dtype=np.int64)
    return linalg.kernel(pr, p)


def _check_split(pr, z, p: int) -> None:
    prz = linalg.mod_matmul(np.asarray(pr, dtype=np.int64), np.asarray(z, dtype=np.int64), p)
    if prz.size and not np.array_equal(prz, np.eye(prz.shape[0], dtype=np.int64)):
        raise NotSplit("pr ∘ z is not the identity", prz.tolist())


def _coords(K: np.ndarray, v_flat: np.ndarray, p: int) -> np.ndarray:
    """Coordinates of v in the row basis K (K in canonical echelon form)."""
    sol = linalg.solve(K.T, v_flat, p)
    if sol is None:
        raise InvalidArgs("vector outside the kernel")
    return sol[0]


def _apply(mat, v, p):
    return np.einsum("ts,sc->tc", np.asarray(mat, dtype=np.int64), v) % p


def kernel_module_com(B: PdComAlgebra, A: PdComAlgebra, pr, z, validate: bool = True) -> BeckModuleCom:
    """Read off the Beck module ker(pr) with a·m = z(a)·m and π_M = π restricted."""
    F = B.field
    p = F.p
    pr = np.asarray(pr, dtype=np.int64).reshape(A.dim, B.dim)
    z = np.asarray(z, dtype=np.int64).reshape(B.dim, A.dim)
    _check_split(pr, z, p)
    K = _kernel(pr, B.dim, p)
    d = K.shape[0]
    kvecs = [F.embed_prime(K[t]) for t in range(d)]
    for s in range(d):
        for t in range(s, d):
            prod = B.mul(kvecs[s], kvecs[t])
            if np.any(prod):
                raise NotSquareZero("ker(pr) is not square-zero",
                                    f"{B.format(kvecs[s])} * {B.format(kvecs[t])} = {B.format(prod)}")

    def to_k(v):
        # F_q coordinates: solve each F_p component separately
        return np.stack([_coords(K, v[:, c], p) for c in range(F.k)], axis=1)

    action = np.zeros((A.dim, d, d, F.k), dtype=np.int64)
    for i in range(A.dim):
        za = _apply(z, A.basis(i), p)
        for t in range(d):
            action[i, :, t] = to_k(B.mul(za, kvecs[t]))
    pi = np.zeros((d, d, F.k), dtype=np.int64)
    for t in range(d):
        pi[:, t] = to_k(pi_extend(B, kvecs[t]))
    M = BeckModuleCom(A, d, action, pi, name="kernel")
    if validate:
        rep = check_beck_com(M)
        if not rep.ok:
            raise AxiomViolation(f"kernel module fails {', '.join(rep.failed())}", rep)
    return M


def kernel_module_lie(B: RestrictedLie, L: RestrictedLie, pr, z, validate: bool = True) -> RestrictedModule:
    """ker(pr) as a Beck module: l·m = [z(l), m], f(m) = m^{[p]}."""
    F = B.field
    p = F.p
    pr = np.asarray(pr, dtype=np.int64).reshape(L.dim, B.dim)
    z = np.asarray(z, dtype=np.int64).reshape(B.dim, L.dim)
    _check_split(pr, z, p)
    K = _kernel(pr, B.dim, p)
    d = K.shape[0]
    kvecs = [F.embed_prime(K[t]) for t in range(d)]
    for s in range(d):
        for t in range(s + 1, d):
            br = B.bracket(kvecs[s], kvecs[t])
            if np.any(br):
                raise NotSquareZero("ker(pr) is not abelian",
                                    f"[{B.format(kvecs[s])}, {B.format(kvecs[t])}] = {B.format(br)}")

    def to_k(v):
        return np.stack([_coords(K, v[:, c], p) for c in range(F.k)], axis=1)

    action = np.zeros((L.dim, d, d, F.k), dtype=np.int64)
    for i in range(L.dim):
        zl = _apply(z, L.basis(i), p)
        for t in range(d):
            action[i, :, t] = to_k(B.bracket(zl, kvecs[t]))
    fm = np.zeros((d, d, F.k), dtype=np.int64)
    for t in range(d):
        fm[:, t] = to_k(pmap_extend(B, kvecs[t]))
    M = RestrictedModule(L, d, action, fm, name="kernel")
    if validate:
        rep = check_restricted_module(L, M)
        if not rep.ok:
            raise AxiomViolation(f"kernel module fails {', '.join(rep.failed())}", rep)
    return M


def kernel_module(B, base, pr, z, validate: bool = True):
    """Dispatch on flavor: divided power algebras or restricted Lie algebras."""
    if isinstance(B, RestrictedLie):
        return kernel_module_lie(B, base, pr, z, validate)
    return kernel_module_com(B, base, pr, z, validate)


def semidirect_lie(L: RestrictedLie, M: RestrictedModule, check: bool = True, trials: int = 30) -> Semidirect:
    """L ⊕ M with [(h,m),(h',m')] = ([h,h'], hm' − h'm) and the Beck p-map."""
    F = L.field
    n, d = L.dim, M.dim
    N = n + d
    T = np.zeros((N, N, N, F.k), dtype=np.int64)
    T[:n, :n, :n] = L.bracket_table
    for i in range(n):
        for j in range(d):
            col = M.action[i][:, j]
            T[i, n + j, n:] = col
            T[n + j, i, n:] = (-col) % F.p
    pm = np.zeros((N, N, F.k), dtype=np.int64)
    pm[:n, :n] = L.pmap_on_basis
    fmat = M.f_matrix()
    for j in range(d):
        pm[n + j, n:] = fmat[:, j]
    labels = list(L.labels) + [f"m{j + 1}" for j in range(d)]
    B = RestrictedLie(F, T, pm, labels, name=f"{L.name or 'L'} semidirect {M.name or 'M'}")
    pr = np.zeros((n, N), dtype=np.int64)
    pr[:, :n] = np.eye(n, dtype=np.int64)
    rep = check_rlie(B, trials=trials) if check else None
    if rep is not None and not rep.ok:
        raise AxiomViolation(f"semidirect product fails {', '.join(rep.failed())}", rep)
    return Semidirect(B, L, pr, pr.T.copy(), rep)


def semidirect_pmap_formula(L: RestrictedLie, M: RestrictedModule, h, m) -> tuple:
    """(h^{[p]}, h^{p−1}·m + f(m)) computed directly."""
    F = L.field
    out = np.asarray(m, dtype=np.int64) % F.p
    for _ in range(L.p - 1):
        out = M.act(h, out)
    return pmap_extend(L, h), (out + M.apply_f(m)) % F.p


def same_restricted_module(M1: RestrictedModule, M2: RestrictedModule) -> bool:
    return (M1.dim == M2.dim and np.array_equal(M1.action, M2.action)
            and np.array_equal(M1.f_matrix(), M2.f_matrix()))


# --- ring forms --------------------------------------------------------------------------

def _prime(field: FieldSpec) -> None:
    if field.k != 1:
        raise UnsupportedField("ring-module conversions need a prime field")


def _matpow(m: np.ndarray, e: int, p: int) -> np.ndarray:
    out = np.eye(m.shape[0], dtype=np.int64)
    for _ in range(e):
        out = linalg.mod_matmul(out, m, p)
    return out


def lie_to_ring(M: RestrictedModule, N: int, ring: FinRing | None = None) -> RingModule:
    """(M, f) ↦ w(L)_N-module with f^a ⊗ u acting as f^a ∘ ρ(u).

    When f^{N+1} ≠ 0 the result is not a module over the truncated ring, yet
    the action of f-degree <= N elements is still the right one; ``check``
    on the result tells the two situations apart.
    """
    L = M.L
    _prime(L.field)
    p = L.p
    ring = ring or w_of(L, N)
    u = ring.meta["u"]
    d = M.dim
    gens = [M.action[i][..., 0] for i in range(L.dim)]
    fmat = M.f_matrix()[..., 0]
    act = np.zeros((ring.dim, d, d), dtype=np.int64)
    mono_mats = []
    for mono in u.meta["monomials"]:
        mat = np.eye(d, dtype=np.int64)
        for i, e in enumerate(mono):
            for _ in range(e):
                mat = linalg.mod_matmul(mat, gens[i], p)
        mono_mats.append(mat)
    for a in range(N + 1):
        fa = _matpow(fmat, a, p)
        for s, mat in enumerate(mono_mats):
            act[a * u.dim + s] = linalg.mod_matmul(fa, mat, p)
    return RingModule(ring, d, act, name=M.name)


def ring_to_lie(R: RingModule) -> RestrictedModule:
    ring = R.ring
    if ring.kind != "w":
        raise InvalidArgs("expected a module over w(L)")
    L = ring.meta["lie"]
    action = np.stack([R.action(lie_embedding(ring, L.basis(i))) for i in range(L.dim)]) \
        if L.dim else np.zeros((0, R.dim, R.dim), dtype=np.int64)
    f = R.action(f_power(ring, 1)) if ring.meta["N"] >= 1 else None
    return RestrictedModule(L, R.dim, action, f, name=R.name)


def com_to_ring(M: BeckModuleCom, N: int, ring: FinRing | None = None) -> RingModule:
    """(M, π_M) ↦ V(A)_N-module with a ⊗ f^k acting as ρ(a) ∘ π_M^k."""
    A = M.A
    _prime(A.field)
    p = A.p
    ring = ring or v_of(A, N)
    d = M.dim
    m = A.dim + 1
    base = [np.eye(d, dtype=np.int64)] + [M.action[i][..., 0] for i in range(A.dim)]
    pim = M.pi[..., 0]
    act = np.zeros((ring.dim, d, d), dtype=np.int64)
    for k in range(N + 1):
        pk = _matpow(pim, k, p)
        for a in range(m):
            act[k * m + a] = linalg.mod_matmul(base[a], pk, p)
    return RingModule(ring, d, act, name=M.name)


def ring_to_com(R: RingModule) -> BeckModuleCom:
    ring = R.ring
    if ring.kind != "V":
        raise InvalidArgs("expected a module over V(A)")
    A = ring.meta["algebra"]
    action = R.act[1:A.dim + 1]
    pi = R.action(f_power(ring, 1)) if ring.meta["N"] >= 1 else None
    return BeckModuleCom(A, R.dim, action, pi if pi is not None else [], name=R.name)


# --- base change -----------------------------------------------------------------------

def pullback(g: RingMap, M: RingModule) -> RingModule:
    """Restriction of scalars along g: source → M.ring."""
    if g.target.dim != M.ring.dim or g.target.kind != M.ring.kind:
        raise TruncationMismatch("module does not live over the target of the ring map")
    act = np.einsum("ts,tij->sij", g.matrix, M.act) % M.p
    return RingModule(g.source, M.dim, act, name=f"pullback({M.name})")


@dataclass
class Pushforward:
    """g_!(M) = target ⊗_source M as a quotient of target ⊗ M."""

    module: RingModule
    quotient: linalg.Quotient
    unit_map: np.ndarray  # (dim g_!M, dim M): m ↦ [1 ⊗ m]

    def project(self, v) -> np.ndarray:
        return self.quotient.project(v)


def pushforward(g: RingMap, M: RingModule) -> Pushforward:
    """Extension of scalars along g, computed by linear algebra in target ⊗ M.

    Coordinates of target ⊗ M: index r*d + j for basis r of the target ring
    and j of M.  Relations: r·g(s) ⊗ m − r ⊗ s·m.
    """
    if g.source.dim != M.ring.dim or g.source.kind != M.ring.kind:
        raise TruncationMismatch("module does not live over the source of the ring map")
    R, S = g.target, g.source
    p = M.p
    d = M.dim
    n = R.dim
    total = n * d
    TR = R.fp_table
    eye_d = np.eye(d, dtype=np.int64)
    space = linalg.RowSpace(total, p)
    for r in range(n):
        rg = np.einsum("jt,js->st", TR[r], g.matrix) % p  # rg[s] = e_r · g(e_s)
        rows = np.einsum("st,jk->sjtk", rg, eye_d).reshape(S.dim * d, total)
        blk = rows.reshape(S.dim, d, n, d)
        blk[:, :, r, :] -= np.transpose(M.act, (0, 2, 1))  # − e_r ⊗ s·m_j
        space.add(rows % p)
    quot = linalg.Quotient(space)
    q = quot.dim
    act = np.zeros((n, q, q), dtype=np.int64)
    for c, col in enumerate(quot.free):
        r, j = divmod(col, d)
        vecs = np.einsum("bt,k->btk", TR[:, r, :], eye_d[j]).reshape(n, total)
        act[:, :, c] = quot.project(vecs)
    unit = R.unit[:, 0]
    unit_map = quot.project(np.einsum("t,jk->jtk", unit, eye_d).reshape(d, total)).T
    return Pushforward(RingModule(R, q, act, name=f"pushforward({M.name})"), quot, unit_map % p)


def unit_is_module_map(g: RingMap, M: RingModule, push: Pushforward) -> bool:
    """m ↦ [1 ⊗ m] intertwines s·m with g(s)·[1 ⊗ m] for every source basis s."""
    p = M.p
    back = pullback(g, push.module)
    for s in range(g.source.dim):
        lhs = linalg.mod_matmul(push.unit_map, M.act[s], p)
        rhs = linalg.mod_matmul(back.act[s], push.unit_map, p)
        if not np.array_equal(lhs, rhs):
            return False
    return True


def restrict_theta_lie(M: RestrictedModule) -> RingModule:
    """Forget f: the u(L)-module underlying (M, f)."""
    L = M.L
    _prime(L.field)
    u = u_of(L)
    plain = RestrictedModule(L, M.dim, M.action, None, M.name)
    w0 = lie_to_ring(plain, 0, w_of(L, 0))
    return RingModule(u, M.dim, w0.act[:u.dim], name=f"u-module({M.name})")


def restrict_theta_com(M: BeckModuleCom) -> RingModule:
    """Forget π_M: the (F ⊕ A₊)-module underlying (M, π_M)."""
    A = M.A
    _prime(A.field)
    ring = augmented_ring(A)
    act = np.concatenate([np.eye(M.dim, dtype=np.int64)[None], M.action[..., 0]], axis=0)
    return RingModule(ring, M.dim, act, name=f"A-module({M.name})")


def extend_theta(theta: RingMap, M: RingModule) -> Pushforward:
    """Extension of scalars along θ."""
    return pushforward(theta, M)


# --- coefficient identification along η -------------------------------------------------

@dataclass
class CoefficientComparison:
    """Action matrices of the pulled-back module and of the direct computation."""

    pulled: np.ndarray
    direct: np.ndarray

    @property
    def equal(self) -> bool:
        return np.array_equal(self.pulled, self.direct)


def eta_ring_map_lie(env, D: int, N: int, target: FinRing | None = None) -> RingMap:
    """U(L)_D → w(L̂)_N: a PBW monomial goes to the product of η(e_i) in w(L̂)."""
    from .envelopes import U_of

    L_hat = env.hat
    src_L = RestrictedLie(L_hat.field, L_hat.bracket_table[:env.eta.shape[1], :env.eta.shape[1],
                                                            :env.eta.shape[1]],
                          [], L_hat.labels[:env.eta.shape[1]]).plain()
    src = U_of(src_L, D)
    tgt = target or w_of(L_hat, N)
    p = L_hat.p
    gens = [lie_embedding(tgt, env.apply_eta(src_L.basis(i))) for i in range(src_L.dim)]
    mat = np.zeros((tgt.dim, src.dim), dtype=np.int64)
    for s, mono in enumerate(src.meta["monomials"]):
        x = tgt.one()
        for i, e in enumerate(mono):
            for _ in range(e):
                x = tgt.mul(x, gens[i])
        mat[:, s] = x[:, 0]
    return RingMap(src, tgt, mat % p, name="eta: U(L) -> w(L^)")


def coefficients_lie(env, M: RestrictedModule, D: int = 2, N: int = 1) -> CoefficientComparison:
    """Pull a w(L̂)-module back along η versus acting by products of ρ(η(e_i))."""
    _prime(M.field)
    ring = w_of(env.hat, N)
    phi = eta_ring_map_lie(env, D, N, ring)
    pulled = pullback(phi, lie_to_ring(M, N, ring))
    p = M.field.p
    gens = [M.rho(env.apply_eta(np.eye(env.eta.shape[1], dtype=np.int64)[i][:, None]))[..., 0]
            for i in range(env.eta.shape[1])]
    direct = np.zeros_like(pulled.act)
    for s, mono in enumerate(phi.source.meta["monomials"]):
        mat = np.eye(M.dim, dtype=np.int64)
        for i, e in enumerate(mono):
            for _ in range(e):
                mat = linalg.mod_matmul(mat, gens[i], p)
        direct[s] = mat
    return CoefficientComparison(pulled.act, direct)


def coefficients_com(env, M: BeckModuleCom, N: int = 1) -> CoefficientComparison:
    """Pull a V(Â)-module back along θ∘η: F ⊕ A₊ → V(Â) versus ρ_M(η(a)) directly."""
    A_hat = env.envelope
    _prime(A_hat.field)
    src = augmented_ring(env.source)
    tgt = v_of(A_hat, N)
    mat = np.zeros((tgt.dim, src.dim), dtype=np.int64)
    mat[0, 0] = 1
    mat[1:A_hat.dim + 1, 1:] = env.eta
    phi = RingMap(src, tgt, mat % A_hat.p, name="theta . eta")
    pulled = pullback(phi, com_to_ring(M, N, tgt))
    direct = np.zeros_like(pulled.act)
    direct[0] = np.eye(M.dim, dtype=np.int64)
    for s in range(env.source.dim):
        a = env.apply_eta(env.source.basis(s))
        direct[s + 1] = M.rho(a)[..., 0]
    return CoefficientComparison(pulled.act, direct)


# --- p-envelopes of semidirect products ------------------------------------------------

@dataclass
class EnvelopeSplitting:
    """F(L⋉M) against F(L) ⋉ F(M), with the individual checks."""

    report: CheckReport
    dims: tuple


def envelope_splitting(L, M_action, N: int) -> EnvelopeSplitting:
    """Compare F(L⋉M) with F(L) ⋉ F(M) at p-power bound N.

    F(M) is read off as the kernel of the projection F(L⋉M) → F(L) and must be
    a Beck module; rebuilding the semidirect product must reproduce the
    bracket and p-map of F(L⋉M) exactly.
    """
    from .rlie import abelian, is_restricted_hom, p_envelope, semidirect_lie_data

    F = L.field
    p = F.p
    nL = L.dim
    big = semidirect_lie_data(L, M_action)
    nM = big.dim - nL
    env_big = p_envelope(big, N)
    env_L = p_envelope(L, N)
    env_M = p_envelope(abelian(nM, "zero", F).plain(), N)
    rep = CheckReport("envelope splitting").ensure("dimension", "projection", "section", "beck_module",
                                                   "bracket", "pmap", "eta_injective")
    dB, dL, dM = env_big.hat.dim, env_L.hat.dim, env_M.hat.dim
    rep.record("dimension", dB == dL + dM, (dB, dL, dM))
    # reorder F(L⋉M): layer-major order -> L-part then M-part
    n = big.dim
    order = [layer * n + i for layer in range(N + 1) for i in range(nL)]
    order += [layer * n + nL + j for layer in range(N + 1) for j in range(nM)]
    perm = np.zeros((dB, dB), dtype=np.int64)
    perm[np.arange(dB), order] = 1  # new coords = perm @ old
    B = _reorder_lie(env_big.hat, order)
    pr = np.zeros((dL, dB), dtype=np.int64)
    pr[:, :dL] = np.eye(dL, dtype=np.int64)
    z = pr.T.copy()
    rep.record("projection", is_restricted_hom(B, env_L.hat, pr), "pr")
    rep.record("section", is_restricted_hom(env_L.hat, B, z), "z")
    try:
        K = kernel_module_lie(B, env_L.hat, pr, z)
        rep.record("beck_module", True)
    except (NotSquareZero, NotSplit, AxiomViolation) as exc:
        rep.record("beck_module", False, str(exc))
        return EnvelopeSplitting(rep, (dB, dL, dM))
    rebuilt = semidirect_lie(env_L.hat, K, check=False).algebra
    rep.record("bracket", np.array_equal(rebuilt.bracket_table, B.bracket_table), "bracket tables differ")
    rep.record("pmap", np.array_equal(rebuilt.pmap_on_basis, B.pmap_on_basis), "p-maps differ")
    eta = env_big.eta
    rep.record("eta_injective", linalg.rank(eta, p) == big.dim, "eta has a kernel")
    return EnvelopeSplitting(rep, (dB, dL, dM))


def _reorder_lie(L: RestrictedLie, order) -> RestrictedLie:
    idx = np.asarray(order)
    T = L.bracket_table[np.ix_(idx, idx, idx)]
    P = L.pmap_on_basis[np.ix_(idx, idx)]
    return RestrictedLie(L.field, T, P, [L.labels[i] for i in idx], name=L.name)


# --- random Beck modules -----------------------------------------------------------------

def _annihilator_of(products: np.ndarray, p: int, rng) -> np.ndarray:
    """Random c with Σ_t c_t v_t = 0 for every row v of ``products``."""
    n = products.shape[1]
    rows = products[np.any(products, axis=1)]
    basis = linalg.kernel(rows, p) if rows.size else np.eye(n, dtype=np.int64)
    if basis.shape[0] == 0:
        return np.zeros(n, dtype=np.int64)
    return rng.integers(0, p, size=basis.shape[0]) @ basis % p


def _square_zero_pair(rng, d: int, p: int) -> tuple[np.ndarray, np.ndarray]:
    """E = u vᵀ with vᵀu = 0 (so E² = 0) together with u."""
    u = rng.integers(0, p, size=d)
    if d == 1 or not np.any(u):
        return np.zeros((d, d), dtype=np.int64), u
    # v from the orthogonal complement of u
    perp = linalg.kernel(u[None, :], p)
    v = rng.integers(0, p, size=perp.shape[0]) @ perp % p
    return np.outer(u, v) % p, u


def _random_kernel_map(rng, kills: np.ndarray, d: int, p: int, side: str) -> np.ndarray:
    """Random d×d matrix X with X·kills = 0 (side 'left') or with image in ker(kills)."""
    if side == "left":
        # rows orthogonal to the columns of kills
        cols = kills[:, np.any(kills, axis=0)] if kills.ndim == 2 else kills[:, None]
        basis = linalg.kernel(cols.T, p) if cols.size and np.any(cols) else np.eye(d, dtype=np.int64)
        coeffs = rng.integers(0, p, size=(d, basis.shape[0]))
        return coeffs @ basis % p if basis.shape[0] else np.zeros((d, d), dtype=np.int64)
    basis = linalg.kernel(kills, p) if np.any(kills) else np.eye(d, dtype=np.int64)
    coeffs = rng.integers(0, p, size=(basis.shape[0], d))
    return basis.T @ coeffs % p if basis.shape[0] else np.zeros((d, d), dtype=np.int64)


def com_examples(p: int) -> list[PdComAlgebra]:
    from .pdcom import free_pdcom, zero_pdcom

    F = FieldSpec(p)
    sq = PdComAlgebra(F, np.zeros((1, 1, 1), dtype=np.int64), np.zeros((1, 1), dtype=np.int64), ["x"],
                      name="span(x), x^2 = 0")
    return [zero_pdcom(F), sq, free_pdcom(1, 2, F), free_pdcom(1, 3, F)]


def random_beck_com(rng, p: int, max_dim: int = 3, base: PdComAlgebra | None = None) -> BeckModuleCom:
    """ρ(a) = c(a)·E with E² = 0 and c vanishing on A₊²; π_M kills the image of E."""
    if base is None:
        bases = com_examples(p)
        base = bases[int(rng.integers(0, len(bases)))]
    A = base
    d = int(rng.integers(1, max_dim + 1))
    E, u = _square_zero_pair(rng, d, p)
    prods = A.mult[..., 0].reshape(A.dim * A.dim, A.dim) if A.dim else np.zeros((0, 0), dtype=np.int64)
    c = _annihilator_of(prods, p, rng) if A.dim else np.zeros(0, dtype=np.int64)
    action = np.einsum("i,jk->ijk", c, E) % p if A.dim else np.zeros((0, d, d), dtype=np.int64)
    pi = _random_kernel_map(rng, E, d, p, "left")
    return BeckModuleCom(A, d, action, pi, name=f"random module over {A.name}")


def lie_examples(p: int) -> list[RestrictedLie]:
    from .rlie import abelian, heisenberg

    F = FieldSpec(p)
    out = [abelian(1, "zero", F), abelian(1, "identity", F), abelian(2, "zero", F), heisenberg(F)]
    for L, name in zip(out, ["abelian(1), e->0", "abelian(1), e->e", "abelian(2), e->0"]):
        L.name = name
    return out


def random_beck_lie(rng, p: int, max_dim: int = 3, base: RestrictedLie | None = None) -> RestrictedModule:
    """Square-zero actions vanishing on [L,L] and on p-map images, or a
    semisimple action for the toral example; f lands in M^L."""
    if base is None:
        bases = lie_examples(p)
        base = bases[int(rng.integers(0, len(bases)))]
    L = base
    d = int(rng.integers(1, max_dim + 1))
    n = L.dim
    if n == 1 and np.any(L.pmap_on_basis):
        # e^{[p]} = e: diagonalizable with eigenvalues in F_p
        while True:
            S = rng.integers(0, p, size=(d, d))
            if linalg.rank(S, p) == d:
                break
        diag = np.diag(rng.integers(0, p, size=d))
        Sinv = linalg.inverse(S, p)
        rho = [linalg.mod_matmul(linalg.mod_matmul(S, diag, p), Sinv, p)]
    else:
        E, _ = _square_zero_pair(rng, d, p)
        rows = [L.bracket_table[i, j, :, 0] for i in range(n) for j in range(n)]
        rows += [L.pmap_on_basis[i, :, 0] for i in range(n)]
        c = _annihilator_of(np.array(rows), p, rng)
        rho = [c[i] * E % p for i in range(n)]
    stacked = np.vstack(rho)
    fmat = _random_kernel_map(rng, stacked, d, p, "right")
    return RestrictedModule(L, d, np.stack(rho), fmat, name=f"random module over {L.name}")
