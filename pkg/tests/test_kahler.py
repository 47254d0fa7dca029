import itertools

import numpy as np
import pytest

from divpower import kahler, linalg
from divpower.beckmod import BeckModuleCom, com_to_ring, lie_to_ring
from divpower.catalog import com_grid, lie_grid
from divpower.envelopes import regular_bimodule, trivial_bimodule, u_of
from divpower.errors import TruncationMismatch, UnsupportedField, WellDefinednessFailure
from divpower.field import FieldSpec
from divpower.kahler import (PresentedModule, abelianization_com, abelianization_lie, adjoint_restricted_module,
                             comparison, comparison_omega_com, comparison_omega_lie, derivations_assoc,
                             derivations_com, derivations_rlie, hom_module, naturality_com, naturality_lie,
                             omega_com, omega_rlie, relation_stability, restriction_to_lie, wilson_sign)
from divpower.pdcom import free_pdcom
from divpower.rlie import RestrictedModule, abelian, heisenberg, pmap_extend, sl2, trivial_module

from oracles import all_matrices, count_assoc_derivations


def _log(count: int, p: int) -> int:
    e = 0
    while count > 1:
        assert count % p == 0
        count //= p
        e += 1
    return e


@pytest.mark.parametrize("make,p", [(lambda: abelian(1, "zero", 2), 2), (lambda: abelian(1, "identity", 2), 2),
                                    (lambda: abelian(1, "zero", 3), 3), (lambda: abelian(1, "identity", 3), 3)])
@pytest.mark.parametrize("which", ["trivial", "regular"])
def test_assoc_derivations_brute_force(make, p, which):
    u = u_of(make())
    M = regular_bimodule(u) if which == "regular" else trivial_bimodule(u)
    count = count_assoc_derivations(u.fp_table, M.left, M.right, p)
    assert derivations_assoc(u, M).dim == _log(count, p)


def test_hand_checked_anchor():
    # u = F_2[e]/(e^2): d is fixed by d(e) in a 2-dim space, and d(1) = 0
    u = u_of(abelian(1, "zero", 2))
    assert derivations_assoc(u, regular_bimodule(u)).dim == 2


def _brute_rlie(L, M, p) -> int:
    count = 0
    for D in all_matrices(M.dim, L.dim, p):
        def d(v):
            return D @ v[:, 0] % p
        ok = True
        for i, j in itertools.product(range(L.dim), repeat=2):
            a, b = L.basis(i), L.basis(j)
            lhs = d(L.bracket(a, b))
            rhs = (M.rho(a)[..., 0] @ d(b) - M.rho(b)[..., 0] @ d(a)) % p
            ok &= np.array_equal(lhs, rhs)
        for i in range(L.dim):
            a = L.basis(i)
            ra = M.rho(a)[..., 0]
            lhs = d(pmap_extend(L, a))
            rhs = (np.linalg.matrix_power(ra, p - 1) @ d(a) + M.f_matrix()[..., 0] @ d(a)) % p
            ok &= np.array_equal(lhs, rhs)
        count += ok
    return count


@pytest.mark.parametrize("L,M", [
    (abelian(1, "zero", 2), trivial_module(abelian(1, "zero", 2), 1)),
    (abelian(1, "identity", 3), trivial_module(abelian(1, "identity", 3), 1, np.eye(1, dtype=np.int64))),
    (abelian(2, "zero", 2), RestrictedModule(abelian(2, "zero", 2), 2,
                                             np.array([[[0, 1], [0, 0]], [[0, 0], [0, 0]]]))),
    (heisenberg(2), trivial_module(heisenberg(2), 1)),
])
def test_rlie_derivations_brute_force(L, M):
    p = L.p
    assert derivations_rlie(np.eye(L.dim, dtype=np.int64), L, M).dim == _log(_brute_rlie(L, M, p), p)


def _brute_com(A, M, p) -> int:
    count = 0
    for D in all_matrices(M.dim, A.dim, p):
        def d(v):
            return D @ v[:, 0] % p
        ok = True
        for i, j in itertools.product(range(A.dim), repeat=2):
            a, b = A.basis(i), A.basis(j)
            rhs = (M.rho(a)[..., 0] @ d(b) + M.rho(b)[..., 0] @ d(a)) % p
            ok &= np.array_equal(d(A.mul(a, b)), rhs)
        for i in range(A.dim):
            a = A.basis(i)
            rhs = (M.pi[..., 0] @ d(a) - M.rho(A.power(a, p - 1))[..., 0] @ d(a)) % p
            ok &= np.array_equal(d(A.pi(a)), rhs)
        count += ok
    return count


@pytest.mark.parametrize("p,D", [(2, 2), (2, 3), (3, 3)])
@pytest.mark.parametrize("pi", [0, 1])
def test_com_derivations_brute_force(p, D, pi):
    A = free_pdcom(1, D, p)
    M = BeckModuleCom(A, 1, np.zeros((A.dim, 1, 1), dtype=np.int64), np.full((1, 1), pi))
    got = derivations_com(np.eye(A.dim, dtype=np.int64), A, M).dim
    assert got == _log(_brute_com(A, M, p), p)


@pytest.mark.parametrize("make", [lambda: abelian(1, "zero", 2), lambda: abelian(1, "identity", 2),
                                  lambda: heisenberg(2), lambda: sl2(3)])
@pytest.mark.parametrize("which", ["trivial", "regular"])
def test_assoc_and_restricted_derivations_agree(make, which):
    L = make()
    u = u_of(L)
    M = regular_bimodule(u) if which == "regular" else trivial_bimodule(u)
    assoc = derivations_assoc(u, M)
    lie = derivations_rlie(np.eye(L.dim, dtype=np.int64), L, adjoint_restricted_module(L, M))
    assert assoc.dim == lie.dim
    restricted = restriction_to_lie(assoc, u)
    assert (linalg.rank(restricted, L.p) if assoc.dim else 0) == assoc.dim


@pytest.mark.parametrize("N", [1, 2])
def test_representability_com(N):
    for p in (2, 3):
        for ex in com_grid(p):
            omega = omega_com(ex.algebra, N)
            for name, M in ex.modules:
                hom = hom_module(omega, com_to_ring(M, N, omega.ring)).dim
                der = derivations_com(np.eye(ex.algebra.dim, dtype=np.int64), ex.algebra, M).dim
                assert hom == der, (ex.name, name, N)


@pytest.mark.parametrize("N", [1, 2])
def test_representability_lie(N):
    for p in (2, 3):
        for ex in lie_grid(p):
            omega = omega_rlie(ex.algebra, N)
            for name, M in ex.modules:
                hom = hom_module(omega, lie_to_ring(M, N, omega.ring)).dim
                der = derivations_rlie(np.eye(ex.algebra.dim, dtype=np.int64), ex.algebra, M).dim
                assert hom == der, (ex.name, name, N)


def test_hom_needs_matching_truncation():
    A = free_pdcom(1, 2, 2)
    M = BeckModuleCom(A, 1, np.zeros((A.dim, 1, 1), dtype=np.int64), np.zeros((1, 1), dtype=np.int64))
    with pytest.raises(TruncationMismatch):
        hom_module(omega_com(A, 1), com_to_ring(M, 2))


def test_prime_field_only():
    F = FieldSpec(3, 2)
    L = abelian(1, "zero", F)
    with pytest.raises(UnsupportedField):
        derivations_rlie(np.eye(1, dtype=np.int64), L, trivial_module(L, 1))


def test_comparison_maps_are_well_defined():
    for p in (2, 3):
        for ex in com_grid(p):
            c = comparison_omega_com(np.eye(ex.algebra.dim, dtype=np.int64), ex.algebra, ex.algebra, 2)
            assert c.checked > 0 or len(c.source.relations) == 0
        for ex in lie_grid(p):
            c = comparison_omega_lie(np.eye(ex.algebra.dim, dtype=np.int64), ex.algebra, ex.algebra, 2)
            assert c.checked > 0 or len(c.source.relations) == 0


def test_comparison_rejects_lost_relations():
    c = comparison_omega_lie(np.eye(3, dtype=np.int64), heisenberg(2), heisenberg(2), 2)
    bare = PresentedModule(c.target.ring, c.target.generators, np.zeros((0, 3, c.target.ring.dim), dtype=np.int64))
    with pytest.raises(WellDefinednessFailure):
        comparison(c.source, bare, c.ring_map, degree_bound=3)


def test_naturality():
    trunc = np.eye(2, 3, dtype=np.int64)
    assert naturality_com(trunc, free_pdcom(1, 3, 2), free_pdcom(1, 2, 2))
    assert naturality_lie(np.array([[0], [0], [1]]), abelian(1, "zero", 2), heisenberg(2))
    assert naturality_lie(np.eye(3, dtype=np.int64), heisenberg(3), heisenberg(3))


@pytest.mark.parametrize("N", [1, 2])
def test_abelianization_along_identity(N):
    A = free_pdcom(1, 3, 2)
    ab = abelianization_com(np.eye(A.dim, dtype=np.int64), A, A, N)
    assert ab.module.dim == omega_com(A, N).dim
    H = heisenberg(2)
    ab = abelianization_lie(np.eye(3, dtype=np.int64), H, H, N)
    assert ab.module.dim == omega_rlie(H, N).dim


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11])
def test_wilson(p):
    assert wilson_sign(p) == p - 1


def _genuine(M, N):
    form = com_to_ring if isinstance(M, BeckModuleCom) else lie_to_ring
    return all(form(M, n).check().ok for n in (N, N + 1))


@pytest.mark.parametrize("N", [1, 2])
def test_basis_relations_are_enough(N):
    for p in (2, 3):
        for ex in com_grid(p) + lie_grid(p):
            mods = [M for _, M in ex.modules if _genuine(M, N)]
            rep = relation_stability(ex.algebra, N, mods, trials=15, seed=N)
            assert rep.ok, (ex.name, rep.summary())
            assert rep.passes["truncation"] == len(mods) > 0


def test_stability_notices_missing_p_relations(monkeypatch):
    original = kahler.omega_rlie

    def without_p_relations(L, N=2):
        om = original(L, N)
        return PresentedModule(om.ring, om.generators, om.relations[:-L.dim])

    monkeypatch.setattr(kahler, "omega_rlie", without_p_relations)
    rep = relation_stability(heisenberg(2), 1, trials=10)
    assert "random_p_relation" in rep.failed()
