import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from divpower import linalg
from divpower.beckmod import (BeckModuleCom, check_beck_com, com_examples, com_to_ring, envelope_splitting,
                              extend_theta, kernel_module, lie_examples, lie_to_ring, one_slot_consistency,
                              pullback, random_beck_com, random_beck_lie, restrict_theta_com, ring_to_com, ring_to_lie,
                              same_restricted_module, semidirect_com, semidirect_lie, semidirect_pi_formula,
                              semidirect_pmap_formula, unit_is_module_map)
from divpower.envelopes import theta_com, u_of, w_of
from divpower.errors import NotSplit, NotSquareZero, TruncationMismatch
from divpower.field import FieldSpec
from divpower.pdcom import free_pdcom, pd_envelope, zero_pdcom
from divpower.rlie import abelian, check_restricted_module, heisenberg, sl2

seeds = st.integers(0, 10**6)
primes = st.sampled_from([2, 3])


@settings(max_examples=25)
@given(p=primes, seed=seeds)
def test_com_round_trip(p, seed):
    M = random_beck_com(np.random.default_rng(seed), p)
    assert check_beck_com(M).ok
    sd = semidirect_com(M.A, M)
    assert sd.report.ok
    K = kernel_module(sd.algebra, M.A, sd.pr, sd.z)
    assert K.same_data(M)


@settings(max_examples=25)
@given(p=primes, seed=seeds)
def test_lie_round_trip(p, seed):
    M = random_beck_lie(np.random.default_rng(seed), p)
    assert check_restricted_module(M.L, M).ok
    sd = semidirect_lie(M.L, M)
    assert sd.report.ok
    K = kernel_module(sd.algebra, M.L, sd.pr, sd.z)
    assert same_restricted_module(K, M)


@settings(max_examples=20)
@given(p=primes, seed=seeds)
def test_semidirect_structure_maps_match_closed_formulas(p, seed):
    rng = np.random.default_rng(seed)
    M = random_beck_com(rng, p)
    B = semidirect_com(M.A, M, check=False).algebra
    a, m = M.A.random(rng), M.random(rng)
    first, second = semidirect_pi_formula(M.A, M, a, m)
    assert np.array_equal(B.pi(np.concatenate([a, m])), np.concatenate([first, second]))

    N = random_beck_lie(rng, p)
    C = semidirect_lie(N.L, N, check=False).algebra
    h, n = N.L.random(rng), N.random(rng)
    first, second = semidirect_pmap_formula(N.L, N, h, n)
    assert np.array_equal(C.pmap(np.concatenate([h, n])), np.concatenate([first, second]))


def test_sl2_adjoint_round_trip():
    L = sl2(3)
    M = random_beck_lie(np.random.default_rng(0), 3, base=L)
    sd = semidirect_lie(L, M)
    assert same_restricted_module(kernel_module(sd.algebra, L, sd.pr, sd.z), M)


def test_square_zero_counterexample():
    # F[x]/(x^2) in characteristic 2: x^2 = 2·x^(2) = 0 already, so the PD envelope is all of Γ(x)
    env = pd_envelope(1, [[2]], 4, 2)
    G = env.envelope
    assert G.dim == free_pdcom(1, 4, 2).dim
    x, x2, x3 = (G.basis(G.index[(a,)]) for a in (1, 2, 3))
    assert np.array_equal(G.mul(x, x2), x3)
    with pytest.raises(NotSquareZero) as exc:
        kernel_module(G, zero_pdcom(G.field), np.zeros((0, G.dim), dtype=np.int64),
                      np.zeros((G.dim, 0), dtype=np.int64))
    assert "x^(3)" in str(exc.value.witness)


def test_nonabelian_kernel_is_rejected():
    H = heisenberg(2)
    with pytest.raises(NotSquareZero):
        kernel_module(H, abelian(0, "zero", 2), np.zeros((0, 3), dtype=np.int64), np.zeros((3, 0), dtype=np.int64))


def test_projection_must_split():
    L, B = abelian(1, "zero", 3), abelian(2, "zero", 3)
    with pytest.raises(NotSplit):
        kernel_module(B, L, np.array([[1, 0]]), np.array([[0], [1]]))


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("N", [1, 2])
def test_ring_forms_round_trip(p, N):
    """The ring form is a genuine module exactly when π_M (resp. f) dies at f-degree N+1."""
    rng = np.random.default_rng(p * 10 + N)
    for _ in range(5):
        M = random_beck_com(rng, p)
        R = com_to_ring(M, N)
        assert R.check().ok == _nilpotent(M.pi[..., 0], N + 1, p)
        assert ring_to_com(R).same_data(M)
        K = random_beck_lie(rng, p)
        S = lie_to_ring(K, N)
        assert S.check().ok == _nilpotent(K.f_matrix()[..., 0], N + 1, p)
        assert same_restricted_module(ring_to_lie(S), K)


def _nilpotent(m, e: int, p: int) -> bool:
    out = np.eye(m.shape[0], dtype=np.int64)
    for _ in range(e):
        out = out @ m % p
    return not np.any(out)


@pytest.mark.parametrize("p,N", [(2, 1), (2, 2), (3, 2)])
def test_extension_along_theta(p, N):
    """V(A)_N ⊗ M over F ⊕ A₊: a·f^k·b = 0 for b in A₊ and k >= 1, so each a·f^k carries M / A₊M."""
    rng = np.random.default_rng(N)
    for A in com_examples(p):
        M = random_beck_com(rng, p, base=A)
        base = restrict_theta_com(M)
        push = extend_theta(theta_com(A, N), base)
        assert push.module.check().ok
        assert unit_is_module_map(theta_com(A, N), base, push)
        images = M.action[..., 0].transpose(1, 0, 2).reshape(M.dim, -1) if A.dim else np.zeros((M.dim, 0))
        moved = linalg.rank(images % p, p) if images.size else 0
        assert push.module.dim == M.dim + N * (A.dim + 1) * (M.dim - moved)


def test_pullback_checks_the_ring():
    M = com_to_ring(random_beck_com(np.random.default_rng(1), 2), 1)
    with pytest.raises(TruncationMismatch):
        pullback(theta_com(free_pdcom(1, 3, 2), 2), M)


@pytest.mark.parametrize("p", [2, 3])
def test_envelope_splits_for_semidirect_products(p):
    F = FieldSpec(p)
    ab = abelian(1, "zero", F).plain()
    sp = envelope_splitting(ab, F.embed_prime(np.array([[[0, 1], [0, 0]]]))[..., 0], 1)
    assert sp.report.ok, sp.report.summary()
    H = heisenberg(F).plain()
    act = np.stack([H.ad_matrix(H.basis(i))[..., 0] for i in range(3)])
    sp = envelope_splitting(H, act, 1)
    assert sp.report.ok, sp.report.summary()
    assert sp.dims[0] == sp.dims[1] + sp.dims[2]


def test_catalog_modules_pass():
    for p in (2, 3):
        for A in com_examples(p):
            assert check_beck_com(random_beck_com(np.random.default_rng(0), p, base=A)).ok
        for L in lie_examples(p):
            M = random_beck_lie(np.random.default_rng(0), p, base=L)
            assert check_restricted_module(L, M).ok
    assert u_of(abelian(1, "zero", 2)).dim == 2 and w_of(abelian(1, "zero", 2), 1).dim == 4


def test_trivial_module_with_pi():
    A = free_pdcom(1, 3, 3)
    M = BeckModuleCom(A, 1, np.zeros((A.dim, 1, 1), dtype=np.int64), np.eye(1, dtype=np.int64))
    assert check_beck_com(M).ok
    sd = semidirect_com(A, M)
    assert kernel_module(sd.algebra, A, sd.pr, sd.z).same_data(M)


@settings(max_examples=15)
@given(p=primes, seed=seeds)
def test_one_slot_operations_follow_from_module_data(p, seed):
    M = random_beck_com(np.random.default_rng(seed), p)
    assert one_slot_consistency(M, 4 if p == 2 else 6, trials=5, seed=seed).ok


def test_one_slot_diagnostic_sees_a_bad_pi():
    A = free_pdcom(1, 4, 2)
    act = np.zeros((A.dim, 2, 2), dtype=np.int64)
    act[0] = [[0, 0], [1, 0]]
    bad = BeckModuleCom(A, 2, act, np.array([[0, 1], [0, 0]]))
    assert "pi_kills_action" in check_beck_com(bad).failed()
    assert not one_slot_consistency(bad).ok
