from functools import lru_cache

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from divpower.envelopes import (Symbol, U_of, augmented_ring, f_power, lie_embedding, operadic_symbol_to_ring,
                                regular_bimodule, regular_module, theta_com, theta_lie, u_of, v_map, v_of,
                                w_map, w_of)
from divpower.errors import UnsupportedField, UnsupportedSymbol
from divpower.field import FieldSpec
from divpower.pdcom import free_pdcom
from divpower.rlie import abelian, heisenberg, pmap_extend, sl2

LIE_CASES = [(lambda: abelian(1, "zero", 2), 2), (lambda: abelian(1, "identity", 3), 3),
             (lambda: abelian(2, "zero", 2), 4), (lambda: heisenberg(2), 8),
             (lambda: heisenberg(3), 27), (lambda: sl2(3), 27)]


@pytest.mark.parametrize("make,dim", LIE_CASES)
def test_restricted_enveloping_algebra(make, dim):
    u = u_of(make())
    assert u.dim == dim
    rep = u.check()
    assert rep.ok, rep.summary()


@lru_cache(maxsize=None)
def _with_u(make, p):
    L = make(p)
    return L, u_of(L)


@settings(max_examples=30)
@given(case=st.sampled_from([(heisenberg, 2), (heisenberg, 3), (sl2, 3), (sl2, 5)]),
       seed=st.integers(0, 10**6))
def test_lie_structure_inside_u(case, seed):
    """Commutators in u(L) are brackets and p-th powers are the p-map."""
    make, p = case
    L, u = _with_u(make, p)
    rng = np.random.default_rng(seed)
    a, b = L.random(rng), L.random(rng)
    ia, ib = lie_embedding(u, a), lie_embedding(u, b)
    comm = (u.mul(ia, ib) - u.mul(ib, ia)) % p
    assert np.array_equal(comm, lie_embedding(u, L.bracket(a, b)))
    assert np.array_equal(u.power(ia, p), lie_embedding(u, pmap_extend(L, a)))


def test_truncated_universal_envelope():
    A = U_of(abelian(2, "zero", 3).plain(), 3)
    assert A.dim == 10 and A.meta["associative"]
    H = U_of(heisenberg(3).plain(), 2)
    assert H.meta["associative"] == H.check().ok


@pytest.mark.parametrize("make,N", [(lambda: heisenberg(2), 1), (lambda: heisenberg(2), 2),
                                    (lambda: abelian(1, "identity", 3), 2)])
def test_w_ring(make, N):
    L = make()
    w = w_of(L, N)
    assert w.dim == (N + 1) * u_of(L).dim
    assert w.check().ok
    f = f_power(w, 1)
    assert np.array_equal(w.power(f, N), f_power(w, N))
    assert not np.any(w.power(f, N + 1))
    # l·f = ε(l)·f = 0 for l in L, while f·l is the basis element f⊗l
    for i in range(L.dim):
        li = lie_embedding(w, L.basis(i))
        assert not np.any(w.mul(li, f))
        assert np.count_nonzero(w.mul(f, li)) == 1


def test_frobenius_twist_over_extension_field():
    F = FieldSpec(3, 2)
    w = w_of(abelian(1, "zero", F), 1)
    assert w.check().ok
    lam = F.scalar([0, 1])
    f = f_power(w, 1)
    lhs = w.mul(f, F.scale(lam, w.one()))
    assert np.array_equal(lhs, F.scale(F.frob(lam, 1), f))
    assert not np.array_equal(lhs, F.scale(lam, f))


@pytest.mark.parametrize("p,N", [(2, 1), (3, 2)])
def test_v_ring_and_theta(p, N):
    A = free_pdcom(1, 3, p)
    V = v_of(A, N)
    assert V.dim == (N + 1) * (A.dim + 1)
    assert V.check().ok
    assert theta_com(A, N).check_multiplicative().ok


@pytest.mark.parametrize("make,D,N", [(lambda: heisenberg(2), 2, 1), (lambda: sl2(3), 2, 1),
                                      (lambda: abelian(2, "zero", 3), 3, 2)])
def test_theta_lie_is_multiplicative(make, D, N):
    assert theta_lie(make(), D, N).check_multiplicative().ok


def test_ring_maps_are_prime_field_only():
    with pytest.raises(UnsupportedField):
        theta_com(free_pdcom(1, 2, FieldSpec(3, 2)), 1)


def test_functoriality():
    g = np.array([[0], [0], [1]])
    assert w_map(g, abelian(1, "zero", 2), heisenberg(2), 2).check_multiplicative().ok
    trunc = np.eye(2, 3, dtype=np.int64)  # Γ(x) at D = 3 onto D = 2
    assert v_map(trunc, free_pdcom(1, 3, 2), free_pdcom(1, 2, 2), 2).check_multiplicative().ok


def test_symbols():
    A = free_pdcom(1, 2, 3)
    V = v_of(A, 1)
    assert np.array_equal(operadic_symbol_to_ring(Symbol("power", (3,)), V), f_power(V, 1))
    assert np.array_equal(operadic_symbol_to_ring(Symbol("unit", (1,)), V), V.one())
    with pytest.raises(UnsupportedSymbol):
        operadic_symbol_to_ring(Symbol("power", (2,)), V)
    w = w_of(heisenberg(3), 1)
    x = heisenberg(3).basis(0)
    assert np.array_equal(operadic_symbol_to_ring(Symbol("bracket", (1, 1), (x,)), w), lie_embedding(w, x))


def test_regular_modules():
    R = augmented_ring(free_pdcom(1, 3, 2))
    assert regular_module(R).check().ok
    B = regular_bimodule(R)
    assert np.array_equal(B.left, B.right)  # commutative ring


def test_oversized_tables_are_refused():
    # u of the Heisenberg p-envelope at p = 3 has basis 3^6; w doubles it
    from divpower.errors import TooLarge
    from divpower.rlie import p_envelope
    hat = p_envelope(heisenberg(3).plain(), 1).hat
    with pytest.raises(TooLarge):
        w_of(hat, 1)
