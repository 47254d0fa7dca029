import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from divpower.beckmod import lie_examples
from divpower.errors import BadCharacteristic, TruncationTooSmall
from divpower.field import FieldSpec
from divpower.rlie import (RestrictedLie, RestrictedModule, abelian, adjoint_module, check_restricted_module,
                           check_rlie, heisenberg, is_lie_hom, is_restricted_hom, jacobson_correction,
                           p_envelope, pmap_extend, sl2, trivial_module)

from oracles import coords_in, heisenberg_matrices, matrix_power_mod, sl2_matrices

MODELS = [(sl2, sl2_matrices, 3), (sl2, sl2_matrices, 5), (heisenberg, lambda p: heisenberg_matrices(), 2),
          (heisenberg, lambda p: heisenberg_matrices(), 3)]


def _ints(v) -> list[int]:
    return [int(c) for c in np.asarray(v)[:, 0]]


@pytest.mark.parametrize("make,mats,p", MODELS)
def test_brackets_are_commutators(make, mats, p):
    L, M = make(p), mats(p)
    for i in range(3):
        for j in range(3):
            comm = (M[i] @ M[j] - M[j] @ M[i]) % p
            assert _ints(L.bracket(L.basis(i), L.basis(j))) == coords_in(M, comm, p)


@settings(max_examples=40)
@given(case=st.sampled_from(MODELS), coeffs=st.lists(st.integers(0, 4), min_size=3, max_size=3))
def test_pmap_is_matrix_power(case, coeffs):
    make, mats, p = case
    L, M = make(p), mats(p)
    c = [x % p for x in coeffs]
    X = sum(ci * mi for ci, mi in zip(c, M)) % p
    v = L.vec(c)
    assert _ints(pmap_extend(L, v)) == coords_in(M, matrix_power_mod(X, p, p), p)


def test_square_of_sum_in_characteristic_two():
    L = heisenberg(2)
    x, y, z = (L.basis(i) for i in range(3))
    assert np.array_equal(pmap_extend(L, x + y), z)
    assert np.array_equal(jacobson_correction(L, x, y), L.bracket(x, y))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_catalog_algebras_pass(p):
    for L in lie_examples(p) + ([sl2(p)] if p > 2 else []):
        rep = check_rlie(L, trials=30, seed=4)
        assert rep.ok, (L.name, rep.summary())


def test_extension_field_algebras_pass():
    F = FieldSpec(3, 2)
    for L in (sl2(F), heisenberg(F), abelian(2, "identity", F)):
        assert check_rlie(L, trials=20).ok


def test_pmap_is_order_independent():
    L = sl2(5)
    rng = np.random.default_rng(0)
    for _ in range(10):
        v = L.random(rng)
        assert np.array_equal(L.pmap(v), L.pmap(v, [2, 0, 1]))


def test_checker_catches_bad_pmap():
    good = sl2(3)
    pm = good.pmap_on_basis.copy()
    pm[1] = 0  # h^[p] = h is forced by ad_h^p = ad_h
    bad = RestrictedLie(good.field, good.bracket_table, pm, good.labels, "bad")
    assert "RLeq2" in check_rlie(bad, trials=10).failed()


def test_checker_catches_bad_bracket():
    good = heisenberg(3)
    table = good.bracket_table.copy()
    table[1, 0] = 0  # drop [y, x] = -z
    bad = RestrictedLie(good.field, table, good.pmap_on_basis, good.labels, "bad")
    assert "antisymmetric" in check_rlie(bad, trials=5).failed()


def test_sl2_needs_odd_characteristic():
    with pytest.raises(BadCharacteristic):
        sl2(2)


@pytest.mark.parametrize("p", [2, 3])
def test_restricted_modules(p):
    L = heisenberg(p)
    assert check_restricted_module(L, adjoint_module(L)).ok
    assert check_restricted_module(L, trivial_module(L, 2, np.eye(2, dtype=np.int64))).ok
    A = abelian(1, "zero", p)
    # a nonzero nilpotent action of e with e^[p] = 0 is restricted, an invertible one is not
    nil = RestrictedModule(A, 2, A.field.embed_prime(np.array([[[0, 1], [0, 0]]])))
    assert check_restricted_module(A, nil).ok
    inv = RestrictedModule(A, 1, A.field.embed_prime(np.array([[[1]]])))
    assert "restricted" in check_restricted_module(A, inv).failed()


def test_module_f_must_land_in_invariants():
    L = abelian(1, "zero", 3)
    act = L.field.embed_prime(np.array([[[0, 1], [0, 0]]]))
    M = RestrictedModule(L, 2, act, np.array([[0, 0], [1, 0]]))
    assert "invariant_image" in check_restricted_module(L, M).failed()


def test_homomorphism_checks():
    H = heisenberg(3)
    to_center = np.array([[0], [0], [1]])
    assert is_restricted_hom(abelian(1, "zero", 3), H, to_center)
    assert is_lie_hom(abelian(1, "identity", 3), H, to_center)
    assert not is_restricted_hom(abelian(1, "identity", 3), H, to_center)


@pytest.mark.parametrize("make,p", [(heisenberg, 2), (heisenberg, 3)])
def test_p_envelope(make, p):
    L = make(p).plain()
    env = p_envelope(L, 1)
    assert env.hat.dim == 2 * L.dim
    assert is_lie_hom(L, env.hat, env.eta)
    assert check_rlie(env.hat, trials=20).ok
    # the p-map sends a generator to its p-th power in the enveloping algebra
    for i in range(L.dim):
        assert np.array_equal(env.hat.pmap(env.apply_eta(L.basis(i))), env.hat.basis(L.dim + i))


def test_p_envelope_of_sl2_does_not_close():
    # ad of h^p equals ad of h, so the top layer cannot carry a zero p-map
    with pytest.raises(TruncationTooSmall):
        p_envelope(sl2(3).plain(), 1)
