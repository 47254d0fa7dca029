"""Acceptance criteria, one test per criterion.

Each test prints a PASS/FAIL line and adds it to the terminal summary.  A
failing criterion still raises, so it also shows up as a failing test.
"""

from contextlib import contextmanager

import numpy as np
import pytest

import conftest
from divpower import linalg
from divpower.beckmod import (BeckModuleCom, check_beck_com, coefficients_com, coefficients_lie, com_to_ring,
                              envelope_splitting, kernel_module, lie_examples, lie_to_ring, random_beck_com,
                              random_beck_lie, same_restricted_module, semidirect_com, semidirect_lie)
from divpower.catalog import com_grid, lie_grid
from divpower.envelopes import regular_bimodule, trivial_bimodule, u_of
from divpower.errors import NotSquareZero
from divpower.field import FieldSpec, base_p_digits, lucas_multinomial
from divpower.gamma import FreeGamma, check_beta_relations, norm_map, reduce_to_p_powers
from divpower.kahler import (adjoint_restricted_module, comparison_omega_com, comparison_omega_lie,
                             derivations_assoc, derivations_com, derivations_rlie, hom_module, naturality_com,
                             naturality_lie, omega_com, omega_rlie, restriction_to_lie)
from divpower.operads import operad_com, operad_lie
from divpower.pdcom import check_divided_powers, free_pdcom, pd_envelope, zero_pdcom
from divpower.rlie import (abelian, adjoint_module, check_restricted_module, heisenberg, is_lie_hom,
                           jacobson_correction, p_envelope, pmap_extend, s_i, sl2, trivial_module)

from oracles import multinomial_reference


@contextmanager
def criterion(number: int, title: str):
    try:
        yield
    except BaseException:
        _report(f"FAIL  criterion {number:2d}: {title}")
        raise
    _report(f"PASS  criterion {number:2d}: {title}")


def _report(line: str) -> None:
    print(line)
    conftest.ACCEPTANCE_LINES.append(line)


def _eye(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def test_01_pd_axioms_in_free_algebras():
    with criterion(1, "divided power axioms in free algebras, D = 12"):
        for p in (2, 3):
            for g in (1, 2):
                A = free_pdcom(g, 12, p)
                rep = check_divided_powers(A, 12, trials=100, seed=p * 10 + g)
                assert rep.ok, rep.summary()
                assert all(rep.passes[key] > 0 for key in ("PDeq1", "PDeq2", "PDeq3", "PDeq4", "PDeq5"))


def test_02_square_zero_counterexample():
    with criterion(2, "square-zero extension does not give a Beck module"):
        G = pd_envelope(1, [[2]], 4, 2).envelope
        x, x2, x3 = (G.basis(G.index[(a,)]) for a in (1, 2, 3))
        assert np.array_equal(G.mul(x, x2), x3) and np.any(x3)
        with pytest.raises(NotSquareZero):
            kernel_module(G, zero_pdcom(G.field), np.zeros((0, G.dim), dtype=np.int64),
                          np.zeros((G.dim, 0), dtype=np.int64))


def test_03_restricted_pbw():
    with criterion(3, "restricted PBW dimensions and associativity"):
        cases = [(abelian(1, "zero", 2), 2), (abelian(1, "identity", 3), 3), (abelian(2, "zero", 2), 4),
                 (abelian(2, "identity", 3), 9), (heisenberg(2), 8), (heisenberg(3), 27), (sl2(3), 27)]
        for L, dim in cases:
            u = u_of(L)
            assert u.dim == L.p ** L.dim == dim
            rep = u.check()
            assert rep.ok and rep.passes["associative"] == dim**3, rep.summary()


def test_04_degree_zero_derivations():
    with criterion(4, "associative and restricted derivations agree"):
        for L in (abelian(1, "zero", 2), abelian(1, "identity", 2), heisenberg(2), sl2(3)):
            u = u_of(L)
            for M in (trivial_bimodule(u), regular_bimodule(u)):
                assoc = derivations_assoc(u, M)
                lie = derivations_rlie(_eye(L.dim), L, adjoint_restricted_module(L, M))
                assert assoc.dim == lie.dim
                if assoc.dim:
                    assert linalg.rank(restriction_to_lie(assoc, u), L.p) == assoc.dim
        u = u_of(abelian(1, "zero", 2))
        M = regular_bimodule(u)
        anchor = abelian(1, "zero", 2)
        assert derivations_assoc(u, M).dim == 2
        assert derivations_rlie(_eye(1), anchor, adjoint_restricted_module(anchor, M)).dim == 2


def test_05_representability():
    with criterion(5, "Hom out of the Kahler module equals derivations, N = 1 and 2"):
        for p in (2, 3):
            for ex in com_grid(p):
                for name, M in ex.modules:
                    der = derivations_com(_eye(ex.algebra.dim), ex.algebra, M).dim
                    homs = [hom_module(om, com_to_ring(M, N, om.ring)).dim
                            for N, om in ((N, omega_com(ex.algebra, N)) for N in (1, 2))]
                    assert homs == [der, der], (ex.name, name)
            for ex in lie_grid(p):
                for name, M in ex.modules:
                    der = derivations_rlie(_eye(ex.algebra.dim), ex.algebra, M).dim
                    homs = [hom_module(om, lie_to_ring(M, N, om.ring)).dim
                            for N, om in ((N, omega_rlie(ex.algebra, N)) for N in (1, 2))]
                    assert homs == [der, der], (ex.name, name)


def test_06_semidirect_round_trip():
    with criterion(6, "kernel of the semidirect product recovers the module"):
        rng = np.random.default_rng(6)
        for i in range(24):
            p = (2, 3)[i % 2]
            M = random_beck_com(rng, p, max_dim=3)
            assert check_beck_com(M).ok
            sd = semidirect_com(M.A, M)
            assert sd.report.ok, sd.report.summary()
            assert kernel_module(sd.algebra, M.A, sd.pr, sd.z).same_data(M)
            K = random_beck_lie(rng, p, max_dim=3)
            assert check_restricted_module(K.L, K).ok
            sd = semidirect_lie(K.L, K)
            assert sd.report.ok, sd.report.summary()
            assert same_restricted_module(kernel_module(sd.algebra, K.L, sd.pr, sd.z), K)


def test_07_beta_relations():
    with criterion(7, "operation relations in truncated free algebras"):
        for p in (2, 3):
            for dim_v in (1, 2):
                for P, D in ((operad_com(6, p), 6), (operad_lie(4, p), 4)):
                    rep = check_beta_relations(P, dim_v, D, trials=100, seed=7)
                    assert rep.ok, rep.summary()
                    assert min(rep.passes.values()) >= 100


def test_08_reduction_to_p_powers():
    with criterion(8, "reduction to p-power compositions and digit multinomials"):
        rng = np.random.default_rng(8)
        mu = np.array([1])
        algebras = {p: FreeGamma(operad_com(6, p), 2, 6) for p in (2, 3)}
        instances = 0
        while instances < 60:
            p = int(rng.choice([2, 3]))
            parts = [int(x) for x in rng.integers(0, 4, size=int(rng.integers(1, 4)))]
            if not 0 < sum(parts) <= 6:
                continue
            alg = algebras[p]
            args = [alg.random_element(rng, [1]) for _ in parts]
            red = reduce_to_p_powers(mu, parts, p)
            assert alg.beta(mu, parts, args) == red.evaluate(alg, args)
            instances += 1
        for p in (2, 3, 5):
            for n in range(1, 65):
                digits = [d * p**j for j, d in enumerate(base_p_digits(n, p)) if d]
                assert lucas_multinomial(n, digits, p) == 1
                assert multinomial_reference(digits, p) == 1


def test_09_norm_map():
    with criterion(9, "norm map rank over Com with one generator"):
        for p in (2, 3):
            for n in range(1, p + 1):
                assert norm_map(operad_com(n, p), 1, n).rank == (1 if n < p else 0)


def test_10_jacobson_mechanics():
    with criterion(10, "p-map of a sum and basis-order independence"):
        H = heisenberg(2)
        x, y, z = (H.basis(i) for i in range(3))
        assert np.array_equal(s_i(H, x, y, 1), z)
        assert np.array_equal(jacobson_correction(H, x, y), z)
        assert np.array_equal(pmap_extend(H, (x + y) % 2), z)
        rng = np.random.default_rng(10)
        for p in (2, 3, 5):
            for L in lie_examples(p) + ([sl2(p)] if p > 2 else []):
                for _ in range(50):
                    v = L.random(rng)
                    order = rng.permutation(L.dim).tolist()
                    assert np.array_equal(pmap_extend(L, v), pmap_extend(L, v, order))


def test_11_p_envelope():
    with criterion(11, "p-envelopes and semidirect splitting"):
        env = p_envelope(abelian(1, "zero", 2).plain(), 2)
        assert env.hat.dim == 3 and env.hat.labels == ["e", "e^2", "e^4"]
        assert env.monomials == [(1,), (2,), (4,)]
        assert linalg.rank(env.eta, 2) == 1 and is_lie_hom(abelian(1, "zero", 2).plain(), env.hat, env.eta)
        for p in (2, 3):
            F = FieldSpec(p)
            ab = abelian(1, "zero", F).plain()
            sp = envelope_splitting(ab, F.embed_prime(np.array([[[0, 1], [0, 0]]]))[..., 0], 1)
            assert sp.report.ok, sp.report.summary()
            H = heisenberg(F).plain()
            act = np.stack([H.ad_matrix(H.basis(i))[..., 0] for i in range(3)])
            sp = envelope_splitting(H, act, 1)
            assert sp.report.ok, sp.report.summary()
            assert sp.dims[0] == sp.dims[1] + sp.dims[2]


def test_12_comparison_maps():
    with criterion(12, "comparison maps are well defined and natural"):
        checked = 0
        for p in (2, 3):
            for ex in com_grid(p):
                for N in (1, 2):
                    c = comparison_omega_com(_eye(ex.algebra.dim), ex.algebra, ex.algebra, N)
                    checked += c.checked
            for ex in lie_grid(p):
                for N in (1, 2):
                    c = comparison_omega_lie(_eye(ex.algebra.dim), ex.algebra, ex.algebra, N)
                    checked += c.checked
        assert checked > 0
        assert naturality_com(np.eye(2, 3, dtype=np.int64), free_pdcom(1, 3, 2), free_pdcom(1, 2, 2))
        assert naturality_com(_eye(4), free_pdcom(1, 4, 3), free_pdcom(1, 4, 3))
        assert naturality_lie(np.array([[0], [0], [1]]), abelian(1, "zero", 2), heisenberg(2))
        assert naturality_lie(_eye(3), heisenberg(3), heisenberg(3))
        assert naturality_lie(_eye(3), sl2(3), sl2(3))


def test_13_coefficient_identification():
    with criterion(13, "pulled-back envelope modules match the direct action"):
        rng = np.random.default_rng(13)
        for L in (heisenberg(2).plain(), abelian(2, "zero", 3).plain(), abelian(1, "identity", 3).plain()):
            env = p_envelope(L, 1)
            hat = env.hat
            for M in (trivial_module(hat, 2), adjoint_module(hat), random_beck_lie(rng, hat.p, base=hat)):
                assert check_restricted_module(hat, M).ok
                assert coefficients_lie(env, M).equal
        for p in (2, 3):
            for g, rels, D in ((1, [[2]], 4), (2, [[1, 1]], 3)):
                env = pd_envelope(g, rels, D, p)
                A = env.envelope
                trivial = BeckModuleCom(A, 1, np.zeros((A.dim, 1, 1), dtype=np.int64), _eye(1))
                for M in (trivial, random_beck_com(rng, p, base=A)):
                    assert coefficients_com(env, M).equal
