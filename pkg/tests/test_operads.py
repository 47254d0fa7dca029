import math

import numpy as np
import pytest

from divpower.combinatorics import Permutation
from divpower.operads import invariants_subspace, lie_fp_element, operad_com, operad_lie


@pytest.mark.parametrize("p", [2, 3])
def test_dimensions(p):
    assert [operad_com(5, p).dim(n) for n in range(1, 6)] == [1] * 5
    assert [operad_lie(4, p).dim(n) for n in range(1, 5)] == [math.factorial(n - 1) for n in range(1, 5)]


@pytest.mark.parametrize("make,p", [(operad_com, 2), (operad_com, 3), (operad_lie, 2), (operad_lie, 3)])
def test_operad_axioms(make, p):
    res = make(4, p).check_axioms()
    assert res["ok"], res["failures"][:3]
    assert res["checked"] > 0


def test_lie_bracket_is_antisymmetric():
    for p in (2, 3):
        P = operad_lie(2, p)
        b = P.unit() if P.dim(2) == 0 else np.array([1])
        swapped = P.act(Permutation((1, 0)), b)
        assert np.array_equal(swapped, (-b) % p)


def test_invariant_dimensions():
    # the bracket is invariant exactly when the sign is trivial
    assert invariants_subspace(operad_lie(2, 2), 2).shape[0] == 1
    assert invariants_subspace(operad_lie(2, 3), 2).shape[0] == 0
    for p in (2, 3):
        assert invariants_subspace(operad_com(4, p), 4).shape[0] == 1


@pytest.mark.parametrize("p", [2, 3])
def test_lie_fp_element_is_invariant_and_nonzero(p):
    P = operad_lie(p, p)
    x = lie_fp_element(p, P)
    assert np.any(x)
    assert P.is_invariant(p, (p,), x)
