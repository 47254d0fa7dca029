import math

import pytest
from hypothesis import given, strategies as st

from divpower.combinatorics import (Composition, Permutation, block_permutation, compose_split,
                                    compositions_of, coset_reps, diamond, multinomial, permute_parts, refine,
                                    shuffles, wreath_elements, young_elements)
from divpower.errors import BadSplit, ShapeMismatch

small_comps = st.lists(st.integers(0, 3), min_size=1, max_size=3).map(Composition)


@given(small_comps)
def test_shuffle_count_is_multinomial(r):
    assert len(shuffles(r)) == multinomial(r.n, r)


@given(small_comps)
def test_young_subgroup_order(r):
    assert len(young_elements(r)) == math.prod(math.factorial(x) for x in r)


@given(small_comps)
def test_shuffles_are_coset_representatives(r):
    # Σ_n = shuffles · Σ_r with unique factorization
    n = r.n
    products = {(s * y).images for s in shuffles(r) for y in young_elements(r)}
    assert len(products) == math.factorial(n)


@given(st.permutations(range(4)), st.permutations(range(4)))
def test_permutation_group_laws(a, b):
    pa, pb = Permutation(a), Permutation(b)
    assert (pa * pa.inverse()).is_identity()
    assert (pa * pb).inverse() == pb.inverse() * pa.inverse()


@given(st.lists(st.integers(0, 3), min_size=2, max_size=3), st.data())
def test_block_permutation_moves_blocks(parts, data):
    r = Composition(parts)
    rho = Permutation(data.draw(st.permutations(range(len(r)))))
    bp = block_permutation(rho, r)
    target = permute_parts(rho, r)
    for i, block in enumerate(r.blocks()):
        start = target.starts[rho(i)]
        assert [bp(j) for j in block] == list(range(start, start + r[i]))


def test_refine_diamond_and_split():
    assert refine((2, 1), (1, 2, 3)) == Composition((3, 3))
    assert diamond((2, 3), [(1, 1), (2,)]) == Composition((2, 2, 6))
    assert compose_split((3, 1), 0, 1, 2) == Composition((1, 2, 1))
    with pytest.raises(BadSplit):
        compose_split((3,), 0, 1, 1)
    with pytest.raises(ShapeMismatch):
        refine((2,), (1, 1, 1))


@pytest.mark.parametrize("layout", [[(1, 3)], [(2, 2)], [(1, 2), (2, 1)], [(3, 1), (1, 1)]])
def test_wreath_order_and_cosets(layout):
    order = math.prod(math.factorial(d) ** m * math.factorial(m) for d, m in layout)
    W = wreath_elements(layout)
    assert len(W) == order
    n = sum(d * m for d, m in layout)
    reps = coset_reps(Composition((n,)), W)
    assert len(reps) == math.factorial(n) // order


@given(st.integers(0, 6), st.integers(1, 4))
def test_compositions_count(n, k):
    comps = list(compositions_of(n, k))
    assert len(comps) == math.comb(n + k - 1, k - 1)
    assert all(c.n == n and len(c) == k for c in comps)
