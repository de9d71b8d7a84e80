import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import random_finite_group
from strata_lab.groups import (
    CircleWeightAction,
    GroupTooLarge,
    cartan_associated,
    centralizer,
    close_generators,
    conjugacy_classes,
    cyclic_group,
    generated_subgroup,
    normalizer,
    symmetric_group_standard,
)
from strata_lab.linalg import DimensionError, RationalMatrix

seeds = st.integers(0, 10 ** 6)


@given(seeds)
@settings(max_examples=40)
def test_multiplication_table_matches_matrices(seed):
    g = random_finite_group(random.Random(seed), max_dim=4, max_order=24)
    for a in range(g.order):
        assert g.elements[g.inv_table[a]] @ g.elements[a] == RationalMatrix.identity(g.ambient_dim)
        for b in range(g.order):
            assert g.elements[g.mul(a, b)] == g.elements[a] @ g.elements[b]


def test_small_groups():
    assert cyclic_group(4).order == 4
    assert cyclic_group(6).order == 6
    s3 = symmetric_group_standard()
    assert s3.order == 6
    assert sorted(len(c) for c in conjugacy_classes(s3)) == [1, 2, 3]
    with pytest.raises(ValueError):
        cyclic_group(5)


def test_infinite_group_hits_cap():
    shear = [[1, 1], [0, 1]]
    with pytest.raises(GroupTooLarge):
        close_generators([shear], cap=50)


def test_bad_generators():
    with pytest.raises(ValueError):
        close_generators([[[1, 0], [0, 0]]])
    with pytest.raises(ValueError):
        close_generators([[[1, 0], [0, 1]], [[1]]])
    with pytest.raises(DimensionError):
        close_generators([], dim=17)


@given(seeds)
@settings(max_examples=40)
def test_stabilizer_matches_brute_force(seed):
    rng = random.Random(seed)
    g = random_finite_group(rng, max_dim=4, max_order=24)
    for _ in range(10):
        x = [Fraction(rng.choice((0, 0, 1, -1, 2)), rng.randint(1, 3)) for _ in range(g.ambient_dim)]
        direct = tuple(i for i in range(g.order) if g.elements[i].apply(tuple(x)) == tuple(x))
        assert tuple(sorted(g.stabilizer(x).members)) == direct


@given(seeds)
@settings(max_examples=30)
def test_centralizer_normalizer_cartan(seed):
    rng = random.Random(seed)
    g = random_finite_group(rng, max_dim=4, max_order=24)
    h = rng.randrange(g.order)
    c = centralizer(g, h)
    assert c.is_closed() and h in c.member_set
    cart = cartan_associated(g, h)
    assert cart.member_set == generated_subgroup(g, [h]).member_set
    assert cart.is_abelian()
    n = normalizer(g, cart)
    assert cart.issubgroup(n) and c.issubgroup(n)


def test_conjugacy_classes_partition():
    g = close_generators([[[0, 1, 0], [0, 0, 1], [1, 0, 0]], [[0, 1, 0], [1, 0, 0], [0, 0, -1]]])
    classes = conjugacy_classes(g)
    flat = sorted(x for c in classes for x in c)
    assert flat == list(range(g.order))
    assert sum(len(c) for c in classes) == g.order


def test_conjugated_group_keeps_indices():
    s3 = symmetric_group_standard()
    p = RationalMatrix.from_rows([[2, 1], [1, 1]])
    t = s3.conjugated(p)
    assert t.mul_table == s3.mul_table
    assert all(t.fixed_spaces[i].dim == s3.fixed_spaces[i].dim for i in range(6))


def test_circle_isotropy():
    c = CircleWeightAction((1, 2), 1)
    assert c.ambient_dim == 5
    assert c.isotropy_order((0, 0, 1, 0, 3)) == 2
    assert c.isotropy_order((1, 0, 0, 0, 0)) == 1
    assert c.isotropy_order((0, 0, 0, 0, 7)) is None
    assert c.fixed_space(Fraction(1, 2)).dim == 3
    assert c.fixed_space(Fraction(1, 3)).dim == 1
    with pytest.raises(ValueError):
        CircleWeightAction((0,))
    with pytest.raises(DimensionError):
        CircleWeightAction((1,) * 9)
