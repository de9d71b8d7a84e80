import itertools
import random

from hypothesis import given, settings
from hypothesis import strategies as st

from strata_lab.arrangements import (
    chambers_by_sign_vectors,
    count_regions,
    intersection_poset,
    strictly_feasible,
)
from strata_lab.linalg import RationalMatrix, RationalSubspace, canonicalize, kernel


def hp(v):
    return kernel(RationalMatrix.from_rows([list(v)]))


def test_textbook_counts():
    full2 = RationalSubspace.full(2)
    assert count_regions(RationalSubspace.full(1), [hp([1])]) == 2
    assert count_regions(full2, [hp([1, 0]), hp([0, 1]), hp([1, -1])]) == 6
    # the braid arrangement in Q^3 has 3! chambers
    braid = [hp(v) for v in ([1, -1, 0], [0, 1, -1], [1, 0, -1])]
    assert count_regions(RationalSubspace.full(3), braid) == 6
    # coordinate hyperplanes in Q^4: 2^4 orthants
    coords = [hp(v) for v in itertools.permutations([1, 0, 0, 0])]
    assert count_regions(RationalSubspace.full(4), coords) == 16


def test_generic_arrangement_formula():
    # m generic hyperplanes through 0 in Q^3: 2 * (1 + (m - 1) + C(m - 1, 2))
    normals = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1], [1, 2, 3]]
    for m in range(1, 6):
        expected = 2 * (1 + (m - 1) + (m - 1) * (m - 2) // 2)
        assert count_regions(RationalSubspace.full(3), [hp(v) for v in normals[:m]]) == expected


def test_restriction_to_subspace():
    plane = canonicalize([[1, 0, 0], [0, 1, 0]], 3)
    assert count_regions(plane, [hp([1, 0, 0]), hp([1, 0, 1])]) == 2
    assert count_regions(plane, [hp([0, 0, 1])]) == 0


def test_poset_cap():
    normals = [v for v in itertools.product((0, 1, -1), repeat=3) if any(v)][:8]
    assert intersection_poset(RationalSubspace.full(3), [hp(v) for v in normals], cap=3) is None
    assert count_regions(RationalSubspace.full(3), [hp(v) for v in normals], cap=3) is None


def test_feasibility():
    assert strictly_feasible([(1, 0), (0, 1)], 2)
    assert not strictly_feasible([(1, 0), (-1, 0)], 2)
    assert not strictly_feasible([(1, 1), (-1, 0), (0, -1)], 2)


@given(st.integers(0, 10 ** 6))
@settings(max_examples=60)
def test_zaslavsky_matches_sign_vectors(seed):
    rng = random.Random(seed)
    d = rng.randint(1, 4)
    m = rng.randint(0, 6)
    hs = [hp([rng.randint(-2, 2) for _ in range(d)] or [1]) for _ in range(m)]
    hs = [h for h in hs if h.dim == d - 1]
    ambient = RationalSubspace.full(d)
    assert count_regions(ambient, hs) == chambers_by_sign_vectors(ambient, hs)
