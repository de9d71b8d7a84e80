import random
from fractions import Fraction

import pytest

from strata_lab.fibered import LinearStratification, StratificationHypothesisError, stratify_fibered_product
from strata_lab.groups import symmetric_group_standard
from strata_lab.linalg import RationalMatrix, RationalSubspace, kernel


def hp(v):
    return kernel(RationalMatrix.from_rows([list(v)]))


AXES = LinearStratification.from_arrangement(2, [hp([1, 0]), hp([0, 1])])
LINE = LinearStratification.from_arrangement(1, [hp([1])])
PROJ = RationalMatrix.from_rows([[1, 0]])
FROM_POINT = RationalMatrix(((),), 0)


def test_axes_model():
    assert sorted(p.dim for p in AXES.pieces) == [0, 1, 1, 2]
    generic = next(p for p in AXES.pieces if p.dim == 2)
    assert generic.component_count() == 4


def test_projection_against_origin_gives_axis_strata():
    r = stratify_fibered_product(AXES, PROJ, LinearStratification.point(), FROM_POINT, LINE)
    assert sorted(p.dim for p in r.pieces) == [0, 1]
    line = next(p for p in r.pieces if p.dim == 1)
    assert line.span == RationalSubspace.coordinate(2, [1])
    assert line.component_count() == 2
    point = next(i for i, p in enumerate(r.pieces) if p.dim == 0)
    assert r.order == {(point, 1 - point)}


def test_point_fiber_is_restriction():
    # B a point over 0: the pieces of A inside the fiber f^-1(0)
    r = stratify_fibered_product(AXES, PROJ, LinearStratification.point(), FROM_POINT, LINE)
    fiber = RationalSubspace.coordinate(2, [1])
    expected = sorted((p.span & fiber).dim for p in AXES.pieces if (p.span & fiber) == p.span)
    assert sorted(p.dim for p in r.pieces) == expected


def test_identity_maps_give_diagonal_copies():
    ident = RationalMatrix.identity(1)
    r = stratify_fibered_product(LINE, ident, LINE, ident, LINE)
    assert len(r.pieces) == len(LINE.pieces)
    diag = RationalSubspace.full(2) & kernel(RationalMatrix.from_rows([[1, -1]]))
    assert all(p.span <= diag for p in r.pieces)
    assert len(r.order) == len(LINE.order)


def test_hypothesis_violation_names_piece():
    with pytest.raises(StratificationHypothesisError, match="piece flat"):
        stratify_fibered_product(AXES, PROJ, LinearStratification.point(), FROM_POINT)


def test_shape_mismatch():
    with pytest.raises(ValueError):
        stratify_fibered_product(AXES, RationalMatrix.identity(3), AXES, RationalMatrix.identity(2))


def test_plain_product_partitions_points():
    # maps to a point: the fibered product is the product of the models
    s3 = LinearStratification.from_isotropy(symmetric_group_standard())
    to_point = RationalMatrix((), 2)
    r = stratify_fibered_product(s3, to_point, AXES, to_point, LinearStratification.point())
    assert len(r.pieces) == len(s3.pieces) * len(AXES.pieces)
    rng = random.Random(4)
    for _ in range(300):
        x = [Fraction(rng.choice((0, 0, 1, -1, 2)), rng.randint(1, 3)) for _ in range(4)]
        i = r.piece_of(x)
        assert r.pieces[i].contains(x)
