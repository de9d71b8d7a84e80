"""Frozen values below were produced by the sampling oracle (distinct
direct labels over 10^4 points, scaled-approach frontier tests) before the
symbolic engine was compared against them."""

from fractions import Fraction

import networkx as nx
import pytest

from generators import SHIPPED
from strata_lab.groups import CircleWeightAction, close_generators, cyclic_group, symmetric_group_standard
from strata_lab.linalg import RationalSubspace, canonicalize
from strata_lab.spec_io import load_example
from strata_lab.strata import (
    CircleIsotropy,
    Cell,
    count_components,
    find_witness,
    inertia_strata,
    isotropy_lattice,
    loop_strata,
    simeq_classes,
    stratum_of,
    t_bullet,
)

# (group part, isotropy order, dim, components) per stratum, then Hasse edges and depths
FROZEN = {
    "z2_line": ([("0", 1, 1, 2), ("0", 2, 0, 1), ("1", 2, 0, 1)], [(1, 0)], (0, 1, 0)),
    "z4_plane": ([("0", 1, 2, 1), ("0", 4, 0, 1), ("2", 4, 0, 1), ("1", 4, 0, 1), ("3", 4, 0, 1)],
                 [(1, 0)], (0, 1, 0, 0, 0)),
    "s3_standard": ([("0", 1, 2, 6), ("0", 2, 1, 2), ("1", 2, 1, 2), ("0", 6, 0, 1), ("1", 6, 0, 1),
                     ("2", 6, 0, 1)], [(1, 0), (3, 1), (4, 2)], (0, 1, 0, 2, 1, 0)),
    "circle_1": ([("0", 1, 2, 1), ("(0,1)", None, 1, 1), ("{0}", None, 0, 1)], [(2, 0), (2, 1)], (0, 0, 1)),
    "circle_1_2": ([("0", 1, 4, 1), ("0", 2, 2, 1), ("1/2", 2, 2, 1), ("(0,1/2)", None, 1, 1),
                    ("(1/2,1)", None, 1, 1), ("{0}", None, 0, 1), ("{1/2}", None, 0, 1)],
                   [(1, 0), (5, 1), (5, 3), (5, 4), (6, 2), (6, 3), (6, 4)], (0, 1, 0, 0, 0, 2, 1)),
}


def _part(p):
    return p.label() if isinstance(p, Cell) else str(p)


@pytest.fixture(scope="module", params=SHIPPED)
def shipped(request):
    return request.param, loop_strata(load_example(request.param).action)


def test_frozen_tables(shipped):
    name, r = shipped
    rows, hasse, depths = FROZEN[name]
    assert [(_part(s.group_part), s.isotropy.order, s.dim, s.component_count) for s in r.strata] == rows
    assert list(r.hasse) == hasse
    assert r.depth == depths


def test_depth_is_longest_path(shipped):
    _, r = shipped
    g = nx.DiGraph()
    g.add_nodes_from(s.id for s in r.strata)
    g.add_edges_from(r.hasse)
    for s in r.strata:
        up = nx.descendants(g, s.id)
        sub = g.subgraph(up | {s.id})
        assert r.depth[s.id] == nx.dag_longest_path_length(sub)


def test_order_is_closure_of_hasse(shipped):
    _, r = shipped
    g = nx.DiGraph(list(r.hasse))
    g.add_nodes_from(s.id for s in r.strata)
    assert set(nx.transitive_closure_dag(g).edges()) == set(r.order)


def test_witnesses_lie_in_their_strata(shipped):
    _, r = shipped
    for s in r.strata:
        part, x = s.witness
        assert stratum_of(r, part, x) == [s.id]


def test_circle_dims():
    r = loop_strata(CircleWeightAction((1, 2)))
    for s in r.strata:
        extra = 1 if isinstance(s.group_part, Cell) and s.group_part.dim == 1 else 0
        assert s.dim == s.isotropy.fixed_space.dim + extra


def test_simeq_z4():
    g = cyclic_group(4)
    part = simeq_classes(g.whole(), g)
    sizes = sorted(len(c.members) for c in part.classes)
    assert sizes == [1, 3]
    assert sum(len(c.components) for c in part.classes) == 4


def test_simeq_circle_weight_two():
    c = CircleWeightAction((2,))
    part = simeq_classes(CircleIsotropy(None), c)
    labels = sorted(cell.label() for cls in part.classes for cell in cls.components)
    assert labels == sorted(["{0}", "{1/2}", "(0,1/2)", "(1/2,1)"])
    full = [cls for cls in part.classes if cls.fixed_space.dim == 2]
    assert len(full) == 1 and len(full[0].members) == 2


def test_simeq_trivial_group():
    g = close_generators([], dim=2)
    part = simeq_classes(g.whole(), g)
    assert len(part.classes) == 1 and len(part.classes[0].components) == 1


def test_t_bullet():
    g = cyclic_group(4)
    r = next(i for i in range(4) if g.element_order(i) == 4)
    assert t_bullet(g.whole(), 0).order == 1  # faithful: kernel is trivial
    assert t_bullet(g.whole(), r).order == 4
    c = CircleWeightAction((2,))
    # V^{1/4} = {0} is contained in every fixed space
    assert t_bullet(CircleIsotropy(None), Fraction(1, 4), c).is_circle
    assert t_bullet(CircleIsotropy(None), Fraction(1, 2), c).order == 2


def test_isotropy_lattices():
    assert sorted(e.order for e in isotropy_lattice(cyclic_group(2))) == [1, 2]
    assert sorted(e.order for e in isotropy_lattice(symmetric_group_standard())) == [1, 2, 2, 2, 6]
    circle = isotropy_lattice(CircleWeightAction((1, 2)))
    assert sorted((e.order or 0) for e in circle) == [0, 1, 2]


def test_component_counts():
    z2 = loop_strata(cyclic_group(2))
    assert count_components(z2.strata[0]) == 2
    rot = loop_strata(cyclic_group(4))
    assert count_components(rot.strata[0]) == 1  # plane minus a point


def test_inertia_examples():
    s3 = inertia_strata(loop_strata(symmetric_group_standard()))
    assert s3.strata[0].dim == 2 and s3.strata[0].component_count == 1
    c1 = inertia_strata(loop_strata(CircleWeightAction((1,))))
    assert [s.dim for s in c1.strata] == [1, 1, 0]


def test_find_witness_avoids_subspaces():
    plane = RationalSubspace.full(2)
    lines = [canonicalize([[1, k]], 2) for k in range(-5, 6)] + [canonicalize([[0, 1]], 2)]
    x = find_witness(plane, lines)
    assert not any(x in line for line in lines)
    with pytest.raises(ValueError):
        find_witness(RationalSubspace.zero(2), [RationalSubspace.zero(2)])


def test_trivial_group_single_stratum():
    r = loop_strata(close_generators([], dim=3))
    assert len(r.strata) == 1 and r.depth == (0,) and r.strata[0].component_count == 1
