import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import random_triple
from strata_lab.groupoids import (
    FiniteGroupTable,
    FiniteGroupoid,
    GroupoidMorphism,
    compose_morphisms,
    find_isomorphism,
    full_subgroupoid,
    identity_morphism,
    inertia_groupoid,
    loop_space,
    morita_check,
    one_object,
    orbit_signature,
    orbits,
    pair_groupoid,
    pullback_groupoid,
    relabel,
    translation_groupoid,
    validate,
    validate_morphism,
    weak_equivalence_check,
)

Z2 = FiniteGroupTable.cyclic(2)
S3 = FiniteGroupTable.symmetric(3)
SWAP = [[0, 1], [1, 0]]  # action[x][g]


def test_axioms_hold_for_standard_constructions():
    assert validate(pair_groupoid(3)).valid
    assert validate(one_object(S3)).valid
    assert validate(translation_groupoid(Z2, SWAP)).valid


def test_associativity_defect_is_named():
    g = one_object(FiniteGroupTable.cyclic(4))
    mul = dict(g.mul)
    mul[(1, 2)] = 0
    broken = FiniteGroupoid(g.n_objects, g.src, g.tgt, g.unit, g.inv, mul)
    report = validate(broken)
    assert not report.valid
    assert all(v.startswith("associativity fails for triple") for v in report.violations)
    assert any("(1, 2," in v or ", 1, 2)" in v for v in report.violations)


def test_invalid_action_table():
    with pytest.raises(ValueError):
        translation_groupoid(Z2, [[1, 0], [0, 1]])  # identity moves points
    with pytest.raises(ValueError):
        translation_groupoid(Z2, [[0, 1]])  # wrong arity for a 2-point set


def test_translation_examples():
    g = translation_groupoid(Z2)
    assert (g.n_objects, g.n_arrows) == (1, 2)
    free = translation_groupoid(Z2, SWAP)
    assert free.n_arrows == 4 and len(orbits(free)) == 1
    regular = translation_groupoid(S3, [[S3.mul[g][x] for g in range(6)] for x in range(6)])
    assert len(orbits(regular)) == 1
    assert all(len(regular.isotropy(x)) == 1 for x in range(6))


def test_loop_space_examples():
    assert sorted(loop_space(pair_groupoid(4))) == sorted(pair_groupoid(4).unit)
    assert len(loop_space(one_object(S3))) == 6
    free = translation_groupoid(Z2, SWAP)
    assert sorted(loop_space(free)) == sorted(free.unit)


def test_inertia_examples():
    assert len(orbits(inertia_groupoid(one_object(S3)))) == 3
    assert len(orbits(inertia_groupoid(pair_groupoid(3)))) == 1
    assert len(orbits(inertia_groupoid(translation_groupoid(Z2, SWAP)))) == 1


def test_pullback_examples():
    g = translation_groupoid(S3, [[0] * 6])
    same = pullback_groupoid(g, [0])
    assert find_isomorphism(same, g) not in (None, False)
    free = translation_groupoid(Z2, SWAP)
    doubled = pullback_groupoid(free, [0, 0, 1, 1])
    assert doubled.n_arrows == 4 * free.n_arrows
    partial = pullback_groupoid(translation_groupoid(Z2, [[0, 0], [1, 1]]), [0])
    assert validate(partial).valid and len(orbits(partial)) == 1


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40)
def test_pullback_counting_formula(seed):
    g, f = random_triple(random.Random(seed))
    fibre = Counter(f)
    expected = sum(fibre[g.tgt[a]] * fibre[g.src[a]] for a in range(g.n_arrows))
    gy = pullback_groupoid(g, f)
    assert gy.n_arrows == expected
    assert validate(gy).valid


@given(st.integers(0, 10 ** 6))
@settings(max_examples=40)
def test_inertia_is_valid_and_orbits_match(seed):
    g, f = random_triple(random.Random(seed))
    assert validate(inertia_groupoid(g)).valid
    assert len(orbits(pullback_groupoid(g, f))) == len(orbits(g))


def test_morita_examples():
    trivial = one_object(FiniteGroupTable.cyclic(1))
    free = translation_groupoid(Z2, SWAP)
    v = morita_check(trivial, free, [0, 0], [0, 1])
    assert v.verdict == "morita_equivalent"
    # a one-object Z/2 has isotropy Z/2, the free action has trivial isotropy
    assert morita_check(one_object(Z2), free, [0, 0], [0, 1]).verdict == "not_isomorphic"
    assert morita_check(trivial, one_object(Z2), [0], [0]).verdict == "not_isomorphic"
    assert morita_check(trivial, free, [0, 0], [0, 0]).verdict == "not_surjective"


def test_morita_z2_against_s3_on_three_points():
    # S3 acting on {1, 2, 3}: one orbit, isotropy Z/2
    g = translation_groupoid(S3, _s3_on_points())
    v = morita_check(one_object(Z2), g, [0, 0, 0], [0, 1, 2])
    assert v.verdict == "morita_equivalent"


def _s3_on_points():
    # S3 on the cosets of a subgroup of order 2
    t = next(g for g in range(6) if g != S3.identity and S3.mul[g][g] == S3.identity)
    sub = {S3.identity, t}
    cosets = []
    for a in range(6):
        c = frozenset(S3.mul[a][h] for h in sub)
        if c not in cosets:
            cosets.append(c)
    return [[next(i for i, d in enumerate(cosets) if S3.mul[g][min(c)] in d) for g in range(6)] for c in cosets]


def test_morita_budget_is_honest():
    g = translation_groupoid(S3, _s3_on_points())
    v = morita_check(g, g, [0, 1, 2], [2, 1, 0], budget=1)
    assert v.verdict == "undecided"


def test_morita_implies_matching_signatures():
    rng = random.Random(12)
    for _ in range(10):
        g, f = random_triple(rng)
        n = g.n_objects
        perm = list(range(n))
        rng.shuffle(perm)
        arr = list(range(g.n_arrows))
        rng.shuffle(arr)
        h, _ = relabel(g, perm, arr)
        v = morita_check(g, h, list(range(n)), list(range(n)))
        assert v.verdict == "morita_equivalent"
        assert sorted(k for _, k in orbit_signature(g)) == sorted(k for _, k in orbit_signature(h))


def test_weak_equivalence_examples():
    g = translation_groupoid(S3, _s3_on_points())
    assert weak_equivalence_check(identity_morphism(g)).verdict == "weak_equivalence"
    assert weak_equivalence_check(full_subgroupoid(g, [1])).verdict == "weak_equivalence"
    two = translation_groupoid(Z2, [[0, 0], [1, 1]])
    const = GroupoidMorphism(one_object(FiniteGroupTable.cyclic(1)), two, (0,), (two.unit[0],))
    assert validate_morphism(const).valid
    v = weak_equivalence_check(const)
    assert v.verdict == "not_essentially_surjective"
    # the trivial group into one-object Z/2 is not full
    ff = GroupoidMorphism(one_object(FiniteGroupTable.cyclic(1)), one_object(Z2), (0,), (0,))
    assert weak_equivalence_check(ff).verdict == "not_fully_faithful"


@given(st.integers(0, 10 ** 6))
@settings(max_examples=30)
def test_weak_equivalence_invariant_under_isomorphisms(seed):
    rng = random.Random(seed)
    g, _ = random_triple(rng)
    reps = [o[0] for o in orbits(g)]
    incl = full_subgroupoid(g, reps)
    perm = list(range(g.n_objects))
    rng.shuffle(perm)
    arr = list(range(g.n_arrows))
    rng.shuffle(arr)
    _, iso = relabel(g, perm, arr)
    moved = compose_morphisms(incl, iso)
    assert validate_morphism(moved).valid
    assert weak_equivalence_check(moved).verdict == weak_equivalence_check(incl).verdict == "weak_equivalence"
    # dropping an orbit representative breaks essential surjectivity
    if len(reps) > 1:
        assert not weak_equivalence_check(full_subgroupoid(g, reps[1:])).essentially_surjective
