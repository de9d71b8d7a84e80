import dataclasses
import random
from fractions import Fraction

import pytest

from strata_lab.groups import CircleWeightAction, symmetric_group_standard
from strata_lab.oracle import (
    Classifier,
    check_frontier,
    check_frontier_claims,
    check_local_contractibility,
    check_partition,
    closure_from_hasse,
    sample_loop_points,
    sampled_approach,
)
from strata_lab.spec_io import load_example
from strata_lab.strata import loop_strata


@pytest.fixture(scope="module")
def s3():
    return loop_strata(symmetric_group_standard())


@pytest.mark.parametrize("name", ["z2_line", "circle_1"])
def test_suites_pass_on_examples(name):
    r = loop_strata(load_example(name).action)
    assert check_partition(r, samples=2000, seed=3).passed
    assert check_frontier(r, seed=3).passed
    assert check_local_contractibility(r, samples=100, seed=3).passed


def test_dropped_relation_is_caught(s3):
    edge = next(iter(s3.order))
    broken = dataclasses.replace(s3, order=s3.order - {edge})
    report = check_frontier(broken)
    assert not report.passed
    assert any(c.get("lower") == edge[0] and c.get("upper") == edge[1] for c in report.counterexamples)


def test_false_relation_is_caught(s3):
    # (rho, S3) is isolated: nothing of the generic stratum approaches it
    rho = next(s.id for s in s3.strata if s.isotropy.order == 6 and s3.action.element_order(s.group_part) == 3)
    broken = dataclasses.replace(s3, order=s3.order | {(rho, 0)})
    assert not check_frontier(broken).passed


def test_claims_against_sampling(s3):
    assert check_frontier_claims(s3, set(s3.order)).passed
    assert not check_frontier_claims(s3, set()).passed


def test_missing_stratum_is_caught(s3):
    broken = dataclasses.replace(s3, strata=s3.strata[:-1])
    report = check_partition(broken, samples=500)
    assert not report.passed and any(c.get("hits") == [] for c in report.counterexamples)


def test_swapped_witness_is_caught(s3):
    strata = list(s3.strata)
    strata[1] = dataclasses.replace(strata[1], witness=strata[2].witness)
    assert not check_partition(dataclasses.replace(s3, strata=strata), samples=500).passed


def test_corrupted_circle_isotropy_is_caught():
    r = loop_strata(CircleWeightAction((1, 2)))
    strata = list(r.strata)
    strata[1] = dataclasses.replace(strata[1], isotropy=strata[0].isotropy)
    assert not check_partition(dataclasses.replace(r, strata=strata), samples=500).passed


def test_counterexamples_are_capped(s3):
    report = check_partition(dataclasses.replace(s3, strata=s3.strata[:1]), samples=500)
    assert len(report.to_json()["counterexamples"]) <= 10


def test_classifier_rejects_non_loops():
    g = symmetric_group_standard()
    rho = next(h for h in range(g.order) if g.element_order(h) == 3)
    with pytest.raises(ValueError):
        Classifier(g).label(rho, (Fraction(1), Fraction(2)))
    circle = Classifier(CircleWeightAction((1,)))
    with pytest.raises(ValueError):
        circle.label(Fraction(1, 3), (Fraction(1), Fraction(0)))


def test_samples_are_loops():
    rng = random.Random(0)
    for action in (symmetric_group_standard(), CircleWeightAction((1, 2), 1)):
        cls = Classifier(action)
        for part, x in sample_loop_points(action, 300, rng):
            cls.label(part, x)


def test_sampled_approach_distance(s3):
    p, q = s3.strata[3], s3.strata[0]
    found, best = sampled_approach(s3, p, q)
    assert found and best < 1e-3
    found, best = sampled_approach(s3, s3.strata[5], q)
    assert not found


def test_closure_from_hasse():
    assert closure_from_hasse(4, [(0, 1), (1, 2)]) == {(0, 1), (1, 2), (0, 2)}
