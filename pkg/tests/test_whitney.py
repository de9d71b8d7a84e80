from fractions import Fraction

import pytest

from strata_lab.forms import parse_form
from strata_lab.groups import CircleWeightAction, cyclic_group, symmetric_group_standard
from strata_lab.strata import loop_strata
from strata_lab.whitney import (
    InvarianceError,
    InvariantMap,
    NotIncidentError,
    ProbeConfig,
    _report,
    incident_pairs,
    probe_quotient_whitney,
    probe_whitney_b,
    report_json,
)

SHORT = tuple(Fraction(1, 2 ** i) for i in range(1, 9))


def inv(*texts, n):
    return InvariantMap(tuple(parse_form(t, n=n) for t in texts))


@pytest.mark.parametrize("kwargs", [
    {"scales": (Fraction(1, 4), Fraction(1, 2))},
    {"scales": ()},
    {"scales": (Fraction(1), Fraction(0))},
    {"angle_tolerance": 0.0},
    {"samples_per_scale": 0},
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        ProbeConfig(base=1, upper=0, **kwargs)


def test_not_incident():
    r = loop_strata(symmetric_group_standard())
    for base, upper in [(0, 1), (1, 1), (0, 99), (5, 0)]:
        with pytest.raises(NotIncidentError):
            probe_whitney_b(r, ProbeConfig(base=base, upper=upper, scales=SHORT))


def test_invariance_is_checked_exactly():
    z2 = cyclic_group(2)
    with pytest.raises(InvarianceError, match="element"):
        inv("x", n=1).verify(z2)
    with pytest.raises(InvarianceError, match="polynomial"):
        inv("x dx", n=1).verify(z2)
    with pytest.raises(InvarianceError, match="polynomial"):
        inv("x^2", n=2).verify(z2)
    circle = CircleWeightAction((1,))
    inv("x^2 + y^2", n=2).verify(circle)
    with pytest.raises(InvarianceError, match="circle"):
        inv("x^2", n=2).verify(circle)


def test_invariant_map_value_and_jacobian():
    m = inv("x^2 + y^2", "x y", n=2)
    assert m.value((Fraction(1), Fraction(2))) == (5, 2)
    assert m.jacobian((Fraction(1), Fraction(2))) == [(2, 4), (2, 1)]


@pytest.mark.parametrize("action", [cyclic_group(4), symmetric_group_standard(), CircleWeightAction((1, 2))],
                         ids=["z4", "s3", "circle12"])
def test_linear_strata_pass(action):
    r = loop_strata(action)
    for base, upper in incident_pairs(r):
        rep = probe_whitney_b(r, ProbeConfig(base=base, upper=upper, scales=SHORT, samples_per_scale=8))
        assert rep["verdict"] == "pass" and rep["trend"] == "flat"


def test_quotient_probe_for_circle():
    r = loop_strata(CircleWeightAction((1,)))
    base, upper = incident_pairs(r)[0]
    rep = probe_quotient_whitney(r, inv("x^2 + y^2", n=2),
                                 ProbeConfig(base=base, upper=upper, scales=SHORT, samples_per_scale=8))
    assert rep["probe"] == "quotient-whitney-b"
    assert rep["invariants"] == ["x^2 + y^2"]
    assert rep["verdict"] == "pass"


def test_reports_are_reproducible():
    r = loop_strata(symmetric_group_standard())
    cfg = ProbeConfig(base=3, upper=1, scales=SHORT, samples_per_scale=4, seed=7)
    assert report_json(probe_whitney_b(r, cfg)) == report_json(probe_whitney_b(r, cfg))
    q = inv("x^2 + y^2", n=2)
    a = probe_quotient_whitney(loop_strata(CircleWeightAction((1,))), q,
                               ProbeConfig(base=2, upper=0, scales=SHORT, samples_per_scale=4, seed=7))
    b = probe_quotient_whitney(loop_strata(CircleWeightAction((1,))), q,
                               ProbeConfig(base=2, upper=0, scales=SHORT, samples_per_scale=4, seed=7))
    assert report_json(a) == report_json(b)


def test_verdict_logic():
    cfg = ProbeConfig(base=1, upper=0, angle_tolerance=1e-6)
    big = [{"scale": "1/2", "samples": 1, "max_angle": a} for a in (0.5, 0.4, 0.3)]
    rep = _report("whitney-b", cfg, big)
    assert rep["verdict"] == "no numerical evidence" and rep["trend"] == "decreasing"
    empty = [{"scale": "1/2", "samples": 0, "max_angle": None}]
    assert _report("whitney-b", cfg, empty)["verdict"] == "no numerical evidence"
    noisy = [{"scale": "1/2", "samples": 1, "max_angle": a} for a in (0.1, 0.3, 0.2)]
    assert _report("whitney-b", cfg, noisy)["trend"] == "undetermined"
