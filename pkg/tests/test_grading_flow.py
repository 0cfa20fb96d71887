import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import pistab.grading_flow as gf
from pistab.central_charge import LiftedPhases, ModuliPath, PolynomialPeriods, lift_phases
from pistab.errors import NotClosed, NumericalFailure
from pistab.grading_flow import (MorphismRecord, Violation, abelian_violation_check, flow_along_path,
                                 flow_degree, monodromy_shift)

phase = st.floats(-4, 4, allow_nan=False)


def test_flow_degree_examples():
    assert flow_degree(3, 0.1, 0.7, 0.1, 0.7) == 3
    assert flow_degree(1, 0, 0, Fraction(3, 10), Fraction(1, 2)) == Fraction(6, 5)
    assert float(flow_degree(1, 0, 0, 0.3, 0.5)) == pytest.approx(1.2, abs=1e-15)


@given(st.integers(-5, 5), phase, phase, phase, phase)
def test_round_trip_exact(n, ke, kf, le, lf):
    there = flow_degree(n, ke, kf, le, lf)
    assert flow_degree(there, le, lf, ke, kf) == n


@given(st.integers(-5, 5), phase, phase, phase, phase, phase, phase)
def test_additive_in_intermediate_point(n, ke, kf, me, mf, le, lf):
    via = flow_degree(flow_degree(n, ke, kf, me, mf), me, mf, le, lf)
    assert via == flow_degree(n, ke, kf, le, lf)


@given(st.integers(-3, 3), st.integers(-3, 3), *[phase] * 6)
def test_composite_degrees_telescope(n1, n2, ke, kf, kg, le, lf, lg):
    # E -> F then F -> G; the F phases cancel
    assert flow_degree(n1, ke, kf, le, lf) + flow_degree(n2, kf, kg, lf, lg) == \
        flow_degree(n1 + n2, ke, kg, le, lg)


@given(st.integers(-3, 3), phase, phase, phase, st.floats(-3, 3))
def test_shift_depends_only_on_phases(n, ke, kf, le, c):
    # moving both endpoint phases of F by c shifts the degree by exactly c
    assert flow_degree(n, ke, kf, le, kf + c) - n == Fraction(kf + c) - Fraction(kf) - (Fraction(le) - Fraction(ke))


def _record(model, e, f, n, point):
    return MorphismRecord.at(e, f, n, point, model)


def test_equal_charges_constant(two_charge):
    path = ModuliPath.polyline([1j, 2 + 1j, 1 + 3j])
    trace = flow_along_path(_record(two_charge, (1, 1), (1, 1), 2, 1j), path, two_charge)
    assert set(trace.degree) == {2.0}


def test_only_target_phase_moves(two_charge):
    # Z(E) = 1, Z(F) = t on the upper half circle: phi(F) goes 0 -> 1
    arc = ModuliPath.arc(0, 1, 0, math.pi)
    trace = flow_along_path(_record(two_charge, (1, 0), (0, 1), 0, 1), arc, two_charge)
    assert trace.end_degree == pytest.approx(1, abs=1e-12)
    steps = [b - a for a, b in zip(trace.degree, trace.degree[1:])]
    assert max(abs(x) for x in steps) < 0.25


def test_concatenation(two_charge):
    p1 = ModuliPath.segment(1j, 2 + 1j)
    p2 = ModuliPath.segment(2 + 1j, -1 + 0.5j)
    rec = _record(two_charge, (1, 0), (1, 2), 0, 1j)
    first = flow_along_path(rec, p1, two_charge)
    mid = MorphismRecord(rec.source, rec.target, first.end_degree, p1.end,
                         first.phase_source[-1], first.phase_target[-1])
    second = flow_along_path(mid, p2, two_charge)
    whole = flow_along_path(rec, p1.then(p2), two_charge)
    assert whole.end_degree == pytest.approx(second.end_degree, abs=1e-12)


def test_flow_requires_matching_start(two_charge):
    with pytest.raises(ValueError):
        flow_along_path(_record(two_charge, (1, 0), (0, 1), 0, 1j), ModuliPath.segment(1, 2), two_charge)


def test_monodromy_examples(two_charge):
    assert monodromy_shift((1, 0), (0, 1), ModuliPath.circle(3, 1), two_charge) == 0
    assert monodromy_shift((1, 0), (0, 1), ModuliPath.circle(0, 1), two_charge) == 2
    assert monodromy_shift((0, 1), (1, 0), ModuliPath.circle(0, 1), two_charge) == -2
    assert monodromy_shift((0, 1), (0, 2), ModuliPath.circle(0, 1), two_charge) == 0
    with pytest.raises(NotClosed):
        monodromy_shift((1, 0), (0, 1), ModuliPath.segment(1, 2), two_charge)


def test_monodromy_additive(two_charge):
    a = ModuliPath.circle(0.5, 1)
    b = ModuliPath.circle(1.2, 0.3, turns=2)  # same base point 1.5, winds around t = 1 only
    model = PolynomialPeriods([[1], [0, 1], [-1, 0, 1]])  # Z = 1, t, t^2 - 1
    e, f = (1, 0, 0), (0, 0, 1)
    assert monodromy_shift(e, f, a.then(b), model) == \
        monodromy_shift(e, f, a, model) + monodromy_shift(e, f, b, model)


def test_monodromy_non_even_is_numerical_failure(monkeypatch, two_charge):
    def fake(charges, path, model, **kw):
        return LiftedPhases([0.0, 1.0], [1, 1], [[0.0, 0.0], [0.0, 1.0]])

    monkeypatch.setattr(gf, "lift_phases", fake)
    with pytest.raises(NumericalFailure):
        monodromy_shift((1, 0), (0, 1), ModuliPath.circle(0, 1), two_charge)


def test_violation_flags(two_charge):
    assert abelian_violation_check([(0, 0), (2, 2)]) == []
    # phi(E) rises by 0.4 along an arc, phi(F) stays at 0
    arc = ModuliPath.arc(0, 1, 0, 0.4 * math.pi)
    trace = flow_along_path(_record(two_charge, (0, 1), (1, 0), 0, 1), arc, two_charge)
    assert trace.end_degree == pytest.approx(-0.4, abs=1e-12)
    flags = abelian_violation_check([(trace.start_degree, trace.end_degree)])
    assert [f.kind for f in flags] == [Violation.NEGATIVE_DEGREE]
    # an open half circle moves phi(F) by exactly one
    half = ModuliPath.arc(0, 1, 0, math.pi)
    odd = flow_along_path(_record(two_charge, (1, 0), (0, 1), 0, 1), half, two_charge)
    flags = abelian_violation_check([(odd.start_degree, odd.end_degree)])
    assert [f.kind for f in flags] == [Violation.PARITY_FLIP]


def test_parity_needs_integral_shift():
    assert abelian_violation_check([(0, 0.9)]) == []
    assert abelian_violation_check([(0, 1 + 1e-7)])[0].kind is Violation.PARITY_FLIP
    assert abelian_violation_check([(1, -1)]) == [gf.Flag(0, Violation.NEGATIVE_DEGREE, 1, -1)]
