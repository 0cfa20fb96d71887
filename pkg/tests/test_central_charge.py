import cmath
import math
import random

import pytest
from hypothesis import assume, given, settings, strategies as st

from pistab.central_charge import (FunctionPeriods, ModuliPath, PolynomialPeriods, TabulatedPeriods,
                                   bps_mass_bound, central_charge, large_volume_periods, lift_phase,
                                   lift_phases, phase_of, phase_principal, winding_number)
from pistab.errors import DomainError, MasslessCharge, RefinementExhausted, StructureError

charges = st.lists(st.integers(-5, 5), min_size=2, max_size=2)
points = st.complex_numbers(max_magnitude=4, allow_nan=False, allow_infinity=False)


def test_pairing_examples(two_charge):
    assert central_charge((1, 0), 3 - 2j, two_charge) == 1
    assert central_charge((0, 1), 1j, two_charge) == 1j


def test_rank_mismatch(two_charge):
    with pytest.raises(StructureError):
        central_charge((1, 0, 0), 0, two_charge)


@given(charges, charges, points)
def test_linear_in_charge(q1, q2, t):
    model = PolynomialPeriods([[1, 2j], [0.5, -1, 1j]])
    z = central_charge([a + b for a, b in zip(q1, q2)], t, model)
    assert z == pytest.approx(central_charge(q1, t, model) + central_charge(q2, t, model), abs=1e-9)


def test_principal_phase_examples():
    assert phase_of(1) == 0
    assert phase_of(1j) == 0.5
    assert phase_of(-1) == 1
    assert phase_of(-1j) == 1.5
    with pytest.raises(MasslessCharge):
        phase_of(1e-13)


@given(charges, points)
def test_negation_shifts_phase_by_one(q, t):
    two_charge = PolynomialPeriods([[1], [0, 1]])
    z = central_charge(q, t, two_charge)
    assume(abs(z) > 1e-6)
    a = phase_principal(q, t, two_charge)
    b = phase_principal([-x for x in q], t, two_charge)
    d = (b - a) % 2
    assert min(abs(d - 1), abs(d + 1)) < 1e-9


def test_mass_bound(two_charge):
    assert bps_mass_bound((0, 0), 1j, two_charge) == 0
    rng = random.Random(3)
    for _ in range(200):
        q1 = [rng.randint(-4, 4) for _ in range(2)]
        q2 = [rng.randint(-4, 4) for _ in range(2)]
        t = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        total = [a + b for a, b in zip(q1, q2)]
        assert bps_mass_bound(total, t, two_charge) <= \
            bps_mass_bound(q1, t, two_charge) + bps_mass_bound(q2, t, two_charge) + 1e-12


def test_triangle_equality_for_collinear(two_charge):
    t = 0.7
    assert bps_mass_bound((3, 2), t, two_charge) == pytest.approx(
        bps_mass_bound((1, 0), t, two_charge) + bps_mass_bound((2, 2), t, two_charge), abs=1e-12)


def test_lift_along_half_circle():
    model = PolynomialPeriods([[0, 1]])
    lifted = lift_phase((1,), ModuliPath.arc(0, 1, 0, math.pi), model)
    assert lifted.phases[0][0] == 0
    assert lifted.phases[0][-1] == pytest.approx(1, abs=1e-12)
    for s, phi in zip(lifted.s, lifted.phases[0]):
        assert phi == pytest.approx(s, abs=1e-12)
    steps = [b - a for a, b in zip(lifted.phases[0], lifted.phases[0][1:])]
    assert max(abs(x) for x in steps) < 0.25


def test_loop_around_zero():
    model = PolynomialPeriods([[-1, 1]])
    lifted = lift_phase((1,), ModuliPath.circle(1, 0.5), model)
    assert lifted.delta() == pytest.approx(2, abs=1e-9)
    assert lift_phase((1,), ModuliPath.circle(1, 0.5, turns=-2), model).delta() == pytest.approx(-4, abs=1e-9)


def test_constant_path():
    model = PolynomialPeriods([[1], [0, 1]])
    lifted = lift_phase((1, 1), ModuliPath.segment(2j, 2j), model)
    assert set(lifted.phases[0]) == {lifted.phases[0][0]}


def test_fast_winding_is_refined():
    # Z = t^12 winds 12 times on the unit circle; the uniform grid is too coarse
    model = PolynomialPeriods([[0] * 12 + [1]])
    lifted = lift_phase((1,), ModuliPath.circle(0, 1), model, samples=8)
    assert lifted.delta() == pytest.approx(24, abs=1e-9)
    assert len(lifted.s) > 8


def test_through_zero_fails():
    model = PolynomialPeriods([[0, 1]])
    with pytest.raises((MasslessCharge, RefinementExhausted)):
        lift_phase((1,), ModuliPath.segment(-1, 1), model)


def test_start_value_must_be_a_lift():
    model = PolynomialPeriods([[0, 1]])
    path = ModuliPath.arc(0, 1, 0, 1)
    assert lift_phase((1,), path, model, start=4.0).phases[0][0] == 4.0
    with pytest.raises(ValueError):
        lift_phase((1,), path, model, start=0.5)


@st.composite
def random_paths(draw):
    pts = [draw(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)) for _ in range(4)]
    return ModuliPath.polyline(pts)


@settings(max_examples=40, deadline=None)
@given(random_paths(), charges)
def test_lift_mod_two_and_reversal(path, q):
    model = PolynomialPeriods([[1, 0.3j], [0, 1, 0.2]])
    try:
        fwd = lift_phase(q, path, model)
    except (MasslessCharge, RefinementExhausted):
        assume(False)
    for t, phi in zip(fwd.t, fwd.phases[0]):
        p = phase_principal(q, t, model)
        d = (phi - p) % 2
        assert min(d, 2 - d) < 1e-9
    back = lift_phase(q, path.reversed(), model, start=fwd.phases[0][-1])
    assert back.phases[0][-1] == pytest.approx(fwd.phases[0][0], abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
       st.floats(0.1, 3), st.integers(-2, 2))
def test_monodromy_matches_winding_count(center, radius, turns):
    model = PolynomialPeriods([[0.5j, 0, 1]])  # zeros at +-(1 - i)/2
    path = ModuliPath.circle(center, radius, turns)
    try:
        lifted = lift_phase((1,), path, model)
    except (MasslessCharge, RefinementExhausted):
        assume(False)
    zs = [central_charge((1,), t, model) for t in lifted.t]
    assert lifted.delta() == pytest.approx(2 * winding_number(zs), abs=1e-9)


def test_shared_grid_for_several_charges(two_charge):
    lifted = lift_phases([(1, 0), (0, 1), (1, 1)], ModuliPath.circle(0, 2), two_charge)
    assert len(lifted.phases) == 3
    assert [round(lifted.delta(k), 9) for k in range(3)] == [0, 2, 2]


def test_tabulated_model():
    model = TabulatedPeriods([(0, [1, 0]), (1, [1, 2j])])
    assert model(0.5) == [1, 1j]
    with pytest.raises(DomainError):
        model(1.5)
    lifted = lift_phase((0, 1), ModuliPath.segment(0.25, 1), model)
    assert lifted.phases[0][-1] == pytest.approx(0.5)


def test_function_model_and_preset():
    model = FunctionPeriods(lambda t: [1, cmath.exp(t)], 2)
    assert central_charge((0, 1), 0, model) == 1
    lv = large_volume_periods()
    assert lv(2j) == [1, 2j, -2]
