import numpy as np
import pytest
from hypothesis import given, strategies as st

from mixfront.coefficients import (
    CoefficientError,
    CoefficientSet,
    PeriodicCoefficient,
    constant,
    sinusoidal,
    table,
)


def test_constant_evaluate():
    assert constant(2.0).evaluate(17.3) == 2.0


def test_sinusoidal_quarter_period():
    c = sinusoidal(1.0, 0.5, phase=0.0, period=1.0)
    assert c.evaluate(0.25) == pytest.approx(1.5, abs=1e-12)


def test_table_midpoint_interpolation():
    c = table([1.0, 3.0], period=1.0)
    assert c.evaluate(0.25) == pytest.approx(2.0, abs=1e-12)
    # wraparound leg between the last sample and the repeat of the first
    assert c.evaluate(0.75) == pytest.approx(2.0, abs=1e-12)


def test_average_constant_exact():
    assert constant(2.0).time_average() == 2.0


@pytest.mark.parametrize("phase", [0.0, 0.4, 1.1, 3.9])
def test_average_sinusoid_is_mean(phase):
    assert sinusoidal(1.0, 0.5, phase=phase).time_average() == pytest.approx(1.0, abs=1e-12)


def test_average_table_against_quadrature_oracle():
    # a(t) = 1 + 0.3 t (1 - t) sampled densely; oracle: 1e6-panel trapezoid
    ts = np.linspace(0.0, 1.0, 2001, endpoint=False)
    coeff = table(1.0 + 0.3 * ts * (1.0 - ts), period=1.0)
    tq = np.linspace(0.0, 1.0, 1_000_001)
    oracle = np.trapezoid(1.0 + 0.3 * tq * (1.0 - tq), tq)
    assert oracle == pytest.approx(1.05, abs=1e-9)
    assert coeff.time_average() == pytest.approx(oracle, abs=1e-7)


@pytest.mark.parametrize("coeff", [
    constant(2.0, period=0.7),
    sinusoidal(1.0, 0.5, phase=0.3, period=0.7),
])
def test_periodicity_analytic_forms(coeff):
    for t in (0.0, 0.13, 0.51):
        for n in range(1, 6):
            assert coeff.evaluate(t + n * coeff.period) == pytest.approx(
                coeff.evaluate(t), abs=1e-12)


def test_periodicity_table():
    coeff = table([1.0, 2.0, 1.5, 3.0], period=2.0)
    for t in (0.1, 0.77, 1.9):
        assert coeff.evaluate(t + 2.0) == pytest.approx(coeff.evaluate(t), abs=1e-9)


def test_phase_shift_invariance_of_average():
    averages = [sinusoidal(1.3, 0.6, phase=p).time_average() for p in (0.0, 0.7, 2.2)]
    assert max(averages) - min(averages) <= 1e-12


def test_sinusoidal_rejects_amplitude_at_mean():
    with pytest.raises(CoefficientError):
        sinusoidal(1.0, 1.0)


def test_table_rejects_nonpositive_values():
    with pytest.raises(CoefficientError):
        table([1.0, 0.0, 2.0])


def test_coefficient_set_requires_shared_period():
    a = constant(1.0, period=1.0)
    bad = constant(1.0, period=2.0)
    with pytest.raises(CoefficientError):
        CoefficientSet(a=a, b=a, c=a, d=bad)


def test_round_trip_dicts():
    for coeff in (constant(2.0), sinusoidal(1.0, 0.3, phase=0.2), table([1.0, 2.0])):
        clone = PeriodicCoefficient.from_dict(coeff.to_dict())
        assert clone.to_dict() == coeff.to_dict()
        assert clone.evaluate(0.37) == pytest.approx(coeff.evaluate(0.37), abs=1e-15)


@given(
    mean=st.floats(0.1, 10.0),
    ratio=st.floats(0.0, 0.95),
    phase=st.floats(0.0, 6.3),
    t=st.floats(-50.0, 50.0),
)
def test_sinusoid_positive_everywhere(mean, ratio, phase, t):
    coeff = sinusoidal(mean, ratio * mean, phase=phase)
    assert coeff.evaluate(t) > 0.0


@given(st.lists(st.floats(0.1, 5.0), min_size=2, max_size=30), st.floats(0.0, 3.0))
def test_table_evaluate_within_range(values, t):
    coeff = table(values, period=1.0)
    val = coeff.evaluate(t)
    assert min(values) - 1e-12 <= val <= max(values) + 1e-12
