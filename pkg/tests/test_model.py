import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gravwave.errors import InvalidParameterError, NoPlusRootError
from gravwave.model import (Parameters, Regime, admissibility_condition, admissibility_condition_arccos,
                            assess, classify_regime, critical_B, sample_region)

from conftest import bisect


def test_regimes():
    assert classify_regime(Parameters(6, 2)).regime is Regime.SUBCRITICAL
    assert classify_regime(Parameters(3, 2)).regime is Regime.CRITICAL
    assert classify_regime(Parameters(1, 1)).regime is Regime.SUPERCRITICAL
    assert critical_B(6) == pytest.approx(2 * 2**1.5, abs=1e-14)


@pytest.mark.parametrize("A,B", [(0, 1), (1, -1), (math.nan, 1), (1, math.inf)])
def test_bad_parameters(A, B):
    with pytest.raises(InvalidParameterError):
        Parameters(A, B)


def _condition_oracle(A, B):
    # Y+ as the largest root of p(Y) = A Y^2 - B Y^3 - 1, bracketed on [2A/3B, A/B]
    Y = bisect(lambda y: A * y * y - B * y**3 - 1.0, 2 * A / (3 * B), A / B)
    return 4 * math.pi * (A / B - Y) / math.tanh(2 * math.pi * Y)


@pytest.mark.parametrize("A,B,expected", [
    (6, 2, 0.725810306714562),
    (3, 1, 1.5156897559699514),
    (4, 4 / 3, 1.1118086723925948),
    (5, 5 / 3, 0.8781964562446049),
])
def test_condition_values(A, B, expected):
    assert _condition_oracle(A, B) == pytest.approx(expected, abs=1e-12)
    assert admissibility_condition(Parameters(A, B)) == pytest.approx(expected, abs=1e-10)


def test_condition_published_rounding():
    assert abs(admissibility_condition(Parameters(6, 2)) - 0.7257) < 1e-3
    assert abs(admissibility_condition(Parameters(3, 1)) - 1.5156) < 1e-3
    assert not assess(Parameters(3, 1)).admissible


def test_condition_vanishes_along_ray():
    vals = [admissibility_condition(Parameters(3 * s, s)) for s in (1, 10, 100, 1000)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-2


subcritical = st.tuples(st.floats(0.5, 50), st.floats(0.01, 0.99)).map(
    lambda t: Parameters(t[0], t[1] * critical_B(t[0])))


@settings(max_examples=200, deadline=None)
@given(subcritical)
def test_arccos_form_agrees(p):
    a, b = admissibility_condition(p), admissibility_condition_arccos(p)
    assert a == pytest.approx(b, rel=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.floats(1.5, 20), st.floats(0.3, 5), st.floats(1.01, 2))
def test_condition_decreasing_along_rays(r, A, factor):
    p1, p2 = Parameters(A, A / r), Parameters(A * factor, A * factor / r)
    if classify_regime(p1).regime is not Regime.SUBCRITICAL:
        return
    assert admissibility_condition(p2) < admissibility_condition(p1)


def test_no_plus_root_outside_subcritical():
    with pytest.raises(NoPlusRootError):
        admissibility_condition_arccos(Parameters(1, 1))
    r = assess(Parameters(1, 1))
    assert not r.admissible and math.isnan(r.conditionValue)


def test_region_grid():
    cells = sample_region(1, 10, 0.5, 8, 12)
    assert len(cells) == 144
    assert [c.A for c in cells[:12]] == [1.0] * 12
    for c in cells:
        if c.admissible:
            assert c.regime is Regime.SUBCRITICAL
        if c.B >= critical_B(c.A):
            assert not c.admissible
    cell = [c for c in sample_region(6, 7, 2, 3, 2) if c.A == 6 and c.B == 2][0]
    assert cell.admissible


@pytest.mark.parametrize("args", [(1, 1, 1, 2, 5), (1, 2, 1, 2, 1), (0, 2, 1, 2, 5)])
def test_region_rejects_degenerate(args):
    with pytest.raises(InvalidParameterError):
        sample_region(*args)
