import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from enrk.positivity import (
    UNDEFINED,
    PositivityClass,
    Undefined,
    format_threshold,
    pes_threshold,
    positivity_step_threshold,
)


@pytest.mark.parametrize("radius, alpha, expected", [(1, 2.5, 0.4), (2, 2.5, 0.8), (1.0, 1.0, 1.0)])
def test_H_values(radius, alpha, expected):
    assert positivity_step_threshold(radius, PositivityClass(alpha)) == pytest.approx(expected, abs=1e-15)


def test_H_undefined_for_zero_radius():
    H = positivity_step_threshold(0.0, 1.0)
    assert H is UNDEFINED
    assert str(H) == "*"
    assert H != math.inf


def test_H_unbounded_for_zero_alpha():
    assert positivity_step_threshold(1.0, 0.0) == math.inf


def test_negative_alpha_rejected():
    with pytest.raises(ValueError):
        PositivityClass(-1.0)


@pytest.mark.parametrize(
    "phi, H, expected, flag",
    [(0.9998, 1.0, 0.9998, False), (4.7332, 2.0, 2.0, False), (4.4476, UNDEFINED, 4.4476, True)],
)
def test_pes_threshold(phi, H, expected, flag):
    out = pes_threshold(phi, H)
    assert out.value == pytest.approx(expected)
    assert out.stability_only is flag


def test_pes_infinite_both():
    assert pes_threshold(math.inf, math.inf).value == math.inf


@given(
    radius=st.floats(0.01, 10),
    a1=st.floats(0.01, 10),
    a2=st.floats(0.01, 10),
    phi=st.floats(0.01, 10),
)
def test_monotone_in_alpha_and_min(radius, a1, a2, phi):
    lo, hi = sorted((a1, a2))
    assert positivity_step_threshold(radius, hi) <= positivity_step_threshold(radius, lo)
    H = positivity_step_threshold(radius, lo)
    tau = pes_threshold(phi, H).value
    assert tau <= phi and tau <= H


def test_format():
    assert format_threshold(UNDEFINED) == "*"
    assert format_threshold(math.inf) == "inf"
    assert format_threshold(0.60327, 4) == "0.6033"
    assert isinstance(UNDEFINED, Undefined)
