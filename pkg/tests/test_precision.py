import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from blockgs.precision import (
    F32F64,
    PrecisionPair,
    get_pair,
    promote,
    round_to,
    unit_roundoff,
    dtype_unit_roundoff,
)

finite32 = st.floats(allow_nan=False, allow_infinity=False, width=32)


def test_unit_roundoffs():
    assert unit_roundoff("working") == 2.0**-24
    assert unit_roundoff("high") == 2.0**-53
    assert unit_roundoff("working") == pytest.approx(5.96e-8, rel=1e-3)
    assert unit_roundoff("high") == pytest.approx(1.11e-16, rel=1e-2)
    # binary64 as the working precision has u of about 1e-16
    assert dtype_unit_roundoff(np.float64) == pytest.approx(1.11e-16, rel=1e-2)


def test_pair_square_relationship():
    u, u2 = F32F64.working_unit_roundoff, F32F64.high_unit_roundoff
    assert 0 < u2 <= u * u * 1e3
    with pytest.raises(ValueError):
        PrecisionPair("f64f64", np.float64, np.float64)
    with pytest.raises(ValueError):
        F32F64.unit_roundoff("quad")


def test_get_pair():
    assert get_pair("f32f64") is F32F64
    with pytest.raises(ValueError, match="unknown precision"):
        get_pair("f16f32")


def test_promote_is_exact():
    one = promote(np.array([[1.0]], dtype=np.float32))
    assert one.dtype == np.float64 and one[0, 0] == 1.0
    tenth = promote(np.array([0.1], dtype=np.float32))
    assert tenth[0] == float(np.float32(0.1))
    assert tenth[0] != 0.1


def test_promote_refuses_narrowing():
    with pytest.raises(TypeError):
        promote(np.ones(3), np.float32)


def test_round_below_half_ulp():
    u = unit_roundoff("working")
    assert round_to(np.array([1 + u / 4]))[0] == np.float32(1.0)


def test_round_pi():
    pi32 = round_to(np.array([np.pi]))[0]
    assert pi32 == np.float32(np.pi)
    assert abs(float(pi32) - np.pi) / np.pi <= 6.0e-8


def test_round_overflow_is_an_error():
    with pytest.raises(OverflowError):
        round_to(np.array([1e300]))
    # existing infinities are not a range error
    assert np.isinf(round_to(np.array([np.inf]))[0])


@given(arrays(np.float32, (6, 4), elements=finite32))
def test_round_trip_bit_exact(a):
    back = round_to(promote(a))
    assert np.array_equal(back.view(np.uint32), a.view(np.uint32))


@given(st.floats(-1e30, 1e30), st.floats(-1e30, 1e30))
def test_round_is_monotone(x, y):
    lo, hi = min(x, y), max(x, y)
    rlo, rhi = round_to(np.array([lo, hi]))
    assert rlo <= rhi


@given(st.floats(-1e30, 1e30).filter(lambda v: v == 0 or abs(v) > 1e-30))
def test_round_error_bound(x):
    r = float(round_to(np.array([x]))[0])
    assert abs(r - x) <= unit_roundoff("working") * abs(x)
