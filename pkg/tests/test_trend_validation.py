import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from vsl import ValidationError
from vsl._trend import partial_sums, series_verdict
from vsl._validation import check_count, check_positive_sequence, check_precision_bits, check_time_grid, default_precision


def test_series_verdicts():
    assert series_verdict(partial_sums(0.5**n for n in range(80))).verdict == "finite"
    assert series_verdict(partial_sums(1 / (n + 1) for n in range(500))).verdict == "+inf"
    assert series_verdict(partial_sums(1 / (n + 1) ** 2 for n in range(500))).verdict == "inconclusive"
    alt = [(-1) ** n * 0.1 - 0.05 for n in range(200)]
    assert series_verdict(partial_sums(alt)).verdict == "-inf"
    assert series_verdict([]).verdict == "inconclusive"
    rep = series_verdict(partial_sums(0.5**n for n in range(30)), tol=1e-6)
    assert rep.finite and abs(rep.limit - 2) < 1e-6


def test_validation_helpers(monkeypatch):
    assert check_time_grid("0, 0.5,1") == (0.0, 0.5, 1.0)
    assert check_time_grid(0.25) == (0.25,)
    for bad in ("0,x", "1,0.5", "-1", [], [0.0, float("inf")]):
        with pytest.raises(ValidationError):
            check_time_grid(bad)
    assert check_positive_sequence([Fraction(1, 2), mpmath.mpf(2)]) == (Fraction(1, 2), mpmath.mpf(2))
    assert check_positive_sequence(np.array([1.0, 2.0])) == (1.0, 2.0)
    for bad in ([1.0, 0.0], [1.0, "2"], [math.nan], 3):
        with pytest.raises(ValidationError):
            check_positive_sequence(bad)
    assert check_count(np.int64(3)) == 3
    with pytest.raises(ValidationError):
        check_count(True)
    with pytest.raises(ValidationError):
        check_count(0)
    monkeypatch.setenv("VSL_PRECISION_BITS", "128")
    assert default_precision() == 128
    monkeypatch.setenv("VSL_PRECISION_BITS", "8")
    with pytest.raises(ValidationError):
        default_precision()
    with pytest.raises(ValidationError):
        check_precision_bits("lots")


@given(st.lists(st.floats(min_value=-1e3, max_value=1e3), max_size=40))
def test_partial_sums_cumulate(xs):
    assert np.allclose(partial_sums(xs), np.cumsum(xs) if xs else [])
