import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from vsl import ConditioningError, ValidationError
from vsl.jacobi import eigendecompose, eigh, finite_spectral_measure, free_tail, truncate, weyl_cf, weyl_stieltjes
from vsl.measure import evolve


def test_free_section_spectrum():
    vals, _ = eigh(truncate([1.0] * 4, 5))
    expected = sorted(2 * math.cos(k * math.pi / 6) for k in range(1, 6))
    assert np.allclose(vals, expected, atol=1e-14)


def test_high_precision_eigh_agrees():
    a = [0.7, 1.3, 0.9, 1.1]
    lo, _ = eigh(truncate(a, 5))
    hi, _ = eigh(truncate(a, 5, prec=200), prec=200)
    assert max(abs(float(x) - y) for x, y in zip(hi, lo)) < 1e-13


def test_finite_measure_pairs_and_weights():
    a = [0.7, 1.3, 0.9, 1.1]
    spec = eigendecompose(truncate(a, 5))
    assert abs(sum(spec.weights) - 1) < 1e-14
    m = finite_spectral_measure(a, 5)
    assert m.points.total_mass == 1
    assert m.points.entries[-1][0] == 0
    with pytest.raises(ValidationError):
        truncate(a, 7)


def test_weyl_stieltjes_semicircle(semicircle):
    w = weyl_stieltjes(semicircle, 3.0)
    assert abs(w.value - (3 - 5**0.5) / 2) < 1e-12
    w = weyl_stieltjes(semicircle, 2j)
    assert w.herglotz
    assert abs(w.value - (2j - cmath.sqrt(-8)) / 2) < 1e-12
    with pytest.raises(ConditioningError):
        weyl_stieltjes(semicircle, 1.0)


def test_weyl_stieltjes_arcsine(arcsine):
    z = 1 + 1j
    assert abs(weyl_stieltjes(arcsine, z).value - 1 / cmath.sqrt(z * z - 4)) < 1e-12


def test_gaussian_weyl_matches_section(gaussian):
    z = 0.5 + 2j
    a = [(n + 1) / 2 for n in range(60)]
    cf = weyl_cf(a, z, 61).value
    for t in (0, Fraction(1, 2)):
        m = evolve(gaussian, t)
        scale = 1 - float(t)
        cf = weyl_cf([x / scale for x in a], z, 61).value
        assert abs(weyl_stieltjes(m, z).value - cf) < 1e-8


def test_weyl_cf_tails():
    z = 0.3 + 0.8j
    assert abs(weyl_cf([1.0] * 10, z, 11, tail="free").value - free_tail(z)) < 1e-14
    zero = weyl_cf([1.0] * 40, z, 41).value
    assert abs(zero - free_tail(z)) < 1e-2
    with pytest.raises(ValidationError):
        weyl_cf([1.0], z, 5)


def test_free_tail_is_fixed_point():
    z = 1.5 + 0.1j
    g = free_tail(z, 1.0)
    assert abs(g - 1 / (z - g)) < 1e-14 and abs(g) < 1
