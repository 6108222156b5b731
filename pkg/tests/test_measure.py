import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vsl import BlowUpError, TruncationError, ValidationError
from vsl.measure import (
    WeightSpec,
    evolution_normalizer,
    evolve,
    exponential_series,
    moments,
    moments_at_time,
    normalize,
    required_moment_count,
    szego_integral,
    to_fraction,
)

# e^{2t}(I0(2t) - I1(2t)) = sum_m Catalan(m) t^m / m!, evaluated independently
FREE_NORMALIZER_HALF = "1.90526214655436736606652831958"


def catalan(k):
    return Fraction(math.comb(2 * k, k), k + 1)


def test_exact_semicircle_moments_are_catalan(semicircle):
    s = moments(semicircle, 10, exact=True)
    assert s.exact
    assert list(s.even) == [catalan(k) for k in range(11)]
    assert all(v == 0 for v in s.values[1::2])


def test_exact_arcsine_and_gaussian(arcsine, gaussian):
    assert list(moments(arcsine, 5, exact=True).even) == [math.comb(2 * k, k) for k in range(6)]
    g = moments(gaussian, 3, exact=True).even
    assert g[:3] == (1, Fraction(1, 2), Fraction(3, 4))


def test_float_moments_match_exact(semicircle, arcsine):
    for m in (semicircle, arcsine):
        ex = moments(m, 12, exact=True).even
        fl = moments(m, 12, prec=256).even
        with mpmath.workprec(256):
            assert max(abs(mpmath.mpf(x.numerator) / x.denominator - y) for x, y in zip(ex, fl)) < mpmath.mpf(10) ** -60


def test_uniform_and_series_weights():
    u = normalize(WeightSpec("uniform", 2.0), 1)
    s = moments(u, 4, prec=128).even
    for k in range(5):
        assert abs(float(s[k]) - 4**k / (2 * k + 1)) < 1e-12 * 4**k
    series = normalize(WeightSpec("chebyshev-series", 2.0, (0.5, 0, -0.5)), 1)
    sc = moments(normalize(WeightSpec("semicircle", 2.0), 1), 6, prec=128).even
    assert max(abs(float(x - y)) for x, y in zip(moments(series, 6, prec=128).even, sc)) < 1e-30


def test_point_masses_mix(mix):
    s = moments(mix, 2, exact=True).even
    assert s[1] == Fraction(9, 10) + 2 * Fraction(1, 20) * Fraction(25, 4)


def test_invalid_measures():
    with pytest.raises(ValidationError):
        normalize(WeightSpec("semicircle", 2.0), Fraction(9, 10), [(Fraction(3, 2), Fraction(1, 20))])
    with pytest.raises(ValidationError):
        WeightSpec("triangle")
    with pytest.raises(ValidationError):
        WeightSpec("chebyshev-series", 2.0, (1.0, 0.5))
    with pytest.raises(ValidationError):
        WeightSpec("chebyshev-series", 2.0, (0.1, 0, 1.0))
    with pytest.raises(ValidationError):
        normalize(None, 0, [])


def test_gaussian_blow_up(gaussian):
    with pytest.raises(BlowUpError):
        evolve(gaussian, 1)
    with pytest.raises(BlowUpError):
        evolve(evolve(gaussian, Fraction(1, 2)), Fraction(1, 2))


def test_evolution_normalizers(gaussian, semicircle):
    assert abs(float(evolution_normalizer(evolve(gaussian, Fraction(1, 2)))) - 2**0.5) < 1e-15
    with mpmath.workprec(128):
        z = evolution_normalizer(evolve(semicircle, Fraction(1, 2)), 128)
        assert abs(z - mpmath.mpf(FREE_NORMALIZER_HALF)) < mpmath.mpf(10) ** -28


def test_evolved_gaussian_moments_closed_form(gaussian):
    s = moments(evolve(gaussian, Fraction(1, 2)), 2, exact=True).even
    assert s[1] == 1 and s[2] == 3


def test_series_route_matches_quadrature(semicircle, mix):
    for m in (semicircle, mix):
        R = m.radius
        s0 = moments(m, required_moment_count(R, 0.5, 6, 192), prec=192)
        a = moments_at_time(s0, 0.5, R, 6, 192).even
        b = moments(evolve(m, Fraction(1, 2)), 6, prec=192).even
        with mpmath.workprec(192):
            assert max(abs(x - y) / y for x, y in zip(a, b)) < mpmath.mpf(10) ** -25


def test_series_truncation_error(semicircle):
    s0 = moments(semicircle, 3, prec=128)
    with pytest.raises(TruncationError) as info:
        exponential_series(s0, 0, 1.0, semicircle.radius)
    assert info.value.partial_sums


def test_to_fraction():
    assert to_fraction(0.9) == Fraction(9, 10)
    with pytest.raises(ValidationError):
        to_fraction(float("nan"))


def test_szego_integrals(semicircle, arcsine):
    assert abs(float(szego_integral(semicircle)) + math.pi * math.log(2 * math.pi)) < 1e-8
    # arcsine density 1/(pi sqrt(4 - x^2)) gives -pi ln(pi)
    assert abs(float(szego_integral(arcsine)) + math.pi * math.log(math.pi)) < 1e-8


@settings(max_examples=25, deadline=None)
@given(
    mass=st.fractions(min_value=Fraction(1, 10), max_value=1),
    xi=st.fractions(min_value=Fraction(21, 10), max_value=4),
)
def test_moments_are_log_convex(mass, xi):
    m = normalize(WeightSpec("semicircle", 2.0), mass, [(xi, (1 - mass) / 2)] if mass < 1 else [])
    s = moments(m, 6, exact=True).even
    assert s[0] == 1
    assert all(s[k] ** 2 <= s[k - 1] * s[k + 1] for k in range(1, 6))
