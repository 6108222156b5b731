from fractions import Fraction

import mpmath
import pytest

from vsl import ValidationError
from vsl.hankel import jacobi_from_moments
from vsl.measure import moments
from vsl.szego import chebyshev_coefficients, geronimus_map, map_to_circle, szego_product, verblunsky


def test_chebyshev_coefficients():
    T = chebyshev_coefficients(3)
    assert T[2] == [-1, 0, 2]
    assert T[3] == [0, -3, 0, 4]


def test_semicircle_exact(semicircle):
    cm = map_to_circle(semicircle, 8, exact=True)
    assert cm.trig[:4] == (1, 0, Fraction(-1, 2), 0)
    v = verblunsky(cm, 7)
    assert v.alpha == (0, Fraction(-1, 2), 0, Fraction(-1, 3), 0, Fraction(-1, 4), 0, Fraction(-1, 5))
    assert geronimus_map(v).a == (1, 1, 1, 1)


def test_arcsine_zero_and_geronimus(arcsine):
    v = verblunsky(map_to_circle(arcsine, 12, exact=True))
    assert all(a == 0 for a in v.alpha)
    assert geronimus_map(v).a[:4] == (2, 1, 1, 1)


def test_geronimus_matches_hankel_with_points(mix):
    cm = map_to_circle(mix, 20)
    g = geronimus_map(verblunsky(cm), cm.scale)
    h = jacobi_from_moments(moments(mix, len(g.a)), len(g.a))
    with mpmath.workprec(256):
        assert max(abs(x - y) for x, y in zip(g.a, h.a)) < mpmath.mpf(10) ** -60


def test_gaussian_refused(gaussian):
    with pytest.raises(ValidationError):
        map_to_circle(gaussian, 4)


def test_product_verdicts():
    assert szego_product([1.0] * 200).verdict == "finite-positive"
    assert szego_product([1 + 0.5**n for n in range(200)]).verdict == "finite-positive"
    # slow algebraic decay is honestly undecidable on a finite section
    assert szego_product([1 + 1 / (n + 1) ** 2 for n in range(400)]).verdict == "inconclusive"
    assert szego_product([(n + 1) / 2 for n in range(60)]).verdict == "infinite"
    assert szego_product([1 + 1 / (n + 1) for n in range(2000)]).verdict in ("infinite", "inconclusive")
