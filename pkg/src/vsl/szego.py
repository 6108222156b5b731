"""The circle side: trigonometric moments, Verblunsky coefficients and the Geronimus relations.

An even measure on ``[-c, c]`` is rescaled to ``[-1, 1]`` and pushed to the unit
circle through ``x = cos(theta)``. Its trigonometric moments are
``c_k = int T_k(x) d rho(x)`` with Chebyshev polynomials ``T_k``, so they follow
from the power moments by an exact integer linear map.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath

from ._errors import PositivityError, PrecisionError, ValidationError
from ._trend import series_verdict
from ._validation import check_count, check_positive_sequence, default_precision
from .hankel import JacobiCoefficients
from .measure import EvenMeasure, moments, to_fraction, to_mpf


def chebyshev_coefficients(k):
    """Integer power coefficients of ``T_0..T_k`` (``T[j][i]`` multiplies ``x**i``)."""
    T = [[1], [0, 1]]
    for j in range(2, k + 1):
        prev, prev2 = T[j - 1], T[j - 2]
        row = [0] + [2 * v for v in prev]
        for i, v in enumerate(prev2):
            row[i] -= v
        T.append(row)
    return T[: k + 1]


@dataclass(frozen=True)
class CircleMeasure:
    """Symmetric circle measure given by trigonometric moments ``c_0..c_2K``.

    ``scale`` is the half-width ``c`` of the original support.
    """

    trig: tuple
    scale: float
    exact: bool = False
    prec: Optional[int] = None
    origin: Optional[EvenMeasure] = None

    def __len__(self):
        return len(self.trig)


def trig_moments(s, c):
    """``c_k`` for ``k = 0..2K`` from power moments of a measure on ``[-c, c]``."""
    K2 = 2 * s.K
    T = chebyshev_coefficients(K2)
    if s.exact:
        cf = to_fraction(c)
        scaled = [s[i] / cf**i for i in range(K2 + 1)]
        zero = Fraction(0)
    else:
        cm = to_mpf(to_fraction(c))
        scaled = [to_mpf(s[i]) / cm**i for i in range(K2 + 1)]
        zero = mpmath.mpf(0)
    return tuple(sum((coef * scaled[i] for i, coef in enumerate(T[k]) if coef), zero) for k in range(K2 + 1))


def map_to_circle(m, K, prec=None, exact=False):
    """Circle measure of ``m``, with trigonometric moments up to ``c_2K``.

    The rescale uses the support radius, which is ``c`` unless point masses lie
    outside ``[-c, c]``.
    """
    if m.unbounded:
        raise ValidationError("the circle map needs a compactly supported measure; the gaussian is unbounded")
    scale = m.radius
    if not scale:
        raise ValidationError("a measure concentrated at zero has no circle image")
    if exact:
        scale = to_fraction(scale)
    prec = None if exact else (prec or default_precision())
    s = moments(m, K, prec=prec, exact=exact)
    with mpmath.workprec((prec or 64) + 16):
        trig = trig_moments(s, scale)
    return CircleMeasure(trig, scale, exact, prec, m)


def circle_from_moments(s, c):
    with mpmath.workprec((s.prec or 64) + 16):
        return CircleMeasure(trig_moments(s, c), c, s.exact, s.prec)


@dataclass(frozen=True)
class VerblunskySeq:
    """Verblunsky coefficients ``alpha_0..alpha_M``, each in ``(-1, 1)``."""

    alpha: tuple
    exact: bool = False

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(self.alpha))
        for n, a in enumerate(self.alpha):
            if not abs(a) < 1:
                raise ValidationError(f"|alpha_{n}| = {float(abs(a))} is not below 1")

    def __len__(self):
        return len(self.alpha)

    def __getitem__(self, n):
        return self.alpha[n]


def _toeplitz_ldl(trig, size, exact):
    """LDL factors of the Toeplitz matrix ``(c_|i-j|)``; positivity checked pivot by pivot."""
    L = [[None] * size for _ in range(size)]
    d = []
    one = Fraction(1) if exact else mpmath.mpf(1)
    for j in range(size):
        dj = trig[0] - sum(L[j][k] ** 2 * d[k] for k in range(j))
        if not dj > 0 or (not exact and dj <= mpmath.mpf(2) ** (-mpmath.mp.prec + 32) * trig[0]):
            raise PositivityError(j, f"Toeplitz matrix of order {j + 1} is not positive definite")
        d.append(dj)
        L[j][j] = one
        for i in range(j + 1, size):
            L[i][j] = (trig[i - j] - sum(L[i][k] * L[j][k] * d[k] for k in range(j))) / dj
    return L, d


def _solve_leading(L, d, rhs):
    n = len(rhs)
    y = list(rhs)
    for i in range(n):
        y[i] = y[i] - sum(L[i][k] * y[k] for k in range(i))
    y = [y[i] / d[i] for i in range(n)]
    for i in range(n - 1, -1, -1):
        y[i] = y[i] - sum(L[k][i] * y[k] for k in range(i + 1, n))
    return y


def verblunsky(cm, M=None, even_tol=1e-12):
    """Verblunsky coefficients ``alpha_0..alpha_M`` by Toeplitz Gram solves.

    The monic orthogonal polynomial ``Phi_{n+1}(z) = z^{n+1} + sum_j phi_j z^j``
    solves ``sum_j phi_j c_|j-k| = -c_{n+1-k}`` for ``k = 0..n``, and
    ``alpha_n = -Phi_{n+1}(0) = -phi_0``. One LDL factorization serves every
    order because the leading blocks of the factors factor the leading blocks.
    """
    top = len(cm.trig) - 2
    M = top if M is None else check_count(M, "M", minimum=0)
    if M > top:
        raise ValidationError(f"alpha_{M} needs trigonometric moments up to c_{M + 1}; only c_{top + 1} given")
    trig = cm.trig
    prec = None if cm.exact else (cm.prec or default_precision())
    with mpmath.workprec((prec or 64) + 16):
        L, d = _toeplitz_ldl(trig, M + 1, cm.exact)
        alpha = []
        for n in range(M + 1):
            rhs = [-trig[n + 1 - k] for k in range(n + 1)]
            phi = _solve_leading(L, d, rhs)
            a = -phi[0]
            if not abs(a) < 1:
                raise PrecisionError(f"|alpha_{n}| >= 1; increase the working precision")
            if n % 2 == 0 and abs(a) > (0 if cm.exact else even_tol):
                raise PrecisionError(f"alpha_{n} = {float(a):.3g} should vanish for an even measure")
            alpha.append(a)
    if prec:
        with mpmath.workprec(prec):
            alpha = [+a for a in alpha]
    return VerblunskySeq(tuple(alpha), cm.exact)


def geronimus_map(v, c=2.0):
    """Jacobi coefficients from Verblunsky coefficients (Geronimus relations).

    ``a_n = c^2 (1 - alpha_{2n-1})(1 - alpha_{2n}^2)(1 + alpha_{2n+1}) / 4`` with
    ``alpha_{-1} = -1``; ``len(v) // 2`` coefficients are available.
    """
    alpha = v.alpha if isinstance(v, VerblunskySeq) else VerblunskySeq(tuple(v)).alpha
    exact = all(isinstance(x, (Fraction, int)) for x in alpha)
    with mpmath.workprec(default_precision() + 16):
        c2 = to_fraction(c) ** 2 if exact else to_mpf(to_fraction(c)) ** 2
    one = Fraction(1) if exact else mpmath.mpf(1)

    def al(k):
        return -one if k == -1 else alpha[k]

    with mpmath.workprec(default_precision() + 16):
        a = tuple(c2 * (1 - al(2 * n - 1)) * (1 - al(2 * n) ** 2) * (1 + al(2 * n + 1)) / 4 for n in range(len(alpha) // 2))
    return JacobiCoefficients(a, c=float(c), exact=exact)


@dataclass(frozen=True)
class ProductReport:
    """Partial products ``P_N = prod_{n<=N} 4 a_n / c^2``, their log-sums and a verdict."""

    products: tuple
    log_sums: tuple
    verdict: str


_PRODUCT_VERDICTS = {"finite": "finite-positive", "+inf": "infinite", "-inf": "zero", "inconclusive": "inconclusive"}


def szego_product(a, c=2.0, tol=1e-10):
    """Product form of the Szego condition, ``0 < prod 4 a_n / c^2 < inf``."""
    a = check_positive_sequence(getattr(a, "a", a), "a")
    c2 = float(c) ** 2
    logs = []
    acc = 0.0
    for x in a:
        acc += math.log(4 * float(x) / c2) if not isinstance(x, mpmath.mpf) else float(mpmath.log(4 * x / c2))
        logs.append(acc)
    products = tuple(math.exp(s) if s < 700 else math.inf for s in logs)
    rep = series_verdict(logs, tol=tol)
    return ProductReport(products, tuple(logs), _PRODUCT_VERDICTS[rep.verdict])


def moments_to_verblunsky(s, c, M=None):
    return verblunsky(circle_from_moments(s, c), M)

