"""Hankel determinants and reconstruction of Jacobi coefficients from moments.

The Hankel matrix ``H_n = (s_{i+j})`` is factored as ``L D L^T``. The pivots
``d_n`` are the ratios ``Delta_n / Delta_{n-1}``, so every determinant comes out
of one pass, and the off-diagonal coefficients are ``a_n = d_{n+1} / d_n``
(equivalently ``Delta_{n+1} Delta_{n-1} / Delta_n^2``).
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath

from ._errors import PositivityError, PrecisionError, ValidationError
from ._validation import MAX_PRECISION_BITS, default_precision
from .measure import to_mpf


@dataclass(frozen=True)
class JacobiCoefficients:
    """Positive coefficients ``a_0..a_N`` of a sparse Jacobi matrix (off-diagonals ``sqrt(a_n)``).

    ``c`` is the half-width of the essential support, carried as metadata.
    ``finite`` marks a terminating sequence (finite-rank measure).
    """

    a: tuple
    c: Optional[float] = None
    exact: bool = False
    finite: bool = False

    def __post_init__(self):
        a = tuple(self.a)
        if any(not v > 0 for v in a):
            raise ValidationError("Jacobi coefficients must be positive")
        object.__setattr__(self, "a", a)

    def __len__(self):
        return len(self.a)

    def __getitem__(self, n):
        return self.a[n]

    def __iter__(self):
        return iter(self.a)

    def as_floats(self):
        return [float(v) for v in self.a]


@dataclass(frozen=True)
class HankelChain:
    """Determinants ``Delta_0..Delta_K`` (``Delta_{-1} = 1`` implicit) and LDL pivots."""

    dets: tuple
    pivots: tuple
    exact: bool = False
    prec: Optional[int] = None
    first_failure: Optional[int] = None
    degenerate: bool = False

    def delta(self, n):
        if n == -1:
            return Fraction(1) if self.exact else mpmath.mpf(1)
        return self.dets[n]

    @property
    def valid(self):
        return self.first_failure is None

    def __len__(self):
        return len(self.dets)


def _ldl_pivots(s, n_max, exact, prec):
    """Yield ``(n, d_n)`` for the Hankel matrix of ``s``; stops at the first unusable pivot."""
    one = Fraction(1) if exact else mpmath.mpf(1)
    conv = (lambda v: v) if exact else to_mpf
    H = [[conv(s[i + j]) for j in range(n_max + 1)] for i in range(n_max + 1)]
    L = [[None] * (n_max + 1) for _ in range(n_max + 1)]
    d = []
    tiny = None if exact else mpmath.mpf(2) ** (-(prec - 32))
    for j in range(n_max + 1):
        dj = H[j][j] - sum(L[j][k] ** 2 * d[k] for k in range(j))
        if exact:
            bad = dj <= 0
        else:
            bad = dj <= tiny * abs(H[j][j])
        if bad:
            degenerate = dj == 0 if exact else abs(dj) <= tiny * abs(H[j][j])
            yield j, dj, degenerate
            return
        d.append(dj)
        L[j][j] = one
        for i in range(j + 1, n_max + 1):
            L[i][j] = (H[i][j] - sum(L[i][k] * L[j][k] * d[k] for k in range(j))) / dj
        yield j, dj, None


def hankel_determinants(s, n_max=None, strict=True, prec=None):
    """Leading Hankel determinants ``Delta_0..Delta_{n_max}`` of a moment sequence.

    With ``strict`` a non-positive pivot raises :class:`PositivityError`;
    otherwise the chain stops there and records the failing index. A pivot
    that vanishes (exactly, or to working precision) is flagged degenerate: the
    measure has finitely many points.
    """
    n_max = s.K if n_max is None else n_max
    if n_max > s.K:
        raise ValidationError(f"Delta_{n_max} needs moments up to s_{2 * n_max}; only s_{2 * s.K} given")
    prec = None if s.exact else (prec or s.prec or default_precision())
    ctx = mpmath.workprec(prec + 8) if prec else _nullcontext()
    dets, pivots = [], []
    failure, degenerate = None, False
    with ctx:
        det = Fraction(1) if s.exact else mpmath.mpf(1)
        for n, dn, deg in _ldl_pivots(s, n_max, s.exact, prec):
            if deg is not None:
                failure, degenerate = n, deg
                if strict:
                    kind = "vanishing" if deg else "negative"
                    raise PositivityError(n, f"{kind} Hankel pivot at index {n} (invalid moments or insufficient precision)")
                break
            det = det * dn
            pivots.append(dn)
            dets.append(det)
    return HankelChain(tuple(dets), tuple(pivots), s.exact, prec, failure, degenerate)


class _nullcontext:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def _coefficients(chain, N):
    p = chain.pivots
    return [p[n + 1] / p[n] for n in range(min(N, len(p) - 1))]


def jacobi_from_moments(s, N=None, certify=True, tol=1e-20, prec=None, c=None):
    """Coefficients ``a_0..a_{N-1}`` of the sparse Jacobi matrix whose spectral measure has moments ``s``.

    ``N`` defaults to the most the moments allow (``s_0..s_2K`` give ``K``
    coefficients). A degenerate chain stops early and returns a finite
    sequence. Floating-point results are certified by repeating the
    factorization at twice the precision.
    """
    if N is not None and N < 1:
        raise ValidationError("N must be at least 1")
    n_max = s.K if N is None else N
    if n_max > s.K:
        raise ValidationError(f"a_0..a_{N - 1} need moments up to s_{2 * N}; only s_{2 * s.K} given")
    prec = None if s.exact else (prec or s.prec or default_precision())
    chain = hankel_determinants(s, n_max, strict=False, prec=prec)
    if chain.first_failure is not None and not chain.degenerate:
        raise PositivityError(chain.first_failure)
    count = n_max if N is None else N
    with (mpmath.workprec(prec) if prec else _nullcontext()):
        a = [+v for v in _coefficients(chain, count)] if prec else _coefficients(chain, count)
    if not a:
        raise PositivityError(chain.first_failure or 0, "measure is too degenerate to define any coefficient")
    if certify and not s.exact:
        if 2 * prec > MAX_PRECISION_BITS * 2:
            raise PrecisionError("cannot certify beyond the precision cap")
        check = hankel_determinants(s, n_max, strict=False, prec=2 * prec)
        with mpmath.workprec(2 * prec):
            b = _coefficients(check, count)
            for n, (x, y) in enumerate(zip(a, b)):
                if abs(x - y) > tol * abs(y):
                    raise PrecisionError(
                        f"a_{n} changed by {mpmath.nstr(abs(x - y) / abs(y), 3)} (relative) at doubled precision; "
                        "increase the working precision"
                    )
    return JacobiCoefficients(tuple(a), c=c, exact=s.exact, finite=len(a) < count)


@dataclass(frozen=True)
class DelcondReport:
    ratios: tuple
    limit: Optional[float]
    verdict: str


def delcond_ratios(h, tol=1e-8):
    """Ratios ``Delta_{n+1}/Delta_n`` with a limit estimate and a verdict.

    The verdict looks at two-step changes of ``log r_n`` over the tail, which is
    robust to period-two oscillation: all below ``tol`` means convergence to a
    positive limit, a sustained run of one sign with non-shrinking size means the
    ratios tend to zero or infinity.
    """
    with (mpmath.workprec(h.prec + 8) if h.prec else _nullcontext()):
        ratios = tuple(h.dets[n + 1] / h.dets[n] for n in range(len(h.dets) - 1))
    if len(ratios) < 2:
        return DelcondReport(ratios, None, "inconclusive")
    logs = [float(mpmath.log(r)) for r in ratios]
    steps = [logs[j + 2] - logs[j] for j in range(len(logs) - 2)]
    tail = steps[-4:]
    limit = _aitken(ratios)
    if tail and all(abs(d) < tol for d in tail):
        return DelcondReport(ratios, limit, "converges-positive")
    if len(tail) >= 2:
        grows = all(abs(b) >= 0.5 * abs(a) for a, b in zip(tail, tail[1:]))
        if grows and all(d > tol for d in tail):
            return DelcondReport(ratios, math.inf, "tends-to-infinity")
        if grows and all(d < -tol for d in tail):
            return DelcondReport(ratios, 0.0, "tends-to-zero")
    return DelcondReport(ratios, limit, "inconclusive")


def _aitken(seq):
    x0, x1, x2 = (float(v) for v in seq[-3:]) if len(seq) >= 3 else (None, None, float(seq[-1]))
    if x0 is None:
        return x2
    denom = x2 - 2 * x1 + x0
    if denom == 0 or not math.isfinite(denom):
        return x2
    est = x2 - (x2 - x1) ** 2 / denom
    return est if math.isfinite(est) else x2
