"""Finiteness diagnostics for Volterra lattices.

Every quantity here is an infinite series evaluated on a finite section; each
is reported as a :class:`~vsl._trend.SeriesReport` carrying the partial sums, a
limit estimate and a verdict (``finite``, ``+inf``, ``-inf``, ``inconclusive``).
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np

from ._errors import ValidationError
from ._trend import SeriesReport, partial_sums, series_verdict
from ._validation import check_positive_sequence
from .jacobi import TridiagonalMatrix
from .measure import PointMassList, to_fraction
from .szego import szego_product


def _floats(a):
    a = check_positive_sequence(getattr(a, "a", a), "a")
    return [float(x) if not isinstance(x, mpmath.mpf) else x for x in a]


def _log(x):
    return float(mpmath.log(x)) if isinstance(x, mpmath.mpf) else math.log(x)


@dataclass(frozen=True)
class HamiltonianReport:
    """``sum ln a_n`` and ``H_0 = (1/2) sum ln a_n``; they are finite together."""

    full: SeriesReport
    half: SeriesReport

    @property
    def verdict(self):
        return self.full.verdict


def log_hamiltonian(a, tol=1e-10):
    """Partial sums of the logarithmic Hamiltonian with and without the factor one half."""
    logs = [_log(x) for x in _floats(a)]
    full = series_verdict(partial_sums(logs), tol)
    half = SeriesReport(tuple(0.5 * s for s in full.partial_sums), 0.5 * full.limit, full.verdict)
    return HamiltonianReport(full, half)


def regularized_hamiltonian(a, c=2.0, tol=1e-10):
    """Partial sums of ``sum (ln a_n - 2 ln(c/2))``."""
    if not c > 0:
        raise ValidationError("c must be positive")
    shift = 2 * math.log(float(c) / 2)
    return series_verdict(partial_sums(_log(x) - shift for x in _floats(a)), tol)


def _exact_sqrt(q):
    """Square root of a nonnegative rational if it is rational, else ``None``."""
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def py_sum(points, c=2.0):
    """``sum_j sqrt(xi_j^2 - c^2)`` over the mirror pairs.

    The result is an exact rational when every term is; a pair exactly at the
    edge contributes zero. Points inside the support are rejected.
    """
    entries = points.entries if isinstance(points, PointMassList) else tuple(points)
    cf = to_fraction(c)
    exact_terms, floats = [], []
    for entry in entries:
        xi = to_fraction(entry[0] if isinstance(entry, (tuple, list)) else entry)
        if xi < cf:
            raise ValidationError(f"point {float(xi)} lies inside the support [-{float(cf)}, {float(cf)}]")
        q = xi * xi - cf * cf
        r = _exact_sqrt(q)
        if r is not None:
            exact_terms.append(r)
        else:
            floats.append(math.sqrt(float(q)))
    total = sum(exact_terms, Fraction(0))
    if floats:
        return float(total) + math.fsum(floats)
    return total


@dataclass(frozen=True)
class GeometricPYSum:
    value: float
    tail_bound: float
    terms: int


def py_sum_geometric(xi0, ratio, c=2.0, tol=1e-14, max_terms=100000):
    """PY sum for the infinite family ``xi_j = c + (xi0 - c) ratio^j`` accumulating at the edge.

    The tail after ``J`` terms is bounded by
    ``sqrt((xi0 + c)(xi0 - c)) ratio^(J/2) / (1 - sqrt(ratio))``.
    """
    if not (0 < ratio < 1):
        raise ValidationError("ratio must lie in (0, 1)")
    if not xi0 > c:
        raise ValidationError("xi0 must exceed c")
    d0 = xi0 - c
    scale = math.sqrt((xi0 + c) * d0)
    q = math.sqrt(ratio)
    total = 0.0
    for j in range(max_terms):
        xi = c + d0 * ratio**j
        total += math.sqrt(xi * xi - c * c)
        bound = scale * q ** (j + 1) / (1 - q)
        if bound <= tol * max(1.0, total):
            return GeometricPYSum(total, bound, j + 1)
    return GeometricPYSum(total, bound, max_terms)


@dataclass(frozen=True)
class PerturbationReport:
    trace: SeriesReport
    hilbert_schmidt: SeriesReport
    entries: SeriesReport


def perturbation_sums(a, tol=1e-10):
    """``sum |a_n - 1|``, ``sum (a_n - 1)^2`` and ``sum |sqrt(a_n) - 1|``."""
    a = [float(x) for x in _floats(a)]
    return PerturbationReport(
        series_verdict(partial_sums(abs(x - 1) for x in a), tol),
        series_verdict(partial_sums((x - 1) ** 2 for x in a), tol),
        series_verdict(partial_sums(abs(math.sqrt(x) - 1) for x in a), tol),
    )


def unit_interval_section(a, c=2.0):
    """Section rescaled to ``[-1, 1]``: ``w_n = sqrt(a_n) / c``, zero diagonal."""
    a = _floats(a)
    return TridiagonalMatrix((0.0,) * (len(a) + 1), tuple(math.sqrt(float(x)) / float(c) for x in a))


MARCHENKO_NOTE = (
    "coefficients rescaled to [-1, 1] (w_n = sqrt(a_n)/c); a finite sum implies purely absolutely "
    "continuous spectrum on [-1, 1] and finitely many eigenvalues outside it"
)


def marchenko_sum(T, tol=1e-10):
    """``sum_n n (|w_n^2 - 1/4| + |v_n|)`` on a section in ``[-1, 1]`` units."""
    terms = [n * (abs(float(w) ** 2 - 0.25) + abs(float(T.diag[n]))) for n, w in enumerate(T.off)]
    return series_verdict(partial_sums(terms), tol)


@dataclass(frozen=True)
class HSReport:
    """Left and right sides of the Hundertmark-Simon inequality on a section."""

    lhs: float
    rhs: float
    outside: tuple

    @property
    def margin(self):
        return self.rhs - self.lhs

    @property
    def holds(self):
        return self.lhs <= self.rhs * (1 + 1e-12) + 1e-12


def hundertmark_simon_check(T, N=None):
    """``sum_{|lambda|>2} sqrt(lambda^2 - 4) <= 4 sum (|p_n - 1| + |q_n|)`` on the ``N x N`` section.

    ``T`` is in the ``[-2, 2]`` normalization (free off-diagonal one). The
    section is a compression of the operator obtained by continuing with free
    entries, so by interlacing its outer eigenvalues are dominated by those of
    that operator and the inequality must hold for the section too.
    """
    N = T.N if N is None else N
    if N > T.N or N < 1:
        raise ValidationError(f"section size must lie in [1, {T.N}]")
    p = np.array([float(x) for x in T.off[: N - 1]])
    q = np.array([float(x) for x in T.diag[:N]])
    sub = TridiagonalMatrix(tuple(q), tuple(p)) if N > 1 else TridiagonalMatrix((q[0],), ())
    ev = np.linalg.eigvalsh(sub.dense())
    outside = tuple(float(x) for x in ev if abs(x) > 2)
    lhs = math.fsum(math.sqrt(x * x - 4) for x in outside)
    rhs = 4 * (float(np.sum(np.abs(p - 1))) + float(np.sum(np.abs(q))))
    return HSReport(lhs, rhs, outside)


def random_trace_class(seed, N=32, amplitude=0.5, decay=0.85, diagonal=True):
    """Seeded section with ``p_n = 1 + d_n``, ``q_n = e_n``, ``|d_n|, |e_n| <= amplitude * decay^n``."""
    rng = np.random.default_rng(seed)
    env = amplitude * decay ** np.arange(N)
    p = 1 + rng.uniform(-1, 1, N - 1) * env[: N - 1]
    q = rng.uniform(-1, 1, N) * env if diagonal else np.zeros(N)
    return TridiagonalMatrix(tuple(q), tuple(p))


@dataclass
class DiagnosticsReport:
    """All finiteness diagnostics for one coefficient sequence."""

    h0: HamiltonianReport
    regularized: SeriesReport
    perturbation: PerturbationReport
    marchenko: SeriesReport
    product_verdict: str
    py: Optional[object] = None
    hs: Optional[HSReport] = None
    c: float = 2.0
    notes: list = field(default_factory=list)


def diagnose(a, c=2.0, points=None, tol=1e-10):
    """Assemble a :class:`DiagnosticsReport` for coefficients ``a`` on ``[-c, c]``."""
    section = unit_interval_section(a, c)
    two = TridiagonalMatrix(section.diag, tuple(2 * w for w in section.off))
    rep = DiagnosticsReport(
        h0=log_hamiltonian(a, tol),
        regularized=regularized_hamiltonian(a, c, tol),
        perturbation=perturbation_sums(a, tol),
        marchenko=marchenko_sum(section, tol),
        product_verdict=szego_product(a, c, tol).verdict,
        py=py_sum(points, c) if points is not None else None,
        hs=hundertmark_simon_check(two),
        c=float(c),
    )
    rep.notes.append(MARCHENKO_NOTE)
    return rep
