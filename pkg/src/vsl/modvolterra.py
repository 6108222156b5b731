"""The modified Volterra lattice through its reduction to the classical one.

With ``b_n = 1/c_n`` and ``a_n = b_n b_{n+1}``, a solution ``a(t)`` of the
classical lattice lifts to the modified lattice through
``b_0(t) = b_0(0) exp(int_0^t a_0)`` and ``b_n = a_{n-1} / b_{n-1}``. Since
``a_0 = s_2`` the exponential factor equals the normalizer
``sum_m s_2m(0) t^m / m!`` of the evolved measure.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath

from ._errors import ValidationError
from ._validation import check_positive_sequence, check_time_grid, default_precision
from .hankel import JacobiCoefficients, hankel_determinants
from .measure import exponential_series, moments, moments_at_time, required_moment_count, to_mpf


def reduce(c0):
    """Classical coefficients ``a_n = 1 / (c_n c_{n+1})``, one shorter than ``c``."""
    c = check_positive_sequence(c0, "c", min_length=2)
    a = tuple(1 / (x * y) if isinstance(x * y, (Fraction, mpmath.mpf)) else 1.0 / (x * y) for x, y in zip(c, c[1:]))
    return JacobiCoefficients(a, exact=all(isinstance(x, (Fraction, int)) for x in c))


@dataclass(frozen=True)
class ModState:
    """A modified-lattice configuration with the free datum ``b_0(0)``."""

    c: tuple
    b0: float = 1.0
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "c", check_positive_sequence(self.c, "c", min_length=2))
        if not self.b0 > 0:
            raise ValidationError("b0 must be positive")

    @property
    def b(self):
        return tuple(1 / x for x in self.c)


@dataclass(frozen=True)
class ATrajectory:
    """Classical solution on a time grid with the initial moments that generated it."""

    times: tuple
    a: tuple
    s0: object
    radius: Optional[float] = None


@dataclass(frozen=True)
class CTrajectory:
    """Lifted modified-lattice solution: per time the ``b`` and ``c`` sequences and ``exp(int a_0)``."""

    times: tuple
    b: tuple
    c: tuple
    growth: tuple
    b0: float


def growth_factor(s0, t, radius=None, prec=None):
    """``exp(int_0^t a_0) = sum_m s_2m(0) t^m / m!``."""
    prec = prec or s0.prec or default_precision()
    with mpmath.workprec(prec + 16):
        return exponential_series(s0, 0, t, radius)


def lift(traj, b0=1.0):
    """Modified-lattice trajectory from a classical one and the free initial value ``b_0(0)``."""
    if not b0 > 0:
        raise ValidationError("b0 must be positive")
    prec = traj.s0.prec or default_precision()
    bs, cs, growth = [], [], []
    with mpmath.workprec(prec + 16):
        for t, a in zip(traj.times, traj.a):
            e = growth_factor(traj.s0, t, traj.radius, prec)
            b = [to_mpf(b0) * e]
            for x in getattr(a, "a", a):
                b.append(to_mpf(x) / b[-1])
            bs.append(tuple(b))
            cs.append(tuple(1 / v for v in b))
            growth.append(e)
    return CTrajectory(tuple(traj.times), tuple(bs), tuple(cs), tuple(growth), b0)


@dataclass(frozen=True)
class PiProducts:
    """``Pi_1^n`` and ``Pi_2^n`` for ``n = 0..n_max``, as logs and (in rational mode) exactly."""

    log_pi1: tuple
    log_pi2: tuple
    pi1: Optional[tuple] = None
    pi2: Optional[tuple] = None

    @property
    def log_ratio(self):
        with mpmath.workprec(max(mpmath.mp.prec, default_precision() + 16)):
            return tuple(x - y for x, y in zip(self.log_pi1, self.log_pi2))


def pi_products(h, n_max=None):
    """``Pi_1^n = D_1^2 D_3^2 ... D_{2n-1}^2 D_{2n+1} / (D_2^2 ... D_{2n}^2)`` and ``Pi_2^n = D_{2n+2} / (Pi_1^n D_{2n+1})``."""
    top = (len(h.dets) - 3) // 2
    n_max = top if n_max is None else n_max
    if n_max < 0 or n_max > top:
        raise ValidationError(f"Pi products up to n = {n_max} need Delta up to {2 * n_max + 2}; chain has {len(h.dets) - 1}")
    with mpmath.workprec((h.prec or default_precision()) + 16):
        return _pi_products(h, n_max)


def _pi_products(h, n_max):
    D = h.dets
    logs = [mpmath.log(to_mpf(d)) for d in D]
    lp1, lp2, e1, e2 = [], [], [], []
    acc = mpmath.mpf(0)  # log of D_1^2 D_3^2 ... D_{2n-1}^2 / (D_2^2 ... D_{2n}^2)
    exact_acc = Fraction(1)
    for n in range(n_max + 1):
        if n > 0:
            acc += 2 * (logs[2 * n - 1] - logs[2 * n])
        l1 = acc + logs[2 * n + 1]
        lp1.append(l1)
        lp2.append(logs[2 * n + 2] - l1 - logs[2 * n + 1])
        if h.exact:
            if n > 0:
                exact_acc *= (D[2 * n - 1] / D[2 * n]) ** 2
            p1 = exact_acc * D[2 * n + 1]
            e1.append(p1)
            e2.append(D[2 * n + 2] / (p1 * D[2 * n + 1]))
    return PiProducts(tuple(lp1), tuple(lp2), tuple(e1) if h.exact else None, tuple(e2) if h.exact else None)


def alternating_log_ratio(a, n):
    """``log((a_0 a_2 ... a_2n) / (a_1 a_3 ... a_{2n+1}))``."""
    with mpmath.workprec(max(mpmath.mp.prec, default_precision() + 16)):
        return mpmath.fsum(((-1) ** k) * mpmath.log(to_mpf(a[k])) for k in range(2 * n + 2))


@dataclass(frozen=True)
class XCondReport:
    """``x(t, n) = Pi_1^n / (exp(int s_2) Pi_2^n)`` by the determinant route, with the coefficient route alongside."""

    times: tuple
    ns: tuple
    ratio: tuple
    ratio_a: tuple
    limits: tuple
    verdict: str
    value: Optional[float] = None

    @property
    def identity_gap(self):
        return max(abs(x - y) / abs(y) for rx, ry in zip(self.ratio, self.ratio_a) for x, y in zip(rx, ry))


def xcond_estimate(m, times, ns, prec=None, tol=1e-8):
    """Table of ``x(t, n)`` over the grids with a verdict on constancy in ``t``.

    Each row is extrapolated in ``n`` (the last two entries must agree to
    ``tol``); the verdict is ``constant-x`` when all row limits agree,
    ``time-varying`` when they do not, and ``inconclusive`` when a row has not
    settled.
    """
    if m.unbounded or m.radius is None:
        raise ValidationError("the x condition needs a compactly supported measure")
    times = check_time_grid(times)
    ns = tuple(sorted(int(n) for n in ns))
    if not ns or ns[0] < 0:
        raise ValidationError("n grid must be nonnegative integers")
    K = 2 * ns[-1] + 2
    prec = prec or default_precision()
    R = m.radius
    M = max(required_moment_count(R, t, K, prec) for t in times)
    s0 = moments(m, M, prec=prec)
    table, table_a, limits = [], [], []
    settled = True
    with mpmath.workprec(prec + 16):
        for t in times:
            st = moments_at_time(s0, t, R, K, prec)
            h = hankel_determinants(st, K)
            pi = pi_products(h, ns[-1])
            e = growth_factor(s0, t, R, prec)
            a = [h.pivots[k + 1] / h.pivots[k] for k in range(K)]
            row = [mpmath.exp(pi.log_ratio[n]) / e for n in ns]
            row_a = [mpmath.exp(alternating_log_ratio(a, n)) / e for n in ns]
            table.append(tuple(row))
            table_a.append(tuple(row_a))
            limits.append(row[-1])
            if len(row) >= 2 and abs(row[-1] - row[-2]) > tol * abs(row[-1]):
                settled = False
    spread = max(limits) - min(limits)
    if not settled:
        verdict, value = "inconclusive", None
    elif spread <= tol * abs(limits[0]):
        verdict, value = "constant-x", float(limits[0])
    else:
        verdict, value = "time-varying", None
    return XCondReport(times, ns, tuple(table), tuple(table_a), tuple(limits), verdict, value)


def xcond_lattice_identity(c_traj, ns):
    """``b_0(0) c_{2n+2}(t)`` for each time, which equals ``x(t, n)``."""
    return tuple(tuple(c_traj.b0 * c[2 * n + 2] for n in ns) for c in c_traj.c)

