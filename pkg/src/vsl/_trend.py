"""Convergence verdicts for partial-sum tables.

Every diagnostic in the package is an asymptotic statement about an infinite
series, evaluated from finitely many terms. These helpers report evidence:
``finite`` when the tail is Cauchy, ``+inf``/``-inf`` when the partial sums
drift steadily in one direction, and ``inconclusive`` otherwise.
"""

import math
from dataclasses import dataclass

WINDOW = 8
DEFAULT_BOUND = 1e6


@dataclass(frozen=True)
class SeriesReport:
    """Partial sums of a series with a limit estimate and verdict.

    ``last`` holds the final three partial sums for auditing.
    """

    partial_sums: tuple
    limit: float
    verdict: str

    @property
    def last(self):
        return self.partial_sums[-3:]

    @property
    def finite(self):
        return self.verdict == "finite"


def series_verdict(partial_sums, tol=1e-10, window=WINDOW, bound=DEFAULT_BOUND):
    """Classify a sequence of partial sums.

    Convergent: the last ``window`` increments are all below ``tol`` (relative to
    ``max(1, |S|)``), or they decay geometrically with a tail bound below ``tol``.
    Divergent: the last ``window`` increments, taken one or two steps at a time
    (period-two oscillation is common for Jacobi coefficients), share a sign and
    decay no faster than ``1/n``, or the sums pass ``bound`` with a fixed sign.
    """
    sums = [float(s) for s in partial_sums]
    if not sums:
        return SeriesReport((), 0.0, "inconclusive")
    incs = [sums[0]] + [b - a for a, b in zip(sums, sums[1:])]
    last = sums[-1]
    scale = max(1.0, abs(last))
    if len(incs) >= window:
        tail = incs[-window:]
        if all(abs(d) <= tol * scale for d in tail):
            return SeriesReport(tuple(sums), last, "finite")
        mags = [abs(d) for d in tail]
        if all(m > 0 for m in mags):
            q = max(b / a for a, b in zip(mags, mags[1:]))
            if q < 0.9 and mags[-1] * q / (1 - q) <= tol * scale:
                return SeriesReport(tuple(sums), last + tail[-1] * q / (1 - q), "finite")
    for stride in (1, 2):
        sign = _divergent_sign(sums, stride, window, bound)
        if sign:
            return SeriesReport(tuple(sums), sign * math.inf, "+inf" if sign > 0 else "-inf")
    return SeriesReport(tuple(sums), last, "inconclusive")


def _divergent_sign(sums, stride, window, bound):
    n = len(sums)
    idx = [n - 1 - stride * j for j in range(window)][::-1]
    if idx[0] - stride < -1:
        return 0
    steps = [sums[k] - (sums[k - stride] if k - stride >= 0 else 0.0) for k in idx]
    signs = {(d > 0) - (d < 0) for d in steps}
    if len(signs) != 1 or 0 in signs:
        return 0
    sign = signs.pop()
    if abs(sums[-1]) > bound and (sums[-1] > 0) == (sign > 0):
        return sign
    # least-squares slope of log|step| against log(index)
    xs = [math.log(k + 1) for k in idx]
    ys = [math.log(abs(d)) for d in steps]
    mx, my = sum(xs) / window, sum(ys) / window
    sxx = sum((x - mx) ** 2 for x in xs)
    slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx
    return sign if slope >= -1 - 1e-9 else 0


def partial_sums(terms):
    out, acc = [], 0.0
    for x in terms:
        acc += x
        out.append(acc)
    return out
