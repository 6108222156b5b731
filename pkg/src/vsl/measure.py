"""Even probability measures, their power moments and their Volterra-flow evolution.

A measure is an absolutely continuous even weight on ``(-c, c)`` plus mirror
pairs of point masses ``{+xi, -xi}`` outside the support. All integrals over the
continuous part are taken in the angle variable ``xi = c cos(theta)``, where every
preset weight becomes a smooth density ``q(theta)`` on ``[0, pi]``.

Weights and masses are stored as exact rationals after normalization, so total
mass is exactly one and exact-mode moments stay exact. Evolution by time ``t``
multiplies the measure by ``exp(xi**2 t)`` and renormalizes; it is stored as the
accumulated time rather than applied eagerly.
"""

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

import mpmath
from mpmath.calculus.quadrature import GaussLegendre

from ._errors import BlowUpError, ConvergenceError, TruncationError, ValidationError
from ._validation import default_precision

FAMILIES = ("semicircle", "arcsine", "gaussian", "chebyshev-series", "uniform")
EXACT_FAMILIES = ("semicircle", "arcsine", "gaussian", "uniform")
_PERIODIC = ("semicircle", "arcsine", "chebyshev-series")
MAX_TRAPEZOID_NODES = 2**20


def to_fraction(x):
    """Rational value of a float, int, Fraction or mpf.

    Floats go through their shortest repr, so ``0.9`` becomes ``9/10``; mpf
    values are converted exactly.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, mpmath.mpf):
        man, exp = x.man_exp
        man = int(man)
        return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)
    if isinstance(x, int):
        return Fraction(x)
    x = float(x)
    if not math.isfinite(x):
        raise ValidationError(f"non-finite value {x}")
    return Fraction(repr(x))


def to_mpf(x):
    """``mpf`` at the current working precision; rationals are rounded once."""
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


@dataclass(frozen=True)
class WeightSpec:
    """Absolutely continuous part of an even measure.

    ``chebyshev-series`` coefficients ``b_j`` give the angular density
    ``q(theta) = sum_j b_j cos(j theta)``, i.e. the weight relative to the arcsine
    law. Only even ``j`` may be nonzero. ``gap`` removes the weight on
    ``(-gap, gap)``.
    """

    family: str
    c: float = 2.0
    coeffs: tuple = ()
    gap: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown weight family {self.family!r}; expected one of {FAMILIES}")
        object.__setattr__(self, "coeffs", tuple(float(b) for b in self.coeffs))
        if self.family != "gaussian":
            if not (math.isfinite(self.c) and self.c > 0):
                raise ValidationError(f"support half-width must be positive, got {self.c}")
            if not 0 <= self.gap < self.c:
                raise ValidationError(f"gap must lie in [0, c), got {self.gap}")
        elif self.gap:
            raise ValidationError("the gaussian weight does not take a gap")
        if self.family == "chebyshev-series":
            self._check_series()
        elif self.coeffs:
            raise ValidationError(f"coefficients are only used by chebyshev-series, not {self.family}")

    def _check_series(self):
        b = self.coeffs
        if not b or b[0] <= 0:
            raise ValidationError("chebyshev-series needs a positive leading coefficient b_0")
        if any(v != 0 for v in b[1::2]):
            raise ValidationError("odd chebyshev coefficients must vanish for an even weight")
        n = 4096
        lowest = min(self.theta_density(math.pi * i / n) for i in range(n + 1))
        if lowest < -1e-12 * b[0]:
            raise ValidationError(f"chebyshev-series weight is negative somewhere (min {lowest:.3g})")

    @property
    def unbounded(self):
        return self.family == "gaussian"

    @property
    def smooth_periodic(self):
        return self.family in _PERIODIC and self.gap == 0

    @property
    def gap_angle(self):
        """Angle at which the gap starts; ``pi/2`` without a gap."""
        return math.acos(self.gap / self.c) if self.gap else math.pi / 2

    def theta_density(self, theta, lib=math):
        """Unnormalized angular density ``q(theta)``: ``d rho = q dtheta`` up to a constant."""
        if self.family == "semicircle":
            return lib.sin(theta) ** 2
        if self.family == "arcsine":
            return lib.cos(theta) * 0 + 1
        if self.family == "uniform":
            return lib.sin(theta)
        if self.family == "chebyshev-series":
            return sum(b * lib.cos(j * theta) for j, b in enumerate(self.coeffs) if b)
        raise ValidationError("the gaussian weight has no angular density")


@dataclass(frozen=True)
class PointMassList:
    """Mirror pairs ``(xi_j, w_j)``: mass ``w_j`` at each of ``+xi_j`` and ``-xi_j``.

    ``xi = 0`` is allowed for pure point measures and then denotes a single atom
    of mass ``2 w``.
    """

    entries: tuple = ()

    def __post_init__(self):
        entries = tuple((to_fraction(xi), to_fraction(w)) for xi, w in self.entries)
        for xi, w in entries:
            if xi < 0:
                raise ValidationError(f"point locations are given by their positive member, got {float(xi)}")
            if w <= 0:
                raise ValidationError(f"point masses must be positive, got {float(w)}")
        if any(b[0] >= a[0] for a, b in zip(entries, entries[1:])):
            raise ValidationError("point locations must be strictly decreasing")
        object.__setattr__(self, "entries", entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def total_mass(self):
        return sum((2 * w for _, w in self.entries), Fraction(0))


@dataclass(frozen=True)
class EvenMeasure:
    """Even probability measure, optionally evolved by the Volterra flow.

    ``ac_mass`` and the point weights describe the measure at flow time zero and
    sum to one exactly. ``t`` is the accumulated evolution time and
    ``normalization`` the total mass of the raw input before normalizing.
    """

    ac: Optional[WeightSpec]
    ac_mass: Fraction
    points: PointMassList = field(default_factory=PointMassList)
    t: Fraction = Fraction(0)
    normalization: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "ac_mass", to_fraction(self.ac_mass))
        object.__setattr__(self, "t", to_fraction(self.t))
        if not isinstance(self.points, PointMassList):
            object.__setattr__(self, "points", PointMassList(tuple(self.points)))
        if self.ac_mass < 0 or (self.ac_mass > 0) != (self.ac is not None):
            raise ValidationError("ac_mass must be positive exactly when a weight is given")
        if self.ac_mass + self.points.total_mass != 1:
            raise ValidationError("measure is not normalized; build it with normalize()")
        if self.ac is not None:
            if self.ac.unbounded and len(self.points):
                raise ValidationError("the gaussian weight has full support; point masses cannot lie outside it")
            for xi, _ in self.points:
                if xi <= to_fraction(self.ac.c):
                    raise ValidationError(f"point mass at {float(xi)} lies inside the support [-c, c]")
        if self.t < 0:
            raise ValidationError("evolution time must be nonnegative")
        if self.unbounded and self.t >= 1:
            raise BlowUpError("the gaussian lattice blows up at finite time T = 1")

    @property
    def unbounded(self):
        return self.ac is not None and self.ac.unbounded

    @property
    def c(self):
        return None if self.ac is None or self.ac.unbounded else self.ac.c

    @property
    def radius(self):
        """Bound ``R`` on the support, so that ``s_2m <= R**2m``; ``None`` if unbounded."""
        if self.unbounded:
            return None
        r = max((float(xi) for xi, _ in self.points), default=0.0)
        return max(r, self.ac.c) if self.ac is not None else r

    @property
    def has_infinitely_many_growth_points(self):
        return self.ac_mass > 0

    def exact_available(self):
        return self.ac is None or (
            self.ac.family in EXACT_FAMILIES and self.ac.gap == 0 and (self.t == 0 or self.unbounded)
        )


def normalize(ac, ac_mass, points=()):
    """Scale the weight and point masses so the measure has total mass one."""
    ac_mass = to_fraction(ac_mass)
    if not isinstance(points, PointMassList):
        points = PointMassList(tuple(points))
    if ac_mass < 0:
        raise ValidationError("ac mass must be nonnegative")
    total = ac_mass + points.total_mass
    if total <= 0:
        raise ValidationError("measure has no mass")
    if ac is None and ac_mass:
        raise ValidationError("ac mass given without a weight")
    scaled = PointMassList(tuple((xi, w / total) for xi, w in points))
    return EvenMeasure(ac if ac_mass else None, ac_mass / total, scaled, Fraction(0), total)


def evolve(m, t):
    """Measure of the lattice after time ``t``: ``K(t) exp(xi**2 t) d rho``."""
    t = to_fraction(t)
    if t < 0:
        raise ValidationError("evolution time must be nonnegative")
    if m.unbounded and m.t + t >= 1:
        raise BlowUpError(f"gaussian measure blows up at finite T = 1 (requested t = {float(m.t + t)})")
    return replace(m, t=m.t + t)


@dataclass(frozen=True)
class MomentSequence:
    """Power moments ``s_0..s_2K`` (odd entries zero)."""

    values: tuple
    K: int
    provenance: str = "quadrature"
    exact: bool = False
    prec: Optional[int] = None

    def __post_init__(self):
        if len(self.values) != 2 * self.K + 1:
            raise ValidationError(f"expected {2 * self.K + 1} moments, got {len(self.values)}")
        if self.provenance not in ("quadrature", "closed-form", "evolved-series", "spectral"):
            raise ValidationError(f"unknown provenance {self.provenance!r}")

    def __len__(self):
        return len(self.values)

    def __getitem__(self, k):
        return self.values[k]

    @property
    def even(self):
        return self.values[::2]

    @classmethod
    def from_even(cls, even, provenance="quadrature", exact=False, prec=None):
        zero = Fraction(0) if exact else mpmath.mpf(0)
        values = []
        for s in even:
            values.extend((s, zero))
        return cls(tuple(values[:-1]), len(even) - 1, provenance, exact, prec)


def _catalan(k):
    return Fraction(math.comb(2 * k, k), k + 1)


def _double_factorial_odd(k):
    out = 1
    for j in range(1, 2 * k, 2):
        out *= j
    return out


def _exact_base_moment(spec, k, t=Fraction(0)):
    """``int xi**2k`` against the unit-mass weight (exact rational)."""
    if spec.family == "gaussian":
        return Fraction(_double_factorial_odd(k)) / (2 * (1 - t)) ** k
    c2 = to_fraction(spec.c) ** 2
    if spec.family == "semicircle":
        return _catalan(k) * (c2 / 4) ** k
    if spec.family == "arcsine":
        return math.comb(2 * k, k) * (c2 / 4) ** k
    if spec.family == "uniform":
        return c2**k / (2 * k + 1)
    raise ValidationError(f"no exact moments for {spec.family}")


def _trapezoid(spec, J, t, tol):
    """``int_0^pi (c cos th)^2j exp(t c^2 cos^2 th) q(th) dth`` for ``j <= J`` by trapezoid doubling."""
    c2 = to_mpf(to_fraction(spec.c)) ** 2
    tt = to_mpf(t)

    def rule(n):
        h = mpmath.pi / n
        out = [mpmath.mpf(0)] * (J + 1)
        for i in range(n + 1):
            th = h * i
            x = c2 * mpmath.cos(th) ** 2
            v = spec.theta_density(th, mpmath) * h
            if tt:
                v *= mpmath.exp(tt * x)
            if i == 0 or i == n:
                v /= 2
            for j in range(J + 1):
                out[j] += v
                v *= x
        return out

    n = 16
    while n < J + 4:
        n *= 2
    prev = rule(n)
    while True:
        n *= 2
        if n > MAX_TRAPEZOID_NODES:
            raise ConvergenceError(f"trapezoid rule did not converge with {MAX_TRAPEZOID_NODES} nodes")
        cur = rule(n)
        if all(abs(a - b) <= tol * abs(a) for a, b in zip(cur, prev)):
            return cur
        prev = cur


def _gauss_legendre(spec, J, t, tol, prec):
    """Same integrals for non-periodic angular densities, on ``[0, gap angle]`` doubled."""
    c2 = to_mpf(to_fraction(spec.c)) ** 2
    tt = to_mpf(t)
    upper = mpmath.acos(to_mpf(to_fraction(spec.gap)) / mpmath.sqrt(c2)) if spec.gap else mpmath.pi / 2
    gl = GaussLegendre(mpmath.mp)

    def rule(degree):
        out = [mpmath.mpf(0)] * (J + 1)
        for u, wu in gl.calc_nodes(degree, prec):
            th = (u + 1) * upper / 2
            x = c2 * mpmath.cos(th) ** 2
            v = spec.theta_density(th, mpmath) * wu * upper  # doubled half-interval
            if tt:
                v *= mpmath.exp(tt * x)
            for j in range(J + 1):
                out[j] += v
                v *= x
        return out

    degree = 4
    prev = rule(degree)
    while True:
        degree += 1
        if 3 * 2 ** (degree - 1) > MAX_TRAPEZOID_NODES:
            raise ConvergenceError("Gauss-Legendre rule did not converge")
        cur = rule(degree)
        if all(abs(a - b) <= tol * abs(a) for a, b in zip(cur, prev)):
            return cur
        prev = cur


def ac_integrals(spec, J, t=0, prec=None):
    """Raw angular integrals of ``xi**2j exp(t xi**2)`` over the continuous part, ``j = 0..J``."""
    prec = prec or default_precision()
    with mpmath.workprec(prec + 16):
        tol = mpmath.mpf(2) ** (-prec)
        if spec.smooth_periodic:
            return _trapezoid(spec, J, t, tol)
        return _gauss_legendre(spec, J, t, tol, prec + 16)


def _point_terms(m, t):
    """``(xi**2, 2 w exp(t xi**2))`` per mirror pair."""
    return [(to_mpf(xi) ** 2, 2 * to_mpf(w) * mpmath.exp(to_mpf(t) * to_mpf(xi) ** 2)) for xi, w in m.points]


def moments(m, K, prec=None, exact=False):
    """Even power moments ``s_0..s_2K`` of ``m`` (odd entries are zero).

    Exact mode returns rationals for the semicircle, arcsine, gaussian and
    uniform presets at flow time zero (gaussian at any rational time).
    """
    if K < 0:
        raise ValidationError("K must be nonnegative")
    if exact:
        if not m.exact_available():
            raise ValidationError("exact moments are only available for unevolved presets without a gap")
        even = []
        for k in range(K + 1):
            s = sum((2 * w * xi ** (2 * k) for xi, w in m.points), Fraction(0))
            if m.ac is not None:
                s += m.ac_mass * _exact_base_moment(m.ac, k, m.t)
            even.append(s)
        return MomentSequence.from_even(even, "closed-form", exact=True)

    prec = prec or default_precision()
    with mpmath.workprec(prec + 16):
        if m.unbounded:
            even = [to_mpf(_exact_base_moment(m.ac, k, m.t)) for k in range(K + 1)]
            return MomentSequence.from_even(even, "closed-form", prec=prec)
        t = to_mpf(m.t)
        acc = [mpmath.mpf(0)] * (K + 1)
        provenance = "spectral"
        if m.ac is not None:
            provenance = "quadrature"
            raw = ac_integrals(m.ac, K, m.t, prec)
            base = raw if not m.t else ac_integrals(m.ac, 0, 0, prec)
            scale = to_mpf(m.ac_mass) / base[0]
            acc = [scale * r for r in raw]
        for x2, wt in _point_terms(m, t):
            for k in range(K + 1):
                acc[k] += wt
                wt *= x2
        z = acc[0]
        even = [s / z for s in acc]
    with mpmath.workprec(prec):
        even = [+s for s in even]
    return MomentSequence.from_even(even, provenance, prec=prec)


def evolution_normalizer(m, prec=None):
    """``int exp(xi**2 t) d rho(xi, 0)`` for the accumulated time of ``m``."""
    if m.unbounded:
        return 1 / mpmath.sqrt(1 - to_mpf(m.t))
    prec = prec or default_precision()
    with mpmath.workprec(prec + 16):
        t = to_mpf(m.t)
        z = mpmath.mpf(0)
        if m.ac is not None:
            raw = ac_integrals(m.ac, 0, m.t, prec)[0]
            base = ac_integrals(m.ac, 0, 0, prec)[0]
            z += to_mpf(m.ac_mass) * raw / base
        for x2, wt in _point_terms(m, t):
            z += wt
    with mpmath.workprec(prec):
        return +z


def _tolerance(prec):
    return mpmath.mpf(10) ** (-(int(prec * math.log10(2)) + 5))


def exponential_series(s0, k, t, radius=None, tol=None, max_terms=None):
    """``sum_m s_2(k+m)(0) t**m / m!`` with a rigorous tail bound when ``radius`` is known.

    Without a radius the tail is bounded by the observed term ratio, which is
    adequate for moment sequences whose term ratios increase monotonically to
    their limit (the gaussian family).
    """
    even = s0.even
    t = to_mpf(t)
    if t == 0:
        return to_mpf(even[k])
    tol = tol if tol is not None else _tolerance(s0.prec or default_precision())
    limit = len(even) - k if max_terms is None else min(max_terms, len(even) - k)
    total = mpmath.mpf(0)
    term_scale = mpmath.mpf(1)  # t**m / m!
    prev_term = None
    ratios = []
    R2t = None if radius is None else to_mpf(radius) ** 2 * t
    partial = []
    for m in range(limit):
        term = to_mpf(even[k + m]) * term_scale
        total += term
        partial.append(total)
        if R2t is not None:
            # majorant R^2(k+m') t^m'/m' summed over m' > m
            nxt = to_mpf(radius) ** (2 * k) * term_scale * R2t / (m + 1)
            if m + 2 > R2t:
                bound = nxt / (1 - R2t / (m + 2))
                if bound <= tol * abs(total):
                    return total
        else:
            if prev_term:
                ratios.append(term / prev_term)
            if len(ratios) >= 2:
                q = max(ratios[-1], ratios[-2])
                if q < 1 and term * q / (1 - q) <= tol * abs(total):
                    return total
        prev_term = term
        term_scale = term_scale * t / (m + 1)
    raise TruncationError(
        f"series for s_{2 * k}(t={float(t)}) did not meet its tail bound within {limit} terms",
        partial_sums=partial[-3:],
    )


def moments_at_time(s0, t, radius=None, K=None, prec=None):
    """Moments of the evolved measure from the initial moments alone.

    ``s_2k(t) = sum_m s_2(k+m)(0) t^m/m! / sum_m s_2m(0) t^m/m!``. ``K`` output
    moments ``s_0..s_2K``; by default as many as the input length supports.
    """
    prec = prec or s0.prec or default_precision()
    if t < 0:
        raise ValidationError("t must be nonnegative")
    if t == 0:
        return s0 if K is None else MomentSequence(s0.values[: 2 * K + 1], K, s0.provenance, s0.exact, s0.prec)
    with mpmath.workprec(prec + 16):
        tol = _tolerance(prec)
        den = exponential_series(s0, 0, t, radius, tol)
        even = []
        k = 0
        while K is None or k <= K:
            try:
                num = exponential_series(s0, k, t, radius, tol)
            except TruncationError:
                if K is None and k > 0:
                    break
                raise
            even.append(num / den)
            k += 1
    with mpmath.workprec(prec):
        even = [+s for s in even]
    return MomentSequence.from_even(even, "evolved-series", prec=prec)


def required_moment_count(radius, t, K, prec):
    """Number ``M`` such that initial moments ``s_0..s_2M`` suffice for ``K`` evolved outputs.

    Chooses the series length where the majorant ``(R^2 t)^m / m!`` drops below
    the working tolerance with ten digits of margin; callers retry with more
    moments if the rigorous tail check still fails.
    """
    if t == 0:
        return K
    digits = prec * math.log10(2) + 15
    R2t = radius**2 * t
    m, log_term = 0, 0.0
    while m <= 2 * R2t or log_term > -digits:
        m += 1
        log_term += math.log10(R2t / m)
        if m > 100000:
            raise TruncationError("series length estimate exceeded 1e5 terms")
    return K + m + 2


def _classify_edge_trend(increments, window=6, shrink=0.75):
    """Finite/infinite verdict from integrals over successively halved edge intervals."""
    run = 0
    sign = 0
    for prev, cur in zip(increments, increments[1:]):
        s = (cur > 0) - (cur < 0)
        if s != 0 and s == ((prev > 0) - (prev < 0)) and abs(cur) >= shrink * abs(prev):
            run = run + 1 if s == sign else 1
            sign = s
            if run >= window:
                return -math.inf if sign < 0 else math.inf
        else:
            run = 0
    return None


def log_integral(log_density, c, gap=0.0, dps=30, levels=30):
    """``int_{-c}^{c} log rho'(xi) / sqrt(c^2 - xi^2) dxi`` as ``2 int_0^{pi/2} log rho'(c cos th) dth``.

    ``log_density`` maps an angle to ``log rho'(c cos theta)``. A weight that
    vanishes on ``(-gap, gap)`` gives ``-inf``. Otherwise the integral over
    dyadic intervals approaching the edge ``theta = 0`` is monitored; six
    consecutive non-shrinking increments of one sign classify the integral as
    divergent.
    """
    if gap > 0:
        return -math.inf
    with mpmath.workdps(dps):
        eps = [mpmath.pi / 4 / mpmath.mpf(2) ** j for j in range(levels + 1)]
        incs = [2 * mpmath.quad(log_density, [eps[j], eps[j - 1]]) for j in range(1, levels + 1)]
        verdict = _classify_edge_trend(incs)
        if verdict is not None:
            return verdict
        val = 2 * mpmath.quad(log_density, [0, mpmath.pi / 4, mpmath.pi / 2])
        if not mpmath.isfinite(val):
            return -math.inf if val < 0 else math.inf
        return val


def szego_integral(m, dps=30):
    """Szego integral ``int_{-c}^{c} log rho'(xi) / sqrt(c^2 - xi^2) dxi`` of the continuous part.

    Returns an ``mpf`` or ``-inf`` for a weight vanishing on a subinterval.
    """
    if m.ac is None:
        raise ValidationError("the measure has no absolutely continuous part")
    if m.unbounded:
        raise ValidationError("the gaussian weight has unbounded support; the Szego integral is undefined")
    spec = m.ac
    with mpmath.workdps(dps + 10):
        prec = mpmath.mp.prec
        base = ac_integrals(spec, 0, 0, prec)[0]
        z = evolution_normalizer(m, prec)
        c = to_mpf(to_fraction(spec.c))
        const = mpmath.log(to_mpf(m.ac_mass) / (base * z * c))
        t = to_mpf(m.t)

        def log_density(th):
            q = spec.theta_density(th, mpmath)
            if q <= 0:
                return mpmath.mpf("-inf")
            return const + t * (c * mpmath.cos(th)) ** 2 + mpmath.log(q) - mpmath.log(mpmath.sin(th))

        return log_integral(log_density, spec.c, spec.gap, dps)
