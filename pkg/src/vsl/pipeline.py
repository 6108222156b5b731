"""End-to-end procedures: measure to lattice, the modified chain, and the converse direction.

``spectral_solve`` evolves a measure, takes its moments and reconstructs the
coefficients by Hankel determinants at every requested time.
``cross_validate`` integrates the same initial lattice in the time domain and
compares. ``modified_solve`` lifts the solution to the modified lattice, and
``correspond`` runs the converse from a finite coefficient list to its spectral
data.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath
import numpy as np

from ._errors import BlowUpError, NumericalError, PositivityError, PrecisionError, ValidationError
from ._validation import MAX_PRECISION_BITS, check_count, check_time_grid, default_precision
from .diagnostics import diagnose, hundertmark_simon_check, log_hamiltonian, py_sum
from .dynamics import LatticeState, integrate, modified_rhs
from .hankel import delcond_ratios, hankel_determinants, jacobi_from_moments
from .jacobi import eigendecompose, finite_spectral_measure, truncate
from .measure import (
    EvenMeasure,
    evolve,
    moments,
    moments_at_time,
    required_moment_count,
    to_fraction,
)
from .modvolterra import ATrajectory, CTrajectory, XCondReport, lift, reduce, xcond_estimate

MODES = ("semi-infinite", "modified", "diagnostics-only")


def required_precision(N, radius):
    """Working bits for ``N`` coefficients: ``64 + 8 N ln(max(2, R))``."""
    R = 2.0 if radius is None else max(2.0, radius)
    return int(math.ceil(64 + 8 * N * math.log(R)))


@dataclass(frozen=True)
class SolveRequest:
    measure: EvenMeasure
    times: tuple = (0.0,)
    N: int = 16
    precision: Optional[int] = None
    mode: str = "semi-infinite"
    exact: bool = False
    verify: bool = False

    def __post_init__(self):
        if not isinstance(self.measure, EvenMeasure):
            raise ValidationError("measure must be an EvenMeasure")
        object.__setattr__(self, "times", check_time_grid(self.times))
        check_count(self.N, "N")
        if self.mode not in MODES:
            raise ValidationError(f"unknown mode {self.mode!r}")
        if self.measure.unbounded and self.times[-1] + float(self.measure.t) >= 1:
            raise BlowUpError("the gaussian lattice blows up at T = 1")


@dataclass
class SolveResult:
    """Per-time coefficients and Hankel chains with attached diagnostics."""

    times: tuple
    coefficients: list
    chains: list
    delcond: list
    diagnostics: dict = field(default_factory=dict)
    route_gap: list = field(default_factory=list)
    precision: Optional[int] = None
    initial_moments: object = None
    radius: Optional[float] = None

    def a(self, i):
        return self.coefficients[i].a


def _solve_at(m, t, N, prec, exact, s0, radius, verify):
    """Moments at time ``t`` and the reconstruction; returns (coefficients, chain, route gap)."""
    gap = None
    if exact:
        st = moments(evolve(m, to_fraction(t)), N, exact=True)
    elif m.unbounded or s0 is None:
        st = moments(evolve(m, to_fraction(t)), N, prec=prec)
    else:
        st = moments_at_time(s0, t, radius, N, prec)
        if verify and t:
            other = moments(evolve(m, to_fraction(t)), N, prec=prec)
            with mpmath.workprec(prec):
                gap = max(abs(x - y) / abs(y) for x, y in zip(st.even, other.even))
    chain = hankel_determinants(st, N, strict=False, prec=prec)
    coeffs = jacobi_from_moments(st, N, prec=prec, c=m.c)
    return coeffs, chain, gap


def spectral_solve(req):
    """Coefficients ``a_0..a_{N-1}`` at each requested time, by the spectral route.

    Moments at ``t > 0`` come from the exponential series of the initial moments
    when a support radius is known and from the closed form for the gaussian.
    With ``verify`` the series moments are checked against quadrature on the
    evolved measure. Precision starts at ``64 + 8 N ln(max(2, R))`` bits (or the
    request, if higher) and doubles on a certification failure up to 4096 bits.
    """
    m, N = req.measure, req.N
    radius = m.radius
    exact = req.exact and m.exact_available()
    if req.exact and (not exact or (any(req.times) and not m.unbounded)):
        raise ValidationError("exact mode needs a preset measure with rational moments at every requested time")
    prec = max(req.precision or default_precision(), required_precision(N, radius))
    while True:
        try:
            return _spectral_solve(req, prec, exact)
        except (PrecisionError, PositivityError) as exc:
            if exact or prec * 2 > MAX_PRECISION_BITS:
                raise PrecisionError(f"could not certify the reconstruction at {prec} bits: {exc}") from exc
            prec *= 2


def _spectral_solve(req, prec, exact):
    m, N = req.measure, req.N
    radius = m.radius
    s0 = None
    with mpmath.workprec(prec + 16):
        if not exact and radius is not None and any(req.times):
            M = max(required_moment_count(radius, t, N, prec) for t in req.times)
            s0 = moments(m, M, prec=prec)
        init = s0 if s0 is not None else moments(m, N, prec=None if exact else prec, exact=exact)
        res = SolveResult(req.times, [], [], [], precision=None if exact else prec, initial_moments=init, radius=radius)
        for t in req.times:
            coeffs, chain, gap = _solve_at(m, t, N, prec, exact, s0, radius, req.verify)
            res.coefficients.append(coeffs)
            res.chains.append(chain)
            res.delcond.append(delcond_ratios(chain))
            res.route_gap.append(gap)
    if not m.unbounded:
        c = float(m.c) if m.c else 2.0
        pts = m.points if m.ac is not None else None
        res.diagnostics[res.times[0]] = diagnose(res.coefficients[0], c, pts)
        res.diagnostics[res.times[-1]] = diagnose(res.coefficients[-1], c, pts)
    else:
        res.diagnostics[res.times[0]] = log_hamiltonian(res.coefficients[0])
        res.diagnostics[res.times[-1]] = log_hamiltonian(res.coefficients[-1])
    return res


@dataclass(frozen=True)
class CrossValidation:
    """Spectral versus time-domain coefficients on the first ``N`` sites."""

    times: tuple
    spectral: tuple
    ode: tuple
    max_diff: tuple
    window: int
    step: float
    trust: tuple

    @property
    def worst(self):
        return max(self.max_diff)


def cross_validate(req, window=24, step=1e-3):
    """Compare ``spectral_solve`` with fourth-order integration from the same ``a(0)``.

    The ODE route starts from ``window`` spectral coefficients at ``t = 0`` and
    closes the right edge by freezing; only the first ``N`` sites are compared.
    """
    if window < req.N:
        raise ValidationError("the ODE window must be at least N")
    times = tuple(sorted({0.0} | set(req.times)))
    base = spectral_solve(SolveRequest(req.measure, (0.0,), window, req.precision))
    spec = spectral_solve(SolveRequest(req.measure, times, req.N, req.precision))
    a0 = [float(x) for x in base.coefficients[0].a]
    tr = integrate(LatticeState(tuple(a0), "semi-infinite", "frozen"), times[-1], step, times)
    if tr.positivity_lost:
        raise NumericalError("the ODE route lost positivity")
    spectral, ode, diffs = [], [], []
    for i, t in enumerate(times):
        sa = np.array([float(x) for x in spec.coefficients[i].a])
        oa = tr.states[i][: req.N]
        spectral.append(tuple(sa))
        ode.append(tuple(oa))
        diffs.append(float(np.max(np.abs(sa - oa))))
    return CrossValidation(times, tuple(spectral), tuple(ode), tuple(diffs), window, step, tuple(tr.trust))


@dataclass
class ModifiedResult:
    solve: SolveResult
    lifted: CTrajectory
    xcond: Optional[XCondReport]
    b0: float


def measure_from_coefficients(a, prec=None):
    """Spectral measure of the finite lattice ``a`` (section of size ``len(a) + 1``)."""
    a = getattr(a, "a", a)
    return finite_spectral_measure(a, len(a) + 1, prec)


def modified_solve(req, b0=None, c0=None, xcond_ns=None):
    """Modified-lattice solution by reduction, spectral solve and lift.

    Either ``req.measure`` supplies the classical data or ``c0`` does; in the
    latter case the finite lattice ``reduce(c0)`` is solved through its own
    spectral measure and ``b0`` defaults to ``1 / c0[0]`` so that ``t = 0``
    reproduces ``c0``.
    """
    if c0 is not None:
        a0 = reduce(c0)
        prec = req.precision or default_precision()
        m = measure_from_coefficients(a0, prec)
        b0 = float(1 / c0[0]) if b0 is None else b0
        req = SolveRequest(m, req.times, min(req.N, len(a0)), req.precision, "modified")
    b0 = 1.0 if b0 is None else b0
    sol = spectral_solve(req)
    traj = ATrajectory(sol.times, tuple(sol.coefficients), sol.initial_moments, sol.radius)
    lifted = lift(traj, b0)
    xc = None
    if xcond_ns and not req.measure.unbounded:
        xc = xcond_estimate(req.measure, sol.times, xcond_ns, sol.precision)
    return ModifiedResult(sol, lifted, xc, b0)


@dataclass(frozen=True)
class MvolResidual:
    times: tuple
    residual: tuple

    @property
    def worst(self):
        return max(self.residual)


def mvol_residual(m, times, N=8, b0=1.0, h=1e-4, prec=None):
    """Finite-difference residual of the modified lattice along the lifted solution.

    ``c'`` is estimated by central differences with step ``h`` (one-sided second
    order at ``t = 0``) and compared with ``1/c_{n-1} - 1/c_{n+1}`` on
    ``n = 0..N-1``; the result is scaled by ``max(1, |c'|)``.
    """
    out = []
    for t in check_time_grid(times):
        grid = (t, t + h, t + 2 * h) if t < h else (t - h, t, t + h)
        sol = spectral_solve(SolveRequest(m, grid, N + 1, prec))
        traj = ATrajectory(sol.times, tuple(sol.coefficients), sol.initial_moments, sol.radius)
        cs = [np.array([float(x) for x in c]) for c in lift(traj, b0).c]
        if t < h:
            deriv = (-3 * cs[0] + 4 * cs[1] - cs[2]) / (2 * h)
            here = cs[0]
        else:
            deriv = (cs[2] - cs[0]) / (2 * h)
            here = cs[1]
        rhs = modified_rhs(here)[:N]
        d = deriv[:N]
        out.append(float(np.max(np.abs(d - rhs) / np.maximum(1.0, np.abs(rhs)))))
    return MvolResidual(tuple(check_time_grid(times)), tuple(out))


@dataclass
class CorrespondReport:
    """Spectral side of a finite coefficient list."""

    measure: EvenMeasure
    eigenvalues: tuple
    weights: tuple
    szego: float
    outside: tuple
    py: object
    hs: object
    delcond: object
    hamiltonian: object
    c: float = 2.0


def _szego_from_points(lam, mu, c):
    """``int_0^pi ln rho'(c cos th) dth`` with the density estimated from a discrete measure.

    Eigenvalues inside ``(-c, c)`` are mapped to angles; each carries the angle
    cell between its neighbours' midpoints, and the density is its weight over
    the cell length in ``xi``.
    """
    inside = [(math.acos(l / c), w) for l, w in zip(lam, mu) if abs(l) < c]
    if len(inside) < 2:
        return -math.inf
    inside.sort()
    th = [x for x, _ in inside]
    total = 0.0
    for i, (theta, w) in enumerate(inside):
        lo = 0.0 if i == 0 else (th[i - 1] + theta) / 2
        hi = math.pi if i == len(th) - 1 else (theta + th[i + 1]) / 2
        cell = hi - lo
        if w <= 0:
            return -math.inf
        total += (math.log(w) - math.log(c * math.sin(theta) * cell)) * cell
    return total


def correspond(a0, c=2.0, prec=None):
    """Converse direction at desk scale: the finite lattice ``a0`` and its spectral data."""
    a = getattr(a0, "a", a0)
    N = len(a) + 1
    T = truncate(a, N)
    spec = eigendecompose(T)
    lam = [float(x) for x in spec.eigenvalues]
    mu = [float(x) for x in spec.weights]
    outside = tuple(x for x in lam if x > c)
    hs = hundertmark_simon_check(truncate([x * 4 / c**2 for x in (float(v) for v in a)], N))
    m = measure_from_coefficients(a, prec)
    s = moments(m, N - 1, prec=prec or default_precision())
    chain = hankel_determinants(s, strict=False)
    return CorrespondReport(
        measure=m,
        eigenvalues=tuple(lam),
        weights=tuple(mu),
        szego=_szego_from_points(lam, mu, c),
        outside=outside,
        py=py_sum([(to_fraction(x), 0) for x in outside], c) if outside else Fraction(0),
        hs=hs,
        delcond=delcond_ratios(chain),
        hamiltonian=log_hamiltonian(a),
        c=float(c),
    )

