"""Finite sections of the Lax matrix, their spectra, and the Weyl function.

Float sections are diagonalized with LAPACK through ``numpy.linalg.eigh``;
sections holding ``mpf`` entries go through ``mpmath.eigsy`` at the working
precision. Either way eigenvalues come out ascending and weights are the squared
first components of the normalized eigenvectors.
"""

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from ._errors import ConditioningError, ConvergenceError, PoleError, ValidationError
from ._validation import check_count, check_positive_sequence
from .measure import (
    MAX_TRAPEZOID_NODES,
    EvenMeasure,
    ac_integrals,
    evolution_normalizer,
    normalize,
    to_fraction,
    to_mpf,
)

GUARD = 1e-6


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Symmetric tridiagonal matrix; ``diag`` has length N, ``off`` length N - 1."""

    diag: tuple
    off: tuple

    def __post_init__(self):
        object.__setattr__(self, "diag", tuple(self.diag))
        object.__setattr__(self, "off", tuple(self.off))
        if len(self.diag) < 1 or len(self.off) != len(self.diag) - 1:
            raise ValidationError("off-diagonal must be one shorter than the diagonal")
        if any(not w > 0 for w in self.off):
            raise ValidationError("off-diagonal entries must be positive")

    @property
    def N(self):
        return len(self.diag)

    @property
    def high_precision(self):
        return any(isinstance(v, mpmath.mpf) for v in self.diag + self.off)

    def dense(self):
        """Dense ``numpy`` float matrix."""
        N = self.N
        M = np.zeros((N, N))
        M[np.arange(N), np.arange(N)] = [float(v) for v in self.diag]
        if N > 1:
            off = [float(w) for w in self.off]
            M[np.arange(N - 1), np.arange(1, N)] = off
            M[np.arange(1, N), np.arange(N - 1)] = off
        return M

    def mp_dense(self):
        N = self.N
        M = mpmath.zeros(N, N)
        for i, v in enumerate(self.diag):
            M[i, i] = to_mpf(v)
        for i, w in enumerate(self.off):
            M[i, i + 1] = M[i + 1, i] = to_mpf(w)
        return M


@dataclass(frozen=True)
class TruncatedSpectrum:
    """Ascending eigenvalues with spectral weights at ``e_0`` (summing to one)."""

    eigenvalues: tuple
    weights: tuple

    def __len__(self):
        return len(self.eigenvalues)


@dataclass(frozen=True)
class WeylEval:
    z: complex
    value: complex

    @property
    def herglotz(self):
        """``Im m(z) Im z < 0`` (vacuous on the real axis)."""
        return self.z.imag == 0 or self.value.imag * self.z.imag < 0


def _sqrt(v, prec):
    if prec is None:
        return math.sqrt(float(v))
    with mpmath.workprec(prec):
        return mpmath.sqrt(to_mpf(v))


def truncate(a, N, prec=None):
    """``N x N`` section of the sparse Lax matrix: zero diagonal, off-diagonal ``sqrt(a_n)``.

    With ``prec`` the entries are ``mpf`` at that many bits; otherwise floats.
    """
    N = check_count(N, "N")
    a = check_positive_sequence(getattr(a, "a", a), "a", min_length=0)
    if N > len(a) + 1:
        raise ValidationError(f"a section of size {N} needs {N - 1} coefficients; {len(a)} given")
    zero = mpmath.mpf(0) if prec else 0.0
    return TridiagonalMatrix((zero,) * N, tuple(_sqrt(a[n], prec) for n in range(N - 1)))


def eigh(T, prec=None):
    """Eigenvalues (ascending) and orthonormal eigenvectors as columns.

    Returns plain floats and a ``numpy`` array, or ``mpf`` values and an
    ``mpmath`` matrix when ``prec`` is given or the matrix holds ``mpf`` entries.
    """
    if prec is None and T.high_precision:
        prec = mpmath.mp.prec
    if prec is None:
        vals, vecs = np.linalg.eigh(T.dense())
        return [float(v) for v in vals], vecs
    with mpmath.workprec(prec):
        try:
            E, Q = mpmath.eigsy(T.mp_dense())
        except Exception as exc:  # mpmath raises plain errors on non-convergence
            raise ConvergenceError(f"symmetric eigensolver failed: {exc}") from exc
        order = sorted(range(T.N), key=lambda i: E[i])
        vals = [E[i] for i in order]
        P = mpmath.zeros(T.N, T.N)
        for j, i in enumerate(order):
            for r in range(T.N):
                P[r, j] = Q[r, i]
        return vals, P


def eigendecompose(T, prec=None):
    """Spectrum of a section together with the weights ``|<v_i, e_0>|**2``."""
    vals, vecs = eigh(T, prec)
    if isinstance(vecs, np.ndarray):
        weights = [float(x) for x in vecs[0, :] ** 2]
        total = sum(weights)
    else:
        weights = [vecs[0, j] ** 2 for j in range(T.N)]
        total = mpmath.fsum(weights)
    if abs(total - 1) > 1e-12:
        raise ConvergenceError(f"spectral weights sum to {float(total)}")
    return TruncatedSpectrum(tuple(vals), tuple(weights))


def finite_spectral_measure(a, N, prec=None):
    """Spectral measure of the ``N x N`` section as an even pure-point measure.

    Eigenvalues pair up as ``+-lambda``; each mirror pair gets the mean of the
    two weights. An odd section has a zero eigenvalue, stored as the pair at
    ``xi = 0`` with half its weight on each side.
    """
    spec = eigendecompose(truncate(a, N, prec), prec)
    lam, mu = spec.eigenvalues, spec.weights
    scale = max(abs(float(lam[0])), abs(float(lam[-1])), 1.0)
    pts = []
    for i in range(N // 2):
        hi, lo = lam[N - 1 - i], lam[i]
        if abs(float(hi + lo)) > 1e-8 * scale:
            raise ConvergenceError(f"eigenvalues {float(lo)} and {float(hi)} are not mirror images")
        xi = (hi - lo) / 2
        pts.append((to_fraction(xi), to_fraction((mu[i] + mu[N - 1 - i]) / 2)))
    if N % 2:
        pts.append((Fraction(0), to_fraction(mu[N // 2] / 2)))
    return normalize(None, 0, pts)


def _support_distance(m, z):
    d = math.inf
    if m.unbounded:
        return abs(z.imag)
    if m.ac is not None:
        c = float(m.ac.c)
        x = min(max(z.real, -c), c)
        d = abs(z - x)
    for xi, _ in m.points:
        d = min(d, abs(z - float(xi)), abs(z + float(xi)))
    return d


def _gaussian_weyl(beta, z):
    """``int exp(-beta x^2) sqrt(beta/pi) / (z - x) dx`` via the Faddeeva function."""
    if z.imag < 0:
        return _gaussian_weyl(beta, z.conjugate()).conjugate()
    zeta = mpmath.sqrt(beta) * mpmath.mpc(z)
    w = mpmath.exp(-(zeta**2)) * mpmath.erfc(-1j * zeta)
    return complex(-1j * mpmath.sqrt(mpmath.pi * beta) * w)


def _ac_stieltjes(spec, t, z, tol=1e-14):
    """``z int q(th) exp(t xi^2) / (z^2 - xi^2) dth / int q(th) exp(t xi^2) dth`` with ``xi = c cos th``."""
    c = float(spec.c)
    z2 = z * z
    if spec.smooth_periodic:
        n = 64
        prev = None
        while n <= MAX_TRAPEZOID_NODES:
            th = np.linspace(0.0, np.pi, n + 1)
            w = np.full(n + 1, np.pi / n)
            w[0] = w[-1] = np.pi / (2 * n)
            val = _ratio(spec, t, c, z, z2, th, w)
            if prev is not None and abs(val - prev) <= tol * abs(val):
                return val
            prev = val
            n *= 2
        raise ConvergenceError("Stieltjes quadrature did not converge")
    upper = math.acos(float(spec.gap) / c) if spec.gap else math.pi / 2
    n = 32
    prev = None
    while n <= 2**16:
        u, wu = np.polynomial.legendre.leggauss(n)
        th = (u + 1) * upper / 2
        val = _ratio(spec, t, c, z, z2, th, wu * upper / 2)
        if prev is not None and abs(val - prev) <= tol * abs(val):
            return val
        prev = val
        n *= 2
    raise ConvergenceError("Stieltjes quadrature did not converge")


def _ratio(spec, t, c, z, z2, th, w):
    x2 = (c * np.cos(th)) ** 2
    q = np.asarray(spec.theta_density(th, np), dtype=float) * w
    if t:
        q = q * np.exp(t * x2)
    return complex(z * np.sum(q / (z2 - x2)) / np.sum(q))


def weyl_stieltjes(m, z, guard=GUARD):
    """Weyl function ``m(z) = z int d rho(xi) / (z^2 - xi^2)`` of an even measure."""
    if not isinstance(m, EvenMeasure):
        raise ValidationError("weyl_stieltjes expects an EvenMeasure")
    z = complex(z)
    scale = float(m.ac.c) if m.c is not None else max(m.radius or 1.0, 1.0)
    if _support_distance(m, z) < guard * scale:
        raise ConditioningError(f"z = {z} lies within {guard} * c of the support")
    val = 0j
    if m.ac is not None:
        if m.unbounded:
            val += float(m.ac_mass) * _gaussian_weyl(1 - to_mpf(m.t), z)
        else:
            val += _ac_part(m, z)
    if m.points.entries:
        zn = _point_normalizer(m)
        for xi, w in m.points:
            x = float(xi)
            val += 2 * float(w) * math.exp(float(m.t) * x * x) / zn * z / (z * z - x * x)
    return WeylEval(z, val)


def _point_normalizer(m):
    return float(evolution_normalizer(m, 64)) if m.t else 1.0


def _ac_part(m, z):
    scale = float(m.ac_mass)
    if m.t:
        with mpmath.workprec(64):
            growth = float(ac_integrals(m.ac, 0, m.t, 64)[0] / ac_integrals(m.ac, 0, 0, 64)[0])
            scale *= growth / float(evolution_normalizer(m, 64))
    return scale * _ac_stieltjes(m.ac, float(m.t), z)


def free_tail(z, limit=1.0):
    """Root ``g`` of ``limit g^2 - z g + 1 = 0`` that is the Weyl function of the constant lattice."""
    z = complex(z)
    r = cmath.sqrt(z * z - 4 * limit)
    g1, g2 = (z - r) / (2 * limit), (z + r) / (2 * limit)
    return g1 if abs(g1) <= abs(g2) else g2


def weyl_cf(a, z, depth, tail="zero", limit=1.0):
    """Continued J-fraction ``1/(z - a_0/(z - a_1/(z - ...)))`` evaluated bottom-up.

    ``depth`` levels use ``a_0..a_{depth-2}``; the innermost level is ``1/z``
    for the zero tail (the Weyl function of the ``depth x depth`` section) or the
    constant-lattice Weyl function for the free tail.
    """
    depth = check_count(depth, "depth")
    a = check_positive_sequence(getattr(a, "a", a), "a", min_length=0)
    if depth - 1 > len(a):
        raise ValidationError(f"depth {depth} needs {depth - 1} coefficients; {len(a)} given")
    if tail not in ("zero", "free"):
        raise ValidationError(f"unknown tail {tail!r}")
    z = complex(z)
    if tail == "free":
        g = free_tail(z, limit)
    else:
        if z == 0:
            raise PoleError(depth - 1)
        g = 1 / z
    for n in range(depth - 2, -1, -1):
        den = z - float(a[n]) * g
        if abs(den) < 1e-300:
            raise PoleError(n)
        g = 1 / den
    return WeylEval(z, g)
