"""Doubly-infinite lattices through the duplication (2x2 block) picture.

Block ``i`` of the folded operator holds the sites ``(x_{-i-1}, x_i)``, so ``K``
blocks cover the scalar window ``-K..K-1``. The spectral matrix collects, for
each eigenvalue, the outer product of the eigenvector components at the two
central sites ``x_{-1}`` (component 0) and ``x_0`` (component 1).
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ._errors import PoleError, ValidationError
from ._validation import check_positive_sequence
from .dynamics import LatticeState, integrate
from .jacobi import WeylEval, finite_spectral_measure

POLE_TOL = 1e-12


@dataclass(frozen=True)
class ZLatticeState:
    """Values ``a_n`` for ``n = -M..N`` (stored left to right) at time ``t``.

    A zero is allowed only at ``n = -1`` (the broken lattice).
    """

    a: tuple
    M: int
    t: float = 0.0

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        object.__setattr__(self, "a", a)
        if not 0 < self.M < len(a):
            raise ValidationError("window must contain n = -1 and n = 0")
        rest = [x for n, x in zip(self.indices, a) if n != -1]
        check_positive_sequence(rest, "a")
        if a[self.M - 1] < 0:
            raise ValidationError("a_{-1} must be nonnegative")

    @property
    def indices(self):
        return range(-self.M, len(self.a) - self.M)

    @property
    def N(self):
        return len(self.a) - self.M - 1

    def __getitem__(self, n):
        if not -self.M <= n <= self.N:
            raise ValidationError(f"a_{n} lies outside the window [-{self.M}, {self.N}]")
        return self.a[n + self.M]

    @classmethod
    def from_function(cls, f, M, N, t=0.0):
        return cls(tuple(f(n) for n in range(-M, N + 1)), M, t)

    @property
    def broken(self):
        return self[-1] == 0


@dataclass(frozen=True)
class BlockJacobi:
    """``B_0`` (the only nonzero diagonal block) and the diagonal off-diagonal blocks ``A_i``."""

    B0: np.ndarray
    A: tuple

    @property
    def K(self):
        return len(self.A) + 1

    def flatten(self):
        """Dense ``2K x 2K`` matrix in block order ``(x_{-1}, x_0, x_{-2}, x_1, ...)``."""
        K = self.K
        H = np.zeros((2 * K, 2 * K))
        H[0:2, 0:2] = self.B0
        for i, Ai in enumerate(self.A):
            H[2 * i : 2 * i + 2, 2 * i + 2 : 2 * i + 4] = Ai
            H[2 * i + 2 : 2 * i + 4, 2 * i : 2 * i + 2] = Ai.T
        return H

    def scalar_order(self):
        """Permutation ``p`` with ``flatten()[p][:, p]`` the scalar section on sites ``-K..K-1``."""
        K = self.K
        sites = [s for i in range(K) for s in (-i - 1, i)]
        return [sites.index(n) for n in range(-K, K)]


def build_block(s, K=None):
    """Fold the window into ``K`` blocks (default: as many as the window allows)."""
    K_max = min(s.M, s.N + 2)
    K = K_max if K is None else K
    if K < 1 or K > K_max:
        raise ValidationError(f"{K} blocks need a_n for n in [-{K}, {K - 2}]; window is [-{s.M}, {s.N}]")
    r = math.sqrt(s[-1])
    B0 = np.array([[0.0, r], [r, 0.0]])
    A = tuple(np.diag([math.sqrt(s[-i - 2]), math.sqrt(s[i])]) for i in range(K - 1))
    return BlockJacobi(B0, A)


@dataclass(frozen=True)
class SpectralMatrix2x2:
    """Points ``lambda_i`` with 2x2 weights ``W_i`` (positive semidefinite, summing to the identity)."""

    eigenvalues: tuple
    weights: tuple

    def total(self):
        return sum(self.weights, np.zeros((2, 2)))

    def stieltjes(self, z):
        return sum((W / (z - lam) for lam, W in zip(self.eigenvalues, self.weights)), np.zeros((2, 2), complex))


def truncated_block_spectrum(b, K=None, merge_tol=1e-10):
    """Spectral matrix of the first ``K`` blocks; coinciding eigenvalues are merged."""
    K = b.K if K is None else K
    if K > b.K or K < 1:
        raise ValidationError(f"only {b.K} blocks available")
    sub = BlockJacobi(b.B0, b.A[: K - 1])
    vals, vecs = np.linalg.eigh(sub.flatten())
    lams, Ws = [], []
    for j, lam in enumerate(vals):
        u = vecs[0:2, j]
        W = np.outer(u, u)
        if lams and abs(lam - lams[-1]) <= merge_tol * max(1.0, abs(lam)):
            Ws[-1] = Ws[-1] + W
        else:
            lams.append(float(lam))
            Ws.append(W)
    return SpectralMatrix2x2(tuple(lams), tuple(Ws))


def half_coefficients(s):
    """``(a_0, a_1, ...)`` and ``(a_{-2}, a_{-3}, ...)`` from the window."""
    plus = tuple(s[n] for n in range(0, s.N + 1))
    minus = tuple(s[n] for n in range(-2, -s.M - 1, -1))
    return plus, minus


def half_measures(s, N=None, prec=None):
    """Finite-section spectral measures of the right and left half operators."""
    plus, minus = half_coefficients(s)
    if not plus or not minus:
        raise ValidationError("both half windows must be nonempty")
    Np = len(plus) + 1 if N is None else N
    Nm = len(minus) + 1 if N is None else N
    return finite_spectral_measure(plus, Np, prec), finite_spectral_measure(minus, Nm, prec)


@dataclass(frozen=True)
class WeylMatrix:
    z: complex
    m00: complex
    m01: complex
    m10: complex
    m11: complex
    denominator: complex
    detm_residual: float

    def as_array(self):
        return np.array([[self.m00, self.m01], [self.m10, self.m11]])


def weyl_matrix(mplus, mminus, a_minus1, z=None):
    """Weyl matrix from the half-lattice Weyl functions and the coupling ``a_{-1}``.

    ``m00 = m-/D``, ``m11 = m+/D``, ``m01 = sqrt(a_{-1}) m+ m-/D`` with
    ``D = 1 - a_{-1} m+ m-``. The residual of
    ``sqrt(a_{-1}) (m00 m11 - m01^2) = m01`` is attached.
    """
    mp = mplus.value if isinstance(mplus, WeylEval) else complex(mplus)
    mm = mminus.value if isinstance(mminus, WeylEval) else complex(mminus)
    if z is None:
        z = mplus.z if isinstance(mplus, WeylEval) else None
    if a_minus1 < 0:
        raise ValidationError("a_{-1} must be nonnegative")
    D = 1 - a_minus1 * mp * mm
    if abs(D) < POLE_TOL:
        raise PoleError(-1, f"1 - a_(-1) m+ m- = {D:.3g} is too close to zero")
    r = math.sqrt(a_minus1)
    m00, m11, m01 = mm / D, mp / D, r * mp * mm / D
    lhs = r * (m00 * m11 - m01 * m01)
    resid = abs(lhs - m01) / max(abs(m01), 1e-300) if m01 else abs(lhs)
    return WeylMatrix(z, m00, m01, m01, m11, D, float(resid))


def free_weyl(z):
    """Weyl function of the constant lattice ``a = 1``: the root of ``g^2 - z g + 1`` inside the unit disk."""
    r = cmath.sqrt(z * z - 4)
    g1, g2 = (z - r) / 2, (z + r) / 2
    return g1 if abs(g1) <= abs(g2) else g2


def flow_matrix(lam, a_m2, a_m1, a_0):
    """``X = sigma_3 lambda^2 - F`` in the ``(x_{-1}, x_0)`` ordering with ``sigma_3 = diag(-1, 1)``."""
    r = math.sqrt(a_m1)
    F = np.array([[a_m1 - a_m2, -2 * lam * r], [2 * lam * r, a_0 - a_m1]])
    return np.diag([-lam * lam, lam * lam]) - F


@dataclass(frozen=True)
class EvolutionCheck:
    """Finite-difference residuals of the spectral-matrix evolution at ``t = 0``.

    ``residual`` uses ``dW/dt = (X W + W X^T) / 2``; ``residual_product`` uses the
    product reading ``X W X^T / 2``. Both are normalized by the largest
    right-hand side.
    """

    residual: float
    residual_product: float
    compared: int
    excluded: int
    K: int
    dt: float


def evolution_rhs_check(s, dt=1e-5, K=16, steps=1, gap_tol=1e-8):
    """Compare finite-differenced spectral weights against the evolution equation.

    The window ``-K..K-1`` is closed by zeros at both ends, which makes the
    truncated flow exactly isospectral, so eigenvalues pair up by order.
    Near-degenerate eigenvalues are excluded and counted.
    """
    if s.M < K or s.N < K - 2:
        raise ValidationError(f"K = {K} needs the window [-{K}, {K - 2}]")
    idx = range(-K, K - 1)
    vals = [s[n] for n in idx]
    if any(v <= 0 for v in vals):
        raise ValidationError("the evolution check needs a coupled (positive) window")
    st = LatticeState(tuple(vals), boundary="window", closure="hard")
    tr = integrate(st, dt, dt / steps)
    moved = ZLatticeState(tuple(tr.final()), K, s.t + dt)
    here = ZLatticeState(tuple(vals), K, s.t)
    sp0 = truncated_block_spectrum(build_block(here, K))
    sp1 = truncated_block_spectrum(build_block(moved, K))
    if len(sp0.eigenvalues) != len(sp1.eigenvalues):
        raise ValidationError("eigenvalue pairing failed: multiplicities changed")
    lam = np.array(sp0.eigenvalues)
    gaps = np.diff(lam)
    bad = set()
    for i, g in enumerate(gaps):
        if g < gap_tol:
            bad.update((i, i + 1))
    lin, prod, scale, scale_p = 0.0, 0.0, 0.0, 0.0
    for i, (l0, W0, W1) in enumerate(zip(lam, sp0.weights, sp1.weights)):
        if i in bad:
            continue
        X = flow_matrix(l0, s[-2], s[-1], s[0])
        fd = (W1 - W0) / dt
        rhs = 0.5 * (X @ W0 + W0 @ X.T)
        rhs_p = 0.5 * X @ W0 @ X.T
        lin = max(lin, float(np.max(np.abs(fd - rhs))))
        prod = max(prod, float(np.max(np.abs(fd - rhs_p))))
        scale = max(scale, float(np.max(np.abs(rhs))))
        scale_p = max(scale_p, float(np.max(np.abs(rhs_p))))
    return EvolutionCheck(lin / scale, prod / scale_p, len(lam) - len(bad), len(bad), K, dt)


def broken_halves_evolution(s, t, step=1e-3):
    """Evolve a broken window; returns ``(a_0, a_1, ...)`` and ``(a_{-2}, a_{-3}, ...)`` at time ``t``.

    Each half is a semi-infinite lattice; read from ``n = -2`` leftwards the
    left half runs in reversed time.
    """
    if not s.broken:
        raise ValidationError("a_{-1} must be zero for a broken lattice")
    plus, minus = half_coefficients(s)
    right = integrate(LatticeState(plus, "semi-infinite", "hard"), t, step).final()
    left = integrate(LatticeState(minus, "semi-infinite", "hard"), t, step, direction=-1).final()
    return tuple(right), tuple(left)

