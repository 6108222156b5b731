"""Time-domain integration of truncated Volterra lattices and their Hamiltonian forms.

The classical lattice is ``a_n' = a_n (a_{n+1} - a_{n-1})``. A state lives on a
finite index window; the edges are closed either by zeros (``hard``) or by
frozen copies of the edge values (``frozen``). On the semi-infinite lattice the
left edge is the genuine boundary ``a_{-1} = 0``.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from ._errors import ValidationError
from ._validation import check_positive_sequence

BOUNDARIES = ("semi-infinite", "window", "modified")
CLOSURES = ("hard", "frozen")
FORMS = ("quadratic-H1", "cubic-H0", "ft-H0")


@dataclass(frozen=True)
class LatticeState:
    """Positive values on an index window plus the edge policy.

    For ``frozen`` closure the pads default to the edge values at construction,
    so the frozen neighbour equals the initial edge entry.
    """

    a: tuple
    boundary: str = "semi-infinite"
    closure: str = "frozen"
    t: float = 0.0
    right_pad: Optional[float] = None
    left_pad: Optional[float] = None

    def __post_init__(self):
        a = tuple(float(x) for x in check_positive_sequence(self.a, "a", min_length=2))
        object.__setattr__(self, "a", a)
        if self.boundary not in BOUNDARIES:
            raise ValidationError(f"unknown boundary policy {self.boundary!r}")
        if self.closure not in CLOSURES:
            raise ValidationError(f"unknown closure {self.closure!r}")
        if self.closure == "frozen":
            if self.right_pad is None:
                object.__setattr__(self, "right_pad", a[-1])
            if self.left_pad is None and self.boundary == "window":
                object.__setattr__(self, "left_pad", a[0])

    @property
    def N(self):
        return len(self.a)

    def array(self):
        return np.array(self.a)

    def with_values(self, a, t):
        return replace(self, a=tuple(float(x) for x in a), t=float(t))


def _pads(state):
    right = state.right_pad if state.closure == "frozen" else 0.0
    if state.boundary == "window" and state.closure == "frozen":
        left = state.left_pad
    else:
        left = 0.0
    return left, right


def volterra_rhs(state, a=None):
    """``a_n (a_{n+1} - a_{n-1})`` with the state's edge closure."""
    if state.boundary == "modified":
        raise ValidationError("modified states evolve under modified_rhs")
    a = state.array() if a is None else a
    left, right = _pads(state)
    ext = np.concatenate(([left], a, [right]))
    return a * (ext[2:] - ext[:-2])


def modified_rhs(c, frozen_last=True):
    """Modified lattice ``c_0' = -1/c_1``, ``c_n' = 1/c_{n-1} - 1/c_{n+1}``; the last entry is frozen."""
    if isinstance(c, LatticeState):
        c = c.a
    c = np.asarray(c, dtype=float)
    if c.size < 2:
        raise ValidationError("modified lattice needs at least two sites")
    if np.any(c <= 0):
        raise ValidationError("modified lattice entries must be positive")
    inv = 1.0 / c
    out = np.empty_like(c)
    out[0] = -inv[1]
    out[1:-1] = inv[:-2] - inv[2:]
    out[-1] = 0.0 if frozen_last else inv[-2]
    return out


@dataclass
class Trajectory:
    """Samples of an integration, with fixed step and a positivity flag.

    ``trust`` gives per sample the half-open index range ``[lo, hi)`` not yet
    reached by edge pollution (one index per unit of ``t * max a``).
    """

    times: list
    states: list
    step: float
    order: int = 4
    positivity_lost: bool = False
    boundary: str = "semi-infinite"
    closure: str = "frozen"
    trust: list = field(default_factory=list)

    def __len__(self):
        return len(self.times)

    def final(self):
        return self.states[-1]


def _rk4(f, y, h):
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _trust(state, t, amax):
    lost = math.ceil(abs(t) * amax) if t else 0
    lo = 0 if state.boundary != "window" else lost
    return (lo, max(lo, state.N - lost))


def integrate(s0, t_end, step, times=None, direction=1):
    """Classical fourth-order Runge-Kutta at a fixed step.

    Output is recorded at ``times`` (default ``0`` and ``t_end``); each interval
    between outputs is split into equal steps no longer than ``step``. The run
    stops at the first non-positive entry and flags the trajectory.
    ``direction=-1`` integrates the time-reversed flow.
    """
    if not step > 0:
        raise ValidationError("step must be positive")
    if t_end < 0:
        raise ValidationError("t_end must be nonnegative")
    grid = sorted({0.0, float(t_end)} | {float(x) for x in (times or ())})
    if grid[-1] > t_end or grid[0] < 0:
        raise ValidationError("output times must lie in [0, t_end]")
    if direction not in (1, -1):
        raise ValidationError("direction must be 1 or -1")
    rhs = modified_rhs if s0.boundary == "modified" else (lambda y: volterra_rhs(s0, y))

    def f(y):
        return direction * rhs(y)

    y = s0.array()
    amax = float(np.max(y))
    tr = Trajectory([s0.t], [y.copy()], step, boundary=s0.boundary, closure=s0.closure, trust=[_trust(s0, 0, amax)])
    for t0, t1 in zip(grid, grid[1:]):
        n = max(1, math.ceil((t1 - t0) / step - 1e-9))
        h = (t1 - t0) / n
        for _ in range(n):
            y = _rk4(f, y, h)
            if not np.all(y > 0) or not np.all(np.isfinite(y)):
                tr.positivity_lost = True
                return tr
        amax = max(amax, float(np.max(y)))
        tr.times.append(s0.t + t1)
        tr.states.append(y.copy())
        tr.trust.append(_trust(s0, t1, amax))
    return tr


def lax_section(a):
    """Dense section of the Lax matrix: off-diagonals ``sqrt(a_n)``, one larger than ``a``."""
    a = np.asarray(a, dtype=float)
    N = a.size + 1
    L = np.zeros((N, N))
    r = np.sqrt(a)
    L[np.arange(N - 1), np.arange(1, N)] = r
    L[np.arange(1, N), np.arange(N - 1)] = r
    return L


def hamiltonian(a, k):
    """``H_k = Tr(L^{2k}) / 2`` on the hard-closed section."""
    L = lax_section(a)
    return 0.5 * float(np.trace(np.linalg.matrix_power(L, 2 * k)))


@dataclass(frozen=True)
class DriftReport:
    """Per-sample drifts of the spectrum and of ``H_1..H_kmax`` relative to the first sample."""

    times: tuple
    eigenvalue_drift: tuple
    hamiltonian_drift: dict
    h1_trace_gap: tuple

    @property
    def max_eigenvalue_drift(self):
        return max(self.eigenvalue_drift)

    def max_hamiltonian_drift(self, k):
        return max(self.hamiltonian_drift[k])


def conserved_report(tr, k_max=2):
    """Drift of conserved quantities along a trajectory.

    Eigenvalues are those of the hard-closed section (for which the truncated
    flow is exactly isospectral). ``h1_trace_gap`` compares ``sum a_n`` with
    ``Tr(L^2)/2`` at each sample.
    """
    if not tr.states:
        raise ValidationError("empty trajectory")
    ev0 = np.linalg.eigvalsh(lax_section(tr.states[0]))
    H0 = {k: hamiltonian(tr.states[0], k) for k in range(1, k_max + 1)}
    ev_drift, gaps = [], []
    hd = {k: [] for k in H0}
    for y in tr.states:
        ev = np.linalg.eigvalsh(lax_section(y))
        ev_drift.append(float(np.max(np.abs(ev - ev0))))
        for k in H0:
            hd[k].append(abs(hamiltonian(y, k) - H0[k]))
        gaps.append(abs(float(np.sum(y)) - hamiltonian(y, 1)))
    return DriftReport(tuple(tr.times), tuple(ev_drift), {k: tuple(v) for k, v in hd.items()}, tuple(gaps))


def bracket(form, a, m, n):
    """``{a_m, a_n}`` for the three Poisson structures (zero unless ``|m - n| <= 2``)."""
    if m == n:
        return 0.0
    if m < n:
        return -bracket(form, a, n, m)
    d = m - n
    if form == "quadratic-H1":
        return a[m] * a[n] if d == 1 else 0.0
    if form == "cubic-H0":
        if d == 1:
            return a[m] * a[n] * (a[m] + a[n])
        return a[n + 2] * a[n + 1] * a[n] if d == 2 else 0.0
    if form == "ft-H0":
        if d == 1:
            return a[m] * a[n] * (a[m] + a[n] - 4.0)
        return a[n + 2] * a[n + 1] * a[n] if d == 2 else 0.0
    raise ValidationError(f"unknown bracket form {form!r}; expected one of {FORMS}")


def _gradient(form, a):
    if form == "quadratic-H1":
        return np.ones_like(a)
    return 0.5 / a


def bracket_flow(state, form):
    """``a_n' = sum_m dH/da_m {a_m, a_n}`` on interior indices ``2..N-3`` (NaN elsewhere)."""
    if form not in FORMS:
        raise ValidationError(f"unknown bracket form {form!r}; expected one of {FORMS}")
    a = state.array() if isinstance(state, LatticeState) else np.asarray(state, dtype=float)
    if a.size < 5:
        raise ValidationError("bracket flows need a window of at least five sites")
    g = _gradient(form, a)
    out = np.full(a.size, np.nan)
    for n in range(2, a.size - 2):
        out[n] = sum(g[m] * bracket(form, a, m, n) for m in range(n - 2, n + 3))
    return out


def hamiltonian_gradient(a, k):
    """``dH_k/da_m = k (L^{2k-1})_{m,m+1} / sqrt(a_m)`` on the hard-closed section."""
    a = np.asarray(a, dtype=float)
    P = np.linalg.matrix_power(lax_section(a), 2 * k - 1)
    return k * np.diagonal(P, 1) / np.sqrt(a)


def hierarchy_rhs(state, k):
    """Flow ``V_k``: ``a_n' = {H_k, a_n}`` in the quadratic bracket.

    Indices within ``2k`` of a truncated edge are NaN; the semi-infinite left
    edge is genuine and is reported.
    """
    if k < 1:
        raise ValidationError("k must be at least 1")
    a = state.array()
    N = a.size
    lo = 0 if state.boundary == "semi-infinite" else 2 * k
    hi = N - 2 * k
    if hi <= lo:
        raise ValidationError(f"window of {N} sites leaves no index {2 * k} away from the truncated edges")
    g = hamiltonian_gradient(a, k)
    out = np.full(N, np.nan)
    for n in range(lo, hi):
        right = g[n + 1] * a[n + 1] * a[n]
        left = g[n - 1] * a[n] * a[n - 1] if n > 0 else 0.0
        out[n] = right - left
    return out


def random_state(seed, N, low=0.5, high=1.5, boundary="semi-infinite", closure="frozen"):
    """Seeded positive state with entries uniform in ``[low, high]``."""
    rng = np.random.default_rng(seed)
    return LatticeState(tuple(rng.uniform(low, high, N)), boundary, closure)
