"""Estimator-style wrappers around the functional API.

The estimators follow the scikit-learn conventions: hyperparameters are set in
``__init__`` and exposed through ``get_params``; ``fit`` stores the input and
returns ``self``; learned attributes end in an underscore.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from ._errors import ValidationError
from ._validation import check_count, check_positive_sequence, check_time_grid, default_precision
from .dynamics import LatticeState, conserved_report, integrate
from .hankel import jacobi_from_moments
from .jacobi import finite_spectral_measure
from .measure import EvenMeasure, moments, normalize
from .pipeline import SolveRequest, modified_solve, spectral_solve


def _check_fitted(est, attr):
    if not hasattr(est, attr):
        raise NotFittedError(f"{type(est).__name__} is not fitted yet; call fit first")


def _check_measure(X):
    if not isinstance(X, EvenMeasure):
        raise ValidationError(f"expected an EvenMeasure, got {type(X).__name__}")
    return X


class SpectralVolterraSolver(BaseEstimator):
    """Semi-infinite Volterra lattice generated by an even spectral measure.

    ``fit`` takes the initial measure; ``predict`` returns the coefficients
    ``a_0..a_{N-1}`` at the requested times, one row per time.
    """

    def __init__(self, n_coefficients=16, precision=None, exact=False, verify=False):
        self.n_coefficients = n_coefficients
        self.precision = precision
        self.exact = exact
        self.verify = verify

    def fit(self, X, y=None):
        self.measure_ = _check_measure(X)
        check_count(self.n_coefficients, "n_coefficients")
        self.result_ = self._solve((0.0,))
        self.initial_coefficients_ = self.result_.coefficients[0]
        return self

    def _solve(self, times):
        req = SolveRequest(self.measure_, times, self.n_coefficients, self.precision, exact=self.exact, verify=self.verify)
        return spectral_solve(req)

    def solve(self, times):
        """Full :class:`~vsl.pipeline.SolveResult` on the grid ``times``."""
        _check_fitted(self, "measure_")
        self.result_ = self._solve(check_time_grid(times))
        return self.result_

    def predict(self, times):
        res = self.solve(times)
        return np.array([[float(x) for x in c.a] for c in res.coefficients])

    def fit_predict(self, X, times):
        return self.fit(X).predict(times)


class DirectSpectrum(TransformerMixin, BaseEstimator):
    """Finite spectral measures of coefficient rows, with the Hankel inverse.

    ``transform`` maps each row ``a_0..a_{N-2}`` to an array of shape ``(N, 2)``
    holding the section's eigenvalues and weights; ``inverse_transform`` maps
    such arrays back to coefficients.
    """

    def __init__(self, precision=None):
        self.precision = precision

    def fit(self, X=None, y=None):
        self.precision_ = self.precision or default_precision()
        return self

    def transform(self, X):
        _check_fitted(self, "precision_")
        out = []
        for row in np.atleast_2d(np.asarray(X, dtype=float)):
            a = check_positive_sequence(row, "a")
            m = finite_spectral_measure(a, len(a) + 1, self.precision_)
            pairs = []
            for xi, w in m.points:
                if xi == 0:
                    pairs.append((0.0, float(2 * w)))
                else:
                    pairs += [(-float(xi), float(w)), (float(xi), float(w))]
            out.append(sorted(pairs))
        return np.array(out)

    def inverse_transform(self, X):
        _check_fitted(self, "precision_")
        rows = []
        for spec in np.asarray(X, dtype=float).reshape(-1, *np.shape(X)[-2:]):
            pos = sorted(((float(x), float(w)) for x, w in spec if x > 0), reverse=True)
            zero = sum(float(w) for x, w in spec if x == 0)
            pts = pos + ([(0.0, zero / 2)] if zero else [])
            m = normalize(None, 0, pts)
            K = len(spec) - 1
            a = jacobi_from_moments(moments(m, K, prec=self.precision_), K, prec=self.precision_)
            rows.append([float(x) for x in a.a])
        return np.array(rows)


class LatticeIntegrator(BaseEstimator):
    """Fourth-order Runge-Kutta integration of a truncated lattice."""

    def __init__(self, step=1e-3, boundary="semi-infinite", closure="frozen"):
        self.step = step
        self.boundary = boundary
        self.closure = closure

    def fit(self, X, y=None):
        self.state_ = LatticeState(tuple(np.ravel(X)), self.boundary, self.closure)
        return self

    def integrate(self, times):
        _check_fitted(self, "state_")
        grid = check_time_grid(times)
        self.trajectory_ = integrate(self.state_, grid[-1], self.step, grid)
        return self.trajectory_

    def predict(self, times):
        tr = self.integrate(times)
        if tr.positivity_lost:
            raise ValidationError("trajectory lost positivity before the last output time")
        grid = check_time_grid(times)
        by_time = dict(zip(tr.times, tr.states))
        return np.array([by_time[t] for t in grid])

    def drift(self, k_max=2):
        _check_fitted(self, "trajectory_")
        return conserved_report(self.trajectory_, k_max)


class ModifiedVolterraSolver(BaseEstimator):
    """Modified lattice by reduction to the classical one and lift.

    ``fit`` accepts an :class:`EvenMeasure` or a positive sequence ``c0``;
    ``predict`` returns ``c_0..c_N`` per requested time.
    """

    def __init__(self, n_coefficients=8, b0=None, precision=None, xcond_ns=None):
        self.n_coefficients = n_coefficients
        self.b0 = b0
        self.precision = precision
        self.xcond_ns = xcond_ns

    def fit(self, X, y=None):
        if isinstance(X, EvenMeasure):
            self.measure_, self.c0_ = X, None
        else:
            self.measure_ = None
            self.c0_ = check_positive_sequence(np.ravel(X).tolist(), "c0", min_length=2)
        return self

    def solve(self, times):
        _check_fitted(self, "c0_")
        times = check_time_grid(times)
        if self.c0_ is not None:
            req = SolveRequest(normalize(None, 0, [(2, 1)]), times, self.n_coefficients, self.precision, "modified")
            self.result_ = modified_solve(req, self.b0, c0=self.c0_)
        else:
            req = SolveRequest(self.measure_, times, self.n_coefficients, self.precision, "modified")
            self.result_ = modified_solve(req, self.b0, xcond_ns=self.xcond_ns)
        return self.result_

    def predict(self, times):
        res = self.solve(times)
        return np.array([[float(x) for x in c] for c in res.lifted.c])
