import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from vsl import ValidationError
from vsl.estimators import DirectSpectrum, LatticeIntegrator, ModifiedVolterraSolver, SpectralVolterraSolver


def test_params_and_clone():
    est = SpectralVolterraSolver(n_coefficients=8, precision=128)
    assert est.get_params() == {"exact": False, "n_coefficients": 8, "precision": 128, "verify": False}
    c = clone(est).set_params(n_coefficients=4)
    assert c.n_coefficients == 4 and est.n_coefficients == 8


def test_spectral_solver(semicircle, gaussian):
    est = SpectralVolterraSolver(6).fit(semicircle)
    out = est.predict([0.0, 0.5])
    assert out.shape == (2, 6) and np.allclose(out[0], 1.0)
    assert abs(out[1, 0] - 1.61265128302608629) < 1e-14
    g = SpectralVolterraSolver(5, exact=True).fit_predict(gaussian, [0.5])
    assert np.allclose(g[0], np.arange(1, 6))
    with pytest.raises(NotFittedError):
        SpectralVolterraSolver().predict([0.0])
    with pytest.raises(ValidationError):
        SpectralVolterraSolver().fit([1.0, 2.0])


def test_lattice_integrator():
    li = LatticeIntegrator(step=1e-3, closure="hard").fit([1.0, 1.2, 0.8, 1.1])
    out = li.predict([0.0, 0.5, 1.0])
    assert out.shape == (3, 4) and np.allclose(out[0], [1.0, 1.2, 0.8, 1.1])
    assert li.drift().max_eigenvalue_drift < 1e-10
    with pytest.raises(NotFittedError):
        LatticeIntegrator().drift()


def test_modified_solver(semicircle):
    c0 = [1.0, 2.0, 0.5, 1.5, 1.0]
    assert np.allclose(ModifiedVolterraSolver(4).fit(c0).predict([0.0])[0], c0)
    est = ModifiedVolterraSolver(8, b0=1.0, xcond_ns=(8,)).fit(semicircle)
    out = est.predict([0.0, 0.5])
    assert out.shape == (2, 9) and np.allclose(out[0], 1.0)
    assert est.result_.xcond.verdict == "constant-x"


@settings(max_examples=15, deadline=None)
@given(st.lists(st.floats(min_value=0.3, max_value=3.0), min_size=1, max_size=10))
def test_direct_spectrum_round_trip(a):
    ds = DirectSpectrum().fit()
    spec = ds.transform([a])
    assert spec.shape == (1, len(a) + 1, 2)
    assert abs(spec[0, :, 1].sum() - 1) < 1e-12
    assert np.allclose(ds.inverse_transform(spec)[0], a, rtol=1e-9)
