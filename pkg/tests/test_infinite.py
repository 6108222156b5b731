import numpy as np
import pytest

from vsl import PoleError, ValidationError
from vsl.infinite import (
    ZLatticeState,
    broken_halves_evolution,
    build_block,
    evolution_rhs_check,
    flow_matrix,
    free_weyl,
    half_coefficients,
    truncated_block_spectrum,
    weyl_matrix,
)
from vsl.dynamics import LatticeState, integrate
from vsl.jacobi import weyl_cf


def window(K, seed=0, broken=False):
    rng = np.random.default_rng(seed)
    vals = [1 + 0.4 * rng.uniform(-1, 1) * 0.8 ** abs(n) for n in range(-K - 1, K + 1)]
    if broken:
        vals[K] = 0.0
    return ZLatticeState(tuple(vals), K + 1)


def test_state_indexing_and_validation():
    s = ZLatticeState((1.0, 2.0, 3.0, 4.0), 2)
    assert s[-2] == 1.0 and s[1] == 4.0 and s.N == 1
    with pytest.raises(ValidationError):
        s[2]
    with pytest.raises(ValidationError):
        ZLatticeState((1.0, 0.0, 1.0), 1)
    assert ZLatticeState((1.0, 0.0, 1.0), 2).broken


def test_block_flatten_is_scalar_section():
    s = window(5)
    b = build_block(s)
    p = b.scalar_order()
    H = b.flatten()[np.ix_(p, p)]
    K = b.K
    sites = list(range(-K, K))
    expected = np.zeros((2 * K, 2 * K))
    for i, n in enumerate(sites[:-1]):
        expected[i, i + 1] = expected[i + 1, i] = np.sqrt(s[n])
    assert np.allclose(H, expected)


def test_spectral_matrix_weights_sum_to_identity():
    sp = truncated_block_spectrum(build_block(window(6, 1)))
    assert np.allclose(sp.total(), np.eye(2), atol=1e-13)
    for W in sp.weights:
        assert np.min(np.linalg.eigvalsh(W)) > -1e-13


def test_free_weyl_matrix_matches_block_stieltjes():
    K = 24
    s = ZLatticeState((1.0,) * (2 * K + 2), K + 1)
    z = 0.5 + 2j
    w = weyl_matrix(free_weyl(z), free_weyl(z), 1.0, z)
    st = truncated_block_spectrum(build_block(s)).stieltjes(z)
    assert np.allclose(w.as_array(), st, atol=1e-8)
    assert w.detm_residual < 1e-14


def test_detm_identity_for_random_window():
    s = window(12, 4)
    plus, minus = half_coefficients(s)
    for z in (0.2 + 0.5j, -1.5 + 0.3j, 3 + 1j):
        mp_ = weyl_cf(plus, z, len(plus) + 1, tail="free")
        mm = weyl_cf(minus, z, len(minus) + 1, tail="free")
        assert weyl_matrix(mp_, mm, s[-1], z).detm_residual < 1e-12


def test_pole_detection():
    with pytest.raises(PoleError):
        weyl_matrix(1.0, 1.0, 1.0, 0.0)
    with pytest.raises(ValidationError):
        weyl_matrix(1.0, 1.0, -1.0)


def test_broken_lattice_decouples():
    s = window(8, 2, broken=True)
    sp = truncated_block_spectrum(build_block(s))
    assert max(abs(W[0, 1]) for W in sp.weights) < 1e-12
    right, left = broken_halves_evolution(s, 0.2)
    plus, minus = half_coefficients(s)
    ref = integrate(LatticeState(plus, "semi-infinite", "hard"), 0.2, 1e-3).final()
    assert np.allclose(right, ref)
    # forward flow of the sites left of the break, closed by a_{-1} = 0
    lhs = integrate(LatticeState(s.a[: s.M - 1], "window", "hard"), 0.2, 1e-3).final()[::-1]
    assert np.allclose(left[:4], lhs[:4], atol=1e-10)


def test_flow_matrix_free_values():
    X = flow_matrix(0.7, 1.0, 1.0, 1.0)
    assert np.allclose(X, [[-0.49, 1.4], [-1.4, 0.49]])


def test_evolution_check_linear_form():
    chk = evolution_rhs_check(window(16, 9), dt=1e-5, K=16)
    assert chk.residual < 1e-3
    assert chk.residual_product > 1e-1
    with pytest.raises(ValidationError):
        evolution_rhs_check(window(4), K=16)
