import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vsl import ValidationError
from vsl.dynamics import (
    FORMS,
    LatticeState,
    bracket,
    bracket_flow,
    conserved_report,
    hamiltonian,
    hamiltonian_gradient,
    hierarchy_rhs,
    integrate,
    modified_rhs,
    random_state,
    volterra_rhs,
)

# d/dt ln(e^{2t}(I0(2t) - I1(2t))) at t = 0.5: a_0 of the lattice started from a = 1
FREE_START_A0_HALF = 1.61265128302608629


def test_rhs_by_hand():
    s = LatticeState((1.0, 2.0, 3.0), closure="hard")
    assert np.allclose(volterra_rhs(s), [2.0, 4.0, -6.0])
    f = LatticeState((1.0, 2.0, 3.0), closure="frozen")
    assert np.allclose(volterra_rhs(f), [2.0, 4.0, 3.0])
    w = LatticeState((1.0, 2.0, 3.0), boundary="window", closure="frozen")
    assert np.allclose(volterra_rhs(w), [1.0, 4.0, 3.0])


def test_modified_rhs():
    assert np.allclose(modified_rhs([1.0, 2.0, 4.0]), [-0.5, 0.75, 0.0])
    with pytest.raises(ValidationError):
        modified_rhs([1.0, -2.0])


def test_free_start_matches_bessel_oracle():
    s = LatticeState((1.0,) * 60, closure="frozen")
    tr = integrate(s, 0.5, 1e-3)
    assert abs(tr.final()[0] - FREE_START_A0_HALF) < 1e-10
    lo, hi = tr.trust[-1]
    assert lo == 0 and hi < 60


def test_reverse_direction_undoes_forward():
    s = random_state(3, 12, closure="hard")
    fwd = integrate(s, 0.3, 1e-3).final()
    back = integrate(s.with_values(fwd, 0), 0.3, 1e-3, direction=-1).final()
    assert np.max(np.abs(back - s.array())) < 1e-10


def test_positivity_loss_is_flagged():
    s = LatticeState((10.0, 10.0), closure="hard")
    tr = integrate(s, 5.0, 1.0)
    assert tr.positivity_lost


def test_invalid_states():
    with pytest.raises(ValidationError):
        LatticeState((1.0, 0.0))
    with pytest.raises(ValidationError):
        LatticeState((1.0, 1.0), boundary="circle")
    with pytest.raises(ValidationError):
        integrate(LatticeState((1.0, 1.0)), 1.0, 0.0)


def test_conservation_on_hard_section():
    rep = conserved_report(integrate(random_state(5, 16, closure="hard"), 1.0, 1e-3), 3)
    assert rep.max_eigenvalue_drift < 1e-10
    assert all(rep.max_hamiltonian_drift(k) < 1e-10 for k in (1, 2, 3))
    assert max(rep.h1_trace_gap) < 1e-12


def test_bracket_antisymmetry_and_range():
    a = np.linspace(0.6, 1.4, 9)
    for form in FORMS:
        assert bracket(form, a, 3, 4) == -bracket(form, a, 4, 3)
        assert bracket(form, a, 1, 5) == 0.0
    with pytest.raises(ValidationError):
        bracket("sextic", a, 1, 2)


def test_hamiltonian_gradient_by_finite_differences():
    a = random_state(8, 10).array()
    for k in (1, 2, 3):
        g = hamiltonian_gradient(a, k)
        h = 1e-6
        for m in (0, 4, 9):
            e = np.zeros_like(a)
            e[m] = h
            fd = (hamiltonian(a + e, k) - hamiltonian(a - e, k)) / (2 * h)
            assert abs(fd - g[m]) < 1e-7


def test_first_hierarchy_flow_is_the_lattice():
    s = random_state(9, 14, boundary="semi-infinite", closure="hard")
    v1 = hierarchy_rhs(s, 1)
    ref = volterra_rhs(s)
    inner = ~np.isnan(v1)
    assert inner[0] and np.allclose(v1[inner], ref[inner], atol=1e-13)
    with pytest.raises(ValidationError):
        hierarchy_rhs(random_state(1, 6, boundary="window"), 2)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(min_value=0.2, max_value=3.0), min_size=6, max_size=14))
def test_bracket_flows_equal_lattice(values):
    s = LatticeState(tuple(values), boundary="window")
    ref = volterra_rhs(s)
    for form in FORMS:
        flow = bracket_flow(s, form)
        inner = ~np.isnan(flow)
        assert np.allclose(flow[inner], ref[inner], rtol=1e-12, atol=1e-12)
