import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from esdlab import qstate
from esdlab.errors import InvalidState
from esdlab.oracle import integrate_many
from esdlab.qstate import DensityMatrix, XState, validate
from esdlab.thermal import ReservoirParams, asymptotic_matrix, evolve, evolve_x, steady_state

PARAM_SET = [
    ReservoirParams(1.0, 1.0, 0.0, 0.0),
    ReservoirParams(1.0, 0.6, 0.1, 1.0),
    ReservoirParams(0.4, 1.3, 1.0, 0.0),
    ReservoirParams(1.0, 1.0, 0.5, 0.5),
]


def test_params_validation():
    with pytest.raises(ValueError):
        ReservoirParams(0.0, 1.0)
    with pytest.raises(ValueError):
        ReservoirParams(1.0, 1.0, -0.1, 0.0)


def test_excited_state_decay_vacuum():
    rho0 = DensityMatrix(np.diag([1, 0, 0, 0]))
    for t in (0.1, 0.7, 2.0):
        e = math.exp(-t)
        expected = np.diag([e * e, e * (1 - e), e * (1 - e), (1 - e) ** 2])
        np.testing.assert_allclose(evolve(rho0, ReservoirParams(), t).elements, expected,
                                   atol=1e-15)


def test_bell_phi_coherence_decay():
    rho = evolve(qstate.bell_phi_plus(), ReservoirParams(), 0.8)
    assert rho[0, 3] == pytest.approx(0.5 * math.exp(-0.8), abs=1e-16)


def test_identity_at_t0(random_states):
    for p in PARAM_SET:
        assert evolve(random_states[0], p, 0.0) == random_states[0]


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        evolve(qstate.maximally_mixed(), ReservoirParams(), -1.0)
    with pytest.raises(InvalidState):
        evolve(np.diag([0.5, 0.6, -0.1, 0.0]), ReservoirParams(), 1.0)


def test_steady_state_examples():
    np.testing.assert_array_equal(steady_state(ReservoirParams()).elements, np.diag([0, 0, 0, 1]))
    p = ReservoirParams(m=0.1, n=0.1)
    expected = np.diag([0.01, 0.11, 0.11, 1.21]) / 1.44
    np.testing.assert_allclose(steady_state(p).elements, expected, atol=1e-15)
    late = evolve(qstate.bell_psi_plus(), p, 50.0)
    np.testing.assert_allclose(late.elements, expected, atol=1e-12)
    hot = steady_state(ReservoirParams(m=1e3, n=1e3)).elements
    np.testing.assert_allclose(hot, np.eye(4) / 4, atol=1e-3)


def test_steady_state_is_limit_for_all_inputs(random_states):
    for p in PARAM_SET:
        ss = steady_state(p)
        for rho in random_states[:10]:
            dists = [np.abs(evolve(rho, p, t / p.rate_min).elements - ss.elements).max()
                     for t in (10, 20, 40)]
            assert dists[0] > dists[1] > dists[2] or dists[2] < 1e-12
            assert dists[2] < 1e-8


def test_semigroup(random_states):
    for p in PARAM_SET:
        for rho in random_states[:20]:
            a = evolve(evolve(rho, p, 0.3), p, 0.9, check=False)
            b = evolve(rho, p, 1.2)
            np.testing.assert_allclose(a.elements, b.elements, atol=1e-12)


def test_physicality_preserved(random_states):
    for p in PARAM_SET:
        for rho in random_states[:25]:
            for t in (0.05, 0.5, 2.0, 10.0):
                assert validate(evolve(rho, p, t)).valid


def test_x_closure_and_fast_path(rng):
    for p in PARAM_SET:
        for _ in range(20):
            x = qstate.random_x_state(rng)
            for t in (0.2, 1.5):
                full = evolve(x.to_density(), p, t)
                assert qstate._max_non_x(full.elements) == 0.0
                fast = evolve_x(x, p, t).to_density()
                np.testing.assert_allclose(full.elements, fast.elements, atol=1e-15)


def test_matches_rk4_oracle(random_states):
    states = np.array([r.elements for r in random_states[:10]])
    for p in PARAM_SET:
        for t in (0.5, 2.0):
            ref = integrate_many(states, p, t)
            for k, rho in enumerate(random_states[:10]):
                assert np.abs(evolve(rho, p, t).elements - ref[k]).max() < 1e-10


def test_asymptotic_matrix_bell():
    mt = asymptotic_matrix(qstate.bell_psi_plus())
    assert mt.elements[0, 0] == 0 and mt.elements[0, 3] == 0.5 and mt.elements[3, 3] == 1
    assert mt.in_regime


def test_asymptotic_matrix_ground_state():
    mt = asymptotic_matrix(np.diag([0, 0, 0, 1.0]))
    expected = np.zeros((4, 4))
    expected[3, 3] = 1
    np.testing.assert_array_equal(mt.elements, expected)


def test_asymptotic_matrix_x_shape_and_minors(rng):
    for _ in range(50):
        x = qstate.random_x_state(rng)
        mt = asymptotic_matrix(x.to_density()).elements
        assert all(mt[i, j] == 0 for i, j in ((0, 1), (0, 2), (1, 3), (2, 3)))
        assert qstate.principal_minor(mt, (1, 4)) == pytest.approx(x.p11 - abs(x.c23) ** 2)
        assert qstate.principal_minor(mt, (2, 3)) == pytest.approx(
            (x.p11 + x.p22) * (x.p11 + x.p33) - abs(x.c14) ** 2)


def test_asymptotic_matrix_regime_flag():
    assert not asymptotic_matrix(qstate.bell_psi_plus(), ReservoirParams(m=0.1)).in_regime


rates = st.floats(0.1, 3.0)
photons = st.floats(0.0, 2.0)


@settings(max_examples=60, deadline=None)
@given(rates, rates, photons, photons, st.floats(0.0, 2.0), st.floats(0.0, 2.0),
       st.integers(0, 2**32 - 1))
def test_semigroup_property(g1, g2, m, n, t1, t2, seed):
    p = ReservoirParams(g1, g2, m, n)
    rho = qstate.random_density(np.random.default_rng(seed))
    a = evolve(evolve(rho, p, t1), p, t2, check=False)
    np.testing.assert_allclose(a.elements, evolve(rho, p, t1 + t2).elements, atol=1e-12)
    assert abs(np.trace(a.elements) - 1) < 1e-12
