import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from esdlab import qstate
from esdlab.errors import NotHermitian, NotXState
from esdlab.qstate import (DensityMatrix, XState, as_x_state, min_seven_minors, negativity,
                           partial_transpose, principal_minor, validate)

from conftest import np_negativity, np_pt_eigs

MIXED = qstate.maximally_mixed()


# -- validate --------------------------------------------------------------

def test_validate_maximally_mixed():
    assert validate(MIXED).valid


def test_validate_bell_projector():
    assert validate(qstate.bell_psi_plus()).valid


def test_validate_reports_each_violation():
    rep = validate(np.diag([0.5, 0.6, -0.1, 0.0]))
    names = {v.name for v in rep.violations}
    assert not rep.valid
    assert "negative population" in names
    # trace is 1.0 here, so only check it is not falsely flagged
    assert "trace != 1" not in names
    rep2 = validate(np.diag([0.5, 0.6, 0.1, 0.0]))
    assert "trace != 1" in {v.name for v in rep2.violations}
    assert rep2.violations[0].magnitude == pytest.approx(0.2)


def test_validate_non_hermitian():
    a = np.eye(4, dtype=complex) / 4
    a[0, 1] = 0.1
    assert "non-Hermitian" in {v.name for v in validate(a).violations}


# -- partial transpose -----------------------------------------------------

def test_pt_of_mixed_is_itself():
    assert partial_transpose(MIXED) == MIXED


def test_pt_swaps_x_coherences():
    x = XState(0.1, 0.2, 0.3, 0.4, 0.05 + 0.02j, 0.1 - 0.03j)
    pt = partial_transpose(x.to_density()).elements
    assert pt[0, 3] == x.c23
    assert pt[1, 2] == x.c14
    np.testing.assert_array_equal(np.diag(pt), [0.1, 0.2, 0.3, 0.4])
    mask = np.ones((4, 4), bool)
    mask[np.diag_indices(4)] = False
    mask[[0, 3, 1, 2], [3, 0, 2, 1]] = False
    assert np.all(pt[mask] == 0)


def test_pt_bell_eigenvalues():
    eigs = qstate.pt_eigenvalues(qstate.bell_psi_plus())
    np.testing.assert_allclose(eigs, [-0.5, 0.5, 0.5, 0.5], atol=1e-14)
    np.testing.assert_allclose(eigs, np_pt_eigs(qstate.bell_psi_plus()), atol=1e-14)


def test_pt_rejects_non_hermitian():
    a = np.eye(4, dtype=complex) / 4
    a[0, 2] = 1j
    with pytest.raises(NotHermitian):
        partial_transpose(a)


def test_pt_involution_trace_hermiticity(random_states):
    for rho in random_states:
        pt = partial_transpose(rho)
        assert partial_transpose(pt) == rho
        assert np.trace(pt.elements) == pytest.approx(1.0, abs=1e-14)
        np.testing.assert_array_equal(pt.elements, pt.elements.conj().T)


# -- principal minors ------------------------------------------------------

def test_minor_of_mixed():
    assert principal_minor(MIXED, (1, 4)) == pytest.approx(1 / 16)


def test_minor_pt_bell():
    assert principal_minor(partial_transpose(qstate.bell_psi_plus()), (1, 4)) == pytest.approx(-0.25)


@pytest.mark.parametrize("bad", [(), (1, 1), (2, 1), (0, 2), (1, 5)])
def test_minor_index_errors(bad):
    with pytest.raises(ValueError):
        principal_minor(MIXED, bad)


def test_minor12_nonnegative_for_x_states(rng):
    for _ in range(50):
        x = qstate.random_x_state(rng)
        assert principal_minor(partial_transpose(x.to_density()), (1, 2)) == pytest.approx(
            x.p11 * x.p22, abs=1e-15)
        assert principal_minor(partial_transpose(x.to_density()), (1, 2)) >= 0


def test_min_seven_minors_examples():
    p, ms = min_seven_minors(MIXED)
    assert p == pytest.approx(1 / 256)  # the 4x4 determinant is the smallest
    assert ms.m14 == pytest.approx(1 / 16) and ms.m123 == pytest.approx(1 / 64)
    p, ms = min_seven_minors(qstate.bell_psi_plus())
    assert p == pytest.approx(-0.25) and ms.m14 == p
    p, _ = min_seven_minors(qstate.werner_singlet(1 / 3).to_density())
    assert p == pytest.approx(0.0, abs=1e-15)
    assert min(np_pt_eigs(qstate.werner_singlet(1 / 3).to_density())) == pytest.approx(0, abs=1e-15)


def test_minor_factorization_identities(rng):
    for _ in range(200):
        x = qstate.random_x_state(rng)
        _, ms = min_seven_minors(x.to_density())
        m14, m23 = x.minor14, x.minor23
        assert ms.m14 == pytest.approx(m14, abs=1e-12)
        assert ms.m23 == pytest.approx(m23, abs=1e-12)
        assert abs(ms.m123 - x.p11 * m23) < 1e-12
        assert abs(ms.m124 - x.p22 * m14) < 1e-12
        assert abs(ms.m134 - x.p33 * m14) < 1e-12
        assert abs(ms.m234 - x.p44 * m23) < 1e-12
        assert abs(ms.m1234 - m14 * m23) < 1e-12


def test_minor_sign_agrees_with_negativity(random_states):
    for rho in random_states:
        p, _ = min_seven_minors(rho)
        neg = np_negativity(rho)
        if abs(p) > qstate.TAU_PSD and neg > qstate.TAU_PSD:
            assert p < 0
        elif abs(p) > qstate.TAU_PSD:
            assert p > 0 and neg <= qstate.TAU_PSD


# -- negativity ------------------------------------------------------------

def test_negativity_examples():
    assert negativity(MIXED) == 0.0
    assert negativity(qstate.bell_psi_plus()) == pytest.approx(0.5, abs=1e-14)
    assert negativity(qstate.werner_singlet(0.5).to_density()) == pytest.approx(1 / 8, abs=1e-14)


def test_negativity_general_path_matches_oracle(random_states):
    for rho in random_states:
        n = negativity(rho)
        assert n == pytest.approx(np_negativity(rho), abs=1e-12)
        assert 0.0 <= n <= 0.5 + 1e-12


@given(st.floats(0.0, 1.0))
def test_werner_negativity_closed_form(a):
    expected = max(0.0, (3 * a - 1) / 4)
    assert negativity(qstate.werner_singlet(a).to_density()) == pytest.approx(expected, abs=1e-14)


def test_separable_by_sign_matches_negativity(random_states, entangled_x_states):
    for rho in random_states:
        assert qstate.separable_by_sign(rho) == (np_negativity(rho) < 1e-12)
    for x in entangled_x_states:
        assert not qstate.separable_by_sign(x.to_density())


# -- X states and serialization -------------------------------------------

def test_as_x_state_bell():
    x = as_x_state(qstate.bell_psi_plus())
    assert (x.p11, x.p22, x.p33, x.p44, x.c14, x.c23) == (0, 0.5, 0.5, 0, 0, 0.5)


def test_as_x_state_rejects_perturbation():
    a = qstate.werner_triplet(0.5).to_density().elements.copy()
    a[0, 1] = a[1, 0] = 1e-6
    with pytest.raises(NotXState):
        as_x_state(a)


def test_xstate_invariants(rng):
    for _ in range(200):
        x = qstate.random_x_state(rng)
        assert x.p11 + x.p22 + x.p33 + x.p44 == pytest.approx(1.0)
        assert x.p22 * x.p33 >= abs(x.c23) ** 2 - 1e-15
        assert x.p11 * x.p44 >= abs(x.c14) ** 2 - 1e-15
        # never entangled through both blocks at once
        assert not (x.minor14 < 0 and x.minor23 < 0)


finite = st.floats(-1.0, 1.0, allow_nan=False)


@settings(max_examples=50)
@given(st.lists(finite, min_size=32, max_size=32))
def test_json_roundtrip_bit_exact(vals):
    a = np.array(vals[:16]).reshape(4, 4) + 1j * np.array(vals[16:]).reshape(4, 4)
    rho = DensityMatrix(a)
    back = qstate.state_from_json(qstate.state_to_json(rho))
    assert back == rho


def test_compact_json_form():
    rho = qstate.state_from_json(
        '{"p11": 0.25, "p22": 0.25, "p33": 0.25, "p44": 0.25, "c14": [0.1, 0.05], "c23": [0, 0]}')
    assert rho[0, 3] == 0.1 + 0.05j and rho[3, 0] == 0.1 - 0.05j
    x = as_x_state(rho)
    assert qstate.state_from_json(json.loads(qstate.state_to_json(x))) == rho


def test_density_is_immutable():
    with pytest.raises(ValueError):
        MIXED.elements[0, 0] = 1.0


def test_werner_singlet_layout():
    x = qstate.werner_singlet(0.5)
    assert x.p11 == pytest.approx(1 / 8) and abs(x.c23) ** 2 == pytest.approx(1 / 16)
    assert math.isclose(x.p22, 3 / 8)
