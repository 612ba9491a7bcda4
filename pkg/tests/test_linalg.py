import itertools

import numpy as np
import pytest

from esdlab.linalg import (cofactor_det, hermitian_2x2_eigvalsh, hermitian_eigvalsh,
                           jacobi_eigvalsh_real, permanent_abs)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_cofactor_det_matches_lapack(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    assert cofactor_det(a) == pytest.approx(np.linalg.det(a), rel=1e-12)


def test_jacobi_real_symmetric(rng):
    for _ in range(20):
        g = rng.normal(size=(8, 8))
        s = g + g.T
        np.testing.assert_allclose(jacobi_eigvalsh_real(s), np.linalg.eigvalsh(s), atol=1e-12)


def test_jacobi_hermitian_embedding(rng):
    for _ in range(20):
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        h = g + g.conj().T
        np.testing.assert_allclose(hermitian_eigvalsh(h), np.linalg.eigvalsh(h), atol=1e-12)


def test_jacobi_degenerate_spectrum():
    h = np.diag([0.5, 0.5, 0.5, -0.5]).astype(complex)
    np.testing.assert_allclose(hermitian_eigvalsh(h), [-0.5, 0.5, 0.5, 0.5])


def test_2x2_small_eigenvalue_keeps_relative_accuracy():
    b = 5e-14
    lo, hi = hermitian_2x2_eigvalsh(0.0, 1.0, b)
    assert lo == pytest.approx(-b * b, rel=1e-12)
    assert hi == pytest.approx(1.0)


def test_permanent_abs_of_identity_and_ones():
    assert permanent_abs(np.eye(4)) == 1.0
    assert permanent_abs(-np.ones((3, 3))) == len(list(itertools.permutations(range(3))))
