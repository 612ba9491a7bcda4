import numpy as np
import pytest

from esdlab import qstate


def np_pt_eigs(rho):
    """Oracle: numpy's LAPACK eigensolver on the partial transpose."""
    a = rho.elements if isinstance(rho, qstate.DensityMatrix) else np.asarray(rho)
    pt = a.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    return np.linalg.eigvalsh(pt)


def np_negativity(rho):
    return float(-np.sum(np.minimum(np_pt_eigs(rho), 0.0)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def random_states():
    g = np.random.default_rng(7)
    return [qstate.random_density(g, rank=int(g.integers(1, 5))) for _ in range(100)]


@pytest.fixture(scope="session")
def entangled_x_states():
    g = np.random.default_rng(11)
    return [qstate.random_x_state(g, entangled=True) for _ in range(100)]
