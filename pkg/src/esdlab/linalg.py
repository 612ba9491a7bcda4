"""Small dense kernels: cofactor determinants and Jacobi eigenvalues.

Sizes here never exceed 8x8, so clarity wins over speed.
"""

from __future__ import annotations

import math
from itertools import permutations

import numpy as np

from .errors import EigenNonConvergence

MAX_SWEEPS = 50


def cofactor_det(a: np.ndarray) -> complex:
    """Determinant by Laplace expansion along the first row."""
    n = a.shape[0]
    if n == 0:
        return 1.0
    if n == 1:
        return a[0, 0]
    if n == 2:
        return a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    total = 0.0
    rest = a[1:]
    for j in range(n):
        if a[0, j] == 0:
            continue
        minor = np.delete(rest, j, axis=1)
        sign = -1.0 if j % 2 else 1.0
        total = total + sign * a[0, j] * cofactor_det(minor)
    return total


def jacobi_eigvalsh_real(a: np.ndarray, tol: float = 1e-15) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi sweeps.

    Returns the eigenvalues in ascending order.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    scale = max(float(np.max(np.abs(a))), 1e-300)
    for _ in range(MAX_SWEEPS):
        off = math.sqrt(float(np.sum(a * a) - np.sum(np.diag(a) ** 2)))
        if off <= tol * scale:
            return np.sort(np.diag(a))
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-300:
                    continue
                # classic stable rotation (Golub & Van Loan 8.4)
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot = np.array([[c, s], [-s, c]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ rot
                a[idx, :] = rot.T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
    raise EigenNonConvergence(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")


def hermitian_eigvalsh(h: np.ndarray) -> np.ndarray:
    """Eigenvalues of a complex Hermitian matrix, ascending.

    Uses the real symmetric embedding [[Re, -Im], [Im, Re]], whose spectrum is
    the Hermitian spectrum with every eigenvalue doubled.
    """
    re, im = h.real, h.imag
    emb = np.block([[re, -im], [im, re]])
    emb = 0.5 * (emb + emb.T)
    lam = jacobi_eigvalsh_real(emb)
    return lam[::2].copy()


def hermitian_2x2_eigvalsh(a: float, d: float, b: complex) -> tuple[float, float]:
    """Exact eigenvalues of [[a, b], [conj(b), d]], ascending.

    The small eigenvalue is taken as det/large when possible, which keeps its
    relative accuracy when it is tiny.
    """
    mean = 0.5 * (a + d)
    rad = math.hypot(0.5 * (a - d), abs(b))
    hi = mean + rad
    if hi > 0:
        return (a * d - abs(b) ** 2) / hi, hi
    return mean - rad, hi


def permanent_abs(a: np.ndarray) -> float:
    """Permanent of |a|: bounds the magnitude of every term in det(a)."""
    n = a.shape[0]
    m = np.abs(a)
    return float(sum(math.prod(m[i, p[i]] for i in range(n)) for p in permutations(range(n))))
