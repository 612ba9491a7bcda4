"""Brute-force RK4 integration of the two-qubit thermal master equation.

Kept deliberately independent of :mod:`esdlab.thermal`: the generator is
assembled from the jump operators, nothing from the closed-form solution is
reused.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import StepBudgetExceeded
from .qstate import DensityMatrix, _as_array
from .thermal import ReservoirParams

# single-qubit basis order is (|1>, |0>)
_SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)   # |1><0|
_SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |0><1|
_I2 = np.eye(2, dtype=complex)

SP1 = np.kron(_SIGMA_PLUS, _I2)
SM1 = np.kron(_SIGMA_MINUS, _I2)
SP2 = np.kron(_I2, _SIGMA_PLUS)
SM2 = np.kron(_I2, _SIGMA_MINUS)


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1e-3
    method: str = "rk4"
    max_steps: int = 10_000_000

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.method != "rk4":
            raise ValueError(f"only fixed-step 'rk4' is available, got {self.method!r}")

    def accurate_for(self, params: ReservoirParams) -> bool:
        fastest = max(params.gamma1 * (2 * params.m + 1), params.gamma2 * (2 * params.n + 1))
        return self.dt * fastest <= 0.01


def _dissipator(op: np.ndarray, rho: np.ndarray) -> np.ndarray:
    od = op.conj().T
    odo = od @ op
    return 2 * op @ rho @ od - odo @ rho - rho @ odo


def _raw_rhs(a: np.ndarray, params: ReservoirParams) -> np.ndarray:
    g1, g2, m, n = params.gamma1, params.gamma2, params.m, params.n
    return (
        0.5 * g1 * (m + 1) * _dissipator(SM1, a)
        + 0.5 * g1 * m * _dissipator(SP1, a)
        + 0.5 * g2 * (n + 1) * _dissipator(SM2, a)
        + 0.5 * g2 * n * _dissipator(SP2, a)
    )


def lindblad_rhs(rho: DensityMatrix | np.ndarray, params: ReservoirParams) -> np.ndarray:
    """Time derivative of ``rho``; the result is symmetrized to be Hermitian."""
    d = _raw_rhs(_as_array(rho), params)
    return 0.5 * (d + d.conj().T)


def generator(params: ReservoirParams) -> np.ndarray:
    """16x16 matrix L with vec(drho/dt) = L @ vec(rho), row-major vec."""
    cols = []
    for k in range(16):
        e = np.zeros(16, dtype=complex)
        e[k] = 1.0
        cols.append(_raw_rhs(e.reshape(4, 4), params).reshape(16))
    return np.stack(cols, axis=1)


def _n_steps(t: float, config: IntegratorConfig) -> int:
    steps = math.ceil(t / config.dt - 1e-9)
    if steps > config.max_steps:
        raise StepBudgetExceeded(f"{steps} steps needed, budget is {config.max_steps}")
    return steps


def integrate_many(states: np.ndarray, params: ReservoirParams, t: float,
                   config: IntegratorConfig = IntegratorConfig()) -> np.ndarray:
    """RK4 for a batch of shape (B, 4, 4); every state shares the same steps."""
    if t < 0:
        raise ValueError("time must be nonnegative")
    x = np.array(states, dtype=complex).reshape(-1, 16).T
    if t == 0:
        return x.T.reshape(-1, 4, 4)
    steps = _n_steps(t, config)
    h = t / steps
    lg = generator(params)
    for _ in range(steps):
        k1 = lg @ x
        k2 = lg @ (x + 0.5 * h * k1)
        k3 = lg @ (x + 0.5 * h * k2)
        k4 = lg @ (x + h * k3)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        # keep each state exactly Hermitian
        b = x.T.reshape(-1, 4, 4)
        x = (0.5 * (b + b.conj().transpose(0, 2, 1))).reshape(-1, 16).T
    return x.T.reshape(-1, 4, 4)


def integrate(rho0: DensityMatrix | np.ndarray, params: ReservoirParams, t: float,
              config: IntegratorConfig = IntegratorConfig()) -> DensityMatrix:
    """RK4 endpoint at time ``t``; the step is shrunk so the grid lands on ``t``."""
    a = np.array(_as_array(rho0), dtype=complex)
    return DensityMatrix(integrate_many(a[None], params, t, config)[0])
