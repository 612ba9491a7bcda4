"""Exact evolution of two qubits in independent thermal reservoirs.

Each qubit i decays at rate gamma_i into a bath with mean photon number
m (qubit A) or n (qubit B).  The solution below is closed form for an
arbitrary initial 4x4 state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidState
from .qstate import DensityMatrix, XState, _as_array, validate


@dataclass(frozen=True)
class ReservoirParams:
    gamma1: float = 1.0
    gamma2: float = 1.0
    m: float = 0.0
    n: float = 0.0

    def __post_init__(self) -> None:
        if not (self.gamma1 > 0 and self.gamma2 > 0):
            raise ValueError(f"decay rates must be positive, got {self.gamma1}, {self.gamma2}")
        if not (self.m >= 0 and self.n >= 0):
            raise ValueError(f"photon numbers must be nonnegative, got m={self.m}, n={self.n}")
        for v in (self.gamma1, self.gamma2, self.m, self.n):
            if not math.isfinite(v):
                raise ValueError("reservoir parameters must be finite")

    @property
    def zero_temperature(self) -> bool:
        return self.m == 0 and self.n == 0

    @property
    def symmetric(self) -> bool:
        return self.m == self.n and self.gamma1 == self.gamma2

    @property
    def rate_max(self) -> float:
        return max(self.gamma1, self.gamma2)

    @property
    def rate_min(self) -> float:
        return min(self.gamma1, self.gamma2)

    def to_json(self) -> dict[str, float]:
        return {"gamma1": self.gamma1, "gamma2": self.gamma2, "m": self.m, "n": self.n}

    @classmethod
    def from_json(cls, obj: dict) -> "ReservoirParams":
        return cls(
            float(obj.get("gamma1", 1.0)), float(obj.get("gamma2", 1.0)),
            float(obj.get("m", 0.0)), float(obj.get("n", 0.0)),
        )


@dataclass(frozen=True)
class AsymptoticMatrix:
    """Matrix whose partial-transpose minors decide long-time separability.

    Only meaningful for vacuum reservoirs with equal decay rates; ``regime``
    records whether the caller stayed inside that regime.
    """

    elements: np.ndarray
    regime: str = "m=n=0, gamma1=gamma2"
    in_regime: bool = True


def _evolve_array(a: np.ndarray, params: ReservoirParams, t: float) -> np.ndarray:
    g1, g2, m, n = params.gamma1, params.gamma2, params.m, params.n
    r11, r22, r33, r44 = a[0, 0].real, a[1, 1].real, a[2, 2].real, a[3, 3].real
    r12, r13, r14 = a[0, 1], a[0, 2], a[0, 3]
    r23, r24, r34 = a[1, 2], a[1, 3], a[2, 3]

    k1 = (2 * m + 1) * g1
    k2 = (2 * n + 1) * g2
    e1 = math.exp(-k1 * t)
    e2 = math.exp(-k2 * t)
    e12 = math.exp(-(k1 + k2) * t)
    norm = 1.0 / ((2 * m + 1) * (2 * n + 1))

    # shared brackets of the population solutions
    u = (n + 1) * r11 + r33 - n * (r22 - r33 + r44)
    v = (m + 1) * r11 + (m + 1) * r22 - m * (r33 + r44)
    w = (m + 1) * (n + 1) * r11 - m * r33 - n * (r22 + m * r22 + m * r33 - m * r44)

    p11 = norm * (m * n + m * u * e2 + n * v * e1 + w * e12)
    p22 = norm * (m * (n + 1) - m * u * e2 + (n + 1) * v * e1 - w * e12)
    p33 = norm * (n * (m + 1) + (m + 1) * u * e2 - n * v * e1 - w * e12)
    p44 = 1.0 - p11 - p22 - p33

    h1 = math.exp(-0.5 * k2 * t)
    h1b = math.exp(-0.5 * (2 * k1 + k2) * t)
    h2 = math.exp(-0.5 * k1 * t)
    h2b = math.exp(-0.5 * (k1 + 2 * k2) * t)
    q12 = (m * (r12 + r34) * h1 + ((m + 1) * r12 - m * r34) * h1b) / (2 * m + 1)
    q34 = ((m + 1) * (r12 + r34) * h1 + (m * r34 - (m + 1) * r12) * h1b) / (2 * m + 1)
    q13 = (n * (r13 + r24) * h2 + ((n + 1) * r13 - n * r24) * h2b) / (2 * n + 1)
    q24 = ((n + 1) * (r13 + r24) * h2 + (n * r24 - (n + 1) * r13) * h2b) / (2 * n + 1)
    dec = math.exp(-((m + 0.5) * g1 + (n + 0.5) * g2) * t)
    q14 = r14 * dec
    q23 = r23 * dec

    out = np.empty((4, 4), dtype=complex)
    out[0, 0], out[1, 1], out[2, 2], out[3, 3] = p11, p22, p33, p44
    upper = {(0, 1): q12, (0, 2): q13, (0, 3): q14, (1, 2): q23, (1, 3): q24, (2, 3): q34}
    for (i, j), val in upper.items():
        out[i, j] = val
        out[j, i] = np.conj(val)
    return out


def evolve(rho0: DensityMatrix | np.ndarray, params: ReservoirParams, t: float,
           check: bool = True) -> DensityMatrix:
    """State at time ``t`` under the thermal master equation.

    ``check=False`` skips input validation; inner loops that already hold a
    valid state use it.
    """
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    a = _as_array(rho0)
    if check:
        report = validate(a)
        if not report.valid:
            raise InvalidState(report.summary())
    if t == 0:
        return rho0 if isinstance(rho0, DensityMatrix) else DensityMatrix(a)
    return DensityMatrix(_evolve_array(a, params, t))


def evolve_x(x: XState, params: ReservoirParams, t: float) -> XState:
    """Same dynamics restricted to X states; avoids building 4x4 matrices."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    if t == 0:
        return x
    g1, g2, m, n = params.gamma1, params.gamma2, params.m, params.n
    r11, r22, r33, r44 = x.p11, x.p22, x.p33, x.p44
    k1 = (2 * m + 1) * g1
    k2 = (2 * n + 1) * g2
    e1, e2, e12 = math.exp(-k1 * t), math.exp(-k2 * t), math.exp(-(k1 + k2) * t)
    norm = 1.0 / ((2 * m + 1) * (2 * n + 1))
    u = (n + 1) * r11 + r33 - n * (r22 - r33 + r44)
    v = (m + 1) * r11 + (m + 1) * r22 - m * (r33 + r44)
    w = (m + 1) * (n + 1) * r11 - m * r33 - n * (r22 + m * r22 + m * r33 - m * r44)
    p11 = norm * (m * n + m * u * e2 + n * v * e1 + w * e12)
    p22 = norm * (m * (n + 1) - m * u * e2 + (n + 1) * v * e1 - w * e12)
    p33 = norm * (n * (m + 1) + (m + 1) * u * e2 - n * v * e1 - w * e12)
    dec = math.exp(-((m + 0.5) * g1 + (n + 0.5) * g2) * t)
    return XState(p11, p22, p33, 1.0 - p11 - p22 - p33, x.c14 * dec, x.c23 * dec)


def steady_state(params: ReservoirParams) -> DensityMatrix:
    m, n = params.m, params.n
    d = (2 * m + 1) * (2 * n + 1)
    pops = np.array([m * n, m * (n + 1), n * (m + 1), (m + 1) * (n + 1)]) / d
    return DensityMatrix(np.diag(pops).astype(complex))


def asymptotic_matrix(rho0: DensityMatrix | np.ndarray,
                      params: ReservoirParams | None = None) -> AsymptoticMatrix:
    """Build the long-time separability matrix from the initial elements.

    Entries are taken literally, with rho_ji = conj(rho_ij); the (4,4) entry
    is fixed to 1.
    """
    r = _as_array(rho0)

    def el(i: int, j: int) -> complex:
        return r[i - 1, j - 1]

    mt = np.array([
        [el(1, 1), el(2, 1), el(1, 3), el(2, 3)],
        [el(1, 2), el(1, 1) + el(2, 2), el(1, 4), el(1, 3) + el(2, 4)],
        [el(3, 1), el(4, 1), el(1, 1) + el(3, 3), el(2, 1) + el(4, 3)],
        [el(3, 2), el(3, 1) + el(4, 2), el(1, 2) + el(3, 4), 1.0],
    ], dtype=complex)
    in_regime = params is None or (params.zero_temperature and params.gamma1 == params.gamma2)
    return AsymptoticMatrix(mt, in_regime=in_regime)
