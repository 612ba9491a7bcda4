"""Local-unitary switching: hasten, delay or avert sudden death.

A switch is an instantaneous conjugation by U_A (x) U_B applied at time
``t_sw`` between two stretches of thermal evolution.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .criteria import esd_zero_temperature
from .errors import CaseMismatch, FiniteTemperature, InvalidState, SeparableInput
from .qstate import (DensityMatrix, XState, _as_array, _max_non_x, _x_from_array,
                     as_x_state, pt_min_eigenvalue, separable_by_sign, validate)
from .thermal import ReservoirParams, _evolve_array, evolve_x

TAU_NEG = 1e-12
VERIFY_WINDOW = 0.5
TAU_T = 1e-6
H_SCAN = 0.01
DEFAULT_HORIZON = 30.0
PLATEAU_TOL = 1e-4
ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class LocalUnitaryParams:
    theta: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    omega: float = 0.0

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.theta, self.alpha, self.beta, self.omega)):
            raise ValueError("unitary angles must be finite")

    @classmethod
    def flip(cls) -> "LocalUnitaryParams":
        """theta = pi/2 with zero phases: the real matrix [[0, -1], [1, 0]]."""
        return cls(theta=math.pi / 2)


IDENTITY = LocalUnitaryParams()


@dataclass(frozen=True)
class SwitchSchedule:
    t_sw: float
    unitary_a: LocalUnitaryParams = IDENTITY
    unitary_b: LocalUnitaryParams = IDENTITY

    def __post_init__(self) -> None:
        if not self.t_sw >= 0:
            raise ValueError(f"switch time must be nonnegative, got {self.t_sw}")


# named switches offered by the CLI
SWAPS = {
    # rho11 <-> rho44 and rho22 <-> rho33
    "11-44": (LocalUnitaryParams.flip(), LocalUnitaryParams.flip()),
    # rho11 <-> rho22, rho33 <-> rho44, rho14 <-> rho23 (up to phases)
    "b-only": (IDENTITY, LocalUnitaryParams.flip()),
}


@dataclass
class SweepResult:
    samples: list[tuple[float, Optional[float]]]
    t_esd_no_switch: Optional[float]
    t_end_max: Optional[float]
    t_b: Optional[float]
    horizon: float
    plateau_tol: float = PLATEAU_TOL
    extra: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        lines = ["t_sw,t_end"]
        for t_sw, t_end in self.samples:
            lines.append(f"{t_sw!r},{'no-death' if t_end is None else repr(t_end)}")
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        return {
            "t_esd_no_switch": self.t_esd_no_switch,
            "t_end_max": self.t_end_max,
            "t_B": self.t_b,
            "horizon": self.horizon,
            "n_samples": len(self.samples),
        }


def unitary2(params: LocalUnitaryParams) -> np.ndarray:
    """General single-qubit unitary in the (|1>, |0>) basis."""
    th, a, b, w = params.theta, params.alpha, params.beta, params.omega
    c, s = math.cos(th), math.sin(th)
    return np.array([
        [c * np.exp(1j * a), -s * np.exp(1j * (a - w))],
        [s * np.exp(1j * (b + w)), c * np.exp(1j * b)],
    ])


def _is_half_pi_multiple(theta: float) -> bool:
    r = theta / (math.pi / 2)
    return abs(r - round(r)) * (math.pi / 2) <= ANGLE_TOL


def is_x_preserving(a: LocalUnitaryParams, b: LocalUnitaryParams) -> bool:
    """True iff both rotation angles are integer multiples of pi/2."""
    return _is_half_pi_multiple(a.theta) and _is_half_pi_multiple(b.theta)


def two_qubit_unitary(a: LocalUnitaryParams, b: LocalUnitaryParams) -> np.ndarray:
    return np.kron(unitary2(a), unitary2(b))


def _conjugate(arr: np.ndarray, u: np.ndarray) -> np.ndarray:
    out = u @ arr @ u.conj().T
    return 0.5 * (out + out.conj().T)


def apply_switch(rho: DensityMatrix | np.ndarray, a: LocalUnitaryParams,
                 b: LocalUnitaryParams, check: bool = True) -> DensityMatrix:
    arr = _as_array(rho)
    if check:
        report = validate(arr)
        if not report.valid:
            raise InvalidState(report.summary())
    out = _conjugate(arr, two_qubit_unitary(a, b))
    if is_x_preserving(a, b) and _max_non_x(arr) == 0.0:
        # exact zeros outside the X pattern; rounding from cos(pi/2) is dropped
        for i, j in ((0, 1), (0, 2), (1, 3), (2, 3)):
            out[i, j] = out[j, i] = 0.0
    return DensityMatrix(out)


class _Trajectory:
    """rho(t) for a single optional switch, with an X-state fast path."""

    def __init__(self, rho0: DensityMatrix | np.ndarray | XState, params: ReservoirParams,
                 schedule: SwitchSchedule | None):
        self.params = params
        self.schedule = schedule
        if isinstance(rho0, XState):
            arr = rho0.to_density().elements
        else:
            arr = _as_array(rho0)
        self.fast = _max_non_x(arr) == 0.0 and (
            schedule is None or is_x_preserving(schedule.unitary_a, schedule.unitary_b))
        self.x0 = _x_from_array(arr) if self.fast else None
        self.a0 = arr
        self.after = None
        if schedule is not None:
            pre = self._raw_state(schedule.t_sw)
            post = apply_switch(pre if not self.fast else pre.to_density(),
                                schedule.unitary_a, schedule.unitary_b, check=False)
            self.after = _x_from_array(post.elements) if self.fast else post.elements

    def _raw_state(self, t: float):
        if self.fast:
            return evolve_x(self.x0, self.params, t)
        return DensityMatrix(_evolve_array(self.a0, self.params, t) if t > 0 else self.a0)

    def state(self, t: float):
        s = self.schedule
        if s is None or t <= s.t_sw:
            st = self._raw_state(t)
        elif self.fast:
            st = evolve_x(self.after, self.params, t - s.t_sw)
        else:
            st = DensityMatrix(_evolve_array(self.after, self.params, t - s.t_sw))
        return st

    def dead(self, t: float, tau_neg: float | None) -> bool:
        st = self.state(t)
        if tau_neg is None:
            if isinstance(st, XState):
                return st.separable_by_sign()
            return separable_by_sign(st)
        return self.min_eig_of(st) >= -tau_neg

    @staticmethod
    def min_eig_of(st) -> float:
        if isinstance(st, XState):
            return st.pt_min_eigenvalue()
        return pt_min_eigenvalue(st)


def find_esd_time(rho0: DensityMatrix | XState, params: ReservoirParams,
                  schedule: SwitchSchedule | None = None, horizon: float | None = None, *,
                  h_scan: float = H_SCAN, tau_t: float = TAU_T, tau_neg: float | None = None,
                  verify_window: float = VERIFY_WINDOW) -> Optional[float]:
    """First time entanglement vanishes for good, or None if it survives ``horizon``.

    ``horizon`` defaults to 30/gamma_min; ``h_scan``, ``tau_t`` and
    ``verify_window`` are in units of 1/gamma_max.

    A time t counts as dead when the partial transpose is positive there.  By
    default this is the rounding-guarded determinant sign test; passing a
    float ``tau_neg`` uses ``negativity <= tau_neg`` instead, which misreads
    slow asymptotic decay as death once the negativity underflows the
    threshold.  Death is accepted only if it persists over the trailing
    window (and the window after a later switch), so transient zeros are
    skipped.
    """
    unit = 1.0 / params.rate_max
    if horizon is None:
        horizon = DEFAULT_HORIZON / params.rate_min
    if not horizon > 0:
        raise ValueError(f"horizon must be positive, got {horizon}")
    traj = _Trajectory(rho0, params, schedule)
    h, tol, window = h_scan * unit, tau_t * unit, verify_window * unit

    def dead(t: float) -> bool:
        return traj.dead(t, tau_neg)

    if dead(0.0):
        raise SeparableInput("initial state is not entangled")

    t_prev = 0.0
    while t_prev < horizon:
        t = min(t_prev + h, horizon)
        if not dead(t):
            t_prev = t
            continue
        lo, hi = t_prev, t
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if dead(mid):
                hi = mid
            else:
                lo = mid
        revived = _first_alive(dead, hi, min(hi + window, horizon), h)
        if revived is None and schedule is not None and schedule.t_sw > hi:
            revived = _first_alive(dead, schedule.t_sw,
                                   min(schedule.t_sw + window, horizon), h)
        if revived is None:
            return hi
        t_prev = revived
    return None


def _first_alive(dead, start: float, stop: float, h: float) -> Optional[float]:
    t = start
    while t < stop:
        t = min(t + h, stop)
        if not dead(t):
            return t
    return None


def _t_end(args) -> Optional[float]:
    rho0, params, a, b, t_sw, horizon, kw = args
    return find_esd_time(rho0, params, SwitchSchedule(t_sw, a, b), horizon, **kw)


def plateau_boundary(samples: Sequence[tuple[float, Optional[float]]],
                     tol: float) -> tuple[Optional[float], Optional[float]]:
    """(max t_end, largest t_sw whose t_end lies within ``tol`` of that max)."""
    finite = [(s, e) for s, e in samples if e is not None]
    if not finite:
        return None, None
    t_max = max(e for _, e in finite)
    in_class = [s for s, e in finite if e >= t_max - tol]
    return t_max, max(in_class)


def _delays(t_end: Optional[float], t_none: Optional[float]) -> bool:
    if t_none is None:
        return False
    return t_end is None or t_end > t_none


def delay_boundary(samples: Sequence[tuple[float, Optional[float]]],
                   t_none: Optional[float]) -> Optional[tuple[float, Optional[float]]]:
    """Bracket around the last grid switch time that still delays death.

    Scans from the earliest switch time; returns (t_lo, t_hi) where t_lo
    delays and t_hi (None at the end of the grid) no longer does, or None
    if the very first switch time already fails to delay.
    """
    if not samples or not _delays(samples[0][1], t_none):
        return None
    for (s0, _), (s1, e1) in zip(samples, samples[1:]):
        if not _delays(e1, t_none):
            return s0, s1
    return samples[-1][0], None


def sweep_switch(rho0: DensityMatrix | XState, params: ReservoirParams,
                 unitaries: tuple[LocalUnitaryParams, LocalUnitaryParams],
                 t_sw_grid: Iterable[float], horizon: float | None = None, *,
                 workers: int | None = None, plateau_tol: float = PLATEAU_TOL,
                 refine: bool = True, **find_kw) -> SweepResult:
    """ESD time as a function of the switching time.

    ``t_b`` is the latest switch time that still postpones death beyond the
    unswitched ESD time; switching later hastens it.  With ``refine`` it is
    bisected between grid points to the time tolerance, otherwise the last
    delaying grid point is reported.  The grid's flat top (``t_end`` within
    ``plateau_tol``/gamma_max of the maximum) is kept in ``extra``.
    ``workers`` > 1 spreads switch times over processes; results keep grid
    order either way.
    """
    grid = [float(t) for t in t_sw_grid]
    if not grid:
        raise ValueError("switch-time grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("switch-time grid must be strictly increasing")
    if horizon is None:
        horizon = DEFAULT_HORIZON / params.rate_min
    if grid[0] < 0 or grid[-1] > horizon:
        raise ValueError("switch times must lie within [0, horizon]")
    a, b = unitaries
    t_none = find_esd_time(rho0, params, None, horizon, **find_kw)
    jobs = [(rho0, params, a, b, t_sw, horizon, find_kw) for t_sw in grid]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            ends = list(pool.map(_t_end, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        ends = [_t_end(j) for j in jobs]
    samples = list(zip(grid, ends))
    t_max, t_flat = plateau_boundary(samples, plateau_tol / params.rate_max)

    t_b = None
    bracket = delay_boundary(samples, t_none)
    if bracket is not None:
        lo, hi = bracket
        if refine and hi is not None:
            tol = find_kw.get("tau_t", TAU_T) / params.rate_max
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if _delays(_t_end((rho0, params, a, b, mid, horizon, find_kw)), t_none):
                    lo = mid
                else:
                    hi = mid
        t_b = lo
    return SweepResult(samples, t_none, t_max, t_b, horizon, plateau_tol,
                       extra={"t_plateau_end": t_flat})


def avoidance_window(rho0: XState, params: ReservoirParams | None = None, *,
                     horizon: float = DEFAULT_HORIZON, tol: float = TAU_T) -> Optional[float]:
    """Latest switch time at which a rho11 <-> rho44 exchange still averts ESD.

    Vacuum reservoirs with equal rates only.  Returns None when no positive
    switch time works.  Raises FiniteTemperature for thermal reservoirs,
    where ESD can only be delayed.
    """
    params = params or ReservoirParams()
    if not params.zero_temperature:
        raise FiniteTemperature("ESD cannot be averted when a reservoir has nonzero temperature")
    if params.gamma1 != params.gamma2:
        raise ValueError("avoidance window requires equal decay rates")
    x = rho0 if isinstance(rho0, XState) else as_x_state(rho0)
    if not (x.is_entangled() and x.minor14 < 0):
        raise CaseMismatch("avoidance by rho11 <-> rho44 exchange needs a Case 1 state")
    if not esd_zero_temperature(x).will_die:
        raise CaseMismatch("state does not undergo ESD; nothing to avert")
    a, b = SWAPS["11-44"]

    def averted(t: float) -> bool:
        xt = evolve_x(x, params, t)
        if not xt.is_entangled():
            return False
        post = _x_from_array(apply_switch(xt.to_density(), a, b, check=False).elements)
        if not post.is_entangled():
            return False
        return esd_zero_temperature(post).status == "no-death"

    h = H_SCAN / params.gamma1
    t_stop = horizon / params.gamma1
    if not averted(0.0):
        # scan forward in case the averting range does not start at zero
        t = 0.0
        while t < t_stop and not averted(t):
            t += h
        if t >= t_stop:
            return None
        lo = t
    else:
        lo = 0.0
    t = lo
    while t < t_stop and averted(t):
        t += h
    if t >= t_stop:
        return t_stop
    lo, hi = t - h, t
    while hi - lo > tol / params.gamma1:
        mid = 0.5 * (lo + hi)
        if averted(mid):
            lo = mid
        else:
            hi = mid
    return lo if lo > 0 else None
