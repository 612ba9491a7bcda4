"""Sudden-death predicates and closed-form entanglement for X states."""

from __future__ import annotations

import logging
import math

import numpy as np
from dataclasses import dataclass, field

from .errors import CaseMismatch, SeparableInput
from .qstate import TAU_PSD, XState, as_x_state
from .thermal import ReservoirParams, evolve_x

log = logging.getLogger(__name__)

DEFAULT_ASYMPTOTIC_HORIZON = 30.0


@dataclass(frozen=True)
class EsdVerdict:
    """Outcome of an ESD test.

    ``status`` is "death", "no-death" or "boundary"; ``will_die`` is True
    only for "death".
    """

    status: str
    conditions: dict[str, float] = field(default_factory=dict)
    reason: str = ""
    cross_check: dict[str, float] | None = None

    @property
    def will_die(self) -> bool:
        return self.status == "death"

    @property
    def boundary(self) -> bool:
        return self.status == "boundary"

    def to_json(self) -> dict:
        out = {"status": self.status, "will_die": self.will_die,
               "conditions": dict(self.conditions), "reason": self.reason}
        if self.cross_check is not None:
            out["cross_check"] = dict(self.cross_check)
        return out


def _verdict_from(conditions: dict[str, float], tol: float = TAU_PSD) -> str:
    vals = list(conditions.values())
    if all(v > tol for v in vals):
        return "death"
    if any(v < -tol for v in vals):
        return "no-death"
    return "boundary"


def _require_entangled(x: XState) -> None:
    if not x.is_entangled(TAU_PSD):
        raise SeparableInput("initial state is not entangled")


def esd_zero_temperature(rho0: XState) -> EsdVerdict:
    """Vacuum reservoirs with equal rates: ESD iff both asymptotic minors are positive."""
    x = rho0 if isinstance(rho0, XState) else as_x_state(rho0)
    _require_entangled(x)
    cond = {
        "rho11-|rho23|^2": x.p11 - abs(x.c23) ** 2,
        "(rho11+rho22)(rho11+rho33)-|rho14|^2": (x.p11 + x.p22) * (x.p11 + x.p33) - abs(x.c14) ** 2,
    }
    return EsdVerdict(_verdict_from(cond), cond, "asymptotic minors at m=n=0")


def which_case(x: XState) -> int:
    """1 if rho11*rho44 < |rho23|^2, 2 if rho22*rho33 < |rho14|^2, 0 if separable."""
    if x.minor14 < 0:
        return 1
    if x.minor23 < 0:
        return 2
    return 0


def negativity_case1(rho0: XState, p: float) -> float:
    """Closed-form negativity for Case 1 at decay factor p = exp(-gamma t).

    This is twice the eigenvalue-sum negativity of the evolved state.
    """
    x = rho0
    if not x.minor14 < 0:
        raise CaseMismatch("Case 1 requires rho11*rho44 < |rho23|^2")
    c2 = abs(x.c23) ** 2
    f = (1 - 2 * p + 2 * p * p) * x.p11 + (1 - p) * (x.p22 + x.p33) + x.p44
    excess = -4 * p * p * (x.p11 * f - p * p * x.p11 ** 2 - c2)
    disc = f * f + excess
    # sqrt(disc) - f, rationalized so late-time values keep relative accuracy
    root = math.sqrt(max(disc, 0.0))
    return max(0.0, excess / (root + f)) if root + f > 0 else 0.0


def negativity_case2(rho0: XState, p: float) -> float:
    """Closed-form negativity for Case 2; same factor-2 convention as Case 1."""
    x = rho0
    if not x.minor23 < 0:
        raise CaseMismatch("Case 2 requires rho22*rho33 < |rho14|^2")
    root = math.sqrt((x.p22 - x.p33) ** 2 + 4 * abs(x.c14) ** 2)
    return max(0.0, p * (root - (x.p22 + x.p33) - (2 - 2 * p) * x.p11))


def closed_form_negativity(rho0: XState, p: float) -> float:
    case = which_case(rho0)
    if case == 1:
        return negativity_case1(rho0, p)
    if case == 2:
        return negativity_case2(rho0, p)
    raise SeparableInput("initial state is not entangled")


@dataclass(frozen=True)
class MinorPolynomial:
    """constant + sum_i coeffs[i-1] * exp(-i * decay_base * t), times ``scale``."""

    constant: float
    coeffs: tuple[float, float, float, float]
    decay_base: float
    scale: float = 1.0

    def __call__(self, t: float) -> float:
        e = math.exp(-self.decay_base * t)
        acc, ek = self.constant, 1.0
        for c in self.coeffs:
            ek *= e
            acc += c * ek
        return self.scale * acc

    def to_json(self) -> dict:
        return {"constant": self.constant, "coeffs": list(self.coeffs),
                "decay_base": self.decay_base, "scale": self.scale}


def _population_series(x: XState, m: float) -> tuple[tuple[float, float, float], ...]:
    """Populations times (2m+1)^2 as a0 + a1 e + a2 e^2, e = exp(-(2m+1) gamma t).

    Obtained by setting n = m and gamma1 = gamma2 in the thermal solution.
    """
    r11, r22, r33, r44 = x.p11, x.p22, x.p33, x.p44
    u = (m + 1) * r11 + r33 - m * (r22 - r33 + r44)
    v = (m + 1) * r11 + (m + 1) * r22 - m * (r33 + r44)
    w = (m + 1) ** 2 * r11 - m * r33 - m * (r22 + m * r22 + m * r33 - m * r44)
    s11 = (m * m, m * u + m * v, w)
    s22 = (m * (m + 1), -m * u + (m + 1) * v, -w)
    s33 = (m * (m + 1), (m + 1) * u - m * v, -w)
    d2 = (2 * m + 1) ** 2
    s44 = (d2 - s11[0] - s22[0] - s33[0],
           -(s11[1] + s22[1] + s33[1]),
           -(s11[2] + s22[2] + s33[2]))
    return s11, s22, s33, s44


def _product(a, b) -> list[float]:
    out = [0.0] * 5
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def printed_coefficients(x: XState, m: float) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """F1..F4 and G1..G4 in their published form (unnormalized).

    Kept verbatim for comparison against :func:`finite_temperature_minors`.
    """
    r11, r22, r33, r44 = x.p11, x.p22, x.p33, x.p44
    a23, a14 = abs(x.c23) ** 2, abs(x.c14) ** 2
    f1 = m * (m + 1) * ((2 * m + 1) * r11 + r22 + r33 - 2 * m * r44)
    f2 = (-2 * m ** 4 * (2 * r44 ** 2 - r44 + r22 + 8 * a23 + r33)
          + 2 * m ** 3 * (-2 * r44 ** 2 + 2 * r33 * r44 + r44 - 16 * a23 - 2 * r33
                          + 2 * r22 * (r44 - 1))
          - m ** 2 * (r22 ** 2 + (2 * r33 - 4 * r44 + 3) * r22 + r33 ** 2 + 24 * a23
                      + 3 * r33 - 4 * r33 * r44 - r44)
          - 4 * m * (m + 1) ** 3 * r11 ** 2
          - m * (r22 ** 2 + 2 * r33 * r22 + r22 + r33 ** 2 + 8 * a23 + r33)
          - a23
          + (m + 1) ** 2 * r11 * ((8 * r44 + 2) * m ** 2 + (-4 * r22 - 4 * r33 + 2) * m + 1))
    f3 = (-2 * r11 ** 2 * (m + 1) ** 3
          + (m + 1) * r11 * ((2 * m ** 2 + m - 1) * (r22 + r33) + 2 * m * r44)
          + m * ((m + 1) * r22 ** 2 + (2 * (m + 1) * r33 - m * (2 * m + 3) * r44) * r22
                 + (m + 1) * r33 ** 2 + 2 * m ** 2 * r44 ** 2 - m * (2 * m + 3) * r33 * r44))
    f4 = (m ** 2 * (r11 - r22 - r33 + r44) + m * (2 * r11 - r22 - r33) + r11) ** 2
    g1 = f1
    g2 = (-2 * m ** 4 * (2 * r22 ** 2 - 4 * r33 * r22 - r22 + 2 * r33 ** 2 + r11 - r33
                         + 8 * a14 + r44)
          - 2 * m ** 3 * (4 * r22 ** 2 - 8 * r33 * r22 - 2 * r22 + 4 * r33 ** 2 + 3 * r11
                          - 2 * r33 + 16 * a14 + r44)
          + m ** 2 * (r11 ** 2 - 2 * (r44 + 3) * r11 - 6 * r22 ** 2 - 6 * r33 ** 2 + r44 ** 2
                      + 2 * r22 + 12 * r22 * r33 + 2 * r33 - 24 * a14)
          + m * (2 * r11 ** 2 + (r22 + r33 - 2 * r44 - 2) * r11 - 2 * r22 ** 2 - 2 * r33 ** 2
                 + 4 * r22 * r33 - 8 * a14 - r22 * r44 - r33 * r44)
          + r11 ** 2 + r22 * r33 + r11 * (r22 + r33) - a14)
    return (f1, f2, f3, f4), (g1, g2, f3, f4)


def finite_temperature_minors(rho0: XState, m: float, gamma: float = 1.0,
                              compare_printed: bool = True,
                              ) -> tuple[MinorPolynomial, MinorPolynomial]:
    """Minors {1,4} and {2,3} of the evolved partial transpose for m = n, equal rates.

    Coefficients come from multiplying out the population series, so the
    polynomials reproduce the direct minors by construction.  The overall
    scale is 1/(2m+1)^4.  With ``compare_printed`` any disagreement with
    the tabulated coefficients is logged.
    """
    if m < 0:
        raise ValueError(f"photon number must be nonnegative, got {m}")
    x = rho0
    s11, s22, s33, s44 = _population_series(x, m)
    d4 = (2 * m + 1) ** 4
    p14 = _product(s11, s44)
    p14[2] -= d4 * abs(x.c23) ** 2
    p23 = _product(s22, s33)
    p23[2] -= d4 * abs(x.c14) ** 2
    base = (2 * m + 1) * gamma
    poly14 = MinorPolynomial(p14[0], tuple(p14[1:]), base, 1.0 / d4)
    poly23 = MinorPolynomial(p23[0], tuple(p23[1:]), base, 1.0 / d4)
    if compare_printed:
        log_printed_discrepancies(x, m, poly14, poly23)
    return poly14, poly23


def log_printed_discrepancies(x: XState, m: float, poly14: MinorPolynomial,
                              poly23: MinorPolynomial, rtol: float = 1e-10) -> list[str]:
    """Compare derived coefficients with the tabulated ones; log and return mismatches."""
    printed_f, printed_g = printed_coefficients(x, m)
    found = []
    for label, printed, poly in (("F", printed_f, poly14), ("G", printed_g, poly23)):
        for i, (pc, dc) in enumerate(zip(printed, poly.coeffs), start=1):
            if abs(pc - dc) > rtol * max(1.0, abs(dc)):
                msg = f"{label}{i}: tabulated {pc:.12g} vs derived {dc:.12g} (diff {pc - dc:.3g})"
                found.append(msg)
                log.warning("coefficient discrepancy %s", msg)
    return found


def esd_finite_temperature(rho0: XState, params: ReservoirParams,
                           horizon: float = DEFAULT_ASYMPTOTIC_HORIZON) -> EsdVerdict:
    """Any thermal photon in either bath forces ESD of every entangled X state.

    At m = n = 0 the zero-temperature test is used (it holds for unequal
    rates too).  The
    two minors at ``horizon`` (in units of 1/gamma_min) are reported as a
    numerical cross-check.
    """
    x = rho0 if isinstance(rho0, XState) else as_x_state(rho0)
    _require_entangled(x)
    late = evolve_x(x, params, horizon / params.rate_min)
    check = {"minor14(t_inf)": late.minor14, "minor23(t_inf)": late.minor23}
    if params.zero_temperature:
        # leading long-time behaviour of both minors is exp(-(g1+g2) t) times
        # the zero-temperature conditions, whatever the two rates are
        v = esd_zero_temperature(x)
        return EsdVerdict(v.status, v.conditions, v.reason, check)
    return EsdVerdict("death", check, "at least one reservoir at nonzero temperature", check)


def werner_verdict(a: float, family: str = "singlet") -> str:
    """Vacuum-reservoir verdict for a Werner state of weight ``a``.

    One of "separable", "death", "no-death", "boundary".
    """
    from .qstate import werner_singlet, werner_triplet

    if not 0 < a <= 1:
        raise ValueError(f"Werner weight must lie in (0, 1], got {a}")
    x = werner_singlet(a) if family == "singlet" else werner_triplet(a)
    if not x.is_entangled(TAU_PSD):
        return "separable"
    return esd_zero_temperature(x).status


def werner_transitions(family: str = "singlet", lo: float = 1e-3, hi: float = 1.0,
                       step: float = 1e-3, tol: float = 1e-9) -> list[tuple[float, str, str]]:
    """Locate verdict changes along a; each found by bisection to ``tol``."""
    grid = np.arange(lo, hi + 0.5 * step, step)
    grid[-1] = min(grid[-1], hi)
    out = []
    prev_a, prev_v = grid[0], werner_verdict(grid[0], family)
    for a in grid[1:]:
        v = werner_verdict(a, family)
        if v != prev_v:
            left, right = prev_a, a
            while right - left > tol:
                mid = 0.5 * (left + right)
                if werner_verdict(mid, family) == prev_v:
                    left = mid
                else:
                    right = mid
            out.append((float(0.5 * (left + right)), prev_v, v))
        prev_a, prev_v = a, v
    return out
