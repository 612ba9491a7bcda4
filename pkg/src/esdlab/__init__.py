"""Entanglement sudden death of two qubits in independent thermal reservoirs."""

from .control import (LocalUnitaryParams, SweepResult, SwitchSchedule, apply_switch,
                      avoidance_window, find_esd_time, is_x_preserving, sweep_switch, unitary2)
from .criteria import (EsdVerdict, MinorPolynomial, esd_finite_temperature,
                       esd_zero_temperature, finite_temperature_minors, negativity_case1,
                       negativity_case2)
from .oracle import IntegratorConfig, integrate, lindblad_rhs
from .qstate import (DensityMatrix, MinorSet, XState, as_x_state, min_seven_minors,
                     negativity, partial_transpose, principal_minor, validate)
from .thermal import AsymptoticMatrix, ReservoirParams, asymptotic_matrix, evolve, steady_state

__version__ = "0.1.0"
