"""Temperatures and detailed-balance bookkeeping for reservoir and cavity.

Temperatures use k_B = 1 and the qubit transition frequency ``omega``
(default 1); they are only assigned where the defining population ratio lies
strictly inside (0, 1).
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .dynamics import steady_mean
from .errors import DomainError, UndefinedTemperatureError
from .xstate import XState, apply_phase_gate, classical_correlated

SYMMETRY_TOL = 1e-10
FORM_TOL = 1e-12


@dataclass(frozen=True)
class TempReport:
    """Reservoir temperature, coherence-shifted cavity temperature, and the
    temperature the cavity reaches under the coherence-free reservoir."""

    beta_eff: float
    beta_coh: float
    beta_non: float
    omega: float = 1.0


def _excitation_probabilities(rho: XState) -> Tuple[float, float]:
    if abs(rho.a22 - rho.a33) > SYMMETRY_TOL:
        raise UndefinedTemperatureError(
            f"atoms differ (a22={rho.a22:.6g}, a33={rho.a33:.6g}); no common temperature")
    return rho.a11 + rho.a22, rho.a22 + rho.a44


def _beta_from_ratio(num: float, den: float, omega: float, what: str) -> float:
    if not omega > 0:
        raise DomainError(f"omega={omega!r} must be positive")
    if not (num > 0 and den > num):
        raise UndefinedTemperatureError(
            f"{what}: ratio {num:.6g}/{den:.6g} is not inside (0, 1)")
    return float(-np.log(num / den) / omega)


def reservoir_beta(rho: XState, omega: float = 1.0) -> float:
    """``-ln(p_e/p_g)/omega`` for the common single-atom populations."""
    pe, pg = _excitation_probabilities(rho)
    return _beta_from_ratio(pe, pg, omega, "reservoir")


def cavity_beta_coherent(rho: XState, omega: float = 1.0) -> float:
    """Inverse temperature set by the coherence-shifted populations.

    ``Re a23`` adds to both the emission and absorption weights; a positive
    shift heats the cavity relative to the reservoir.
    """
    pe, pg = _excitation_probabilities(rho)
    shift = complex(rho.a23).real
    return _beta_from_ratio(pe + shift, pg + shift, omega, "coherence-shifted cavity")


def temperature_report(rho: XState, omega: float = 1.0) -> TempReport:
    """All three inverse temperatures.

    ``beta_non`` is the cavity temperature under the coherence-free
    counterpart of ``rho``; it always equals ``beta_eff``.
    """
    beta_eff = reservoir_beta(rho, omega)
    return TempReport(
        beta_eff=beta_eff,
        beta_coh=cavity_beta_coherent(rho, omega),
        beta_non=cavity_beta_coherent(classical_correlated(rho), omega),
        omega=omega,
    )


def is_thermal_entangled(rho: XState, tol: float = FORM_TOL) -> bool:
    a23 = complex(rho.a23)
    return (abs(rho.a22 - rho.a33) <= tol and abs(complex(rho.a14)) <= tol
            and abs(a23.imag) <= tol and a23.real <= tol)


def balance_deviation(rho: XState) -> Tuple[float, float]:
    """Split the steady photon number into ``n_det + delta``.

    ``n_det = (a11 + a22)/(a44 - a11)`` is the detailed-balance value and
    ``delta = -|a23|/(a44 - a11)`` the shift caused by the inner coherence.
    Requires ``a22 = a33``, ``a14 = 0`` and real non-positive ``a23``.
    """
    if not is_thermal_entangled(rho):
        raise DomainError("balance_deviation needs a22 = a33, a14 = 0 and a23 = -|a23|")
    gap = rho.a44 - rho.a11
    if not gap > 0:
        raise DomainError(f"a44 - a11 = {gap:.3g} must be positive")
    return (rho.a11 + rho.a22) / gap, -abs(complex(rho.a23)) / gap


def phase_deviation(n_det: float, delta: float, phase: float) -> float:
    """Steady photon number after a phase gate of angle ``phase``."""
    return n_det + delta * np.cos(phase)


def phase_law_gap(rho: XState, phase: float) -> float:
    """Closed-form mismatch between the two routes to the gated steady mean."""
    n_det, delta = balance_deviation(rho)
    return phase_deviation(n_det, delta, phase) - steady_mean(apply_phase_gate(rho, phase))

