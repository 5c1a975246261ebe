"""Sensitivity engineering and signal-strength calibration.

Covers the three knobs used to realize fractional sensor sensitivities
and calibrated quadratic fields: off-resonant dressing, timed spin-echo
schedules, and the AC-Stark shift of an off-resonant laser expressed as
an effective quadratic field strength.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.constants import physical_constants

__all__ = [
    "dressed_sensitivity",
    "dressing_validity",
    "EchoSchedule",
    "echo_schedule",
    "effective_ratio",
    "ac_stark_quadratic",
    "BOHR_MAGNETON_HZ_PER_PT",
]

# mu_B / h in Hz per pT.
BOHR_MAGNETON_HZ_PER_PT = physical_constants["Bohr magneton in Hz/T"][0] * 1e-12


def dressed_sensitivity(detuning: float, drive: float) -> float:
    """Sensitivity magnitude |s| = |Delta| / (2 sqrt(Delta^2 + Omega^2)).

    An undriven qubit (drive 0) keeps |s| = 1/2; strong driving pushes the
    dressed states toward insensitivity.
    """
    if detuning == 0.0 and drive == 0.0:
        raise ValueError("detuning and drive cannot both vanish")
    return abs(detuning) / (2.0 * math.hypot(detuning, drive))


def dressing_validity(detuning: float, drive: float, shift: float) -> float:
    """Perturbative-validity parameter (shift*Delta/(Omega^2+Delta^2))^2, << 1 when valid."""
    denom = drive ** 2 + detuning ** 2
    if denom == 0.0:
        raise ValueError("detuning and drive cannot both vanish")
    return (shift * detuning / denom) ** 2


@dataclass(frozen=True)
class EchoSchedule:
    """Spin-echo times achieving a sensitivity reduction factor.

    Per segment of length t_echo = t_s / k the phase sign flips at
    reduction * t_echo / 2 and again at t_echo; at reduction factor 1 no
    echo is emitted at all (the nominal mid-segment flip at t_echo/2 plus
    the end flip would cancel the phase instead of keeping it).
    """

    reduction: float
    sense_time: float
    segments: int
    times: tuple[float, ...]


def echo_schedule(reduction: float, sense_time: float, segments: int) -> EchoSchedule:
    if not 0.0 < reduction <= 1.0:
        raise ValueError("reduction factor must be in (0, 1]")
    if segments < 1:
        raise ValueError("need at least one segment")
    if sense_time <= 0.0:
        raise ValueError("sensing time must be positive")
    t_echo = sense_time / segments
    times: list[float] = []
    if reduction < 1.0:
        for seg in range(segments):
            start = seg * t_echo
            times.append(start + reduction * t_echo / 2.0)
            times.append(start + t_echo)
    return EchoSchedule(reduction=reduction, sense_time=sense_time,
                        segments=segments, times=tuple(times))


def effective_ratio(schedule: EchoSchedule) -> float:
    """|integral of the flipping sign over [0, t_s]| / t_s.

    Exact quadrature of the piecewise-constant sign; equals the reduction
    factor for static fields.
    """
    edges = [0.0, *schedule.times, schedule.sense_time]
    # drop a duplicate final edge when the last echo sits at t_s
    total = 0.0
    sign = 1.0
    for a, b in zip(edges, edges[1:]):
        total += sign * (b - a)
        sign = -sign
    return abs(total) / schedule.sense_time


def ac_stark_quadratic(rabi: float, detuning: float, correction: float,
                       spacing: float, lande_g: float) -> dict:
    """Effective quadratic field strength of an off-resonant laser.

    The laser shifts one level of the middle sensor by the AC-Stark shift
    delta_AC = Omega^2 / (4 Delta) (angular frequencies, rad/s), which on
    the sensing pair acts as a quadratic field of strength
    B_q = C * delta_AC / (2 kappa d^2) with kappa = g * mu_B / hbar.

    Returns the signed strength in pT/um^2, the Stark shift, and the two
    field-difference conventions B_q d^2 / 2 and B_q d^2 (pT) between the
    middle and outer sensors; the published shift figures match the
    latter.
    """
    if detuning == 0.0:
        raise ValueError("detuning must be nonzero")
    stark = rabi ** 2 / (4.0 * detuning)                      # rad/s
    kappa = 2.0 * math.pi * lande_g * BOHR_MAGNETON_HZ_PER_PT  # rad/s/pT
    b_q = correction * stark / (2.0 * kappa * spacing ** 2)
    return {
        "quadratic_field": b_q,
        "stark_shift": stark,
        "stark_shift_hz": stark / (2.0 * math.pi),
        "field_change_half_d2": b_q * spacing ** 2 / 2.0,
        "field_change_d2": b_q * spacing ** 2,
    }
