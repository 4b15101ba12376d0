"""Standard-quantum-limit figures of merit."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .params import CONSTANTS, Coupling, MechanicalOscillator, OpticalCavity, ParameterError
from .spectra import ideal_shot_freq_psd, shot_freq_psd, zpf_psd

SQRT8 = math.sqrt(8.0)


@dataclass(frozen=True)
class MeritReport:
    S_zpf: float
    P_SQL: float
    P_SQL_cc: float
    P_th: float
    P_ratio: float
    imprecision_ratio: float
    imprecision_db: float

    def summary(self) -> str:
        return "\n".join([
            f"S_zpf             = {self.S_zpf:.6g} m^2/Hz  ({math.sqrt(self.S_zpf) * 1e18:.4g} am/sqrt(Hz))",
            f"P_SQL             = {self.P_SQL:.6g} W",
            f"P_SQL (crit.)     = {self.P_SQL_cc:.6g} W",
            f"P_threshold       = {self.P_th:.6g} W",
            f"P_in / P_SQL      = {self.P_ratio:.6g}",
            f"imprecision ratio = {self.imprecision_ratio:.4g}  ({self.imprecision_db:+.1f} dB re SQL)",
        ])


def to_db(ratio: float) -> float:
    """PSD ratio in decibels (power quantity)."""
    return 10.0 * math.log10(ratio)


def p_sql(cavity: OpticalCavity, coupling: Coupling, osc: MechanicalOscillator) -> float:
    """Input power reaching the SQL in an ideal, lossless measurement."""
    kappa = cavity.kappa
    sideband = 1.0 + 4.0 * osc.Omega_m ** 2 / kappa ** 2
    return CONSTANTS.hbar * cavity.omega * (kappa / 4.0) ** 2 * sideband / (coupling.g ** 2 * zpf_psd(osc))


def p_sql_critical(p_sql: float) -> float:
    """SQL power for an impedance-matched cavity (kappa_ex = kappa_0)."""
    if not p_sql > 0:
        raise ParameterError("P_SQL must be positive")
    return SQRT8 * p_sql


def threshold_factor(cavity: OpticalCavity, osc: MechanicalOscillator) -> float:
    return 4.0 + cavity.kappa ** 2 / (4.0 * osc.Omega_m ** 2)


def p_threshold(p_sql: float, cavity: OpticalCavity, osc: MechanicalOscillator) -> float:
    """Parametric oscillation threshold power."""
    if not p_sql > 0:
        raise ParameterError("P_SQL must be positive")
    return threshold_factor(cavity, osc) * p_sql


def merit_report(
    cavity: OpticalCavity,
    coupling: Coupling,
    osc: MechanicalOscillator,
    P_in: float,
    measured_imprecision: Optional[float] = None,
    Omega: Optional[float] = None,
    shot_model: str = "measured",
    efficiency: float = 1.0,
) -> MeritReport:
    """Collect the figures of merit for one operating point.

    Without ``measured_imprecision`` the imprecision is the shot channel
    at ``Omega`` (default: mechanical resonance). ``shot_model`` selects
    the measured readout (``"measured"``) or the ideal lossless reference
    (``"ideal"``).
    """
    if not P_in > 0:
        raise ParameterError("input power must be positive")
    s_zpf = zpf_psd(osc)
    psql = p_sql(cavity, coupling, osc)
    if measured_imprecision is None:
        at = osc.Omega_m if Omega is None else Omega
        if shot_model == "measured":
            shot = shot_freq_psd(cavity, P_in, at, efficiency)
        elif shot_model == "ideal":
            shot = ideal_shot_freq_psd(cavity, P_in, at)
        else:
            raise ParameterError(f"unknown shot model {shot_model!r}")
        imprecision = float(shot) / coupling.g ** 2
    else:
        if not measured_imprecision > 0:
            raise ParameterError("measured imprecision must be positive")
        imprecision = measured_imprecision
    ratio = imprecision / s_zpf
    return MeritReport(
        S_zpf=s_zpf,
        P_SQL=psql,
        P_SQL_cc=p_sql_critical(psql),
        P_th=p_threshold(psql, cavity, osc),
        P_ratio=P_in / psql,
        imprecision_ratio=ratio,
        imprecision_db=to_db(ratio),
    )
