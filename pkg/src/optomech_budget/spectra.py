"""Single-sided noise spectral densities and their composition into a budget.

Every function accepts a scalar or array Fourier frequency ``Omega``
(rad/s) and broadcasts. Frequency-noise densities are in (rad/s)^2/Hz,
displacement densities in m^2/Hz.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence

import numpy as np

from .geometry import ModeGeometry
from .params import (CONSTANTS, Coupling, Material, MechanicalOscillator,
                     OpticalCavity, ParameterError)

CHANNELS = ("thermal_nano", "shot", "thermorefractive", "micro_mech", "qba")
# quantum backaction is a prediction, not a measured background
DEFAULT_CHANNELS = ("thermal_nano", "shot", "thermorefractive", "micro_mech")
BACKGROUND_CHANNELS = ("shot", "thermorefractive", "micro_mech")


class SpectrumKind(str, enum.Enum):
    FREQUENCY_NOISE = "frequency_noise"
    DISPLACEMENT = "displacement"

    @property
    def units(self) -> str:
        return "(rad/s)^2/Hz" if self is SpectrumKind.FREQUENCY_NOISE else "m^2/Hz"


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Spectrum:
    """A PSD sampled on a strictly increasing angular frequency grid.

    ``flagged`` marks bins that downstream fits must ignore (for example
    the calibration tone).
    """

    kind: SpectrumKind
    grid: np.ndarray
    values: np.ndarray
    flagged: Optional[np.ndarray] = None

    def __post_init__(self):
        grid = _frozen(self.grid)
        values = _frozen(self.values)
        object.__setattr__(self, "kind", SpectrumKind(self.kind))
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if grid.ndim != 1 or grid.size < 2:
            raise ParameterError("a spectrum needs at least two bins")
        if values.shape != grid.shape:
            raise ParameterError("grid and values must have the same length")
        if not np.all(np.diff(grid) > 0):
            raise ParameterError("frequency grid must be strictly increasing")
        if not np.all(values >= 0):
            raise ParameterError("PSD values must be non-negative")
        if self.flagged is None:
            flagged = np.zeros(grid.shape, dtype=bool)
        else:
            flagged = np.array(self.flagged, dtype=bool)
            if flagged.shape != grid.shape:
                raise ParameterError("flag mask must match the grid")
        flagged.setflags(write=False)
        object.__setattr__(self, "flagged", flagged)

    def __len__(self):
        return self.grid.size

    @property
    def freq_hz(self) -> np.ndarray:
        return self.grid / (2.0 * math.pi)

    def scaled(self, factor: float) -> "Spectrum":
        return Spectrum(self.kind, self.grid, self.values * factor, self.flagged)

    def to_displacement(self, coupling: Coupling) -> "Spectrum":
        if self.kind is SpectrumKind.DISPLACEMENT:
            return self
        return Spectrum(SpectrumKind.DISPLACEMENT, self.grid, self.values / coupling.g ** 2, self.flagged)

    def to_frequency_noise(self, coupling: Coupling) -> "Spectrum":
        if self.kind is SpectrumKind.FREQUENCY_NOISE:
            return self
        return Spectrum(SpectrumKind.FREQUENCY_NOISE, self.grid, self.values * coupling.g ** 2, self.flagged)


def bin_widths_hz(grid: np.ndarray) -> np.ndarray:
    """Width in Hz of each bin, bounded by midpoints to its neighbours."""
    grid = np.asarray(grid, dtype=float)
    edges = np.empty(grid.size + 1)
    edges[1:-1] = 0.5 * (grid[1:] + grid[:-1])
    edges[0] = grid[0] - 0.5 * (grid[1] - grid[0])
    edges[-1] = grid[-1] + 0.5 * (grid[-1] - grid[-2])
    return np.diff(edges) / (2.0 * math.pi)


@dataclass(frozen=True)
class MicroMechMode:
    """Intrinsic mechanical mode of the microresonator itself."""

    Omega_i: float
    Gamma_i: float
    m_i: float
    T: float

    def __post_init__(self):
        for name in ("Omega_i", "Gamma_i", "m_i", "T"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"MicroMechMode.{name} must be positive")

    @classmethod
    def from_hz(cls, freq_hz: float, q: float, m_i: float, T: float) -> "MicroMechMode":
        omega = 2.0 * math.pi * freq_hz
        return cls(Omega_i=omega, Gamma_i=omega / q, m_i=m_i, T=T)

    def as_oscillator(self) -> MechanicalOscillator:
        return MechanicalOscillator(m=self.m_i, Omega_m=self.Omega_i, Gamma_m=self.Gamma_i)


def zpf_psd(osc: MechanicalOscillator) -> float:
    """On-resonance zero-point displacement PSD, which is also the SQL level."""
    return 2.0 * CONSTANTS.hbar / (osc.m * osc.Omega_m * osc.Gamma_m)


def thermal_psd(osc: MechanicalOscillator, T: float, Omega):
    """Brownian displacement PSD of a viscously damped oscillator in a bath at ``T``."""
    if not T > 0:
        raise ParameterError("temperature must be positive")
    Omega = np.asarray(Omega, dtype=float)
    denom = (osc.Omega_m ** 2 - Omega ** 2) ** 2 + osc.Gamma_m ** 2 * Omega ** 2
    return 4.0 * CONSTANTS.k_B * T * osc.Gamma_m / (osc.m * denom)


def shot_freq_psd(cavity: OpticalCavity, P_in: float, Omega, efficiency: float = 1.0):
    """Shot-noise equivalent frequency noise of the homodyne readout.

    ``efficiency`` is the overall detection efficiency; the imprecision
    scales as its inverse.
    """
    if not P_in > 0:
        raise ParameterError("input power must be positive")
    if not 0 < efficiency <= 1:
        raise ParameterError("detection efficiency must lie in (0, 1]")
    Omega = np.asarray(Omega, dtype=float)
    kappa = cavity.kappa
    flat = CONSTANTS.hbar * cavity.omega / P_in * kappa ** 2 / 8.0
    return flat * (1.0 + 4.0 * Omega ** 2 / kappa ** 2) / efficiency


def ideal_shot_freq_psd(cavity: OpticalCavity, P_in: float, Omega):
    """Shot imprecision of an ideal lossless measurement: a quarter of the measured one.

    With this convention the on-resonance ideal imprecision at P_SQL is
    exactly half the zero-point level.
    """
    return shot_freq_psd(cavity, P_in, Omega) / 4.0


def thermorefractive_psd(material: Material, geom: ModeGeometry, cavity: OpticalCavity, T: float, Omega):
    """Thermorefractive frequency noise of a fundamental toroid WGM."""
    if not T > 0:
        raise ParameterError("temperature must be positive")
    Omega = np.asarray(Omega, dtype=float)
    if np.any(Omega <= 0):
        raise ParameterError("thermorefractive noise diverges at Omega <= 0")
    coeff = (cavity.omega / material.n * material.dn_dT) ** 2
    amplitude = (16.0 * math.pi) ** (1.0 / 3.0) * CONSTANTS.k_B * T ** 2 / (geom.V * material.rho * material.C)
    tau = geom.tau
    return coeff * amplitude * np.sqrt(tau / Omega) / (1.0 + (Omega * tau) ** 0.75) ** 2


def micromech_freq_psd(modes: Sequence[MicroMechMode], cavity: OpticalCavity, Omega):
    """Frequency noise from the microresonator's own Brownian modes."""
    Omega = np.asarray(Omega, dtype=float)
    total = np.zeros_like(Omega)
    for mode in modes:
        total = total + thermal_psd(mode.as_oscillator(), mode.T, Omega)
    return (cavity.omega / cavity.R) ** 2 * total


def qba_displacement_psd(osc: MechanicalOscillator, P_ratio: float, Omega):
    """Radiation-pressure backaction displacement at input power ``P_ratio * P_SQL``.

    A white force PSD filtered by the mechanical susceptibility, normalised
    so that the on-resonance value is ``P_ratio * zpf_psd / 2``.
    """
    if not P_ratio > 0:
        raise ParameterError("power ratio must be positive")
    Omega = np.asarray(Omega, dtype=float)
    m, Om, Gm = osc.m, osc.Omega_m, osc.Gamma_m
    force_psd = 0.5 * zpf_psd(osc) * P_ratio * (m * Gm * Om) ** 2
    chi_sq = 1.0 / (m ** 2 * ((Om ** 2 - Omega ** 2) ** 2 + Gm ** 2 * Omega ** 2))
    return chi_sq * force_psd


@dataclass(frozen=True, eq=False)
class NoiseBudget:
    components: Dict[str, Spectrum]
    total: Spectrum
    params_snapshot: Dict[str, object] = field(default_factory=dict)

    @property
    def grid(self) -> np.ndarray:
        return self.total.grid

    def background(self) -> np.ndarray:
        """Measurement imprecision: all enabled background channels, in m^2/Hz."""
        out = np.zeros_like(self.total.values)
        for name in BACKGROUND_CHANNELS:
            if name in self.components:
                out = out + self.components[name].values
        return out


def total_budget(
    osc: MechanicalOscillator,
    cavity: OpticalCavity,
    coupling: Coupling,
    geom: ModeGeometry,
    material: Material,
    modes: Sequence[MicroMechMode],
    T: float,
    P_in: float,
    grid,
    enabled_channels: Iterable[str] = DEFAULT_CHANNELS,
    efficiency: float = 1.0,
) -> NoiseBudget:
    """Displacement-equivalent noise budget on ``grid``.

    Frequency-noise channels are divided by g^2. The total is the bin-wise
    sum of the enabled components in ``CHANNELS`` order.
    """
    enabled = set(enabled_channels)
    unknown = enabled - set(CHANNELS)
    if unknown:
        raise ParameterError(f"unknown noise channels: {sorted(unknown)}")
    if not P_in > 0:
        raise ParameterError("input power must be positive")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or not np.all(np.diff(grid) > 0):
        raise ParameterError("grid must be a strictly increasing array of at least two bins")

    g2 = coupling.g ** 2
    values: Dict[str, np.ndarray] = {}
    for name in CHANNELS:
        if name not in enabled:
            continue
        if name == "thermal_nano":
            values[name] = thermal_psd(osc, T, grid)
        elif name == "shot":
            values[name] = shot_freq_psd(cavity, P_in, grid, efficiency) / g2
        elif name == "thermorefractive":
            values[name] = thermorefractive_psd(material, geom, cavity, T, grid) / g2
        elif name == "micro_mech":
            values[name] = micromech_freq_psd(modes, cavity, grid) / g2
        elif name == "qba":
            from .sql import p_sql

            values[name] = qba_displacement_psd(osc, P_in / p_sql(cavity, coupling, osc), grid)

    total = np.zeros_like(grid)
    for v in values.values():
        total = total + v
    kind = SpectrumKind.DISPLACEMENT
    components = {name: Spectrum(kind, grid, v) for name, v in values.items()}
    snapshot = {
        "oscillator": osc, "cavity": cavity, "coupling": coupling, "geometry": geom,
        "material": material, "modes": tuple(modes), "T": T, "P_in": P_in,
        "channels": tuple(values), "efficiency": efficiency,
    }
    return NoiseBudget(components=components, total=Spectrum(kind, grid, total), params_snapshot=snapshot)

