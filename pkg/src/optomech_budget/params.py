"""Value types shared by every module.

Frequencies are angular (rad/s) everywhere inside the package; Hz only
appears in the ``from_hz`` constructors and at file boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Tuple

from . import constants


class ParameterError(ValueError):
    """A physical parameter violates its domain."""


class MaterialError(LookupError):
    """No material parameter set is registered for the requested regime."""


def _require_positive(obj, *names):
    for name in names:
        value = getattr(obj, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise ParameterError(f"{type(obj).__name__}.{name} must be a finite positive number, got {value!r}")


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = constants.HBAR
    k_B: float = constants.K_B
    c: float = constants.C_LIGHT


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class MechanicalOscillator:
    """Measured nanomechanical mode: effective mass, angular frequency, angular damping."""

    m: float
    Omega_m: float
    Gamma_m: float
    label: str = ""

    def __post_init__(self):
        _require_positive(self, "m", "Omega_m", "Gamma_m")

    @property
    def Q(self) -> float:
        return self.Omega_m / self.Gamma_m

    @classmethod
    def from_hz(cls, m: float, freq_hz: float, q: float, label: str = "") -> "MechanicalOscillator":
        if not q > 0:
            raise ParameterError(f"quality factor must be positive, got {q!r}")
        omega_m = 2.0 * math.pi * freq_hz
        return cls(m=m, Omega_m=omega_m, Gamma_m=omega_m / q, label=label)


@dataclass(frozen=True)
class OpticalCavity:
    """Toroid microresonator mode.

    ``kappa`` and ``kappa_ex`` are total and external angular energy decay
    rates; ``R`` and ``r_minor`` the major and minor toroid radii.
    """

    wavelength: float
    kappa: float
    kappa_ex: float
    R: float
    r_minor: float

    def __post_init__(self):
        _require_positive(self, "wavelength", "kappa", "kappa_ex", "R", "r_minor")
        if self.kappa_ex > self.kappa:
            raise ParameterError("kappa_ex cannot exceed the total decay rate kappa")
        if not self.R > self.r_minor:
            raise ParameterError("major radius R must exceed the minor radius")

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * CONSTANTS.c / self.wavelength

    @property
    def critically_coupled(self) -> bool:
        return self.kappa_ex == 0.5 * self.kappa

    @classmethod
    def from_hz(cls, wavelength: float, kappa_hz: float, R: float, r_minor: float,
                kappa_ex_hz: Optional[float] = None) -> "OpticalCavity":
        """Build from linewidths in Hz; external coupling defaults to critical (half of kappa)."""
        kappa = 2.0 * math.pi * kappa_hz
        kappa_ex = 0.5 * kappa if kappa_ex_hz is None else 2.0 * math.pi * kappa_ex_hz
        return cls(wavelength=wavelength, kappa=kappa, kappa_ex=kappa_ex, R=R, r_minor=r_minor)


@dataclass(frozen=True)
class Coupling:
    """Dispersive (g = dω/dx) and reactive (dκ/dx) coupling, both in rad/(s m).

    The reactive part is carried for bookkeeping only; no noise model uses it.
    """

    g: float
    gamma_reactive: float = 0.0

    def __post_init__(self):
        _require_positive(self, "g")
        if not (math.isfinite(self.gamma_reactive) and self.gamma_reactive >= 0):
            raise ParameterError("gamma_reactive must be finite and non-negative")

    @classmethod
    def from_hz_per_m(cls, g_hz_per_m: float, gamma_hz_per_m: float = 0.0) -> "Coupling":
        return cls(g=2.0 * math.pi * g_hz_per_m, gamma_reactive=2.0 * math.pi * gamma_hz_per_m)


@dataclass(frozen=True)
class Material:
    n: float
    dn_dT: float
    rho: float
    C: float
    D: float

    def __post_init__(self):
        _require_positive(self, "n", "dn_dT", "rho", "C", "D")


MaterialOverrides = Mapping[Tuple[float, float], Material]


def silica_at(T: float, overrides: Optional[MaterialOverrides] = None) -> Material:
    """Silica parameters at bath temperature ``T`` (K).

    The built-in table covers ambient conditions only. Any other regime
    must be supplied through ``overrides``, a mapping from inclusive
    ``(T_low, T_high)`` ranges to :class:`Material`; overrides take
    precedence over the built-in set. Nothing is interpolated.
    """
    if not (math.isfinite(T) and T > 0):
        raise ParameterError(f"temperature must be positive, got {T!r}")
    for (lo, hi), material in sorted((overrides or {}).items()):
        if lo <= T <= hi:
            return material
    lo, hi = constants.SILICA_AMBIENT_RANGE_K
    if lo <= T <= hi:
        return Material(**constants.SILICA_AMBIENT)
    raise MaterialError(
        f"unknown material regime: no silica parameter set registered for T = {T:g} K "
        f"(built-in table covers {lo:g}-{hi:g} K; supply an override)"
    )
