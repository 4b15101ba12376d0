"""Whispering-gallery mode geometry feeding the thermorefractive model.

The fundamental mode cross-section is treated as a gaussian ellipse with
semi-axes ``b`` (radial) and ``d`` (vertical). Mode volume and the
thermal cut-off time follow from those two lengths, so any rescaling of
``b`` or ``d`` recomputes both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .params import Material, OpticalCavity, ParameterError

_TAU_PREFACTOR = (4.0 / math.pi) ** (1.0 / 3.0)


@dataclass(frozen=True)
class ModeGeometry:
    ell: int
    b: float
    d: float
    V: float
    tau: float
    R: float

    def __post_init__(self):
        if self.ell < 1:
            raise ParameterError(f"angular mode number must be >= 1, got {self.ell}")
        for name in ("b", "d", "V", "tau", "R"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"ModeGeometry.{name} must be positive")


def thermal_cutoff_time(b: float, d: float, D: float) -> float:
    return 1.0 / (_TAU_PREFACTOR * D * (b ** -2 + d ** -2))


def mode_volume(R: float, b: float, d: float) -> float:
    # ring circumference times gaussian effective area pi*b*d
    return 2.0 * math.pi ** 2 * R * b * d


def _assemble(ell: int, b: float, d: float, R: float, material: Material) -> ModeGeometry:
    return ModeGeometry(ell=ell, b=b, d=d, V=mode_volume(R, b, d),
                        tau=thermal_cutoff_time(b, d, material.D), R=R)


def mode_geometry(cavity: OpticalCavity, material: Material) -> ModeGeometry:
    """Geometry of the fundamental WGM of a toroid.

    The angular mode number is the rounded number of wavelengths that fit
    around the optical path ``2 pi R n``.
    """
    ell = round(2.0 * math.pi * cavity.R * material.n / cavity.wavelength)
    if ell < 1:
        raise ParameterError(
            f"angular mode number rounds to {ell}: radius {cavity.R:g} m is too small "
            f"for wavelength {cavity.wavelength:g} m"
        )
    b = 0.77 * cavity.R / ell ** (2.0 / 3.0)
    d = cavity.R ** 0.75 * cavity.r_minor ** 0.25 / ell ** 0.5
    return _assemble(ell, b, d, cavity.R, material)


def scaled_geometry(base: ModeGeometry, s_b: float, s_d: float, material: Material) -> ModeGeometry:
    """Rescale the semi-axes by ``s_b`` and ``s_d``, recomputing V and tau."""
    if not (s_b > 0 and s_d > 0):
        raise ParameterError("semi-axis scale factors must be positive")
    return _assemble(base.ell, s_b * base.b, s_d * base.d, base.R, material)


def sampled_length(wavelength: float, R: float) -> float:
    """Length of the mechanical element overlapped by the evanescent field, sqrt(lambda R / 2)."""
    if not (wavelength > 0 and R > 0):
        raise ParameterError("wavelength and radius must be positive")
    return math.sqrt(wavelength * R / 2.0)
