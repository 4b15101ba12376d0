"""Noise budget, SQL figures of merit and spectrum fitting for cavity-enhanced
near-field readout of nanomechanical motion."""

from .fit import CalibrationMarker, FitResult, calibrate_spectrum, fit_lorentzian_modes, fit_thermorefractive
from .geometry import ModeGeometry, mode_geometry, sampled_length, scaled_geometry
from .params import (Coupling, Material, MaterialError, MechanicalOscillator, OpticalCavity,
                     ParameterError, PhysicalConstants, silica_at)
from .spectra import (MicroMechMode, NoiseBudget, Spectrum, SpectrumKind, micromech_freq_psd,
                      qba_displacement_psd, shot_freq_psd, thermal_psd, thermorefractive_psd,
                      total_budget, zpf_psd)
from .sql import MeritReport, merit_report, p_sql, p_sql_critical, p_threshold
from .synth import SynthesisConfig, roundtrip_check, synthesize

__version__ = "0.1.0"
