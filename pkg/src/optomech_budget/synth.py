"""Synthetic measured spectra drawn from the forward noise models.

Each bin of an averaged periodogram of Gaussian noise is the true PSD
times a Gamma(n_avg, 1/n_avg) variate, so spectra are generated directly
in the frequency domain. Bin ``i`` draws from its own Philox stream keyed
by ``(seed, i)``: output depends only on the seed, never on evaluation
order or the number of worker threads.

The calibration tone is coherent, so its periodogram does not fluctuate;
it is added to its bin after the noise draw.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .fit import CalibrationMarker, FitResult, calibrate_spectrum, fit_thermorefractive
from .geometry import mode_geometry, scaled_geometry
from .params import (Coupling, Material, MechanicalOscillator, OpticalCavity,
                     ParameterError)
from .spectra import (DEFAULT_CHANNELS, MicroMechMode, Spectrum, SpectrumKind,
                      bin_widths_hz, shot_freq_psd, total_budget)

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True, eq=False)
class SynthesisConfig:
    grid: np.ndarray
    oscillator: MechanicalOscillator
    cavity: OpticalCavity
    coupling: Coupling
    material: Material
    T: float
    P_in: float
    channels: Tuple[str, ...] = DEFAULT_CHANNELS
    modes: Tuple[MicroMechMode, ...] = ()
    s_b: float = 1.0
    s_d: float = 1.0
    marker: Optional[CalibrationMarker] = None
    n_avg: int = 1
    seed: int = 0
    kind: SpectrumKind = SpectrumKind.FREQUENCY_NOISE
    # detector gain applied to the emitted spectrum (arbitrary units)
    gain: float = 1.0
    efficiency: float = 1.0
    workers: int = 1

    def __post_init__(self):
        grid = np.array(self.grid, dtype=float)
        grid.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "channels", tuple(self.channels))
        object.__setattr__(self, "modes", tuple(self.modes))
        object.__setattr__(self, "kind", SpectrumKind(self.kind))
        if grid.ndim != 1 or grid.size < 2 or not np.all(np.diff(grid) > 0):
            raise ParameterError("grid must be strictly increasing with at least two bins")
        if int(self.n_avg) != self.n_avg or self.n_avg < 1:
            raise ParameterError("n_avg must be an integer >= 1")
        if not self.gain > 0:
            raise ParameterError("gain must be positive")
        if self.workers < 1:
            raise ParameterError("workers must be >= 1")
        if self.marker is not None and not grid[0] <= self.marker.Omega_cal <= grid[-1]:
            raise ParameterError("marker frequency lies outside the grid")

    def replace(self, **changes) -> "SynthesisConfig":
        from dataclasses import replace

        return replace(self, **changes)


def _budget(config: SynthesisConfig):
    geom = scaled_geometry(mode_geometry(config.cavity, config.material), config.s_b, config.s_d, config.material)
    return total_budget(config.oscillator, config.cavity, config.coupling, geom, config.material,
                        config.modes, config.T, config.P_in, config.grid, config.channels,
                        efficiency=config.efficiency)


def model_psd(config: SynthesisConfig, include_marker: bool = True) -> np.ndarray:
    """Noise-free PSD in the configured kind, before detector gain."""
    values = np.array(_budget(config).total.values)
    if config.kind is SpectrumKind.FREQUENCY_NOISE:
        values = values * config.coupling.g ** 2
    if include_marker and config.marker is not None:
        values = values + marker_psd(config)
    return values


def marker_psd(config: SynthesisConfig) -> np.ndarray:
    """Calibration tone as area / bin width in its nearest bin, in the configured kind."""
    out = np.zeros(config.grid.size)
    if config.marker is None:
        return out
    i = int(np.argmin(np.abs(config.grid - config.marker.Omega_cal)))
    area = config.marker.area
    if config.kind is SpectrumKind.DISPLACEMENT:
        area = area / config.coupling.g ** 2
    out[i] = area / bin_widths_hz(config.grid)[i]
    return out


def averaging_factors(seed: int, n_bins: int, n_avg: int, workers: int = 1, start: int = 0) -> np.ndarray:
    """Unit-mean Gamma(n_avg)/n_avg variates for bins ``start .. start + n_bins - 1``."""
    key_hi = int(seed) & _SEED_MASK

    def draw(indices):
        out = np.empty(len(indices))
        for j, i in enumerate(indices):
            bitgen = np.random.Philox(key=np.array([key_hi, i], dtype=np.uint64))
            out[j] = np.random.Generator(bitgen).standard_gamma(n_avg)
        return out

    indices = range(start, start + n_bins)
    if workers == 1 or n_bins < 2 * workers:
        return draw(indices) / n_avg
    chunks = np.array_split(np.arange(start, start + n_bins), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(draw, chunks))
    return np.concatenate(parts) / n_avg


def synthesize(config: SynthesisConfig) -> Spectrum:
    """One averaged-periodogram realisation of the configured spectrum."""
    noise = model_psd(config, include_marker=False)
    factors = averaging_factors(config.seed, config.grid.size, config.n_avg, config.workers)
    values = (noise * factors + marker_psd(config)) * config.gain
    return Spectrum(config.kind, config.grid, values)


@dataclass(frozen=True)
class RoundtripReport:
    s_b_true: float
    s_d_true: float
    fit: FitResult
    calibration_level_error: float
    extras: Dict[str, float] = field(default_factory=dict)

    @property
    def s_b_error(self) -> float:
        return self.fit.s_b / self.s_b_true - 1.0

    @property
    def s_d_error(self) -> float:
        return self.fit.s_d / self.s_d_true - 1.0


def roundtrip_check(config: SynthesisConfig, exclude_windows: Sequence[Tuple[float, float]] = ()) -> RoundtripReport:
    """Synthesize, calibrate against the marker, fit, and compare with ground truth.

    ``calibration_level_error`` is the median relative deviation of the
    calibrated spectrum from the noise-free thermorefractive truth.
    """
    if config.marker is None or "thermorefractive" not in config.channels:
        raise ParameterError("round trip needs a marker and the thermorefractive channel")
    if config.kind is not SpectrumKind.FREQUENCY_NOISE:
        raise ParameterError("round trip operates on frequency-noise spectra")
    raw = synthesize(config)
    calibrated = calibrate_spectrum(raw, config.marker)
    truth = model_psd(config, include_marker=False)
    usable = ~calibrated.flagged
    level_error = float(np.median(calibrated.values[usable] / truth[usable]) - 1.0)

    background = None
    if "shot" in config.channels:
        background = shot_freq_psd(config.cavity, config.P_in, config.grid, config.efficiency)
    geom0 = mode_geometry(config.cavity, config.material)
    result = fit_thermorefractive(calibrated, geom0, config.material, config.cavity, config.T,
                                  exclude_windows=exclude_windows, background=background)
    return RoundtripReport(s_b_true=config.s_b, s_d_true=config.s_d, fit=result,
                           calibration_level_error=level_error)


def linear_grid_hz(start_hz: float, stop_hz: float, points: int) -> np.ndarray:
    """Angular frequency grid from a linear span given in Hz."""
    return 2.0 * math.pi * np.linspace(start_hz, stop_hz, int(points))
