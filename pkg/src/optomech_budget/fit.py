"""Absolute calibration of measured spectra and model fits.

Calibration uses a phase-modulation tone of known depth. A tone of peak
phase deviation ``beta`` at ``Omega_cal`` is a frequency modulation of
amplitude ``beta * Omega_cal``, whose mean square ``beta^2 Omega_cal^2 / 2``
is the area the tone occupies in a single-sided frequency-noise PSD
integrated over Hz. The synthetic generator injects exactly that area,
so both paths agree by construction.

Thermorefractive fits are done on log-PSD residuals with the two
semi-axis scale factors as the only free parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .geometry import ModeGeometry, scaled_geometry
from .lm import levenberg_marquardt
from .params import Material, OpticalCavity, ParameterError
from .spectra import Spectrum, SpectrumKind, bin_widths_hz, thermorefractive_psd

SCALE_BOUNDS = (0.2, 5.0)
MAX_ITER = 200
MIN_FIT_BINS = 20
MIN_WINDOW_BINS = 7
BACKGROUND_PASSES = 20

Window = Tuple[float, float]


class FitError(RuntimeError):
    pass


class MarkerNotFound(FitError):
    pass


class DegenerateMarker(FitError):
    pass


class InsufficientData(FitError):
    pass


@dataclass(frozen=True)
class CalibrationMarker:
    Omega_cal: float
    modulation_depth: float
    bin_window: int = 1

    def __post_init__(self):
        if not self.Omega_cal > 0:
            raise ParameterError("marker frequency must be positive")
        if not self.modulation_depth > 0:
            raise ParameterError("modulation depth must be positive")
        if self.bin_window < 1 or self.bin_window % 2 == 0:
            raise ParameterError("bin_window must be a positive odd integer")

    @property
    def area(self) -> float:
        """Equivalent frequency-noise power of the tone, (rad/s)^2."""
        return 0.5 * self.modulation_depth ** 2 * self.Omega_cal ** 2


@dataclass(frozen=True)
class LorentzianFit:
    Omega_i: float
    Gamma_i: float
    height: float
    background: float
    window: Window
    converged: bool
    iterations: int
    failed: bool = False
    message: str = ""


@dataclass(frozen=True)
class FitResult:
    s_b: float
    s_d: float
    residual_norm: float
    iterations: int
    converged: bool
    covariance: np.ndarray
    geometry: Optional[ModeGeometry] = None
    lorentzians: List[LorentzianFit] = field(default_factory=list)
    message: str = ""
    n_bins: int = 0


def _marker_window(raw: Spectrum, marker: CalibrationMarker) -> np.ndarray:
    grid, values = raw.grid, raw.values
    if not grid[0] <= marker.Omega_cal <= grid[-1]:
        raise MarkerNotFound("calibration marker lies outside the spectrum")
    centre = int(np.argmin(np.abs(grid - marker.Omega_cal)))
    half = marker.bin_window // 2
    lo, hi = max(centre - half, 0), min(centre + half, grid.size - 1)
    peak = lo + int(np.argmax(values[lo:hi + 1]))
    if peak == 0 or peak == grid.size - 1 or not (values[peak] > values[peak - 1] and values[peak] > values[peak + 1]):
        raise MarkerNotFound(f"marker not found: no local maximum near {marker.Omega_cal / (2 * math.pi):g} Hz")
    lo, hi = max(peak - half, 0), min(peak + half, grid.size - 1)
    return np.arange(lo, hi + 1)


def _flank_background(values: np.ndarray, window: np.ndarray, n_side: int) -> float:
    lo, hi = window[0], window[-1]
    flanks = np.concatenate([values[max(lo - n_side, 0):lo], values[hi + 1:hi + 1 + n_side]])
    if flanks.size == 0:
        return 0.0
    return float(np.median(flanks))


def calibration_factor(raw: Spectrum, marker: CalibrationMarker, n_side: int = 16) -> Tuple[float, np.ndarray]:
    """Factor converting ``raw`` into absolute frequency noise, and the marker bins.

    The local background under the tone is the median of ``n_side`` bins
    on either side of the window and is subtracted before integrating.
    """
    window = _marker_window(raw, marker)
    values = raw.values
    background = _flank_background(values, window, n_side)
    widths = bin_widths_hz(raw.grid)
    integrated = float(np.sum((values[window] - background) * widths[window]))
    if not integrated > 0:
        raise DegenerateMarker("degenerate marker: integrated tone power is not positive")
    return marker.area / integrated, window


def calibrate_spectrum(raw: Spectrum, marker: CalibrationMarker) -> Spectrum:
    """Rescale a spectrum in detector units to absolute frequency noise.

    The marker bins are flagged so that later fits skip them.
    """
    factor, window = calibration_factor(raw, marker)
    flagged = np.array(raw.flagged, copy=True)
    flagged[window] = True
    return Spectrum(SpectrumKind.FREQUENCY_NOISE, raw.grid, raw.values * factor, flagged)


def _usable_mask(spec: Spectrum, exclude_windows: Sequence[Window]) -> np.ndarray:
    mask = ~spec.flagged & (spec.values > 0)
    for lo, hi in exclude_windows:
        mask &= ~((spec.grid >= lo) & (spec.grid <= hi))
    return mask


def thermorefractive_log_model(s, geom0, material, cavity, T, Omega, background=None):
    """log S_model at scale factors ``s = (s_b, s_d)`` and its gradient w.r.t. ``s``.

    Returns ``(log_model, jac)`` with ``jac`` of shape ``(len(Omega), 2)``.
    """
    s_b, s_d = float(s[0]), float(s[1])
    geom = scaled_geometry(geom0, s_b, s_d, material)
    thr = thermorefractive_psd(material, geom, cavity, T, Omega)
    # d log(thr) / d log(tau) from sqrt(tau) / (1 + (Omega tau)^(3/4))^2
    u = (Omega * geom.tau) ** 0.75
    dlog_dlogtau = 0.5 - 1.5 * u / (1.0 + u)
    inv_b2, inv_d2 = geom.b ** -2, geom.d ** -2
    dlogtau_dlogb = 2.0 * inv_b2 / (inv_b2 + inv_d2)
    dlogtau_dlogd = 2.0 * inv_d2 / (inv_b2 + inv_d2)
    # V is proportional to b d
    d_dlogb = -1.0 + dlog_dlogtau * dlogtau_dlogb
    d_dlogd = -1.0 + dlog_dlogtau * dlogtau_dlogd
    if background is None:
        total, weight = thr, 1.0
    else:
        total = thr + background
        weight = thr / total
    jac = np.column_stack([weight * d_dlogb / s_b, weight * d_dlogd / s_d])
    return np.log(total), jac


def fit_thermorefractive(
    spec: Spectrum,
    geom0: ModeGeometry,
    material: Material,
    cavity: OpticalCavity,
    T: float,
    exclude_windows: Sequence[Window] = (),
    background=None,
    p0: Tuple[float, float] = (1.0, 1.0),
) -> FitResult:
    """Fit the semi-axis scale factors of the thermorefractive model.

    ``background`` optionally adds a fixed, known PSD (for instance the
    shot-noise floor) to the model on every bin. A fit that ends pinned
    to a bound is reported as not converged.
    """
    if spec.kind is not SpectrumKind.FREQUENCY_NOISE:
        raise ParameterError("thermorefractive fits need a frequency-noise spectrum")
    mask = _usable_mask(spec, exclude_windows)
    if mask.sum() < MIN_FIT_BINS:
        raise InsufficientData(f"insufficient data: {int(mask.sum())} usable bins, need {MIN_FIT_BINS}")
    Omega = spec.grid[mask]
    log_data = np.log(spec.values[mask])
    bg = None if background is None else np.broadcast_to(np.asarray(background, dtype=float), spec.grid.shape)[mask]

    def residual(s):
        return thermorefractive_log_model(s, geom0, material, cavity, T, Omega, bg)[0] - log_data

    def jacobian(s):
        return thermorefractive_log_model(s, geom0, material, cavity, T, Omega, bg)[1]

    lo, hi = SCALE_BOUNDS
    res = levenberg_marquardt(residual, jacobian, p0, [lo, lo], [hi, hi], max_iter=MAX_ITER)
    s_b, s_d = (float(x) for x in res.params)
    converged, message = res.converged, res.message
    pinned = [name for name, v in (("s_b", s_b), ("s_d", s_d)) if v <= lo or v >= hi]
    if pinned:
        converged = False
        message = f"parameter(s) {', '.join(pinned)} pinned at the bound {SCALE_BOUNDS}"
    return FitResult(
        s_b=s_b, s_d=s_d, residual_norm=res.rms, iterations=res.iterations, converged=converged,
        covariance=res.covariance(), geometry=scaled_geometry(geom0, s_b, s_d, material),
        message=message, n_bins=int(mask.sum()),
    )


def lorentzian_shape(Omega, Omega_i, Gamma_i, height):
    """Thermal (velocity-damped) resonance normalised to ``height`` at ``Omega_i``."""
    Omega = np.asarray(Omega, dtype=float)
    num = (Gamma_i * Omega_i) ** 2
    return height * num / ((Omega_i ** 2 - Omega ** 2) ** 2 + Gamma_i ** 2 * Omega ** 2)


def _fit_one_window(spec: Spectrum, window: Window) -> LorentzianFit:
    lo, hi = window
    sel = np.flatnonzero((spec.grid >= lo) & (spec.grid <= hi) & ~spec.flagged)
    if sel.size < MIN_WINDOW_BINS:
        raise ParameterError(f"window {window} holds {sel.size} bins, need at least {MIN_WINDOW_BINS}")
    Omega = spec.grid[sel]
    data = spec.values[sel]
    n_edge = max(2, sel.size // 10)
    background = float(np.median(np.concatenate([data[:n_edge], data[-n_edge:]])))
    k = int(np.argmax(data))
    if k == 0 or k == data.size - 1 or data[k] <= background:
        return LorentzianFit(math.nan, math.nan, math.nan, background, window, False, 0,
                             failed=True, message="no local maximum inside the window")
    step = float(np.median(np.diff(Omega)))
    centre0 = float(Omega[k])
    height0 = float(data[k] - background)
    above = np.count_nonzero(data > background + 0.5 * height0)
    gamma0 = max(above, 1) * step
    log_data = np.log(data)

    def unpack(x):
        return centre0 + float(x[0]) * step, gamma0 * math.exp(x[1]), height0 * math.exp(x[2])

    def residual(x):
        return np.log(background + lorentzian_shape(Omega, *unpack(x))) - log_data

    def jacobian(x, h=1e-6):
        cols = []
        for j in range(3):
            e = np.zeros(3)
            e[j] = h
            cols.append((residual(x + e) - residual(x - e)) / (2 * h))
        return np.column_stack(cols)

    bounds = ([-0.5 * sel.size, -12.0, -12.0], [0.5 * sel.size, 12.0, 12.0])
    edges = np.r_[0:n_edge, data.size - n_edge:data.size]
    floor = 1e-6 * background
    x = np.zeros(3)
    iterations = 0
    # the edge bins still carry the peak's own tails: re-estimate the background
    # from the peak-subtracted edges until it settles
    for _ in range(BACKGROUND_PASSES):
        res = levenberg_marquardt(residual, jacobian, x, *bounds, max_iter=MAX_ITER)
        x = res.params
        iterations += res.iterations
        tail = lorentzian_shape(Omega[edges], *unpack(x))
        updated = max(float(np.median(data[edges] - tail)), floor)
        settled = abs(updated - background) <= 1e-6 * background
        background = updated
        if settled:
            break
    centre, gamma, height = unpack(x)
    return LorentzianFit(float(centre), float(gamma), float(height), background, window, res.converged, iterations,
                         message=res.message)


def fit_lorentzian_modes(spec: Spectrum, windows: Sequence[Window]) -> List[LorentzianFit]:
    """Fit one thermal Lorentzian per window on top of the local background.

    A window without an interior maximum is returned with ``failed=True``;
    the remaining windows are still fitted.
    """
    return [_fit_one_window(spec, w) for w in windows]
