"""Flat ``key = value`` run configuration.

Frequencies are written in Hz and converted to rad/s when the domain
objects are built. Unknown keys are rejected; missing keys are reported
all at once.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from .fit import CalibrationMarker
from .params import (Coupling, Material, MechanicalOscillator, OpticalCavity,
                     silica_at)
from .spectra import CHANNELS, DEFAULT_CHANNELS, MicroMechMode, SpectrumKind


class ConfigError(ValueError):
    pass


NUMBER, TEXT = "number", "text"

SCHEMA: Dict[str, str] = {
    "oscillator.mass_kg": NUMBER,
    "oscillator.freq_hz": NUMBER,
    "oscillator.q": NUMBER,
    "oscillator.label": TEXT,
    "cavity.wavelength_m": NUMBER,
    "cavity.kappa_hz": NUMBER,
    "cavity.kappa_ex_hz": NUMBER,
    "cavity.radius_m": NUMBER,
    "cavity.minor_radius_m": NUMBER,
    "coupling.g_hz_per_m": NUMBER,
    "coupling.gamma_hz_per_m": NUMBER,
    "material.n": NUMBER,
    "material.dn_dt": NUMBER,
    "material.rho": NUMBER,
    "material.c": NUMBER,
    "material.d": NUMBER,
    "power_w": NUMBER,
    "temperature_k": NUMBER,
    "efficiency": NUMBER,
    "grid.start_hz": NUMBER,
    "grid.stop_hz": NUMBER,
    "grid.points": NUMBER,
    "channels": TEXT,
    "geometry.scale_b": NUMBER,
    "geometry.scale_d": NUMBER,
    "synth.n_avg": NUMBER,
    "synth.seed": NUMBER,
    "synth.kind": TEXT,
    "synth.gain": NUMBER,
    "marker.freq_hz": NUMBER,
    "marker.depth_rad": NUMBER,
    "marker.bin_window": NUMBER,
    "fit.exclude_hz": TEXT,
    "fit.lorentz_windows_hz": TEXT,
    "sql.measured_imprecision_m2_hz": NUMBER,
    "sql.shot_model": TEXT,
}
MODE_KEY = re.compile(r"^mode\.(\d+)\.(freq_hz|q|mass_kg|temperature_k)$")
MATERIAL_KEYS = ("material.n", "material.dn_dt", "material.rho", "material.c", "material.d")

OSCILLATOR_KEYS = ("oscillator.mass_kg", "oscillator.freq_hz", "oscillator.q")
CAVITY_KEYS = ("cavity.wavelength_m", "cavity.kappa_hz", "cavity.radius_m", "cavity.minor_radius_m")
GRID_KEYS = ("grid.start_hz", "grid.stop_hz", "grid.points")

REQUIRED = {
    "geometry": CAVITY_KEYS + ("temperature_k",),
    "sql": OSCILLATOR_KEYS + CAVITY_KEYS + ("coupling.g_hz_per_m", "power_w"),
    "budget": OSCILLATOR_KEYS + CAVITY_KEYS + ("coupling.g_hz_per_m", "power_w", "temperature_k") + GRID_KEYS,
    "synth": OSCILLATOR_KEYS + CAVITY_KEYS + ("coupling.g_hz_per_m", "power_w", "temperature_k")
    + GRID_KEYS + ("synth.n_avg", "synth.seed"),
    "fit": CAVITY_KEYS + ("temperature_k",),
}


def _parse_value(key: str, raw: str) -> Union[float, str]:
    kind = TEXT if MODE_KEY.match(key) is None and SCHEMA.get(key) == TEXT else NUMBER
    if kind == TEXT:
        return raw
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite")
    return value


def parse_windows(text: str, key: str) -> List[Tuple[float, float]]:
    """``"lo:hi, lo:hi"`` in Hz -> list of (lo, hi) in rad/s."""
    windows = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        try:
            lo, hi = (float(x) for x in part.split(":"))
        except ValueError:
            raise ConfigError(f"{key}: malformed window {part!r}, expected lo:hi") from None
        if not lo < hi:
            raise ConfigError(f"{key}: window {part!r} is empty")
        windows.append((2 * math.pi * lo, 2 * math.pi * hi))
    return windows


@dataclass
class RunConfig:
    values: Dict[str, Union[float, str]]
    source: str = "<config>"

    @classmethod
    def parse(cls, text: str, source: str = "<config>") -> "RunConfig":
        values: Dict[str, Union[float, str]] = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
            key, raw = (s.strip() for s in line.split("=", 1))
            if key not in SCHEMA and not MODE_KEY.match(key):
                raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
            if key in values:
                raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
            if not raw:
                raise ConfigError(f"{source}:{lineno}: key {key!r} has no value")
            values[key] = _parse_value(key, raw)
        return cls(values, source)

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.parse(text, str(path))

    def require(self, command: str) -> None:
        missing = [k for k in REQUIRED[command] if k not in self.values]
        present = [k for k in MATERIAL_KEYS if k in self.values]
        if present and len(present) != len(MATERIAL_KEYS):
            missing += [k for k in MATERIAL_KEYS if k not in self.values]
        if missing:
            raise ConfigError(f"{self.source}: missing required keys: {', '.join(missing)}")

    def num(self, key: str, default: Optional[float] = None) -> float:
        if key in self.values:
            return float(self.values[key])
        if default is None:
            raise ConfigError(f"{self.source}: missing required key {key}")
        return default

    def text(self, key: str, default: Optional[str] = None) -> Optional[str]:
        return str(self.values[key]) if key in self.values else default

    def integer(self, key: str, default: Optional[int] = None) -> int:
        value = self.num(key, None if default is None else float(default))
        if value != int(value):
            raise ConfigError(f"{key}: expected an integer, got {value}")
        return int(value)

    # domain objects

    def oscillator(self) -> MechanicalOscillator:
        return MechanicalOscillator.from_hz(self.num("oscillator.mass_kg"), self.num("oscillator.freq_hz"),
                                            self.num("oscillator.q"), self.text("oscillator.label", ""))

    def cavity(self) -> OpticalCavity:
        kappa_ex = self.values.get("cavity.kappa_ex_hz")
        return OpticalCavity.from_hz(self.num("cavity.wavelength_m"), self.num("cavity.kappa_hz"),
                                     self.num("cavity.radius_m"), self.num("cavity.minor_radius_m"),
                                     None if kappa_ex is None else float(kappa_ex))

    def coupling(self) -> Coupling:
        return Coupling.from_hz_per_m(self.num("coupling.g_hz_per_m"), self.num("coupling.gamma_hz_per_m", 0.0))

    @property
    def temperature(self) -> float:
        return self.num("temperature_k")

    def material(self) -> Material:
        """Silica at the run temperature; explicit ``material.*`` keys override the built-in table."""
        T = self.temperature
        if "material.n" in self.values:
            override = Material(n=self.num("material.n"), dn_dT=self.num("material.dn_dt"),
                                rho=self.num("material.rho"), C=self.num("material.c"), D=self.num("material.d"))
            return silica_at(T, {(T, T): override})
        return silica_at(T)

    def modes(self) -> List[MicroMechMode]:
        found: Dict[int, Dict[str, float]] = {}
        for key, value in self.values.items():
            m = MODE_KEY.match(key)
            if m:
                found.setdefault(int(m.group(1)), {})[m.group(2)] = float(value)
        modes = []
        for index in sorted(found):
            fields = found[index]
            missing = [f"mode.{index}.{k}" for k in ("freq_hz", "q", "mass_kg") if k not in fields]
            if missing:
                raise ConfigError(f"{self.source}: missing required keys: {', '.join(missing)}")
            T = fields.get("temperature_k", self.temperature)
            modes.append(MicroMechMode.from_hz(fields["freq_hz"], fields["q"], fields["mass_kg"], T))
        return modes

    def grid(self) -> np.ndarray:
        start, stop = self.num("grid.start_hz"), self.num("grid.stop_hz")
        points = self.integer("grid.points")
        if not (0 < start < stop) or points < 2:
            raise ConfigError("grid needs 0 < start_hz < stop_hz and at least two points")
        return 2.0 * math.pi * np.linspace(start, stop, points)

    def channels(self) -> Tuple[str, ...]:
        text = self.text("channels")
        if text is None:
            return DEFAULT_CHANNELS
        names = tuple(n.strip() for n in text.split(",") if n.strip())
        unknown = [n for n in names if n not in CHANNELS]
        if unknown or not names:
            raise ConfigError(f"channels: unknown channel(s) {unknown}; choose from {', '.join(CHANNELS)}")
        return names

    def marker(self) -> Optional[CalibrationMarker]:
        if "marker.freq_hz" not in self.values and "marker.depth_rad" not in self.values:
            return None
        return CalibrationMarker(2 * math.pi * self.num("marker.freq_hz"), self.num("marker.depth_rad"),
                                 self.integer("marker.bin_window", 1))

    def synth_kind(self) -> SpectrumKind:
        try:
            return SpectrumKind(self.text("synth.kind", SpectrumKind.FREQUENCY_NOISE.value))
        except ValueError:
            raise ConfigError("synth.kind must be frequency_noise or displacement") from None

    def windows(self, key: str) -> List[Tuple[float, float]]:
        text = self.text(key)
        return [] if text is None else parse_windows(text, key)

    def keys(self) -> Iterable[str]:
        return self.values.keys()
