"""Spectrum CSV files.

Layout::

    # kind=frequency_noise
    # units=(rad/s)^2/Hz
    freq_hz,psd[,extra columns]
    1000000,1.2345678901234567e+04

Frequencies are Fourier frequencies in Hz; values are written with 17
significant digits so that every double survives the round trip.
"""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Dict, Mapping, Optional

import numpy as np

from .spectra import Spectrum, SpectrumKind


class SpectrumFileError(ValueError):
    pass


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_spectrum_csv(path, spectrum: Spectrum, extra: Optional[Mapping[str, np.ndarray]] = None,
                       units: Optional[str] = None, comments: Optional[Mapping[str, str]] = None) -> None:
    extra = dict(extra or {})
    lines = [f"# kind={spectrum.kind.value}", f"# units={units or spectrum.kind.units}"]
    for key, value in (comments or {}).items():
        lines.append(f"# {key}={value}")
    lines.append(",".join(["freq_hz", "psd", *extra]))
    freq = spectrum.freq_hz
    columns = [spectrum.values, *extra.values()]
    for i in range(freq.size):
        lines.append(",".join([_fmt(freq[i])] + [_fmt(col[i]) for col in columns]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_spectrum_csv(path) -> Spectrum:
    meta: Dict[str, str] = {}
    rows = []
    header = None
    try:
        handle = open(path, newline="")
    except OSError as exc:
        raise SpectrumFileError(f"cannot read spectrum {path}: {exc}") from None
    with handle:
        for row in csv.reader(handle):
            if not row:
                continue
            if row[0].startswith("#"):
                text = ",".join(row)[1:].strip()
                if "=" in text:
                    key, value = text.split("=", 1)
                    meta[key.strip()] = value.strip()
                continue
            if header is None:
                header = [c.strip() for c in row]
                if header[:2] != ["freq_hz", "psd"]:
                    raise SpectrumFileError(f"{path}: header must start with freq_hz,psd")
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                raise SpectrumFileError(f"{path}: malformed row {row!r}") from None
    if header is None or len(rows) < 2:
        raise SpectrumFileError(f"{path}: no spectrum data")
    try:
        kind = SpectrumKind(meta.get("kind", SpectrumKind.FREQUENCY_NOISE.value))
    except ValueError:
        raise SpectrumFileError(f"{path}: unknown kind {meta.get('kind')!r}") from None
    data = np.array(rows)
    return Spectrum(kind, 2.0 * math.pi * data[:, 0], data[:, 1])
