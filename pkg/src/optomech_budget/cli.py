"""Command-line front end.

Exit codes: 0 success, 1 runtime or fit failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import List, Optional


from . import constants
from .csvio import SpectrumFileError, read_spectrum_csv, write_spectrum_csv
from .fit import FitError, calibration_factor, calibrate_spectrum, fit_lorentzian_modes, fit_thermorefractive
from .geometry import mode_geometry, sampled_length, scaled_geometry
from .params import MaterialError, ParameterError
from .runconfig import ConfigError, RunConfig
from .spectra import (SpectrumKind, micromech_freq_psd, shot_freq_psd, thermorefractive_psd,
                      total_budget, zpf_psd)
from .sql import merit_report, to_db
from .synth import SynthesisConfig, synthesize

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _load(args, command: str) -> RunConfig:
    config = RunConfig.load(args.config)
    config.require(command)
    return config


def _check_floor(lowest_hz: float, allow_low_freq: bool) -> None:
    if lowest_hz < constants.LOW_FREQ_FLOOR_HZ and not allow_low_freq:
        raise UsageError(
            f"grid starts at {lowest_hz:g} Hz, below the {constants.LOW_FREQ_FLOOR_HZ:g} Hz shot-noise-limited "
            "floor of the readout; pass --allow-low-freq to override"
        )


def _require_out(args) -> Path:
    if not args.out:
        raise UsageError("--out is required for this command")
    return Path(args.out)


def _budget_from(config: RunConfig):
    cavity, material = config.cavity(), config.material()
    geom = scaled_geometry(mode_geometry(cavity, material), config.num("geometry.scale_b", 1.0),
                           config.num("geometry.scale_d", 1.0), material)
    return total_budget(config.oscillator(), cavity, config.coupling(), geom, material, config.modes(),
                        config.temperature, config.num("power_w"), config.grid(), config.channels(),
                        efficiency=config.num("efficiency", 1.0))


def _merit(config: RunConfig):
    return merit_report(config.cavity(), config.coupling(), config.oscillator(), config.num("power_w"),
                        measured_imprecision=config.values.get("sql.measured_imprecision_m2_hz"),
                        shot_model=config.text("sql.shot_model", "measured"),
                        efficiency=config.num("efficiency", 1.0))


def cmd_budget(args) -> int:
    config = _load(args, "budget")
    grid_start = config.num("grid.start_hz")
    _check_floor(grid_start, args.allow_low_freq)
    out = _require_out(args)
    budget = _budget_from(config)
    report = _merit(config)
    osc = config.oscillator()
    extra = {name: spec.values for name, spec in budget.components.items()}
    write_spectrum_csv(out, budget.total, extra)
    print(report.summary())
    background_channels = [c for c in ("shot", "thermorefractive", "micro_mech") if c in budget.components]
    if background_channels:
        ratio = _background_at(config, background_channels, osc.Omega_m) / zpf_psd(osc)
        print(f"background imprecision at Omega_m = {ratio:.4g} x SQL ({to_db(ratio):+.1f} dB) "
              f"[{'+'.join(background_channels)}]")
    return EXIT_OK


def _background_at(config: RunConfig, channels, Omega: float) -> float:
    """Displacement-equivalent background of the given channels at a single frequency."""
    cavity, material, g2 = config.cavity(), config.material(), config.coupling().g ** 2
    total = 0.0
    if "shot" in channels:
        total += float(shot_freq_psd(cavity, config.num("power_w"), Omega, config.num("efficiency", 1.0)))
    if "thermorefractive" in channels:
        geom = scaled_geometry(mode_geometry(cavity, material), config.num("geometry.scale_b", 1.0),
                               config.num("geometry.scale_d", 1.0), material)
        total += float(thermorefractive_psd(material, geom, cavity, config.temperature, Omega))
    if "micro_mech" in channels:
        total += float(micromech_freq_psd(config.modes(), cavity, Omega))
    return total / g2


def cmd_sql(args) -> int:
    config = _load(args, "sql")
    print(_merit(config).summary())
    return EXIT_OK


def cmd_geometry(args) -> int:
    config = _load(args, "geometry")
    cavity, material = config.cavity(), config.material()
    geom = mode_geometry(cavity, material)
    lines = [
        f"ell            = {geom.ell}",
        f"b_m            = {geom.b:.6g}",
        f"d_m            = {geom.d:.6g}",
        f"V_m3           = {geom.V:.6g}",
        f"tau_s          = {geom.tau:.6g}",
        f"sampled_length = {sampled_length(cavity.wavelength, cavity.R):.6g}",
    ]
    print("\n".join(lines))
    return EXIT_OK


def _synth_config(config: RunConfig, args) -> SynthesisConfig:
    seed = args.seed if args.seed is not None else config.integer("synth.seed")
    return SynthesisConfig(
        grid=config.grid(), oscillator=config.oscillator(), cavity=config.cavity(), coupling=config.coupling(),
        material=config.material(), T=config.temperature, P_in=config.num("power_w"),
        channels=config.channels(), modes=tuple(config.modes()),
        s_b=config.num("geometry.scale_b", 1.0), s_d=config.num("geometry.scale_d", 1.0),
        marker=config.marker(), n_avg=config.integer("synth.n_avg"), seed=seed,
        kind=config.synth_kind(), gain=config.num("synth.gain", 1.0),
        efficiency=config.num("efficiency", 1.0), workers=args.workers,
    )


def cmd_synth(args) -> int:
    config = _load(args, "synth")
    _check_floor(config.num("grid.start_hz"), args.allow_low_freq)
    out = _require_out(args)
    synth = _synth_config(config, args)
    spectrum = synthesize(synth)
    units = spectrum.kind.units if synth.gain == 1.0 else "arbitrary"
    write_spectrum_csv(out, spectrum, units=units,
                       comments={"seed": str(synth.seed), "n_avg": str(synth.n_avg)})
    return EXIT_OK


def _fixed_background(config: RunConfig, grid):
    """Known frequency-noise channels held fixed under the thermorefractive fit."""
    channels = config.channels()
    cavity = config.cavity()
    parts = []
    if "shot" in channels and "power_w" in config.values:
        parts.append(shot_freq_psd(cavity, config.num("power_w"), grid, config.num("efficiency", 1.0)))
    if "micro_mech" in channels and config.modes():
        parts.append(micromech_freq_psd(config.modes(), cavity, grid))
    return sum(parts) if parts else None


def _kv(x) -> str:
    return format(float(x), ".17g")


def cmd_fit(args) -> int:
    config = _load(args, "fit")
    if not args.spectrum:
        raise UsageError("--spectrum is required for fit")
    out = _require_out(args)
    spectrum = read_spectrum_csv(args.spectrum)
    _check_floor(float(spectrum.freq_hz[0]), args.allow_low_freq)
    cavity, material = config.cavity(), config.material()
    marker = config.marker()
    factor = 1.0
    if marker is not None:
        factor, _ = calibration_factor(spectrum, marker)
        spectrum = calibrate_spectrum(spectrum, marker)
    elif spectrum.kind is not SpectrumKind.FREQUENCY_NOISE:
        raise UsageError("fit needs a frequency-noise spectrum or a calibration marker")
    geom0 = mode_geometry(cavity, material)
    background = _fixed_background(config, spectrum.grid)
    lorentz_windows = config.windows("fit.lorentz_windows_hz")
    exclude = config.windows("fit.exclude_hz") + lorentz_windows
    result = fit_thermorefractive(spectrum, geom0, material, cavity, config.temperature,
                                  exclude_windows=exclude, background=background)
    lorentzians = fit_lorentzian_modes(spectrum, lorentz_windows)
    cov = result.covariance
    lines = [
        f"s_b = {_kv(result.s_b)}",
        f"s_d = {_kv(result.s_d)}",
        f"b_m = {_kv(result.geometry.b)}",
        f"d_m = {_kv(result.geometry.d)}",
        f"V_m3 = {_kv(result.geometry.V)}",
        f"tau_s = {_kv(result.geometry.tau)}",
        f"cov_bb = {_kv(cov[0, 0])}",
        f"cov_bd = {_kv(cov[0, 1])}",
        f"cov_dd = {_kv(cov[1, 1])}",
        f"residual_norm = {_kv(result.residual_norm)}",
        f"iterations = {result.iterations}",
        f"converged = {str(result.converged).lower()}",
        f"n_bins = {result.n_bins}",
        f"calibration_factor = {_kv(factor)}",
        f"message = {result.message}",
    ]
    for i, lf in enumerate(lorentzians):
        lines += [
            f"lorentz.{i}.failed = {str(lf.failed).lower()}",
            f"lorentz.{i}.freq_hz = {_kv(lf.Omega_i / (2 * math.pi))}",
            f"lorentz.{i}.width_hz = {_kv(lf.Gamma_i / (2 * math.pi))}",
            f"lorentz.{i}.height = {_kv(lf.height)}",
            f"lorentz.{i}.background = {_kv(lf.background)}",
        ]
    out.write_text("\n".join(lines) + "\n")
    print(f"s_b = {result.s_b:.4f}, s_d = {result.s_d:.4f}, converged = {result.converged} "
          f"after {result.iterations} iterations")
    if not result.converged:
        print(f"fit did not converge: {result.message}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


COMMANDS = {
    "budget": (cmd_budget, "write the per-channel displacement noise budget and print figures of merit"),
    "sql": (cmd_sql, "print SQL power, threshold power and imprecision ratio"),
    "fit": (cmd_fit, "calibrate a measured spectrum and fit the thermorefractive model"),
    "synth": (cmd_synth, "write a synthetic averaged-periodogram spectrum"),
    "geometry": (cmd_geometry, "print the WGM geometry and sampled length"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optomech-budget", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="key = value run configuration")
        p.add_argument("--out", help="output file")
        p.add_argument("--spectrum", help="input spectrum CSV (fit)")
        p.add_argument("--seed", type=int, help="override synth.seed")
        p.add_argument("--workers", type=int, default=1, help="threads for synthesis (output is identical)")
        p.add_argument("--allow-low-freq", action="store_true",
                       help=f"permit grids below {constants.LOW_FREQ_FLOOR_HZ:g} Hz")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    func = COMMANDS[args.command][0]
    try:
        return func(args)
    except (ConfigError, UsageError, MaterialError, SpectrumFileError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
