"""Command-line front end: preset or config file in, CSV and manifest out."""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import ScenarioConfig
from .exceptions import (ConfigError, EmptyGrid, InvalidGrid, NoFeature,
                         NvaporError, SingularSystem)
from .levels import MHZ
from .spectra import (ResonanceFeature, Spectrum, calibrate_od, detuning_axis,
                      extract_features, rabi_scan, scan_spectrum,
                      stark_prediction, zeeman_multiplet)
from .doppler import cutoff_scan


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="nvapor",
        description="Steady-state probe spectra of a four-level N-system "
                    "in thermal vapour.")
    parser.add_argument("--config", help="INI scenario file")
    parser.add_argument("--preset", help="named scenario preset")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--override", action="append", default=[],
                        metavar="SECTION.KEY=VALUE",
                        help="config override, repeatable")
    parser.add_argument("--workers", type=int, default=1,
                        help="processes for the detuning sweep")
    args = parser.parse_args(argv)

    if not args.config and not args.preset:
        print("error: provide --preset and/or --config", file=sys.stderr)
        return 2
    try:
        cfg = ScenarioConfig.from_sources(preset=args.preset,
                                          config_path=args.config,
                                          overrides=args.override)
    except (ConfigError, InvalidGrid) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    try:
        return run(cfg, args.out, workers=max(1, args.workers))
    except (ConfigError, InvalidGrid) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except SingularSystem as err:
        where = []
        if err.velocity is not None:
            where.append(f"v={err.velocity:.6g} m/s")
        if err.detuning is not None:
            where.append(f"detuning={err.detuning / MHZ:.6g} MHz")
        print(f"solver error: {err}" + (f" at {', '.join(where)}" if where else ""),
              file=sys.stderr)
        return 3
    except (EmptyGrid, NvaporError) as err:
        print(f"solver error: {err}", file=sys.stderr)
        return 3


def run(cfg: ScenarioConfig, out_dir: str, workers: int = 1) -> int:
    """Execute one scenario and write CSV outputs plus a run manifest."""
    started = time.monotonic()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    scheme = cfg.build_scheme()
    drives = cfg.build_drives()
    grid = cfg.build_grid()
    mode = cfg.mode

    if mode in ("spectrum", "zeeman"):
        axis = cfg.build_axis()
        ref = calibrate_od(scheme, drives, grid, cfg.target_od)
        baseline = scan_spectrum(scheme, _probe_only(drives), grid, axis, ref,
                                 workers=workers)
        if mode == "spectrum":
            spectrum = scan_spectrum(scheme, drives, grid, axis, ref,
                                     workers=workers)
        else:
            offsets, weights = cfg.zeeman_parts()
            spectrum = zeeman_multiplet(scheme, drives, grid, axis, offsets,
                                        weights, ref, workers=workers)
        _write_spectrum(out / "spectrum.csv", spectrum)
        _write_features(out / "features.csv",
                        _safe_features(spectrum, baseline, cfg.noise_floor))
    elif mode == "cutoff-scan":
        gamma2 = scheme.natural_decay[1]
        cutoffs = [c * gamma2 for c in cfg.number_list("cutoff_scan",
                                                       "cutoffs_gamma2")]
        rows = [(c / gamma2, contrast)
                for c, contrast in cutoff_scan(scheme, drives, grid, cutoffs)]
        _write_rows(out / "cutoff_scan.csv", "cutoff_gamma2,contrast", rows)
    elif mode == "rabi-scan":
        omegas = [o * MHZ for o in cfg.number_list("rabi_scan",
                                                   "control_rabi_list_mhz")]
        rows = [(o / MHZ, contrast)
                for o, contrast in rabi_scan(scheme, drives, grid, omegas)]
        _write_rows(out / "rabi_scan.csv", "control_rabi_mhz,contrast", rows)
    else:  # stark
        _run_stark(cfg, scheme, drives, grid, out, workers)

    run_info = {
        "tool": "nvapor",
        "version": __version__,
        "mode": mode,
        "preset": cfg.preset or "",
        "workers": str(workers),
        "wall_time_s": f"{time.monotonic() - started:.3f}",
    }
    (out / "manifest.ini").write_text(cfg.to_ini(run_info))
    return 0


def _run_stark(cfg: ScenarioConfig, scheme, drives, grid, out: Path,
               workers: int) -> None:
    window = cfg.number("stark", "window_mhz") * MHZ
    step = cfg.number("stark", "step_mhz") * MHZ
    axis = detuning_axis(inner_half_width=window, inner_step=step,
                         outer_half_width=window, outer_step=step)
    ref = calibrate_od(scheme, drives, grid, cfg.target_od)
    baseline = scan_spectrum(scheme, _probe_only(drives), grid, axis, ref,
                             workers=workers)
    rows = []
    for omega_mhz in cfg.number_list("stark", "control_rabi_list_mhz"):
        omega = omega_mhz * MHZ
        tuned = replace(drives, control=replace(drives.control, rabi=omega))
        spectrum = scan_spectrum(scheme, tuned, grid, axis, ref,
                                 workers=workers)
        _write_spectrum(out / f"spectrum_{omega_mhz:g}.csv", spectrum)
        features = _safe_features(spectrum, baseline, cfg.noise_floor)
        windows = [f for f in features if f.kind == "transparency"]
        measured = max(windows, key=lambda f: f.contrast).center if windows \
            else float("nan")
        predicted = stark_prediction(omega, drives.control.detuning)
        rows.append((omega_mhz, predicted / MHZ, measured / MHZ))
    _write_rows(out / "stark.csv",
                "control_rabi_mhz,predicted_shift_mhz,measured_shift_mhz",
                rows)


def _probe_only(drives):
    return replace(drives,
                   coupling=replace(drives.coupling, rabi=0.0),
                   control=replace(drives.control, rabi=0.0))


def _safe_features(spectrum: Spectrum, baseline: Spectrum,
                   floor: float) -> list[ResonanceFeature]:
    try:
        return extract_features(spectrum, baseline, noise_floor=floor)
    except NoFeature:
        return []


def _write_spectrum(path: Path, spectrum: Spectrum) -> None:
    lines = ["detuning_MHz,absorption,transmission"]
    for delta, absorption, transmission in zip(spectrum.detunings,
                                               spectrum.absorption,
                                               spectrum.transmission):
        lines.append(f"{delta / MHZ:.9g},{absorption:.9g},{transmission:.9g}")
    path.write_text("\n".join(lines) + "\n")


def _write_features(path: Path, features: list[ResonanceFeature]) -> None:
    lines = ["kind,center_MHz,fwhm_MHz,contrast"]
    for f in features:
        lines.append(f"{f.kind},{f.center / MHZ:.9g},{f.fwhm / MHZ:.9g},"
                     f"{f.contrast:.9g}")
    path.write_text("\n".join(lines) + "\n")


def _write_rows(path: Path, header: str, rows) -> None:
    lines = [header]
    for row in rows:
        lines.append(",".join(f"{value:.9g}" for value in row))
    path.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    sys.exit(main())
