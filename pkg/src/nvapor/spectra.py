"""Probe-detuning sweeps, transmission, and line-shape feature extraction."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import find_peaks

from .doppler import (VelocityGrid, average_with_dissipator, doppler_average,
                      eit_off_dissipator)
from .core import build_dissipator
from .exceptions import DegenerateReference, LengthMismatch, NoFeature
from .levels import MHZ, DriveSet, LevelScheme

#: Default Beer-Lambert optical depth of the probe-only line centre.
DEFAULT_TARGET_OD = 3.0
#: Default minimum |transmission - baseline| for a reportable feature.
DEFAULT_NOISE_FLOOR = 1e-4


@dataclass(frozen=True)
class Spectrum:
    """Result of a probe-detuning sweep.

    detunings are rad/s and strictly ascending; absorption is the
    ensemble-averaged dimensionless observable; transmission follows
    Beer-Lambert with the calibrated reference absorption recorded in
    ``metadata['absorption_ref']``.
    """

    detunings: np.ndarray
    absorption: np.ndarray
    transmission: np.ndarray
    metadata: dict


@dataclass(frozen=True)
class ResonanceFeature:
    """One extracted spectral feature.

    contrast is peak transmission minus baseline transmission at the
    same detuning: positive marks a transparency window, negative an
    enhanced-absorption feature. kind is derived from that sign.
    """

    center: float
    fwhm: float
    contrast: float
    kind: str


def detuning_axis(inner_half_width: float = MHZ * 2.0,
                  inner_step: float = MHZ * 0.01,
                  outer_half_width: float = MHZ * 40.0,
                  outer_step: float = MHZ * 0.2) -> np.ndarray:
    """Two-resolution probe-detuning axis, rad/s.

    Fine steps inside ``+-inner_half_width`` resolve the sub-natural
    feature; coarse steps extend to ``+-outer_half_width`` for the
    Doppler pedestal and dressed-state sidebands. The axis is exactly
    symmetric about zero and contains zero.
    """
    n_fine = round(inner_half_width / inner_step)
    fine = np.arange(-n_fine, n_fine + 1) * inner_step
    n_outer = round((outer_half_width - inner_half_width) / outer_step)
    left = -inner_half_width - np.arange(n_outer, 0, -1) * outer_step
    right = inner_half_width + np.arange(1, n_outer + 1) * outer_step
    return np.concatenate([left, fine, right])


def calibrate_od(scheme: LevelScheme, drives: DriveSet, grid: VelocityGrid,
                 target_od: float = DEFAULT_TARGET_OD) -> float:
    """Reference absorption mapping the probe-only line centre to exp(-OD).

    The reference scenario is the given one with coupling and control
    switched off and the probe on resonance, averaged over the same
    velocity grid. Transmission is then exp(-absorption/absorption_ref).

    Raises DegenerateReference if the reference absorption is not
    positive.
    """
    if target_od <= 0:
        raise DegenerateReference(f"target_od must be positive, got {target_od}")
    reference = replace(
        drives,
        probe=replace(drives.probe, detuning=0.0),
        coupling=replace(drives.coupling, rabi=0.0),
        control=replace(drives.control, rabi=0.0),
    )
    a0 = doppler_average(scheme, reference, grid)
    if a0 <= 0:
        raise DegenerateReference(
            f"probe-only line-centre absorption {a0:.3e} is not positive")
    return a0 / target_od


def transmission_profile(absorption: np.ndarray,
                         absorption_ref: float) -> np.ndarray:
    """Beer-Lambert transmission for a calibrated absorption profile."""
    return np.exp(-np.asarray(absorption) / absorption_ref)


def _sweep_chunk(scheme: LevelScheme, drives: DriveSet, grid: VelocityGrid,
                 detunings: np.ndarray) -> list[float]:
    out = []
    for delta in detunings:
        out.append(doppler_average(scheme, drives.with_probe_detuning(float(delta)),
                                   grid))
    return out


def sweep_absorption(scheme: LevelScheme, drives: DriveSet,
                     grid: VelocityGrid, axis: np.ndarray,
                     workers: int = 1) -> np.ndarray:
    """Averaged absorption at every axis point, in axis order.

    Each detuning point is an independent solve, so the sweep may be
    spread over processes; the reduction per point is unchanged and the
    result is bit-identical for any worker count.
    """
    axis = np.asarray(axis, dtype=float)
    if workers <= 1 or len(axis) < 8:
        return np.array(_sweep_chunk(scheme, drives, grid, axis))
    chunks = np.array_split(axis, min(workers * 4, len(axis)))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_sweep_chunk,
                         *zip(*[(scheme, drives, grid, c) for c in chunks]))
        return np.concatenate([np.array(p) for p in parts])


def scan_spectrum(scheme: LevelScheme, drives: DriveSet, grid: VelocityGrid,
                  axis: np.ndarray, absorption_ref: float,
                  workers: int = 1) -> Spectrum:
    """Sweep the probe detuning and assemble a Spectrum.

    Parameters
    ----------
    axis : ndarray
        Strictly ascending probe detunings, rad/s.
    absorption_ref : float
        Calibrated reference from :func:`calibrate_od`.

    Raises
    ------
    SingularSystem with the offending detuning attached if any point
    fails to solve.
    """
    axis = np.asarray(axis, dtype=float)
    if np.any(np.diff(axis) <= 0):
        raise ValueError("detuning axis must be strictly ascending")
    absorption = sweep_absorption(scheme, drives, grid, axis, workers)
    return Spectrum(
        detunings=axis,
        absorption=absorption,
        transmission=transmission_profile(absorption, absorption_ref),
        metadata=_metadata(scheme, drives, grid, absorption_ref),
    )


def _metadata(scheme: LevelScheme, drives: DriveSet, grid: VelocityGrid,
              absorption_ref: float, **extra) -> dict:
    meta = {
        "natural_decay": tuple(scheme.natural_decay),
        "transit_rate": scheme.transit_rate,
        "transit_as_dephasing": scheme.transit_as_dephasing,
        "probe_rabi": drives.probe.rabi,
        "coupling_rabi": drives.coupling.rabi,
        "control_rabi": drives.control.rabi,
        "coupling_detuning": drives.coupling.detuning,
        "control_detuning": drives.control.detuning,
        "wavevector": drives.wavevector,
        "sigma_v": grid.sigma_v,
        "n_nodes": len(grid.nodes),
        "cutoff": grid.cutoff,
        "absorption_ref": absorption_ref,
    }
    meta.update(extra)
    return meta


def extract_features(spectrum: Spectrum, baseline: Spectrum,
                     noise_floor: float = DEFAULT_NOISE_FLOOR) -> list[ResonanceFeature]:
    """Locate transparency and absorption features against a baseline.

    The baseline must share the detuning axis and represents the same
    scenario with coupling and control off. Peaks of the transmission
    difference above the noise floor are refined by a three-point
    parabola; widths are read off at half contrast by linear
    interpolation, walking outward from the peak (axis ends bound the
    walk, so a width can be clipped by the scan window).

    Raises NoFeature when nothing exceeds the floor, ValueError when the
    axes differ.
    """
    if not np.array_equal(spectrum.detunings, baseline.detunings):
        raise ValueError("spectrum and baseline must share one detuning axis")
    x = spectrum.detunings
    diff = spectrum.transmission - baseline.transmission
    features: list[ResonanceFeature] = []
    for sign, kind in ((+1, "transparency"), (-1, "absorption")):
        y = sign * diff
        peaks, _ = find_peaks(y, height=noise_floor, prominence=noise_floor / 2)
        for p in peaks:
            center, height = _parabolic_vertex(x, y, p)
            half = height / 2.0
            lo = _half_crossing(x, y, p, half, -1)
            hi = _half_crossing(x, y, p, half, +1)
            features.append(ResonanceFeature(center=center, fwhm=hi - lo,
                                             contrast=sign * height, kind=kind))
    if not features:
        raise NoFeature(f"no |transmission - baseline| region exceeds {noise_floor}")
    features.sort(key=lambda f: f.center)
    return features


def _parabolic_vertex(x: np.ndarray, y: np.ndarray, p: int) -> tuple[float, float]:
    """Vertex of the parabola through three points around index p."""
    x1, x2, x3 = x[p - 1], x[p], x[p + 1]
    y1, y2, y3 = y[p - 1], y[p], y[p + 1]
    den = (x1 - x2) * (x1 - x3) * (x2 - x3)
    a = (x3 * (y2 - y1) + x2 * (y1 - y3) + x1 * (y3 - y2)) / den
    b = (x3 ** 2 * (y1 - y2) + x2 ** 2 * (y3 - y1) + x1 ** 2 * (y2 - y3)) / den
    if a == 0:
        return float(x2), float(y2)
    cx = -b / (2 * a)
    return float(cx), float(y2 - a * (x2 - cx) ** 2)


def _half_crossing(x: np.ndarray, y: np.ndarray, p: int, half: float,
                   direction: int) -> float:
    """Axis position where y falls through ``half``, walking from p."""
    i = p
    while True:
        j = i + direction
        if j < 0 or j >= len(y):
            return float(x[0] if direction < 0 else x[-1])
        if y[j] < half <= y[i]:
            frac = (half - y[i]) / (y[j] - y[i])
            return float(x[i] + (x[j] - x[i]) * frac)
        i = j


def stark_prediction(omega: float, delta: float) -> float:
    """Light-shift estimate omega**2 / (4 delta) for a far-detuned field.

    Raises ZeroDivisionError on zero detuning.
    """
    if delta == 0:
        raise ZeroDivisionError("Stark shift prediction requires delta != 0")
    return omega ** 2 / (4.0 * delta)


def rabi_scan(scheme: LevelScheme, drives: DriveSet, grid: VelocityGrid,
              omega43_list: list[float]) -> list[tuple[float, float]]:
    """Line-centre absorptive contrast versus control Rabi frequency.

    For each control Rabi value the ensemble absorption at the given
    (resonant) detunings is compared to the ground-coherence-dephased
    baseline, exactly as in the cutoff scan. Negative contrast means the
    interference is still a net transparency; positive means enhanced
    absorption.
    """
    d_off = eit_off_dissipator(scheme)
    d_on = build_dissipator(scheme)
    results = []
    for omega in omega43_list:
        tuned = replace(drives, control=replace(drives.control, rabi=float(omega)))
        signal = average_with_dissipator(scheme, tuned, grid, d_on)
        baseline = average_with_dissipator(scheme, tuned, grid, d_off)
        results.append((float(omega), signal - baseline))
    return results


def zeeman_multiplet(scheme: LevelScheme, drives: DriveSet, grid: VelocityGrid,
                     axis: np.ndarray, offsets: list[float],
                     weights: list[float], absorption_ref: float,
                     workers: int = 1) -> Spectrum:
    """Weighted superposition of two-photon-shifted copies of a scenario.

    Component m is the base scenario with the coupling detuning moved by
    ``offsets[m]``, which shifts the probe two-photon resonance to that
    offset; the composite absorption is the weighted sum and the
    transmission is taken of the composite.

    Raises LengthMismatch when offsets and weights differ in length,
    ValueError for negative or non-normalized weights.
    """
    if len(offsets) != len(weights):
        raise LengthMismatch(
            f"{len(offsets)} offsets vs {len(weights)} weights")
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
        raise ValueError("weights must be nonnegative and sum to 1")
    axis = np.asarray(axis, dtype=float)
    composite = np.zeros(len(axis))
    for offset, weight in zip(offsets, w):
        shifted = drives.with_coupling_detuning(drives.coupling.detuning + offset)
        composite += weight * sweep_absorption(scheme, shifted, grid, axis, workers)
    return Spectrum(
        detunings=axis,
        absorption=composite,
        transmission=transmission_profile(composite, absorption_ref),
        metadata=_metadata(scheme, drives, grid, absorption_ref,
                           multiplet_offsets=tuple(float(o) for o in offsets),
                           multiplet_weights=tuple(float(v) for v in w)),
    )
