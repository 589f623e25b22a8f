"""End-to-end acceptance checks at the standard operating point.

Every test prints one [PASS]/[FAIL] line with the measured numbers
before asserting, so a full run doubles as a scorecard. Tolerances are
fixed; a failing line records a real disagreement between the model at
these parameters and the targeted behaviour, not a loose test.
"""

import numpy as np
import pytest

from nvapor import (build_dissipator, build_hamiltonian, calibrate_od,
                    cutoff_scan, default_drives, density_matrix_checks,
                    detuning_axis, extract_features, rabi_scan, scan_spectrum,
                    stark_prediction, steady_state, thermal_grid,
                    time_evolve_many, zeeman_multiplet)
from nvapor.evolve import max_rate
from nvapor.levels import MHZ, TWO_PI, LevelScheme

GAMMA2 = TWO_PI * 6e6
SEED = 20260823


def _check(name, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def _ground_pair():
    s = np.zeros((4, 4), dtype=complex)
    s[0, 0] = s[2, 2] = 0.5
    return s


def test_01_thermal_lambda_single_subnatural_transparency(
        lambda_thermal_spectrum, probe_baseline_spectrum):
    features = extract_features(lambda_thermal_spectrum,
                                probe_baseline_spectrum)
    windows = [f for f in features if f.kind == "transparency"]
    ok = (len(windows) == 1
          and abs(windows[0].center) < TWO_PI * 10e3
          and TWO_PI * 50e3 <= windows[0].fwhm <= TWO_PI * 500e3)
    if windows:
        w = min(windows, key=lambda f: abs(f.center))
        shape = (f"center={w.center / MHZ:+.5f} MHz, "
                 f"fwhm={w.fwhm / MHZ:.4f} MHz")
    else:
        shape = "no window"
    _check("thermal lambda transparency", ok,
           f"{len(windows)} window(s), {shape} "
           "(need 1 window, |center| < 0.01 MHz, fwhm in [0.05, 0.5] MHz)")


def test_02_thermal_n_centre_inverts_to_narrow_absorption(
        n_thermal_spectrum, probe_baseline_spectrum):
    features = extract_features(n_thermal_spectrum, probe_baseline_spectrum)
    central = min(features, key=lambda f: abs(f.center))
    ok = (central.kind == "absorption" and central.contrast < 0
          and central.fwhm < TWO_PI * 500e3)
    _check("thermal n-system central inversion", ok,
           f"central kind={central.kind}, center={central.center / MHZ:+.5f} "
           f"MHz, fwhm={central.fwhm / MHZ:.4f} MHz, "
           f"contrast={central.contrast:+.4f} "
           "(need absorption below baseline with fwhm < 0.5 MHz)")


def test_03_stationary_n_centre_shows_no_absorption(scheme, n_drives,
                                                    probe_only_drives, cold,
                                                    axis):
    ref = calibrate_od(scheme, n_drives, cold)
    observed = scan_spectrum(scheme, n_drives, cold, axis, ref)
    base = scan_spectrum(scheme, probe_only_drives, cold, axis, ref)
    features = extract_features(observed, base)
    central_abs = [f for f in features
                   if f.kind == "absorption" and abs(f.center) < 0.5 * MHZ]
    windows = [f for f in features
               if f.kind == "transparency" and abs(f.center) < 1.0 * MHZ]
    broad_or_split = (len(windows) >= 2
                      or any(f.fwhm > TWO_PI * 500e3 for f in windows))
    ok = not central_abs and bool(windows) and broad_or_split
    _check("stationary n-system centre", ok,
           f"{len(central_abs)} central absorption feature(s), "
           f"{len(windows)} central window(s) with fwhm "
           f"{[round(f.fwhm / MHZ, 3) for f in windows]} MHz "
           "(need 0 absorption, split or broadened transparency)")


def test_04_contrast_flips_sign_as_velocity_cutoff_grows(scheme, n_drives,
                                                         thermal):
    cutoffs = [0.5 * GAMMA2, 1.0 * GAMMA2, 2.0 * GAMMA2, 5.0 * GAMMA2]
    contrasts = [c for _, c in cutoff_scan(scheme, n_drives, thermal, cutoffs)]
    signs = np.sign(contrasts)
    changes = int(np.sum(signs[:-1] != signs[1:]))
    ok = contrasts[0] < 0 < contrasts[-1] and changes == 1
    _check("velocity-cutoff emergence", ok,
           "contrast at {0.5, 1, 2, 5} gamma2 = "
           + ", ".join(f"{c:+.3e}" for c in contrasts)
           + f"; {changes} sign change(s) "
           "(need negative start, positive end, single change)")


def test_05_absorptive_contrast_peaks_at_matched_rabi(scheme, n_drives,
                                                      thermal):
    omegas = [TWO_PI * 2.5e6, TWO_PI * 5e6, TWO_PI * 7.5e6, TWO_PI * 10e6]
    results = rabi_scan(scheme, n_drives, thermal, omegas)
    best = max(results, key=lambda pair: pair[1])[0]
    ok = best == pytest.approx(TWO_PI * 5e6, rel=1e-12)
    _check("matched-Rabi contrast maximum", ok,
           "contrast at {2.5, 5, 7.5, 10} MHz = "
           + ", ".join(f"{c:+.3e}" for _, c in results)
           + f"; max at {best / MHZ:g} MHz (need max at 5 MHz)")


def test_06_far_detuned_control_shifts_centre_by_light_shift(
        scheme, probe_only_drives, thermal, absorption_ref):
    delta43 = -TWO_PI * 5e9
    ax = detuning_axis(inner_half_width=MHZ, inner_step=0.01 * MHZ,
                       outer_half_width=MHZ, outer_step=0.01 * MHZ)
    base = scan_spectrum(scheme, probe_only_drives, thermal, ax,
                         absorption_ref, workers=4)
    rows = []
    for omega_mhz in (25.0, 50.0, 75.0):
        drv = default_drives(control_rabi=omega_mhz * MHZ,
                             control_detuning=delta43)
        observed = scan_spectrum(scheme, drv, thermal, ax, absorption_ref,
                                 workers=4)
        windows = [f for f in extract_features(observed, base)
                   if f.kind == "transparency"]
        measured = max(windows, key=lambda f: f.contrast).center
        rows.append((omega_mhz, stark_prediction(omega_mhz * MHZ, delta43),
                     measured))
    ok = all(p * m > 0 and abs(m - p) <= 0.10 * abs(p) for _, p, m in rows)
    _check("light-shifted transparency centre", ok,
           "; ".join(f"{o:g} MHz: predicted {p / MHZ:+.5f}, "
                     f"measured {m / MHZ:+.5f} MHz" for o, p, m in rows)
           + " (need same sign, within 10%)")


def test_07_zeeman_triplet_keeps_absorption_with_control_on(
        scheme, n_drives, lambda_drives, thermal, axis, absorption_ref,
        probe_baseline_spectrum):
    offsets = [-0.7 * MHZ, 0.0, 0.7 * MHZ]
    weights = [1 / 3, 1 / 3, 1 / 3]
    on = zeeman_multiplet(scheme, n_drives, thermal, axis, offsets, weights,
                          absorption_ref, workers=4)
    off = zeeman_multiplet(scheme, lambda_drives, thermal, axis, offsets,
                           weights, absorption_ref, workers=4)
    n_abs = len([f for f in extract_features(on, probe_baseline_spectrum)
                 if f.kind == "absorption" and abs(f.center) < 2 * MHZ])
    n_win = len([f for f in extract_features(off, probe_baseline_spectrum)
                 if f.kind == "transparency" and abs(f.center) < 2 * MHZ])
    ok = n_abs == 3 and n_win == 3
    _check("zeeman triplet persistence", ok,
           f"control on: {n_abs} central absorption feature(s); "
           f"control off: {n_win} central window(s) (need 3 and 3)")


def test_08_time_evolution_agrees_with_steady_state(scheme, lambda_drives,
                                                    n_drives, thermal, cold):
    rng = np.random.default_rng(SEED)
    cases = []
    for drives, grid in ((lambda_drives, thermal), (n_drives, thermal),
                         (n_drives, cold)):
        for _ in range(5):
            v = float(rng.choice(grid.nodes, p=grid.weights))
            delta = float(rng.uniform(-2 * MHZ, 2 * MHZ))
            cases.append((drives.with_probe_detuning(delta), v))
    d = build_dissipator(scheme)
    hs = np.stack([build_hamiltonian(scheme, drv, v) for drv, v in cases])
    dts = np.array([0.01 / max_rate(h, d) for h in hs])
    horizon = 50.0 / scheme.transit_rate
    evolved = time_evolve_many(hs, d, np.stack([_ground_pair()] * len(cases)),
                               np.full(len(cases), horizon), dts)
    errs = [np.abs(evolved[k] - steady_state(hs[k], d)).max()
            for k in range(len(cases))]
    ok = max(errs) < 1e-6
    _check("integrator vs steady state", ok,
           f"{len(cases)} random (v, detuning) points, worst elementwise "
           f"difference {max(errs):.3e} (need < 1e-6)")


def test_09_random_parameter_steady_states_stay_physical(scheme):
    rng = np.random.default_rng(SEED)
    worst = {"hermiticity": 0.0, "trace_error": 0.0, "min_eigenvalue": 0.0,
             "residual": 0.0}
    for _ in range(1000):
        b21 = rng.uniform(0.0, 1.0)
        b43 = rng.uniform(0.5, 1.0)
        trial = LevelScheme(
            natural_decay=(0.0, TWO_PI * rng.uniform(1e6, 10e6), 0.0,
                           TWO_PI * rng.uniform(1e6, 10e6)),
            branching=((0.0, 0.0, 0.0, 0.0), (b21, 0.0, 1.0 - b21, 0.0),
                       (0.0, 0.0, 0.0, 0.0), (1.0 - b43, 0.0, b43, 0.0)),
            transit_rate=TWO_PI * rng.uniform(0.01e6, 1e6),
        )
        drives = default_drives(
            probe_rabi=rng.uniform(0, 20) * MHZ,
            coupling_rabi=rng.uniform(0, 20) * MHZ,
            control_rabi=rng.uniform(0, 20) * MHZ,
            probe_detuning=rng.uniform(-50, 50) * MHZ,
            coupling_detuning=rng.uniform(-50, 50) * MHZ,
            control_detuning=rng.uniform(-50, 50) * MHZ,
        )
        h = build_hamiltonian(trial, drives, rng.uniform(-600, 600))
        d = build_dissipator(trial)
        checks = density_matrix_checks(steady_state(h, d), h, d)
        worst["hermiticity"] = max(worst["hermiticity"], checks["hermiticity"])
        worst["trace_error"] = max(worst["trace_error"],
                                   abs(checks["trace_error"]))
        worst["min_eigenvalue"] = min(worst["min_eigenvalue"],
                                      checks["min_eigenvalue"])
        worst["residual"] = max(worst["residual"], checks["residual"])
    ok = (worst["hermiticity"] < 1e-10 and worst["trace_error"] < 1e-10
          and worst["min_eigenvalue"] > -1e-8 and worst["residual"] < 1e-10)
    _check("randomized physicality sweep", ok,
           "1000 parameter sets, worst hermiticity "
           f"{worst['hermiticity']:.1e}, trace {worst['trace_error']:.1e}, "
           f"eigenvalue {worst['min_eigenvalue']:+.1e}, residual "
           f"{worst['residual']:.1e} (need 1e-10 / 1e-10 / -1e-8 / 1e-10)")


def test_10_feature_metrics_stable_under_grid_refinement(
        scheme, lambda_drives, n_drives, probe_only_drives,
        lambda_thermal_spectrum, n_thermal_spectrum, probe_baseline_spectrum):
    fine_grid = thermal_grid(293.0, 1.443e-25, n_nodes=4001)
    fine_axis = detuning_axis(inner_step=0.005 * MHZ, outer_step=0.1 * MHZ)
    ref = calibrate_od(scheme, lambda_drives, fine_grid)
    fine_base = scan_spectrum(scheme, probe_only_drives, fine_grid, fine_axis,
                              ref, workers=4)

    def window(observed, base):
        return min((f for f in extract_features(observed, base)
                    if f.kind == "transparency"), key=lambda f: abs(f.center))

    def centre(observed, base):
        return min(extract_features(observed, base),
                   key=lambda f: abs(f.center))

    drift = []
    for drives, coarse_spec, pick in (
            (lambda_drives, lambda_thermal_spectrum, window),
            (n_drives, n_thermal_spectrum, centre)):
        fine_spec = scan_spectrum(scheme, drives, fine_grid, fine_axis, ref,
                                  workers=4)
        c = pick(coarse_spec, probe_baseline_spectrum)
        f = pick(fine_spec, fine_base)
        scale = max(abs(c.center), c.fwhm)
        drift.append(abs(f.center - c.center) / scale)
        drift.append(abs(f.fwhm - c.fwhm) / c.fwhm)
        drift.append(abs(f.contrast - c.contrast) / abs(c.contrast))
    ok = max(drift) < 0.02
    _check("grid-refinement stability", ok,
           "relative changes (centre, fwhm, contrast) x (lambda, n) = "
           + ", ".join(f"{d:.2e}" for d in drift) + " (need all < 2e-2)")
