"""Named scenario presets, expressed as configuration overlays.

Each preset is a complete scenario once merged over the defaults in
:mod:`nvapor.config`. Values are in the external units of the config
grammar (linear MHz, kHz, nm, K, kg).
"""

from __future__ import annotations

#: Baseline key/value table every scenario starts from.
DEFAULTS: dict[str, dict[str, str]] = {
    "levels": {
        "gamma2_mhz": "6.0",
        "gamma4_mhz": "6.0",
        "transit_khz": "100.0",
        "branching_21": "0.5",
        "branching_23": "0.5",
        "branching_43": "1.0",
        "transit_as_dephasing": "false",
    },
    "drives": {
        "probe_rabi_mhz": "0.1",
        "coupling_rabi_mhz": "5.0",
        "control_rabi_mhz": "0.0",
        "coupling_detuning_mhz": "0.0",
        "control_detuning_mhz": "0.0",
        "wavelength_nm": "780.24",
    },
    "grid": {
        "kind": "thermal",
        "temperature_k": "293.0",
        "atomic_mass_kg": "1.443e-25",
        "n_nodes": "2001",
        "span_sigma": "4.0",
        "velocity_ms": "0.0",
    },
    "axis": {
        "inner_mhz": "2.0",
        "inner_step_mhz": "0.01",
        "outer_mhz": "40.0",
        "outer_step_mhz": "0.2",
    },
    "output": {
        "target_od": "3.0",
        "noise_floor": "1e-4",
    },
    "cutoff_scan": {
        "cutoffs_gamma2": "0.5, 1, 2, 5",
    },
    "rabi_scan": {
        "control_rabi_list_mhz": "2.5, 5, 7.5, 10",
    },
    "zeeman": {
        "offsets_mhz": "-0.7, 0, 0.7",
        "weights": "1, 1, 1",
    },
    "stark": {
        "control_rabi_list_mhz": "25, 50, 75",
        "window_mhz": "1.0",
        "step_mhz": "0.01",
    },
}

#: Scenario presets as sparse overlays on DEFAULTS.
PRESETS: dict[str, dict[str, dict[str, str]]] = {
    "lambda-cold": {
        "scenario": {"mode": "spectrum"},
        "grid": {"kind": "delta"},
    },
    "lambda-thermal": {
        "scenario": {"mode": "spectrum"},
    },
    "n-cold": {
        "scenario": {"mode": "spectrum"},
        "grid": {"kind": "delta"},
        "drives": {"control_rabi_mhz": "5.0"},
    },
    "n-thermal": {
        "scenario": {"mode": "spectrum"},
        "drives": {"control_rabi_mhz": "5.0"},
    },
    "stark": {
        "scenario": {"mode": "stark"},
        "drives": {"control_detuning_mhz": "-5000.0"},
    },
    "cutoff-scan": {
        "scenario": {"mode": "cutoff-scan"},
        "drives": {"control_rabi_mhz": "5.0"},
    },
    "rabi-scan": {
        "scenario": {"mode": "rabi-scan"},
        "drives": {"control_rabi_mhz": "5.0"},
    },
    "zeeman": {
        "scenario": {"mode": "zeeman"},
        "drives": {"control_rabi_mhz": "5.0"},
    },
}
