"""Steady-state optical Bloch solver for a four-level N-system in vapour."""

__version__ = "0.1.0"

from .levels import (DriveSet, Field, LevelScheme, default_drives,
                     default_scheme)
from .core import (Dissipator, build_dissipator, build_hamiltonian,
                   density_matrix_checks, liouvillian, probe_absorption,
                   steady_state, steady_state_stack)
from .doppler import (VelocityGrid, cutoff_scan, delta_grid, doppler_average,
                      eit_off_dissipator, thermal_grid)
from .spectra import (ResonanceFeature, Spectrum, calibrate_od, detuning_axis,
                      extract_features, rabi_scan, scan_spectrum,
                      stark_prediction, sweep_absorption,
                      transmission_profile, zeeman_multiplet)
from .evolve import time_evolve, time_evolve_many
from .config import ScenarioConfig
from . import exceptions

__all__ = [
    "__version__",
    "LevelScheme", "DriveSet", "Field", "default_scheme", "default_drives",
    "Dissipator", "build_hamiltonian", "build_dissipator", "steady_state",
    "steady_state_stack", "probe_absorption", "liouvillian",
    "density_matrix_checks",
    "VelocityGrid", "thermal_grid", "delta_grid", "doppler_average",
    "cutoff_scan", "eit_off_dissipator",
    "Spectrum", "ResonanceFeature", "detuning_axis", "scan_spectrum",
    "sweep_absorption", "calibrate_od", "transmission_profile",
    "extract_features",
    "stark_prediction", "rabi_scan", "zeeman_multiplet",
    "time_evolve", "time_evolve_many",
    "ScenarioConfig",
    "exceptions",
]
