"""Shared fixtures: default scenario objects and cached thermal spectra.

The three full thermal sweeps used across several tests are expensive
(about 20 s each), so they are computed once per session.
"""

import numpy as np
import pytest

from nvapor import (calibrate_od, default_drives, default_scheme, delta_grid,
                    detuning_axis, scan_spectrum, thermal_grid)
from nvapor.levels import MHZ

TARGET_OD = 3.0


@pytest.fixture(scope="session")
def scheme():
    return default_scheme()


@pytest.fixture(scope="session")
def lambda_drives():
    return default_drives()


@pytest.fixture(scope="session")
def n_drives():
    return default_drives(control_rabi=MHZ * 5.0)


@pytest.fixture(scope="session")
def probe_only_drives():
    return default_drives(coupling_rabi=0.0)


@pytest.fixture(scope="session")
def thermal():
    return thermal_grid(293.0, 1.443e-25)


@pytest.fixture(scope="session")
def cold():
    return delta_grid(0.0)


@pytest.fixture(scope="session")
def axis():
    return detuning_axis()


@pytest.fixture(scope="session")
def absorption_ref(scheme, lambda_drives, thermal):
    return calibrate_od(scheme, lambda_drives, thermal, TARGET_OD)


@pytest.fixture(scope="session")
def probe_baseline_spectrum(scheme, probe_only_drives, thermal, axis,
                            absorption_ref):
    return scan_spectrum(scheme, probe_only_drives, thermal, axis,
                         absorption_ref)


@pytest.fixture(scope="session")
def lambda_thermal_spectrum(scheme, lambda_drives, thermal, axis,
                            absorption_ref):
    return scan_spectrum(scheme, lambda_drives, thermal, axis, absorption_ref)


@pytest.fixture(scope="session")
def n_thermal_spectrum(scheme, n_drives, thermal, axis, absorption_ref):
    return scan_spectrum(scheme, n_drives, thermal, axis, absorption_ref)
