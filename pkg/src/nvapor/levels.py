"""Atomic level structure and drive-field definitions.

Levels are indexed 0..3 internally, corresponding to kets |1>..|4>:
two ground states (0 and 2) and two excited states (1 and 3). The probe
couples 0-1, the coupling field 1-2, the control field 2-3.

All rates, Rabi frequencies, and detunings are angular frequencies in
rad/s. Conversion from linear MHz happens at the configuration boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

TWO_PI = 2.0 * math.pi
MHZ = TWO_PI * 1e6

#: Natural width of the Rb D2 excited states, 2pi x 6 MHz.
GAMMA_D2 = TWO_PI * 6e6
#: Transit-time relaxation of the ground manifold, 2pi x 100 kHz.
TRANSIT_DEFAULT = TWO_PI * 100e3
#: Shared wavevector magnitude for all three fields, rad/m.
WAVEVECTOR_780 = TWO_PI / 780.24e-9
#: Rb-87 atomic mass, kg.
MASS_RB87 = 1.443e-25
#: Cell temperature, K.
TEMPERATURE_DEFAULT = 293.0


@dataclass(frozen=True)
class LevelScheme:
    """Decay rates, branching ratios, and transit relaxation for 4 levels.

    Parameters
    ----------
    natural_decay : tuple of 4 floats
        Total spontaneous decay rate of each level, rad/s.
    branching : 4x4 tuple of tuples
        ``branching[i][j]`` is the fraction of ``natural_decay[i]`` that
        feeds level ``j``. Rows of decaying levels must sum to 1.
    transit_rate : float
        Ground-manifold relaxation from the finite beam-crossing time,
        rad/s. Modeled as bidirectional population exchange between the
        two ground states unless ``transit_as_dephasing`` is set.
    transit_as_dephasing : bool
        Sensitivity flag: treat transit as pure dephasing of the ground
        coherence instead of population exchange. Off by default.
    """

    natural_decay: tuple[float, float, float, float]
    branching: tuple[tuple[float, ...], ...]
    transit_rate: float
    transit_as_dephasing: bool = False
    n_levels: int = field(default=4, init=False)

    def validate(self) -> None:
        """Raise ValueError if any scheme invariant is violated."""
        if len(self.natural_decay) != 4 or len(self.branching) != 4:
            raise ValueError("scheme requires exactly 4 levels")
        if any(g < 0 for g in self.natural_decay) or self.transit_rate < 0:
            raise ValueError("decay and transit rates must be nonnegative")
        for i, row in enumerate(self.branching):
            if len(row) != 4:
                raise ValueError("branching must be a 4x4 table")
            if any(b < 0 for b in row):
                raise ValueError("branching ratios must be nonnegative")
            if row[i] != 0.0:
                raise ValueError(f"branching[{i}][{i}] must be zero")
            if self.natural_decay[i] > 0 and abs(sum(row) - 1.0) > 1e-12:
                raise ValueError(
                    f"branching row {i} of a decaying level must sum to 1")

    def departure_rates(self) -> np.ndarray:
        """Total population departure rate from each level, rad/s.

        Includes spontaneous decay and, in the exchange model, the
        transit rate leaving each ground state.
        """
        rates = np.array(self.natural_decay, dtype=float)
        if not self.transit_as_dephasing:
            rates[0] += self.transit_rate
            rates[2] += self.transit_rate
        return rates


@dataclass(frozen=True)
class Field:
    """One drive field: Rabi frequency, detuning, Doppler sign."""

    rabi: float
    detuning: float
    doppler_sign: int

    def validate(self) -> None:
        if self.rabi < 0:
            raise ValueError("Rabi frequency must be nonnegative")
        if self.doppler_sign not in (-1, +1):
            raise ValueError("doppler_sign must be -1 or +1")


@dataclass(frozen=True)
class DriveSet:
    """The three drive fields plus the shared wavevector magnitude.

    Probe and coupling co-propagate (Doppler sign -1, laser frequency
    minus atomic frequency convention); the control counter-propagates
    (sign +1).
    """

    probe: Field
    coupling: Field
    control: Field
    wavevector: float = WAVEVECTOR_780

    def validate(self) -> None:
        if self.wavevector <= 0:
            raise ValueError("wavevector must be positive")
        for f in (self.probe, self.coupling, self.control):
            f.validate()

    def with_probe_detuning(self, detuning: float) -> "DriveSet":
        return replace(self, probe=replace(self.probe, detuning=detuning))

    def with_coupling_detuning(self, detuning: float) -> "DriveSet":
        return replace(self, coupling=replace(self.coupling, detuning=detuning))


def default_scheme(transit_rate: float = TRANSIT_DEFAULT,
                   transit_as_dephasing: bool = False) -> LevelScheme:
    """Rb-like defaults: both excited states decay at 2pi x 6 MHz.

    Level 1 branches equally to the two ground states; level 3 decays
    entirely to ground state 2 (closed upper transition).
    """
    return LevelScheme(
        natural_decay=(0.0, GAMMA_D2, 0.0, GAMMA_D2),
        branching=((0.0, 0.0, 0.0, 0.0),
                   (0.5, 0.0, 0.5, 0.0),
                   (0.0, 0.0, 0.0, 0.0),
                   (0.0, 0.0, 1.0, 0.0)),
        transit_rate=transit_rate,
        transit_as_dephasing=transit_as_dephasing,
    )


def default_drives(probe_rabi: float = TWO_PI * 0.1e6,
                   coupling_rabi: float = TWO_PI * 5e6,
                   control_rabi: float = 0.0,
                   probe_detuning: float = 0.0,
                   coupling_detuning: float = 0.0,
                   control_detuning: float = 0.0,
                   wavevector: float = WAVEVECTOR_780) -> DriveSet:
    """Drive set at the standard operating point; control off unless given."""
    return DriveSet(
        probe=Field(probe_rabi, probe_detuning, -1),
        coupling=Field(coupling_rabi, coupling_detuning, -1),
        control=Field(control_rabi, control_detuning, +1),
        wavevector=wavevector,
    )
